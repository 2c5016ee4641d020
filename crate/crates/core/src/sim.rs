//! Fixed-step closed loop: plant, controller, disturbance, logging and metrics.
//!
//! Each control period the controller samples the state, computes a torque,
//! and the torque, grasp forces and disturbance are held while the plant is
//! integrated with classical RK4 (optionally split into `substeps` equal
//! RK4 steps). The DSC filter and the network weights then take one Euler
//! step.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dsc::{dsc_control, filter_step, virtual_control, DscGains, DscState, SurfaceDiagnostics};
use crate::dynamics::{lumped_dynamics, mass_matrix, solve_mass, Arm, JointState, RobotParams};
use crate::payload::{grasp_forces, GraspForces};
use crate::rbfn::{activations, network_input, rbfn_dsc_control, weight_update, RbfnConfig, RbfnSettings, RbfnWeights};
use crate::trajectory::{
    forward_kinematics, object_acceleration, phase_boundary_gap, JointReferenceGenerator, TrajectoryConfig,
};
use crate::{Error, Result, Vec4};

/// ‖s‖ below which the certain-model monitor stops checking V₂.
pub const SURFACE_FLOOR: f64 = 1e-6;
/// Per-step increase of V₂ tolerated by the Lyapunov monitors.
pub const LYAPUNOV_TOLERANCE: f64 = 1e-6;
/// Largest allowed distance between the approach end points and the first transport pose (m).
pub const PHASE_GAP_TOLERANCE: f64 = 1e-6;

/// External joint torque T_d(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DisturbanceSpec {
    Zero,
    /// `amplitude` on every joint for t_on ≤ t < t_off.
    Pulse {
        t_on: f64,
        t_off: f64,
        amplitude: [f64; 4],
    },
    /// amplitude·sin(2π·frequency·t + phase), per joint. Frequency in Hz.
    Sinusoid {
        amplitude: [f64; 4],
        frequency: [f64; 4],
        phase: [f64; 4],
    },
}

impl Default for DisturbanceSpec {
    fn default() -> Self {
        DisturbanceSpec::Pulse {
            t_on: 2.0,
            t_off: 2.5,
            amplitude: [5.0; 4],
        }
    }
}

impl DisturbanceSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |field: &str, v: &[f64]| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::invalid(field, "must be finite"))
            }
        };
        match self {
            DisturbanceSpec::Zero => Ok(()),
            DisturbanceSpec::Pulse { t_on, t_off, amplitude } => {
                finite("sim.disturbance", &[*t_on, *t_off])?;
                finite("sim.disturbance.amplitude", amplitude)?;
                if t_off < t_on {
                    return Err(Error::invalid("sim.disturbance", "t_off must not precede t_on"));
                }
                Ok(())
            }
            DisturbanceSpec::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => {
                finite("sim.disturbance.amplitude", amplitude)?;
                finite("sim.disturbance.frequency", frequency)?;
                finite("sim.disturbance.phase", phase)
            }
        }
    }
}

pub fn disturbance_at(spec: &DisturbanceSpec, t: f64) -> Vec4 {
    match spec {
        DisturbanceSpec::Zero => Vec4::zeros(),
        DisturbanceSpec::Pulse { t_on, t_off, amplitude } => {
            if *t_on <= t && t < *t_off {
                Vec4::from(*amplitude)
            } else {
                Vec4::zeros()
            }
        }
        DisturbanceSpec::Sinusoid {
            amplitude,
            frequency,
            phase,
        } => Vec4::from_fn(|i, _| amplitude[i] * (2.0 * PI * frequency[i] * t + phase[i]).sin()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    /// DSC with the lumped term K known exactly.
    DscCertain,
    /// DSC with K estimated online by the RBF network.
    RbfnDsc,
}

impl ControllerKind {
    pub fn label(self) -> &'static str {
        match self {
            ControllerKind::DscCertain => "dsc-certain",
            ControllerKind::RbfnDsc => "rbfn-dsc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Control period (s).
    pub dt: f64,
    /// Simulated time (s). Must be a whole number of control periods.
    pub duration: f64,
    /// RK4 steps per control period.
    pub substeps: usize,
    pub controller: ControllerKind,
    pub disturbance: DisturbanceSpec,
    /// Initial joint angles (rad).
    pub initial_theta: [f64; 4],
    /// Initial joint rates (rad/s).
    pub initial_theta_dot: [f64; 4],
    /// |z₁| threshold for the settling time (rad).
    pub settle_threshold: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            duration: 6.0,
            substeps: 1,
            controller: ControllerKind::RbfnDsc,
            disturbance: DisturbanceSpec::default(),
            initial_theta: [PI / 6.0, PI / 2.0, PI, -2.0 * PI / 3.0],
            initial_theta_dot: [0.0; 4],
            settle_threshold: 0.01,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        crate::dynamics::positive("sim.dt", self.dt)?;
        crate::dynamics::positive("sim.duration", self.duration)?;
        crate::dynamics::positive("sim.settle_threshold", self.settle_threshold)?;
        if self.substeps == 0 {
            return Err(Error::invalid("sim.substeps", "must be >= 1"));
        }
        let steps = self.duration / self.dt;
        if (steps - steps.round()).abs() > 1e-6 {
            return Err(Error::invalid(
                "sim.duration",
                format!("must be a whole number of steps of dt = {} s", self.dt),
            ));
        }
        if !self.initial_theta.iter().chain(&self.initial_theta_dot).all(|v| v.is_finite()) {
            return Err(Error::invalid("sim.initial_theta", "initial state must be finite"));
        }
        self.disturbance.validate()
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn initial_state(&self) -> JointState {
        JointState::new(Vec4::from(self.initial_theta), Vec4::from(self.initial_theta_dot))
    }
}

/// Everything one run needs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Setup {
    pub params: RobotParams,
    pub trajectory: TrajectoryConfig,
    pub gains: DscGains,
    pub rbfn: RbfnSettings,
    pub sim: SimConfig,
}

impl Setup {
    /// Checks each section, then the constraints that span sections.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.trajectory.validate()?;
        self.gains.validate()?;
        self.rbfn.validate()?;
        self.sim.validate()?;

        let ratio = self.sim.dt / self.gains.tau;
        if ratio > crate::dsc::MAX_FILTER_RATIO {
            return Err(Error::invalid(
                "sim.dt",
                format!("dt/tau = {ratio} exceeds {}", crate::dsc::MAX_FILTER_RATIO),
            ));
        }
        if let Some(c) = self.gains.layer_contraction(self.sim.dt) {
            if c >= 1.0 {
                return Err(Error::invalid(
                    "gains.boundary_layer",
                    format!("|1 - dt(c2/phi + c3)| = {c} >= 1: the sampled saturation does not settle"),
                ));
            }
        }
        if self.sim.duration < self.trajectory.approach_duration {
            return Err(Error::invalid(
                "sim.duration",
                "must cover the approach phase (duration >= trajectory.approach_duration)",
            ));
        }
        let gap = phase_boundary_gap(&self.trajectory, &self.params);
        if gap > PHASE_GAP_TOLERANCE {
            return Err(Error::invalid(
                "trajectory.approach_points",
                format!("grasp points are {gap} m away from the first transport pose"),
            ));
        }
        self.trajectory.check_reachable(&self.params)
    }

    /// Radius of the Lyapunov monitor for the configured controller.
    pub fn monitor_radius(&self) -> f64 {
        match self.sim.controller {
            ControllerKind::DscCertain => SURFACE_FLOOR,
            ControllerKind::RbfnDsc => self.rbfn.monitor(&self.gains).radius(),
        }
    }
}

/// A plant whose lumped term is exactly Wᵀh for a known W and the
/// controller's own hidden layer. The mass matrix is the robot's.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPlant {
    pub network: RbfnConfig,
    pub weights: DMatrix<f64>,
}

impl SyntheticPlant {
    pub fn lumped(&self, state: &JointState) -> Vec4 {
        let h = activations(&self.network, &network_input(&state.theta, &state.theta_dot));
        let k = self.weights.tr_mul(&h);
        Vec4::new(k[0], k[1], k[2], k[3])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlantModel {
    /// The dual-arm robot with contact forces, Coriolis, friction and T_d.
    Robot,
    Synthetic(SyntheticPlant),
}

impl PlantModel {
    /// Lumped term K acting on the plant. The synthetic plant ignores contact and T_d.
    pub fn lumped(&self, p: &RobotParams, state: &JointState, contact: &Vec4, td: &Vec4) -> Vec4 {
        match self {
            PlantModel::Robot => lumped_dynamics(p, state, contact, td),
            PlantModel::Synthetic(s) => s.lumped(state),
        }
    }

    pub fn acceleration(&self, p: &RobotParams, state: &JointState, u: &Vec4, contact: &Vec4, td: &Vec4) -> Result<Vec4> {
        solve_mass(&mass_matrix(p, &state.theta), &(u + self.lumped(p, state, contact, td)))
    }
}

/// Held inputs over one integration interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeldInputs {
    pub u: Vec4,
    pub contact: Vec4,
    pub td: Vec4,
}

/// One classical RK4 step of the plant with the inputs held.
pub fn plant_step(plant: &PlantModel, p: &RobotParams, state: &JointState, inputs: &HeldInputs, h: f64) -> Result<JointState> {
    let f = |s: &JointState| -> Result<(Vec4, Vec4)> {
        Ok((s.theta_dot, plant.acceleration(p, s, &inputs.u, &inputs.contact, &inputs.td)?))
    };
    let shift = |k: &(Vec4, Vec4), a: f64| JointState::new(state.theta + k.0 * a, state.theta_dot + k.1 * a);
    let k1 = f(state)?;
    let k2 = f(&shift(&k1, 0.5 * h))?;
    let k3 = f(&shift(&k2, 0.5 * h))?;
    let k4 = f(&shift(&k3, h))?;
    Ok(JointState::new(
        state.theta + (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * (h / 6.0),
        state.theta_dot + (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * (h / 6.0),
    ))
}

/// Mutable state of one run between control instants.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopState {
    /// Index of the control instant this state belongs to.
    pub index: usize,
    pub joints: JointState,
    pub filter: DscState,
    pub weights: RbfnWeights,
}

/// One row of the run log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub t: f64,
    pub theta: Vec4,
    pub theta_dot: Vec4,
    pub theta_r: Vec4,
    pub z1: Vec4,
    pub s: Vec4,
    pub u: Vec4,
    /// (F₁, F_s1y, F₂, F_s2y)
    pub contact: Vec4,
    pub td: Vec4,
    pub v1: f64,
    pub v2_core: f64,
    pub w_norm: f64,
    pub cone_ok: bool,
}

impl Record {
    fn csv_header() -> Vec<String> {
        let mut cols = vec!["t".to_string()];
        for group in ["theta", "theta_dot", "theta_r", "z1", "s", "u", "f", "td"] {
            cols.extend((1..=4).map(|j| format!("{group}{j}")));
        }
        cols.extend(["v1", "v2_core", "w_norm", "cone_ok"].map(String::from));
        cols
    }

    fn csv_row(&self) -> Vec<String> {
        let mut row = vec![self.t.to_string()];
        for v in [
            &self.theta,
            &self.theta_dot,
            &self.theta_r,
            &self.z1,
            &self.s,
            &self.u,
            &self.contact,
            &self.td,
        ] {
            row.extend(v.iter().map(|x| x.to_string()));
        }
        row.push(self.v1.to_string());
        row.push(self.v2_core.to_string());
        row.push(self.w_norm.to_string());
        row.push(u8::from(self.cone_ok).to_string());
        row
    }
}

/// Controller output at one control instant.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub record: Record,
    pub inputs: HeldInputs,
    pub alpha: Vec4,
    /// Hidden activations, RBFN mode only.
    pub h: Option<DVector<f64>>,
}

/// Closed loop for one setup and plant. Holds only immutable context; the
/// evolving state is passed in and out of [`Simulator::step`].
#[derive(Debug, Clone)]
pub struct Simulator {
    setup: Setup,
    plant: PlantModel,
    network: RbfnConfig,
    reference: JointReferenceGenerator,
}

impl Simulator {
    pub fn new(setup: &Setup, plant: PlantModel) -> Result<Self> {
        setup.validate()?;
        let network = setup.rbfn.build()?;
        let reference = JointReferenceGenerator::new(&setup.params, &setup.trajectory, &setup.sim.initial_state().theta);
        Ok(Self {
            setup: setup.clone(),
            plant,
            network,
            reference,
        })
    }

    pub fn setup(&self) -> &Setup {
        &self.setup
    }

    pub fn network(&self) -> &RbfnConfig {
        &self.network
    }

    pub fn time(&self, index: usize) -> f64 {
        index as f64 * self.setup.sim.dt
    }

    /// State at t = 0: the configured joint state, α₂f(0) = α(0), Ŵ(0) = 0.
    pub fn initial_state(&self) -> Result<LoopState> {
        let joints = self.setup.sim.initial_state();
        let r = self.reference.reference(0.0)?;
        let alpha = virtual_control(&self.setup.gains, &(joints.theta - r.theta_r), &r.theta_r_dot);
        Ok(LoopState {
            index: 0,
            joints,
            filter: DscState::new(alpha),
            weights: RbfnWeights::zeros(self.network.neurons()),
        })
    }

    /// Samples the loop at `state` and computes the control.
    pub fn evaluate(&self, state: &LoopState) -> Result<Evaluation> {
        let Setup {
            params,
            trajectory,
            gains,
            sim,
            ..
        } = &self.setup;
        let t = self.time(state.index);
        let joints = &state.joints;
        let r = self.reference.reference(t)?;
        let z1 = joints.theta - r.theta_r;
        let alpha = virtual_control(gains, &z1, &r.theta_r_dot);
        let diag = SurfaceDiagnostics::new(gains, z1, joints.theta_dot - state.filter.alpha_2f);
        let alpha_dot = state.filter.rate(gains, &alpha);
        let z1_dot = joints.theta_dot - r.theta_r_dot;

        let grasp = if t >= trajectory.approach_duration {
            let (xdd, ydd) = object_acceleration(trajectory, t);
            grasp_forces(params, xdd, ydd)
        } else {
            GraspForces::released()
        };
        let contact = grasp.contact_vector();
        let td = disturbance_at(&sim.disturbance, t);
        let m = mass_matrix(params, &joints.theta);

        let (u, h) = match sim.controller {
            ControllerKind::DscCertain => {
                let k = self.plant.lumped(params, joints, &contact, &td);
                (dsc_control(gains, &m, &k, &z1_dot, &diag.s, &alpha_dot), None)
            }
            ControllerKind::RbfnDsc => {
                let h = activations(&self.network, &network_input(&joints.theta, &joints.theta_dot));
                let u = rbfn_dsc_control(gains, &state.weights, &m, &h, &diag.s, &z1_dot, &alpha_dot);
                (u, Some(h))
            }
        };

        Ok(Evaluation {
            record: Record {
                t,
                theta: joints.theta,
                theta_dot: joints.theta_dot,
                theta_r: r.theta_r,
                z1,
                s: diag.s,
                u,
                contact,
                td,
                v1: diag.v1,
                v2_core: diag.v2_core,
                w_norm: state.weights.frobenius(),
                cone_ok: grasp.cone_ok,
            },
            inputs: HeldInputs { u, contact, td },
            alpha,
            h,
        })
    }

    /// Advances one control period. Returns the next state and the record
    /// sampled at the current one.
    pub fn step(&self, state: &LoopState) -> Result<(LoopState, Record)> {
        let ev = self.evaluate(state)?;
        let Setup { params, gains, sim, .. } = &self.setup;
        let h = sim.dt / sim.substeps as f64;
        let aborted = || Error::RunAborted {
            step: state.index,
            t: ev.record.t,
        };
        let mut joints = state.joints;
        for _ in 0..sim.substeps {
            // A blown-up state shows up either as non-finite values or as a
            // mass matrix that no longer factorizes.
            joints = plant_step(&self.plant, params, &joints, &ev.inputs, h).map_err(|_| aborted())?;
        }
        if !joints.is_finite() {
            return Err(aborted());
        }
        let filter = filter_step(&state.filter, gains, &ev.alpha, sim.dt)?;
        let weights = match &ev.h {
            Some(hv) => weight_update(&state.weights, &self.network, hv, &ev.record.s, sim.dt),
            None => state.weights.clone(),
        };
        let next = LoopState {
            index: state.index + 1,
            joints,
            filter,
            weights,
        };
        Ok((next, ev.record))
    }

    /// Runs the whole protocol: `steps + 1` records on a uniform grid.
    pub fn run(&self) -> Result<RunLog> {
        let steps = self.setup.sim.steps();
        let mut records = Vec::with_capacity(steps + 1);
        let mut state = self.initial_state()?;
        for _ in 0..steps {
            let (next, record) = self.step(&state)?;
            records.push(record);
            state = next;
        }
        records.push(self.evaluate(&state)?.record);
        let weights = match self.setup.sim.controller {
            ControllerKind::RbfnDsc => Some(state.weights),
            ControllerKind::DscCertain => None,
        };
        Ok(RunLog {
            controller: self.setup.sim.controller,
            dt: self.setup.sim.dt,
            grasp_time: self.setup.trajectory.approach_duration,
            monitor_radius: self.setup.monitor_radius(),
            params: self.setup.params.clone(),
            records,
            weights,
            final_state: state.joints,
        })
    }
}

/// Runs `setup` on the robot plant.
pub fn simulate(setup: &Setup) -> Result<RunLog> {
    Simulator::new(setup, PlantModel::Robot)?.run()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub controller: ControllerKind,
    pub dt: f64,
    pub grasp_time: f64,
    /// ‖s‖ above which V₂ must not grow.
    pub monitor_radius: f64,
    pub params: RobotParams,
    pub records: Vec<Record>,
    /// Final network weights, RBFN mode only.
    pub weights: Option<RbfnWeights>,
    pub final_state: JointState,
}

impl RunLog {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(Record::csv_header())?;
        for r in &self.records {
            wtr.write_record(r.csv_row())?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub rmse: [f64; 4],
    /// Largest |z₁| from the settling time on; `None` if the joint never settles.
    pub max_error_after_settling: [Option<f64>; 4],
    /// First time after which |z₁| stays below the threshold; `None` if not settled.
    pub settling_time: [Option<f64>; 4],
    /// RMS end-effector deviation from the reference over the whole run, per arm (m).
    pub ee_rms: [f64; 2],
    /// Same, over the transport phase only. `None` if the run ends before the grasp.
    pub ee_rms_transport: Option<[f64; 2]>,
    pub lyapunov_violations: usize,
    /// Largest V₂ increase over the monitored steps.
    pub max_v2_increase: Option<f64>,
    /// Records with a grasp force outside its friction cone.
    pub cone_trips: usize,
    pub w_norm_max: f64,
    pub w_norm_final: f64,
}

/// Index of the first record after which |series| stays below `threshold`.
fn settle_index(series: impl DoubleEndedIterator<Item = f64> + ExactSizeIterator, threshold: f64) -> Option<usize> {
    let n = series.len();
    match series.rev().position(|v| v.abs() >= threshold) {
        None => Some(0),
        Some(0) => None,
        Some(k) => Some(n - k),
    }
}

pub fn compute_metrics(log: &RunLog, settle_threshold: f64) -> Result<Metrics> {
    let recs = &log.records;
    if recs.is_empty() {
        return Err(Error::EmptyLog);
    }
    let n = recs.len() as f64;
    let mut rmse = [0.0; 4];
    let mut settling_time = [None; 4];
    let mut max_error_after_settling = [None; 4];
    for j in 0..4 {
        rmse[j] = (recs.iter().map(|r| r.z1[j] * r.z1[j]).sum::<f64>() / n).sqrt();
        if let Some(k) = settle_index(recs.iter().map(|r| r.z1[j]), settle_threshold) {
            settling_time[j] = Some(recs[k].t);
            max_error_after_settling[j] = Some(recs[k..].iter().map(|r| r.z1[j].abs()).fold(0.0, f64::max));
        }
    }

    let deviation = |r: &Record| -> [f64; 2] {
        Arm::BOTH.map(|arm| {
            let o = arm.offset();
            let actual = forward_kinematics(&log.params, arm, [r.theta[o], r.theta[o + 1]]);
            let target = forward_kinematics(&log.params, arm, [r.theta_r[o], r.theta_r[o + 1]]);
            (actual - target).norm_squared()
        })
    };
    let rms = |it: &mut dyn Iterator<Item = &Record>| -> Option<[f64; 2]> {
        let mut acc = [0.0; 2];
        let mut count = 0usize;
        for r in it {
            let d = deviation(r);
            acc[0] += d[0];
            acc[1] += d[1];
            count += 1;
        }
        (count > 0).then(|| acc.map(|a| (a / count as f64).sqrt()))
    };
    let ee_rms = rms(&mut recs.iter()).ok_or(Error::EmptyLog)?;
    let ee_rms_transport = rms(&mut recs.iter().filter(|r| r.t >= log.grasp_time));

    let mut lyapunov_violations = 0;
    let mut max_v2_increase: Option<f64> = None;
    for w in recs.windows(2) {
        if w[0].s.norm() > log.monitor_radius {
            let dv = w[1].v2_core - w[0].v2_core;
            max_v2_increase = Some(max_v2_increase.map_or(dv, |m| m.max(dv)));
            if dv > LYAPUNOV_TOLERANCE {
                lyapunov_violations += 1;
            }
        }
    }

    Ok(Metrics {
        rmse,
        max_error_after_settling,
        settling_time,
        ee_rms,
        ee_rms_transport,
        lyapunov_violations,
        max_v2_increase,
        cone_trips: recs.iter().filter(|r| !r.cone_ok).count(),
        w_norm_max: recs.iter().map(|r| r.w_norm).fold(0.0, f64::max),
        w_norm_final: recs.last().map_or(0.0, |r| r.w_norm),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

impl Metrics {
    /// Key/value pairs in a fixed order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for j in 0..4 {
            out.push((format!("rmse{}", j + 1), self.rmse[j].to_string()));
        }
        for j in 0..4 {
            out.push((format!("settling_time{}", j + 1), opt(self.settling_time[j])));
        }
        for j in 0..4 {
            out.push((format!("max_error_after_settling{}", j + 1), opt(self.max_error_after_settling[j])));
        }
        for (i, arm) in ["right", "left"].iter().enumerate() {
            out.push((format!("ee_rms_{arm}"), self.ee_rms[i].to_string()));
            out.push((
                format!("ee_rms_transport_{arm}"),
                opt(self.ee_rms_transport.map(|v| v[i])),
            ));
        }
        out.push(("lyapunov_violations".into(), self.lyapunov_violations.to_string()));
        out.push(("max_v2_increase".into(), opt(self.max_v2_increase)));
        out.push(("cone_trips".into(), self.cone_trips.to_string()));
        out.push(("w_norm_max".into(), self.w_norm_max.to_string()));
        out.push(("w_norm_final".into(), self.w_norm_final.to_string()));
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["metric", "value"])?;
        for (k, v) in self.entries() {
            wtr.write_record([k, v])?;
        }
        wtr.flush()?;
        Ok(())
    }
}
