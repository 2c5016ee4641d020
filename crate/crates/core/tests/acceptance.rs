//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use dualarm::dynamics::{forward_dynamics, mass_matrix, Arm, JointState, RobotParams};
use dualarm::payload::grasp_forces;
use dualarm::rbfn::{activations, Input, RbfnSettings};
use dualarm::sim::{
    compute_metrics, simulate, ControllerKind, LoopState, Metrics, PlantModel, RunLog, Setup, Simulator,
    SyntheticPlant, LYAPUNOV_TOLERANCE,
};
use dualarm::trajectory::{
    cartesian_reference, forward_kinematics, inverse_kinematics, phase_boundary_gap, ElbowBranch, TrajectoryConfig,
};
use dualarm::{Mat4, Vec4};
use nalgebra::{Cholesky, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn random_state(rng: &mut ChaCha8Rng) -> JointState {
    JointState::new(
        Vec4::from_fn(|_, _| rng.random_range(-PI..PI)),
        Vec4::from_fn(|_, _| rng.random_range(-3.0..3.0)),
    )
}

fn setup(controller: ControllerKind) -> Setup {
    let mut s = Setup::default();
    s.sim.controller = controller;
    s
}

fn run_with_metrics(controller: ControllerKind) -> (RunLog, Metrics, Duration) {
    let start = Instant::now();
    let s = setup(controller);
    let log = simulate(&s).expect("default run failed");
    let metrics = compute_metrics(&log, s.sim.settle_threshold).expect("metrics failed");
    (log, metrics, start.elapsed())
}

fn dsc_run() -> &'static (RunLog, Metrics, Duration) {
    static RUN: OnceLock<(RunLog, Metrics, Duration)> = OnceLock::new();
    RUN.get_or_init(|| run_with_metrics(ControllerKind::DscCertain))
}

fn rbfn_run() -> &'static (RunLog, Metrics, Duration) {
    static RUN: OnceLock<(RunLog, Metrics, Duration)> = OnceLock::new();
    RUN.get_or_init(|| run_with_metrics(ControllerKind::RbfnDsc))
}

fn fmt_times(v: &[Option<f64>; 4]) -> String {
    v.iter()
        .map(|t| t.map_or("never".to_string(), |x| format!("{x:.3}")))
        .collect::<Vec<_>>()
        .join(", ")
}

fn ac1_dynamics_oracle() -> Verdict {
    let start = Instant::now();
    let p = RobotParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = random_state(&mut rng);
        let u = Vec4::from_fn(|_, _| rng.random_range(-200.0..200.0));
        let f = Vec4::from_fn(|_, _| rng.random_range(-40.0..40.0));
        let td = Vec4::from_fn(|_, _| rng.random_range(-10.0..10.0));
        let a = forward_dynamics(&p, &s, &u, &f, &td).expect("forward dynamics failed");
        let b = common::oracle_acceleration(&p, &s, &u, &f, &td);
        worst = worst.max((a - b).amax());
    }
    let t = start.elapsed();
    verdict(
        worst < 1e-9 && within(t, 5.0),
        format!("max |Δθ̈| = {worst:.2e} rad/s² over 1000 states ({:.3} s)", t.as_secs_f64()),
    )
}

fn ac2_mass_matrix() -> Verdict {
    let start = Instant::now();
    let p = RobotParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    for _ in 0..1000 {
        let theta = random_state(&mut rng).theta;
        let m: Mat4 = mass_matrix(&p, &theta);
        let symmetric = m == m.transpose();
        let block_zero = (0..2).all(|i| (2..4).all(|j| m[(i, j)] == 0.0 && m[(j, i)] == 0.0));
        let pd = Cholesky::new(m).is_some();
        if !(symmetric && block_zero && pd) {
            failures += 1;
        }
    }
    let t = start.elapsed();
    verdict(
        failures == 0 && within(t, 1.0),
        format!("{failures} of 1000 configurations fail symmetry/zero-block/Cholesky ({:.3} s)", t.as_secs_f64()),
    )
}

fn ac3_force_allocation() -> Verdict {
    let start = Instant::now();
    let p = RobotParams::default();
    let m = p.payload_mass;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let at_zero = grasp_forces(&p, 0.0, 0.0);
    let mut jump: f64 = 0.0;
    for x in [1e-300, -1e-300, 1e-15, -1e-15] {
        let g = grasp_forces(&p, x, 0.0);
        jump = jump.max((g.f1 - at_zero.f1).abs()).max((g.f2 - at_zero.f2).abs());
    }
    let mut residual: f64 = 0.0;
    for _ in 0..1000 {
        let (x, y) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let g = grasp_forces(&p, x, y);
        residual = residual
            .max((g.f2 - g.f1 - m * x).abs())
            .max((g.fs1y + g.fs2y - m * y).abs())
            .max((g.fs1z + g.fs2z - m * p.gravity).abs());
    }
    let rest = (at_zero.f1 - 21.0).abs().max((at_zero.f2 - 21.0).abs());
    let t = start.elapsed();
    verdict(
        jump <= 1e-12 && residual <= 1e-12 && rest <= 1e-12 && within(t, 1.0),
        format!(
            "jump at ẍ=0 {jump:.1e} N, Newton residual {residual:.1e} N, F at rest = ({}, {}) N ({:.3} s)",
            at_zero.f1,
            at_zero.f2,
            t.as_secs_f64()
        ),
    )
}

fn ac4_kinematics() -> Verdict {
    let start = Instant::now();
    let p = RobotParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for arm in Arm::BOTH {
        for branch in [ElbowBranch::Positive, ElbowBranch::Negative] {
            let sign = match branch {
                ElbowBranch::Positive => 1.0,
                ElbowBranch::Negative => -1.0,
            };
            for _ in 0..1000 {
                let q = [rng.random_range(-PI..PI), sign * rng.random_range(1e-3..PI - 1e-3)];
                let target = forward_kinematics(&p, arm, q);
                match inverse_kinematics(&p, arm, target, branch) {
                    Ok(sol) => worst = worst.max((forward_kinematics(&p, arm, sol) - target).norm()),
                    Err(_) => failures += 1,
                }
            }
        }
    }
    let cfg = TrajectoryConfig::default();
    let gap = phase_boundary_gap(&cfg, &p);
    let before = cartesian_reference(&cfg, cfg.approach_duration - 1e-12);
    let after = cartesian_reference(&cfg, cfg.approach_duration);
    let seam = Arm::BOTH
        .iter()
        .map(|a| (before.end_effector(*a) - after.end_effector(*a)).norm())
        .fold(0.0, f64::max);
    let t = start.elapsed();
    verdict(
        failures == 0 && worst < 1e-9 && gap <= 1e-6 && seam <= 1e-6 && within(t, 1.0),
        format!(
            "round trip {worst:.1e} m over 4000 targets ({failures} rejected), phase gap {gap:.1e} m, seam {seam:.1e} m ({:.3} s)",
            t.as_secs_f64()
        ),
    )
}

fn ac5_theorem1_monitor() -> Verdict {
    let (_, m, t) = dsc_run();
    verdict(
        m.lyapunov_violations == 0 && within(*t, 30.0),
        format!(
            "{} steps with ‖s‖ > 1e-6 and ΔV₂ > {LYAPUNOV_TOLERANCE:e}; max ΔV₂ {:.2e} (6 s protocol in {:.2} s)",
            m.lyapunov_violations,
            m.max_v2_increase.unwrap_or(0.0),
            t.as_secs_f64()
        ),
    )
}

fn ac6_tracking() -> Verdict {
    let (_, m, _) = dsc_run();
    let ok = m.settling_time.iter().all(|t| t.is_some_and(|t| t < 1.0));
    verdict(ok, format!("DSC-certain settling times [{}] s", fmt_times(&m.settling_time)))
}

fn ac7_adaptive_lag() -> Verdict {
    let (_, dsc, _) = dsc_run();
    let (_, rbfn, _) = rbfn_run();
    let lags: Vec<Option<f64>> = (0..4)
        .map(|j| Some(rbfn.settling_time[j]? - dsc.settling_time[j]?))
        .collect();
    let ok = lags.iter().all(|l| l.is_some_and(|l| (0.0..=0.1).contains(&l)));
    let text = lags
        .iter()
        .map(|l| l.map_or("n/a".to_string(), |x| format!("{x:.3}")))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(
        ok,
        format!(
            "RBFN-DSC minus DSC-certain settling [{text}] s, allowed [0, 0.1]; RBFN settling [{}] s",
            fmt_times(&rbfn.settling_time)
        ),
    )
}

fn ac8_theorem2_monitor() -> Verdict {
    let s = setup(ControllerKind::RbfnDsc);
    let network = s.rbfn.build().expect("network");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut w = DMatrix::from_fn(network.neurons(), 4, |_, _| rng.random_range(-1.0..1.0));
    w *= 0.999 * s.rbfn.weight_bound / w.norm();
    let plant = PlantModel::Synthetic(SyntheticPlant {
        network,
        weights: w.clone(),
    });
    let sim = Simulator::new(&s, plant).expect("synthetic setup");
    let radius = s.rbfn.monitor(&s.gains).radius();
    let gamma = Vec4::from(s.rbfn.gamma);
    let full_v2 = |state: &LoopState, v2_core: f64| {
        let err = &w - &state.weights.w_hat;
        v2_core + 0.5 * (0..4).map(|j| err.column(j).norm_squared() / gamma[j]).sum::<f64>()
    };

    let mut state = sim.initial_state().expect("initial state");
    let (mut monitored, mut violations, mut worst) = (0, 0, f64::NEG_INFINITY);
    let mut previous: Option<(f64, f64)> = None;
    for _ in 0..=s.sim.steps() {
        let rec = sim.evaluate(&state).expect("evaluate").record;
        let v = full_v2(&state, rec.v2_core);
        if let Some((s_norm, v_prev)) = previous {
            if s_norm > radius {
                monitored += 1;
                worst = worst.max(v - v_prev);
                if v - v_prev > LYAPUNOV_TOLERANCE {
                    violations += 1;
                }
            }
        }
        previous = Some((rec.s.norm(), v));
        if state.index == s.sim.steps() {
            break;
        }
        state = sim.step(&state).expect("step").0;
    }
    verdict(
        violations == 0 && monitored > 0,
        format!(
            "{violations} violations over {monitored} steps with ‖s‖ > {radius:.5}; max ΔV₂ {worst:.2e} (‖W‖_F = {:.3})",
            w.norm()
        ),
    )
}

fn ac9_partition_of_unity() -> Verdict {
    let start = Instant::now();
    let network = RbfnSettings::default().build().expect("network");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let total = 100_000;
    for i in 0..total {
        let r = match i % 4 {
            0 | 1 => Input::from_fn(|k, _| {
                let b = if k < 4 { PI } else { 3.0 };
                rng.random_range(-2.0 * b..2.0 * b)
            }),
            2 => Input::from_fn(|_, _| {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                sign * 10f64.powf(rng.random_range(0.0..300.0))
            }),
            _ => Input::from_fn(|_, _| [f64::MAX, -f64::MAX, 1e154, -1e154, 0.0][rng.random_range(0..5)]),
        };
        let h = activations(&network, &r);
        let err = if h.iter().all(|v| v.is_finite()) {
            (h.sum() - 1.0).abs()
        } else {
            f64::INFINITY
        };
        worst = worst.max(err);
    }
    let t = start.elapsed();
    verdict(
        worst <= 1e-12 && within(t, 1.0),
        format!("max |Σh − 1| = {worst:.1e} over {total} inputs ({:.3} s)", t.as_secs_f64()),
    )
}

fn ac10_disturbance_robustness() -> Verdict {
    let (_, m, _) = rbfn_run();
    let rms = m.ee_rms_transport.map_or(f64::INFINITY, |v| v[0].max(v[1]));
    verdict(
        rms <= 0.02 && m.cone_trips == 0,
        format!(
            "RBFN-DSC transport end-effector RMS {rms:.2e} m (limit 0.02), friction-cone trips {}",
            m.cone_trips
        ),
    )
}

fn ac11_determinism_and_order() -> Verdict {
    let (first, _, _) = rbfn_run();
    let again = simulate(&setup(ControllerKind::RbfnDsc)).expect("rerun");
    let identical = *first == again;

    // Control held over each 1 ms period; only the plant integration is refined.
    let final_state = |substeps: usize| {
        let mut s = setup(ControllerKind::RbfnDsc);
        s.sim.substeps = substeps;
        let st = simulate(&s).expect("substep run").final_state;
        nalgebra::SVector::<f64, 8>::from_iterator(st.theta.iter().chain(st.theta_dot.iter()).copied())
    };
    let reference = final_state(16);
    let e1 = (final_state(1) - reference).norm();
    let e2 = (final_state(2) - reference).norm();
    let ratio = e1 / e2;
    verdict(
        identical && ratio >= 8.0,
        format!("rerun identical: {identical}; step-halving error {e1:.2e} -> {e2:.2e}, ratio {ratio:.1}"),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("dynamics oracle", ac1_dynamics_oracle),
        ("mass-matrix properties", ac2_mass_matrix),
        ("force allocation", ac3_force_allocation),
        ("IK/FK round trip", ac4_kinematics),
        ("certain-model Lyapunov monitor", ac5_theorem1_monitor),
        ("tracking convergence", ac6_tracking),
        ("adaptive lag", ac7_adaptive_lag),
        ("adaptive Lyapunov monitor", ac8_theorem2_monitor),
        ("partition of unity", ac9_partition_of_unity),
        ("disturbance robustness", ac10_disturbance_robustness),
        ("determinism and convergence order", ac11_determinism_and_order),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("AC{:<2} {tag}  {name}: {}", i + 1, v.detail);
        if !v.pass {
            failed.push(format!("AC{}", i + 1));
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
    } else {
        println!("acceptance: {} of {} criteria fail ({})", failed.len(), criteria.len(), failed.join(", "));
        std::process::exit(1);
    }
}
