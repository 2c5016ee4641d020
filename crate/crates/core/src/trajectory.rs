//! Reference generation for the approach and transport phases, and the
//! closed-form kinematics of a planar 2R arm used to turn Cartesian
//! references into joint references.
//!
//! Approach (t < T_a): each end-effector blends exponentially from its
//! initial point to its grasp point, p(t) = p_f + (p_i − p_f)·exp(−10t²).
//!
//! Transport (t ≥ T_a): the object COM follows the lower half of a circle
//! around the obstacle, polar angle φ going from −π to 0 over T_t. The
//! end-effectors stay at ±d₁/2 along x from the COM.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::dynamics::{positive, Arm, RobotParams};
use crate::{Error, Result, Vec4};

/// Decay rate of the exponential approach blend (1/s²).
pub const APPROACH_RATE: f64 = 10.0;

pub type Point = Vector2<f64>;

/// Time law of the polar angle during transport.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepProfile {
    /// Constant angular rate. The joint velocity reference steps at the grasp instant.
    Linear,
    /// Half-cosine time scaling: zero angular rate at both ends.
    Cosine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    /// Initial end-effector points, right arm first (m).
    pub initial_points: [[f64; 2]; 2],
    /// Grasp points reached at the end of the approach, right arm first (m).
    pub approach_points: [[f64; 2]; 2],
    /// Obstacle position, centre of the transport circle (m).
    pub obstacle_center: [f64; 2],
    /// Radius of the transport circle (m).
    pub radius: f64,
    /// Approach duration T_a (s).
    pub approach_duration: f64,
    /// Transport duration T_t (s).
    pub transport_duration: f64,
    /// Step of the central difference used for joint reference velocities (s).
    pub velocity_step: f64,
    pub sweep: SweepProfile,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            initial_points: [[0.76, 0.6], [-0.76, 0.6]],
            approach_points: [[-0.275, 1.4], [-0.525, 1.4]],
            obstacle_center: [0.0, 1.4],
            radius: 0.4,
            approach_duration: 2.0,
            transport_duration: 4.0,
            velocity_step: 1e-3,
            sweep: SweepProfile::Cosine,
        }
    }
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<()> {
        positive("trajectory.radius", self.radius)?;
        positive("trajectory.approach_duration", self.approach_duration)?;
        positive("trajectory.transport_duration", self.transport_duration)?;
        positive("trajectory.velocity_step", self.velocity_step)?;
        let finite = self
            .initial_points
            .iter()
            .chain(self.approach_points.iter())
            .flatten()
            .chain(self.obstacle_center.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("trajectory", "all points must be finite"));
        }
        Ok(())
    }

    /// Checks that every commanded end-effector point of the protocol lies
    /// in its arm's workspace.
    pub fn check_reachable(&self, params: &RobotParams) -> Result<()> {
        let end = self.approach_duration + self.transport_duration;
        let samples = 2000;
        for i in 0..=samples {
            let t = end * i as f64 / samples as f64;
            let r = cartesian_reference(self, t);
            for arm in Arm::BOTH {
                inverse_kinematics(params, arm, r.end_effector(arm), ElbowBranch::Positive).map_err(|e| {
                    Error::invalid("trajectory", format!("reference at t = {t:.3} s is unreachable: {e}"))
                })?;
            }
        }
        Ok(())
    }

    fn point(p: [f64; 2]) -> Point {
        Point::new(p[0], p[1])
    }

    /// Polar angle and its first two time derivatives at time `t`.
    pub fn sweep_angle(&self, t: f64) -> (f64, f64, f64) {
        let tt = self.transport_duration;
        let sigma = (t - self.approach_duration) / tt;
        if sigma <= 0.0 {
            return (-PI, 0.0, 0.0);
        }
        if sigma >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        match self.sweep {
            SweepProfile::Linear => (-PI + PI * sigma, PI / tt, 0.0),
            SweepProfile::Cosine => {
                let (s, c) = (PI * sigma).sin_cos();
                let rate = PI / tt;
                (-PI + 0.5 * PI * (1.0 - c), 0.5 * PI * s * rate, 0.5 * PI * c * rate * rate)
            }
        }
    }

    /// Object COM on the transport circle at polar angle `phi`.
    pub fn circle_point(&self, phi: f64) -> Point {
        let (s, c) = phi.sin_cos();
        Self::point(self.obstacle_center) + Point::new(c, s) * self.radius
    }
}

/// Reference end-effector points and object COM at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianReference {
    pub right: Point,
    pub left: Point,
    pub com: Point,
}

impl CartesianReference {
    pub fn end_effector(&self, arm: Arm) -> Point {
        match arm {
            Arm::Right => self.right,
            Arm::Left => self.left,
        }
    }
}

/// End-effector and object references at time `t`.
///
/// The approach blend is even in `t`, so negative times are accepted and
/// mirror the positive ones; this keeps central differences at t = 0 exact.
pub fn cartesian_reference(cfg: &TrajectoryConfig, t: f64) -> CartesianReference {
    if t < cfg.approach_duration {
        let w = (-APPROACH_RATE * t * t).exp();
        let blend = |i: usize| {
            let f = TrajectoryConfig::point(cfg.approach_points[i]);
            f + (TrajectoryConfig::point(cfg.initial_points[i]) - f) * w
        };
        CartesianReference {
            right: blend(0),
            left: blend(1),
            com: cfg.circle_point(-PI),
        }
    } else {
        let (phi, _, _) = cfg.sweep_angle(t);
        grasp_pose(cfg, phi)
    }
}

/// Grasp pose with the object COM at polar angle `phi` and the
/// end-effectors offset by ±d₁/2 along x. The offset is half the distance
/// between the approach grasp points.
fn grasp_pose(cfg: &TrajectoryConfig, phi: f64) -> CartesianReference {
    let com = cfg.circle_point(phi);
    let half = 0.5 * (cfg.approach_points[0][0] - cfg.approach_points[1][0]);
    CartesianReference {
        right: com + Point::new(half, 0.0),
        left: com - Point::new(half, 0.0),
        com,
    }
}

/// Largest distance between the approach end points and the end-effector
/// points of the first transport pose, using the object length from `params`.
pub fn phase_boundary_gap(cfg: &TrajectoryConfig, params: &RobotParams) -> f64 {
    let com = cfg.circle_point(-PI);
    let half = Point::new(0.5 * params.object_length, 0.0);
    let right = (com + half - TrajectoryConfig::point(cfg.approach_points[0])).norm();
    let left = (com - half - TrajectoryConfig::point(cfg.approach_points[1])).norm();
    right.max(left)
}

/// Reference acceleration of the object COM (zero while it waits to be grasped).
pub fn object_acceleration(cfg: &TrajectoryConfig, t: f64) -> (f64, f64) {
    if t < cfg.approach_duration {
        return (0.0, 0.0);
    }
    let (phi, rate, accel) = cfg.sweep_angle(t);
    let (s, c) = phi.sin_cos();
    let r = cfg.radius;
    (-r * (accel * s + rate * rate * c), r * (accel * c - rate * rate * s))
}

pub fn forward_kinematics(p: &RobotParams, arm: Arm, angles: [f64; 2]) -> Point {
    let (la, lb) = p.arm_lengths(arm);
    let (q1, q12) = (angles[0], angles[0] + angles[1]);
    Point::new(
        p.shoulder_x(arm) + la * q1.cos() + lb * q12.cos(),
        la * q1.sin() + lb * q12.sin(),
    )
}

/// Sign of the elbow angle selecting one of the two IK solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElbowBranch {
    Positive,
    Negative,
}

impl ElbowBranch {
    pub fn of_angle(elbow: f64) -> Self {
        if elbow >= 0.0 {
            ElbowBranch::Positive
        } else {
            ElbowBranch::Negative
        }
    }

    fn sign(self) -> f64 {
        match self {
            ElbowBranch::Positive => 1.0,
            ElbowBranch::Negative => -1.0,
        }
    }
}

pub fn inverse_kinematics(p: &RobotParams, arm: Arm, target: Point, branch: ElbowBranch) -> Result<[f64; 2]> {
    let (la, lb) = p.arm_lengths(arm);
    let dx = target.x - p.shoulder_x(arm);
    let dy = target.y;
    let r2 = dx * dx + dy * dy;
    let r = r2.sqrt();
    let (min_reach, max_reach) = ((la - lb).abs(), la + lb);
    let tol = 1e-12 * max_reach;
    if !(r <= max_reach + tol && r >= min_reach - tol) {
        return Err(Error::Unreachable {
            arm: arm.number(),
            distance: r,
            min_reach,
            max_reach,
        });
    }
    let c = ((r2 - la * la - lb * lb) / (2.0 * la * lb)).clamp(-1.0, 1.0);
    let q2 = branch.sign() * c.acos();
    let q1 = dy.atan2(dx) - (lb * q2.sin()).atan2(la + lb * q2.cos());
    Ok([q1, q2])
}

/// Joint reference x₁r and its rate ẋ₁r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointReference {
    pub theta_r: Vec4,
    pub theta_r_dot: Vec4,
}

/// Joint-space reference generator with elbow branches fixed for a run.
#[derive(Debug, Clone)]
pub struct JointReferenceGenerator {
    params: RobotParams,
    cfg: TrajectoryConfig,
    branches: [ElbowBranch; 2],
    anchor: Vec4,
}

impl JointReferenceGenerator {
    /// Picks each arm's elbow branch from the sign of its initial elbow angle
    /// and unwraps all reference angles to within π of `initial_theta`.
    pub fn new(params: &RobotParams, cfg: &TrajectoryConfig, initial_theta: &Vec4) -> Self {
        Self {
            params: params.clone(),
            cfg: cfg.clone(),
            branches: [
                ElbowBranch::of_angle(initial_theta[1]),
                ElbowBranch::of_angle(initial_theta[3]),
            ],
            anchor: *initial_theta,
        }
    }

    pub fn config(&self) -> &TrajectoryConfig {
        &self.cfg
    }

    pub fn branches(&self) -> [ElbowBranch; 2] {
        self.branches
    }

    pub fn angles_at(&self, t: f64) -> Result<Vec4> {
        let r = cartesian_reference(&self.cfg, t);
        let mut out = Vec4::zeros();
        for (arm, branch) in Arm::BOTH.into_iter().zip(self.branches) {
            let q = inverse_kinematics(&self.params, arm, r.end_effector(arm), branch)?;
            let o = arm.offset();
            out[o] = unwrap_near(q[0], self.anchor[o]);
            out[o + 1] = unwrap_near(q[1], self.anchor[o + 1]);
        }
        Ok(out)
    }

    pub fn reference(&self, t: f64) -> Result<JointReference> {
        let h = self.cfg.velocity_step;
        let theta_r = self.angles_at(t)?;
        let theta_r_dot = (self.angles_at(t + h)? - self.angles_at(t - h)?) / (2.0 * h);
        Ok(JointReference { theta_r, theta_r_dot })
    }
}

/// Shifts `angle` by a multiple of 2π to lie within π of `anchor`.
fn unwrap_near(angle: f64, anchor: f64) -> f64 {
    let turns = ((angle - anchor) / (2.0 * PI)).round();
    angle - turns * 2.0 * PI
}

/// Joint reference at time `t` with branches chosen from `initial_theta`.
pub fn joint_reference(
    params: &RobotParams,
    cfg: &TrajectoryConfig,
    initial_theta: &Vec4,
    t: f64,
) -> Result<JointReference> {
    JointReferenceGenerator::new(params, cfg, initial_theta).reference(t)
}
