//! Closed-form rigid-body model of the two planar 2-DoF arms.
//!
//! Joint ordering is (θ₁, θ₂) for the right arm, whose shoulder sits at
//! (+d₂/2, 0), and (θ₃, θ₄) for the left arm at (−d₂/2, 0). The arms do not
//! interact through their inertia; they are coupled only through the grasp
//! forces that enter via the Jacobian.
//!
//! The Coriolis-centripetal vector returned here is the complete additive
//! term (it already carries the velocity products) and holds no viscous
//! friction. Friction lives in [`viscous_friction`] only.

use nalgebra::Cholesky;
use serde::{Deserialize, Serialize};

use crate::{Error, Mat4, Result, Vec4};

/// Physical constants of both arms, the payload and the grasp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotParams {
    /// Link masses m₁..m₄ (kg).
    pub masses: [f64; 4],
    /// Link moments of inertia about the COM, I₁..I₄ (kg·m²).
    pub inertias: [f64; 4],
    /// Link lengths l₁..l₄ (m).
    pub lengths: [f64; 4],
    /// Joint-to-COM distances k₁..k₄ (m).
    pub com_distances: [f64; 4],
    /// Viscous joint friction b₁..b₄ (N·m·s).
    pub viscous: [f64; 4],
    /// Object length d₁ (m).
    pub object_length: f64,
    /// Distance between the two shoulders d₂ (m).
    pub base_separation: f64,
    /// Dry friction coefficient at the grasp contacts.
    pub friction_coefficient: f64,
    /// Payload mass (kg).
    pub payload_mass: f64,
    /// Gravitational acceleration (m/s²).
    pub gravity: f64,
}

impl Default for RobotParams {
    fn default() -> Self {
        Self {
            masses: [1.5; 4],
            inertias: [0.18; 4],
            lengths: [1.2; 4],
            com_distances: [0.48; 4],
            viscous: [110.0; 4],
            object_length: 0.25,
            base_separation: 1.2,
            friction_coefficient: 0.35,
            payload_mass: 1.5,
            gravity: 9.8,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<()> {
        for i in 0..4 {
            let j = i + 1;
            positive(&format!("robot.masses[{j}]"), self.masses[i])?;
            positive(&format!("robot.inertias[{j}]"), self.inertias[i])?;
            positive(&format!("robot.lengths[{j}]"), self.lengths[i])?;
            positive(&format!("robot.com_distances[{j}]"), self.com_distances[i])?;
            if self.com_distances[i] > self.lengths[i] {
                return Err(Error::invalid(
                    format!("robot.com_distances[{j}]"),
                    format!(
                        "must satisfy 0 < k <= l (k = {}, l = {})",
                        self.com_distances[i], self.lengths[i]
                    ),
                ));
            }
            if !(self.viscous[i] >= 0.0 && self.viscous[i].is_finite()) {
                return Err(Error::invalid(
                    format!("robot.viscous[{j}]"),
                    format!("must be finite and >= 0 (got {})", self.viscous[i]),
                ));
            }
        }
        positive("robot.object_length", self.object_length)?;
        positive("robot.base_separation", self.base_separation)?;
        positive("robot.payload_mass", self.payload_mass)?;
        positive("robot.gravity", self.gravity)?;
        let mu = self.friction_coefficient;
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::invalid(
                "robot.friction_coefficient",
                format!("must satisfy 0 < mu < 1 (got {mu})"),
            ));
        }
        Ok(())
    }

    /// Shoulder position of `arm` (1 or 2) on the x axis.
    pub fn shoulder_x(&self, arm: Arm) -> f64 {
        match arm {
            Arm::Right => 0.5 * self.base_separation,
            Arm::Left => -0.5 * self.base_separation,
        }
    }

    /// Link lengths (proximal, distal) of `arm`.
    pub fn arm_lengths(&self, arm: Arm) -> (f64, f64) {
        match arm {
            Arm::Right => (self.lengths[0], self.lengths[1]),
            Arm::Left => (self.lengths[2], self.lengths[3]),
        }
    }
}

pub(crate) fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0 (got {v})")))
    }
}

/// Which of the two arms. The right arm carries joints 1-2, the left arm 3-4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    Right,
    Left,
}

impl Arm {
    pub const BOTH: [Arm; 2] = [Arm::Right, Arm::Left];

    /// One-based arm number used in diagnostics.
    pub fn number(self) -> u8 {
        match self {
            Arm::Right => 1,
            Arm::Left => 2,
        }
    }

    /// Index of the arm's first joint in the 4-vector.
    pub fn offset(self) -> usize {
        match self {
            Arm::Right => 0,
            Arm::Left => 2,
        }
    }
}

/// Joint angles and velocities of all four joints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    pub theta: Vec4,
    pub theta_dot: Vec4,
}

impl JointState {
    pub fn new(theta: Vec4, theta_dot: Vec4) -> Self {
        Self { theta, theta_dot }
    }

    pub fn at_rest(theta: Vec4) -> Self {
        Self::new(theta, Vec4::zeros())
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().chain(self.theta_dot.iter()).all(|v| v.is_finite())
    }
}

/// Lumped inertia constants A₁..A₆.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
}

pub fn inertia_constants(p: &RobotParams) -> InertiaConstants {
    let [m1, m2, m3, m4] = p.masses;
    let [i1, i2, i3, i4] = p.inertias;
    let [l1, _, l3, _] = p.lengths;
    let [k1, k2, k3, k4] = p.com_distances;
    InertiaConstants {
        a1: m1 * k1 * k1 + m2 * l1 * l1 + i1,
        a2: m2 * k2 * k2 + i2,
        a3: m2 * l1 * k2,
        a4: m3 * k3 * k3 + m4 * l3 * l3 + i3,
        a5: m4 * k4 * k4 + i4,
        a6: m4 * l3 * k4,
    }
}

/// Joint-space inertia matrix M(θ). Block diagonal, one 2×2 block per arm.
pub fn mass_matrix(p: &RobotParams, theta: &Vec4) -> Mat4 {
    let a = inertia_constants(p);
    let c2 = theta[1].cos();
    let c4 = theta[3].cos();
    let m12 = a.a2 + a.a3 * c2;
    let m34 = a.a5 + a.a6 * c4;
    #[rustfmt::skip]
    let m = Mat4::new(
        a.a1 + a.a2 + 2.0 * a.a3 * c2, m12,  0.0, 0.0,
        m12,                           a.a2, 0.0, 0.0,
        0.0, 0.0, a.a4 + a.a5 + 2.0 * a.a6 * c4, m34,
        0.0, 0.0, m34,                           a.a5,
    );
    m
}

/// Coriolis-centripetal torques C(θ, θ̇), quadratic in θ̇.
pub fn coriolis_vector(p: &RobotParams, state: &JointState) -> Vec4 {
    let a = inertia_constants(p);
    let w = &state.theta_dot;
    let s2 = state.theta[1].sin();
    let s4 = state.theta[3].sin();
    Vec4::new(
        -a.a3 * s2 * (w[1] * w[1] + 2.0 * w[0] * w[1]),
        a.a3 * s2 * w[0] * w[0],
        -a.a6 * s4 * (w[3] * w[3] + 2.0 * w[2] * w[3]),
        a.a6 * s4 * w[2] * w[2],
    )
}

/// Viscous joint friction β = (bᵢθ̇ᵢ).
pub fn viscous_friction(p: &RobotParams, theta_dot: &Vec4) -> Vec4 {
    Vec4::from(p.viscous).component_mul(theta_dot)
}

/// Contact Jacobian mapping the grasp force vector (F₁, F_s1y, F₂, F_s2y)
/// to joint torques through Jᵀ.
pub fn jacobian(p: &RobotParams, theta: &Vec4) -> Mat4 {
    let [l1, l2, l3, l4] = p.lengths;
    let (t1, t2, t3, t4) = (theta[0], theta[1], theta[2], theta[3]);
    let (s1, c1) = t1.sin_cos();
    let (s12, c12) = (t1 + t2).sin_cos();
    let (s3, c3) = t3.sin_cos();
    let (s34, c34) = (t3 + t4).sin_cos();
    #[rustfmt::skip]
    let j = Mat4::new(
        -l1 * s1 - l2 * s12, -l1 * c1 - l2 * c12, 0.0, 0.0,
        -l2 * s12,           -l2 * c12,           0.0, 0.0,
        0.0, 0.0, l3 * s3 + l4 * s34, -l3 * c3 - l4 * c34,
        0.0, 0.0, l4 * s34,           -l4 * c34,
    );
    j
}

/// Everything on the right-hand side except the control torque:
/// K = JᵀF − C − β − T_d. Gravity does not act in the horizontal plane.
pub fn lumped_dynamics(p: &RobotParams, state: &JointState, contact: &Vec4, td: &Vec4) -> Vec4 {
    jacobian(p, &state.theta).transpose() * contact
        - coriolis_vector(p, state)
        - viscous_friction(p, &state.theta_dot)
        - td
}

/// Solves M(θ)θ̈ = u + JᵀF − C − β − T_d for θ̈.
pub fn forward_dynamics(
    p: &RobotParams,
    state: &JointState,
    u: &Vec4,
    contact: &Vec4,
    td: &Vec4,
) -> Result<Vec4> {
    let rhs = u + lumped_dynamics(p, state, contact, td);
    solve_mass(&mass_matrix(p, &state.theta), &rhs)
}

/// Solves M x = rhs by Cholesky factorization.
pub fn solve_mass(m: &Mat4, rhs: &Vec4) -> Result<Vec4> {
    let chol = Cholesky::new(*m).ok_or(Error::SingularMassMatrix)?;
    Ok(chol.solve(rhs))
}

/// ½ θ̇ᵀ M(θ) θ̇.
pub fn kinetic_energy(p: &RobotParams, state: &JointState) -> f64 {
    0.5 * state.theta_dot.dot(&(mass_matrix(p, &state.theta) * state.theta_dot))
}
