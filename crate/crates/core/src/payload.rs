//! Planar object kinematics and grasp force allocation.
//!
//! The payload hangs between the two end-effectors, held up against gravity
//! by friction only. Along x the arms squeeze it with normal forces F₁ (right
//! contact) and F₂ (left contact); the smaller of the two is the minimum
//! normal force that keeps the contact inside its friction cone, the other
//! one adds the inertial force of the object.

use crate::dynamics::RobotParams;
use crate::Vec4;

/// Relative slack used when testing the friction cone. The allocation puts
/// the lighter contact exactly on the cone boundary, so the comparison must
/// tolerate rounding in μF.
pub const CONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectKinematics {
    pub x_m: f64,
    pub y_m: f64,
    pub xdd_m: f64,
    pub ydd_m: f64,
}

/// Object COM position and acceleration evaluated through the right-arm chain.
pub fn object_kinematics(p: &RobotParams, theta: &Vec4, theta_dot: &Vec4, theta_ddot: &Vec4) -> ObjectKinematics {
    let [l1, l2, _, _] = p.lengths;
    let (t1, t12) = (theta[0], theta[0] + theta[1]);
    let (w1, w12) = (theta_dot[0], theta_dot[0] + theta_dot[1]);
    let (a1, a12) = (theta_ddot[0], theta_ddot[0] + theta_ddot[1]);
    let (s1, c1) = t1.sin_cos();
    let (s12, c12) = t12.sin_cos();
    ObjectKinematics {
        x_m: 0.5 * p.base_separation + l1 * c1 + l2 * c12 - 0.5 * p.object_length,
        y_m: l1 * s1 + l2 * s12,
        xdd_m: -l1 * (a1 * s1 + w1 * w1 * c1) - l2 * (a12 * s12 + w12 * w12 * c12),
        ydd_m: l1 * (a1 * c1 - w1 * w1 * s1) + l2 * (a12 * c12 - w12 * w12 * s12),
    }
}

/// Object COM position seen through the left-arm chain.
pub fn object_position_left(p: &RobotParams, theta: &Vec4) -> (f64, f64) {
    let [_, _, l3, l4] = p.lengths;
    let (t3, t34) = (theta[2], theta[2] + theta[3]);
    (
        -0.5 * p.base_separation + l3 * t3.cos() + l4 * t34.cos() + 0.5 * p.object_length,
        l3 * t3.sin() + l4 * t34.sin(),
    )
}

/// Distance between the object COM positions implied by the two arm chains.
/// Zero for any configuration compatible with a rigid grasp.
pub fn grasp_mismatch(p: &RobotParams, theta: &Vec4) -> f64 {
    let right = object_kinematics(p, theta, &Vec4::zeros(), &Vec4::zeros());
    let (xl, yl) = object_position_left(p, theta);
    (right.x_m - xl).hypot(right.y_m - yl)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspForces {
    pub f1: f64,
    pub f2: f64,
    pub fs1y: f64,
    pub fs2y: f64,
    pub fs1z: f64,
    pub fs2z: f64,
    /// Both contacts inside (or on) their friction cones.
    pub cone_ok: bool,
}

impl GraspForces {
    /// No contact: all forces zero. The cone condition is vacuous.
    pub fn released() -> Self {
        Self {
            f1: 0.0,
            f2: 0.0,
            fs1y: 0.0,
            fs2y: 0.0,
            fs1z: 0.0,
            fs2z: 0.0,
            cone_ok: true,
        }
    }

    /// Contact force vector in the order (F₁, F_s1y, F₂, F_s2y).
    pub fn contact_vector(&self) -> Vec4 {
        Vec4::new(self.f1, self.fs1y, self.f2, self.fs2y)
    }
}

/// Allocates normal and friction forces for a commanded object acceleration.
pub fn grasp_forces(p: &RobotParams, xdd_m: f64, ydd_m: f64) -> GraspForces {
    let m = p.payload_mass;
    let mu = p.friction_coefficient;
    let fy = 0.5 * m * ydd_m;
    let fz = 0.5 * m * p.gravity;
    let base = fy.hypot(fz) / mu;
    let (f1, f2) = if xdd_m >= 0.0 {
        (base, base + m * xdd_m)
    } else {
        (base - m * xdd_m, base)
    };
    GraspForces {
        f1,
        f2,
        fs1y: fy,
        fs2y: fy,
        fs1z: fz,
        fs2z: fz,
        cone_ok: inside_cone(fy, fz, mu * f1) && inside_cone(fy, fz, mu * f2),
    }
}

fn inside_cone(fy: f64, fz: f64, limit: f64) -> bool {
    fy * fy + fz * fz <= limit * limit * (1.0 + CONE_SLACK)
}
