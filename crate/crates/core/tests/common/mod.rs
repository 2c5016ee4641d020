//! Independent Euler-Lagrange model of two planar 2R arms.
//!
//! The kinetic energy is written from link velocities alone, and its
//! first and second partial derivatives are taken exactly with hyper-dual
//! numbers. Nothing here uses the crate's inertia constants or Coriolis terms.

#![allow(dead_code)]

use std::ops::{Add, Mul, Sub};

use dualarm::dynamics::{jacobian, JointState, RobotParams};
use dualarm::{Mat4, Vec4};
use nalgebra::{SMatrix, SVector};

/// a + b·ε₁ + c·ε₂ + d·ε₁ε₂ with ε₁² = ε₂² = 0.
#[derive(Debug, Clone, Copy)]
pub struct HyperDual {
    pub re: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

impl HyperDual {
    pub fn constant(re: f64) -> Self {
        Self {
            re,
            e1: 0.0,
            e2: 0.0,
            e12: 0.0,
        }
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.re.sin_cos();
        Self {
            re: s,
            e1: c * self.e1,
            e2: c * self.e2,
            e12: c * self.e12 - s * self.e1 * self.e2,
        }
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.re.sin_cos();
        Self {
            re: c,
            e1: -s * self.e1,
            e2: -s * self.e2,
            e12: -s * self.e12 - c * self.e1 * self.e2,
        }
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            e1: self.e1 + o.e1,
            e2: self.e2 + o.e2,
            e12: self.e12 + o.e12,
        }
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            re: self.re - o.re,
            e1: self.e1 - o.e1,
            e2: self.e2 - o.e2,
            e12: self.e12 - o.e12,
        }
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re,
            e1: self.re * o.e1 + self.e1 * o.re,
            e2: self.re * o.e2 + self.e2 * o.re,
            e12: self.re * o.e12 + self.e1 * o.e2 + self.e2 * o.e1 + self.e12 * o.re,
        }
    }
}

impl Mul<HyperDual> for f64 {
    type Output = HyperDual;
    fn mul(self, o: HyperDual) -> HyperDual {
        HyperDual::constant(self) * o
    }
}

/// Kinetic energy of both arms. `q` holds (θ₁..θ₄, θ̇₁..θ̇₄).
fn kinetic(p: &RobotParams, q: &[HyperDual; 8]) -> HyperDual {
    let half = HyperDual::constant(0.5);
    let mut total = HyperDual::constant(0.0);
    for arm in 0..2 {
        let i = 2 * arm;
        let (a, b) = (q[i], q[i + 1]);
        let (wa, wb) = (q[4 + i], q[4 + i + 1]);
        let ab = a + b;
        let wab = wa + wb;
        let (m1, m2) = (p.masses[i], p.masses[i + 1]);
        let (i1, i2) = (p.inertias[i], p.inertias[i + 1]);
        let l1 = p.lengths[i];
        let (k1, k2) = (p.com_distances[i], p.com_distances[i + 1]);

        // Link centre velocities.
        let v1x = HyperDual::constant(-k1) * a.sin() * wa;
        let v1y = k1 * (a.cos() * wa);
        let v2x = HyperDual::constant(-l1) * a.sin() * wa - k2 * (ab.sin() * wab);
        let v2y = l1 * (a.cos() * wa) + k2 * (ab.cos() * wab);

        total = total
            + half * (m1 * (v1x * v1x + v1y * v1y) + i1 * (wa * wa))
            + half * (m2 * (v2x * v2x + v2y * v2y) + i2 * (wab * wab));
    }
    total
}

fn seeded(x: &[f64; 8], a: usize, b: Option<usize>) -> [HyperDual; 8] {
    let mut q = x.map(HyperDual::constant);
    q[a].e1 = 1.0;
    if let Some(b) = b {
        q[b].e2 = 1.0;
    }
    q
}

/// ∂²T/∂xₐ∂x_b.
fn second(p: &RobotParams, x: &[f64; 8], a: usize, b: usize) -> f64 {
    kinetic(p, &seeded(x, a, Some(b))).e12
}

/// ∂T/∂xₐ.
fn first(p: &RobotParams, x: &[f64; 8], a: usize) -> f64 {
    kinetic(p, &seeded(x, a, None)).e1
}

pub struct Lagrangian {
    /// ∂²T/∂θ̇∂θ̇
    pub mass: Mat4,
    /// Velocity-dependent generalized force: (∂²T/∂θ̇∂θ)·θ̇ − ∂T/∂θ.
    pub bias: Vec4,
    pub energy: f64,
}

pub fn lagrangian(p: &RobotParams, state: &JointState) -> Lagrangian {
    let mut x = [0.0; 8];
    x[..4].copy_from_slice(state.theta.as_slice());
    x[4..].copy_from_slice(state.theta_dot.as_slice());
    let mass = Mat4::from_fn(|i, j| second(p, &x, 4 + i, 4 + j));
    let mixed = Mat4::from_fn(|i, j| second(p, &x, 4 + i, j));
    let grad = Vec4::from_fn(|i, _| first(p, &x, i));
    Lagrangian {
        mass,
        bias: mixed * state.theta_dot - grad,
        energy: kinetic(p, &x.map(HyperDual::constant)).re,
    }
}

/// θ̈ from the Euler-Lagrange equations with generalized force
/// u + JᵀF − β⊙θ̇ − T_d. The contact map Jᵀ is the crate's convention.
pub fn oracle_acceleration(p: &RobotParams, state: &JointState, u: &Vec4, contact: &Vec4, td: &Vec4) -> Vec4 {
    let l = lagrangian(p, state);
    let friction = Vec4::from(p.viscous).component_mul(&state.theta_dot);
    let q = u + jacobian(p, &state.theta).transpose() * contact - friction - td;
    let rhs: SVector<f64, 4> = q - l.bias;
    let m: SMatrix<f64, 4, 4> = l.mass;
    m.lu().solve(&rhs).expect("oracle mass matrix is singular")
}
