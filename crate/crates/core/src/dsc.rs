//! Dynamic surface controller for the certain (fully known) plant.
//!
//! Tracking error z₁ = x₁ − x₁r feeds the virtual control α = ẋ₁r − c₁z₁,
//! which is passed through the first-order filter τα̇₂f + α₂f = α. With
//! z₂ = x₂ − α₂f the sliding surface is s = λz₁ + z₂ and the torque is
//!
//! ```text
//! u = −M(c₂·sgn(s) + c₃·s) − M(λż₁ + M⁻¹K − α̇₂f)
//! ```
//!
//! where K is the lumped plant term of `M θ̈ = u + K`.

use serde::{Deserialize, Serialize};

use crate::{Error, Mat4, Result, Vec4};

/// Largest admissible dt/τ for the explicit filter update.
pub const MAX_FILTER_RATIO: f64 = 0.5;

/// Controller gains. Matrix gains are diagonal and stored by their diagonals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DscGains {
    pub lambda: [f64; 4],
    pub c1: [f64; 4],
    pub c2: [f64; 4],
    pub c3: [f64; 4],
    /// Filter time constant τ (s).
    pub tau: f64,
    /// Width of the saturation replacing sgn(s); 0 selects the hard sign.
    pub boundary_layer: f64,
}

impl Default for DscGains {
    fn default() -> Self {
        Self {
            lambda: [15.0; 4],
            c1: [122.0; 4],
            c2: [122.0; 4],
            c3: [152.0; 4],
            tau: 0.002,
            boundary_layer: 0.1,
        }
    }
}

impl DscGains {
    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("lambda", &self.lambda), ("c1", &self.c1), ("c2", &self.c2), ("c3", &self.c3)] {
            for (i, v) in d.iter().enumerate() {
                if !(*v > 0.0 && v.is_finite()) {
                    return Err(Error::invalid(
                        format!("gains.{name}[{}]", i + 1),
                        format!("diagonal entries must be > 0 (got {v})"),
                    ));
                }
            }
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid(
                "gains.tau",
                format!("filter constant must satisfy tau > 0 (got {})", self.tau),
            ));
        }
        if !(self.boundary_layer >= 0.0 && self.boundary_layer.is_finite()) {
            return Err(Error::invalid(
                "gains.boundary_layer",
                format!("must be finite and >= 0 (got {})", self.boundary_layer),
            ));
        }
        Ok(())
    }

    pub fn lambda(&self) -> Vec4 {
        Vec4::from(self.lambda)
    }

    pub fn c1(&self) -> Vec4 {
        Vec4::from(self.c1)
    }

    pub fn c2(&self) -> Vec4 {
        Vec4::from(self.c2)
    }

    pub fn c3(&self) -> Vec4 {
        Vec4::from(self.c3)
    }

    pub fn c3_min(&self) -> f64 {
        self.c3.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Per-step contraction of s inside the boundary layer under a
    /// zero-order hold of `dt`: |1 − dt(c₂/φ + c₃)|, worst channel.
    /// Values ≥ 1 mean the discretized smoothed law oscillates instead of
    /// settling. Returns `None` for the hard sign.
    pub fn layer_contraction(&self, dt: f64) -> Option<f64> {
        if self.boundary_layer == 0.0 {
            return None;
        }
        (0..4)
            .map(|i| (1.0 - dt * (self.c2[i] / self.boundary_layer + self.c3[i])).abs())
            .reduce(f64::max)
    }
}

/// Filter state α₂f.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DscState {
    pub alpha_2f: Vec4,
}

impl DscState {
    /// Starts the filter at the initial virtual control, α₂f(0) = α(0).
    pub fn new(alpha0: Vec4) -> Self {
        Self { alpha_2f: alpha0 }
    }

    /// α̇₂f = (α − α₂f)/τ, exact for the filter law.
    pub fn rate(&self, gains: &DscGains, alpha: &Vec4) -> Vec4 {
        (alpha - self.alpha_2f) / gains.tau
    }
}

/// α = ẋ₁r − c₁z₁.
pub fn virtual_control(gains: &DscGains, z1: &Vec4, x1r_dot: &Vec4) -> Vec4 {
    x1r_dot - gains.c1().component_mul(z1)
}

/// One explicit Euler step of τα̇₂f + α₂f = α.
pub fn filter_step(state: &DscState, gains: &DscGains, alpha: &Vec4, dt: f64) -> Result<DscState> {
    let ratio = dt / gains.tau;
    if !(ratio > 0.0 && ratio <= MAX_FILTER_RATIO) {
        return Err(Error::FilterStability { ratio });
    }
    Ok(DscState {
        alpha_2f: state.alpha_2f + (alpha - state.alpha_2f) * ratio,
    })
}

/// s = λz₁ + z₂.
pub fn sliding_surface(gains: &DscGains, z1: &Vec4, z2: &Vec4) -> Vec4 {
    gains.lambda().component_mul(z1) + z2
}

/// Elementwise sign with sgn(0) = 0, or the saturation s/φ clipped to
/// [−1, 1] when a boundary layer φ > 0 is configured.
pub fn switching_function(gains: &DscGains, s: &Vec4) -> Vec4 {
    let phi = gains.boundary_layer;
    if phi > 0.0 {
        s.map(|v| (v / phi).clamp(-1.0, 1.0))
    } else {
        s.map(|v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 })
    }
}

/// c₂·sgn(s) + c₃·s.
pub fn switching_term(gains: &DscGains, s: &Vec4) -> Vec4 {
    gains.c2().component_mul(&switching_function(gains, s)) + gains.c3().component_mul(s)
}

/// Certain-model control torque. `k` is the lumped term K the controller
/// cancels, `z1_dot` = x₂ − ẋ₁r and `alpha_2f_dot` the filter rate.
pub fn dsc_control(gains: &DscGains, m: &Mat4, k: &Vec4, z1_dot: &Vec4, s: &Vec4, alpha_2f_dot: &Vec4) -> Vec4 {
    // M·M⁻¹K collapses to K.
    -m * (switching_term(gains, s) + gains.lambda().component_mul(z1_dot) - alpha_2f_dot) - k
}

/// Surface quantities and the Lyapunov candidates V₁ = ½z₁ᵀz₁ and
/// V₂ = V₁ + ½sᵀs (without any weight-error term).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceDiagnostics {
    pub z1: Vec4,
    pub z2: Vec4,
    pub s: Vec4,
    pub v1: f64,
    pub v2_core: f64,
}

impl SurfaceDiagnostics {
    pub fn new(gains: &DscGains, z1: Vec4, z2: Vec4) -> Self {
        let s = sliding_surface(gains, &z1, &z2);
        let v1 = 0.5 * z1.norm_squared();
        Self {
            z1,
            z2,
            s,
            v1,
            v2_core: v1 + 0.5 * s.norm_squared(),
        }
    }
}
