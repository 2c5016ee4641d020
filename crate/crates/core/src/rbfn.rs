//! Normalized Gaussian RBF network estimating the lumped plant term K.
//!
//! Input r = (θ, θ̇) ∈ ℝ⁸, hidden activations
//! hᵢ = exp(−dᵢ²/bᵢ²) / Σⱼ exp(−dⱼ²/bⱼ²) with dᵢ = ‖r − ρᵢ‖, output Ŵᵀh.
//! Only the output weights adapt:
//!
//! ```text
//! dŴ/dt = Γ(h·sᵀ − ς‖s‖Ŵ)
//! ```
//!
//! with Γ a per-output-channel gain.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dsc::{dsc_control, DscGains};
use crate::{Error, Mat4, Result, Vec4};

/// Network input (θ₁..θ₄, θ̇₁..θ̇₄).
pub type Input = SVector<f64, 8>;

/// How the hidden layer is laid out and adapted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfnSettings {
    /// Number of hidden neurons.
    pub neurons: usize,
    /// Seed of the center sampler.
    pub seed: u64,
    /// Centers are sampled uniformly from [−theta_bound, theta_bound]⁴ (rad).
    pub theta_bound: f64,
    /// ... and from [−theta_dot_bound, theta_dot_bound]⁴ (rad/s).
    pub theta_dot_bound: f64,
    /// Adaptation gain Γ per output channel.
    pub gamma: [f64; 4],
    /// Leakage ς.
    pub leakage: f64,
    /// Assumed approximation error bound ε_N, used by the attractor monitor only.
    pub eps_n: f64,
    /// Assumed bound on ‖W‖_F, used by the attractor monitor only.
    pub weight_bound: f64,
}

impl Default for RbfnSettings {
    fn default() -> Self {
        Self {
            neurons: 32,
            seed: 7,
            theta_bound: std::f64::consts::PI,
            theta_dot_bound: 3.0,
            gamma: [30.0; 4],
            leakage: 1e-3,
            eps_n: 1.52,
            weight_bound: 10.0,
        }
    }
}

impl RbfnSettings {
    pub fn validate(&self) -> Result<()> {
        if self.neurons == 0 {
            return Err(Error::invalid("rbfn.neurons", "must be >= 1"));
        }
        for (name, v) in [
            ("rbfn.theta_bound", self.theta_bound),
            ("rbfn.theta_dot_bound", self.theta_dot_bound),
            ("rbfn.leakage", self.leakage),
            ("rbfn.eps_n", self.eps_n),
            ("rbfn.weight_bound", self.weight_bound),
        ] {
            crate::dynamics::positive(name, v)?;
        }
        for (i, g) in self.gamma.iter().enumerate() {
            crate::dynamics::positive(&format!("rbfn.gamma[{}]", i + 1), *g)?;
        }
        Ok(())
    }

    /// Samples the centers and derives a common width equal to half the
    /// mean nearest-neighbour distance between centers.
    pub fn build(&self) -> Result<RbfnConfig> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let centers: Vec<Input> = (0..self.neurons)
            .map(|_| {
                Input::from_fn(|i, _| {
                    let b = if i < 4 { self.theta_bound } else { self.theta_dot_bound };
                    rng.random_range(-b..b)
                })
            })
            .collect();
        let width = if centers.len() == 1 {
            self.theta_bound.max(self.theta_dot_bound)
        } else {
            let nn: f64 = centers
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    centers
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, o)| (c - o).norm())
                        .fold(f64::INFINITY, f64::min)
                })
                .sum();
            0.5 * nn / centers.len() as f64
        };
        RbfnConfig::new(centers, vec![width; self.neurons], self.gamma, self.leakage)
    }

    pub fn monitor(&self, gains: &DscGains) -> AttractorMonitor {
        AttractorMonitor {
            eps_n: self.eps_n,
            c3_min: gains.c3_min(),
            weight_bound: self.weight_bound,
            leakage: self.leakage,
        }
    }
}

/// Hidden layer and adaptation constants of a built network.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfnConfig {
    centers: Vec<Input>,
    widths: Vec<f64>,
    gamma: Vec4,
    leakage: f64,
}

impl RbfnConfig {
    pub fn new(centers: Vec<Input>, widths: Vec<f64>, gamma: [f64; 4], leakage: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::invalid("rbfn.neurons", "must be >= 1"));
        }
        if centers.len() != widths.len() {
            return Err(Error::Dimension(format!(
                "{} centers but {} widths",
                centers.len(),
                widths.len()
            )));
        }
        if let Some(b) = widths.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(Error::invalid("rbfn.widths", format!("must be > 0 (got {b})")));
        }
        Ok(Self {
            centers,
            widths,
            gamma: Vec4::from(gamma),
            leakage,
        })
    }

    pub fn neurons(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[Input] {
        &self.centers
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn gamma(&self) -> &Vec4 {
        &self.gamma
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }
}

pub fn network_input(theta: &Vec4, theta_dot: &Vec4) -> Input {
    Input::from_iterator(theta.iter().chain(theta_dot.iter()).copied())
}

/// Normalized Gaussian activations. The largest exponent is subtracted
/// before exponentiation, so the result sums to one even far from every
/// center.
pub fn activations(cfg: &RbfnConfig, r: &Input) -> DVector<f64> {
    let exponents: Vec<f64> = cfg
        .centers
        .iter()
        .zip(&cfg.widths)
        .map(|(c, b)| -(r - c).norm_squared() / (b * b))
        .collect();
    let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        // Every squared distance overflowed: no center is measurably closer.
        return DVector::from_element(exponents.len(), 1.0 / exponents.len() as f64);
    }
    let mut h = DVector::from_iterator(exponents.len(), exponents.iter().map(|e| (e - top).exp()));
    let total = h.sum();
    h /= total;
    h
}

/// Estimated output weights Ŵ (n × 4).
#[derive(Debug, Clone, PartialEq)]
pub struct RbfnWeights {
    pub w_hat: DMatrix<f64>,
}

impl RbfnWeights {
    pub fn zeros(neurons: usize) -> Self {
        Self {
            w_hat: DMatrix::zeros(neurons, 4),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.w_hat.norm()
    }

    /// Writes Ŵ as CSV: one row per neuron, header `center,w1,w2,w3,w4`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["center", "w1", "w2", "w3", "w4"])?;
        for (i, row) in self.w_hat.row_iter().enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// δ̂ = Ŵᵀh.
pub fn rbfn_output(weights: &RbfnWeights, h: &DVector<f64>) -> Vec4 {
    let out = weights.w_hat.tr_mul(h);
    Vec4::new(out[0], out[1], out[2], out[3])
}

/// Explicit Euler step of the adaptation law.
pub fn weight_update(weights: &RbfnWeights, cfg: &RbfnConfig, h: &DVector<f64>, s: &Vec4, dt: f64) -> RbfnWeights {
    let leak = cfg.leakage * s.norm();
    let mut w = weights.w_hat.clone();
    for j in 0..4 {
        let g = dt * cfg.gamma[j];
        let mut col = w.column_mut(j);
        for (i, hi) in h.iter().enumerate() {
            col[i] += g * (hi * s[j] - leak * col[i]);
        }
    }
    RbfnWeights { w_hat: w }
}

/// Adaptive control torque: the certain-model law with K replaced by Ŵᵀh.
pub fn rbfn_dsc_control(
    gains: &DscGains,
    weights: &RbfnWeights,
    m: &Mat4,
    h: &DVector<f64>,
    s: &Vec4,
    z1_dot: &Vec4,
    alpha_2f_dot: &Vec4,
) -> Vec4 {
    dsc_control(gains, m, &rbfn_output(weights, h), z1_dot, s, alpha_2f_dot)
}

/// Radius of the residual ball around s = 0 outside which the adaptive
/// closed loop is guaranteed to decrease its Lyapunov function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractorMonitor {
    pub eps_n: f64,
    pub c3_min: f64,
    pub weight_bound: f64,
    pub leakage: f64,
}

impl AttractorMonitor {
    pub fn radius(&self) -> f64 {
        attractor_radius(self)
    }
}

/// (ε_N + ς‖W‖_F²/4) / c₃min.
pub fn attractor_radius(mon: &AttractorMonitor) -> f64 {
    (mon.eps_n + mon.leakage * mon.weight_bound * mon.weight_bound / 4.0) / mon.c3_min
}
