//! Planar dual-arm robot carrying a rigidly grasped payload, closed-loop
//! tracking with a dynamic surface controller (DSC) and an adaptive variant
//! whose lumped dynamics term is estimated by a normalized Gaussian RBF
//! network.
//!
//! The crate is organised bottom-up:
//!
//! - [`dynamics`]: inertia, Coriolis, Jacobian and forward dynamics of the two arms
//! - [`payload`]: object kinematics and grasp/friction force allocation
//! - [`trajectory`]: approach and transport references, planar 2R kinematics
//! - [`dsc`]: surfaces, filter and control law of the certain-model controller
//! - [`rbfn`]: activations, weight adaptation and attractor radius
//! - [`sim`]: fixed-step closed loop, run logs and metrics
//! - [`config`] and [`cli`]: experiment files and the batch front-end

pub mod cli;
pub mod config;
pub mod dsc;
pub mod dynamics;
pub mod error;
pub mod payload;
pub mod rbfn;
pub mod sim;
pub mod trajectory;

pub use error::{Error, Result};

/// Four-joint column vector (θ₁, θ₂, θ₃, θ₄ ordering).
pub type Vec4 = nalgebra::Vector4<f64>;
/// 4×4 joint-space matrix.
pub type Mat4 = nalgebra::Matrix4<f64>;
