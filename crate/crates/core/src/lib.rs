//! First-passage-time statistics of a freely spreading Gaussian wave packet
//! under Bohmian guidance.
//!
//! Everything downstream of [`units`] works in dimensionless variables:
//! lengths in units of the initial packet width `a`, times in units of
//! `m a^2 / hbar`. In these units the model has a single parameter, the
//! detector radius `d`.
//!
//! The crate is organised as
//! - [`units`]: conversion between physical and dimensionless quantities,
//! - [`special`]: self-contained `erfc` and scaled confluent hypergeometric,
//! - [`analytic`]: closed-form wave function, velocity field, trajectories,
//!   passage times and their distributions,
//! - [`trajectory`]: generic guidance-law integration with crossing detection,
//! - [`ensemble`]: reproducible Born-rule Monte-Carlo over initial positions,
//! - [`spectral`]: Fourier propagation of the packet on a cubic grid,
//! - [`stats`]: empirical-vs-analytic comparison (KS, tail index, means).

pub mod analytic;
pub mod ensemble;
mod error;
mod integrate;
pub mod special;
pub mod spectral;
pub mod stats;
pub mod trajectory;
pub mod units;

pub use analytic::PassageOutcome;
pub use ensemble::{EnsembleConfig, EnsembleMode, EnsembleResult};
pub use error::{Error, Result};
pub use spectral::ComplexGrid3;
pub use stats::EmpiricalNuDistribution;
pub use trajectory::{IntegratorConfig, IntegratorMethod, TrajectoryRecord};
pub use units::{DimensionlessConfig, PhysicalConfig};

/// 3-vector used for positions and velocities throughout the crate.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Complex wave-function value (`re` + i `im`).
pub type WaveFunctionValue = num_complex::Complex64;
