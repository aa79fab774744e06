//! Extremes and correlation kernels of two-dimensional determinantal
//! Coulomb gases, with Kac-polynomial comparisons.

pub mod error;
pub mod experiment;
pub mod kac;
pub mod kernels;
pub mod kostlan;
pub mod limit_laws;
pub mod potentials;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use experiment::{run_experiment, verify_all, ExperimentConfig, ExperimentKind, ExperimentResult, Suite};
pub use kostlan::{GasSampler, GasSpec, ModuliSample, RescaleScheme};
pub use potentials::{ExtReal, RadialPotential, Reference};
