//! Mean-field tunnelling dynamics of a spin-1 condensate in a double well.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`); the aliases below fix it to `f64`, which is what the
//! command-line front end and the analysis pipelines use.

pub mod analysis;
pub mod elliptic;
pub mod error;
pub mod integrator;
pub mod model;
pub mod reduced;
pub mod scalar;
pub mod wellmodes;

mod linalg;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Spinor = model::Spinor<f64>;
pub type SpinorPair = model::SpinorPair<f64>;
pub type SystemParams = model::SystemParams<f64>;
pub type Observables = model::Observables<f64>;
pub type CouplingConstants = model::CouplingConstants<f64>;
pub type IntegratorConfig = integrator::IntegratorConfig<f64>;
pub type Trajectory = integrator::Trajectory<f64>;
pub type ReducedState = reduced::ReducedState<f64>;
pub type ReducedParams = reduced::ReducedParams<f64>;
pub type ReducedTrajectory = reduced::ReducedTrajectory<f64>;
pub type PeriodEstimate = analysis::PeriodEstimate<f64>;
pub type SampledSeries = analysis::SampledSeries<f64>;
pub type Grid1D = wellmodes::Grid1D<f64>;
pub type DoubleWellPotential = wellmodes::DoubleWellPotential<f64>;
pub type WellModes = wellmodes::WellModes<f64>;

/// Version string recorded in data-file headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
