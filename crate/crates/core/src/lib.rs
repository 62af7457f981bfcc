//! Mean-field theory and stochastic dynamics of a driven mechanical resonator
//! with a Kerr (cubic spring) nonlinearity and nonlinear damping, aimed at
//! mass sensing near the bistable regime.
//!
//! The crate works in the rotating frame of the drive, where the slow complex
//! amplitude `C` obeys
//!
//! ```text
//! dC/dt + [gamma + i (omega0 - omega_p) + (i K + gamma3) |C|^2] C
//!       = sqrt(p) exp(i phi_p) + noise
//! ```
//!
//! Modules are layered bottom-up:
//!
//! * [`model`] — parameter containers, unit systems, drive/force conversions
//!   and thermal factors;
//! * [`steady_state`] — the cubic response equation, branch amplitudes,
//!   linearization around a branch and principal noise axes;
//! * [`bifurcation`] — fold/cusp structure of the bistable region in the
//!   (drive frequency, drive strength) plane;
//! * [`response`] — relaxation eigenvalues, ring-down time, propagator and
//!   homodyne noise spectra of the linearized fluctuations;
//! * [`sensitivity`] — responsivity of the homodyne signal to frequency
//!   (hence mass) shifts and the resulting mass-resolution bounds;
//! * [`dynamics`] — deterministic flow, basins of attraction, Langevin
//!   simulation and a full (non-rotating-frame) displacement integrator.
//!
//! All numerics are generic over the scalar type through the [`Real`] trait
//! (`f64` and `f32` both work; `f64` aliases are exported at the crate root).
//! Internally everything is unit-agnostic: any self-consistent unit system is
//! accepted, and [`model::UnitSystem`] handles the SI <-> dimensionless
//! boundary.

pub mod bifurcation;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod numerics;
pub mod response;
pub mod scalar;
pub mod sensitivity;
pub mod steady_state;

mod cubic;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

/// `f64` aliases for the most common types.
pub type ResonatorParams64 = model::ResonatorParams<f64>;
pub type Drive64 = model::Drive<f64>;
pub type UnitSystem64 = model::UnitSystem<f64>;
pub type SteadyBranch64 = steady_state::SteadyBranch<f64>;
pub type SteadyStates64 = steady_state::SteadyStates<f64>;
pub type Linearization64 = steady_state::Linearization<f64>;
pub type CriticalPoint64 = bifurcation::CriticalPoint<f64>;
pub type RegionMap64 = bifurcation::RegionMap<f64>;
pub type SpectrumResult64 = response::SpectrumResult<f64>;
pub type SensitivityReport64 = sensitivity::SensitivityReport<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type BasinMap64 = dynamics::BasinMap<f64>;
