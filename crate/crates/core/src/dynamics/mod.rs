//! Time-domain engine: deterministic rotating-frame flow, basins of
//! attraction with their separatrix, classical Langevin simulation, Monte
//! Carlo spectrum estimation and a full displacement-equation cross-check of
//! the rotating-frame reduction.

pub mod basins;
pub mod displacement;
pub mod flow;
pub mod langevin;
pub mod spectrum_mc;

pub use basins::{basin_map, saddle_directions, separatrix, BasinLabel, BasinMap, Window};
pub use displacement::{
    demodulate, integrate_displacement, sweep_hysteresis, DisplacementTrace, HysteresisPoint,
};
pub use flow::{flow_rhs, integrate_flow, rk4_step, Trajectory};
pub use langevin::{langevin_ensemble, simulate_langevin, LangevinMode};
pub use spectrum_mc::{estimate_spectrum_mc, integrate_mc_spectrum, McSpectrum, WindowSpec};
