//! Functionals of outcome distributions: detection noise, Hellinger distance,
//! Fisher information, moment sensitivity and measurement-basis discovery.

pub mod curve;
pub mod distribution;
pub mod fisher;
pub mod noise;
pub mod optimal_basis;
pub mod readout;
pub mod search;

pub use curve::{
    best_readout,
    cfi_curve, default_phase_grid, max_cfi_over_phase, moment_sensitivity, state_phase_derivative, uniform_grid,
    FisherCurve, Objective, DEFAULT_PHASE_POINTS,
};
pub use distribution::OutcomeDistribution;
pub use fisher::{cfi_from_distribution_pair, cfi_with_curvature, hellinger_sq, qfi_pure, CURVATURE_FLOOR, EPS_FLOOR};
pub use noise::{convolve_noise, NoiseKernel};
pub use optimal_basis::{default_candidates, find_optimal_basis};
pub use readout::{generator_spectrum, PhaseDerivatives, PhaseReadout};
