//! Exact Dicke-basis representation of states, collective operators,
//! rotations, one-axis twisting, and measurement distributions.

pub mod basis;
pub mod dynamics;
pub mod operator;
pub mod state;

pub use basis::{
    axis_spectrum, generator_flips_parity, measurement_distribution, parity_check, BasisSpec,
    ParityCheck, Spectrum,
};
pub use dynamics::{apply_steps, inverse_steps, oat_phase, rotate, steps_unitary, Step};
pub use operator::{make_collective_operator, spin_projection, Axis, CollectiveOperator};
pub use state::{coherent_state, expectation_and_variance, DickeState, Sign};
