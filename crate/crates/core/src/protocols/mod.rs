//! Interferometer protocols built from one-axis twisting, their evaluation,
//! and the fixed total-time optimizer.

pub mod fixed_time;
pub mod ghz;
pub mod pipeline;
pub mod spec;
pub mod squeezing;

pub use fixed_time::{default_t1_grid, fixed_t_scan, Family, FixedTimeResult, FixedTimeScan, TimeBudget};
pub use ghz::ghz_state;
pub use pipeline::{evaluate_protocol, CompiledProtocol, Evaluation};
pub use spec::{
    build_ghz_protocol, build_protocol, build_protocol_on, ghz_capable_axis, squeezing_steps, BasisChoice,
    ProtocolKind, ProtocolSpec,
};
pub use squeezing::{rotated_jz_variance, squeezing_angle, squeezing_angle_about};
