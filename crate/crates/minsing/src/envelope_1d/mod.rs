//! Radial weights, slope-constrained envelopes, kernel approximants, and
//! the toy global envelope, all on one log axis (plus fiber axes for the
//! global bound).

pub mod bergman;
pub mod envelope;
pub mod vhat;
pub mod weight;

pub use bergman::{bergman_weight, sandwich_report, BergmanError, BergmanResult, SandwichReport, SandwichRow};
pub use envelope::{
    equilibrium_envelope, glue_max, mixed_weight, monotonicity_check, EnvelopeError,
    EnvelopeResult, GlueResult, MonotonicityReport,
};
pub use vhat::{vhat_toy, VhatError, VhatResult};
pub use weight::{
    psh_convexity_check, ConvexityReport, GridFn, RadialWeight, UniformGrid, WeightError,
};
