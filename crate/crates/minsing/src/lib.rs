//! Exact and numerical tools for the singularity structure of extremal
//! metrics on fibered spaces.
//!
//! The library has two halves that meet in the middle:
//!
//! * **Exact combinatorics.** Divisor classes and intersection data for
//!   blow-ups of projective 3-space ([`ns_geometry`]), the polytope of
//!   admissible exponent vectors cut out by positivity against a cone of
//!   curve classes ([`box_polytope`]), and the piecewise-linear tropical
//!   weight the polytope induces on fiber log radii ([`tropical_weight`]).
//!   Everything here is rational arithmetic ([`rational`]); vertices and
//!   membership tests are exact.
//!
//! * **Numerical analysis on one log axis.** Fiber integrals of monomials
//!   against product weights with their closed forms and quadrature
//!   cross-checks ([`fiber_integral`], [`gamma`], [`quadrature`]), and
//!   radial weights over the base with slope-constrained convex envelopes,
//!   Bergman-kernel approximants, and a certified lower bound for the
//!   global envelope of a fibered weight ([`envelope_1d`]).
//!
//! The [`cli_reports`] module wires both halves to a problem-file format
//! and serializable reports; the `minsing` binary is a thin shell over it.

pub mod box_polytope;
pub mod cli_reports;
pub mod envelope_1d;
pub mod fiber_integral;
pub mod gamma;
pub mod ns_geometry;
pub mod quadrature;
pub mod rational;
pub mod tol;
pub mod tropical_weight;

pub use box_polytope::{build_box, BoxError, BoxPolytope, Halfspace};
pub use envelope_1d::{
    bergman_weight, equilibrium_envelope, mixed_weight, sandwich_report, vhat_toy, GridFn,
    RadialWeight, UniformGrid,
};
pub use fiber_integral::{FiberProblem, QuadratureSpec};
pub use ns_geometry::{DivisorClass, PointBlowup, PsefCone};
pub use tropical_weight::TropicalWeight;
