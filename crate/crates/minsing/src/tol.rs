//! Centralized numeric tolerances with their justifications.
//!
//! Every fuzzy comparison in the library reads its threshold from here, so
//! the accuracy contract is auditable in one place. Test-only thresholds
//! live with the tests; these are the ones the library itself applies.

/// Scale of grid-discretization noise in envelope computations: hull
/// interpolation and slope clamping on a few-thousand-point grid keep
/// floating-point error near 1e-13, and re-running an envelope on its own
/// output must reproduce it to within a couple of these.
pub const GRID_TOL: f64 = 1e-9;

/// A grid point is marked as touching its envelope when the gap is at most
/// this. Real contact gaps at desk scale are either exactly zero or far
/// above 1e-8, so the threshold sits safely between rounding noise and
/// genuine separation.
pub const CONTACT_TOL: f64 = 1e-10;

/// Allowed deviation of a weight's end slopes from its slope budget
/// `[0, degree]`. Admissible model weights on a window of half-width 40
/// satisfy the budget up to `exp(-40)`; anything past 1e-6 indicates data
/// that genuinely is not a weight of the claimed degree.
pub const ADMISSIBILITY_TOL: f64 = 1e-6;

/// Matching tolerance when locating a requested coordinate on a grid,
/// relative to one grid step.
pub const GRID_SNAP_REL: f64 = 1e-6;
