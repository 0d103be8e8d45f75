//! Slope-constrained convex envelopes of radial weights.
//!
//! For a weight `phi` of degree `k`, its equilibrium envelope is the largest
//! function below `phi` that is convex with slopes in `[0, k]`; the defect
//! `v = envelope - phi <= 0` measures how far `phi` is from being its own
//! envelope, and the contact set `{v = 0}` is where the extremal metric
//! keeps the original weight.
//!
//! On a grid this is the lower convex hull of the sample points, flattened
//! to slope 0 on the left of its minimum-slope admissible vertex and
//! extended at slope `k` on the right: grid-exact, no iteration, no
//! tolerance tuning.

use crate::envelope_1d::weight::{RadialWeight, WeightError};
use crate::rational::to_f64;
use crate::tol::{ADMISSIBILITY_TOL, CONTACT_TOL, GRID_SNAP_REL};
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use thiserror::Error;

/// Errors from envelope and weight-combination operations.
#[derive(Debug, Error)]
pub enum EnvelopeError {
    /// The weight's end slopes leave the budget `[0, degree]`.
    #[error("weight '{label}' is not admissible: end slopes ({lo}, {hi}) for degree {degree}")]
    Inadmissible {
        label: String,
        lo: f64,
        hi: f64,
        degree: f64,
    },
    /// Weights that must share a grid do not.
    #[error("weights live on different grids")]
    GridMismatch,
    /// Wrong number of mixing coefficients.
    #[error("expected {expected} mixing coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    /// Mixing coefficients outside the simplex.
    #[error("mixing coefficients must be nonnegative with sum <= 1 (strict when required)")]
    BadCoefficients,
    /// Coefficient vectors that are not ordered for a comparison.
    #[error("comparison requires alpha <= beta componentwise")]
    NotOrdered,
    /// A gluing window that does not sit on the outer grid.
    #[error("gluing window {0} is not aligned with the outer grid")]
    WindowOffGrid(f64),
    /// A gluing window too narrow to hold a collar plus interior.
    #[error("gluing window must span at least 5 grid points")]
    WindowTooNarrow,
    /// Weights that must be nonpositive near the gluing boundary are not.
    #[error("{0} weight is positive on the gluing collar")]
    PositiveOnCollar(&'static str),
    /// Underlying weight construction failed.
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// An envelope computation: the envelope itself, the defect, and the
/// contact mask.
#[derive(Debug, Clone)]
pub struct EnvelopeResult {
    /// Envelope values on the grid.
    pub envelope: Vec<f64>,
    /// `envelope - weight`, nonpositive up to rounding.
    pub v: Vec<f64>,
    /// Where the envelope touches the weight (defect within
    /// [`CONTACT_TOL`](crate::tol::CONTACT_TOL)).
    pub contact: Vec<bool>,
}

/// Compute the slope-constrained convex envelope of an admissible weight.
///
/// # Errors
///
/// Fails when the weight's end slopes leave `[0, degree]` by more than
/// [`ADMISSIBILITY_TOL`](crate::tol::ADMISSIBILITY_TOL).
pub fn equilibrium_envelope(w: &RadialWeight) -> Result<EnvelopeResult, EnvelopeError> {
    if !w.is_admissible(ADMISSIBILITY_TOL) {
        let (lo, hi) = w.end_slopes();
        return Err(EnvelopeError::Inadmissible {
            label: w.label().to_string(),
            lo,
            hi,
            degree: w.degree_f64(),
        });
    }
    let grid = w.grid();
    let phi = w.values();
    let k = w.degree_f64();
    let n = phi.len();

    // Lower convex hull by monotone chain; hull entries are grid indices.
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (grid.point(b) - grid.point(a)) * (phi[i] - phi[a])
                - (grid.point(i) - grid.point(a)) * (phi[b] - phi[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }

    // Hull slopes are nondecreasing. Flatten left of the first vertex whose
    // outgoing slope reaches 0, extend at slope k right of the last vertex
    // whose incoming slope stays within k.
    let seg_slope = |s: usize| -> f64 {
        let (a, b) = (hull[s], hull[s + 1]);
        (phi[b] - phi[a]) / (grid.point(b) - grid.point(a))
    };
    let segs = hull.len() - 1;
    let mut lo_vertex = hull.len() - 1;
    for s in 0..segs {
        if seg_slope(s) >= 0.0 {
            lo_vertex = s;
            break;
        }
    }
    let mut hi_vertex = 0;
    for s in (0..segs).rev() {
        if seg_slope(s) <= k {
            hi_vertex = s + 1;
            break;
        }
    }
    let hi_vertex = hi_vertex.max(lo_vertex);

    let t_lo = grid.point(hull[lo_vertex]);
    let t_hi = grid.point(hull[hi_vertex]);
    let p_lo = phi[hull[lo_vertex]];
    let p_hi = phi[hull[hi_vertex]];

    let mut envelope = vec![0.0f64; n];
    let mut seg = lo_vertex;
    for (i, slot) in envelope.iter_mut().enumerate() {
        let t = grid.point(i);
        *slot = if t <= t_lo {
            p_lo
        } else if t >= t_hi {
            p_hi + k * (t - t_hi)
        } else {
            while seg + 1 < hull.len() && grid.point(hull[seg + 1]) < t {
                seg += 1;
            }
            let (a, b) = (hull[seg], hull[seg + 1]);
            let (ta, tb) = (grid.point(a), grid.point(b));
            phi[a] + (phi[b] - phi[a]) * ((t - ta) / (tb - ta))
        };
    }

    let v: Vec<f64> = envelope.iter().zip(phi).map(|(e, p)| e - p).collect();
    let contact = v.iter().map(|&d| d >= -CONTACT_TOL).collect();
    Ok(EnvelopeResult {
        envelope,
        v,
        contact,
    })
}

/// Combine `r + 1` weights on a shared grid with simplex coefficients: the
/// first `r` weights get `alpha_1..alpha_r`, the last gets `1 - |alpha|`.
/// Degrees combine the same way, exactly.
///
/// # Errors
///
/// Fails on fewer than two weights, mismatched grids, a wrong coefficient
/// count, or coefficients outside the simplex.
pub fn mixed_weight(
    weights: &[RadialWeight],
    alpha: &[BigRational],
) -> Result<RadialWeight, EnvelopeError> {
    if weights.len() < 2 {
        return Err(EnvelopeError::CoefficientCount {
            expected: 2,
            got: weights.len(),
        });
    }
    if alpha.len() != weights.len() - 1 {
        return Err(EnvelopeError::CoefficientCount {
            expected: weights.len() - 1,
            got: alpha.len(),
        });
    }
    let grid = *weights[0].grid();
    if weights.iter().any(|w| *w.grid() != grid) {
        return Err(EnvelopeError::GridMismatch);
    }
    if alpha.iter().any(|a| a.is_negative()) {
        return Err(EnvelopeError::BadCoefficients);
    }
    let total: BigRational = alpha.iter().fold(BigRational::zero(), |acc, a| acc + a);
    if total > BigRational::one() {
        return Err(EnvelopeError::BadCoefficients);
    }

    let mut coeffs: Vec<BigRational> = alpha.to_vec();
    coeffs.push(BigRational::one() - &total);
    let coeffs_f64: Vec<f64> = coeffs.iter().map(to_f64).collect();

    let mut values = vec![0.0f64; grid.len()];
    for (w, &c) in weights.iter().zip(&coeffs_f64) {
        if c == 0.0 {
            continue;
        }
        for (acc, &x) in values.iter_mut().zip(w.values()) {
            *acc += c * x;
        }
    }
    let degree = weights
        .iter()
        .zip(&coeffs)
        .fold(BigRational::zero(), |acc, (w, c)| acc + c * w.degree());
    let label = format!(
        "mix({})",
        weights
            .iter()
            .zip(&coeffs)
            .map(|(w, c)| format!("{}*{}", c, w.label()))
            .collect::<Vec<_>>()
            .join("+")
    );
    Ok(RadialWeight::from_values(grid, values, degree, label)?)
}

/// Comparison of scaled envelope defects for nested coefficient vectors.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicityReport {
    /// Largest value of `v_alpha/(1-|alpha|) - v_beta/(1-|beta|)` over the
    /// grid; at most rounding noise when the scaled-defect monotonicity
    /// holds.
    pub max_violation: f64,
    /// Largest absolute difference of the two scaled defects, for studying
    /// the limit as `beta` approaches `alpha`.
    pub sup_abs_diff: f64,
}

/// Check that the scaled envelope defect grows with the coefficient vector:
/// for `alpha <= beta` componentwise (`|beta| < 1`), the defect of the
/// `beta`-mix divided by `1 - |beta|` should dominate that of the
/// `alpha`-mix divided by `1 - |alpha|`. Holds at grid level whenever the
/// first `r` weights are convex, because the `alpha`-envelope rescales into
/// a competitor for the `beta`-envelope.
///
/// # Errors
///
/// Fails when the vectors are not ordered, `|beta| >= 1`, or the mixes are
/// invalid or inadmissible.
pub fn monotonicity_check(
    weights: &[RadialWeight],
    alpha: &[BigRational],
    beta: &[BigRational],
) -> Result<MonotonicityReport, EnvelopeError> {
    if alpha.len() != beta.len() {
        return Err(EnvelopeError::CoefficientCount {
            expected: alpha.len(),
            got: beta.len(),
        });
    }
    if alpha.iter().zip(beta).any(|(a, b)| a > b) {
        return Err(EnvelopeError::NotOrdered);
    }
    let total_beta: BigRational = beta.iter().fold(BigRational::zero(), |acc, b| acc + b);
    if total_beta >= BigRational::one() {
        return Err(EnvelopeError::BadCoefficients);
    }
    let total_alpha: BigRational = alpha.iter().fold(BigRational::zero(), |acc, a| acc + a);

    let va = equilibrium_envelope(&mixed_weight(weights, alpha)?)?.v;
    let vb = equilibrium_envelope(&mixed_weight(weights, beta)?)?.v;
    let sa = (BigRational::one() - total_alpha).recip();
    let sb = (BigRational::one() - total_beta).recip();
    let (sa, sb) = (to_f64(&sa), to_f64(&sb));

    let mut max_violation = f64::NEG_INFINITY;
    let mut sup_abs = 0.0f64;
    for (&a, &b) in va.iter().zip(&vb) {
        let diff = a * sa - b * sb;
        max_violation = max_violation.max(diff);
        sup_abs = sup_abs.max(diff.abs());
    }
    Ok(MonotonicityReport {
        max_violation,
        sup_abs_diff: sup_abs,
    })
}

/// A glued weight and the lowering constant that made the gluing match.
#[derive(Debug, Clone)]
pub struct GlueResult {
    /// The glued weight, on the outer grid.
    pub weight: RadialWeight,
    /// How far the inner weight was lowered: the largest value of `-outer`
    /// over the two-point collars at the window ends.
    pub c1: f64,
}

/// Graft a locally defined weight into a global one by a lowered max:
/// `max(inner - c1, outer)` inside the window, `outer` outside, with `c1`
/// chosen from the outer weight's values on the one-cell collars at the
/// window ends so that the max provably selects `outer` there. The result
/// therefore extends continuously and keeps the outer weight's degree and
/// growth.
///
/// Requirements: the window endpoints lie on the outer grid, the inner
/// weight's grid is exactly the window's subgrid, the window spans at least
/// five points, and both weights are nonpositive on the collars.
///
/// # Errors
///
/// Fails when any of the above is violated.
pub fn glue_max(
    inner: &RadialWeight,
    outer: &RadialWeight,
    window: (f64, f64),
) -> Result<GlueResult, EnvelopeError> {
    let og = outer.grid();
    let i_lo = og
        .find_index(window.0)
        .ok_or(EnvelopeError::WindowOffGrid(window.0))?;
    let i_hi = og
        .find_index(window.1)
        .ok_or(EnvelopeError::WindowOffGrid(window.1))?;
    if i_hi < i_lo + 4 {
        return Err(EnvelopeError::WindowTooNarrow);
    }
    let ig = inner.grid();
    let step = og.step();
    let aligned = (ig.min() - og.point(i_lo)).abs() <= GRID_SNAP_REL * step
        && (ig.max() - og.point(i_hi)).abs() <= GRID_SNAP_REL * step
        && ig.len() == i_hi - i_lo + 1;
    if !aligned {
        return Err(EnvelopeError::GridMismatch);
    }

    let n_in = ig.len();
    let collar_inner = [0usize, 1, n_in - 2, n_in - 1];
    let collar_outer = [i_lo, i_lo + 1, i_hi - 1, i_hi];
    if collar_inner.iter().any(|&j| inner.values()[j] > 0.0) {
        return Err(EnvelopeError::PositiveOnCollar("inner"));
    }
    if collar_outer.iter().any(|&i| outer.values()[i] > 0.0) {
        return Err(EnvelopeError::PositiveOnCollar("outer"));
    }

    let c1 = collar_outer
        .iter()
        .map(|&i| -outer.values()[i])
        .fold(0.0f64, f64::max);

    let mut values = outer.values().to_vec();
    for j in 0..n_in {
        let i = i_lo + j;
        values[i] = (inner.values()[j] - c1).max(values[i]);
    }
    for (&j, &i) in collar_inner.iter().zip(&collar_outer) {
        debug_assert!(inner.values()[j] - c1 <= outer.values()[i]);
        debug_assert_eq!(values[i], outer.values()[i]);
    }
    let label = format!("glue({},{})", inner.label(), outer.label());
    let weight =
        RadialWeight::from_values(*og, values, outer.degree().clone(), label)?;
    Ok(GlueResult { weight, c1 })
}
