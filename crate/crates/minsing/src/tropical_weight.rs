//! Piecewise-linear (tropical) weights read off a coefficient polytope.
//!
//! A weight is a finite max of affine pieces `offset + <alpha, t>`, one piece
//! per polytope vertex, evaluated on log-coordinates `t` whose entries may be
//! `-inf` (a point sitting on a tracked direction). The convention for that
//! limit: a piece simply omits every coordinate where its own `alpha` entry
//! is zero, and any piece with a positive entry against a `-inf` coordinate
//! is itself `-inf`.
//!
//! Two scalar summaries matter downstream: the generic exponent (the smallest
//! total `alpha` over the polytope, read off the deepest piece) and the
//! directional exponent along a nonnegative direction `d` (the smallest
//! `<alpha, d>` over the pieces). Both are minima because shallow pieces
//! dominate the max near the singular locus.

use crate::box_polytope::BoxPolytope;
use crate::rational::to_f64;
use num::rational::BigRational;
use thiserror::Error;

/// Errors from building or evaluating tropical weights.
#[derive(Debug, Error)]
pub enum TropicalError {
    /// The source polytope has no vertices, so there is no weight to build.
    #[error("cannot build a tropical weight from an empty polytope")]
    EmptyPolytope,
    /// Wrong number of coordinates in a point or direction.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// Offset list does not line up with the vertex list.
    #[error("expected {expected} offsets (one per vertex), got {got}")]
    OffsetCount { expected: usize, got: usize },
    /// A log-point entry was NaN or +inf; only finite values and -inf occur.
    #[error("bad log-point entry at index {0}: must be finite or -inf")]
    BadPoint(usize),
    /// A direction entry was invalid; directions are finite, nonnegative,
    /// and not identically zero.
    #[error("bad direction: {0}")]
    BadDirection(String),
    /// A sampled difference was NaN or infinite.
    #[error("non-finite difference at sample {0}")]
    NonFiniteSample(usize),
}

/// One affine piece `offset + <alpha, t>` of a tropical weight.
#[derive(Debug, Clone)]
pub struct Piece {
    alpha: Vec<BigRational>,
    alpha_f64: Vec<f64>,
    offset: f64,
}

impl Piece {
    fn new(alpha: Vec<BigRational>, offset: f64) -> Self {
        let alpha_f64 = alpha.iter().map(to_f64).collect();
        Self {
            alpha,
            alpha_f64,
            offset,
        }
    }

    /// Exact slope vector of the piece.
    pub fn alpha(&self) -> &[BigRational] {
        &self.alpha
    }

    /// Constant term of the piece.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `offset + <alpha, t>` with the zero-slope skip rule, so `-inf`
    /// coordinates only pull the piece down when the piece actually uses
    /// them.
    fn eval(&self, t: &[f64]) -> f64 {
        let mut acc = self.offset;
        for (a, &x) in self.alpha_f64.iter().zip(t) {
            if *a != 0.0 {
                acc += a * x;
            }
        }
        acc
    }
}

/// A finite max of affine pieces on log-coordinates.
#[derive(Debug, Clone)]
pub struct TropicalWeight {
    rank: usize,
    pieces: Vec<Piece>,
}

impl TropicalWeight {
    /// One piece per polytope vertex, all offsets zero.
    ///
    /// # Errors
    ///
    /// Fails if the polytope is empty.
    pub fn from_box(bx: &BoxPolytope) -> Result<Self, TropicalError> {
        let offsets = vec![0.0; bx.vertices().len()];
        Self::from_box_with_offsets(bx, &offsets)
    }

    /// One piece per polytope vertex with explicit constant terms, listed in
    /// the polytope's (lexicographic) vertex order.
    ///
    /// # Errors
    ///
    /// Fails if the polytope is empty or the offset count is wrong.
    pub fn from_box_with_offsets(
        bx: &BoxPolytope,
        offsets: &[f64],
    ) -> Result<Self, TropicalError> {
        let vertices = bx.vertices();
        if vertices.is_empty() {
            return Err(TropicalError::EmptyPolytope);
        }
        if offsets.len() != vertices.len() {
            return Err(TropicalError::OffsetCount {
                expected: vertices.len(),
                got: offsets.len(),
            });
        }
        let pieces = vertices
            .iter()
            .zip(offsets)
            .map(|(v, &off)| Piece::new(v.clone(), off))
            .collect();
        Ok(Self {
            rank: bx.rank(),
            pieces,
        })
    }

    /// Number of log-coordinates.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The affine pieces, in construction order.
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Max of the pieces at `t`. Entries of `t` may be `-inf`; the result is
    /// `-inf` exactly when every piece touches a `-inf` coordinate.
    ///
    /// # Errors
    ///
    /// Fails on a dimension mismatch or a NaN/+inf entry.
    pub fn evaluate(&self, t: &[f64]) -> Result<f64, TropicalError> {
        if t.len() != self.rank {
            return Err(TropicalError::DimensionMismatch {
                expected: self.rank,
                got: t.len(),
            });
        }
        for (i, &x) in t.iter().enumerate() {
            if x.is_nan() || x == f64::INFINITY {
                return Err(TropicalError::BadPoint(i));
            }
        }
        Ok(self
            .pieces
            .iter()
            .map(|p| p.eval(t))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Smallest `<alpha, d>` over the pieces: the singularity exponent seen
    /// when approaching along direction `d`.
    ///
    /// # Errors
    ///
    /// Fails unless `d` is finite, nonnegative, and not identically zero.
    pub fn directional_coefficient(&self, d: &[f64]) -> Result<f64, TropicalError> {
        if d.len() != self.rank {
            return Err(TropicalError::DimensionMismatch {
                expected: self.rank,
                got: d.len(),
            });
        }
        if d.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(TropicalError::BadDirection(
                "entries must be finite and nonnegative".to_string(),
            ));
        }
        if d.iter().all(|&x| x == 0.0) {
            return Err(TropicalError::BadDirection(
                "direction must not be identically zero".to_string(),
            ));
        }
        Ok(self
            .pieces
            .iter()
            .map(|p| p.alpha_f64.iter().zip(d).map(|(a, &x)| a * x).sum())
            .fold(f64::INFINITY, f64::min))
    }
}

/// The generic singularity exponent carried by a coefficient polytope: the
/// smallest total weight, attained at a vertex. `None` iff the polytope is
/// empty.
pub fn generic_lelong(bx: &BoxPolytope) -> Option<BigRational> {
    bx.min_total()
}

/// Summary of `f - g` over a sample set: largest value, smallest value, and
/// their difference.
#[derive(Debug, Clone, Copy)]
pub struct GapStats {
    /// Largest sampled value of `f - g`.
    pub sup: f64,
    /// Smallest sampled value of `f - g`.
    pub inf: f64,
    /// `sup - inf`, the sampled oscillation of the difference.
    pub spread: f64,
}

/// Estimate how far apart two weights are, as functions, over a coordinate
/// box. Sampling is a deterministic low-discrepancy (Halton) sweep, so equal
/// inputs give byte-equal outputs. A `-inf` lower bound on a coordinate is
/// truncated 100 units below that coordinate's upper bound, deep enough that
/// every piecewise-linear-versus-smooth comparison has saturated.
///
/// # Errors
///
/// Fails on an empty/invalid box, more than six coordinates, zero samples, or
/// a non-finite sampled difference.
pub fn bounded_difference<F, G>(
    f: F,
    g: G,
    t_box: &[(f64, f64)],
    samples: usize,
) -> Result<GapStats, TropicalError>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    const HALTON_BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    const INFINITE_DEPTH: f64 = 100.0;

    let dim = t_box.len();
    if dim == 0 || dim > HALTON_BASES.len() {
        return Err(TropicalError::DimensionMismatch {
            expected: HALTON_BASES.len(),
            got: dim,
        });
    }
    if samples == 0 {
        return Err(TropicalError::BadDirection(
            "need at least one sample".to_string(),
        ));
    }
    let mut bounds = Vec::with_capacity(dim);
    for (i, &(lo, hi)) in t_box.iter().enumerate() {
        if !hi.is_finite() {
            return Err(TropicalError::BadPoint(i));
        }
        let lo = if lo == f64::NEG_INFINITY {
            hi - INFINITE_DEPTH
        } else {
            lo
        };
        if !lo.is_finite() || lo >= hi {
            return Err(TropicalError::BadPoint(i));
        }
        bounds.push((lo, hi));
    }

    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    let mut point = vec![0.0; dim];
    for s in 1..=samples {
        for (j, &(lo, hi)) in bounds.iter().enumerate() {
            point[j] = lo + (hi - lo) * halton(s as u64, HALTON_BASES[j]);
        }
        let diff = f(&point) - g(&point);
        if !diff.is_finite() {
            return Err(TropicalError::NonFiniteSample(s));
        }
        sup = sup.max(diff);
        inf = inf.min(diff);
    }
    Ok(GapStats {
        sup,
        inf,
        spread: sup - inf,
    })
}

/// The smooth companion of a tropical max with uniform slope `c`: the
/// function `t -> c * log(sum_i exp(t_i))`, computed stably. With `c = 0`
/// this is identically zero.
pub fn log_sum_exp_weight(c: f64) -> impl Fn(&[f64]) -> f64 {
    move |t: &[f64]| {
        if c == 0.0 {
            return 0.0;
        }
        let m = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let sum: f64 = t.iter().map(|&x| (x - m).exp()).sum();
        c * (m + sum.ln())
    }
}

/// Radical-inverse (van der Corput) value of `i` in the given base.
fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}
