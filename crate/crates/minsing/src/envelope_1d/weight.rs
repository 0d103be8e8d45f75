//! Radial weights on a log axis, and sampled functions on product grids.
//!
//! A circle-invariant metric on a line bundle of degree `k` over the model
//! curve is, in the log radius `t = log |z|^2`, a function `psi(t)` whose
//! slopes live in `[0, k]`; convexity is exactly semipositive curvature.
//! This module represents such weights as samples on a uniform grid plus
//! their exact rational degree, provides the model presets used everywhere
//! (round metric, dipped metric, flat metric), and carries the convexity /
//! slope-budget audit for sampled functions of several variables.

use crate::rational::to_f64;
use crate::tol::ADMISSIBILITY_TOL;
use num::rational::BigRational;
use num::traits::{Signed, Zero};
use thiserror::Error;

/// Errors from grid and weight construction.
#[derive(Debug, Error)]
pub enum WeightError {
    /// Grid with fewer than two points, bad ordering, or non-finite bounds.
    #[error("invalid grid: {0}")]
    BadGrid(String),
    /// Sample count does not match the grid.
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    /// A sample is NaN or infinite.
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    /// Negative degree.
    #[error("degree must be nonnegative, got {0}")]
    NegativeDegree(String),
    /// Axis/budget count mismatch in a grid-function audit.
    #[error("expected {expected} axes, got {got}")]
    AxisCount { expected: usize, got: usize },
    /// Value count does not match the product of axis lengths.
    #[error("expected {expected} values for the product grid, got {got}")]
    ValueCount { expected: usize, got: usize },
}

/// A uniform one-dimensional grid, closed at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    min: f64,
    max: f64,
    len: usize,
}

impl UniformGrid {
    /// Grid of `len >= 2` points from `min` to `max` inclusive.
    ///
    /// # Errors
    ///
    /// Fails unless `min < max` are finite and `len >= 2`.
    pub fn new(min: f64, max: f64, len: usize) -> Result<Self, WeightError> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(WeightError::BadGrid(format!(
                "need finite min < max, got [{min}, {max}]"
            )));
        }
        if len < 2 {
            return Err(WeightError::BadGrid(format!("need >= 2 points, got {len}")));
        }
        Ok(Self { min, max, len })
    }

    /// Symmetric grid on `[-half_width, half_width]`.
    ///
    /// # Errors
    ///
    /// Fails unless `half_width > 0` is finite and `len >= 2`.
    pub fn symmetric(half_width: f64, len: usize) -> Result<Self, WeightError> {
        Self::new(-half_width, half_width, len)
    }

    /// Left endpoint.
    pub fn min(&self) -> f64 {
        self.min
    }

    /// Right endpoint.
    pub fn max(&self) -> f64 {
        self.max
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; grids have at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing between adjacent points.
    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.len - 1) as f64
    }

    /// The `i`-th point; endpoints are reproduced exactly.
    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.len);
        let s = i as f64 / (self.len - 1) as f64;
        self.min + (self.max - self.min) * s
    }

    /// All points left to right.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.point(i))
    }

    /// Index of the grid point equal to `x`, within a small fraction of one
    /// step. `None` when `x` falls between points or outside the grid.
    pub fn find_index(&self, x: f64) -> Option<usize> {
        let raw = (x - self.min) / self.step();
        let i = raw.round();
        if i < 0.0 || i >= self.len as f64 {
            return None;
        }
        let i = i as usize;
        if (self.point(i) - x).abs() <= crate::tol::GRID_SNAP_REL * self.step() {
            Some(i)
        } else {
            None
        }
    }
}

/// A sampled radial weight: values on a uniform log-radius grid, the exact
/// degree of the underlying bundle, and a human-readable label.
#[derive(Debug, Clone)]
pub struct RadialWeight {
    grid: UniformGrid,
    values: Vec<f64>,
    degree: BigRational,
    label: String,
}

/// `log(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

impl RadialWeight {
    /// Wrap explicit samples.
    ///
    /// # Errors
    ///
    /// Fails on a sample-count mismatch, non-finite samples, or a negative
    /// degree.
    pub fn from_values(
        grid: UniformGrid,
        values: Vec<f64>,
        degree: BigRational,
        label: impl Into<String>,
    ) -> Result<Self, WeightError> {
        if values.len() != grid.len() {
            return Err(WeightError::SampleCount {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(WeightError::NonFiniteSample(i));
        }
        if degree.is_negative() {
            return Err(WeightError::NegativeDegree(degree.to_string()));
        }
        Ok(Self {
            grid,
            values,
            degree,
            label: label.into(),
        })
    }

    /// Sample a closure over the grid.
    ///
    /// # Errors
    ///
    /// Same failure modes as [`RadialWeight::from_values`].
    pub fn from_fn(
        grid: UniformGrid,
        f: impl Fn(f64) -> f64,
        degree: BigRational,
        label: impl Into<String>,
    ) -> Result<Self, WeightError> {
        let values = grid.points().map(f).collect();
        Self::from_values(grid, values, degree, label)
    }

    /// The round metric of the given degree: `degree * log(1 + e^t)`.
    /// Strictly convex, slopes filling `(0, degree)`.
    ///
    /// # Errors
    ///
    /// Fails on a negative degree.
    pub fn round_metric(grid: UniformGrid, degree: BigRational) -> Result<Self, WeightError> {
        let k = to_f64(&degree);
        let label = format!("fs:{degree}");
        Self::from_fn(grid, |t| k * softplus(t), degree, label)
    }

    /// A degree-2 weight with a Gaussian dip at the origin:
    /// `2 log(1 + e^t) - exp(-t^2)`. Not convex near 0, which is what makes
    /// its envelope nontrivial.
    ///
    /// # Errors
    ///
    /// Infallible in practice; signature matches the other presets.
    pub fn dipped_metric(grid: UniformGrid) -> Result<Self, WeightError> {
        Self::from_fn(
            grid,
            |t| 2.0 * softplus(t) - (-t * t).exp(),
            BigRational::from_integer(2.into()),
            "bump",
        )
    }

    /// The zero weight on the degree-0 bundle.
    ///
    /// # Errors
    ///
    /// Infallible in practice; signature matches the other presets.
    pub fn flat(grid: UniformGrid) -> Result<Self, WeightError> {
        Self::from_values(grid, vec![0.0; grid.len()], BigRational::zero(), "flat")
    }

    /// The grid the samples live on.
    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// Sample values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact degree of the underlying bundle.
    pub fn degree(&self) -> &BigRational {
        &self.degree
    }

    /// Degree as `f64`.
    pub fn degree_f64(&self) -> f64 {
        to_f64(&self.degree)
    }

    /// Label for reports.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// One-sided slopes at the two ends of the window.
    pub fn end_slopes(&self) -> (f64, f64) {
        let n = self.values.len();
        let h = self.grid.step();
        (
            (self.values[1] - self.values[0]) / h,
            (self.values[n - 1] - self.values[n - 2]) / h,
        )
    }

    /// Whether the end slopes sit inside the budget `[0, degree]` up to
    /// `tol`. The envelope and kernel constructions require this: it is what
    /// ties the sampled window to a genuine metric outside it.
    pub fn is_admissible(&self, tol: f64) -> bool {
        let (lo, hi) = self.end_slopes();
        let k = self.degree_f64();
        let within = |s: f64| s >= -tol && s <= k + tol;
        within(lo) && within(hi)
    }

    /// [`RadialWeight::is_admissible`] with the library default tolerance.
    pub fn is_admissible_default(&self) -> bool {
        self.is_admissible(ADMISSIBILITY_TOL)
    }
}

/// A function sampled on a product of uniform grids, stored row-major with
/// the last axis fastest.
#[derive(Debug, Clone)]
pub struct GridFn {
    axes: Vec<UniformGrid>,
    values: Vec<f64>,
}

impl GridFn {
    /// Wrap explicit values.
    ///
    /// # Errors
    ///
    /// Fails when the value count is not the product of axis lengths or a
    /// value is non-finite.
    pub fn new(axes: Vec<UniformGrid>, values: Vec<f64>) -> Result<Self, WeightError> {
        let expected: usize = axes.iter().map(|a| a.len()).product();
        if values.len() != expected {
            return Err(WeightError::ValueCount {
                expected,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(WeightError::NonFiniteSample(i));
        }
        Ok(Self { axes, values })
    }

    /// Sample a closure on the product grid.
    ///
    /// # Errors
    ///
    /// Fails when the closure produces a non-finite value.
    pub fn from_fn(
        axes: Vec<UniformGrid>,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self, WeightError> {
        let total: usize = axes.iter().map(|a| a.len()).product();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; axes.len()];
        let mut point = vec![0.0f64; axes.len()];
        loop {
            for (d, &i) in idx.iter().enumerate() {
                point[d] = axes[d].point(i);
            }
            values.push(f(&point));
            if !advance(&mut idx, &axes) {
                break;
            }
        }
        Self::new(axes, values)
    }

    /// Number of axes.
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// The axes.
    pub fn axes(&self) -> &[UniformGrid] {
        &self.axes
    }

    /// Flat value storage, row-major, last axis fastest.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Flat index of a multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.axes.len());
        let mut flat = 0usize;
        for (d, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.axes[d].len());
            flat = flat * self.axes[d].len() + i;
        }
        flat
    }

    /// Value at a multi-index.
    pub fn value_at(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }
}

/// Odometer increment over a multi-index; false when exhausted.
fn advance(idx: &mut [usize], axes: &[UniformGrid]) -> bool {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < axes[d].len() {
            return true;
        }
        idx[d] = 0;
    }
    false
}

/// Worst-case defects found by [`psh_convexity_check`]. Zero means the
/// sampled function passed the corresponding audit everywhere.
#[derive(Debug, Clone, Copy)]
pub struct ConvexityReport {
    /// Largest midpoint-concavity defect `2 f(x) - f(x-) - f(x+)` over all
    /// axis-parallel and two-axis-diagonal three-point stencils.
    pub max_midpoint_violation: f64,
    /// Largest overshoot of an end slope past its axis budget.
    pub max_slope_violation: f64,
}

/// Audit a sampled function for discrete convexity and per-axis slope
/// budgets.
///
/// Convexity is checked by midpoint stencils along every axis and along both
/// diagonal orientations of every axis pair; that is the sampled shadow of
/// plurisubharmonicity for the circle-invariant functions this crate builds.
/// The slope budget `(lo, hi)` for an axis bounds the one-sided slopes at
/// the two window ends.
///
/// # Errors
///
/// Fails when the budget count does not match the axis count.
pub fn psh_convexity_check(
    f: &GridFn,
    budgets: &[(f64, f64)],
) -> Result<ConvexityReport, WeightError> {
    let dim = f.dim();
    if budgets.len() != dim {
        return Err(WeightError::AxisCount {
            expected: dim,
            got: budgets.len(),
        });
    }

    let mut max_mid = 0.0f64;
    let mut max_slope = 0.0f64;
    let lens: Vec<usize> = f.axes().iter().map(|a| a.len()).collect();
    let mut strides = vec![1usize; dim];
    for d in (0..dim.saturating_sub(1)).rev() {
        strides[d] = strides[d + 1] * lens[d + 1];
    }
    let v = f.values();

    let mut idx = vec![0usize; dim];
    loop {
        let flat = f.flat_index(&idx);
        for a in 0..dim {
            let ia = idx[a];
            let sa = strides[a];
            if ia >= 1 && ia + 1 < lens[a] {
                let mid = 2.0 * v[flat] - v[flat - sa] - v[flat + sa];
                max_mid = max_mid.max(mid);
                for b in a + 1..dim {
                    let ib = idx[b];
                    let sb = strides[b];
                    if ib >= 1 && ib + 1 < lens[b] {
                        let diag1 = 2.0 * v[flat] - v[flat - sa - sb] - v[flat + sa + sb];
                        let diag2 = 2.0 * v[flat] - v[flat - sa + sb] - v[flat + sa - sb];
                        max_mid = max_mid.max(diag1).max(diag2);
                    }
                }
            }
            let h = f.axes()[a].step();
            let (lo, hi) = budgets[a];
            if ia == 0 {
                let s = (v[flat + sa] - v[flat]) / h;
                max_slope = max_slope.max(lo - s);
            }
            if ia + 1 == lens[a] {
                let s = (v[flat] - v[flat - sa]) / h;
                max_slope = max_slope.max(s - hi);
            }
        }
        if !advance(&mut idx, f.axes()) {
            break;
        }
    }
    Ok(ConvexityReport {
        max_midpoint_violation: max_mid,
        max_slope_violation: max_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn grid_points_hit_endpoints_exactly() {
        let g = UniformGrid::symmetric(40.0, 4096).unwrap();
        assert_eq!(g.point(0), -40.0);
        assert_eq!(g.point(4095), 40.0);
        assert_eq!(g.len(), 4096);
        assert!(g.find_index(g.point(100)).unwrap() == 100);
        assert!(g.find_index(g.point(100) + 0.3 * g.step()).is_none());
    }

    #[test]
    fn round_metric_is_admissible_and_convex_at_ends() {
        let g = UniformGrid::symmetric(40.0, 2048).unwrap();
        let w = RadialWeight::round_metric(g, ratio(1, 1)).unwrap();
        let (lo, hi) = w.end_slopes();
        assert!(lo.abs() < 1e-12, "left slope {lo}");
        assert!((hi - 1.0).abs() < 1e-12, "right slope {hi}");
        assert!(w.is_admissible_default());
        assert_eq!(w.label(), "fs:1");
    }

    #[test]
    fn dipped_metric_stays_inside_its_budget_at_ends() {
        let g = UniformGrid::symmetric(40.0, 2048).unwrap();
        let w = RadialWeight::dipped_metric(g).unwrap();
        assert!(w.is_admissible_default());
        assert_eq!(w.degree_f64(), 2.0);
        // The dip makes an interior slope negative; only end slopes are
        // budgeted.
        let slopes: Vec<f64> = w
            .values()
            .windows(2)
            .map(|p| (p[1] - p[0]) / g.step())
            .collect();
        assert!(slopes.iter().cloned().fold(f64::INFINITY, f64::min) < -0.05);
    }

    #[test]
    fn admissibility_rejects_wrong_growth() {
        let g = UniformGrid::symmetric(10.0, 256).unwrap();
        // Slope 1 at both ends on a degree-0 bundle.
        let w = RadialWeight::from_fn(g, |t| t, ratio(0, 1), "linear").unwrap();
        assert!(!w.is_admissible_default());
    }

    #[test]
    fn grid_fn_indexing_is_row_major() {
        let a = UniformGrid::new(0.0, 1.0, 2).unwrap();
        let b = UniformGrid::new(0.0, 2.0, 3).unwrap();
        let f = GridFn::from_fn(vec![a, b], |p| p[0] * 10.0 + p[1]).unwrap();
        assert_eq!(f.value_at(&[0, 2]), 2.0);
        assert_eq!(f.value_at(&[1, 0]), 10.0);
        assert_eq!(f.values().len(), 6);
        assert_eq!(f.flat_index(&[1, 1]), 4);
    }

    #[test]
    fn convexity_audit_accepts_a_max_of_linear_functions() {
        let g = UniformGrid::symmetric(5.0, 101).unwrap();
        let f = GridFn::from_fn(vec![g, g], |p| (p[0] + 0.5 * p[1]).max(0.25 * p[0])).unwrap();
        let rep = psh_convexity_check(&f, &[(0.0, 1.0), (0.0, 0.5)]).unwrap();
        assert!(rep.max_midpoint_violation <= 1e-12);
        assert!(rep.max_slope_violation <= 1e-12);
    }

    #[test]
    fn convexity_audit_flags_a_sine_bump() {
        let g = UniformGrid::symmetric(3.0, 301).unwrap();
        let f = GridFn::from_fn(vec![g], |p| p[0].sin()).unwrap();
        let rep = psh_convexity_check(&f, &[(-2.0, 2.0)]).unwrap();
        let h = 6.0 / 300.0;
        assert!(rep.max_midpoint_violation > 0.5 * h * h);
    }

    #[test]
    fn slope_budget_violations_are_reported() {
        let g = UniformGrid::symmetric(4.0, 65).unwrap();
        let f = GridFn::from_fn(vec![g], |p| 2.0 * p[0]).unwrap();
        let rep = psh_convexity_check(&f, &[(0.0, 1.0)]).unwrap();
        assert!((rep.max_slope_violation - 1.0).abs() < 1e-9);
    }
}
