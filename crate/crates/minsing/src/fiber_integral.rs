//! Fiber integrals: closed forms and independent numeric verification.
//!
//! The model integral lives on `C^r` in coordinates `z_1..z_r` with `r + 1`
//! constant local weights `phi_1..phi_{r+1}`:
//!
//! ```text
//! J(t, p) = integral over C^r of
//!     prod |z_i|^(2 t_i) * exp(sum_{i=1}^{r+1} phi_i)
//!     / (sum_i |z_i|^2 e^{phi_i} + e^{phi_{r+1}})^p
//!     * prod_i (i dz_i ^ dzbar_i)
//! ```
//!
//! The numerator carries one factor of each of the `r + 1` weights (the
//! frame volume normalization). For the geometric exponent `p = r + 2` the
//! integral has the closed form
//!
//! ```text
//! J(t, r+2) = (2 pi)^r * prod Gamma(1 + t_i) * Gamma(2 - |t|) / Gamma(r+2)
//!             * exp(-phi_t),    phi_t = sum t_i phi_i + (1 - |t|) phi_{r+1}
//! ```
//!
//! valid on the window `t_i > -1`, `|t| < 2` (`|t|` is the coordinate sum).
//! The numeric route never sees that formula: it reduces to polar
//! coordinates, substitutes away every endpoint singularity, and feeds plain
//! adaptive Simpson. Agreement between the two routes is the point.
//!
//! Three derived checks ride on the same machinery: the normalization
//! integral `J(0, r+1)` (whose value `(2 pi)^r / r!` must not depend on the
//! weights), orthogonality ratios of monomial sections under the `p = m+r+1`
//! pairing, and the interpolation inequality comparing `J(l/m, r+2)` against
//! `J(l, m+r+1)^(1/m) * J(0, r+1)^((m-1)/m)`.

use crate::gamma::gamma;
use crate::quadrature::{adaptive_simpson, simpson_estimate, QuadError};
use std::f64::consts::PI;
use thiserror::Error;

/// Largest rank the numeric routes support; closed forms work for any rank.
pub const MAX_NUMERIC_RANK: usize = 3;

/// Largest monomial exponent accepted by the section-pairing checks.
pub const MAX_MONOMIAL_DEGREE: u32 = 100;

/// Errors from fiber-integral evaluation.
#[derive(Debug, Error)]
pub enum FiberError {
    /// Exponents outside the convergence window of the integral.
    #[error("outside the convergence window: {0}")]
    Window(String),
    /// Mismatched vector lengths.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// Rank not supported by the numeric route.
    #[error("rank {0} unsupported for quadrature: expected 1..={MAX_NUMERIC_RANK}")]
    UnsupportedRank(usize),
    /// Invalid tolerance/budget/cutoff request.
    #[error("bad quadrature spec: {0}")]
    BadSpec(String),
    /// The underlying one-dimensional quadrature failed.
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Exponent/weight data for the geometric integral `J(t, r+2)`.
#[derive(Debug, Clone)]
pub struct FiberProblem {
    t: Vec<f64>,
    phi: Vec<f64>,
}

impl FiberProblem {
    /// Validate exponents and weights.
    ///
    /// # Errors
    ///
    /// Fails when `t` is empty, `phi` does not have exactly one more entry
    /// than `t`, anything is non-finite, or `t` leaves the convergence
    /// window (`t_i > -1`, sum less than 2).
    pub fn new(t: Vec<f64>, phi: Vec<f64>) -> Result<Self, FiberError> {
        if t.is_empty() {
            return Err(FiberError::Window("need at least one exponent".to_string()));
        }
        if phi.len() != t.len() + 1 {
            return Err(FiberError::DimensionMismatch {
                expected: t.len() + 1,
                got: phi.len(),
            });
        }
        if t.iter().chain(phi.iter()).any(|x| !x.is_finite()) {
            return Err(FiberError::Window("non-finite entry".to_string()));
        }
        if let Some(bad) = t.iter().find(|&&x| x <= -1.0) {
            return Err(FiberError::Window(format!(
                "exponent {bad} <= -1 makes the integral diverge at the origin"
            )));
        }
        let total: f64 = t.iter().sum();
        if total >= 2.0 {
            return Err(FiberError::Window(format!(
                "exponent sum {total} >= 2 makes the integral diverge at infinity"
            )));
        }
        Ok(Self { t, phi })
    }

    /// Number of fiber coordinates.
    pub fn rank(&self) -> usize {
        self.t.len()
    }

    /// Monomial exponents.
    pub fn t(&self) -> &[f64] {
        &self.t
    }

    /// Local weights, one per coordinate plus the frame weight last.
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }
}

/// Tolerance, optional radial cutoff, and panel budget for the quadrature
/// routes.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    /// Target relative accuracy of the final value.
    pub rel_tol: f64,
    /// Optional radial cutoff in the scaled variable. `None` integrates to
    /// infinity exactly (the substitution maps the tail in); `Some` truncates
    /// there and adds the leading analytic tail term.
    pub sigma_max: Option<f64>,
    /// Panel budget for each one-dimensional quadrature.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            sigma_max: None,
            max_panels: 20_000,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<(), FiberError> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(FiberError::BadSpec(format!(
                "rel_tol must lie in (0, 1e-2], got {}",
                self.rel_tol
            )));
        }
        if self.max_panels < 100 {
            return Err(FiberError::BadSpec(format!(
                "max_panels must be at least 100, got {}",
                self.max_panels
            )));
        }
        if let Some(s) = self.sigma_max {
            if !(s.is_finite() && s >= 10.0) {
                return Err(FiberError::BadSpec(format!(
                    "sigma_max must be finite and >= 10, got {s}"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a numeric integral.
#[derive(Debug, Clone, Copy)]
pub struct NumericResult {
    /// Integral estimate.
    pub value: f64,
    /// Total accepted panels across all one-dimensional passes.
    pub panels: usize,
    /// Radial cutoff actually used; infinite when no truncation happened.
    pub sigma_max: f64,
}

/// Both sides of the interpolation inequality; the claim is `lhs <= rhs`.
#[derive(Debug, Clone, Copy)]
pub struct HolderReport {
    /// `J(l/m, r+2)`, the fractionally twisted integral.
    pub lhs: f64,
    /// `J(l, m+r+1)^(1/m) * J(0, r+1)^((m-1)/m)`.
    pub rhs: f64,
}

/// Closed-form value of `J(t, r+2)`.
pub fn closed_form(p: &FiberProblem) -> f64 {
    let r = p.rank();
    let total: f64 = p.t.iter().sum();
    let mut value = (2.0 * PI).powi(r as i32) / gamma((r + 2) as f64);
    for &ti in &p.t {
        value *= gamma(1.0 + ti);
    }
    value *= gamma(2.0 - total);
    let phi_t: f64 = p
        .t
        .iter()
        .zip(&p.phi)
        .map(|(ti, fi)| ti * fi)
        .sum::<f64>()
        + (1.0 - total) * p.phi[r];
    value * (-phi_t).exp()
}

/// Numeric value of `J(t, r+2)` by polar reduction and adaptive Simpson,
/// sharing no formulas with [`closed_form`] beyond the integrand itself.
///
/// # Errors
///
/// Fails on ranks above [`MAX_NUMERIC_RANK`], an invalid spec, or quadrature
/// breakdown.
pub fn numeric_integral(
    p: &FiberProblem,
    spec: &QuadratureSpec,
) -> Result<NumericResult, FiberError> {
    weighted_moment(&p.t, (p.rank() + 2) as f64, &p.phi, spec)
}

/// Numeric value of the normalization integral `J(0, r+1)` by honest nested
/// quadrature: the weights stay inside the integrand (no analytic
/// cancellation), so the value coming out independent of `phi` is a real
/// statement about the integral, not about the code.
///
/// # Errors
///
/// Fails on unsupported rank, wrong `phi` length, an invalid spec, or
/// quadrature breakdown.
pub fn normalization_constant(
    r: usize,
    phi: &[f64],
    spec: &QuadratureSpec,
) -> Result<NumericResult, FiberError> {
    spec.validate()?;
    if r == 0 || r > MAX_NUMERIC_RANK {
        return Err(FiberError::UnsupportedRank(r));
    }
    if phi.len() != r + 1 {
        return Err(FiberError::DimensionMismatch {
            expected: r + 1,
            got: phi.len(),
        });
    }
    if phi.iter().any(|x| !x.is_finite()) {
        return Err(FiberError::BadSpec("non-finite weight".to_string()));
    }

    let a_last = phi[r].exp();
    let weights: Vec<f64> = phi[..r].iter().map(|f| f.exp()).collect();
    let p = (r + 1) as f64;
    let phi_sum: f64 = phi.iter().sum();
    let budget = spec.max_panels;
    let panels_used = std::cell::Cell::new(0usize);
    let stash: std::cell::RefCell<Option<FiberError>> = std::cell::RefCell::new(None);

    // Radial factor at a fixed direction with combined weight `b`:
    // (1/2) [ int_0^1 sigma^(r-1) (sigma b + a)^-p dsigma
    //       + int_0^1 (b + a w)^-p dw ],
    // the second piece being the exact image of [1, infinity) under
    // w = 1/sigma. Smooth integrands, no cutoff.
    let radial = |b: f64, rel: f64| -> Result<f64, FiberError> {
        let g1 = |s: f64| s.powi(r as i32 - 1) * (s * b + a_last).powf(-p);
        let g2 = |w: f64| (b + a_last * w).powf(-p);
        let (v1, n1) = integrate_smooth(&g1, 0.0, 1.0, rel, budget)?;
        let (v2, n2) = integrate_smooth(&g2, 0.0, 1.0, rel, budget)?;
        panels_used.set(panels_used.get() + n1 + n2);
        Ok(0.5 * (v1 + v2))
    };

    // Nested closures must stay infallible, so inner failures park the error
    // and surface as NaN, which the outer quadrature reports immediately.
    let fail = |e: FiberError| -> f64 {
        stash.borrow_mut().get_or_insert(e);
        f64::NAN
    };

    let rel0 = spec.rel_tol / 8.0;
    let value = match r {
        1 => {
            let rad = radial(weights[0], rel0)?;
            2.0 * PI * 2.0 * phi_sum.exp() * rad
        }
        2 => {
            let f = |theta: f64| -> f64 {
                let (c, s) = (theta.cos(), theta.sin());
                let b = weights[0] * c * c + weights[1] * s * s;
                match radial(b, rel0 / 8.0) {
                    Ok(v) => c * s * v,
                    Err(e) => fail(e),
                }
            };
            let (outer, n) = integrate_smooth(&f, 0.0, PI / 2.0, rel0, budget)?;
            panels_used.set(panels_used.get() + n);
            (2.0 * PI).powi(2) * 4.0 * phi_sum.exp() * outer
        }
        3 => {
            let f1 = |t1: f64| -> f64 {
                let (c1, s1) = (t1.cos(), t1.sin());
                let f2 = |t2: f64| -> f64 {
                    let (c2, s2) = (t2.cos(), t2.sin());
                    let b = weights[0] * c1 * c1
                        + s1 * s1 * (weights[1] * c2 * c2 + weights[2] * s2 * s2);
                    match radial(b, rel0 / 64.0) {
                        Ok(v) => c2 * s2 * v,
                        Err(e) => fail(e),
                    }
                };
                match integrate_smooth(&f2, 0.0, PI / 2.0, rel0 / 8.0, budget) {
                    Ok((v, n)) => {
                        panels_used.set(panels_used.get() + n);
                        c1 * s1.powi(3) * v
                    }
                    Err(e) => fail(e),
                }
            };
            let (outer, n) = integrate_smooth(&f1, 0.0, PI / 2.0, rel0, budget)?;
            panels_used.set(panels_used.get() + n);
            (2.0 * PI).powi(3) * 8.0 * phi_sum.exp() * outer
        }
        _ => unreachable!("rank validated above"),
    };

    if let Some(e) = stash.into_inner() {
        return Err(e);
    }
    Ok(NumericResult {
        value,
        panels: panels_used.get(),
        sigma_max: f64::INFINITY,
    })
}

/// Normalized pairing ratio `|<s_l, s_l'>| / (||s_l|| ||s_l'||)` of two
/// monomial sections under the `p = m+r+1` pairing, `m` being the larger
/// total degree (at least 1). Equal multi-indices return exactly 1 with no
/// quadrature; distinct ones should come out at rounding-noise level, which
/// is the orthogonality statement.
///
/// # Errors
///
/// Fails on mismatched/oversized multi-indices, unsupported rank, an invalid
/// spec, or quadrature breakdown.
pub fn orthogonality_check(
    ell: &[u32],
    ell_prime: &[u32],
    phi: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64, FiberError> {
    spec.validate()?;
    let r = ell.len();
    if r == 0 || r > MAX_NUMERIC_RANK {
        return Err(FiberError::UnsupportedRank(r));
    }
    if ell_prime.len() != r {
        return Err(FiberError::DimensionMismatch {
            expected: r,
            got: ell_prime.len(),
        });
    }
    if phi.len() != r + 1 {
        return Err(FiberError::DimensionMismatch {
            expected: r + 1,
            got: phi.len(),
        });
    }
    if ell
        .iter()
        .chain(ell_prime.iter())
        .any(|&e| e > MAX_MONOMIAL_DEGREE)
    {
        return Err(FiberError::BadSpec(format!(
            "monomial exponent above {MAX_MONOMIAL_DEGREE}"
        )));
    }
    if ell == ell_prime {
        return Ok(1.0);
    }

    let deg_a: u32 = ell.iter().sum();
    let deg_b: u32 = ell_prime.iter().sum();
    let m = deg_a.max(deg_b).max(1);
    let p = (m as usize + r + 1) as f64;

    let mut angular = 1.0;
    for (&a, &b) in ell.iter().zip(ell_prime) {
        angular *= circle_overlap(a as i64 - b as i64);
    }

    let t_cross: Vec<f64> = ell
        .iter()
        .zip(ell_prime)
        .map(|(&a, &b)| 0.5 * (a as f64 + b as f64))
        .collect();
    let t_a: Vec<f64> = ell.iter().map(|&e| e as f64).collect();
    let t_b: Vec<f64> = ell_prime.iter().map(|&e| e as f64).collect();

    let cross = weighted_moment(&t_cross, p, phi, spec)?.value;
    let norm_a = weighted_moment(&t_a, p, phi, spec)?.value;
    let norm_b = weighted_moment(&t_b, p, phi, spec)?.value;
    Ok(angular * cross / (norm_a * norm_b).sqrt())
}

/// Both sides of the interpolation inequality for a multi-index `l` with
/// `|l| <= m`: the fractional twist `J(l/m, r+2)` on the left, the
/// `m`-th-root interpolation `J(l, m+r+1)^(1/m) * J(0, r+1)^((m-1)/m)` on
/// the right. With `m = 1` the two sides are the same expression and come
/// out bitwise equal.
///
/// # Errors
///
/// Fails when `|l| > m`, the rank is unsupported, the spec is invalid, or
/// quadrature breaks down.
pub fn holder_check(
    ell: &[u32],
    m: u32,
    phi: &[f64],
    spec: &QuadratureSpec,
) -> Result<HolderReport, FiberError> {
    spec.validate()?;
    let r = ell.len();
    if r == 0 || r > MAX_NUMERIC_RANK {
        return Err(FiberError::UnsupportedRank(r));
    }
    if phi.len() != r + 1 {
        return Err(FiberError::DimensionMismatch {
            expected: r + 1,
            got: phi.len(),
        });
    }
    if m == 0 {
        return Err(FiberError::BadSpec("m must be at least 1".to_string()));
    }
    let total: u32 = ell.iter().sum();
    if total > m {
        return Err(FiberError::Window(format!(
            "total degree {total} exceeds m = {m}; the fractional twist leaves the window"
        )));
    }

    let t_frac: Vec<f64> = ell.iter().map(|&e| e as f64 / m as f64).collect();
    let t_full: Vec<f64> = ell.iter().map(|&e| e as f64).collect();
    let lhs = weighted_moment(&t_frac, (r + 2) as f64, phi, spec)?.value;
    let norm = weighted_moment(&t_full, (m as usize + r + 1) as f64, phi, spec)?.value;
    let base = weighted_moment(&vec![0.0; r], (r + 1) as f64, phi, spec)?.value;
    let mf = m as f64;
    let rhs = norm.powf(1.0 / mf) * base.powf((mf - 1.0) / mf);
    Ok(HolderReport { lhs, rhs })
}

/// General weighted moment
/// `int prod |z|^(2 t_i) e^(sum phi) / (sum |z|^2 e^phi + e^phi_last)^p`,
/// by polar reduction: the angular directions factor into one-dimensional
/// trigonometric moments and the radius becomes a one-dimensional rational
/// moment, each mapped onto a closed interval with all endpoint
/// singularities substituted away.
fn weighted_moment(
    t: &[f64],
    p: f64,
    phi: &[f64],
    spec: &QuadratureSpec,
) -> Result<NumericResult, FiberError> {
    spec.validate()?;
    let r = t.len();
    if r == 0 || r > MAX_NUMERIC_RANK {
        return Err(FiberError::UnsupportedRank(r));
    }
    if phi.len() != r + 1 {
        return Err(FiberError::DimensionMismatch {
            expected: r + 1,
            got: phi.len(),
        });
    }
    if t.iter().chain(phi.iter()).any(|x| !x.is_finite()) {
        return Err(FiberError::Window("non-finite entry".to_string()));
    }
    if let Some(bad) = t.iter().find(|&&x| x <= -1.0) {
        return Err(FiberError::Window(format!("exponent {bad} <= -1")));
    }
    let total: f64 = t.iter().sum();
    if p - r as f64 - total <= 0.0 {
        return Err(FiberError::Window(format!(
            "exponent sum {total} too large for decay power {p}"
        )));
    }

    let rel = spec.rel_tol / 8.0;
    let budget = spec.max_panels;
    let mut panels = 0usize;

    let c = r as f64 - 1.0 + total;
    let (radial, n_r, sigma_used) = radial_moment(c, p, spec.sigma_max, rel, budget)?;
    panels += n_r;

    let mut angular = 1.0;
    for j in 0..r - 1 {
        let tail: f64 = t[j + 1..].iter().sum();
        let a = 2.0 * t[j] + 1.0;
        let b = 2.0 * (r - 1 - j) as f64 - 1.0 + 2.0 * tail;
        let (ang, n_a) = trig_moment(a, b, rel, budget)?;
        panels += n_a;
        angular *= ang;
    }

    let exponent = -t
        .iter()
        .zip(phi)
        .map(|(ti, fi)| ti * fi)
        .sum::<f64>()
        + (r as f64 + 1.0 + total - p) * phi[r];
    let value =
        (2.0 * PI).powi(r as i32) * 2f64.powi(r as i32) * exponent.exp() * radial * angular;
    Ok(NumericResult {
        value,
        panels,
        sigma_max: sigma_used,
    })
}

/// `(1/2) int_0^inf sigma^c (sigma + 1)^-p dsigma` with smooth endpoints:
/// `[0,1]` under `sigma = u^q`, `[1,inf)` under `w = 1/sigma` then `w = v^q`.
fn radial_moment(
    c: f64,
    p: f64,
    cutoff: Option<f64>,
    rel: f64,
    budget: usize,
) -> Result<(f64, usize, f64), FiberError> {
    let q1 = power_exponent(c + 1.0);
    let e1 = q1 as f64 * (c + 1.0) - 1.0;
    let g1 = move |u: f64| q1 as f64 * u.powf(e1) * (u.powi(q1) + 1.0).powf(-p);
    let (v1, n1) = integrate_smooth(&g1, 0.0, 1.0, rel, budget)?;

    let d = p - c - 2.0;
    let q2 = power_exponent(d + 1.0);
    let e2 = q2 as f64 * (d + 1.0) - 1.0;
    let g2 = move |v: f64| q2 as f64 * v.powf(e2) * (1.0 + v.powi(q2)).powf(-p);
    let (lo, tail, sigma_used) = match cutoff {
        Some(s) => (
            s.recip().powf(1.0 / q2 as f64),
            s.powf(c - p + 1.0) / (p - c - 1.0),
            s,
        ),
        None => (0.0, 0.0, f64::INFINITY),
    };
    let (v2, n2) = integrate_smooth(&g2, lo, 1.0, rel, budget)?;

    Ok((0.5 * (v1 + v2 + tail), n1 + n2, sigma_used))
}

/// `int_0^{pi/2} cos^a sin^b` via `x = sin^2`, split at 1/2 with a power
/// substitution at each endpoint.
fn trig_moment(a: f64, b: f64, rel: f64, budget: usize) -> Result<(f64, usize), FiberError> {
    let beta0 = 0.5 * (b - 1.0);
    let beta1 = 0.5 * (a - 1.0);
    let (left, n1) = beta_half(beta0, beta1, rel, budget)?;
    let (right, n2) = beta_half(beta1, beta0, rel, budget)?;
    Ok((0.5 * (left + right), n1 + n2))
}

/// `int_0^{1/2} x^b0 (1-x)^b1 dx` under `x = u^q`.
fn beta_half(b0: f64, b1: f64, rel: f64, budget: usize) -> Result<(f64, usize), FiberError> {
    let q = power_exponent(b0 + 1.0);
    let e = q as f64 * (b0 + 1.0) - 1.0;
    let upper = 0.5f64.powf(1.0 / q as f64);
    let g = move |u: f64| q as f64 * u.powf(e) * (1.0 - u.powi(q)).powf(b1);
    integrate_smooth(&g, 0.0, upper, rel, budget)
}

/// Power-substitution order lifting an integrable endpoint exponent
/// `e - 1 > -1` to at least `u^5`, so Simpson sees a C^4 integrand.
fn power_exponent(e: f64) -> i32 {
    if e >= 6.0 {
        1
    } else {
        (6.0 / e).ceil() as i32
    }
}

/// Coarse-estimate-then-adaptive driver for a smooth nonnegative integrand.
fn integrate_smooth<F>(
    f: &F,
    a: f64,
    b: f64,
    rel: f64,
    budget: usize,
) -> Result<(f64, usize), FiberError>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok((0.0, 0));
    }
    let coarse = simpson_estimate(f, a, b, 64)?;
    let abs_tol = (rel * coarse.abs()).max(1e-300);
    let res = adaptive_simpson(f, a, b, abs_tol, budget)?;
    Ok((res.value, res.panels))
}

/// `|1/(2 pi) int_0^{2 pi} e^{i delta theta} dtheta|` by the uniform
/// periodic trapezoid rule, which is exact for trigonometric polynomials of
/// degree below the point count.
fn circle_overlap(delta: i64) -> f64 {
    const N: usize = 512;
    debug_assert!(delta.unsigned_abs() < N as u64 / 2);
    let mut sc = 0.0;
    let mut ss = 0.0;
    for k in 0..N {
        let theta = 2.0 * PI * k as f64 / N as f64 * delta as f64;
        sc += theta.cos();
        ss += theta.sin();
    }
    sc.hypot(ss) / N as f64
}
