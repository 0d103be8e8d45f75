//! Deterministic one-dimensional quadrature for the fiber integrals.
//!
//! Adaptive Simpson with a hard panel budget. Callers in this crate always
//! hand over integrands that are smooth on the closed interval (endpoint
//! singularities are removed by substitution before getting here), so plain
//! Simpson subdivision converges fast and, crucially, the evaluation order
//! is fixed: the same input always produces the bitwise-same value.

use thiserror::Error;

/// Hard cap on bisection depth; at 60 halvings the interval width has hit
/// the resolution of `f64` long before.
const MAX_DEPTH: u32 = 60;

/// Quadrature failures.
#[derive(Debug, Error)]
pub enum QuadError {
    /// The panel budget ran out before every subinterval met its tolerance.
    #[error("quadrature did not converge within {budget} panels")]
    BudgetExhausted { budget: usize },
    /// The integrand returned NaN or an infinity.
    #[error("integrand returned a non-finite value at x = {0}")]
    BadValue(f64),
    /// Nonsensical request (bad tolerance or empty budget).
    #[error("invalid quadrature request: {0}")]
    BadRequest(String),
}

/// A converged integral value and the number of accepted panels.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    /// Integral estimate.
    pub value: f64,
    /// Accepted subintervals; a measure of how hard the integrand fought.
    pub panels: usize,
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `abs_tol` by adaptive
/// Simpson bisection, spending at most `max_panels` accepted panels.
///
/// # Errors
///
/// Fails when the budget is exhausted, the integrand produces a non-finite
/// value, or the request itself is invalid (`abs_tol <= 0`, zero budget,
/// or a non-finite interval).
pub fn adaptive_simpson<F>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    if !abs_tol.is_finite() || abs_tol <= 0.0 {
        return Err(QuadError::BadRequest(format!(
            "abs_tol must be positive, got {abs_tol}"
        )));
    }
    if max_panels == 0 {
        return Err(QuadError::BadRequest("zero panel budget".to_string()));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(QuadError::BadRequest(format!(
            "non-finite interval [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            panels: 0,
        });
    }

    let eval = |x: f64| -> Result<f64, QuadError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::BadValue(x))
        }
    };

    struct Frame {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    }

    let m0 = 0.5 * (a + b);
    let (fa, fm, fb) = (eval(a)?, eval(m0)?, eval(b)?);
    let mut stack = vec![Frame {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(fa, fm, fb, b - a),
        tol: abs_tol,
        depth: 0,
    }];

    let mut value = 0.0;
    let mut panels = 0usize;
    while let Some(fr) = stack.pop() {
        let m = 0.5 * (fr.a + fr.b);
        let lm = 0.5 * (fr.a + m);
        let rm = 0.5 * (m + fr.b);
        let flm = eval(lm)?;
        let frm = eval(rm)?;
        let left = simpson(fr.fa, flm, fr.fm, m - fr.a);
        let right = simpson(fr.fm, frm, fr.fb, fr.b - m);
        let delta = left + right - fr.whole;
        if delta.abs() <= 15.0 * fr.tol || fr.depth >= MAX_DEPTH {
            value += left + right + delta / 15.0;
            panels += 1;
            if panels > max_panels {
                return Err(QuadError::BudgetExhausted { budget: max_panels });
            }
        } else {
            let half_tol = 0.5 * fr.tol;
            stack.push(Frame {
                a: m,
                b: fr.b,
                fa: fr.fm,
                fm: frm,
                fb: fr.fb,
                whole: right,
                tol: half_tol,
                depth: fr.depth + 1,
            });
            stack.push(Frame {
                a: fr.a,
                b: m,
                fa: fr.fa,
                fm: flm,
                fb: fr.fm,
                whole: left,
                tol: half_tol,
                depth: fr.depth + 1,
            });
        }
    }
    Ok(QuadResult { value, panels })
}

/// Fixed composite Simpson estimate with `n` panels, used to size the
/// absolute tolerance handed to the adaptive pass.
///
/// # Errors
///
/// Fails when the integrand produces a non-finite value.
pub fn simpson_estimate<F>(f: &F, a: f64, b: f64, n: usize) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0), f(xm), f(x1));
        if !f0.is_finite() || !fm.is_finite() || !f1.is_finite() {
            return Err(QuadError::BadValue(xm));
        }
        total += simpson(f0, fm, f1, h);
    }
    Ok(total)
}
