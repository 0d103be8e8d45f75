//! Bergman-kernel approximants of the equilibrium envelope.
//!
//! For a weight `phi` of degree `k` and a tensor power `m` with `m k` a
//! nonnegative integer, the sections of the power are spanned by the
//! monomials `z^j`, `0 <= j <= m k`. Their squared norms against the
//! probability measure `e^t dt / (1 + e^t)^2` (the round volume form, total
//! mass 1) are
//!
//! ```text
//! N_j = integral e^{j t - m phi(t)} dmu(t),
//! ```
//!
//! and the normalized kernel weight is
//!
//! ```text
//! v_m(t) = (1/m) log( sum_j e^{j t} / N_j ) - phi(t).
//! ```
//!
//! Because the measure is a probability measure, each `e^{j t}/N_j` is a
//! competitor for the envelope and `v_m` lies above the envelope defect `v`;
//! as `m` grows it squeezes down onto it. Sampled weights are integrated
//! with piecewise-linear interpolation between grid points (the honest
//! reading of sampled data), per-cell Gauss-Legendre, and analytic series
//! tails outside the window anchored to the end slopes.

use crate::envelope_1d::envelope::{equilibrium_envelope, EnvelopeError};
use crate::envelope_1d::weight::RadialWeight;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive};
use thiserror::Error;

/// Gauss-Legendre nodes on [-1, 1], positive half; mirrored in use.
#[allow(clippy::excessive_precision)]
const GL_NODES: [f64; 4] = [
    0.18343464249564980494,
    0.52553240991632898582,
    0.79666647741362673959,
    0.96028985649753623168,
];
#[allow(clippy::excessive_precision)]
const GL_WEIGHTS: [f64; 4] = [
    0.36268378337836198297,
    0.31370664587788728734,
    0.22238103445337447054,
    0.10122853629037625915,
];

/// Series terms kept in each analytic tail; the seventh term is smaller by
/// `exp(-6 |window end|)`, far below every tolerance in play.
const TAIL_TERMS: u32 = 6;

/// Errors from kernel-weight computation.
#[derive(Debug, Error)]
pub enum BergmanError {
    /// `m` must be a positive integer.
    #[error("tensor power m must be >= 1")]
    BadPower,
    /// `m * degree` must be a nonnegative integer to have a monomial basis.
    #[error("m * degree = {0} is not an integer; no global section basis")]
    FractionalDegree(String),
    /// The weight is not admissible, so the norms diverge.
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    /// The window must reach past +-1 for the tail series to converge.
    #[error("grid window [{0}, {1}] too narrow for tail expansion; need to span [-1, 1]")]
    WindowTooNarrow(f64, f64),
}

/// Kernel weight of one tensor power.
#[derive(Debug, Clone)]
pub struct BergmanResult {
    /// `log N_j` for `j = 0..=m k`.
    pub log_norms: Vec<f64>,
    /// The normalized kernel weight minus `phi`, comparable to the envelope
    /// defect.
    pub v: Vec<f64>,
}

/// `log(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Log-density of the round probability measure: `t - 2 log(1 + e^t)`.
fn log_round_density(t: f64) -> f64 {
    t - 2.0 * softplus(t)
}

/// Compute the kernel weight of the `m`-th power of an admissible weight.
///
/// # Errors
///
/// Fails when `m = 0`, `m * degree` is not an integer, the weight is
/// inadmissible, or the grid window does not span `[-1, 1]`.
pub fn bergman_weight(w: &RadialWeight, m: u32) -> Result<BergmanResult, BergmanError> {
    if m == 0 {
        return Err(BergmanError::BadPower);
    }
    if !w.is_admissible_default() {
        let (lo, hi) = w.end_slopes();
        return Err(BergmanError::Envelope(EnvelopeError::Inadmissible {
            label: w.label().to_string(),
            lo,
            hi,
            degree: w.degree_f64(),
        }));
    }
    let mk_exact = w.degree() * BigRational::from_integer(m.into());
    if !mk_exact.is_integer() || mk_exact.is_negative() {
        return Err(BergmanError::FractionalDegree(mk_exact.to_string()));
    }
    let mk = mk_exact
        .to_integer()
        .to_u32()
        .ok_or_else(|| BergmanError::FractionalDegree(mk_exact.to_string()))?;

    let grid = w.grid();
    let (t_lo, t_hi) = (grid.min(), grid.max());
    if t_lo > -1.0 || t_hi < 1.0 {
        return Err(BergmanError::WindowTooNarrow(t_lo, t_hi));
    }
    let phi = w.values();
    let n = phi.len();
    let h = grid.step();
    let mf = m as f64;
    let (s_lo, s_hi) = w.end_slopes();

    let mut log_norms = Vec::with_capacity(mk as usize + 1);
    for j in 0..=mk {
        let jf = j as f64;
        // Normalizer: the largest grid-sample of the log-integrand.
        let mut big = f64::NEG_INFINITY;
        for (i, &p) in phi.iter().enumerate() {
            let t = grid.point(i);
            big = big.max(jf * t - mf * p + log_round_density(t));
        }

        // Per-cell Gauss-Legendre against the piecewise-linear weight.
        let mut sum = 0.0f64;
        for i in 0..n - 1 {
            let t0 = grid.point(i);
            let mid = t0 + 0.5 * h;
            let half = 0.5 * h;
            let mut cell = 0.0f64;
            for q in 0..GL_NODES.len() {
                for sgn in [-1.0f64, 1.0] {
                    let t = mid + sgn * half * GL_NODES[q];
                    let frac = (t - t0) / h;
                    let p = phi[i] + (phi[i + 1] - phi[i]) * frac;
                    cell += GL_WEIGHTS[q]
                        * (jf * t - mf * p + log_round_density(t) - big).exp();
                }
            }
            sum += cell * half;
        }

        // Analytic tails from the end-slope extensions of the weight.
        // Right: density e^t/(1+e^t)^2 = sum_q (-1)^{q+1} q e^{-q t}.
        let beta = jf - mf * s_hi;
        let base_r = -mf * (phi[n - 1] - s_hi * t_hi) - big;
        for q in 1..=TAIL_TERMS {
            let qf = q as f64;
            let sign = if q % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * qf * (base_r + (beta - qf) * t_hi).exp() / (qf - beta);
        }
        // Left: density = sum_q (-1)^{q+1} q e^{q t}.
        let gamma = jf - mf * s_lo;
        let base_l = -mf * (phi[0] - s_lo * t_lo) - big;
        for q in 1..=TAIL_TERMS {
            let qf = q as f64;
            let sign = if q % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * qf * (base_l + (gamma + qf) * t_lo).exp() / (gamma + qf);
        }

        log_norms.push(big + sum.ln());
    }

    // v(t) = (1/m) log sum_j e^{j t - log N_j} - phi(t), stably.
    let mut v = Vec::with_capacity(n);
    for (i, &p) in phi.iter().enumerate() {
        let t = grid.point(i);
        let mut big = f64::NEG_INFINITY;
        for (j, ln_n) in log_norms.iter().enumerate() {
            big = big.max(j as f64 * t - ln_n);
        }
        let mut s = 0.0f64;
        for (j, ln_n) in log_norms.iter().enumerate() {
            s += (j as f64 * t - ln_n - big).exp();
        }
        v.push((big + s.ln()) / mf - p);
    }
    Ok(BergmanResult { log_norms, v })
}

/// Gap summary for one tensor power.
#[derive(Debug, Clone, Copy)]
pub struct SandwichRow {
    /// Tensor power.
    pub m: u32,
    /// `sup (v - v_m)`: positive values would put the kernel weight below
    /// the envelope defect, which the sandwich forbids (up to quadrature
    /// noise).
    pub sup_v_minus_vb: f64,
    /// `sup (v_m - v)`: how far the kernel weight still hangs above the
    /// envelope; should shrink as `m` grows.
    pub sup_vb_minus_v: f64,
}

/// Kernel weights squeezing onto the envelope defect across tensor powers.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    /// One row per requested power, in the given order.
    pub rows: Vec<SandwichRow>,
    /// `sup (v - max_m v_m)`: the envelope against the best kernel bound.
    pub sup_v_minus_best: f64,
}

/// Compare the envelope defect with kernel weights across tensor powers.
///
/// # Errors
///
/// Fails when the envelope or any kernel weight cannot be computed, or when
/// `m_list` is empty.
pub fn sandwich_report(
    w: &RadialWeight,
    m_list: &[u32],
) -> Result<SandwichReport, BergmanError> {
    if m_list.is_empty() {
        return Err(BergmanError::BadPower);
    }
    let env = equilibrium_envelope(w)?;
    let mut rows = Vec::with_capacity(m_list.len());
    let mut best = vec![f64::NEG_INFINITY; env.v.len()];
    for &m in m_list {
        let b = bergman_weight(w, m)?;
        let mut sup_down = f64::NEG_INFINITY;
        let mut sup_up = f64::NEG_INFINITY;
        for ((&ve, &vb), slot) in env.v.iter().zip(&b.v).zip(&mut best) {
            sup_down = sup_down.max(ve - vb);
            sup_up = sup_up.max(vb - ve);
            *slot = slot.max(vb);
        }
        rows.push(SandwichRow {
            m,
            sup_v_minus_vb: sup_down,
            sup_vb_minus_v: sup_up,
        });
    }
    let sup_v_minus_best = env
        .v
        .iter()
        .zip(&best)
        .map(|(&ve, &vb)| ve - vb)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SandwichReport {
        rows,
        sup_v_minus_best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope_1d::weight::UniformGrid;
    use crate::rational::ratio;

    fn grid() -> UniformGrid {
        UniformGrid::symmetric(40.0, 4096).unwrap()
    }

    #[test]
    fn round_metric_norms_match_the_exact_factorials() {
        // Degree 1, power 1: both monomial norms are 1/2, and the kernel
        // weight is the constant log 2. Piecewise-linear sampling of the
        // weight shifts this at order (grid step)^2.
        let w = RadialWeight::round_metric(grid(), ratio(1, 1)).unwrap();
        let b = bergman_weight(&w, 1).unwrap();
        assert_eq!(b.log_norms.len(), 2);
        for &ln_n in &b.log_norms {
            assert!((ln_n - 0.5f64.ln()).abs() < 1e-4, "log norm {ln_n}");
        }
        let ln2 = std::f64::consts::LN_2;
        for &x in &b.v {
            assert!((x - ln2).abs() < 1e-3, "v = {x}");
        }
    }

    #[test]
    fn round_metric_kernel_weights_are_the_known_constants() {
        let w = RadialWeight::round_metric(grid(), ratio(1, 1)).unwrap();
        for m in [1u32, 2, 4, 8] {
            let b = bergman_weight(&w, m).unwrap();
            let expected = ((m + 1) as f64).ln() / m as f64;
            let sup = b
                .v
                .iter()
                .fold(0.0f64, |acc, &x| acc.max((x - expected).abs()));
            assert!(sup < 1e-3, "m = {m}: sup deviation {sup}");
        }
    }

    #[test]
    fn kernel_weight_dominates_the_envelope_defect() {
        for w in [
            RadialWeight::round_metric(grid(), ratio(1, 1)).unwrap(),
            RadialWeight::dipped_metric(grid()).unwrap(),
        ] {
            let rep = sandwich_report(&w, &[1, 2, 4, 8]).unwrap();
            for row in &rep.rows {
                assert!(
                    row.sup_v_minus_vb <= 1e-6,
                    "{} m={}: {}",
                    w.label(),
                    row.m,
                    row.sup_v_minus_vb
                );
                assert!(row.sup_vb_minus_v.is_finite());
            }
            // The squeeze tightens as the power grows.
            for pair in rep.rows.windows(2) {
                assert!(
                    pair[1].sup_vb_minus_v <= pair[0].sup_vb_minus_v + 1e-9,
                    "{}: m={} gap {} vs m={} gap {}",
                    w.label(),
                    pair[0].m,
                    pair[0].sup_vb_minus_v,
                    pair[1].m,
                    pair[1].sup_vb_minus_v
                );
            }
        }
    }

    #[test]
    fn fractional_total_degree_is_rejected() {
        let w = RadialWeight::round_metric(grid(), ratio(1, 2)).unwrap();
        assert!(matches!(
            bergman_weight(&w, 1),
            Err(BergmanError::FractionalDegree(_))
        ));
        assert!(bergman_weight(&w, 2).is_ok());
    }

    #[test]
    fn narrow_windows_are_rejected() {
        let g = UniformGrid::new(0.5, 5.0, 64).unwrap();
        let w = RadialWeight::round_metric(g, ratio(1, 1)).unwrap();
        assert!(matches!(
            bergman_weight(&w, 1),
            Err(BergmanError::WindowTooNarrow(_, _))
        ));
    }
}
