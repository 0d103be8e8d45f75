//! Exact rational helpers shared by the lattice-geometry and polytope modules.
//!
//! All divisor-class and polytope arithmetic in this crate is exact: classes,
//! halfspace functionals, and vertices are `BigRational` throughout, and only
//! the evaluation layers (tropical weights, envelopes) convert to `f64`.
//! This module centralizes parsing, formatting, and the small dense linear
//! solves that vertex enumeration needs.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};
use std::str::FromStr;

/// Parse a rational from `p/q`, `p`, or a plain decimal such as `-0.25`.
///
/// Decimals are converted exactly (base-10 digits over a power of ten), so
/// `0.1` becomes `1/10`, not the nearest double.
///
/// # Errors
///
/// Returns a human-readable message when the string is not a rational or the
/// denominator is zero.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational literal".to_string());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|e| format!("bad numerator '{num}': {e}"))?;
        let d = BigInt::from_str(den.trim())
            .map_err(|e| format!("bad denominator '{den}': {e}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in '{s}'"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits = frac_part.trim();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal '{s}'"));
        }
        let sign = if int_part.trim_start().starts_with('-') {
            -1
        } else {
            1
        };
        let int = BigInt::from_str(if int_part.is_empty() { "0" } else { int_part })
            .map_err(|e| format!("bad integer part '{int_part}': {e}"))?;
        let scale = BigInt::from(10u32).pow(digits.len() as u32);
        let frac = BigInt::from_str(digits).map_err(|e| format!("bad fraction '{digits}': {e}"))?;
        let numer = int * &scale + BigInt::from(sign) * frac;
        return Ok(BigRational::new(numer, scale));
    }
    let n = BigInt::from_str(s).map_err(|e| format!("bad integer '{s}': {e}"))?;
    Ok(BigRational::from_integer(n))
}

/// Format a rational as the exact string `p/q` (always with a denominator,
/// e.g. `1/2`, `-4/1`). Reports use this form so they are bit-stable.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Convenience constructor from an integer pair.
///
/// # Panics
///
/// Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact value as `f64` (round-to-nearest). Infinite only on astronomical
/// numerators, which desk-scale inputs never produce.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact dot product of two rational vectors.
///
/// # Panics
///
/// Panics if the lengths differ; callers validate dimensions first.
pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    assert_eq!(a.len(), b.len(), "dot product dimension mismatch");
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Solve the square system `m x = rhs` exactly by fraction-free-ish Gaussian
/// elimination with first-nonzero pivoting. Returns `None` when `m` is
/// singular.
pub fn solve_linear(m: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n) && rhs.len() == n);
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut b: Vec<BigRational> = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        let pivot_row = a[col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for (c, pv) in pivot_row.iter().enumerate().skip(col) {
                let delta = &factor * pv;
                a[r][c] -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some(
        (0..n)
            .map(|i| &b[i] / &a[i][i])
            .collect::<Vec<BigRational>>(),
    )
}
