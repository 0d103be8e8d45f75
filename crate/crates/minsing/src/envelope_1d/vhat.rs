//! Certified lower bounds for the global envelope of a fibered weight.
//!
//! On the model fibration, a circle-invariant competitor is determined by an
//! exponent vector `alpha` in the admissible polytope together with a metric
//! on the matching mixed bundle over the base. Its value at fiber log radii
//! `s` and base log radius `t` is
//!
//! ```text
//! sum_l alpha_l s_l + P(phi_alpha)(t),
//! ```
//!
//! where `phi_alpha` mixes the base weights with coefficients
//! `(alpha, 1 - |alpha|)` and `P` is the slope-constrained envelope. Every
//! such competitor sits below the global envelope, so the pointwise max over
//! a finite family of exponent vectors is a certified lower bound, and
//! enlarging the family can only push it upward. The family used here is
//! the polytope's vertices, the centroids of all vertex subsets, and a
//! simplex lattice of the requested density intersected with the polytope.

use crate::box_polytope::{BoxError, BoxPolytope};
use crate::envelope_1d::envelope::{equilibrium_envelope, mixed_weight, EnvelopeError};
use crate::envelope_1d::weight::{GridFn, RadialWeight, UniformGrid, WeightError};
use crate::rational::to_f64;
use num::rational::BigRational;
use num::traits::Zero;
use std::collections::BTreeSet;
use thiserror::Error;

/// Vertex-subset centroids are enumerated only up to this many vertices;
/// beyond it the subset count explodes and the lattice takes over.
const MAX_CENTROID_VERTICES: usize = 12;

/// Errors from the toy global envelope.
#[derive(Debug, Error)]
pub enum VhatError {
    /// No admissible exponent vectors at all.
    #[error("the exponent polytope is empty")]
    EmptyPolytope,
    /// One base weight per exponent plus one for the residual bundle.
    #[error("rank {rank} needs {expected} base weights, got {got}")]
    WeightCount {
        rank: usize,
        expected: usize,
        got: usize,
    },
    /// The lattice density must be positive.
    #[error("exponent lattice density must be >= 1")]
    BadDensity,
    /// Polytope queries failed.
    #[error(transparent)]
    Box(#[from] BoxError),
    /// Mixing or envelope computation failed.
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    /// Grid assembly failed.
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// The lower-bound envelope and the exponent family that produced it.
#[derive(Debug, Clone)]
pub struct VhatResult {
    /// Values on the product grid: one axis per fiber direction, the base
    /// axis last.
    pub fun: GridFn,
    /// The exponent vectors in the family, lexicographically sorted.
    pub alphas: Vec<Vec<BigRational>>,
}

/// Collect the exponent family: vertices, subset centroids, lattice points.
fn exponent_family(
    bx: &BoxPolytope,
    density: u32,
) -> Result<BTreeSet<Vec<BigRational>>, BoxError> {
    let r = bx.rank();
    let verts = bx.vertices();
    let mut family: BTreeSet<Vec<BigRational>> = verts.iter().cloned().collect();
    if verts.len() <= MAX_CENTROID_VERTICES {
        for mask in 1u32..(1u32 << verts.len()) {
            let mut sum = vec![BigRational::zero(); r];
            let mut count = 0u32;
            for (i, v) in verts.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (s, x) in sum.iter_mut().zip(v) {
                        *s += x;
                    }
                    count += 1;
                }
            }
            let c = BigRational::from_integer(count.into());
            family.insert(sum.into_iter().map(|s| s / &c).collect());
        }
    }
    let mut cur = vec![0u32; r];
    lattice_scan(bx, density, 0, density, &mut cur, &mut family)?;
    Ok(family)
}

/// Walk the simplex lattice `{ j / density : |j| <= density }` and keep the
/// points the polytope contains.
fn lattice_scan(
    bx: &BoxPolytope,
    density: u32,
    pos: usize,
    remaining: u32,
    cur: &mut Vec<u32>,
    family: &mut BTreeSet<Vec<BigRational>>,
) -> Result<(), BoxError> {
    if pos == cur.len() {
        let d = BigRational::from_integer(density.into());
        let alpha: Vec<BigRational> = cur
            .iter()
            .map(|&j| BigRational::from_integer(j.into()) / &d)
            .collect();
        if bx.contains(&alpha)? {
            family.insert(alpha);
        }
        return Ok(());
    }
    for j in 0..=remaining {
        cur[pos] = j;
        lattice_scan(bx, density, pos + 1, remaining - j, cur, family)?;
    }
    Ok(())
}

/// Build the certified lower bound for the global envelope on the product of
/// `rank` fiber axes and the base axis shared by the weights.
///
/// The weight slice provides one base weight per fiber direction plus one
/// for the residual bundle; exponent vector `alpha` mixes them as
/// `(alpha, 1 - |alpha|)`.
///
/// # Errors
///
/// Fails on an empty polytope, a wrong weight count, zero density, or any
/// mixing/envelope failure for a family member.
pub fn vhat_toy(
    bx: &BoxPolytope,
    weights: &[RadialWeight],
    alpha_density: u32,
    fiber: &UniformGrid,
) -> Result<VhatResult, VhatError> {
    let r = bx.rank();
    if bx.is_empty() {
        return Err(VhatError::EmptyPolytope);
    }
    if weights.len() != r + 1 {
        return Err(VhatError::WeightCount {
            rank: r,
            expected: r + 1,
            got: weights.len(),
        });
    }
    if alpha_density == 0 {
        return Err(VhatError::BadDensity);
    }

    let family = exponent_family(bx, alpha_density)?;
    let mut alphas = Vec::with_capacity(family.len());
    let mut slopes: Vec<Vec<f64>> = Vec::with_capacity(family.len());
    let mut envelopes: Vec<Vec<f64>> = Vec::with_capacity(family.len());
    for alpha in family {
        let w = mixed_weight(weights, &alpha)?;
        let env = equilibrium_envelope(&w)?;
        slopes.push(alpha.iter().map(to_f64).collect());
        envelopes.push(env.envelope);
        alphas.push(alpha);
    }

    let base = *weights[0].grid();
    let nb = base.len();
    let mut axes = vec![*fiber; r];
    axes.push(base);
    let total: usize = axes.iter().map(|a| a.len()).product();

    let mut values = Vec::with_capacity(total);
    let mut fib_idx = vec![0usize; r];
    let mut dots = vec![0.0f64; slopes.len()];
    loop {
        for (dot, a) in dots.iter_mut().zip(&slopes) {
            *dot = a
                .iter()
                .zip(&fib_idx)
                .map(|(c, &i)| c * fiber.point(i))
                .sum();
        }
        for ib in 0..nb {
            let mut best = f64::NEG_INFINITY;
            for (g, &dot) in envelopes.iter().zip(&dots) {
                best = best.max(dot + g[ib]);
            }
            values.push(best);
        }
        let mut done = true;
        for v in fib_idx.iter_mut().rev() {
            *v += 1;
            if *v < fiber.len() {
                done = false;
                break;
            }
            *v = 0;
        }
        if done {
            break;
        }
    }

    let fun = GridFn::new(axes, values)?;
    Ok(VhatResult { fun, alphas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::box_polytope::Halfspace;
    use crate::envelope_1d::weight::psh_convexity_check;
    use crate::rational::ratio;
    use crate::tropical_weight::TropicalWeight;

    /// Exponent polytope of the 16-point model: `alpha >= 0`, `|alpha| <= 1`,
    /// `8 alpha_1 + 8 alpha_2 - 4 >= 0`.
    fn model_box() -> BoxPolytope {
        let hs = vec![
            Halfspace {
                normal: vec![ratio(1, 1), ratio(0, 1)],
                offset: ratio(0, 1),
            },
            Halfspace {
                normal: vec![ratio(0, 1), ratio(1, 1)],
                offset: ratio(0, 1),
            },
            Halfspace {
                normal: vec![ratio(-1, 1), ratio(-1, 1)],
                offset: ratio(1, 1),
            },
            Halfspace {
                normal: vec![ratio(8, 1), ratio(8, 1)],
                offset: ratio(-4, 1),
            },
        ];
        BoxPolytope::from_halfspaces(2, hs).unwrap()
    }

    #[test]
    fn flat_base_weights_reproduce_the_tropical_weight() {
        let bx = model_box();
        let base = UniformGrid::symmetric(6.0, 129).unwrap();
        let fiber = UniformGrid::new(-8.0, 2.0, 11).unwrap();
        let flat = RadialWeight::flat(base).unwrap();
        let res = vhat_toy(&bx, &[flat.clone(), flat.clone(), flat], 4, &fiber).unwrap();
        for v in bx.vertices() {
            assert!(res.alphas.contains(v), "family must keep vertex {v:?}");
        }
        let trop = TropicalWeight::from_box(&bx).unwrap();
        for i0 in 0..fiber.len() {
            for i1 in 0..fiber.len() {
                let expected = trop
                    .evaluate(&[fiber.point(i0), fiber.point(i1)])
                    .unwrap();
                for ib in 0..base.len() {
                    let got = res.fun.value_at(&[i0, i1, ib]);
                    assert!(
                        (got - expected).abs() <= 1e-9,
                        "({i0},{i1},{ib}): {got} vs {expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn toy_envelope_passes_the_convexity_audit() {
        let bx = model_box();
        let base = UniformGrid::symmetric(6.0, 97).unwrap();
        let fiber = UniformGrid::new(-5.0, 1.0, 13).unwrap();
        let weights = [
            RadialWeight::round_metric(base, ratio(1, 1)).unwrap(),
            RadialWeight::round_metric(base, ratio(2, 1)).unwrap(),
            RadialWeight::flat(base).unwrap(),
        ];
        let res = vhat_toy(&bx, &weights, 4, &fiber).unwrap();
        // Fiber slopes are exponents in [0, 1]; the base degree tops out at
        // the vertex (0, 1), giving budget 2.
        let rep =
            psh_convexity_check(&res.fun, &[(0.0, 1.0), (0.0, 1.0), (0.0, 2.0)]).unwrap();
        assert!(rep.max_midpoint_violation <= 1e-9);
        assert!(rep.max_slope_violation <= 1e-9);
    }

    #[test]
    fn refining_the_exponent_family_never_lowers_the_bound() {
        let bx = model_box();
        let base = UniformGrid::symmetric(6.0, 65).unwrap();
        let fiber = UniformGrid::new(-4.0, 0.0, 9).unwrap();
        let weights = [
            RadialWeight::round_metric(base, ratio(1, 1)).unwrap(),
            RadialWeight::dipped_metric(base).unwrap(),
            RadialWeight::flat(base).unwrap(),
        ];
        let mut prev: Option<VhatResult> = None;
        for d in [2u32, 4, 8, 16] {
            let res = vhat_toy(&bx, &weights, d, &fiber).unwrap();
            if let Some(p) = &prev {
                assert!(res.alphas.len() >= p.alphas.len());
                // Nested families evaluate identical members identically,
                // so the max over the larger family dominates exactly.
                for (lo, hi) in p.fun.values().iter().zip(res.fun.values()) {
                    assert!(hi >= lo, "refinement lowered {lo} to {hi}");
                }
            }
            prev = Some(res);
        }
    }

    #[test]
    fn input_shape_errors_are_reported() {
        let bx = model_box();
        let base = UniformGrid::symmetric(6.0, 33).unwrap();
        let fiber = UniformGrid::new(-4.0, 0.0, 5).unwrap();
        let w = RadialWeight::flat(base).unwrap();
        assert!(matches!(
            vhat_toy(&bx, &[w.clone(), w.clone()], 2, &fiber),
            Err(VhatError::WeightCount { .. })
        ));
        assert!(matches!(
            vhat_toy(&bx, &[w.clone(), w.clone(), w], 0, &fiber),
            Err(VhatError::BadDensity)
        ));
    }
}
