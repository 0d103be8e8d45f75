//! The coefficient polytope attached to a fibered positivity problem.
//!
//! Coefficient vectors `alpha` live in the standard simplex of a small rank
//! `r` (one coordinate per tracked direction, `alpha >= 0`, `|alpha| <= 1`).
//! On top of the simplex, each cone functional imposes that the studied class
//! stays positive after twisting by `alpha`-weighted conormal directions:
//!
//! ```text
//! <functional, l_restr> + sum_i alpha_i * <functional, conormal_i> >= 0
//! ```
//!
//! Everything is exact rational arithmetic. Vertices are enumerated by brute
//! force over all `r`-subsets of the defining halfspaces, which is the right
//! tool at the ranks that occur here (`r <= 6`): no tolerance knobs, no
//! degenerate-pivot corner cases, and the output is canonically sorted.

use crate::ns_geometry::{DivisorClass, PsefCone};
use crate::rational::{dot, solve_linear};
use itertools::Itertools;
use num::rational::BigRational;
use num::traits::Zero;
use std::collections::BTreeSet;
use thiserror::Error;

/// Largest supported polytope rank. Vertex enumeration is exhaustive over
/// halfspace subsets, so the cap keeps worst-case work trivially small.
pub const MAX_RANK: usize = 6;

/// Errors from polytope construction and queries.
#[derive(Debug, Error)]
pub enum BoxError {
    /// Rank outside `1..=MAX_RANK`.
    #[error("rank {0} unsupported: this construction expects 1..={MAX_RANK}")]
    RankOutOfRange(usize),
    /// Mismatched coordinate counts between cone, classes, or query points.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A closed halfspace `normal . x + offset >= 0` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    /// Coefficients of the linear form.
    pub normal: Vec<BigRational>,
    /// Constant term; the halfspace is where `normal . x + offset >= 0`.
    pub offset: BigRational,
}

impl Halfspace {
    /// Evaluate `normal . x + offset`.
    fn eval(&self, x: &[BigRational]) -> BigRational {
        dot(&self.normal, x) + &self.offset
    }
}

/// A compact rational polytope in H-representation with its vertex set.
///
/// Construction always includes the simplex constraints, so the polytope is
/// bounded and "no vertices" is equivalent to "empty".
#[derive(Debug, Clone)]
pub struct BoxPolytope {
    rank: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Vec<BigRational>>,
}

impl BoxPolytope {
    /// Build from explicit halfspaces and enumerate the vertices eagerly.
    ///
    /// Callers must include enough constraints to bound the region; the
    /// public constructor [`build_box`] always does.
    ///
    /// # Errors
    ///
    /// Fails on unsupported rank or a halfspace of the wrong dimension.
    pub fn from_halfspaces(rank: usize, halfspaces: Vec<Halfspace>) -> Result<Self, BoxError> {
        if rank == 0 || rank > MAX_RANK {
            return Err(BoxError::RankOutOfRange(rank));
        }
        for h in &halfspaces {
            if h.normal.len() != rank {
                return Err(BoxError::DimensionMismatch {
                    expected: rank,
                    got: h.normal.len(),
                });
            }
        }
        let vertices = enumerate(rank, &halfspaces);
        Ok(Self {
            rank,
            halfspaces,
            vertices,
        })
    }

    /// Number of `alpha` coordinates.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Defining halfspaces, simplex constraints first.
    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// All vertices, sorted lexicographically. Empty iff the polytope is.
    pub fn vertices(&self) -> &[Vec<BigRational>] {
        &self.vertices
    }

    /// Whether the polytope has no points.
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Exact membership test.
    ///
    /// # Errors
    ///
    /// Fails if the point has the wrong dimension.
    pub fn contains(&self, x: &[BigRational]) -> Result<bool, BoxError> {
        if x.len() != self.rank {
            return Err(BoxError::DimensionMismatch {
                expected: self.rank,
                got: x.len(),
            });
        }
        Ok(self.halfspaces.iter().all(|h| h.eval(x) >= BigRational::zero()))
    }

    /// Whether the all-zero coefficient vector is admissible.
    pub fn contains_origin(&self) -> bool {
        let zero = vec![BigRational::zero(); self.rank];
        self.contains(&zero).expect("origin has the right dimension")
    }

    /// Smallest coordinate sum over the polytope, attained at a vertex.
    /// `None` iff the polytope is empty.
    pub fn min_total(&self) -> Option<BigRational> {
        self.vertices
            .iter()
            .map(|v| v.iter().fold(BigRational::zero(), |acc, c| acc + c))
            .min()
    }
}

/// Assemble the coefficient polytope from cone data.
///
/// Halfspace order: the `r` constraints `alpha_i >= 0`, then `|alpha| <= 1`,
/// then one positivity constraint per cone functional, in the cone's order.
///
/// # Errors
///
/// Fails when the number of conormal directions is outside `1..=MAX_RANK`, or
/// when `l_restr` or a conormal class does not live in the cone's dimension.
pub fn build_box(
    cone: &PsefCone,
    l_restr: &DivisorClass,
    conormals: &[DivisorClass],
) -> Result<BoxPolytope, BoxError> {
    let r = conormals.len();
    if r == 0 || r > MAX_RANK {
        return Err(BoxError::RankOutOfRange(r));
    }
    if l_restr.dim() != cone.dim() {
        return Err(BoxError::DimensionMismatch {
            expected: cone.dim(),
            got: l_restr.dim(),
        });
    }
    for c in conormals {
        if c.dim() != cone.dim() {
            return Err(BoxError::DimensionMismatch {
                expected: cone.dim(),
                got: c.dim(),
            });
        }
    }

    let mut halfspaces = Vec::new();
    for i in 0..r {
        let mut normal = vec![BigRational::zero(); r];
        normal[i] = BigRational::from_integer(1.into());
        halfspaces.push(Halfspace {
            normal,
            offset: BigRational::zero(),
        });
    }
    halfspaces.push(Halfspace {
        normal: vec![BigRational::from_integer((-1).into()); r],
        offset: BigRational::from_integer(1.into()),
    });
    for f in cone.functionals() {
        let normal = conormals
            .iter()
            .map(|c| dot(f, c.coords()))
            .collect::<Vec<_>>();
        let offset = dot(f, l_restr.coords());
        halfspaces.push(Halfspace { normal, offset });
    }
    BoxPolytope::from_halfspaces(r, halfspaces)
}

/// Solve each `r`-subset of active halfspaces exactly and keep the solutions
/// that satisfy every constraint. Returns the sorted, deduplicated list.
fn enumerate(rank: usize, halfspaces: &[Halfspace]) -> Vec<Vec<BigRational>> {
    let mut found: BTreeSet<Vec<BigRational>> = BTreeSet::new();
    for subset in (0..halfspaces.len()).combinations(rank) {
        let m: Vec<Vec<BigRational>> = subset
            .iter()
            .map(|&i| halfspaces[i].normal.clone())
            .collect();
        let rhs: Vec<BigRational> = subset
            .iter()
            .map(|&i| -halfspaces[i].offset.clone())
            .collect();
        let Some(candidate) = solve_linear(&m, &rhs) else {
            continue;
        };
        if halfspaces
            .iter()
            .all(|h| h.eval(&candidate) >= BigRational::zero())
        {
            found.insert(candidate);
        }
    }
    found.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns_geometry::PsefCone;
    use crate::rational::ratio;

    fn degree_cone() -> PsefCone {
        PsefCone::new(1, vec![vec![ratio(1, 1)]]).unwrap()
    }

    /// Positivity data for the `n`-point blow-up along the quartic: degrees
    /// `12 - n` for the bundle and `n - 8` for each conormal direction.
    fn blowup_box(n: i64) -> BoxPolytope {
        build_box(
            &degree_cone(),
            &DivisorClass::from_integers(&[12 - n]),
            &[
                DivisorClass::from_integers(&[n - 8]),
                DivisorClass::from_integers(&[n - 8]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn sixteen_points_gives_the_half_collar() {
        let b = blowup_box(16);
        let h = ratio(1, 2);
        let one = ratio(1, 1);
        let zero = ratio(0, 1);
        assert_eq!(
            b.vertices(),
            &[
                vec![zero.clone(), h.clone()],
                vec![zero.clone(), one.clone()],
                vec![h.clone(), zero.clone()],
                vec![one.clone(), zero.clone()],
            ]
        );
        assert_eq!(b.min_total(), Some(ratio(1, 2)));
        assert!(!b.contains_origin());
        assert!(!b.is_empty());
        assert!(b.contains(&[ratio(1, 4), ratio(1, 2)]).unwrap());
        assert!(!b.contains(&[ratio(1, 4), ratio(1, 8)]).unwrap());
    }

    #[test]
    fn twelve_points_keeps_the_full_simplex() {
        let b = blowup_box(12);
        let one = ratio(1, 1);
        let zero = ratio(0, 1);
        assert_eq!(
            b.vertices(),
            &[
                vec![zero.clone(), zero.clone()],
                vec![zero.clone(), one.clone()],
                vec![one.clone(), zero.clone()],
            ]
        );
        assert_eq!(b.min_total(), Some(ratio(0, 1)));
        assert!(b.contains_origin());
    }

    #[test]
    fn collar_lower_bounds_match_the_point_count() {
        for n in 13..=20 {
            let b = blowup_box(n);
            assert_eq!(b.min_total(), Some(ratio(n - 12, n - 8)), "n = {n}");
            assert_eq!(b.vertices().len(), 4, "n = {n}");
            assert!(!b.contains_origin(), "n = {n}");
        }
    }

    #[test]
    fn contradictory_constraints_give_the_empty_polytope() {
        // |alpha| >= 2 against the simplex bound |alpha| <= 1.
        let b = build_box(
            &degree_cone(),
            &DivisorClass::from_integers(&[-2]),
            &[
                DivisorClass::from_integers(&[1]),
                DivisorClass::from_integers(&[1]),
            ],
        )
        .unwrap();
        assert!(b.is_empty());
        assert_eq!(b.min_total(), None);
        assert!(b.vertices().is_empty());
    }

    #[test]
    fn rank_three_with_two_functionals() {
        let cone = PsefCone::new(
            2,
            vec![vec![ratio(1, 1), ratio(0, 1)], vec![ratio(0, 1), ratio(1, 1)]],
        )
        .unwrap();
        let b = build_box(
            &cone,
            &DivisorClass::new(vec![ratio(1, 1), ratio(1, 1)]),
            &[
                DivisorClass::new(vec![ratio(-1, 1), ratio(0, 1)]),
                DivisorClass::new(vec![ratio(0, 1), ratio(-1, 1)]),
                DivisorClass::new(vec![ratio(-1, 1), ratio(-1, 1)]),
            ],
        )
        .unwrap();
        let one = ratio(1, 1);
        let zero = ratio(0, 1);
        assert_eq!(
            b.vertices(),
            &[
                vec![zero.clone(), zero.clone(), zero.clone()],
                vec![zero.clone(), zero.clone(), one.clone()],
                vec![zero.clone(), one.clone(), zero.clone()],
                vec![one.clone(), zero.clone(), zero.clone()],
            ]
        );
        assert_eq!(b.min_total(), Some(zero));
    }

    #[test]
    fn dropping_a_constraint_only_grows_the_polytope() {
        let tight = blowup_box(16);
        let loose = BoxPolytope::from_halfspaces(
            2,
            tight.halfspaces()[..3].to_vec(),
        )
        .unwrap();
        for v in tight.vertices() {
            assert!(loose.contains(v).unwrap());
        }
    }

    #[test]
    fn rank_bounds_are_enforced() {
        assert!(matches!(
            BoxPolytope::from_halfspaces(0, vec![]),
            Err(BoxError::RankOutOfRange(0))
        ));
        assert!(matches!(
            BoxPolytope::from_halfspaces(7, vec![]),
            Err(BoxError::RankOutOfRange(7))
        ));
    }
}
