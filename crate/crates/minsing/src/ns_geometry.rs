//! Divisor classes, positivity cones, and the blow-up family used as the
//! worked example throughout the crate.
//!
//! The objects here are deliberately small: a divisor (or curve) class is its
//! exact coordinate vector in a fixed basis, and a positivity cone is a finite
//! set of rational linear functionals that must be nonnegative on it. That is
//! all the polytope construction downstream needs.
//!
//! The concrete family: blow up projective 3-space at `n` general points lying
//! on a smooth rational quartic curve, and track everything against that
//! curve. The divisor basis is `H, E_1, ..., E_n` (hyperplane pullback and the
//! exceptional divisors); the curve meets `H` four times and each `E_i` once,
//! so pairing against a class `aH + sum b_i E_i` is `4a + sum b_i`.

use crate::rational::{dot, ratio};
use num::rational::BigRational;
use num::traits::Zero;
use thiserror::Error;

/// Errors from class/cone construction and evaluation.
#[derive(Debug, Error)]
pub enum GeometryError {
    /// A class or functional has the wrong number of coordinates.
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A divisor or curve class as exact coordinates in a fixed ordered basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass {
    coords: Vec<BigRational>,
}

impl DivisorClass {
    /// Wrap a coordinate vector.
    pub fn new(coords: Vec<BigRational>) -> Self {
        Self { coords }
    }

    /// Build from integers, for readable test and example setups.
    pub fn from_integers(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| ratio(c, 1)).collect())
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinate slice.
    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }
}

/// A closed convex cone cut out by finitely many rational functionals: the
/// cone is the set of vectors on which every functional is nonnegative.
///
/// Used for the pseudoeffective/nef-style constraint data that feeds the
/// polytope construction; the functionals live on a `dim`-dimensional space.
#[derive(Debug, Clone)]
pub struct PsefCone {
    dim: usize,
    functionals: Vec<Vec<BigRational>>,
}

impl PsefCone {
    /// Build a cone from its defining functionals.
    ///
    /// # Errors
    ///
    /// Fails if any functional does not have `dim` coordinates.
    pub fn new(dim: usize, functionals: Vec<Vec<BigRational>>) -> Result<Self, GeometryError> {
        for f in &functionals {
            if f.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    got: f.len(),
                });
            }
        }
        Ok(Self { dim, functionals })
    }

    /// The ambient dimension the functionals act on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Defining functionals.
    pub fn functionals(&self) -> &[Vec<BigRational>] {
        &self.functionals
    }

    /// Exact membership test.
    ///
    /// # Errors
    ///
    /// Fails if the class lives in the wrong dimension.
    pub fn contains(&self, class: &DivisorClass) -> Result<bool, GeometryError> {
        if class.dim() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got: class.dim(),
            });
        }
        Ok(self
            .functionals
            .iter()
            .all(|f| dot(f, class.coords()) >= BigRational::zero()))
    }
}

/// Blow-up of projective 3-space at `n` general points on a smooth rational
/// quartic curve, with classes written in the basis `H, E_1, ..., E_n`.
#[derive(Debug, Clone, Copy)]
pub struct PointBlowup {
    n: u32,
}

impl PointBlowup {
    /// Blow up at `n >= 1` points.
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "need at least one blown-up point");
        Self { n }
    }

    /// Number of blown-up points.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Coordinate dimension of divisor classes on this space (`1 + n`).
    pub fn class_dim(&self) -> usize {
        1 + self.n as usize
    }

    /// Pullback of the hyperplane class.
    pub fn hyperplane_class(&self) -> DivisorClass {
        let mut c = vec![0i64; self.class_dim()];
        c[0] = 1;
        DivisorClass::from_integers(&c)
    }

    /// The `i`-th exceptional divisor class (`i` is 1-based).
    pub fn exceptional_class(&self, i: u32) -> DivisorClass {
        assert!(1 <= i && i <= self.n, "exceptional index out of range");
        let mut c = vec![0i64; self.class_dim()];
        c[i as usize] = 1;
        DivisorClass::from_integers(&c)
    }

    /// The adjoint-style bundle under study: three times the hyperplane minus
    /// every exceptional divisor.
    pub fn l_class(&self) -> DivisorClass {
        let mut c = vec![-1i64; self.class_dim()];
        c[0] = 3;
        DivisorClass::from_integers(&c)
    }

    /// Class of the quadrics through the points: twice the hyperplane minus
    /// every exceptional divisor. Two general such quadrics cut out the
    /// quartic curve, so this class carries its normal directions.
    pub fn quadric_class(&self) -> DivisorClass {
        let mut c = vec![-1i64; self.class_dim()];
        c[0] = 2;
        DivisorClass::from_integers(&c)
    }

    /// Exact intersection number of a divisor class with the strict transform
    /// of the quartic curve: `4a + sum b_i` on `aH + sum b_i E_i`.
    ///
    /// # Errors
    ///
    /// Fails if the class has the wrong dimension.
    pub fn curve_pairing(&self, class: &DivisorClass) -> Result<BigRational, GeometryError> {
        if class.dim() != self.class_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.class_dim(),
                got: class.dim(),
            });
        }
        let mut pairing = vec![ratio(1, 1); self.class_dim()];
        pairing[0] = ratio(4, 1);
        Ok(dot(&pairing, class.coords()))
    }
}

/// Degrees along the quartic curve for the `n`-point blow-up: the degree of
/// the studied bundle restricted to the curve, and the degrees of the two
/// normal directions cut by quadrics (equal by symmetry, listed separately
/// because downstream code treats them as independent constraint rows).
///
/// Returns `(deg restriction, deg normal 1, deg normal 2) = (12-n, 8-n, 8-n)`.
pub fn zariski_degrees(n: u32) -> (BigRational, BigRational, BigRational) {
    let x = PointBlowup::new(n);
    let deg_l = x.curve_pairing(&x.l_class()).expect("dimensions agree");
    let deg_q = x.curve_pairing(&x.quadric_class()).expect("dimensions agree");
    (deg_l, deg_q.clone(), deg_q)
}

/// Whether the studied bundle is nef on the `n`-point blow-up. Every curve
/// class other than the quartic pairs nonnegatively for the point counts we
/// allow, so nefness is exactly nonnegativity against the quartic.
pub fn is_nef_zariski(n: u32) -> bool {
    let x = PointBlowup::new(n);
    x.curve_pairing(&x.l_class()).expect("dimensions agree") >= BigRational::zero()
}
