//! Parameter matrices of the linear canonical transform.
//!
//! An LCT is identified by a real 2×2 matrix `[a, b; c, d]` with unit
//! determinant. Composition of transforms is the matrix product, so the
//! algebra here is exact up to floating-point rounding.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `a·d − b·c − 1`.
pub const DET_TOLERANCE: f64 = 1e-12;

/// A unit-determinant LCT parameter matrix `[a, b; c, d]`.
///
/// Serializes as the row-major array `[a, b, c, d]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct LctMatrix {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

/// Named matrices used throughout the toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixKind {
    Identity,
    /// The ordinary Fourier transform, `[0, 1; -1, 0]`.
    Cft,
    /// Fractional Fourier transform of angle `alpha` (radians).
    Frft { alpha: f64 },
    /// `[1/b, -d; 0, b]`, the transmit matrix of the bandwidth-scaling channel.
    Theorem1 { b: f64, d: f64 },
    /// `[a, b; 0, 1/a]`, the transmit matrix of the gain-scaling channel.
    Theorem2 { a: f64, b: f64 },
    General { a: f64, b: f64, c: f64, d: f64 },
}

/// A matrix as written in a config file: either the entries `[a, b, c, d]`
/// or a named kind such as `{"kind": "frft", "alpha": 0.7}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Entries([f64; 4]),
    Named(MatrixKind),
}

impl MatrixSpec {
    pub fn resolve(&self) -> Result<LctMatrix> {
        match *self {
            MatrixSpec::Entries([a, b, c, d]) => LctMatrix::new(a, b, c, d),
            MatrixSpec::Named(kind) => LctMatrix::from_kind(kind),
        }
    }
}

impl From<MatrixKind> for MatrixSpec {
    fn from(kind: MatrixKind) -> Self {
        MatrixSpec::Named(kind)
    }
}

impl From<LctMatrix> for MatrixSpec {
    fn from(m: LctMatrix) -> Self {
        MatrixSpec::Entries(m.to_array())
    }
}

impl LctMatrix {
    /// Builds a matrix, rejecting non-finite entries and determinants that
    /// differ from one by more than [`DET_TOLERANCE`].
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        let det = a * d - b * c;
        if (det - 1.0).abs() > DET_TOLERANCE {
            return Err(Error::Determinant { det });
        }
        Ok(LctMatrix { a, b, c, d })
    }

    pub const fn identity() -> Self {
        LctMatrix { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    pub const fn cft() -> Self {
        LctMatrix { a: 0.0, b: 1.0, c: -1.0, d: 0.0 }
    }

    /// `[cos α, sin α; −sin α, cos α]`.
    pub fn frft(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::NonFinite("frft angle"));
        }
        let (s, c) = sin_cos_exact(alpha);
        Self::new(c, s, -s, c)
    }

    /// `[1/b, −d; 0, b]`; requires `b ≠ 0`.
    pub fn theorem1(b: f64, d: f64) -> Result<Self> {
        if b == 0.0 || !b.is_finite() {
            return Err(Error::param("b", "theorem-1 matrix requires b ≠ 0"));
        }
        Self::new(1.0 / b, -d, 0.0, b)
    }

    /// `[a, b; 0, 1/a]`; requires `a ≠ 0`.
    pub fn theorem2(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::param("a", "theorem-2 matrix requires a ≠ 0"));
        }
        Self::new(a, b, 0.0, 1.0 / a)
    }

    pub fn from_kind(kind: MatrixKind) -> Result<Self> {
        match kind {
            MatrixKind::Identity => Ok(Self::identity()),
            MatrixKind::Cft => Ok(Self::cft()),
            MatrixKind::Frft { alpha } => Self::frft(alpha),
            MatrixKind::Theorem1 { b, d } => Self::theorem1(b, d),
            MatrixKind::Theorem2 { a, b } => Self::theorem2(a, b),
            MatrixKind::General { a, b, c, d } => Self::new(a, b, c, d),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Matrix product `self · right`: the transform that applies `right`
    /// first and `self` second.
    pub fn compose(&self, right: &LctMatrix) -> Result<LctMatrix> {
        Self::new(
            self.a * right.a + self.b * right.c,
            self.a * right.b + self.b * right.d,
            self.c * right.a + self.d * right.c,
            self.c * right.b + self.d * right.d,
        )
    }

    /// `[d, −b; −c, a]`.
    pub fn inverse(&self) -> LctMatrix {
        LctMatrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &LctMatrix) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

impl Default for LctMatrix {
    fn default() -> Self {
        Self::identity()
    }
}

impl TryFrom<[f64; 4]> for LctMatrix {
    type Error = Error;

    fn try_from(v: [f64; 4]) -> Result<Self> {
        LctMatrix::new(v[0], v[1], v[2], v[3])
    }
}

impl From<LctMatrix> for [f64; 4] {
    fn from(m: LctMatrix) -> Self {
        m.to_array()
    }
}

impl fmt::Display for LctMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}; {}, {}]", self.a, self.b, self.c, self.d)
    }
}

/// `(sin α, cos α)`, exact at multiples of π/2 so that quarter-turn
/// matrices are the exact special matrices.
pub fn sin_cos_exact(alpha: f64) -> (f64, f64) {
    let quarter = alpha / FRAC_PI_2;
    if (quarter - quarter.round()).abs() < 1e-15 {
        return match (quarter.round() as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
    }
    alpha.sin_cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(m: &LctMatrix, expected: [f64; 4], tol: f64) {
        let diff = m
            .to_array()
            .iter()
            .zip(expected)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff <= tol, "{m} vs {expected:?}");
    }

    /// Shear–shear–scale products are unit-determinant by construction.
    fn random_matrix(b: f64, c: f64, s: f64) -> LctMatrix {
        let upper = LctMatrix::new(1.0, b, 0.0, 1.0).unwrap();
        let lower = LctMatrix::new(1.0, 0.0, c, 1.0).unwrap();
        let scale = LctMatrix::new(s, 0.0, 0.0, 1.0 / s).unwrap();
        upper.compose(&lower).unwrap().compose(&scale).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let m = LctMatrix::theorem2(2.0, 0.3).unwrap();
        assert_eq!(LctMatrix::identity().compose(&m).unwrap(), m);
        assert_eq!(LctMatrix::identity().inverse(), LctMatrix::identity());
    }

    #[test]
    fn cft_times_theorem1_identity_factor() {
        let m = LctMatrix::cft().compose(&LctMatrix::theorem1(1.0, 0.0).unwrap()).unwrap();
        close(&m, [0.0, 1.0, -1.0, 0.0], 0.0);
    }

    #[test]
    fn theorem1_composed_with_cft_matches_closed_form() {
        // [0,1;-1,0]·[1/B, -D; 0, B] = [0, B; -1/B, D]
        let (b, d) = (2.5, 0.7);
        let m = LctMatrix::cft().compose(&LctMatrix::theorem1(b, d).unwrap()).unwrap();
        close(&m, [0.0, b, -1.0 / b, d], 1e-15);
    }

    #[test]
    fn frft_group_property() {
        let (alpha, beta) = (0.3_f64, 0.5_f64);
        let prod = LctMatrix::frft(alpha).unwrap().compose(&LctMatrix::frft(beta).unwrap()).unwrap();
        // Rotation-matrix product evaluated directly.
        let g = alpha + beta;
        close(&prod, [g.cos(), g.sin(), -g.sin(), g.cos()], 1e-12);
    }

    #[test]
    fn inverse_of_theorem2() {
        let inv = LctMatrix::theorem2(2.0, 0.5).unwrap().inverse();
        close(&inv, [0.5, -0.5, 0.0, 2.0], 0.0);
    }

    #[test]
    fn inverse_of_frft_is_negative_angle() {
        let inv = LctMatrix::frft(0.7).unwrap().inverse();
        let expected = LctMatrix::frft(-0.7).unwrap();
        assert!(inv.max_abs_diff(&expected) <= 1e-15);
    }

    #[test]
    fn special_matrices() {
        assert_eq!(LctMatrix::frft(FRAC_PI_2).unwrap(), LctMatrix::cft());
        close(&LctMatrix::theorem1(1.0, 0.0).unwrap(), [1.0, 0.0, 0.0, 1.0], 0.0);
        close(&LctMatrix::theorem2(1.0, 0.0).unwrap(), [1.0, 0.0, 0.0, 1.0], 0.0);
    }

    #[test]
    fn zero_parameters_are_rejected() {
        assert!(matches!(LctMatrix::theorem1(0.0, 1.0), Err(Error::InvalidParameter { name: "b", .. })));
        assert!(matches!(LctMatrix::theorem2(0.0, 1.0), Err(Error::InvalidParameter { name: "a", .. })));
        assert!(matches!(LctMatrix::new(1.0, 1.0, 1.0, 1.0), Err(Error::Determinant { .. })));
        assert!(LctMatrix::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn json_is_flat_row_major() {
        let m = LctMatrix::theorem2(2.0, 0.5).unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), "[2.0,0.5,0.0,0.5]");
        let back: LctMatrix = serde_json::from_str("[0.0,1.0,-1.0,0.0]").unwrap();
        assert_eq!(back, LctMatrix::cft());
        assert!(serde_json::from_str::<LctMatrix>("[1.0,2.0,3.0,4.0]").is_err());
    }

    #[test]
    fn inverse_round_trip_on_random_batch() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let m = random_matrix(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(0.3..3.0),
            );
            let id = m.inverse().compose(&m).unwrap();
            assert!(id.max_abs_diff(&LctMatrix::identity()) <= 1e-12);
        }
    }

    proptest! {
        #[test]
        fn composition_keeps_unit_determinant(
            b1 in -2.0..2.0f64, c1 in -2.0..2.0f64, s1 in 0.3..3.0f64,
            b2 in -2.0..2.0f64, c2 in -2.0..2.0f64, s2 in 0.3..3.0f64,
        ) {
            let m = random_matrix(b1, c1, s1).compose(&random_matrix(b2, c2, s2)).unwrap();
            prop_assert!((m.det() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn frft_angles_add(alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
            let prod = LctMatrix::frft(alpha).unwrap().compose(&LctMatrix::frft(beta).unwrap()).unwrap();
            prop_assert!(prod.max_abs_diff(&LctMatrix::frft(alpha + beta).unwrap()) <= 1e-12);
        }
    }
}
