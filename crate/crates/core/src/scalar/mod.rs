//! Coefficient backends.
//!
//! Everything numeric in the crate is generic over [`Scalar`]. Three
//! backends are provided:
//!
//! - [`GaussRat`]: exact Gaussian rationals, the default for all algebraic
//!   invariants;
//! - [`Cyclo`]: exact elements of cyclotomic fields, used when localising at
//!   roots of unity;
//! - [`num_complex::Complex64`]: floating point, with zero tests thresholded
//!   by a relative [`Tol`].

mod cyclo;
mod float;
mod gauss;

pub use cyclo::Cyclo;
pub use gauss::GaussRat;

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;

/// Relative threshold for zero tests. Ignored by exact backends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tol(pub f64);

impl Default for Tol {
    fn default() -> Self {
        Tol(1e-9)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    ExactGaussianRational,
    ComplexFloat,
}

/// Runtime description of the coefficient backend in use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffBackend {
    pub kind: BackendKind,
    pub rank_tolerance: f64,
}

impl CoeffBackend {
    pub fn exact() -> Self {
        CoeffBackend { kind: BackendKind::ExactGaussianRational, rank_tolerance: 0.0 }
    }

    pub fn float(rank_tolerance: f64) -> Self {
        CoeffBackend { kind: BackendKind::ComplexFloat, rank_tolerance }
    }

    pub fn tol(&self) -> Tol {
        Tol(self.rank_tolerance)
    }
}

/// Inertia of a Hermitian form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.pos as i64 - self.neg as i64
    }

    pub fn rank(&self) -> usize {
        self.pos + self.neg
    }
}

/// A field with an involution (complex conjugation) that fixes the
/// rationals.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic performs no rounding.
    const EXACT: bool;
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn imag_unit() -> Self;
    /// `exp(2 pi i p / q)` if representable.
    fn root_of_unity(p: i64, q: u64) -> Option<Self>;
    /// The number pi, for backends that can hold it.
    fn pi() -> Option<Self>;
    fn conj(&self) -> Self;
    /// Exact zero test. Use [`Scalar::negligible`] for thresholded tests.
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// Approximate modulus.
    fn magnitude(&self) -> f64;
    fn to_complex(&self) -> Complex64;
    /// Sign of a value that is fixed by the involution.
    fn real_sign(&self) -> Result<Ordering>;
    /// The value as a rational number, when it is one.
    fn to_real_rational(&self) -> Option<BigRational>;
    /// Parse a `[re, im]` pair of decimal or rational strings.
    fn parse_pair(re: &str, im: &str) -> Result<Self>;
    fn to_pair(&self) -> (String, String);

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    fn negligible(&self, scale: f64, tol: Tol) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol.0 * scale
        }
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|x| self.clone() * x)
    }

    /// Inertia of a Hermitian matrix.
    fn hermitian_inertia(h: &Mat<Self>, tol: Tol) -> Result<Inertia> {
        crate::matrix::ldl_inertia(h, tol)
    }
}

/// Parses `"3/7"`, `"-2"`, `"0.25"`, `"1.5e-3"` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}").parse().map_err(|_| bad())?;
    let mut q = BigRational::from_integer(digits);
    let shift = exp - fp.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let p = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        q *= p;
    } else {
        q /= p;
    }
    Ok(if neg { -q } else { q })
}

pub(crate) fn rational_sign(q: &BigRational) -> Ordering {
    q.cmp(&BigRational::zero())
}

pub(crate) fn rational_det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let piv = m[k][k].clone();
        det *= &piv;
        for r in k + 1..n {
            if m[r][k].is_zero() {
                continue;
            }
            let f = &m[r][k] / &piv;
            let (top, rest) = m.split_at_mut(r);
            for (x, y) in rest[0][k..].iter_mut().zip(&top[k][k..]) {
                *x -= &f * y;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rationals() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(parse_rational("3/7").unwrap(), q(3, 7));
        assert_eq!(parse_rational("-2").unwrap(), q(-2, 1));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-1.5e-3").unwrap(), q(-3, 2000));
        assert_eq!(parse_rational("2e2").unwrap(), q(200, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }
}
