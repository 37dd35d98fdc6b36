use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{parse_rational, rational_sign, Scalar};
use crate::error::{Error, Result};

/// Exact Gaussian rational `re + i*im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat { re, im: BigRational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat {
            re: BigRational::from_integer(re.into()),
            im: BigRational::from_integer(im.into()),
        }
    }

    /// `|z|^2`.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, o: GaussRat) -> GaussRat {
        GaussRat { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, o: GaussRat) -> GaussRat {
        GaussRat { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(self.re * o.re);
        }
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", self.re, sign, self.im.abs())
            }
        }
    }
}

impl Scalar for GaussRat {
    const EXACT: bool = true;
    const NAME: &'static str = "exact-gaussian-rational";

    fn zero() -> Self {
        GaussRat { re: BigRational::zero(), im: BigRational::zero() }
    }

    fn one() -> Self {
        GaussRat { re: BigRational::one(), im: BigRational::zero() }
    }

    fn from_rational(q: &BigRational) -> Self {
        GaussRat::real(q.clone())
    }

    fn imag_unit() -> Self {
        GaussRat::from_ints(0, 1)
    }

    fn root_of_unity(p: i64, q: u64) -> Option<Self> {
        if q == 0 {
            return None;
        }
        let k = (4 * p).rem_euclid(4 * q as i64);
        if k % q as i64 != 0 {
            return None;
        }
        Some(match k / q as i64 {
            0 => GaussRat::from_ints(1, 0),
            1 => GaussRat::from_ints(0, 1),
            2 => GaussRat::from_ints(-1, 0),
            _ => GaussRat::from_ints(0, -1),
        })
    }

    fn pi() -> Option<Self> {
        None
    }

    fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(GaussRat::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Some(GaussRat { re: &self.re / &n, im: -(&self.im / &n) })
    }

    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn real_sign(&self) -> Result<Ordering> {
        if !self.im.is_zero() {
            return Err(Error::NotHermitian);
        }
        Ok(rational_sign(&self.re))
    }

    fn to_real_rational(&self) -> Option<BigRational> {
        self.im.is_zero().then(|| self.re.clone())
    }

    fn parse_pair(re: &str, im: &str) -> Result<Self> {
        Ok(GaussRat { re: parse_rational(re)?, im: parse_rational(im)? })
    }

    fn to_pair(&self) -> (String, String) {
        (self.re.to_string(), self.im.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = GaussRat::from_ints(1, 2);
        let b = GaussRat::from_ints(3, -1);
        assert_eq!(a.clone() * b.clone(), GaussRat::from_ints(5, 5));
        let ai = a.inv().unwrap();
        assert_eq!(a.clone() * ai, GaussRat::one());
        assert_eq!(a.conj(), GaussRat::from_ints(1, -2));
        assert!(GaussRat::zero().inv().is_none());
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(GaussRat::root_of_unity(1, 4), Some(GaussRat::from_ints(0, 1)));
        assert_eq!(GaussRat::root_of_unity(3, 6), Some(GaussRat::from_ints(-1, 0)));
        assert_eq!(GaussRat::root_of_unity(-1, 4), Some(GaussRat::from_ints(0, -1)));
        assert_eq!(GaussRat::root_of_unity(1, 3), None);
    }

    #[test]
    fn real_sign_rejects_complex() {
        assert!(GaussRat::from_ints(1, 1).real_sign().is_err());
        assert_eq!(GaussRat::from_ints(-3, 0).real_sign().unwrap(), Ordering::Less);
    }
}
