use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{parse_rational, rational_det, rational_sign, Scalar};
use crate::error::{Error, Result};
use crate::poly::RatPoly;

/// Element of a cyclotomic field `Q(zeta_n)`, stored as a polynomial in
/// `zeta_n = exp(2 pi i / n)` reduced modulo the `n`-th cyclotomic
/// polynomial.
///
/// Rational values carry `n = 0` and combine with any field; two elements of
/// different fields are first embedded in `Q(zeta_lcm)`.
#[derive(Clone, Debug)]
pub struct Cyclo {
    n: u32,
    p: RatPoly,
}

impl Cyclo {
    fn make(n: u32, p: RatPoly) -> Self {
        if n == 0 {
            return Cyclo { n: 0, p };
        }
        let p = p.rem(&RatPoly::cyclotomic(n));
        if p.degree().unwrap_or(0) == 0 {
            Cyclo { n: 0, p }
        } else {
            Cyclo { n, p }
        }
    }

    /// `zeta_n^k`.
    pub fn zeta_pow(n: u32, k: i64) -> Self {
        assert!(n > 0);
        let k = k.rem_euclid(n as i64) as usize;
        Cyclo::make(n, RatPoly::monomial(k, BigRational::one()))
    }

    /// Order of the ambient root of unity (`0` for rationals).
    pub fn conductor(&self) -> u32 {
        self.n
    }

    fn embed(&self, m: u32) -> RatPoly {
        if self.n == 0 || self.n == m {
            return self.p.clone();
        }
        debug_assert!(m.is_multiple_of(self.n));
        let step = (m / self.n) as usize;
        let mut c = vec![BigRational::zero(); self.p.coeffs().len() * step + 1];
        for (k, x) in self.p.coeffs().iter().enumerate() {
            c[k * step] = x.clone();
        }
        RatPoly::new(c).rem(&RatPoly::cyclotomic(m))
    }

    fn common(&self, o: &Cyclo) -> u32 {
        match (self.n, o.n) {
            (0, m) | (m, 0) => m,
            (a, b) => a.lcm(&b),
        }
    }

    /// Value under the embedding `zeta_n -> exp(2 pi i j / n)`.
    fn conjugate_value(&self, j: u32) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.p.coeffs().iter().enumerate() {
            let ang = 2.0 * PI * (j as f64) * (k as f64) / (self.n.max(1) as f64);
            acc += Complex64::from_polar(1.0, ang) * c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Field norm down to `Q`, computed as the determinant of multiplication.
    pub fn norm(&self) -> BigRational {
        if self.n == 0 {
            return self.p.coeff(0);
        }
        let phi = RatPoly::cyclotomic(self.n);
        let d = phi.degree().unwrap();
        let mut cols = Vec::with_capacity(d);
        for k in 0..d {
            let prod = (&self.p * &RatPoly::monomial(k, BigRational::one())).rem(&phi);
            cols.push((0..d).map(|r| prod.coeff(r)).collect::<Vec<_>>());
        }
        let rows = (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect();
        rational_det(rows)
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Cyclo) -> bool {
        let m = self.common(o);
        self.embed(m) == o.embed(m)
    }
}

impl Add for Cyclo {
    type Output = Cyclo;
    fn add(self, o: Cyclo) -> Cyclo {
        let m = self.common(&o);
        Cyclo::make(m, &self.embed(m) + &o.embed(m))
    }
}

impl Sub for Cyclo {
    type Output = Cyclo;
    fn sub(self, o: Cyclo) -> Cyclo {
        let m = self.common(&o);
        Cyclo::make(m, &self.embed(m) - &o.embed(m))
    }
}

impl Mul for Cyclo {
    type Output = Cyclo;
    fn mul(self, o: Cyclo) -> Cyclo {
        let m = self.common(&o);
        Cyclo::make(m, &self.embed(m) * &o.embed(m))
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo { n: self.n, p: -&self.p }
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 0 {
            return write!(f, "{}", self.p.coeff(0));
        }
        let s = self.p.to_string().replace('x', &format!("z{}", self.n));
        write!(f, "({s})")
    }
}

impl Scalar for Cyclo {
    const EXACT: bool = true;
    const NAME: &'static str = "exact-cyclotomic";

    fn zero() -> Self {
        Cyclo { n: 0, p: RatPoly::zero() }
    }

    fn one() -> Self {
        Cyclo { n: 0, p: RatPoly::one() }
    }

    fn from_rational(q: &BigRational) -> Self {
        Cyclo { n: 0, p: RatPoly::new(vec![q.clone()]) }
    }

    fn imag_unit() -> Self {
        Cyclo::zeta_pow(4, 1)
    }

    fn root_of_unity(p: i64, q: u64) -> Option<Self> {
        if q == 0 {
            return None;
        }
        let g = p.unsigned_abs().gcd(&q).max(1);
        let q = (q / g) as u32;
        let p = p / g as i64;
        Some(if q == 1 { Cyclo::one() } else { Cyclo::zeta_pow(q, p) })
    }

    fn pi() -> Option<Self> {
        None
    }

    fn conj(&self) -> Self {
        if self.n == 0 {
            return self.clone();
        }
        let n = self.n as usize;
        let mut c = vec![BigRational::zero(); n];
        for (k, x) in self.p.coeffs().iter().enumerate() {
            c[(n - k) % n] += x;
        }
        Cyclo::make(self.n, RatPoly::new(c))
    }

    fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.n == 0 {
            return Some(Cyclo::from_rational(&self.p.coeff(0).recip()));
        }
        let (g, s, _) = RatPoly::ext_gcd(&self.p, &RatPoly::cyclotomic(self.n));
        debug_assert_eq!(g, RatPoly::one());
        Some(Cyclo::make(self.n, s))
    }

    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    fn to_complex(&self) -> Complex64 {
        self.conjugate_value(1)
    }

    /// Sign of a real element, certified through the field norm when the
    /// floating-point value is too close to zero to be trusted.
    fn real_sign(&self) -> Result<Ordering> {
        if self.n == 0 {
            return Ok(rational_sign(&self.p.coeff(0)));
        }
        if self.conj() != *self {
            return Err(Error::NotHermitian);
        }
        if self.is_zero() {
            return Ok(Ordering::Equal);
        }
        let v = self.to_complex().re;
        let size: f64 = self
            .p
            .coeffs()
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .sum();
        let err = 1e-13 * size.max(1.0);
        if v.abs() > 1e3 * err {
            return Ok(if v > 0.0 { Ordering::Greater } else { Ordering::Less });
        }
        let norm = self.norm().abs().to_f64().unwrap_or(0.0);
        let mut others = 1.0;
        for j in 2..self.n {
            if j.gcd(&self.n) == 1 {
                others *= self.conjugate_value(j).norm() + err;
            }
        }
        let lower = norm / others;
        if lower > 4.0 * err && v.abs() > 2.0 * err {
            Ok(if v > 0.0 { Ordering::Greater } else { Ordering::Less })
        } else {
            Err(Error::SignUndecided)
        }
    }

    fn to_real_rational(&self) -> Option<BigRational> {
        (self.n == 0).then(|| self.p.coeff(0))
    }

    fn parse_pair(re: &str, im: &str) -> Result<Self> {
        let re = Cyclo::from_rational(&parse_rational(re)?);
        let im = Cyclo::from_rational(&parse_rational(im)?);
        Ok(re + im * Cyclo::imag_unit())
    }

    /// Lossy: cyclotomic values are written as floating-point pairs.
    fn to_pair(&self) -> (String, String) {
        if self.n == 0 {
            return (self.p.coeff(0).to_string(), "0".into());
        }
        let z = self.to_complex();
        (format!("{:?}", z.re), format!("{:?}", z.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn arithmetic_matches_complex_values() {
        let z6 = Cyclo::root_of_unity(1, 6).unwrap();
        let i = Cyclo::imag_unit();
        let x = z6.clone() * i.clone() + Cyclo::from_i64(3);
        let expect = Complex64::from_polar(1.0, PI / 3.0) * Complex64::i() + 3.0;
        assert!(close(x.to_complex(), expect));
        assert_eq!(x.conductor(), 12);
        let y = x.inv().unwrap();
        assert_eq!(x.clone() * y, Cyclo::one());
        assert!(close(x.conj().to_complex(), expect.conj()));
    }

    #[test]
    fn roots_collapse_to_rationals() {
        assert_eq!(Cyclo::root_of_unity(1, 2).unwrap(), Cyclo::from_i64(-1));
        assert_eq!(Cyclo::root_of_unity(3, 3).unwrap(), Cyclo::one());
        let z3 = Cyclo::root_of_unity(1, 3).unwrap();
        // 1 + z + z^2 = 0
        assert!((Cyclo::one() + z3.clone() + z3.clone() * z3).is_zero());
    }

    #[test]
    fn real_sign_of_algebraic_reals() {
        let z5 = Cyclo::root_of_unity(1, 5).unwrap();
        // 2 cos(2 pi / 5) = (sqrt 5 - 1)/2 > 0
        let c = z5.clone() + z5.conj();
        assert_eq!(c.real_sign().unwrap(), Ordering::Greater);
        let c2 = z5.clone() * z5.clone() + (z5.clone() * z5.clone()).conj();
        assert_eq!(c2.real_sign().unwrap(), Ordering::Less);
        assert!(z5.real_sign().is_err());
    }

    #[test]
    fn norm_of_one_minus_zeta() {
        // N(1 - zeta_p) = p for prime p
        let z7 = Cyclo::root_of_unity(1, 7).unwrap();
        assert_eq!((Cyclo::one() - z7).norm(), BigRational::from_integer(7.into()));
    }
}
