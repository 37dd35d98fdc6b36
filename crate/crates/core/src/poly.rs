//! Univariate polynomials.
//!
//! [`RatPoly`] has rational coefficients and supports the exact root
//! counting used for branch leading coefficients and Alexander polynomials.
//! [`Poly`] is a thin dense polynomial over any [`Scalar`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoly {
    c: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly { c: vec![BigRational::one()] }
    }

    /// The monomial `x^k`.
    pub fn monomial(k: usize, coeff: BigRational) -> Self {
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = coeff;
        RatPoly::new(c)
    }

    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        RatPoly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        RatPoly::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.c.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Order of vanishing at `x = 0`; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        RatPoly::new(self.c.iter().map(|x| x * s).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().recip();
        self.scale(&l)
    }

    pub fn derivative(&self) -> Self {
        RatPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, x)| x * rat(k as i64))
                .collect(),
        )
    }

    /// Euclidean division. Panics if `d` is zero.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let lc = d.lead();
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let f = &r[k + dd] / &lc;
            if !f.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] -= &f * dj;
                }
            }
            q[k] = f;
        }
        r.truncate(dd);
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn ext_gcd(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (RatPoly::one(), RatPoly::zero());
        let (mut t0, mut t1) = (RatPoly::zero(), RatPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.lead().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    /// Multiplicity of `d` as a factor of `self` (`self` nonzero, `d` nonconstant).
    pub fn multiplicity_of(&self, d: &RatPoly) -> usize {
        let mut m = 0;
        let mut p = self.clone();
        while !p.is_zero() {
            let (q, r) = p.div_rem(d);
            if !r.is_zero() {
                break;
            }
            m += 1;
            p = q;
        }
        m
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.c.iter().rev() {
            acc = acc * z + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Yun's square-free factorisation: `self = c * prod f_i^i`.
    pub fn squarefree(&self) -> Vec<(RatPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = RatPoly::gcd(&f, &fp);
        let mut b = f.div_rem(&a0).0;
        let mut c = fp.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let a = RatPoly::gcd(&b, &d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    fn sturm_chain(&self) -> Vec<RatPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-&r);
        }
        chain
    }

    fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut last = Ordering::Equal;
        let mut v = 0;
        for s in signs {
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    /// Distinct real roots of a square-free polynomial in `(0, inf)` and
    /// `(-inf, 0)`. Requires `p(0) != 0`.
    fn sturm_sign_split(&self) -> (usize, usize) {
        let chain = self.sturm_chain();
        let sign = |x: &BigRational| x.cmp(&BigRational::zero());
        let at_zero = Self::variations(chain.iter().map(|p| sign(&p.coeff(0))));
        let at_pinf = Self::variations(chain.iter().map(|p| sign(&p.lead())));
        let at_ninf = Self::variations(chain.iter().map(|p| {
            let s = sign(&p.lead());
            if p.degree().unwrap_or(0) % 2 == 1 {
                s.reverse()
            } else {
                s
            }
        }));
        (at_zero - at_pinf, at_ninf - at_zero)
    }

    /// Number of positive and negative real roots counted with multiplicity.
    /// Requires `self(0) != 0`.
    pub fn real_root_signs(&self) -> (usize, usize) {
        let mut pos = 0;
        let mut neg = 0;
        for (f, m) in self.squarefree() {
            let (p, n) = f.sturm_sign_split();
            pos += p * m;
            neg += n * m;
        }
        (pos, neg)
    }

    /// Substitute `x -> -x`.
    pub fn reflect(&self) -> RatPoly {
        RatPoly::new(
            self.c
                .iter()
                .enumerate()
                .map(|(k, x)| if k % 2 == 1 { -x } else { x.clone() })
                .collect(),
        )
    }

    /// The `n`-th cyclotomic polynomial (cached).
    pub fn cyclotomic(n: u32) -> RatPoly {
        static CACHE: OnceLock<Mutex<HashMap<u32, RatPoly>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(p) = cache.lock().unwrap().get(&n) {
            return p.clone();
        }
        assert!(n >= 1);
        let mut p = RatPoly::monomial(n as usize, BigRational::one()) - RatPoly::one();
        for d in 1..n {
            if n.is_multiple_of(d) {
                p = p.div_rem(&RatPoly::cyclotomic(d)).0;
            }
        }
        cache.lock().unwrap().insert(n, p.clone());
        p
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, o: &RatPoly) -> RatPoly {
        let n = self.c.len().max(o.c.len());
        RatPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, o: &RatPoly) -> RatPoly {
        let n = self.c.len().max(o.c.len());
        RatPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Sub for RatPoly {
    type Output = RatPoly;
    fn sub(self, o: RatPoly) -> RatPoly {
        &self - &o
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RatPoly::new(c)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.c.iter().map(|x| -x).collect())
    }
}

impl std::fmt::Display for RatPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => {}
                _ => write!(f, "{a}*")?,
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Dense polynomial over a [`Scalar`], coefficient `k` multiplying `x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F> {
    c: Vec<F>,
}

impl<F: Scalar> Poly<F> {
    pub fn new(mut c: Vec<F>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(a: F) -> Self {
        Poly::new(vec![a])
    }

    pub fn x() -> Self {
        Poly::new(vec![F::zero(), F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> F {
        self.c.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.c.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn scale(&self, s: &F) -> Self {
        Poly::new(self.c.iter().map(|x| x.clone() * s.clone()).collect())
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.c.iter().map(f).collect())
    }
}

impl<F: Scalar> Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, o: &Poly<F>) -> Poly<F> {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<F: Scalar> Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, o: &Poly<F>) -> Poly<F> {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl<F: Scalar> Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, o: &Poly<F>) -> Poly<F> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![F::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(c)
    }
}

impl<F: Scalar> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly::new(self.c.iter().map(|x| -x.clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_small() {
        assert_eq!(RatPoly::cyclotomic(1), RatPoly::from_ints(&[-1, 1]));
        assert_eq!(RatPoly::cyclotomic(4), RatPoly::from_ints(&[1, 0, 1]));
        assert_eq!(RatPoly::cyclotomic(6), RatPoly::from_ints(&[1, -1, 1]));
        assert_eq!(RatPoly::cyclotomic(12), RatPoly::from_ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn root_sign_counts() {
        // (x-1)^2 (x+2) (x-3)
        let p = &(&RatPoly::from_ints(&[1, -2, 1]) * &RatPoly::from_ints(&[2, 1]))
            * &RatPoly::from_ints(&[-3, 1]);
        assert_eq!(p.real_root_signs(), (3, 1));
        // x^2 - x + 1 has no real roots even though Descartes allows two
        assert_eq!(RatPoly::from_ints(&[1, -1, 1]).real_root_signs(), (0, 0));
        // x^2 - x - 1 : golden ratio and its conjugate
        assert_eq!(RatPoly::from_ints(&[-1, -1, 1]).real_root_signs(), (1, 1));
    }

    #[test]
    fn ext_gcd_identity() {
        let a = RatPoly::from_ints(&[1, 2, 0, 1]);
        let b = RatPoly::cyclotomic(6);
        let (g, s, t) = RatPoly::ext_gcd(&a, &b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
        assert_eq!(g, RatPoly::one());
    }

    #[test]
    fn multiplicity() {
        let f = &RatPoly::cyclotomic(6) * &RatPoly::cyclotomic(6);
        assert_eq!(f.multiplicity_of(&RatPoly::cyclotomic(6)), 2);
        assert_eq!(f.multiplicity_of(&RatPoly::cyclotomic(3)), 0);
    }
}
