//! Truncated power series (the germ ring) and truncated Laurent series (its
//! fraction field), with the involution that conjugates coefficients and
//! keeps `t` real.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tol};

/// `c_0 + c_1 t + ... + c_N t^N  mod t^{N+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Germ<F> {
    c: Vec<F>,
}

impl<F: Scalar> Germ<F> {
    /// Coefficients `c_0..=c_N`; the truncation order is `len - 1`.
    pub fn new(c: Vec<F>) -> Self {
        assert!(!c.is_empty(), "a germ needs at least one coefficient");
        Germ { c }
    }

    pub fn zero(order: usize) -> Self {
        Germ { c: vec![F::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Germ::constant(F::one(), order)
    }

    pub fn constant(a: F, order: usize) -> Self {
        let mut g = Germ::zero(order);
        g.c[0] = a;
        g
    }

    /// `a t^k`, truncated.
    pub fn monomial(k: usize, a: F, order: usize) -> Self {
        let mut g = Germ::zero(order);
        if k <= order {
            g.c[k] = a;
        }
        g
    }

    /// Truncates (or zero-pads) a coefficient list to the given order.
    pub fn from_coeffs(c: &[F], order: usize) -> Self {
        Germ { c: (0..=order).map(|k| c.get(k).cloned().unwrap_or_else(F::zero)).collect() }
    }

    /// `exp(a t)`.
    pub fn exp_linear(a: &F, order: usize) -> Self {
        let mut c = Vec::with_capacity(order + 1);
        let mut pow = F::one();
        let mut fact = BigInt::one();
        for k in 0..=order {
            if k > 0 {
                pow = pow * a.clone();
                fact *= k;
            }
            c.push(pow.clone() * F::from_rational(&BigRational::new(BigInt::one(), fact.clone())));
        }
        Germ { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> F {
        debug_assert!(k <= self.order(), "read beyond truncation");
        self.c.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn at_zero(&self) -> F {
        self.c[0].clone()
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated germ");
        Germ { c: self.c[..=order].to_vec() }
    }

    pub fn magnitude(&self) -> f64 {
        self.c.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    /// Index of the first coefficient that is not negligible relative to
    /// `scale`; `None` if the germ is zero to its truncation.
    pub fn valuation_in(&self, scale: f64, tol: Tol) -> Option<usize> {
        self.c.iter().position(|x| !x.negligible(scale, tol))
    }

    pub fn valuation(&self, tol: Tol) -> Option<usize> {
        self.valuation_in(self.magnitude(), tol)
    }

    pub fn is_zero(&self, tol: Tol) -> bool {
        self.valuation(tol).is_none()
    }

    pub fn is_unit(&self, tol: Tol) -> bool {
        self.valuation(tol) == Some(0)
    }

    pub fn conj(&self) -> Self {
        Germ { c: self.c.iter().map(|x| x.conj()).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        Germ { c: self.c.iter().map(|x| x.clone() * s.clone()).collect() }
    }

    /// Multiplication by `t^k`, keeping the truncation order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        Germ { c: (0..=n).map(|j| if j >= k { self.c[j - k].clone() } else { F::zero() }).collect() }
    }

    /// Division by `t^k`. The lowest `k` coefficients are dropped and the
    /// truncation order falls by `k`.
    pub fn shift_down(&self, k: usize) -> Self {
        assert!(k <= self.order());
        Germ { c: self.c[k..].to_vec() }
    }

    /// Division by `t^k`, padding the unknown top coefficients with zeros.
    /// Exact whenever the result is only ever multiplied by multiples of `t^k`.
    pub fn shift_down_padded(&self, k: usize) -> Self {
        let n = self.order();
        Germ { c: (0..=n).map(|j| self.c.get(j + k).cloned().unwrap_or_else(F::zero)).collect() }
    }

    /// Inverse of a germ with invertible constant term.
    pub fn unit_inverse(&self) -> Result<Self> {
        let inv0 = self.c[0].inv().ok_or(Error::IndistinguishableFromZero(0))?;
        let n = self.order();
        let mut b: Vec<F> = Vec::with_capacity(n + 1);
        b.push(inv0.clone());
        for k in 1..=n {
            let mut s = F::zero();
            for j in 1..=k {
                s = s + self.c[j].clone() * b[k - j].clone();
            }
            b.push(-(s * inv0.clone()));
        }
        Ok(Germ { c: b })
    }

    /// Inverse in the Laurent field.
    pub fn invert(&self, tol: Tol) -> Result<LaurentGerm<F>> {
        let v = self
            .valuation(tol)
            .ok_or(Error::IndistinguishableFromZero(self.order() as i64))?;
        let u = self.shift_down(v).unit_inverse()?;
        Ok(LaurentGerm::from_parts(-(v as i64), u.c))
    }

    /// Evaluates a polynomial truncation at a scalar point.
    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.c.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn approx_eq(&self, o: &Germ<F>, tol: Tol) -> bool {
        let n = self.order().min(o.order());
        let scale = self.magnitude().max(o.magnitude()).max(1.0);
        (0..=n).all(|k| (self.c[k].clone() - o.c[k].clone()).negligible(scale, tol))
    }
}

impl<F: Scalar> Add for &Germ<F> {
    type Output = Germ<F>;
    fn add(self, o: &Germ<F>) -> Germ<F> {
        let n = self.order().min(o.order());
        Germ { c: (0..=n).map(|k| self.c[k].clone() + o.c[k].clone()).collect() }
    }
}

impl<F: Scalar> Sub for &Germ<F> {
    type Output = Germ<F>;
    fn sub(self, o: &Germ<F>) -> Germ<F> {
        let n = self.order().min(o.order());
        Germ { c: (0..=n).map(|k| self.c[k].clone() - o.c[k].clone()).collect() }
    }
}

impl<F: Scalar> Mul for &Germ<F> {
    type Output = Germ<F>;
    fn mul(self, o: &Germ<F>) -> Germ<F> {
        let n = self.order().min(o.order());
        let mut c = vec![F::zero(); n + 1];
        for i in 0..=n {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                if o.c[j].is_zero() {
                    continue;
                }
                c[i + j] = c[i + j].clone() + self.c[i].clone() * o.c[j].clone();
            }
        }
        Germ { c }
    }
}

impl<F: Scalar> Neg for &Germ<F> {
    type Output = Germ<F>;
    fn neg(self) -> Germ<F> {
        Germ { c: self.c.iter().map(|x| -x.clone()).collect() }
    }
}

impl<F: Scalar> fmt::Display for Germ<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| match k {
                0 => format!("({x})"),
                1 => format!("({x})t"),
                _ => format!("({x})t^{k}"),
            })
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        write!(f, "{body} + O(t^{})", self.order() + 1)
    }
}

/// `sum_{k >= v} c_k t^k`, known modulo `t^{precision}`.
///
/// Exact zero leading coefficients are stripped, so the first stored
/// coefficient is nonzero unless the value is zero to its precision.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentGerm<F> {
    v: i64,
    c: Vec<F>,
}

impl<F: Scalar> LaurentGerm<F> {
    pub fn from_parts(valuation: i64, coeffs: Vec<F>) -> Self {
        let lead = coeffs.iter().position(|x| !x.is_zero()).unwrap_or(coeffs.len());
        LaurentGerm { v: valuation + lead as i64, c: coeffs[lead..].to_vec() }
    }

    /// Zero, known modulo `t^{precision}`.
    pub fn zero(precision: i64) -> Self {
        LaurentGerm { v: precision, c: Vec::new() }
    }

    pub fn from_germ(g: &Germ<F>) -> Self {
        LaurentGerm::from_parts(0, g.c.clone())
    }

    pub fn valuation(&self) -> i64 {
        self.v
    }

    /// First exponent that is not known.
    pub fn precision(&self) -> i64 {
        self.v + self.c.len() as i64
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Coefficient of `t^k`; zero below the valuation.
    pub fn coeff(&self, k: i64) -> F {
        debug_assert!(k < self.precision(), "read beyond truncation");
        if k < self.v {
            return F::zero();
        }
        self.c.get((k - self.v) as usize).cloned().unwrap_or_else(F::zero)
    }

    pub fn residue(&self) -> F {
        if self.precision() <= -1 {
            return F::zero();
        }
        self.coeff(-1)
    }

    /// The class modulo the germ ring: the terms with negative exponent.
    pub fn principal_part(&self) -> LaurentGerm<F> {
        if self.v >= 0 {
            return LaurentGerm::zero(0);
        }
        let top = self.precision().min(0);
        let c = (self.v..top).map(|k| self.coeff(k)).collect();
        LaurentGerm::from_parts(self.v, c)
    }

    /// True if the principal part vanishes (coefficients thresholded by `tol`).
    pub fn is_regular(&self, tol: Tol) -> bool {
        let scale = self.magnitude().max(1.0);
        (self.v..0.min(self.precision())).all(|k| self.coeff(k).negligible(scale, tol))
    }

    pub fn magnitude(&self) -> f64 {
        self.c.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        LaurentGerm { v: self.v, c: self.c.iter().map(|x| x.conj()).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        LaurentGerm::from_parts(self.v, self.c.iter().map(|x| x.clone() * s.clone()).collect())
    }

    /// Multiplication by `t^k` for any integer `k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentGerm { v: self.v + k, c: self.c.clone() }
    }

    pub fn invert(&self, tol: Tol) -> Result<LaurentGerm<F>> {
        let scale = self.magnitude();
        let lead = self
            .c
            .iter()
            .position(|x| !x.negligible(scale, tol))
            .ok_or(Error::IndistinguishableFromZero(self.precision()))?;
        let u = Germ::new(self.c[lead..].to_vec()).unit_inverse()?;
        Ok(LaurentGerm::from_parts(-(self.v + lead as i64), u.c))
    }

    fn combine(&self, o: &Self, f: impl Fn(F, F) -> F) -> Self {
        let lo = self.v.min(o.v);
        let hi = self.precision().min(o.precision());
        if hi <= lo {
            return LaurentGerm::zero(hi);
        }
        let c = (lo..hi).map(|k| f(self.coeff(k), o.coeff(k))).collect();
        LaurentGerm::from_parts(lo, c)
    }
}

impl<F: Scalar> Add for &LaurentGerm<F> {
    type Output = LaurentGerm<F>;
    fn add(self, o: &LaurentGerm<F>) -> LaurentGerm<F> {
        self.combine(o, |a, b| a + b)
    }
}

impl<F: Scalar> Sub for &LaurentGerm<F> {
    type Output = LaurentGerm<F>;
    fn sub(self, o: &LaurentGerm<F>) -> LaurentGerm<F> {
        self.combine(o, |a, b| a - b)
    }
}

impl<F: Scalar> Mul for &LaurentGerm<F> {
    type Output = LaurentGerm<F>;
    fn mul(self, o: &LaurentGerm<F>) -> LaurentGerm<F> {
        let v = self.v + o.v;
        // relative precision is the shorter of the two
        let len = match (self.c.len(), o.c.len()) {
            (0, _) | (_, 0) => {
                let prec = (self.v + o.precision()).min(o.v + self.precision());
                return LaurentGerm::zero(prec);
            }
            (a, b) => a.min(b),
        };
        let mut c = vec![F::zero(); len];
        for i in 0..len {
            for j in 0..len - i {
                c[i + j] = c[i + j].clone() + self.c[i].clone() * o.c[j].clone();
            }
        }
        LaurentGerm::from_parts(v, c)
    }
}

impl<F: Scalar> Neg for &LaurentGerm<F> {
    type Output = LaurentGerm<F>;
    fn neg(self) -> LaurentGerm<F> {
        LaurentGerm { v: self.v, c: self.c.iter().map(|x| -x.clone()).collect() }
    }
}

impl<F: Scalar> fmt::Display for LaurentGerm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| format!("({x})t^{}", self.v + k as i64))
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        write!(f, "{body} + O(t^{})", self.precision())
    }
}

/// Matrices over the germ ring.
pub type GermMat<F> = Mat<Germ<F>>;

/// Builds `sum_k M_k t^k` truncated at `order`.
pub fn germ_mat_from_coeffs<F: Scalar>(coeffs: &[Mat<F>], order: usize) -> GermMat<F> {
    let (r, c) = (coeffs[0].rows(), coeffs[0].cols());
    Mat::from_fn(r, c, |i, j| {
        let v: Vec<F> = coeffs.iter().map(|m| m[(i, j)].clone()).collect();
        Germ::from_coeffs(&v, order)
    })
}

/// Coefficient matrix of `t^k`.
pub fn germ_mat_coeff<F: Scalar>(m: &GermMat<F>, k: usize) -> Mat<F> {
    m.map(|g| if k <= g.order() { g.coeff(k) } else { F::zero() })
}

pub fn germ_mat_order<F: Scalar>(m: &GermMat<F>) -> usize {
    m.data().iter().map(|g| g.order()).min().unwrap_or(0)
}

pub fn germ_mat_identity<F: Scalar>(n: usize, order: usize) -> GermMat<F> {
    Mat::from_fn(n, n, |i, j| if i == j { Germ::one(order) } else { Germ::zero(order) })
}

pub fn germ_mat_zeros<F: Scalar>(r: usize, c: usize, order: usize) -> GermMat<F> {
    Mat::from_fn(r, c, |_, _| Germ::zero(order))
}

pub fn germ_mat_mul<F: Scalar>(a: &GermMat<F>, b: &GermMat<F>) -> GermMat<F> {
    assert_eq!(a.cols(), b.rows(), "germ matrix product shape mismatch");
    let order = germ_mat_order(a).min(germ_mat_order(b));
    Mat::from_fn(a.rows(), b.cols(), |i, j| {
        let mut acc = Germ::zero(order);
        for k in 0..a.cols() {
            acc = &acc + &(&a[(i, k)] * &b[(k, j)]);
        }
        acc
    })
}

pub fn germ_mat_add<F: Scalar>(a: &GermMat<F>, b: &GermMat<F>) -> GermMat<F> {
    Mat::from_fn(a.rows(), a.cols(), |i, j| &a[(i, j)] + &b[(i, j)])
}

pub fn germ_mat_sub<F: Scalar>(a: &GermMat<F>, b: &GermMat<F>) -> GermMat<F> {
    Mat::from_fn(a.rows(), a.cols(), |i, j| &a[(i, j)] - &b[(i, j)])
}

/// Involution-adjoint: conjugate every coefficient and transpose.
pub fn germ_mat_adjoint<F: Scalar>(a: &GermMat<F>) -> GermMat<F> {
    Mat::from_fn(a.cols(), a.rows(), |i, j| a[(j, i)].conj())
}

pub fn germ_mat_is_zero<F: Scalar>(a: &GermMat<F>, tol: Tol) -> bool {
    let scale = a.data().iter().map(|g| g.magnitude()).fold(0.0, f64::max).max(1.0);
    a.data().iter().all(|g| g.valuation_in(scale, tol).is_none())
}

/// Determinant via cofactor expansion along the first row. Only used on
/// small matrices.
pub fn germ_mat_det<F: Scalar>(a: &GermMat<F>) -> Germ<F> {
    assert!(a.is_square());
    let n = a.rows();
    let order = germ_mat_order(a);
    match n {
        0 => Germ::one(order),
        1 => a[(0, 0)].clone(),
        _ => {
            let mut acc = Germ::zero(order);
            for j in 0..n {
                let rows: Vec<usize> = (1..n).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let minor = germ_mat_det(&a.select(&rows, &cols));
                let term = &a[(0, j)] * &minor;
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat;
    use num_complex::Complex64;
    use proptest::prelude::*;

    type G = Germ<GaussRat>;

    fn g(v: &[(i64, i64)]) -> G {
        Germ::new(v.iter().map(|&(a, b)| GaussRat::from_ints(a, b)).collect())
    }

    #[test]
    fn polynomial_identity() {
        let a = g(&[(1, 0), (1, 0), (0, 0), (0, 0)]);
        let b = g(&[(1, 0), (-1, 0), (0, 0), (0, 0)]);
        assert_eq!(&a * &b, g(&[(1, 0), (0, 0), (-1, 0), (0, 0)]));
        assert!((&a - &a).is_zero(Tol::default()));
    }

    #[test]
    fn geometric_series() {
        let a = g(&[(1, 0), (-1, 0), (0, 0), (0, 0)]);
        let inv = a.invert(Tol::default()).unwrap();
        assert_eq!(inv.valuation(), 0);
        assert!(inv.coeffs().iter().all(|c| *c == GaussRat::one()));
        let t2 = g(&[(0, 0), (0, 0), (1, 0), (0, 0)]).invert(Tol::default()).unwrap();
        assert_eq!(t2.valuation(), -2);
        assert_eq!(t2.residue(), GaussRat::zero());
    }

    #[test]
    fn circle_residue_float() {
        // i / (exp(2 pi i t) - 1) has residue 1/(2 pi)
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let e = &Germ::exp_linear(&two_pi_i, 8) - &Germ::one(8);
        let inv = e.invert(Tol(1e-12)).unwrap();
        assert_eq!(inv.valuation(), -1);
        assert!((inv.coeff(-1) - 1.0 / two_pi_i).norm() < 1e-14);
        let r = inv.scale(&Complex64::i()).residue();
        assert!((r - Complex64::new(1.0 / (2.0 * std::f64::consts::PI), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_is_indistinguishable() {
        let z = G::zero(3);
        assert_eq!(z.invert(Tol::default()), Err(Error::IndistinguishableFromZero(3)));
    }

    #[test]
    fn principal_part_of_germ_is_zero() {
        let a = LaurentGerm::from_germ(&g(&[(2, 1), (3, 0)]));
        assert_eq!(a.residue(), GaussRat::zero());
        assert!(a.principal_part().is_zero());
        let b = LaurentGerm::from_parts(-2, vec![GaussRat::from_ints(5, 0), GaussRat::from_ints(0, 7), GaussRat::one()]);
        assert_eq!(b.residue(), GaussRat::from_ints(0, 7));
        assert_eq!(b.principal_part().coeffs().len(), 2);
    }

    #[test]
    fn conj_of_exponential() {
        let a = GaussRat::from_ints(0, 2);
        let e = Germ::exp_linear(&a, 6);
        assert_eq!(e.conj(), Germ::exp_linear(&a.conj(), 6));
    }

    fn germ_strategy(order: usize) -> impl Strategy<Value = G> {
        prop::collection::vec((-5i64..=5, -5i64..=5), order + 1).prop_map(|v| g(&v))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in germ_strategy(5), b in germ_strategy(5), c in germ_strategy(5)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn involution_is_multiplicative(a in germ_strategy(4), b in germ_strategy(4)) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        }

        #[test]
        fn inverse_times_self_is_one(a in germ_strategy(5)) {
            prop_assume!(!a.is_zero(Tol::default()));
            let inv = a.invert(Tol::default()).unwrap();
            let prod = &inv * &LaurentGerm::from_germ(&a);
            prop_assert_eq!(prod.valuation(), 0);
            prop_assert_eq!(prod.coeff(0), GaussRat::one());
            for k in 1..prod.precision() {
                prop_assert!(prod.coeff(k).is_zero());
            }
        }

        #[test]
        fn residue_is_linear(a in germ_strategy(4), b in germ_strategy(4), v in -3i64..0) {
            let la = LaurentGerm::from_germ(&a).shift(v);
            let lb = LaurentGerm::from_germ(&b).shift(v);
            let two = GaussRat::from_ints(2, 1);
            let lhs = (&la.scale(&two) + &lb).residue();
            prop_assert_eq!(lhs, la.residue() * two + lb.residue());
            prop_assert!(LaurentGerm::from_germ(&a).residue().is_zero());
        }
    }
}
