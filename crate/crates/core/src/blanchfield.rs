//! Blanchfield pairings over Laurent polynomials and their pushforward to
//! linking forms over the germ ring at a point of the unit circle.
//!
//! For a Seifert matrix `V` the module is `coker A` with `A = tau V - V^T`
//! and the pairing is `B = (1 - tau) A^{-1}`, written here as `B = P A^{-1}`
//! with `P = (1 - tau) I`. Since `A^dagger = -tau^{-1} A`, this `B` is
//! Hermitian for the involution `tau -> tau^{-1}` plus conjugation.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::germ::{Germ, GermMat};
use crate::linkform::{Parity, Route, SignatureProfile, TorsionForm};
use crate::matrix::Mat;
use crate::poly::RatPoly;
use crate::scalar::{Cyclo, GaussRat, Scalar, Tol};
use crate::smith::{smith, CokernelLinking};

/// `sum_k coeffs[k] tau^{low + k}` with Gaussian-rational matrix coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMatrix {
    pub low: i64,
    pub coeffs: Vec<Mat<GaussRat>>,
}

fn embed<F: Scalar>(z: &GaussRat) -> F {
    F::from_rational(&z.re) + F::imag_unit() * F::from_rational(&z.im)
}

impl LaurentMatrix {
    pub fn new(low: i64, coeffs: Vec<Mat<GaussRat>>) -> Result<Self> {
        let (r, c) = coeffs.first().map_or((0, 0), |m| (m.rows(), m.cols()));
        if coeffs.iter().any(|m| m.rows() != r || m.cols() != c) {
            return Err(Error::Dimension("Laurent coefficients differ in shape".into()));
        }
        Ok(LaurentMatrix { low, coeffs })
    }

    pub fn rows(&self) -> usize {
        self.coeffs.first().map_or(0, |m| m.rows())
    }

    pub fn cols(&self) -> usize {
        self.coeffs.first().map_or(0, |m| m.cols())
    }

    fn coeff(&self, k: i64) -> Mat<GaussRat> {
        let idx = k - self.low;
        if idx >= 0 && (idx as usize) < self.coeffs.len() {
            self.coeffs[idx as usize].clone()
        } else {
            Mat::zeros(self.rows(), self.cols())
        }
    }

    fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    /// Conjugate transpose with `tau -> tau^{-1}`.
    pub fn adjoint(&self) -> Self {
        let coeffs = self.coeffs.iter().rev().map(|m| m.adjoint()).collect();
        LaurentMatrix { low: -self.high(), coeffs }
    }

    pub fn mul(&self, o: &LaurentMatrix) -> Self {
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let mut coeffs = vec![Mat::zeros(self.rows(), o.cols()); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        LaurentMatrix { low: self.low + o.low, coeffs }
    }

    pub fn sub(&self, o: &LaurentMatrix) -> Self {
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        LaurentMatrix { low, coeffs: (low..=high).map(|k| self.coeff(k).sub(&o.coeff(k))).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|m| m.data().iter().all(|z| z.is_zero()))
    }

    pub fn eval<F: Scalar>(&self, tau: &F) -> Mat<F> {
        let tau_inv = tau.inv().expect("tau must be nonzero");
        let mut out = Mat::zeros(self.rows(), self.cols());
        for (i, m) in self.coeffs.iter().enumerate() {
            let k = self.low + i as i64;
            let p = pow(tau, &tau_inv, k);
            out = out.add(&m.map(|z| embed::<F>(z) * p.clone()));
        }
        out
    }

    /// Substitution of a germ for `tau`; `tau_k(k)` gives the germ of `tau^k`.
    fn substitute<F: Scalar>(&self, tau_k: &impl Fn(i64) -> Germ<F>, order: usize) -> GermMat<F> {
        let mut out: GermMat<F> = Mat::from_fn(self.rows(), self.cols(), |_, _| Germ::zero(order));
        for (i, m) in self.coeffs.iter().enumerate() {
            let g = tau_k(self.low + i as i64);
            out = Mat::from_fn(self.rows(), self.cols(), |r, c| &out[(r, c)] + &g.scale(&embed::<F>(&m[(r, c)])));
        }
        out
    }
}

fn pow<F: Scalar>(x: &F, x_inv: &F, k: i64) -> F {
    let b = if k < 0 { x_inv } else { x };
    (0..k.unsigned_abs()).fold(F::one(), |acc, _| acc * b.clone())
}

/// A torsion module `coker A` over the Laurent polynomials with pairing
/// `{x, y} = y^dagger P A^{-1} x`.
#[derive(Clone, Debug)]
pub struct LambdaModule {
    pub a: LaurentMatrix,
    pub p: LaurentMatrix,
    pub parity: Parity,
}

impl LambdaModule {
    /// Checks `A^dagger P = eps P^dagger A`, i.e. `B = eps B^dagger`.
    pub fn new(a: LaurentMatrix, p: LaurentMatrix, parity: Parity) -> Result<Self> {
        if a.rows() != a.cols() || p.rows() != a.rows() || p.cols() != a.cols() {
            return Err(Error::Dimension("presentation and pairing must be square of equal size".into()));
        }
        let lhs = a.adjoint().mul(&p);
        let rhs = p.adjoint().mul(&a);
        let ok = match parity {
            Parity::Hermitian => lhs.sub(&rhs).is_zero(),
            Parity::SkewHermitian => {
                let neg = LaurentMatrix { low: rhs.low, coeffs: rhs.coeffs.iter().map(|m| m.neg()).collect() };
                lhs.sub(&neg).is_zero()
            }
        };
        if !ok {
            return Err(Error::BadPairing("pairing is not compatible with the involution".into()));
        }
        Ok(LambdaModule { a, p, parity })
    }

    pub fn rank(&self) -> usize {
        self.a.rows()
    }

    /// Pads with a free summand of rank `k` (zero presentation, zero pairing).
    pub fn with_free_summand(&self, k: usize) -> Self {
        let pad = |m: &LaurentMatrix| LaurentMatrix {
            low: m.low,
            coeffs: m.coeffs.iter().map(|c| Mat::block_diag(&[c, &Mat::zeros(k, k)])).collect(),
        };
        LambdaModule { a: pad(&self.a), p: pad(&self.p), parity: self.parity }
    }

    /// Rank of `A` over the rational functions, certified at enough points.
    pub fn generic_rank(&self) -> usize {
        let n = self.rank();
        let span = (self.a.coeffs.len() * n.max(1)) as i64 + 1;
        (1..=span + 1)
            .map(|x| self.a.eval(&GaussRat::from_ints(x + 1, 0)).rank(Tol::default()))
            .max()
            .unwrap_or(0)
    }

    /// `tau^{-low} det A(tau)` as an exact polynomial.
    pub fn alexander_polynomial(&self) -> RatPoly {
        let n = self.rank();
        if n == 0 {
            return RatPoly::one();
        }
        let deg = (self.a.coeffs.len() - 1) * n;
        let shift = -self.a.low;
        // interpolate det(tau^shift A(tau)) at deg + 1 integer points
        let xs: Vec<BigRational> = (1..=deg as i64 + 1).map(|x| BigRational::from_integer(x.into())).collect();
        let ys: Vec<BigRational> = xs
            .iter()
            .map(|x| {
                let tau = GaussRat::real(x.clone());
                let m = self.a.eval(&tau);
                let scale = pow(&tau, &tau.inv().unwrap(), shift);
                let d = m.map(|z| z.clone() * scale.clone()).det();
                d.to_real_rational().expect("real Seifert data")
            })
            .collect();
        lagrange(&xs, &ys)
    }

    /// `(tau - xi)`-primary part via Smith form in `s = tau - xi`.
    pub fn localize_at<F: Scalar>(&self, xi: &F, order: usize, tol: Tol) -> Result<Localization> {
        if xi.is_zero() {
            return Err(Error::Input("xi must be nonzero".into()));
        }
        // tau^k = xi^k (1 + s / xi)^k as a polynomial germ in s
        let tau_k = |k: i64| -> Germ<F> {
            let base = Germ::from_coeffs(&[xi.clone(), F::one()], order);
            let inv = base.unit_inverse().expect("xi is a unit");
            let b = if k < 0 { &inv } else { &base };
            (0..k.unsigned_abs()).fold(Germ::one(order), |acc, _| &acc * b)
        };
        let s = smith(&self.a.substitute(&tau_k, order), tol);
        s.check_rank(self.generic_rank())?;
        Ok(Localization { dimension: s.torsion_dim(), exponents: s.torsion_orders(), order })
    }

    /// Substitutes `tau = xi exp(i t')` (`t' = 2 pi t` on backends without
    /// `pi`) and returns the linking form on the torsion of the result.
    pub fn pushforward<F: Scalar>(&self, xi: &F, order: usize, tol: Tol) -> Result<Pushforward<F>> {
        let xi_inv = xi.inv().ok_or_else(|| Error::Input("xi must be nonzero".into()))?;
        let speed = match F::pi() {
            Some(pi) => F::from_i64(2) * pi * F::imag_unit(),
            None => F::imag_unit(),
        };
        let tau_k = |k: i64| Germ::exp_linear(&(F::from_i64(k) * speed.clone()), order).scale(&pow(xi, &xi_inv, k));
        let a = self.a.substitute(&tau_k, order);
        let p = self.p.substitute(&tau_k, order);
        let s = smith(&a, tol);
        s.check_rank(self.generic_rank())?;
        if s.exponents.iter().any(|&e| e >= order) {
            return Err(Error::TruncationInsufficient(format!("torsion exponent reaches the truncation order {order}")));
        }
        let linking = CokernelLinking::from_smith(s, &p);
        if !linking.symmetric(self.parity, tol) {
            return Err(Error::BadPairing("pushed-forward pairing lost its symmetry".into()));
        }
        let form = linking.torsion_form(self.parity, tol)?;
        let profile = form.normalized().signature_profile(Route::Both, tol)?;
        Ok(Pushforward { form, profile })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Localization {
    pub dimension: usize,
    pub exponents: Vec<usize>,
    pub order: usize,
}

#[derive(Clone, Debug)]
pub struct Pushforward<F> {
    pub form: TorsionForm<F>,
    pub profile: SignatureProfile,
}

fn lagrange(xs: &[BigRational], ys: &[BigRational]) -> RatPoly {
    let mut out = RatPoly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut term = RatPoly::new(vec![yi.clone()]);
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                let d = xi - xj;
                term = &term * &RatPoly::new(vec![-xj / &d, BigRational::from_integer(1.into()) / &d]);
            }
        }
        out = &out + &term;
    }
    out
}

/// The module of a knot from a Seifert matrix.
pub fn alexander_module(v: &Mat<i64>) -> Result<LambdaModule> {
    let n = v.rows();
    if !v.is_square() {
        return Err(Error::NotSeifert("matrix is not square".into()));
    }
    let q = v.map(|&x| GaussRat::from_ints(x, 0));
    let d = q.sub(&q.transpose()).det();
    if n > 0 && d.norm_sqr() != BigRational::from_integer(1.into()) {
        return Err(Error::NotSeifert(format!("det(V - V^T) = {d}, expected +-1")));
    }
    let a = LaurentMatrix::new(0, vec![q.transpose().neg(), q])?;
    let id: Mat<GaussRat> = Mat::identity(n);
    let p = LaurentMatrix::new(0, vec![id.clone(), id.neg()])?;
    LambdaModule::new(a, p, Parity::Hermitian)
}

/// A point of the unit circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Xi {
    /// `exp(2 pi i p / q)`.
    RootOfUnity(i64, u64),
    /// `exp(i angle)`, angle in radians.
    Angle(f64),
}

impl Xi {
    pub fn root_of_unity(p: i64, q: u64) -> Self {
        let g = p.unsigned_abs().gcd(&q).max(1);
        let (p, q) = (p / g as i64, q / g);
        Xi::RootOfUnity(p.rem_euclid(q as i64), q)
    }

    pub fn angle(&self) -> f64 {
        match *self {
            Xi::RootOfUnity(p, q) => 2.0 * PI * p as f64 / q as f64,
            Xi::Angle(a) => a.rem_euclid(2.0 * PI),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle())
    }
}

impl std::fmt::Display for Xi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Xi::RootOfUnity(p, q) => write!(f, "exp(2 pi i {p}/{q})"),
            Xi::Angle(a) => write!(f, "exp(i {a})"),
        }
    }
}

/// Signature of `(1 - w) V + (1 - conj w) V^T`.
pub fn levine_tristram<F: Scalar>(v: &Mat<i64>, w: &F, tol: Tol) -> Result<i64> {
    let q = v.map(|&x| F::from_i64(x));
    let one = F::one();
    let h = q.scale(&(one.clone() - w.clone())).add(&q.transpose().scale(&(one - w.conj())));
    Ok(F::hermitian_inertia(&h, tol)?.signature())
}

/// Roots of an integer polynomial on the unit circle, exact where they are
/// roots of unity.
pub fn unit_circle_roots(delta: &RatPoly) -> Vec<(Xi, usize)> {
    let Some(deg) = delta.degree() else { return Vec::new() };
    let mut rest = delta.clone();
    let mut out = Vec::new();
    for q in 1..=(2 * deg * deg).max(2) as u64 {
        let phi = RatPoly::cyclotomic(q as u32);
        if phi.degree().unwrap_or(0) > deg {
            continue;
        }
        let mult = rest.multiplicity_of(&phi);
        if mult == 0 {
            continue;
        }
        for _ in 0..mult {
            rest = rest.div_rem(&phi).0;
        }
        for p in 0..q {
            if p.gcd(&q) == 1 {
                out.push((Xi::RootOfUnity(p as i64, q), mult));
            }
        }
    }
    for (factor, mult) in rest.squarefree() {
        for z in complex_roots(&factor) {
            if (z.norm() - 1.0).abs() < 1e-8 {
                out.push((Xi::Angle(z.arg().rem_euclid(2.0 * PI)), mult));
            }
        }
    }
    out.sort_by(|a, b| a.0.angle().total_cmp(&b.0.angle()));
    out
}

fn complex_roots(p: &RatPoly) -> Vec<Complex64> {
    let Some(d) = p.degree() else { return Vec::new() };
    if d == 0 {
        return Vec::new();
    }
    let lead = p.lead().to_f64().unwrap_or(1.0);
    let c: Vec<f64> = p.coeffs().iter().map(|x| x.to_f64().unwrap_or(0.0) / lead).collect();
    let companion = DMatrix::from_fn(d, d, |r, col| {
        if col == d - 1 {
            -c[r]
        } else if r == col + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion.complex_eigenvalues().iter().copied().collect()
}

/// Levine–Tristram signatures just before and after `xi`, shrinking the
/// offset until both sides stabilise.
pub fn lt_jump(v: &Mat<i64>, xi: &Xi, separation: f64, tol: Tol) -> Result<(i64, i64)> {
    let z = xi.to_complex();
    let at = |delta: f64| -> Result<(i64, i64)> {
        let before = levine_tristram(v, &(z * Complex64::from_polar(1.0, -delta)), tol)?;
        let after = levine_tristram(v, &(z * Complex64::from_polar(1.0, delta)), tol)?;
        Ok((before, after))
    };
    let start = (separation / 4.0).min(1e-2);
    let mut prev = at(start)?;
    for k in 1..=6 {
        let cur = at(start * 10f64.powi(-k))?;
        if cur == prev {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::OracleUnstable)
}

/// Global sign relating `2 sum sigma_odd` of the pushforward to the
/// Levine–Tristram jump, fixed by the trefoil at `exp(i pi / 3)`.
pub const JUMP_SIGN: i64 = -1;

#[derive(Clone, Debug, Serialize)]
pub struct RootCheck {
    pub xi: Xi,
    pub multiplicity: usize,
    pub local_dimension: usize,
    pub profile: SignatureProfile,
    pub odd_sum: i64,
    pub lt_before: i64,
    pub lt_after: i64,
    pub lt_jump: i64,
    pub predicted_jump: i64,
    pub agrees: bool,
}

/// Pushforward at a point, exact at roots of unity.
pub fn pushforward_profile(m: &LambdaModule, xi: &Xi, order: usize, tol: Tol) -> Result<(usize, SignatureProfile)> {
    match *xi {
        Xi::RootOfUnity(p, q) => {
            let z = Cyclo::root_of_unity(p, q).ok_or_else(|| Error::Unsupported(format!("root of unity of order {q}")))?;
            let local = m.localize_at(&z, order, tol)?;
            Ok((local.dimension, m.pushforward(&z, order, tol)?.profile))
        }
        Xi::Angle(_) => {
            let z = xi.to_complex();
            let local = m.localize_at(&z, order, tol)?;
            Ok((local.dimension, m.pushforward(&z, order, tol)?.profile))
        }
    }
}

/// Runs the jump test at every unit-circle root of the Alexander polynomial.
pub fn check_seifert(v: &Mat<i64>, tol: Tol) -> Result<Vec<RootCheck>> {
    let m = alexander_module(v)?;
    let roots = unit_circle_roots(&m.alexander_polynomial());
    let angles: Vec<f64> = roots.iter().map(|r| r.0.angle()).collect();
    roots
        .iter()
        .enumerate()
        .map(|(i, (xi, mult))| {
            let sep = angles
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, a)| {
                    let d = (a - angles[i]).rem_euclid(2.0 * PI);
                    d.min(2.0 * PI - d)
                })
                .chain([angles[i].min(2.0 * PI - angles[i])])
                .fold(1.0, f64::min);
            let order = mult + 2;
            let (local_dimension, profile) = pushforward_profile(&m, xi, order, tol)?;
            let (lt_before, lt_after) = lt_jump(v, xi, sep, Tol(1e-9))?;
            let odd_sum = profile.odd_sum();
            let predicted_jump = JUMP_SIGN * 2 * odd_sum;
            Ok(RootCheck {
                xi: xi.clone(),
                multiplicity: *mult,
                local_dimension,
                profile,
                odd_sum,
                lt_before,
                lt_after,
                lt_jump: lt_after - lt_before,
                predicted_jump,
                agrees: predicted_jump == lt_after - lt_before && local_dimension == *mult,
            })
        })
        .collect()
}
