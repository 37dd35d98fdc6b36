//! Finite torsion modules over the germ ring with Hermitian linking forms,
//! and their signature invariants.
//!
//! A form is stored as the pair `(J, G)`: `J` is the nilpotent action of `t`
//! on `T = C^n` and `G` the scalar form, with the convention
//! `[u, v] = v^† G u` (linear in the first slot). The linking form is
//! recovered as `{x, y} = sum_k [J^k x, y] t^{-k-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::germ::LaurentGerm;
use crate::matrix::{Mat, Subspace};
use crate::scalar::{Inertia, Scalar, Tol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Hermitian,
    SkewHermitian,
}

impl Parity {
    /// Parity of a `(-1)^l`-Hermitian form.
    pub fn of_degree(l: usize) -> Self {
        if l.is_multiple_of(2) {
            Parity::Hermitian
        } else {
            Parity::SkewHermitian
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    V,
    W,
    Both,
}

/// The sequences `n_i^+`, `n_i^-`, `sigma_i` for `i = 1, 2, ...`; entry `k`
/// of each vector is index `i = k + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureProfile {
    pub n_plus: Vec<usize>,
    pub n_minus: Vec<usize>,
    pub sigma: Vec<i64>,
    pub stabilization_index: usize,
}

impl SignatureProfile {
    pub fn from_counts(n_plus: Vec<usize>, n_minus: Vec<usize>) -> Self {
        let len = n_plus.len().max(n_minus.len());
        let get = |v: &Vec<usize>, k: usize| v.get(k).copied().unwrap_or(0);
        let last = (0..len).rev().find(|&k| get(&n_plus, k) + get(&n_minus, k) > 0);
        let len = last.map_or(0, |k| k + 1);
        let n_plus: Vec<usize> = (0..len).map(|k| get(&n_plus, k)).collect();
        let n_minus: Vec<usize> = (0..len).map(|k| get(&n_minus, k)).collect();
        let sigma = n_plus.iter().zip(&n_minus).map(|(&p, &m)| p as i64 - m as i64).collect();
        SignatureProfile { n_plus, n_minus, sigma, stabilization_index: len }
    }

    pub fn from_inertias(inertias: &[Inertia]) -> Self {
        SignatureProfile::from_counts(
            inertias.iter().map(|i| i.pos).collect(),
            inertias.iter().map(|i| i.neg).collect(),
        )
    }

    /// Counts from a list of `(order, sign)` summands.
    pub fn from_blocks(blocks: &[(usize, i64)]) -> Self {
        let len = blocks.iter().map(|b| b.0).max().unwrap_or(0);
        let mut p = vec![0; len];
        let mut m = vec![0; len];
        for &(i, s) in blocks {
            assert!(i >= 1 && s != 0);
            if s > 0 {
                p[i - 1] += 1;
            } else {
                m[i - 1] += 1;
            }
        }
        SignatureProfile::from_counts(p, m)
    }

    pub fn empty() -> Self {
        SignatureProfile::default()
    }

    /// `sigma_i`, zero past the stored range.
    pub fn sigma_at(&self, i: usize) -> i64 {
        if i == 0 {
            return 0;
        }
        self.sigma.get(i - 1).copied().unwrap_or(0)
    }

    /// `sum_i i (n_i^+ + n_i^-)`, the complex dimension of the module.
    pub fn total_dim(&self) -> usize {
        self.n_plus.iter().zip(&self.n_minus).enumerate().map(|(k, (p, m))| (k + 1) * (p + m)).sum()
    }

    pub fn odd_sum(&self) -> i64 {
        self.sigma.iter().step_by(2).sum()
    }

    pub fn even_sum(&self) -> i64 {
        self.sigma.iter().skip(1).step_by(2).sum()
    }

    /// `sum sigma_i`.
    pub fn jump_plus(&self) -> i64 {
        self.sigma.iter().sum()
    }

    /// `sum (-1)^i sigma_i`.
    pub fn jump_minus(&self) -> i64 {
        self.even_sum() - self.odd_sum()
    }

    pub fn add(&self, o: &SignatureProfile) -> SignatureProfile {
        let len = self.n_plus.len().max(o.n_plus.len());
        let get = |v: &Vec<usize>, k: usize| v.get(k).copied().unwrap_or(0);
        SignatureProfile::from_counts(
            (0..len).map(|k| get(&self.n_plus, k) + get(&o.n_plus, k)).collect(),
            (0..len).map(|k| get(&self.n_minus, k) + get(&o.n_minus, k)).collect(),
        )
    }

    /// Profile of the form reparametrised by `t -> -t`.
    pub fn time_reversed(&self) -> SignatureProfile {
        let (mut p, mut m) = (self.n_plus.clone(), self.n_minus.clone());
        for k in (0..p.len()).step_by(2) {
            std::mem::swap(&mut p[k], &mut m[k]);
        }
        SignatureProfile::from_counts(p, m)
    }
}

/// One stage of the V-route: the form `l_i(x, y) = [J^{i-1} x, y]` on
/// `T_i = ker J^i`.
#[derive(Clone, Debug)]
pub struct VStage<F> {
    pub i: usize,
    pub inertia: Inertia,
    /// Radical of `l_i` inside `T_i`.
    pub radical: Subspace<F>,
    /// `T_{i-1} + t T_{i+1}`, which the radical must equal.
    pub expected_radical: Subspace<F>,
}

/// One stage of the W-route: `lambda_i` on `W_i = J^{i-1}(T_i)`.
#[derive(Clone, Debug)]
pub struct WStage<F> {
    pub i: usize,
    pub inertia: Inertia,
    pub w: Subspace<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorsionForm<F> {
    j: Mat<F>,
    g: Mat<F>,
    parity: Parity,
}

impl<F: Scalar> TorsionForm<F> {
    /// Validates and builds a form.
    pub fn new(j: Mat<F>, g: Mat<F>, parity: Parity, tol: Tol) -> Result<Self> {
        let n = j.rows();
        if !j.is_square() || !g.is_square() || g.rows() != n {
            return Err(Error::dim(format!(
                "J is {}x{}, G is {}x{}",
                j.rows(),
                j.cols(),
                g.rows(),
                g.cols()
            )));
        }
        if !j.pow(n).is_zero_rel(j.max_magnitude().max(1.0).powi(n as i32), tol) {
            return Err(Error::NotNilpotent);
        }
        match parity {
            Parity::Hermitian if !g.is_hermitian(tol) => return Err(Error::NotHermitian),
            Parity::SkewHermitian if !g.is_skew_hermitian(tol) => return Err(Error::NotSkew),
            _ => {}
        }
        if g.rank(tol) < n {
            return Err(Error::Degenerate);
        }
        if !g.mul(&j).approx_eq(&j.adjoint().mul(&g), tol) {
            return Err(Error::NotSelfAdjoint);
        }
        Ok(TorsionForm { j, g, parity })
    }

    pub fn zero(parity: Parity) -> Self {
        TorsionForm { j: Mat::zeros(0, 0), g: Mat::zeros(0, 0), parity }
    }

    /// `O/t^i` with `{x, x} = c t^{-i}`; `c` must be real and nonzero.
    pub fn block(i: usize, c: F) -> Result<Self> {
        if i == 0 {
            return Err(Error::Input("block order must be at least 1".into()));
        }
        if c.is_zero() || c.real_sign().is_err() || !(c.clone() - c.conj()).negligible(c.magnitude(), Tol::default()) {
            return Err(Error::Input(format!("block coefficient must be real and nonzero, got {c}")));
        }
        let j = Mat::from_fn(i, i, |r, col| if r == col + 1 { F::one() } else { F::zero() });
        let g = Mat::from_fn(i, i, |b, a| if a + b + 1 == i { c.clone() } else { F::zero() });
        Ok(TorsionForm { j, g, parity: Parity::Hermitian })
    }

    /// Hyperbolic pair on `(O/t^i)^2`: `{a, b} = t^{-i}`, `{a, a} = {b, b} = 0`.
    /// Basis: `a, ta, ..., t^{i-1}a, b, ..., t^{i-1}b`.
    pub fn hyperbolic(i: usize) -> Self {
        let n = 2 * i;
        let j = Mat::from_fn(n, n, |r, c| {
            if r == c + 1 && c + 1 != i {
                F::one()
            } else {
                F::zero()
            }
        });
        // [t^p a, t^q b] = 1 when p + q = i - 1, and symmetrically.
        let g = Mat::from_fn(n, n, |row, col| {
            let (ra, rb) = (row < i, col < i);
            if ra != rb && (row % i) + (col % i) + 1 == i {
                F::one()
            } else {
                F::zero()
            }
        });
        TorsionForm { j, g, parity: Parity::Hermitian }
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    pub fn j(&self) -> &Mat<F> {
        &self.j
    }

    pub fn g(&self) -> &Mat<F> {
        &self.g
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Smallest `k` with `J^k = 0`.
    pub fn nilpotency_index(&self, tol: Tol) -> usize {
        let n = self.dim();
        let mut p = Mat::identity(n);
        for k in 0..=n {
            if p.is_zero_rel(self.j.max_magnitude().max(1.0).powi(k as i32), tol) {
                return k;
            }
            p = p.mul(&self.j);
        }
        n
    }

    /// `[x, y] = y^† G x`.
    pub fn scalar(&self, x: &[F], y: &[F]) -> F {
        let gx = self.g.mul_vec(x);
        y.iter().zip(gx).fold(F::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// `{x, y}` as a principal part.
    pub fn linking(&self, x: &[F], y: &[F]) -> LaurentGerm<F> {
        let n = self.dim();
        if n == 0 {
            return LaurentGerm::zero(0);
        }
        let mut jx = x.to_vec();
        let mut c = vec![F::zero(); n];
        for k in 0..n {
            // t^{-k-1} sits at position n-1-k counting up from t^{-n}
            c[n - 1 - k] = self.scalar(&jx, y);
            jx = self.j.mul_vec(&jx);
        }
        LaurentGerm::from_parts(-(n as i64), c)
    }

    pub fn direct_sum(&self, o: &TorsionForm<F>) -> Result<Self> {
        if self.parity != o.parity {
            return Err(Error::ParityMismatch);
        }
        Ok(TorsionForm {
            j: Mat::block_diag(&[&self.j, &o.j]),
            g: Mat::block_diag(&[&self.g, &o.g]),
            parity: self.parity,
        })
    }

    /// Multiplies a skew form by `i`.
    pub fn skew_to_hermitian(&self) -> Result<Self> {
        if self.parity == Parity::Hermitian {
            return Err(Error::AlreadyHermitian);
        }
        Ok(TorsionForm { j: self.j.clone(), g: self.g.scale(&F::imag_unit()), parity: Parity::Hermitian })
    }

    /// Converts skew forms, leaves Hermitian forms alone.
    pub fn normalized(&self) -> Self {
        match self.parity {
            Parity::Hermitian => self.clone(),
            Parity::SkewHermitian => self.skew_to_hermitian().expect("skew form"),
        }
    }

    /// Transports the scalar form along an automorphism `M` of the module
    /// (`M J = J M`, `M` invertible): `G' = M^† G M`.
    pub fn transform(&self, m: &Mat<F>, tol: Tol) -> Result<Self> {
        if m.rows() != self.dim() || !m.is_square() {
            return Err(Error::dim("automorphism has the wrong size"));
        }
        if !m.mul(&self.j).approx_eq(&self.j.mul(m), tol) {
            return Err(Error::NotOInvertible("does not commute with t".into()));
        }
        if m.rank(tol) < self.dim() {
            return Err(Error::NotOInvertible("not invertible".into()));
        }
        Ok(TorsionForm { j: self.j.clone(), g: m.adjoint().mul(&self.g).mul(m), parity: self.parity })
    }

    /// Congruence by `P = sum_k P_k t^k`, acting on `T` as `sum_k P_k J^k`.
    pub fn congruence(&self, p: &[Mat<F>], tol: Tol) -> Result<Self> {
        let n = self.dim();
        if p.is_empty() {
            return Ok(self.clone());
        }
        if p.iter().any(|pk| pk.rows() != n || pk.cols() != n) {
            return Err(Error::dim("congruence coefficients have the wrong size"));
        }
        if p[0].rank(tol) < n {
            return Err(Error::NotOInvertible("constant term is singular".into()));
        }
        let mut m = Mat::zeros(n, n);
        let mut jk = Mat::identity(n);
        for pk in p {
            m = m.add(&pk.mul(&jk));
            jk = jk.mul(&self.j);
        }
        self.transform(&m, tol)
    }

    /// Rewrites the form in a new basis: `J' = S^{-1} J S`, `G' = S^† G S`.
    pub fn change_basis(&self, s: &Mat<F>, tol: Tol) -> Result<Self> {
        let inv = s.inverse(tol).ok_or_else(|| Error::NotOInvertible("singular basis change".into()))?;
        Ok(TorsionForm {
            j: inv.mul(&self.j).mul(s),
            g: s.adjoint().mul(&self.g).mul(s),
            parity: self.parity,
        })
    }

    /// A basis of the module endomorphisms, `{M : M J = J M}`.
    pub fn commutant_basis(&self, tol: Tol) -> Vec<Mat<F>> {
        let n = self.dim();
        // vec(MJ - JM) as a linear map on the n^2 entries of M (row-major)
        let op = Mat::from_fn(n * n, n * n, |row, col| {
            let (r, c) = (row / n, row % n);
            let (a, b) = (col / n, col % n);
            let mut v = F::zero();
            if a == r {
                v = v + self.j[(b, c)].clone();
            }
            if b == c {
                v = v - self.j[(r, a)].clone();
            }
            v
        });
        let ker = op.nullspace(tol);
        (0..ker.cols()).map(|k| Mat::from_vec(n, n, ker.col(k))).collect()
    }

    /// Signature profile by the chosen route. Skew forms must be converted
    /// first.
    pub fn signature_profile(&self, route: Route, tol: Tol) -> Result<SignatureProfile> {
        if self.parity == Parity::SkewHermitian {
            return Err(Error::SkewInput);
        }
        match route {
            Route::V => Ok(self.profile_of(self.v_stages(tol)?.iter().map(|s| s.inertia))),
            Route::W => Ok(self.profile_of(self.w_stages(tol)?.iter().map(|s| s.inertia))),
            Route::Both => {
                let v = self.signature_profile(Route::V, tol)?;
                let w = self.signature_profile(Route::W, tol)?;
                if v != w {
                    return Err(Error::RouteDisagreement(format!(
                        "V-route sigma {:?}, W-route sigma {:?}",
                        v.sigma, w.sigma
                    )));
                }
                Ok(v)
            }
        }
    }

    fn profile_of(&self, it: impl Iterator<Item = Inertia>) -> SignatureProfile {
        let v: Vec<Inertia> = it.collect();
        SignatureProfile::from_inertias(&v)
    }

    /// Kernels `T_i = ker J^i` for `i = 0..=n+1`.
    fn kernels(&self, tol: Tol) -> Vec<Subspace<F>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n + 2);
        let mut p = Mat::identity(n);
        for _ in 0..=n + 1 {
            out.push(Subspace::kernel(&p, tol));
            p = p.mul(&self.j);
        }
        out
    }

    pub fn v_stages(&self, tol: Tol) -> Result<Vec<VStage<F>>> {
        let n = self.dim();
        let t = self.kernels(tol);
        let mut out = Vec::new();
        let mut jpow = Mat::identity(n);
        for (i, ti) in t.iter().enumerate().take(n + 1).skip(1) {
            let b = ti.basis();
            let h = b.adjoint().mul(&self.g).mul(&jpow).mul(b);
            let inertia = h.inertia(tol)?;
            let radical = Subspace::span(&b.mul(&h.nullspace(tol)), tol);
            let expected_radical = t[i - 1].sum(&t[i + 1].image(&self.j, tol), tol);
            out.push(VStage { i, inertia, radical, expected_radical });
            jpow = jpow.mul(&self.j);
        }
        Ok(out)
    }

    pub fn w_stages(&self, tol: Tol) -> Result<Vec<WStage<F>>> {
        let n = self.dim();
        let t = self.kernels(tol);
        let mut out = Vec::new();
        let mut jpow = Mat::identity(n);
        for (i, ti) in t.iter().enumerate().take(n + 1).skip(1) {
            let b = ti.basis();
            let img = jpow.mul(b);
            let cols = img.independent_cols(tol);
            let w = img.select_cols(&cols);
            let a = b.select_cols(&cols);
            let h = w.adjoint().mul(&self.g).mul(&a);
            let inertia = h.inertia(tol)?;
            out.push(WStage { i, inertia, w: Subspace::from_basis(w) });
            jpow = jpow.mul(&self.j);
        }
        Ok(out)
    }

    fn is_submodule(&self, s: &Subspace<F>, tol: Tol) -> bool {
        s.contains(&s.image(&self.j, tol), tol)
    }

    fn is_isotropic(&self, s: &Subspace<F>, tol: Tol) -> bool {
        let b = s.basis();
        let gram = b.adjoint().mul(&self.g).mul(b);
        gram.approx_eq(&Mat::zeros(gram.rows(), gram.cols()), tol)
    }

    /// True iff `T = A + B` is a direct sum of submodules on which the
    /// linking form vanishes.
    pub fn is_hyperbolic_witness(&self, a: &Subspace<F>, b: &Subspace<F>, tol: Tol) -> bool {
        let n = self.dim();
        a.ambient() == n
            && b.ambient() == n
            && a.dim() + b.dim() == n
            && a.sum(b, tol).dim() == n
            && self.is_submodule(a, tol)
            && self.is_submodule(b, tol)
            && self.is_isotropic(a, tol)
            && self.is_isotropic(b, tol)
    }

    /// True iff `L` is a half-dimensional isotropic submodule.
    pub fn is_lagrangian(&self, l: &Subspace<F>, tol: Tol) -> bool {
        l.ambient() == self.dim()
            && 2 * l.dim() == self.dim()
            && self.is_submodule(l, tol)
            && self.is_isotropic(l, tol)
    }
}

impl<F: Scalar> Mat<F> {
    /// Zero test against an explicit scale.
    pub fn is_zero_rel(&self, scale: f64, tol: Tol) -> bool {
        self.data().iter().all(|x| x.negligible(scale, tol))
    }
}
