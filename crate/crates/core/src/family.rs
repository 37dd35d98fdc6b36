//! Polynomial families `D(t) = D_0 + t D_1 + ... + t^d D_d` of Hermitian
//! matrices: the kernel sequence, eigenvalue branches, the analytic linking
//! form, jump formulas and the exact signature oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::germ::germ_mat_from_coeffs;
use crate::linkform::{Parity, SignatureProfile, TorsionForm};
use crate::matrix::{Mat, Subspace};
use crate::poly::{Poly, RatPoly};
use crate::scalar::{Inertia, Scalar, Tol};
use crate::smith::CokernelLinking;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianFamily<F> {
    coeffs: Vec<Mat<F>>,
    /// `Some(N)` for a non-polynomial family known only through `D_0..D_N`.
    truncated: Option<usize>,
}

/// One step of the kernel sequence.
#[derive(Clone, Debug)]
pub struct KernelStage<F> {
    pub i: usize,
    /// `W_i`, in the coordinates of the reduced family.
    pub w: Subspace<F>,
    /// Gram matrix of `lambda_i` on the basis of `W_i`.
    pub gram: Mat<F>,
    pub inertia: Inertia,
}

#[derive(Clone, Debug)]
pub struct KernelSequence<F> {
    pub sigma_dim: usize,
    /// Branches that vanish identically but are not constant vectors of the
    /// common kernel.
    pub null_branches: usize,
    pub stages: Vec<KernelStage<F>>,
    pub profile: SignatureProfile,
}

impl<F> KernelSequence<F> {
    /// `dim W_i` for `i = 1, 2, ...` through the first stage past the last
    /// nonzero form.
    pub fn w_dims(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.inertia.pos + s.inertia.neg + s.inertia.zero).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchProfile {
    /// `(order, leading sign)` of every branch vanishing at 0 but not
    /// identically, sorted.
    pub branches: Vec<(usize, i64)>,
    pub identically_zero: usize,
    pub nonzero_positive: usize,
    pub nonzero_negative: usize,
}

impl BranchProfile {
    pub fn total(&self) -> usize {
        self.branches.len() + self.identically_zero + self.nonzero_positive + self.nonzero_negative
    }

    pub fn profile(&self) -> SignatureProfile {
        SignatureProfile::from_blocks(&self.branches)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Scale `10^{-k}` at which two consecutive evaluations agreed.
    pub k: u32,
    pub eta_plus: i64,
    pub eta_minus: i64,
    pub jump_plus: i64,
    pub jump_minus: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpReport {
    pub eta0: i64,
    pub jump_plus: i64,
    pub jump_minus: i64,
    pub flow: i64,
    pub profile: SignatureProfile,
    pub oracle: OracleResult,
    pub oracle_agreement: bool,
}

impl<F: Scalar> HermitianFamily<F> {
    pub fn new(coeffs: Vec<Mat<F>>, tol: Tol) -> Result<Self> {
        Self::build(coeffs, None, tol)
    }

    /// A non-polynomial family given through its first `N + 1` Taylor
    /// coefficients.
    pub fn truncated(coeffs: Vec<Mat<F>>, tol: Tol) -> Result<Self> {
        let n = coeffs.len().saturating_sub(1);
        Self::build(coeffs, Some(n), tol)
    }

    fn build(coeffs: Vec<Mat<F>>, truncated: Option<usize>, tol: Tol) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::Input("a family needs at least one coefficient".into()));
        };
        let n = first.rows();
        for (k, d) in coeffs.iter().enumerate() {
            if d.rows() != n || d.cols() != n {
                return Err(Error::dim(format!("coefficient {k} is {}x{}, expected {n}x{n}", d.rows(), d.cols())));
            }
            if !d.is_hermitian(tol) {
                return Err(Error::NotHermitian);
            }
        }
        let mut coeffs = coeffs;
        if truncated.is_none() {
            while coeffs.len() > 1 && coeffs.last().unwrap().is_zero_rel(1.0, tol) {
                coeffs.pop();
            }
        }
        Ok(HermitianFamily { coeffs, truncated })
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].rows()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Mat<F>] {
        &self.coeffs
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncated
    }

    /// `D_k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Mat<F> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Mat::zeros(self.dim(), self.dim()))
    }

    pub fn eval(&self, t0: &F) -> Mat<F> {
        let mut acc = Mat::zeros(self.dim(), self.dim());
        for d in self.coeffs.iter().rev() {
            acc = acc.scale(t0).add(d);
        }
        acc
    }

    fn with_coeffs(&self, coeffs: Vec<Mat<F>>) -> Self {
        HermitianFamily { coeffs, truncated: self.truncated }
    }

    /// `D(-t)`.
    pub fn time_reversed(&self) -> Self {
        self.rescaled(&-F::one())
    }

    /// `D(c t)`.
    pub fn rescaled(&self, c: &F) -> Self {
        let mut p = F::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for d in &self.coeffs {
            out.push(d.scale(&p));
            p = p * c.clone();
        }
        self.with_coeffs(out)
    }

    /// `S^† D(t) S` for a constant matrix `S`.
    pub fn congruent(&self, s: &Mat<F>) -> Self {
        let sa = s.adjoint();
        self.with_coeffs(self.coeffs.iter().map(|d| sa.mul(d).mul(s)).collect())
    }

    /// `U(t)^† D(t) U(t)` for a polynomial matrix `U`.
    pub fn congruent_poly(&self, u: &[Mat<F>]) -> Self {
        let n = self.dim();
        let deg = self.degree() + 2 * (u.len() - 1);
        let mut out = vec![Mat::zeros(n, n); deg + 1];
        for (a, ua) in u.iter().enumerate() {
            for (b, d) in self.coeffs.iter().enumerate() {
                let left = ua.adjoint().mul(d);
                for (c, uc) in u.iter().enumerate() {
                    out[a + b + c] = out[a + b + c].add(&left.mul(uc));
                }
            }
        }
        let mut f = self.with_coeffs(out);
        if f.truncated.is_none() {
            while f.coeffs.len() > 1 && f.coeffs.last().unwrap().is_zero_rel(1.0, Tol::default()) {
                f.coeffs.pop();
            }
        }
        f
    }

    /// `Sigma`, the common kernel of all coefficients.
    pub fn common_kernel(&self, tol: Tol) -> Subspace<F> {
        let stacked = self.coeffs.iter().skip(1).fold(self.coeffs[0].clone(), |acc, d| acc.vstack(d));
        Subspace::kernel(&stacked, tol)
    }

    /// Compression to the orthogonal complement of `Sigma`. This is a
    /// constant congruence of `D` with `D' + 0`, so nothing is lost.
    pub fn reduced(&self, tol: Tol) -> (Self, Subspace<F>) {
        let sigma = self.common_kernel(tol);
        if sigma.dim() == 0 {
            return (self.clone(), sigma);
        }
        let q = sigma.orthogonal_complement(tol);
        (self.congruent(q.basis()), sigma)
    }

    /// The reduced family used by the algorithms. A truncated family is not
    /// reduced: a common kernel of finitely many Taylor coefficients says
    /// nothing about the later ones.
    fn working(&self, tol: Tol) -> (Self, Subspace<F>) {
        match self.truncated {
            Some(_) => (self.clone(), Subspace::zero(self.dim())),
            None => self.reduced(tol),
        }
    }

    /// Rank over the field of fractions, certified by evaluating at
    /// `n d + 1` distinct points.
    pub fn generic_rank(&self, tol: Tol) -> usize {
        let pts = self.dim() * self.degree() + 1;
        (1..=pts as i64).map(|k| self.eval(&F::from_i64(k)).rank(tol)).max().unwrap_or(0)
    }

    /// Block-Toeplitz matrix of the first `i` coefficient equations of
    /// `D(t) beta(t) = O(t^i)`, unknowns `beta_0..beta_{i-1}`.
    fn toeplitz(&self, i: usize) -> Mat<F> {
        let n = self.dim();
        let mut m = Mat::zeros(i * n, i * n);
        for row in 0..i {
            for col in 0..=row {
                let d = self.coeff(row - col);
                for r in 0..n {
                    for c in 0..n {
                        m[(row * n + r, col * n + c)] = d[(r, c)].clone();
                    }
                }
            }
        }
        m
    }

    /// `W_i` together with a completion for each basis vector (columns of
    /// length `i n`).
    fn w_space(&self, i: usize, tol: Tol) -> (Mat<F>, Mat<F>) {
        let n = self.dim();
        let null = self.toeplitz(i).nullspace(tol);
        let head: Vec<usize> = (0..n).collect();
        let all: Vec<usize> = (0..null.cols()).collect();
        let proj = null.select(&head, &all);
        let idx = proj.independent_cols(tol);
        (proj.select_cols(&idx), null.select_cols(&idx))
    }

    /// Gram matrix of `lambda_i` for basis vectors `x` with completions.
    fn lambda_gram(&self, i: usize, x: &Mat<F>, completions: &Mat<F>) -> Mat<F> {
        let n = self.dim();
        let m = x.cols();
        let mut alpha = Mat::zeros(n, m);
        for s in 0..i {
            let d = self.coeff(i - s);
            let rows: Vec<usize> = (s * n..(s + 1) * n).collect();
            let cols: Vec<usize> = (0..m).collect();
            alpha = alpha.add(&d.mul(&completions.select(&rows, &cols)));
        }
        // H[b][a] = lambda(x_a, x_b) = alpha_b^† x_a
        alpha.adjoint().mul(x)
    }

    /// The filtration `W_i` of `ker D_0 / Sigma` and the forms `lambda_i`.
    pub fn kernel_sequence(&self, tol: Tol) -> Result<KernelSequence<F>> {
        let (red, sigma) = self.working(tol);
        let n = red.dim();
        let null_branches = match self.truncated {
            Some(_) => 0,
            None => n - red.generic_rank(tol),
        };
        let cap = match self.truncated {
            Some(order) => order,
            None => n * red.degree().max(1) + 1,
        };
        let mut stages = Vec::new();
        let (mut w, mut comp) = red.w_space(1, tol);
        let mut i = 1;
        while w.cols() > null_branches {
            if i > cap {
                return Err(Error::TruncationInsufficient(format!(
                    "W_{i} still has dimension {} after using all {} known coefficients",
                    w.cols(),
                    red.coeffs.len()
                )));
            }
            let gram = red.lambda_gram(i, &w, &comp);
            let inertia = gram.inertia(tol)?;
            stages.push(KernelStage { i, w: Subspace::from_basis(w), gram, inertia });
            let next = red.w_space(i + 1, tol);
            w = next.0;
            comp = next.1;
            i += 1;
        }
        let inertias: Vec<Inertia> = stages.iter().map(|s| s.inertia).collect();
        Ok(KernelSequence {
            sigma_dim: sigma.dim(),
            null_branches,
            stages,
            profile: SignatureProfile::from_inertias(&inertias),
        })
    }

    /// `D_1` compressed to `ker D_0 / Sigma`, and its signature.
    pub fn first_form(&self, tol: Tol) -> Result<(Mat<F>, i64)> {
        let (red, _) = self.working(tol);
        let b = red.coeffs[0].nullspace(tol);
        let f = b.adjoint().mul(&red.coeff(1)).mul(&b);
        let sig = f.inertia(tol)?.signature();
        Ok((f, sig))
    }

    /// Signature of `D(t_0)`.
    pub fn signature_at(&self, t0: &F, tol: Tol) -> Result<i64> {
        Ok(self.eval(t0).inertia(tol)?.signature())
    }

    /// Signatures of `D(+-10^{-k})` for `k = 1..=12`, accepted at the first
    /// two consecutive scales that agree.
    pub fn oracle(&self, tol: Tol) -> Result<OracleResult> {
        let eta0 = self.coeffs[0].inertia(tol)?.signature();
        let mut prev: Option<(i64, i64)> = None;
        for k in 1..=12u32 {
            let eps = F::from_rational(&BigRational::new(BigInt::one(), BigInt::from(10).pow(k)));
            let cur = (self.signature_at(&eps, tol)?, self.signature_at(&-eps, tol)?);
            if prev == Some(cur) {
                return Ok(OracleResult {
                    k: k - 1,
                    eta_plus: cur.0,
                    eta_minus: cur.1,
                    jump_plus: cur.0 - eta0,
                    jump_minus: cur.1 - eta0,
                });
            }
            prev = Some(cur);
        }
        Err(Error::OracleUnstable)
    }

    pub fn jumps(&self, tol: Tol) -> Result<JumpReport> {
        let ks = self.kernel_sequence(tol)?;
        let p = ks.profile;
        let eta0 = self.coeffs[0].inertia(tol)?.signature();
        let oracle = self.oracle(tol)?;
        let (jump_plus, jump_minus) = (p.jump_plus(), p.jump_minus());
        Ok(JumpReport {
            eta0,
            jump_plus,
            jump_minus,
            flow: 2 * p.odd_sum(),
            oracle_agreement: oracle.jump_plus == jump_plus && oracle.jump_minus == jump_minus,
            oracle,
            profile: p,
        })
    }

    /// The linking form on the torsion of `coker D(t)` over the germ ring,
    /// `{x, y} = (D^{-1} x, y)`, computed by Smith reduction of the reduced
    /// family.
    pub fn analytic_linking_form(&self, tol: Tol) -> Result<TorsionForm<F>> {
        let (red, _) = self.working(tol);
        let n = red.dim();
        if n == 0 {
            return Ok(TorsionForm::zero(Parity::Hermitian));
        }
        let order = match self.truncated {
            Some(order) => order,
            None => n * red.degree() + 1,
        };
        let a = germ_mat_from_coeffs(&red.coeffs, order);
        let id = crate::germ::germ_mat_identity(n, order);
        let cl = CokernelLinking::compute(&a, &id, tol)?;
        if self.truncated.is_none() {
            cl.smith.check_rank(red.generic_rank(tol))?;
        } else if cl.smith.rank() < n {
            return Err(Error::TruncationInsufficient(format!(
                "{} invariant factors vanish to order {order}",
                n - cl.smith.rank()
            )));
        }
        if let Some(&k) = cl.smith.exponents.iter().max() {
            if k >= order {
                return Err(Error::TruncationInsufficient(format!("torsion order {k} reaches the truncation")));
            }
        }
        cl.torsion_form(Parity::Hermitian, tol)
    }

    /// `det(lambda I - D(t))` as polynomials in `t`, coefficient `j` of the
    /// list multiplying `lambda^j`.
    pub fn charpoly(&self) -> Vec<Poly<F>> {
        let n = self.dim();
        let a: Mat<Poly<F>> = Mat::from_fn(n, n, |r, c| {
            Poly::new(self.coeffs.iter().map(|d| d[(r, c)].clone()).collect())
        });
        let mul = |x: &Mat<Poly<F>>, y: &Mat<Poly<F>>| {
            Mat::from_fn(n, n, |r, c| (0..n).fold(Poly::zero(), |acc, k| &acc + &(&x[(r, k)] * &y[(k, c)])))
        };
        let mut out = vec![Poly::zero(); n + 1];
        out[n] = Poly::constant(F::one());
        let mut m: Mat<Poly<F>> = Mat::from_fn(n, n, |_, _| Poly::zero());
        for k in 1..=n {
            let mut am = mul(&a, &m);
            for d in 0..n {
                am[(d, d)] = &am[(d, d)] + &out[n - k + 1];
            }
            m = am;
            let amk = mul(&a, &m);
            let tr = (0..n).fold(Poly::zero(), |acc, d| &acc + &amk[(d, d)]);
            out[n - k] = tr.scale(&F::from_ratio(-1, k as i64));
        }
        out
    }

    /// Orders and leading signs of the eigenvalue branches through 0, from
    /// the Newton polygon of the characteristic polynomial.
    pub fn branch_profile(&self) -> Result<BranchProfile> {
        let n = self.dim();
        let cp = self.charpoly();
        let mut rat: Vec<RatPoly> = Vec::with_capacity(n + 1);
        for p in &cp {
            let c = p
                .coeffs()
                .iter()
                .map(|x| {
                    x.to_real_rational().ok_or_else(|| {
                        if F::EXACT {
                            Error::NotHermitian
                        } else {
                            Error::Unsupported("branch_profile needs an exact backend".into())
                        }
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rat.push(RatPoly::new(c));
        }
        let m = rat.iter().position(|p| !p.is_zero()).unwrap_or(n);
        let j0 = rat.iter().position(|p| !p.coeff(0).is_zero()).unwrap_or(n);
        // characteristic polynomial at t = 0 without its zero roots
        let at0 = RatPoly::new((j0..=n).map(|j| rat[j].coeff(0)).collect());
        let (nonzero_positive, nonzero_negative) = at0.real_root_signs();
        if nonzero_positive + nonzero_negative != n - j0 {
            return Err(Error::NonRealLeadingCoefficient(0));
        }
        // lower hull of (j, v_j) for j = m..=j0
        let pts: Vec<(i64, i64)> = (m..=j0)
            .filter(|&j| !rat[j].is_zero())
            .map(|j| (j as i64, rat[j].valuation().unwrap() as i64))
            .collect();
        let mut hull: Vec<(i64, i64)> = Vec::new();
        for &p in &pts {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // drop b unless it lies strictly below the segment a-p
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let mut branches = Vec::new();
        for e in hull.windows(2) {
            let ((j1, v1), (j2, v2)) = (e[0], e[1]);
            let (num, den) = (v1 - v2, j2 - j1);
            if num % den != 0 {
                return Err(Error::NonIntegerBranchOrder(num, den));
            }
            let s = num / den;
            let edge: Vec<BigRational> = (j1..=j2)
                .map(|j| {
                    let v = v1 - s * (j - j1);
                    rat[j as usize].coeff(v as usize)
                })
                .collect();
            let edge = RatPoly::new(edge);
            let (pos, neg) = edge.real_root_signs();
            if (pos + neg) as i64 != den {
                return Err(Error::NonRealLeadingCoefficient(s));
            }
            branches.extend(std::iter::repeat_n((s as usize, 1), pos));
            branches.extend(std::iter::repeat_n((s as usize, -1), neg));
        }
        branches.sort();
        debug_assert!(rat[m].coeffs().iter().any(|c| !c.is_zero()));
        Ok(BranchProfile { branches, identically_zero: m, nonzero_positive, nonzero_negative })
    }
}

/// `ord_t det` of the compression of a family to the complement of its common
/// kernel, for families without null branches.
pub fn det_valuation<F: Scalar>(f: &HermitianFamily<F>, tol: Tol) -> Option<usize> {
    let (red, _) = f.reduced(tol);
    if red.dim() == 0 {
        return Some(0);
    }
    let cp = red.charpoly();
    // det D = (-1)^n cp(0)
    cp[0].valuation()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkform::Route;
    use crate::scalar::GaussRat;
    use proptest::prelude::*;

    type Q = GaussRat;
    const TOL: Tol = Tol(1e-9);

    fn q(a: i64) -> Q {
        Q::from_ints(a, 0)
    }

    fn mat(rows: &[&[i64]]) -> Mat<Q> {
        let n = rows[0].len();
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(), n).unwrap()
    }

    /// diag(t, t^2, -t^3)
    fn diag_example() -> HermitianFamily<Q> {
        let mut c = vec![Mat::zeros(3, 3); 4];
        c[1][(0, 0)] = q(1);
        c[2][(1, 1)] = q(1);
        c[3][(2, 2)] = q(-1);
        HermitianFamily::new(c, TOL).unwrap()
    }

    #[test]
    fn diagonal_family() {
        let f = diag_example();
        assert_eq!(f.common_kernel(TOL).dim(), 0);
        let ks = f.kernel_sequence(TOL).unwrap();
        assert_eq!(ks.profile.sigma, vec![1, 1, -1]);
        let r = f.jumps(TOL).unwrap();
        assert_eq!((r.jump_plus, r.jump_minus, r.flow), (1, 1, 0));
        assert!(r.oracle_agreement);
        assert_eq!(f.signature_at(&Q::from_ratio(1, 10), TOL).unwrap(), 1);
        assert_eq!(f.signature_at(&Q::from_ratio(-1, 10), TOL).unwrap(), 1);
        let b = f.branch_profile().unwrap();
        assert_eq!(b.branches, vec![(1, 1), (2, 1), (3, -1)]);
        let lf = f.analytic_linking_form(TOL).unwrap();
        assert_eq!(lf.signature_profile(Route::Both, TOL).unwrap().sigma, vec![1, 1, -1]);
        assert_eq!(lf.dim(), 6);
        assert_eq!(det_valuation(&f, TOL), Some(6));
    }

    #[test]
    fn off_diagonal_example() {
        // [[0, t], [t, t]]
        let f = HermitianFamily::new(vec![mat(&[&[0, 0], &[0, 0]]), mat(&[&[0, 1], &[1, 1]])], TOL).unwrap();
        let ks = f.kernel_sequence(TOL).unwrap();
        assert_eq!(ks.stages.len(), 1);
        assert_eq!(ks.stages[0].gram, mat(&[&[0, 1], &[1, 1]]));
        assert_eq!(ks.profile.sigma, vec![0]);
        assert_eq!(ks.profile.n_plus, vec![1]);
        assert_eq!(f.first_form(TOL).unwrap().1, 0);
        assert_eq!(f.branch_profile().unwrap().branches, vec![(1, -1), (1, 1)]);
    }

    #[test]
    fn branch_orders_for_sqrt_example() {
        // [[t, t^2], [t^2, -t]]: eigenvalues +-t sqrt(1 + t^2)
        let f = HermitianFamily::new(
            vec![mat(&[&[0, 0], &[0, 0]]), mat(&[&[1, 0], &[0, -1]]), mat(&[&[0, 1], &[1, 0]])],
            TOL,
        )
        .unwrap();
        assert_eq!(f.branch_profile().unwrap().branches, vec![(1, -1), (1, 1)]);
        let d0 = HermitianFamily::new(vec![mat(&[&[1, 0], &[0, -1]])], TOL).unwrap();
        let b = d0.branch_profile().unwrap();
        assert!(b.branches.is_empty());
        assert_eq!((b.nonzero_positive, b.nonzero_negative), (1, 1));
    }

    #[test]
    fn identity_times_t() {
        let f = HermitianFamily::new(vec![Mat::<Q>::zeros(3, 3), Mat::identity(3)], TOL).unwrap();
        let r = f.jumps(TOL).unwrap();
        assert_eq!((r.jump_plus, r.jump_minus, r.flow), (3, -3, 6));
        assert_eq!(f.first_form(TOL).unwrap(), (Mat::identity(3), 3));
    }

    #[test]
    fn invertible_constant() {
        let f = HermitianFamily::new(vec![mat(&[&[2, 1], &[1, 2]])], TOL).unwrap();
        assert!(f.kernel_sequence(TOL).unwrap().profile.sigma.is_empty());
        assert_eq!(f.first_form(TOL).unwrap().0.rows(), 0);
        assert_eq!(f.analytic_linking_form(TOL).unwrap().dim(), 0);
    }

    #[test]
    fn shared_null_vector_is_in_sigma() {
        let v = mat(&[&[1, -1], &[-1, 1]]);
        let f = HermitianFamily::new(vec![v.clone(), v.scale(&q(3))], TOL).unwrap();
        let s = f.common_kernel(TOL);
        assert!(s.contains_vec(&[q(1), q(1)], TOL));
    }

    #[test]
    fn non_constant_null_germ() {
        // D = w w^† with w = (1, t): the null germ (-t, 1) is not constant
        let f = HermitianFamily::new(
            vec![mat(&[&[1, 0], &[0, 0]]), mat(&[&[0, 1], &[1, 0]]), mat(&[&[0, 0], &[0, 1]])],
            TOL,
        )
        .unwrap();
        assert_eq!(f.common_kernel(TOL).dim(), 0);
        let ks = f.kernel_sequence(TOL).unwrap();
        assert_eq!(ks.null_branches, 1);
        assert!(ks.profile.sigma.is_empty());
        let b = f.branch_profile().unwrap();
        assert_eq!(b.identically_zero, 1);
        assert_eq!(f.jumps(TOL).unwrap().jump_plus, 0);
        assert_eq!(f.analytic_linking_form(TOL).unwrap().dim(), 0);
    }

    #[test]
    fn truncated_family_needs_enough_terms() {
        // t^3 known only to order 2
        let mut c = vec![Mat::zeros(1, 1); 3];
        let f = HermitianFamily::truncated(c.clone(), TOL).unwrap();
        assert!(matches!(f.kernel_sequence(TOL), Err(Error::TruncationInsufficient(_))));
        c.push(mat(&[&[1]]));
        c.push(Mat::zeros(1, 1));
        let f = HermitianFamily::truncated(c, TOL).unwrap();
        assert_eq!(f.kernel_sequence(TOL).unwrap().profile.sigma, vec![0, 0, 1]);
    }

    #[test]
    fn lambda_is_independent_of_completion() {
        // rank-deficient D_0 with a coupled completion
        let f = HermitianFamily::new(
            vec![mat(&[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]]), mat(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]), mat(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 2]])],
            TOL,
        )
        .unwrap();
        let n = f.dim();
        for i in 1..=3 {
            let (x, comp) = f.w_space(i, TOL);
            if x.cols() == 0 {
                continue;
            }
            let g1 = f.lambda_gram(i, &x, &comp);
            // shift each completion by null vectors with vanishing head
            let null = f.toeplitz(i).nullspace(TOL);
            let head: Vec<usize> = (0..n).collect();
            let all: Vec<usize> = (0..null.cols()).collect();
            let k = null.mul(&null.select(&head, &all).nullspace(TOL));
            let mut comp2 = comp.clone();
            for c in 0..comp2.cols() {
                for kc in 0..k.cols() {
                    for r in 0..comp2.rows() {
                        let v = k[(r, kc)].clone() * q((c + kc + 1) as i64);
                        comp2[(r, c)] = comp2[(r, c)].clone() + v;
                    }
                }
            }
            assert_eq!(g1, f.lambda_gram(i, &x, &comp2));
        }
    }

    fn small_family() -> impl Strategy<Value = HermitianFamily<Q>> {
        (1usize..=3, 1usize..=2).prop_flat_map(|(n, d)| {
            prop::collection::vec(prop::collection::vec(-2i64..=2, n * n), d + 1).prop_map(move |cs| {
                let proj = Mat::diag(&(0..n).map(|i| q((i > 0) as i64)).collect::<Vec<_>>());
                let mats = cs
                    .into_iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let a = Mat::from_vec(n, n, v.into_iter().map(q).collect());
                        let h = a.add(&a.adjoint());
                        // force a kernel in D_0
                        if k == 0 { proj.mul(&h).mul(&proj) } else { h }
                    })
                    .collect();
                HermitianFamily::new(mats, TOL).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn routes_and_symmetries(f in small_family()) {
            let ks = f.kernel_sequence(TOL).unwrap();
            let p = ks.profile.clone();
            let r = f.jumps(TOL).unwrap();
            prop_assert!(r.oracle_agreement);
            prop_assert_eq!(r.jump_plus - r.jump_minus, 2 * p.odd_sum());
            prop_assert_eq!(r.jump_plus + r.jump_minus, 2 * p.even_sum());
            prop_assert_eq!(f.first_form(TOL).unwrap().1, p.sigma_at(1));
            prop_assert_eq!(f.branch_profile().unwrap().profile(), p.clone());
            let lf = f.analytic_linking_form(TOL).unwrap();
            prop_assert_eq!(lf.signature_profile(Route::Both, TOL).unwrap(), p.clone());
            prop_assert_eq!(f.time_reversed().kernel_sequence(TOL).unwrap().profile, p.time_reversed());
            prop_assert_eq!(f.rescaled(&Q::from_ratio(3, 2)).kernel_sequence(TOL).unwrap().profile, p.clone());
            for st in &ks.stages {
                prop_assert!(st.gram.is_hermitian(TOL));
            }
        }
    }
}
