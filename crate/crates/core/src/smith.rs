//! Smith normal form over the truncated germ ring, and the torsion linking
//! form it induces on a cokernel.

use crate::error::{Error, Result};
use crate::germ::{
    germ_mat_adjoint, germ_mat_identity, germ_mat_mul, germ_mat_order, Germ, GermMat, LaurentGerm,
};
use crate::linkform::{Parity, TorsionForm};
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tol};

/// `A Q = U diag(t^{k_0}, ..., t^{k_{r-1}}, 0, ...)` with `U`, `Q` invertible.
///
/// Entries that are zero to the truncation order are reported as zero
/// (free); their "confidence order" is [`Smith::order`].
#[derive(Clone, Debug)]
pub struct Smith<F> {
    pub order: usize,
    /// Exponents of the nonzero diagonal entries, in pivot order.
    pub exponents: Vec<usize>,
    pub u: GermMat<F>,
    pub u_inv: GermMat<F>,
    pub q: GermMat<F>,
}

impl<F: Scalar> Smith<F> {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// Indices `j` with `k_j > 0`.
    pub fn torsion_indices(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&j| self.exponents[j] > 0).collect()
    }

    pub fn torsion_orders(&self) -> Vec<usize> {
        self.torsion_indices().into_iter().map(|j| self.exponents[j]).collect()
    }

    /// Complex dimension of the torsion of the cokernel.
    pub fn torsion_dim(&self) -> usize {
        self.exponents.iter().sum()
    }

    pub fn check_rank(&self, expected: usize) -> Result<()> {
        if self.rank() < expected {
            return Err(Error::TruncationInsufficient(format!(
                "{} diagonal entries vanish to order {}, expected rank {expected}",
                expected - self.rank(),
                self.order
            )));
        }
        Ok(())
    }
}

struct Work<F> {
    w: GermMat<F>,
    u: GermMat<F>,
    u_inv: GermMat<F>,
    q: GermMat<F>,
}

impl<F: Scalar> Work<F> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.w.swap_rows(a, b);
        self.u_inv.swap_rows(a, b);
        self.u.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.w.swap_cols(a, b);
        self.q.swap_cols(a, b);
    }

    /// row_s *= v (v a unit with inverse vinv).
    fn scale_row(&mut self, s: usize, v: &Germ<F>, vinv: &Germ<F>) {
        for c in 0..self.w.cols() {
            self.w[(s, c)] = &self.w[(s, c)] * v;
        }
        for c in 0..self.u_inv.cols() {
            self.u_inv[(s, c)] = &self.u_inv[(s, c)] * v;
        }
        for r in 0..self.u.rows() {
            self.u[(r, s)] = &self.u[(r, s)] * vinv;
        }
    }

    /// row_i -= f * row_s.
    fn add_row(&mut self, i: usize, s: usize, f: &Germ<F>) {
        for c in 0..self.w.cols() {
            let d = f * &self.w[(s, c)];
            self.w[(i, c)] = &self.w[(i, c)] - &d;
        }
        for c in 0..self.u_inv.cols() {
            let d = f * &self.u_inv[(s, c)];
            self.u_inv[(i, c)] = &self.u_inv[(i, c)] - &d;
        }
        for r in 0..self.u.rows() {
            let d = f * &self.u[(r, i)];
            self.u[(r, s)] = &self.u[(r, s)] + &d;
        }
    }

    /// col_j -= f * col_s.
    fn add_col(&mut self, j: usize, s: usize, f: &Germ<F>) {
        for r in 0..self.w.rows() {
            let d = f * &self.w[(r, s)];
            self.w[(r, j)] = &self.w[(r, j)] - &d;
        }
        for r in 0..self.q.rows() {
            let d = f * &self.q[(r, s)];
            self.q[(r, j)] = &self.q[(r, j)] - &d;
        }
    }
}

/// Smith form by minimal-valuation pivoting; ties go to the lowest row, then
/// the lowest column.
pub fn smith<F: Scalar>(a: &GermMat<F>, tol: Tol) -> Smith<F> {
    let (rows, cols) = (a.rows(), a.cols());
    let order = if a.data().is_empty() { 0 } else { germ_mat_order(a) };
    let a = a.map(|g| g.truncate(order));
    let scale = a.data().iter().map(|g| g.magnitude()).fold(0.0, f64::max);
    let mut wk = Work {
        w: a,
        u: germ_mat_identity(rows, order),
        u_inv: germ_mat_identity(rows, order),
        q: germ_mat_identity(cols, order),
    };
    let mut exponents = Vec::new();
    for s in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, usize)> = None;
        for r in s..rows {
            for c in s..cols {
                if let Some(v) = wk.w[(r, c)].valuation_in(scale, tol) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((k, r, c)) = best else { break };
        wk.swap_rows(s, r);
        wk.swap_cols(s, c);
        let unit = wk.w[(s, s)].shift_down_padded(k);
        let v = unit.unit_inverse().expect("pivot has a unit part");
        let vinv = v.unit_inverse().expect("inverse of a unit");
        wk.scale_row(s, &v, &vinv);
        wk.w[(s, s)] = Germ::monomial(k, F::one(), order);
        for i in s + 1..rows {
            if wk.w[(i, s)].valuation_in(scale, tol).is_none() {
                wk.w[(i, s)] = Germ::zero(order);
                continue;
            }
            let f = wk.w[(i, s)].shift_down_padded(k);
            wk.add_row(i, s, &f);
            wk.w[(i, s)] = Germ::zero(order);
        }
        for j in s + 1..cols {
            if wk.w[(s, j)].valuation_in(scale, tol).is_none() {
                wk.w[(s, j)] = Germ::zero(order);
                continue;
            }
            let f = wk.w[(s, j)].shift_down_padded(k);
            wk.add_col(j, s, &f);
            wk.w[(s, j)] = Germ::zero(order);
        }
        exponents.push(k);
    }
    Smith { order, exponents, u: wk.u, u_inv: wk.u_inv, q: wk.q }
}

/// The torsion linking form on the cokernel of `A: C^{l-1} -> C^l`.
///
/// With `A Q = U Delta`, the generators are `f_j = U e_j` (order `t^{k_j}`)
/// and `g_j = Q e_j` solves `A g_j = t^{k_j} f_j`. The pairing matrix `P`
/// (`dim C^l x dim C^{l-1}`) gives `{f_j, f_m} = t^{-k_j} f_m^* P g_j`.
#[derive(Clone, Debug)]
pub struct CokernelLinking<F> {
    pub smith: Smith<F>,
    /// Torsion generator indices (into the Smith diagonal).
    pub generators: Vec<usize>,
    /// `s[a][b] = f_{g_b}^* P g_{g_a}`: row is the first argument.
    pub s: Vec<Vec<Germ<F>>>,
    pub j: Mat<F>,
    pub g: Mat<F>,
}

impl<F: Scalar> CokernelLinking<F> {
    pub fn compute(a: &GermMat<F>, pairing: &GermMat<F>, tol: Tol) -> Result<Self> {
        if pairing.rows() != a.rows() || pairing.cols() != a.cols() {
            return Err(Error::BadPairing(format!(
                "pairing is {}x{}, presentation is {}x{}",
                pairing.rows(),
                pairing.cols(),
                a.rows(),
                a.cols()
            )));
        }
        let smith = smith(a, tol);
        Ok(Self::from_smith(smith, pairing))
    }

    pub fn from_smith(smith: Smith<F>, pairing: &GermMat<F>) -> Self {
        let order = smith.order.min(germ_mat_order(pairing));
        let gens = smith.torsion_indices();
        let ks: Vec<usize> = gens.iter().map(|&j| smith.exponents[j]).collect();
        // f^* P g for all pairs at once
        let ustar_p_q = germ_mat_mul(&germ_mat_mul(&germ_mat_adjoint(&smith.u), pairing), &smith.q);
        let s: Vec<Vec<Germ<F>>> = gens
            .iter()
            .map(|&ja| gens.iter().map(|&jb| ustar_p_q[(jb, ja)].truncate(order)).collect())
            .collect();
        let offsets: Vec<usize> = ks
            .iter()
            .scan(0, |acc, &k| {
                let o = *acc;
                *acc += k;
                Some(o)
            })
            .collect();
        let n: usize = ks.iter().sum();
        let mut j = Mat::zeros(n, n);
        let mut g = Mat::zeros(n, n);
        for (x, &kx) in ks.iter().enumerate() {
            for a in 0..kx {
                if a + 1 < kx {
                    j[(offsets[x] + a + 1, offsets[x] + a)] = F::one();
                }
                for (y, &ky) in ks.iter().enumerate() {
                    for b in 0..ky {
                        // [t^a f_x, t^b f_y] = coeff of t^{k_x - 1 - a - b} in s_xy
                        if a + b < kx {
                            g[(offsets[y] + b, offsets[x] + a)] = s[x][y].coeff(kx - 1 - a - b);
                        }
                    }
                }
            }
        }
        CokernelLinking { smith, generators: gens, s, j, g }
    }

    /// `{f_x, f_y}` as a principal part.
    pub fn linking(&self, x: usize, y: usize) -> LaurentGerm<F> {
        let k = self.smith.exponents[self.generators[x]] as i64;
        LaurentGerm::from_germ(&self.s[x][y]).shift(-k).principal_part()
    }

    /// True iff `{f, f'} - eps conj{f', f}` vanishes mod the germ ring for all
    /// generator pairs, with `eps = +1` (Hermitian) or `-1` (skew).
    pub fn symmetric(&self, parity: Parity, tol: Tol) -> bool {
        let m = self.generators.len();
        (0..m).all(|x| {
            (0..m).all(|y| {
                let a = self.linking(x, y);
                let b = self.linking(y, x).conj();
                let d = match parity {
                    Parity::Hermitian => &a - &b,
                    Parity::SkewHermitian => &a + &b,
                };
                d.is_regular(tol)
            })
        })
    }

    /// Coordinates in the `(J, G)` basis of the class of a cocycle `x`.
    pub fn class_of(&self, x: &[Germ<F>]) -> Vec<F> {
        let order = self.smith.order;
        let c: Vec<Germ<F>> = (0..self.smith.u_inv.rows())
            .map(|r| {
                (0..x.len()).fold(Germ::zero(order), |acc, k| &acc + &(&self.smith.u_inv[(r, k)] * &x[k]))
            })
            .collect();
        let mut out = Vec::new();
        for &j in &self.generators {
            for a in 0..self.smith.exponents[j] {
                out.push(c[j].coeff(a));
            }
        }
        out
    }

    pub fn torsion_form(&self, parity: Parity, tol: Tol) -> Result<TorsionForm<F>> {
        TorsionForm::new(self.j.clone(), self.g.clone(), parity, tol).map_err(|e| match e {
            Error::Degenerate => Error::DegenerateForm("scalar form of the cokernel pairing is singular".into()),
            e => e,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::{germ_mat_from_coeffs, germ_mat_is_zero, germ_mat_sub};
    use crate::linkform::Route;
    use crate::scalar::GaussRat;
    use proptest::prelude::*;

    type Q = GaussRat;
    const TOL: Tol = Tol(1e-9);

    fn q(a: i64) -> Q {
        Q::from_ints(a, 0)
    }

    fn diag_t(powers: &[(usize, i64)], order: usize) -> GermMat<Q> {
        let n = powers.len();
        Mat::from_fn(n, n, |r, c| {
            if r == c {
                Germ::monomial(powers[r].0, q(powers[r].1), order)
            } else {
                Germ::zero(order)
            }
        })
    }

    fn check_identity(a: &GermMat<Q>, s: &Smith<Q>) {
        let (r, c) = (a.rows(), a.cols());
        let delta = Mat::from_fn(r, c, |i, j| {
            if i == j && i < s.rank() {
                Germ::monomial(s.exponents[i], Q::one(), s.order)
            } else {
                Germ::zero(s.order)
            }
        });
        let lhs = germ_mat_mul(a, &s.q);
        let rhs = germ_mat_mul(&s.u, &delta);
        assert!(germ_mat_is_zero(&germ_mat_sub(&lhs, &rhs), TOL));
        let id = germ_mat_mul(&s.u, &s.u_inv);
        assert!(germ_mat_is_zero(&germ_mat_sub(&id, &germ_mat_identity(r, s.order)), TOL));
    }

    #[test]
    fn diagonal_input() {
        let a = diag_t(&[(2, 3), (0, -1), (1, 5)], 4);
        let s = smith(&a, TOL);
        assert_eq!(s.exponents, vec![0, 1, 2]);
        assert_eq!(s.torsion_dim(), 3);
        check_identity(&a, &s);
    }

    #[test]
    fn zero_entries_are_free() {
        let a = diag_t(&[(1, 1), (0, 0)], 3);
        let s = smith(&a, TOL);
        assert_eq!(s.rank(), 1);
        assert!(s.check_rank(2).is_err());
    }

    #[test]
    fn linking_of_scalar_presentation() {
        // coker of mu(t) = t^2 (2 - t) with identity pairing: {1,1} = mu^{-1}
        let mu = Germ::new(vec![q(0), q(0), q(2), q(-1), q(0), q(0)]);
        let a = Mat::from_vec(1, 1, vec![mu.clone()]);
        let p = germ_mat_identity(1, 5);
        let cl = CokernelLinking::compute(&a, &p, TOL).unwrap();
        let f = cl.torsion_form(Parity::Hermitian, TOL).unwrap();
        let one = cl.class_of(&[Germ::one(5)]);
        let got = f.linking(&one, &one);
        let want = mu.invert(TOL).unwrap().principal_part();
        assert_eq!(got.coeff(-2), want.coeff(-2));
        assert_eq!(got.coeff(-1), want.coeff(-1));
        assert_eq!(f.signature_profile(Route::Both, TOL).unwrap().sigma, vec![0, 1]);
    }

    fn germ_matrix(n: usize, order: usize) -> impl Strategy<Value = GermMat<Q>> {
        prop::collection::vec(prop::collection::vec((-2i64..=2, -1i64..=1), n * n), 3).prop_map(move |cs| {
            let mats: Vec<Mat<Q>> = cs
                .into_iter()
                .map(|v| Mat::from_vec(n, n, v.into_iter().map(|(a, b)| Q::from_ints(a, b)).collect()))
                .collect();
            germ_mat_from_coeffs(&mats, order)
        })
    }

    proptest! {
        #[test]
        fn factorisation_holds(a in germ_matrix(3, 5)) {
            let s = smith(&a, TOL);
            check_identity(&a, &s);
            prop_assert!(s.exponents.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
