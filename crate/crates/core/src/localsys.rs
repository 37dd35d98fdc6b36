//! Cochain complexes over the germ ring, their torsion cohomology, and the
//! homological linking form on the middle degree.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::HermitianFamily;
use crate::germ::{
    germ_mat_adjoint, germ_mat_det, germ_mat_identity, germ_mat_is_zero, germ_mat_mul, germ_mat_order,
    germ_mat_sub, Germ, GermMat, LaurentGerm,
};
use crate::linkform::{Parity, Route, SignatureProfile, TorsionForm};
use crate::matrix::Mat;
use crate::monodromy::Factor;
use crate::scalar::{Scalar, Tol};
use crate::smith::{smith, CokernelLinking, Smith};

/// A representation of a free group: one germ of invertible matrices per
/// generator.
#[derive(Clone, Debug)]
pub struct MonodromyDeformation<F> {
    generators: Vec<GermMat<F>>,
}

impl<F: Scalar> MonodromyDeformation<F> {
    pub fn new(generators: Vec<GermMat<F>>, tol: Tol) -> Result<Self> {
        let m = generators.first().map_or(0, |g| g.rows());
        for (k, g) in generators.iter().enumerate() {
            if g.rows() != m || g.cols() != m {
                return Err(Error::Dimension(format!("generator {k} is {}x{}, expected {m}x{m}", g.rows(), g.cols())));
            }
            if !germ_mat_det(g).is_unit(tol) {
                return Err(Error::Input(format!("generator {k} is not invertible at t = 0")));
            }
        }
        Ok(MonodromyDeformation { generators })
    }

    /// Diagonal circle monodromy.
    pub fn circle(factors: &[Factor], order: usize) -> Result<Self> {
        let g = crate::monodromy::diagonal_matrix(factors, order)?;
        Self::new(vec![g], Tol::default())
    }

    pub fn rank(&self) -> usize {
        self.generators.first().map_or(0, |g| g.rows())
    }

    pub fn order(&self) -> usize {
        self.generators.iter().map(germ_mat_order).min().unwrap_or(0)
    }

    pub fn generators(&self) -> &[GermMat<F>] {
        &self.generators
    }

    /// `S^{-1} rho S` for a constant invertible `S`.
    pub fn conjugated(&self, s: &Mat<F>, tol: Tol) -> Result<Self> {
        let order = self.order();
        let s_inv = s.inverse(tol).ok_or_else(|| Error::Input("conjugating matrix is singular".into()))?;
        let lift = |m: &Mat<F>| m.map(|x| Germ::constant(x.clone(), order));
        let (s, s_inv) = (lift(s), lift(&s_inv));
        let generators = self.generators.iter().map(|g| germ_mat_mul(&germ_mat_mul(&s_inv, g), &s)).collect();
        Self::new(generators, tol)
    }

    /// `rho^* rho = I` for every generator, with `t` real.
    pub fn is_unitary(&self, tol: Tol) -> bool {
        let id = germ_mat_identity(self.rank(), self.order());
        self.generators.iter().all(|g| germ_mat_is_zero(&germ_mat_sub(&germ_mat_mul(&germ_mat_adjoint(g), g), &id), tol))
    }
}

/// `C^0 -> C^1 -> ...` of free modules over the truncated germ ring.
#[derive(Clone, Debug)]
pub struct GermComplex<F> {
    dims: Vec<usize>,
    /// `coboundaries[k]: C^k -> C^{k+1}`, a `dims[k+1] x dims[k]` matrix.
    coboundaries: Vec<GermMat<F>>,
    /// Pairing witness `P` with `{x, y} = t^{-k} y^* P g`, `dims[l] x dims[l-1]`.
    duality: Option<GermMat<F>>,
    middle: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeCohomology {
    pub degree: usize,
    pub free_rank: usize,
    pub torsion_orders: Vec<usize>,
    /// Entries vanishing to this order are reported as free.
    pub confidence_order: usize,
}

impl DegreeCohomology {
    pub fn torsion_dim(&self) -> usize {
        self.torsion_orders.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct HomologicalLinking<F> {
    pub degree: usize,
    pub parity: Parity,
    pub linking: CokernelLinking<F>,
    /// Whether the pairing has the symmetry of its parity on the nose.
    pub symmetric: bool,
    /// The scalar form, present when the pairing is symmetric.
    pub form: Option<TorsionForm<F>>,
    pub profile: Option<SignatureProfile>,
    pub warnings: Vec<String>,
}

impl<F: Scalar> GermComplex<F> {
    pub fn new(
        dims: Vec<usize>,
        coboundaries: Vec<GermMat<F>>,
        duality: Option<GermMat<F>>,
        middle: Option<usize>,
        tol: Tol,
    ) -> Result<Self> {
        if dims.is_empty() || coboundaries.len() + 1 != dims.len() {
            return Err(Error::Dimension(format!("{} degrees need {} coboundaries", dims.len(), dims.len().saturating_sub(1))));
        }
        for (k, d) in coboundaries.iter().enumerate() {
            if d.rows() != dims[k + 1] || d.cols() != dims[k] {
                return Err(Error::Dimension(format!(
                    "coboundary {k} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        for k in 0..coboundaries.len().saturating_sub(1) {
            if !germ_mat_is_zero(&germ_mat_mul(&coboundaries[k + 1], &coboundaries[k]), tol) {
                return Err(Error::NotAComplex(k));
            }
        }
        if let Some(l) = middle {
            if l == 0 || l >= dims.len() {
                return Err(Error::Input(format!("middle degree {l} out of range 1..{}", dims.len())));
            }
            if let Some(p) = &duality {
                if p.rows() != dims[l] || p.cols() != dims[l - 1] {
                    return Err(Error::BadPairing(format!(
                        "pairing is {}x{}, expected {}x{}",
                        p.rows(),
                        p.cols(),
                        dims[l],
                        dims[l - 1]
                    )));
                }
            }
        }
        Ok(GermComplex { dims, coboundaries, duality, middle })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn coboundaries(&self) -> &[GermMat<F>] {
        &self.coboundaries
    }

    pub fn middle(&self) -> Option<usize> {
        self.middle
    }

    pub fn order(&self) -> usize {
        self.coboundaries.iter().map(germ_mat_order).min().unwrap_or(0)
    }

    fn smith_in(&self, k: usize, tol: Tol) -> Option<Smith<F>> {
        (k > 0).then(|| smith(&self.coboundaries[k - 1], tol))
    }

    pub fn torsion_cohomology(&self, tol: Tol) -> Vec<DegreeCohomology> {
        let smiths: Vec<Option<Smith<F>>> = (0..=self.coboundaries.len()).map(|k| self.smith_in(k, tol)).collect();
        let rank = |k: usize| smiths.get(k).and_then(|s| s.as_ref()).map_or(0, |s| s.rank());
        (0..self.dims.len())
            .map(|k| DegreeCohomology {
                degree: k,
                free_rank: self.dims[k] - rank(k) - rank(k + 1),
                torsion_orders: smiths[k].as_ref().map_or(Vec::new(), |s| s.torsion_orders()),
                confidence_order: self.order(),
            })
            .collect()
    }

    fn witness(&self) -> Result<(usize, &GermMat<F>)> {
        let l = self.middle.ok_or_else(|| Error::Input("complex has no middle degree".into()))?;
        let p = self.duality.as_ref().ok_or_else(|| Error::Input("complex has no duality witness".into()))?;
        Ok((l, p))
    }

    /// The linking form on the torsion of `H^l`, with parity `(-1)^l`.
    pub fn homological_linking(&self, tol: Tol) -> Result<HomologicalLinking<F>> {
        let (l, p) = self.witness()?;
        let linking = CokernelLinking::compute(&self.coboundaries[l - 1], p, tol)?;
        let parity = Parity::of_degree(l);
        let symmetric = linking.symmetric(parity, tol);
        let mut warnings = Vec::new();
        let (form, profile) = if symmetric {
            let form = linking.torsion_form(parity, tol)?;
            let profile = form.normalized().signature_profile(Route::Both, tol)?;
            (Some(form), Some(profile))
        } else {
            warnings.push(format!(
                "pairing is not {} (non-unitary monodromy?); no signatures reported",
                match parity {
                    Parity::Hermitian => "Hermitian",
                    Parity::SkewHermitian => "skew-Hermitian",
                }
            ));
            (None, None)
        };
        Ok(HomologicalLinking { degree: l, parity, linking, symmetric, form, profile, warnings })
    }

    /// `{x, y}` from the Bockstein: solve `delta g = t^k x`, then take the
    /// principal part of `t^{-k} y^* P (g + h)` for an optional cocycle `h`.
    pub fn bockstein(&self, x: &[Germ<F>], y: &[Germ<F>], k: usize, h: Option<&[Germ<F>]>, tol: Tol) -> Result<LaurentGerm<F>> {
        let (l, p) = self.witness()?;
        let d = &self.coboundaries[l - 1];
        if x.len() != self.dims[l] || y.len() != self.dims[l] {
            return Err(Error::Dimension("cocycles must live in the middle degree".into()));
        }
        let order = self.order();
        let column = |v: &[Germ<F>]| Mat::from_fn(v.len(), 1, |r, _| v[r].truncate(order));
        if let Some(next) = self.coboundaries.get(l) {
            for v in [x, y] {
                if !germ_mat_is_zero(&germ_mat_mul(next, &column(v)), tol) {
                    return Err(Error::Input("argument is not a cocycle".into()));
                }
            }
        }
        let s = smith(d, tol);
        let emax = s.exponents.iter().copied().max().unwrap_or(0);
        if order < k + emax {
            return Err(Error::TruncationInsufficient(format!("order {order} < {k} + {emax}")));
        }
        let rhs: Vec<Germ<F>> = x.iter().map(|g| g.truncate(order).shift_up(k)).collect();
        let c = germ_mat_mul(&s.u_inv, &column(&rhs));
        let mut z = vec![Germ::zero(order); d.cols()];
        for r in 0..c.rows() {
            let cr = &c[(r, 0)];
            if r < s.rank() {
                let e = s.exponents[r];
                if cr.valuation(tol).is_some_and(|v| v < e) {
                    return Err(Error::NoSolution(format!("t^{k} x is not a coboundary")));
                }
                z[r] = cr.shift_down_padded(e);
            } else if !cr.is_zero(tol) {
                return Err(Error::NoSolution(format!("t^{k} x is not a coboundary")));
            }
        }
        let mut g = germ_mat_mul(&s.q, &column(&z));
        if let Some(h) = h {
            let hc = column(h);
            if !germ_mat_is_zero(&germ_mat_mul(d, &hc), tol) {
                return Err(Error::Input("shift is not a cocycle".into()));
            }
            g = Mat::from_fn(g.rows(), 1, |r, _| &g[(r, 0)] + &hc[(r, 0)]);
        }
        let pg = germ_mat_mul(p, &g);
        let s_xy = (0..y.len()).fold(Germ::zero(order), |acc, r| &acc + &(&y[r].conj() * &pg[(r, 0)]));
        Ok(LaurentGerm::from_germ(&s_xy.truncate(k)).shift(-(k as i64)).principal_part())
    }
}

/// The twisted cochain complex of the circle: `rho - I: C^0 -> C^1`.
pub fn circle_complex<F: Scalar>(rho: &MonodromyDeformation<F>, tol: Tol) -> Result<GermComplex<F>> {
    if rho.generators().len() != 1 {
        return Err(Error::Input("the circle has one generator".into()));
    }
    let m = rho.rank();
    let order = rho.order();
    let d = germ_mat_sub(&rho.generators()[0], &germ_mat_identity(m, order));
    GermComplex::new(vec![m, m], vec![d], Some(germ_mat_identity(m, order)), Some(1), tol)
}

/// `ord_t det(rho - I)`, the expected torsion dimension of `H^1`.
pub fn det_order<F: Scalar>(rho: &MonodromyDeformation<F>, tol: Tol) -> Option<usize> {
    let m = rho.rank();
    let d = germ_mat_sub(&rho.generators()[0], &germ_mat_identity(m, rho.order()));
    germ_mat_det(&d).valuation(tol)
}

/// Diagonal model of the twisted Dirac family on the circle near `t = 0`:
/// a factor with trivial phase contributes `c t`, any other factor `1`.
pub fn circle_operator_family<F: Scalar>(factors: &[Factor], tol: Tol) -> Result<HermitianFamily<F>> {
    let m = factors.len();
    let d0 = Mat::from_fn(m, m, |r, c| {
        if r == c && !factors[r].trivial_at_zero() {
            F::one()
        } else {
            F::zero()
        }
    });
    let d1 = Mat::from_fn(m, m, |r, c| {
        if r == c && factors[r].trivial_at_zero() {
            F::from_rational(&factors[r].rate)
        } else {
            F::zero()
        }
    });
    HermitianFamily::new(vec![d0, d1], tol)
}

/// `(I - K)(I + K)^{-1}`, unitary when `K` is skew-Hermitian.
pub fn cayley<F: Scalar>(k: &Mat<F>, tol: Tol) -> Option<Mat<F>> {
    let id = Mat::identity(k.rows());
    id.add(k).inverse(tol).map(|inv| id.sub(k).mul(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::germ_mat_from_coeffs;
    use crate::monodromy::Monodromy;
    use crate::scalar::{Cyclo, GaussRat};
    use num_complex::Complex64;
    use proptest::prelude::*;

    const TOL: Tol = Tol(1e-9);

    fn circle_of<F: Scalar>(expr: &str, rank: usize, order: usize) -> (Vec<Factor>, GermComplex<F>) {
        let f = Monodromy::parse(expr).unwrap().factors(rank).unwrap();
        let rho = MonodromyDeformation::<F>::circle(&f, order).unwrap();
        (f, circle_complex(&rho, TOL).unwrap())
    }

    #[test]
    fn trivial_phase_gives_one_positive_block() {
        let (_, c) = circle_of::<Cyclo>("exp(2*pi*i*t)", 1, 5);
        let h = c.torsion_cohomology(TOL);
        assert_eq!(h[0].torsion_orders, Vec::<usize>::new());
        assert_eq!(h[1].torsion_orders, vec![1]);
        assert_eq!(h[0].free_rank + h[1].free_rank, 0);
        let link = c.homological_linking(TOL).unwrap();
        assert!(link.symmetric);
        assert_eq!(link.parity, Parity::SkewHermitian);
        assert_eq!(link.profile.unwrap(), SignatureProfile::from_blocks(&[(1, 1)]));
    }

    #[test]
    fn residue_is_one_over_two_pi() {
        let (_, c) = circle_of::<Complex64>("exp(2*pi*i*t)", 1, 6);
        let one = [Germ::one(6)];
        let l = c.bockstein(&one, &one, 1, None, TOL).unwrap();
        let r = l.residue() * Complex64::i();
        assert!((r - Complex64::new(1.0 / (2.0 * std::f64::consts::PI), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn nontrivial_phase_is_acyclic() {
        let (_, c) = circle_of::<Cyclo>("exp(2*pi*i*(t+1/3))", 1, 4);
        let h = c.torsion_cohomology(TOL);
        assert!(h.iter().all(|d| d.free_rank == 0 && d.torsion_orders.is_empty()));
        let link = c.homological_linking(TOL).unwrap();
        assert_eq!(link.profile.unwrap().total_dim(), 0);
    }

    #[test]
    fn winding_sign_sets_the_signature() {
        for k in [-3i64, -1, 2] {
            let (f, c) = circle_of::<GaussRat>(&format!("exp({k}*pi*i*t)"), 1, 4);
            let p = c.homological_linking(TOL).unwrap().profile.unwrap();
            assert_eq!(p.sigma_at(1), k.signum());
            let fam = circle_operator_family::<GaussRat>(&f, TOL).unwrap();
            assert_eq!(fam.jumps(TOL).unwrap().profile, p);
        }
    }

    #[test]
    fn trivial_monodromy_is_free() {
        let (_, c) = circle_of::<GaussRat>("1", 2, 3);
        let h = c.torsion_cohomology(TOL);
        assert_eq!((h[0].free_rank, h[1].free_rank), (2, 2));
        assert_eq!(h[1].torsion_dim(), 0);
    }

    #[test]
    fn rejects_non_complexes() {
        let o = 2;
        let one = germ_mat_from_coeffs::<GaussRat>(&[Mat::identity(1)], o);
        let err = GermComplex::new(vec![1, 1, 1], vec![one.clone(), one], None, None, TOL).unwrap_err();
        assert_eq!(err, Error::NotAComplex(0));
    }

    #[test]
    fn non_unitary_monodromy_warns() {
        // rho = 1 + 2t: torsion of order 1 but a real, not imaginary, pairing
        let o = 3;
        let rho = germ_mat_from_coeffs::<GaussRat>(&[Mat::identity(1), Mat::identity(1).scale(&GaussRat::from_i64(2))], o);
        let rho = MonodromyDeformation::new(vec![rho], TOL).unwrap();
        assert!(!rho.is_unitary(TOL));
        let link = circle_complex(&rho, TOL).unwrap().homological_linking(TOL).unwrap();
        assert!(!link.symmetric && link.form.is_none() && !link.warnings.is_empty());
    }

    fn gauss(a: i64, b: i64) -> Cyclo {
        Cyclo::from_i64(a) + Cyclo::imag_unit() * Cyclo::from_i64(b)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn conjugated_circles_match_operator_model(
            rates in prop::collection::vec(-3i64..=3, 1..=3),
            phases in prop::collection::vec(prop::sample::select(vec![0i64, 0, 1, 3]), 3),
            k in prop::collection::vec((-2i64..=2, -2i64..=2), 3),
        ) {
            let m = rates.len();
            let factors: Vec<Factor> = (0..m)
                .map(|j| Factor::new(num_rational::BigRational::from_integer(rates[j].into()), num_rational::BigRational::new(phases[j].into(), 4.into())))
                .collect();
            // skew-Hermitian generator for the Cayley transform
            let mut kk = Mat::<Cyclo>::zeros(m, m);
            for j in 0..m {
                kk[(j, j)] = gauss(0, k[j].0);
                if j + 1 < m {
                    kk[(j, j + 1)] = gauss(k[j].1, 1);
                    kk[(j + 1, j)] = -kk[(j, j + 1)].conj();
                }
            }
            let s = cayley(&kk, TOL).unwrap();
            let rho = MonodromyDeformation::<Cyclo>::circle(&factors, m + 3).unwrap().conjugated(&s, TOL).unwrap();
            prop_assert!(rho.is_unitary(TOL));
            let c = circle_complex(&rho, TOL).unwrap();
            let h = c.torsion_cohomology(TOL);
            if h[1].free_rank == 0 {
                prop_assert_eq!(det_order(&rho, TOL), Some(h[1].torsion_dim()));
            }
            let link = c.homological_linking(TOL).unwrap();
            prop_assert!(link.symmetric);
            let fam = circle_operator_family::<Cyclo>(&factors, TOL).unwrap();
            prop_assert_eq!(link.profile.unwrap(), fam.jumps(TOL).unwrap().profile);

            // the pairing does not depend on the solution of delta g = t x
            let o = rho.order();
            let s_inv = s.inverse(TOL).unwrap();
            let basis = |j: usize| -> Vec<Germ<Cyclo>> { (0..m).map(|r| Germ::constant(s_inv[(r, j)].clone(), o)).collect() };
            let torsion = (0..m).find(|&j| factors[j].trivial_at_zero() && rates[j] != 0);
            let free = (0..m).find(|&j| factors[j].trivial_at_zero() && rates[j] == 0);
            if let (Some(jt), Some(jf)) = (torsion, free) {
                let x = basis(jt);
                let a = c.bockstein(&x, &x, 1, None, TOL).unwrap();
                let b = c.bockstein(&x, &x, 1, Some(&basis(jf)), TOL).unwrap();
                prop_assert!((&a - &b).is_regular(TOL));
                prop_assert!(!a.is_regular(TOL));
            }
        }
    }
}
