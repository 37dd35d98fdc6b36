//! Seeded random instances: Hermitian families with planted or random
//! kernel structure, torsion forms with known invariants, and circle
//! monodromies.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::HermitianFamily;
use crate::linkform::{Parity, SignatureProfile, TorsionForm};
use crate::localsys::cayley;
use crate::matrix::Mat;
use crate::monodromy::Factor;
use crate::scalar::{Cyclo, GaussRat, Scalar, Tol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `U(t)^dagger diag(+-t^k c(t), 0, ...) U(t)` with a known profile.
    Planted,
    /// Random coefficients with an engineered kernel of `D_0`.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSpec {
    pub kinds: Vec<FamilyKind>,
    pub max_dim: usize,
    pub max_degree: usize,
    /// Largest dimension of an engineered kernel.
    pub max_kernel: usize,
    /// Branch orders used by planted families.
    pub orders: Vec<usize>,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            kinds: vec![FamilyKind::Planted, FamilyKind::Random],
            max_dim: 6,
            max_degree: 3,
            max_kernel: 2,
            orders: vec![1, 2, 3],
        }
    }
}

impl CorpusSpec {
    /// `"default"` or a JSON object.
    pub fn parse(s: &str) -> Result<Self> {
        let spec = if s.trim() == "default" {
            CorpusSpec::default()
        } else {
            serde_json::from_str(s).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Ok(());
        }
        if self.max_dim == 0 || self.max_dim > 8 {
            return Err(Error::Input(format!("max_dim must be in 1..=8, got {}", self.max_dim)));
        }
        if self.max_degree == 0 || self.max_degree > 4 {
            return Err(Error::Input(format!("max_degree must be in 1..=4, got {}", self.max_degree)));
        }
        if self.orders.iter().any(|&k| k == 0 || k > self.max_degree) {
            return Err(Error::Input("planted orders must lie in 1..=max_degree".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CorpusFamily {
    pub index: usize,
    pub kind: FamilyKind,
    pub family: HermitianFamily<GaussRat>,
    /// The planted profile, when known by construction.
    pub expected: Option<SignatureProfile>,
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gi(rng: &mut impl Rng, r: i64) -> GaussRat {
    GaussRat::from_ints(rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

fn nonzero(rng: &mut impl Rng, r: i64) -> i64 {
    let v = rng.gen_range(1..=r);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

fn random_hermitian(rng: &mut impl Rng, n: usize, r: i64) -> Mat<GaussRat> {
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = GaussRat::from_ints(rng.gen_range(-r..=r), 0);
        for j in i + 1..n {
            m[(i, j)] = gi(rng, r);
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    m
}

/// A random invertible matrix with small Gaussian-integer entries.
pub fn random_invertible<F: Scalar>(rng: &mut impl Rng, n: usize, tol: Tol) -> Mat<F> {
    loop {
        let m = Mat::from_fn(n, n, |_, _| {
            F::from_i64(rng.gen_range(-2..=2)) + F::imag_unit() * F::from_i64(rng.gen_range(-1..=1))
        });
        if m.rank(tol) == n {
            return m;
        }
    }
}

/// Product of polynomial matrices.
fn poly_mul(a: &[Mat<GaussRat>], b: &[Mat<GaussRat>]) -> Vec<Mat<GaussRat>> {
    let (r, c) = (a[0].rows(), b[0].cols());
    let mut out = vec![Mat::zeros(r, c); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

fn planted(rng: &mut impl Rng, spec: &CorpusSpec, tol: Tol) -> (HermitianFamily<GaussRat>, SignatureProfile) {
    let n = rng.gen_range(1..=spec.max_dim);
    let du = if spec.max_degree >= 3 && rng.gen_bool(0.5) { 1 } else { 0 };
    let budget = spec.max_degree - 2 * du;
    let orders: Vec<usize> = spec.orders.iter().copied().filter(|&k| k <= budget).collect();
    let zeros = rng.gen_range(0..=spec.max_kernel.min(n - 1));
    let mut diag: Vec<Vec<GaussRat>> = Vec::new();
    let mut blocks = Vec::new();
    for j in 0..n {
        let mut c = vec![GaussRat::zero(); budget + 1];
        if j < zeros {
            diag.push(c);
            continue;
        }
        let k = if orders.is_empty() || rng.gen_bool(0.25) { 0 } else { *orders.choose(rng).unwrap() };
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        c[k] = GaussRat::from_ints(sign * rng.gen_range(1..=3), 0);
        if k < budget {
            c[k + 1] = GaussRat::from_ints(rng.gen_range(-2..=2), 0);
        }
        if k > 0 {
            blocks.push((k, sign));
        }
        diag.push(c);
    }
    diag.shuffle(rng);
    let d: Vec<Mat<GaussRat>> = (0..=budget)
        .map(|k| Mat::from_fn(n, n, |r, c| if r == c { diag[r][k].clone() } else { GaussRat::zero() }))
        .collect();
    let mut u = vec![random_invertible::<GaussRat>(rng, n, tol)];
    if du == 1 {
        u.push(Mat::from_fn(n, n, |_, _| gi(rng, 1)));
    }
    let u_adj: Vec<Mat<GaussRat>> = u.iter().map(|m| m.adjoint()).collect();
    let coeffs = poly_mul(&poly_mul(&u_adj, &d), &u);
    let fam = HermitianFamily::new(coeffs, tol).expect("congruent family is Hermitian");
    (fam, SignatureProfile::from_blocks(&blocks))
}

fn random_family(rng: &mut impl Rng, spec: &CorpusSpec, tol: Tol) -> HermitianFamily<GaussRat> {
    let n = rng.gen_range(1..=spec.max_dim);
    let d = rng.gen_range(1..=spec.max_degree);
    let k = rng.gen_range(0..=spec.max_kernel.min(n));
    let c = random_invertible::<GaussRat>(rng, n, tol);
    let diag = Mat::from_fn(n, n, |r, col| {
        if r == col && r >= k {
            GaussRat::from_ints(nonzero(rng, 3), 0)
        } else {
            GaussRat::zero()
        }
    });
    let mut coeffs = vec![c.adjoint().mul(&diag).mul(&c)];
    for _ in 0..d {
        coeffs.push(random_hermitian(rng, n, 2));
    }
    HermitianFamily::new(coeffs, tol).expect("random family is Hermitian")
}

/// `count` families, deterministic in `(spec, seed)`.
pub fn generate_families(spec: &CorpusSpec, seed: u64, count: usize, tol: Tol) -> Vec<CorpusFamily> {
    if spec.kinds.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|index| {
            let mut rng = rng_for(seed, index as u64);
            let kind = spec.kinds[index % spec.kinds.len()];
            let (family, expected) = match kind {
                FamilyKind::Planted => {
                    let (f, p) = planted(&mut rng, spec, tol);
                    (f, Some(p))
                }
                FamilyKind::Random => (random_family(&mut rng, spec, tol), None),
            };
            CorpusFamily { index, kind, family, expected }
        })
        .collect()
}

/// A random `O`-automorphism of the form's module, from its commutant.
pub fn random_automorphism<F: Scalar>(rng: &mut impl Rng, form: &TorsionForm<F>, tol: Tol) -> Mat<F> {
    let basis = form.commutant_basis(tol);
    let n = form.dim();
    loop {
        let m = basis.iter().fold(Mat::zeros(n, n), |acc, b| {
            let c = F::from_i64(rng.gen_range(-2..=2)) + F::imag_unit() * F::from_i64(rng.gen_range(-1..=1));
            acc.add(&b.scale(&c))
        });
        if m.rank(tol) == n {
            return m;
        }
    }
}

/// Random block orders and signs.
pub fn random_blocks(rng: &mut impl Rng, max_blocks: usize, max_order: usize) -> Vec<(usize, i64)> {
    let k = rng.gen_range(1..=max_blocks);
    (0..k).map(|_| (rng.gen_range(1..=max_order), if rng.gen_bool(0.5) { 1 } else { -1 })).collect()
}

/// Direct sum of blocks `c t^{-i}` with random positive multiples of the signs.
pub fn block_sum<F: Scalar>(rng: &mut impl Rng, blocks: &[(usize, i64)]) -> TorsionForm<F> {
    blocks.iter().fold(TorsionForm::zero(Parity::Hermitian), |acc, &(i, s)| {
        let c = F::from_ratio(s * rng.gen_range(1..=4), rng.gen_range(1..=3));
        acc.direct_sum(&TorsionForm::block(i, c).expect("valid block")).expect("same parity")
    })
}

/// A form with known blocks, hidden by an automorphism and a basis change.
pub fn scrambled<F: Scalar>(rng: &mut impl Rng, form: &TorsionForm<F>, tol: Tol) -> TorsionForm<F> {
    let m = random_automorphism(rng, form, tol);
    let s = random_invertible::<F>(rng, form.dim(), tol);
    form.transform(&m, tol).and_then(|f| f.change_basis(&s, tol)).expect("automorphism and basis change are invertible")
}

/// Hyperbolic forms of random orders.
pub fn hyperbolic_sum<F: Scalar>(rng: &mut impl Rng, max_pairs: usize, max_order: usize) -> TorsionForm<F> {
    let k = rng.gen_range(1..=max_pairs);
    (0..k).fold(TorsionForm::zero(Parity::Hermitian), |acc, _| {
        acc.direct_sum(&TorsionForm::hyperbolic(rng.gen_range(1..=max_order))).expect("same parity")
    })
}

/// Metabolic form: even-order blocks (Lagrangian `t^{i/2} T`) plus hyperbolic
/// pairs. Returns the form and a basis of a Lagrangian.
pub fn metabolic<F: Scalar>(rng: &mut impl Rng, max_pieces: usize, max_half_order: usize) -> (TorsionForm<F>, Mat<F>) {
    let pieces = rng.gen_range(1..=max_pieces);
    let mut form = TorsionForm::zero(Parity::Hermitian);
    let mut lagrangian: Vec<Vec<usize>> = Vec::new(); // basis vector indices, in the block's coordinates
    let mut offset = 0;
    for _ in 0..pieces {
        let h = rng.gen_range(1..=max_half_order);
        let piece = if rng.gen_bool(0.5) {
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            lagrangian.push((offset + h..offset + 2 * h).collect());
            TorsionForm::block(2 * h, F::from_i64(s * rng.gen_range(1..=3))).expect("valid block")
        } else {
            lagrangian.push((offset..offset + h).collect());
            TorsionForm::hyperbolic(h)
        };
        offset += piece.dim();
        form = form.direct_sum(&piece).expect("same parity");
    }
    let idx: Vec<usize> = lagrangian.concat();
    let l = Mat::from_fn(offset, idx.len(), |r, c| if r == idx[c] { F::one() } else { F::zero() });
    (form, l)
}

/// A random unitary circle monodromy: diagonal factors conjugated by a
/// Cayley unitary.
pub fn random_circle(rng: &mut impl Rng, max_rank: usize, tol: Tol) -> (Vec<Factor>, Mat<Cyclo>) {
    let m = rng.gen_range(1..=max_rank);
    let phases = [(0, 1), (0, 1), (1, 2), (1, 3), (1, 4), (3, 4), (5, 6)];
    let factors = (0..m)
        .map(|_| {
            let (p, q) = *phases.choose(rng).unwrap();
            let rate = BigRational::from_integer(BigInt::from(rng.gen_range(-3..=3)));
            Factor::new(rate, BigRational::new(p.into(), q.into()))
        })
        .collect();
    let mut k = Mat::<Cyclo>::zeros(m, m);
    for i in 0..m {
        k[(i, i)] = Cyclo::imag_unit() * Cyclo::from_i64(rng.gen_range(-2..=2));
        for j in i + 1..m {
            let z = Cyclo::from_i64(rng.gen_range(-2..=2)) + Cyclo::imag_unit() * Cyclo::from_i64(rng.gen_range(-2..=2));
            k[(j, i)] = -z.conj();
            k[(i, j)] = z;
        }
    }
    let s = cayley(&k, tol).expect("I + K is invertible for skew-Hermitian K");
    (factors, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkform::Route;

    const TOL: Tol = Tol(1e-9);

    #[test]
    fn deterministic_per_seed() {
        let spec = CorpusSpec::default();
        let a = generate_families(&spec, 7, 12, TOL);
        let b = generate_families(&spec, 7, 12, TOL);
        let c = generate_families(&spec, 8, 12, TOL);
        assert!(a.iter().zip(&b).all(|(x, y)| x.family == y.family));
        assert!(a.iter().zip(&c).any(|(x, y)| x.family != y.family));
    }

    #[test]
    fn empty_spec_gives_empty_corpus() {
        let spec = CorpusSpec::parse(r#"{"kinds": []}"#).unwrap();
        assert!(generate_families(&spec, 1, 50, TOL).is_empty());
        assert!(CorpusSpec::parse(r#"{"max_dim": 9}"#).is_err());
        assert!(matches!(CorpusSpec::parse("{bad"), Err(Error::Parse { .. })));
    }

    #[test]
    fn order_one_spec_has_no_higher_signatures() {
        let spec = CorpusSpec::parse(r#"{"kinds": ["planted"], "orders": [1]}"#).unwrap();
        for cf in generate_families(&spec, 3, 30, TOL) {
            let p = cf.family.jumps(TOL).unwrap().profile;
            assert!((2..=6).all(|i| p.sigma_at(i) == 0));
            assert_eq!(Some(p), cf.expected);
        }
    }

    #[test]
    fn planted_profiles_are_recovered() {
        let spec = CorpusSpec { kinds: vec![FamilyKind::Planted], ..CorpusSpec::default() };
        for cf in generate_families(&spec, 11, 40, TOL) {
            assert_eq!(cf.family.jumps(TOL).unwrap().profile, cf.expected.unwrap());
        }
    }

    #[test]
    fn scrambled_block_sums_keep_their_counts() {
        let mut rng = rng_for(5, 0);
        for _ in 0..20 {
            let blocks = random_blocks(&mut rng, 3, 3);
            let sum = block_sum::<GaussRat>(&mut rng, &blocks);
            let f = scrambled(&mut rng, &sum, TOL);
            assert_eq!(f.signature_profile(Route::Both, TOL).unwrap(), SignatureProfile::from_blocks(&blocks));
        }
    }

    #[test]
    fn metabolic_witness_is_lagrangian() {
        let mut rng = rng_for(9, 0);
        for _ in 0..20 {
            let (f, l) = metabolic::<GaussRat>(&mut rng, 3, 2);
            let l = crate::matrix::Subspace::span(&l, TOL);
            assert!(f.is_lagrangian(&l, TOL));
        }
    }
}
