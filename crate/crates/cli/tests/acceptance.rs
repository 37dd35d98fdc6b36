//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p etajump-cli --test acceptance`.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use etajump::blanchfield::{self, Xi, JUMP_SIGN};
use etajump::corpus::{
    block_sum, generate_families, hyperbolic_sum, metabolic, random_blocks, random_circle, rng_for, scrambled,
    CorpusFamily, CorpusSpec,
};
use etajump::family::HermitianFamily;
use etajump::germ::Germ;
use etajump::linkform::{Parity, Route};
use etajump::localsys::{circle_complex, circle_operator_family, det_order, MonodromyDeformation};
use etajump::matrix::{Mat, Subspace};
use etajump::monodromy::Monodromy;
use etajump::scalar::{Cyclo, GaussRat, Scalar, Tol};
use etajump::verify::{verify_families, VerifyReport};

const TOL: Tol = Tol(1e-9);
const SEED: u64 = 7;
const CORPUS: usize = 240;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

/// Characteristic polynomial of a Hermitian matrix (real coefficients),
/// lowest degree first.
fn charpoly(a: &Mat<GaussRat>) -> Vec<GaussRat> {
    let n = a.rows();
    let mut c = vec![GaussRat::zero(); n + 1];
    c[n] = GaussRat::one();
    let mut m = Mat::zeros(n, n);
    for k in 1..=n {
        m = a.mul(&m).add(&Mat::identity(n).scale(&c[n - k + 1]));
        let am = a.mul(&m);
        let tr = (0..n).fold(GaussRat::zero(), |acc, i| acc + am[(i, i)].clone());
        c[n - k] = tr * GaussRat::from_ratio(-1, k as i64);
    }
    c
}

fn sign_changes(c: &[GaussRat], negate_odd: bool) -> i64 {
    let signs: Vec<Ordering> = c
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let s = x.real_sign().expect("real coefficient");
            if negate_odd && k % 2 == 1 {
                s.reverse()
            } else {
                s
            }
        })
        .filter(|s| *s != Ordering::Equal)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count() as i64
}

/// Signature by Descartes' rule, exact for real-rooted polynomials.
fn descartes_signature(a: &Mat<GaussRat>) -> i64 {
    let c = charpoly(a);
    sign_changes(&c, false) - sign_changes(&c, true)
}

/// `(eta_0, eta_+, eta_-)` from signatures at `+-10^{-k}`, two agreeing scales.
fn oracle(f: &HermitianFamily<GaussRat>) -> Option<(i64, i64, i64)> {
    let eta0 = descartes_signature(&f.coeff(0));
    let mut prev = None;
    for k in 1..=12 {
        let eps = GaussRat::from_ratio(1, 10i64.pow(k));
        let cur = (descartes_signature(&f.eval(&eps)), descartes_signature(&f.eval(&-eps)));
        if prev == Some(cur) {
            return Some((eta0, cur.0, cur.1));
        }
        prev = Some(cur);
    }
    None
}

fn circle_reproduction() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    let (f, rho) = circle_of::<Cyclo>("exp(2*pi*i*t)", 1, 4);
    let c = circle_complex(&rho, TOL).unwrap();
    let h = c.torsion_cohomology(TOL);
    let t1 = h[1].torsion_orders == [1] && h[0].free_rank == 0 && h[1].free_rank == 0;
    let p = c.homological_linking(TOL).unwrap().profile.unwrap();
    ok &= t1 && p.sigma_at(1) == 1 && p.jump_plus() == 1 && p.jump_minus() == -1;
    notes.push(format!("T1 orders {:?}, sigma1 {}, jumps ({:+}, {:+})", h[1].torsion_orders, p.sigma_at(1), p.jump_plus(), p.jump_minus()));
    ok &= circle_operator_family::<Cyclo>(&f, TOL).unwrap().jumps(TOL).unwrap().eta0 == 0;
    for a in ["1/2", "1/3", "1/4", "5/6"] {
        let (_, rho) = circle_of::<Cyclo>(&format!("exp(2*pi*i*(t+{a}))"), 1, 4);
        let c = circle_complex(&rho, TOL).unwrap();
        let acyclic = c.torsion_cohomology(TOL).iter().all(|d| d.free_rank == 0 && d.torsion_dim() == 0);
        let p = c.homological_linking(TOL).unwrap().profile.unwrap();
        ok &= acyclic && p.sigma.iter().all(|&s| s == 0);
    }
    notes.push("acyclic at a = 1/2, 1/3, 1/4, 5/6".into());
    let (_, rho) = circle_of::<Complex64>("exp(2*pi*i*t)", 1, 6);
    let c = circle_complex(&rho, TOL).unwrap();
    let one = [Germ::one(6)];
    let r = c.bockstein(&one, &one, 1, None, TOL).unwrap().residue() * Complex64::i();
    let err = (r - Complex64::new(1.0 / (2.0 * PI), 0.0)).norm();
    ok &= err < 1e-12;
    notes.push(format!("float i*res = {:.15} (err {err:.1e})", r.re));
    verdict(ok, notes.join("; "))
}

fn circle_of<F: Scalar>(spec: &str, rank: usize, order: usize) -> (Vec<etajump::monodromy::Factor>, MonodromyDeformation<F>) {
    let f = Monodromy::parse(spec).unwrap().factors(rank).unwrap();
    let rho = MonodromyDeformation::circle(&f, order).unwrap();
    (f, rho)
}

type Etas = Option<(i64, i64, i64)>;

fn oracle_equivalence(fams: &[CorpusFamily], oracles: &[Etas], report: &VerifyReport) -> Verdict {
    let mut agree = 0;
    let mut unstable = 0;
    for (o, c) in oracles.iter().zip(&report.instances) {
        match *o {
            Some((eta0, ep, em)) => {
                if c.jump_plus == Some(ep - eta0) && c.jump_minus == Some(em - eta0) && c.oracle_agreement {
                    agree += 1;
                }
            }
            None => unstable += 1,
        }
    }
    let dims = fams.iter().map(|f| f.family.dim()).max().unwrap_or(0);
    let degs = fams.iter().map(|f| f.family.degree()).max().unwrap_or(0);
    verdict(
        agree == fams.len() && fams.len() >= 200,
        format!("{agree}/{} agree with the Descartes-rule oracle (n <= {dims}, d <= {degs}, {unstable} unstable)", fams.len()),
    )
}

fn eta_identities(oracles: &[Etas], report: &VerifyReport) -> Verdict {
    let mut ok = 0;
    for (o, c) in oracles.iter().zip(&report.instances) {
        let (Some((eta0, ep, em)), Some(p)) = (*o, &c.profile) else { continue };
        if ep - em == 2 * p.odd_sum() && ep + em - 2 * eta0 == 2 * p.even_sum() && c.flow_identity && c.even_identity {
            ok += 1;
        }
    }
    verdict(ok == report.count, format!("{ok}/{} satisfy both identities", report.count))
}

fn route_equality() -> Verdict {
    let mut rng = rng_for(SEED, 4);
    let (mut ok, n) = (0, 500);
    for k in 0..n {
        let blocks = random_blocks(&mut rng, 3, 3);
        let base = block_sum::<GaussRat>(&mut rng, &blocks);
        let f = scrambled(&mut rng, &base, TOL);
        // every fourth form is handed over in skew convention
        let f = if k % 4 == 0 {
            let skew = etajump::linkform::TorsionForm::new(
                f.j().clone(),
                f.g().scale(&-GaussRat::imag_unit()),
                Parity::SkewHermitian,
                TOL,
            )
            .unwrap();
            skew.skew_to_hermitian().unwrap()
        } else {
            f
        };
        let v = f.signature_profile(Route::V, TOL).unwrap();
        let w = f.signature_profile(Route::W, TOL).unwrap();
        ok += usize::from(v == w);
    }
    verdict(ok == n, format!("{ok}/{n} random forms: V-route = W-route"))
}

fn block_recovery() -> Verdict {
    let mut rng = rng_for(SEED, 5);
    let (mut ok, n) = (0, 120);
    for _ in 0..n {
        let blocks = random_blocks(&mut rng, 4, 3);
        let base = block_sum::<GaussRat>(&mut rng, &blocks);
        let f = scrambled(&mut rng, &base, TOL);
        let p = f.signature_profile(Route::Both, TOL).unwrap();
        let max = blocks.iter().map(|b| b.0).max().unwrap();
        let count = |i: usize, s: i64| blocks.iter().filter(|b| b.0 == i && b.1 == s).count();
        let planted = (1..=max).all(|i| {
            p.n_plus.get(i - 1).copied().unwrap_or(0) == count(i, 1) && p.n_minus.get(i - 1).copied().unwrap_or(0) == count(i, -1)
        });
        ok += usize::from(planted && p.n_plus.len() <= max);
    }
    verdict(ok == n, format!("{ok}/{n} scrambled block sums recover the planted (n+, n-)"))
}

fn hyperbolic_metabolic() -> Verdict {
    let mut rng = rng_for(SEED, 6);
    let n = 110;
    let mut hyp = 0;
    for _ in 0..n {
        let h = hyperbolic_sum::<GaussRat>(&mut rng, 2, 3);
        let f = scrambled(&mut rng, &h, TOL);
        hyp += usize::from(f.signature_profile(Route::Both, TOL).unwrap().sigma.iter().all(|&s| s == 0));
    }
    let mut met = 0;
    for _ in 0..n {
        let (f, l) = metabolic::<GaussRat>(&mut rng, 2, 2);
        let lag = f.is_lagrangian(&Subspace::span(&l, TOL), TOL);
        let s = scrambled(&mut rng, &f, TOL);
        met += usize::from(lag && s.signature_profile(Route::Both, TOL).unwrap().odd_sum() == 0);
    }
    verdict(hyp == n && met == n, format!("hyperbolic all-zero {hyp}/{n}; metabolic odd-sum zero {met}/{n}"))
}

fn first_form(report: &VerifyReport) -> Verdict {
    verdict(report.first_form == report.count, format!("{}/{} families", report.first_form, report.count))
}

fn reversal_rescaling(fams: &[CorpusFamily], report: &VerifyReport) -> Verdict {
    // also directly: sigma_i(D(-t)) = (-1)^i sigma_i(D(t)) and D(2t) unchanged
    let mut direct = 0;
    for (cf, c) in fams.iter().zip(&report.instances) {
        let Some(p) = &c.profile else { continue };
        let rev = cf.family.time_reversed().jumps(TOL).unwrap().profile;
        let flipped = (1..=p.sigma.len().max(rev.sigma.len())).all(|i| rev.sigma_at(i) == if i % 2 == 0 { 1 } else { -1 } * p.sigma_at(i));
        let scaled = cf.family.rescaled(&GaussRat::from_i64(2)).jumps(TOL).unwrap().profile;
        direct += usize::from(flipped && scaled == *p);
    }
    let ok = report.time_reversal == report.count && report.rescaling == report.count && direct == report.count;
    verdict(ok, format!("reversal {}/{}, rescaling {}/{}, direct {direct}/{}", report.time_reversal, report.count, report.rescaling, report.count, report.count))
}

/// Signature of a 2x2 Hermitian matrix from its trace and determinant.
fn sig2(a: f64, b: Complex64, d: f64) -> i64 {
    let det = a * d - b.norm_sqr();
    let tr = a + d;
    if det > 1e-12 {
        if tr > 0.0 { 2 } else { -2 }
    } else if det < -1e-12 || tr.abs() < 1e-12 {
        0
    } else if tr > 0.0 {
        1
    } else {
        -1
    }
}

/// Levine–Tristram signature of a 2x2 Seifert matrix, in closed form.
fn lt2(v: &Mat<i64>, w: Complex64) -> i64 {
    let u = Complex64::new(1.0, 0.0) - w;
    let f = |x: i64| x as f64;
    let a = 2.0 * u.re * f(v[(0, 0)]);
    let d = 2.0 * u.re * f(v[(1, 1)]);
    let b = u * f(v[(0, 1)]) + u.conj() * f(v[(1, 0)]);
    sig2(a, b, d)
}

fn blanchfield_jumps() -> Verdict {
    let trefoil = Mat::from_vec(2, 2, vec![-1, 1, 0, -1]);
    let figure_eight = Mat::from_vec(2, 2, vec![1, 1, 0, -1]);
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, v) in [("trefoil", &trefoil), ("figure-eight", &figure_eight)] {
        let checks = blanchfield::check_seifert(v, TOL).unwrap();
        for c in &checks {
            let z = c.xi.to_complex();
            let delta = 1e-4;
            let before = lt2(v, z * Complex64::from_polar(1.0, -delta));
            let after = lt2(v, z * Complex64::from_polar(1.0, delta));
            let jump = after - before;
            ok &= c.agrees && jump == c.lt_jump && 2 * JUMP_SIGN * c.odd_sum == jump && c.local_dimension == c.multiplicity;
            notes.push(format!("{name} at {}: 2*sum(odd) = {:+}, LT jump {jump:+}", c.xi, 2 * c.odd_sum));
        }
        if checks.is_empty() {
            notes.push(format!("{name}: no unit-circle roots"));
        }
        if name == "trefoil" {
            let pin = checks.iter().find(|c| c.xi == Xi::RootOfUnity(1, 6));
            ok &= pin.is_some_and(|c| c.lt_jump.abs() == 2 && c.lt_jump == JUMP_SIGN * 2 * c.odd_sum);
        }
    }
    verdict(ok, notes.join("; "))
}

fn localsys_duality() -> Verdict {
    let mut rng = rng_for(SEED, 10);
    let n = 120;
    let (mut sym, mut nondeg, mut dims, mut model) = (0, 0, 0, 0);
    for _ in 0..n {
        let (factors, s) = random_circle(&mut rng, 3, TOL);
        let m = factors.len();
        let rho = MonodromyDeformation::<Cyclo>::circle(&factors, m + 3).unwrap().conjugated(&s, TOL).unwrap();
        let c = circle_complex(&rho, TOL).unwrap();
        let link = c.homological_linking(TOL).unwrap();
        sym += usize::from(rho.is_unitary(TOL) && link.symmetric && link.parity == Parity::SkewHermitian);
        nondeg += usize::from(link.linking.torsion_form(Parity::SkewHermitian, TOL).is_ok() && link.form.is_some());
        let h = c.torsion_cohomology(TOL);
        let expected = factors.iter().filter(|f| f.trivial_at_zero() && f.rate != Default::default()).count();
        let free = factors.iter().filter(|f| f.trivial_at_zero() && f.rate == Default::default()).count();
        let d = det_order(&rho, TOL);
        let ok_dim = if free == 0 { d == Some(h[1].torsion_dim()) } else { d.is_none() && h[1].free_rank == free };
        dims += usize::from(ok_dim && h[1].torsion_dim() == expected);
        let fam = circle_operator_family::<Cyclo>(&factors, TOL).unwrap();
        model += usize::from(link.profile == Some(fam.jumps(TOL).unwrap().profile));
    }
    verdict(
        sym == n && nondeg == n && dims == n && model == n,
        format!("symmetric {sym}/{n}, nondegenerate {nondeg}/{n}, dim T1 = ord det {dims}/{n}, operator model {model}/{n}"),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Verdict, Duration)> = Vec::new();
    let mut timed = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        results.push((id, name, v, t.elapsed()));
    };

    timed(1, "circle reproduction", &mut || {
        let t = Instant::now();
        let v = circle_reproduction();
        let el = t.elapsed();
        verdict(v.ok && el < Duration::from_secs(1), format!("{} [{el:.2?} < 1s]", v.detail))
    });

    let t = Instant::now();
    let fams = generate_families(&CorpusSpec::default(), SEED, CORPUS, TOL);
    let report = verify_families(&fams, TOL);
    let corpus_time = t.elapsed();
    let oracles: Vec<Etas> = fams.iter().map(|cf| oracle(&cf.family)).collect();
    timed(2, "oracle equivalence", &mut || {
        let v = oracle_equivalence(&fams, &oracles, &report);
        verdict(v.ok && corpus_time < Duration::from_secs(60), format!("{} [corpus {corpus_time:.2?} < 60s]", v.detail))
    });
    timed(3, "eta identities", &mut || eta_identities(&oracles, &report));
    timed(4, "route equality", &mut route_equality);
    timed(5, "block-sum recovery", &mut block_recovery);
    timed(6, "hyperbolic and metabolic", &mut hyperbolic_metabolic);
    timed(7, "first form", &mut || first_form(&report));
    timed(8, "time reversal and rescaling", &mut || reversal_rescaling(&fams, &report));
    timed(9, "blanchfield vs levine-tristram", &mut blanchfield_jumps);
    timed(10, "circle symmetry and duality", &mut localsys_duality);

    let mut failed = 0;
    for (id, name, v, el) in &results {
        println!("criterion {id:>2}  {}  {name}: {} ({el:.2?})", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("{} / {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
