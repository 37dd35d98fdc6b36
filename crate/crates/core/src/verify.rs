//! Property checks over a generated corpus.

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{CorpusFamily, FamilyKind};
use crate::family::HermitianFamily;
use crate::linkform::SignatureProfile;
use crate::scalar::{GaussRat, Scalar, Tol};

/// Outcome of every property on one family; `None` when not applicable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyCheck {
    pub index: usize,
    pub kind: FamilyKind,
    pub dim: usize,
    pub degree: usize,
    pub profile: Option<SignatureProfile>,
    pub jump_plus: Option<i64>,
    pub jump_minus: Option<i64>,
    pub oracle_jump_plus: Option<i64>,
    pub oracle_jump_minus: Option<i64>,
    pub oracle_agreement: bool,
    /// `eta_+ - eta_- = 2 sum sigma_odd`.
    pub flow_identity: bool,
    /// `(eta_+ + eta_-) / 2 - eta_0 = sum sigma_even`.
    pub even_identity: bool,
    pub first_form: bool,
    pub time_reversal: bool,
    pub rescaling: bool,
    pub planted: Option<bool>,
    pub error: Option<String>,
}

impl FamilyCheck {
    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.oracle_agreement
            && self.flow_identity
            && self.even_identity
            && self.first_form
            && self.time_reversal
            && self.rescaling
            && self.planted != Some(false)
    }
}

/// Profile, property flags, computed jumps and oracle jumps.
type Checked = (SignatureProfile, [bool; 6], (i64, i64), (i64, i64));

fn check<F: Scalar>(f: &HermitianFamily<F>, tol: Tol) -> crate::error::Result<Checked> {
    let r = f.jumps(tol)?;
    let p = &r.profile;
    let o = &r.oracle;
    let flow = o.eta_plus - o.eta_minus == 2 * p.odd_sum();
    let even = o.eta_plus + o.eta_minus - 2 * r.eta0 == 2 * p.even_sum();
    let (_, s1) = f.first_form(tol)?;
    let first = s1 == p.sigma_at(1);
    let rev = f.time_reversed().jumps(tol)?;
    let reversal = rev.profile == p.time_reversed() && rev.oracle_agreement;
    let scaled = f.rescaled(&F::from_ratio(3, 7)).jumps(tol)?;
    let rescaling = scaled.profile == *p && scaled.oracle_agreement;
    Ok((
        r.profile.clone(),
        [r.oracle_agreement, flow, even, first, reversal, rescaling],
        (r.jump_plus, r.jump_minus),
        (o.jump_plus, o.jump_minus),
    ))
}

pub fn check_family(cf: &CorpusFamily, tol: Tol) -> FamilyCheck {
    let mut out = FamilyCheck {
        index: cf.index,
        kind: cf.kind,
        dim: cf.family.dim(),
        degree: cf.family.degree(),
        profile: None,
        jump_plus: None,
        jump_minus: None,
        oracle_jump_plus: None,
        oracle_jump_minus: None,
        oracle_agreement: false,
        flow_identity: false,
        even_identity: false,
        first_form: false,
        time_reversal: false,
        rescaling: false,
        planted: None,
        error: None,
    };
    match check::<GaussRat>(&cf.family, tol) {
        Ok((p, flags, (jp, jm), (op, om))) => {
            out.planted = cf.expected.as_ref().map(|e| *e == p);
            out.profile = Some(p);
            (out.jump_plus, out.jump_minus) = (Some(jp), Some(jm));
            (out.oracle_jump_plus, out.oracle_jump_minus) = (Some(op), Some(om));
            [out.oracle_agreement, out.flow_identity, out.even_identity, out.first_form, out.time_reversal, out.rescaling] =
                flags;
        }
        Err(e) => out.error = Some(format!("{}: {e}", e.code())),
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub count: usize,
    pub passed: usize,
    pub oracle_agreements: usize,
    pub flow_identity: usize,
    pub even_identity: usize,
    pub first_form: usize,
    pub time_reversal: usize,
    pub rescaling: usize,
    pub planted_total: usize,
    pub planted_recovered: usize,
    pub errors: usize,
    pub instances: Vec<FamilyCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.count
    }
}

/// Checks every family, in parallel; results keep corpus order.
pub fn verify_families(families: &[CorpusFamily], tol: Tol) -> VerifyReport {
    let instances: Vec<FamilyCheck> = families.par_iter().map(|cf| check_family(cf, tol)).collect();
    let count = |f: fn(&FamilyCheck) -> bool| instances.iter().filter(|c| f(c)).count();
    VerifyReport {
        count: instances.len(),
        passed: count(|c| c.passed()),
        oracle_agreements: count(|c| c.oracle_agreement),
        flow_identity: count(|c| c.flow_identity),
        even_identity: count(|c| c.even_identity),
        first_form: count(|c| c.first_form),
        time_reversal: count(|c| c.time_reversal),
        rescaling: count(|c| c.rescaling),
        planted_total: count(|c| c.planted.is_some()),
        planted_recovered: count(|c| c.planted == Some(true)),
        errors: count(|c| c.error.is_some()),
        instances,
    }
}
