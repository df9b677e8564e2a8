//! Reduction modulo primes, exact orders of `SL(n)` over residue rings,
//! subgroup closure, and end-to-end certificates.

mod closure;
mod order;
mod ring;
mod su21;

pub use closure::{closure, closure_elements, ClosureResult, GeneratedGroup, Surjectivity, DEFAULT_CLOSURE_CAP};
pub use order::{
    ambient_order, count_sl_order, enumerate_sl_order, sl_order_field, OrderMethod, DEFAULT_ENUM_CAP, ENUM_RING_LIMIT,
};
pub use ring::{reduce_mod, ResidueMat, ResidueRing};
pub use su21::{certify_su21, commutator_check, sl2_homomorphism_check, CommutatorReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{CaseTag, ElementaryCertificate, GeneratorTriple};
use crate::numberfield::CmPair;
use crate::units::ThetaCertificate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("prime {0} divides the polynomial discriminant")]
    RamifiedPrime(u32),
    #[error("prime {0} divides a denominator")]
    DenominatorDivisible(u32),
    #[error("residue ring too large to encode")]
    RingTooLarge,
    #[error("matrix entry is not integral")]
    NotIntegral,
    #[error("matrix belongs to another field")]
    FieldMismatch,
    #[error("generator does not have determinant one")]
    NotSpecial,
    #[error("ambient order exceeds the enumeration cap and cannot be counted")]
    CapExceeded,
    #[error("subgroup order does not divide the ambient order")]
    Lagrange,
}

impl VerifyError {
    /// Errors that mean the prime is unsuitable rather than that something failed.
    pub fn is_skip(&self) -> bool {
        matches!(self, VerifyError::NotPrime(_) | VerifyError::RamifiedPrime(_) | VerifyError::DenominatorDivisible(_))
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, VerifyError::CapExceeded | VerifyError::RingTooLarge)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl NamedCheck {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        NamedCheck {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PrimeClosure {
    pub p: u32,
    pub outcome: Result<(ClosureResult, OrderMethod), VerifyError>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail { component: String },
    Unknown { reason: String },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail { .. } => "FAIL",
            Verdict::Unknown { .. } => "UNKNOWN",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub case: CaseTag,
    pub r: u32,
    pub checks: Vec<NamedCheck>,
    pub closures: Vec<PrimeClosure>,
    pub theta: Option<ThetaCertificate>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    pub closure_cap: usize,
    pub enum_cap: u64,
    pub allow_ramified: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            closure_cap: DEFAULT_CLOSURE_CAP,
            enum_cap: DEFAULT_ENUM_CAP,
            allow_ramified: false,
        }
    }
}

/// Word certificate to re-check; `embedding` maps its targets into the
/// triple's field when the certificate was built over a subfield.
#[derive(Clone, Copy)]
pub struct ElementaryEvidence<'a> {
    pub cert: &'a ElementaryCertificate,
    pub embedding: Option<&'a CmPair>,
}

/// Reduces the generators mod `p` and closes them up.
pub fn closure_mod_p(
    gens: &[crate::matgroup::MatN],
    p: u32,
    opts: &CertifyOptions,
) -> Result<(ClosureResult, OrderMethod), VerifyError> {
    let first = gens.first().ok_or(VerifyError::NotSpecial)?;
    let ring = ResidueRing::new(first.field(), p, opts.allow_ramified)?;
    let reduced = gens.iter().map(|g| reduce_mod(g, &ring)).collect::<Result<Vec<_>, _>>()?;
    let (ambient, method) = ambient_order(&ring, first.size(), opts.enum_cap)?;
    Ok((closure(&reduced, &ring, &ambient, opts.closure_cap)?, method))
}

/// Folds named checks and per-prime closures into a single verdict.
pub fn verdict_from(checks: &[NamedCheck], closures: &[PrimeClosure]) -> Verdict {
    if let Some(c) = checks.iter().find(|c| !c.passed) {
        return Verdict::Fail {
            component: c.name.clone(),
        };
    }
    let mut unknown = None;
    for pc in closures {
        match &pc.outcome {
            Ok((res, _)) => match res.surjective {
                Surjectivity::No => {
                    return Verdict::Fail {
                        component: format!("closure mod {}", pc.p),
                    }
                }
                Surjectivity::Unknown => {
                    unknown.get_or_insert_with(|| format!("closure mod {} reached the element cap", pc.p));
                }
                Surjectivity::Yes => {}
            },
            Err(e) if e.is_skip() => {}
            Err(e) => {
                unknown.get_or_insert_with(|| format!("mod {}: {e}", pc.p));
            }
        }
    }
    match unknown {
        Some(reason) => Verdict::Unknown { reason },
        None => Verdict::Pass,
    }
}

/// Re-checks word identities and the theta data, then closes the reduced
/// generators modulo each prime.
pub fn certify(
    triple: &GeneratorTriple,
    primes: &[u32],
    elementary: Option<ElementaryEvidence<'_>>,
    theta: Option<&ThetaCertificate>,
    opts: &CertifyOptions,
) -> Certificate {
    let mut checks = Vec::new();
    let gens = triple.matrices();
    let special = gens.iter().all(|g| g.det().is_one());
    let integral = gens.iter().all(|g| g.is_integral());
    checks.push(NamedCheck::new(
        "generators_in_sl",
        special && integral,
        format!("det one: {special}, integral: {integral}"),
    ));
    if let Some(t) = theta {
        let (ok, detail) = match crate::numberfield::subring_index(&t.theta, triple.r) {
            Ok(crate::numberfield::SubringIndex::Finite(i)) => (true, format!("[O : Z[theta^{}]] = {i}", triple.r)),
            Ok(crate::numberfield::SubringIndex::Infinite) => (false, "infinite index".to_string()),
            Err(e) => (false, e.to_string()),
        };
        checks.push(NamedCheck::new("theta_index", ok, detail));
    }
    if let Some(ev) = elementary {
        let embed = |x: &crate::numberfield::FieldElement| match ev.embedding {
            Some(cm) => cm.embed(x),
            None => x.clone(),
        };
        let words = triple
            .alphabet()
            .and_then(|a| ev.cert.verify_words(&a, &embed));
        let (ok, detail) = match words {
            Ok(true) => (true, format!("{} words re-evaluated", ev.cert.entries.len())),
            Ok(false) => (false, "a word does not evaluate to its elementary matrix".to_string()),
            Err(e) => (false, e.to_string()),
        };
        checks.push(NamedCheck::new("word_identities", ok, detail));
        checks.push(NamedCheck::new(
            "n_lattice_containment",
            ev.cert.n_contained(),
            format!("N = {}", ev.cert.n),
        ));
    }
    let closures: Vec<PrimeClosure> = primes
        .iter()
        .map(|&p| PrimeClosure {
            p,
            outcome: closure_mod_p(&gens, p, opts),
        })
        .collect();
    for pc in &closures {
        if let Ok((res, _)) = &pc.outcome {
            checks.push(NamedCheck::new(
                &format!("lagrange_mod_{}", pc.p),
                res.lagrange_holds(),
                format!("{} elements", res.subgroup_order),
            ));
        }
    }
    let verdict = verdict_from(&checks, &closures);
    Certificate {
        case: triple.case,
        r: triple.r,
        checks,
        closures,
        theta: theta.cloned(),
        verdict,
    }
}
