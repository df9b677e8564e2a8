use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use trigen_core::construct::ElementaryCertificate;
use trigen_core::matgroup::MatN;
use trigen_core::units::ThetaCertificate;
use trigen_core::verify::{ClosureResult, NamedCheck, OrderMethod, PrimeClosure, Surjectivity};
use trigen_core::{CaseTag, GeneratorTriple, Verdict};

pub const REPORT_VERSION: &str = concat!("trigen ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub jobs: Vec<JobReport>,
    pub summary: Summary,
    /// Wall-clock data; the only part of a report that varies between runs.
    pub timings: Timings,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: u64,
    pub jobs_ms: Vec<u64>,
    pub cache_hits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobInputs {
    pub coefficients: Vec<String>,
    pub integral_basis: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subfield: Option<String>,
    pub primes: Vec<u32>,
    /// Set when irreducibility of a high-degree polynomial was assumed.
    pub irreducibility_trusted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobReport {
    pub field: String,
    pub case: CaseTag,
    pub r: u32,
    pub inputs: JobInputs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaReport>,
    pub generators: Vec<NamedMatrix>,
    pub provenance: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elementary: Option<ElementaryReport>,
    pub checks: Vec<NamedCheck>,
    pub closures: Vec<PrimeReport>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub theta: Vec<String>,
    pub r_checked: u32,
    pub indices: Vec<(u32, String)>,
    pub full_degree: Vec<bool>,
}

impl ThetaReport {
    pub fn from_cert(c: &ThetaCertificate) -> Self {
        ThetaReport {
            theta: c.theta.to_coord_strings(),
            r_checked: c.r_checked,
            indices: c.indices.iter().map(|(r, i)| (*r, i.to_string())).collect(),
            full_degree: c.full_degree.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    /// Rows of entries, each entry an integral-basis coordinate vector.
    pub matrix: Vec<Vec<Vec<String>>>,
}

pub fn matrices(triple: &GeneratorTriple) -> Vec<NamedMatrix> {
    triple
        .gens
        .iter()
        .map(|(name, g)| NamedMatrix {
            name: name.clone(),
            matrix: matrix_strings(g),
        })
        .collect()
}

pub fn matrix_strings(g: &MatN) -> Vec<Vec<Vec<String>>> {
    g.rows()
        .iter()
        .map(|row| row.iter().map(|e| e.to_coord_strings()).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordReport {
    pub target: Vec<String>,
    pub multiple: String,
    pub word: Vec<(String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryReport {
    pub n: String,
    pub powers_used: usize,
    pub word_lengths: Vec<u64>,
    pub words: Vec<WordReport>,
}

impl ElementaryReport {
    pub fn from_cert(c: &ElementaryCertificate) -> Self {
        ElementaryReport {
            n: c.n.to_string(),
            powers_used: c.powers_used,
            word_lengths: c.word_lengths(),
            words: c
                .entries
                .iter()
                .map(|e| WordReport {
                    target: e.target.to_coord_strings(),
                    multiple: e.multiple.to_string(),
                    word: e.word.letters.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeStatus {
    Ok,
    Skipped,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeReport {
    pub p: u32,
    pub status: PrimeStatus,
    /// `yes`, `no` or `unknown`; absent unless the closure ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surjective: Option<String>,
    /// Exact, or a lower bound when `surjective` is `unknown`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgroup_order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ambient_order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ambient_method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frontier_peak: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements_visited: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Whether the failure was a resource limit rather than a bad prime.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub resource: bool,
}

fn surj_str(s: Surjectivity) -> &'static str {
    match s {
        Surjectivity::Yes => "yes",
        Surjectivity::No => "no",
        Surjectivity::Unknown => "unknown",
    }
}

fn surj_parse(s: &str) -> Option<Surjectivity> {
    match s {
        "yes" => Some(Surjectivity::Yes),
        "no" => Some(Surjectivity::No),
        "unknown" => Some(Surjectivity::Unknown),
        _ => None,
    }
}

impl PrimeReport {
    pub fn from_closure(pc: &PrimeClosure) -> Self {
        let mut rep = PrimeReport {
            p: pc.p,
            status: PrimeStatus::Ok,
            surjective: None,
            subgroup_order: None,
            ambient_order: None,
            index: None,
            ambient_method: None,
            frontier_peak: None,
            elements_visited: None,
            reason: None,
            resource: false,
        };
        match &pc.outcome {
            Ok((res, method)) => {
                rep.surjective = Some(surj_str(res.surjective).into());
                rep.subgroup_order = Some(res.subgroup_order.to_string());
                rep.ambient_order = Some(res.ambient_order.to_string());
                rep.index = res.index.as_ref().map(|i| i.to_string());
                rep.ambient_method = Some(
                    match method {
                        OrderMethod::Enumerated => "enumerated",
                        OrderMethod::Counted => "counted",
                    }
                    .into(),
                );
                rep.frontier_peak = Some(res.frontier_peak);
                rep.elements_visited = Some(res.elements_visited);
            }
            Err(e) => {
                rep.status = if e.is_skip() { PrimeStatus::Skipped } else { PrimeStatus::Error };
                rep.reason = Some(e.to_string());
                rep.resource = e.is_resource();
            }
        }
        rep
    }

    /// Rebuilds the closure outcome of a successful run, for verdicts over
    /// cached results.
    pub fn to_closure(&self) -> Option<PrimeClosure> {
        if self.status != PrimeStatus::Ok {
            return None;
        }
        let big = |s: &Option<String>| s.as_ref().and_then(|t| t.parse::<BigInt>().ok());
        let res = ClosureResult {
            subgroup_order: self.subgroup_order.as_ref()?.parse().ok()?,
            ambient_order: big(&self.ambient_order)?,
            index: big(&self.index),
            surjective: surj_parse(self.surjective.as_deref()?)?,
            frontier_peak: self.frontier_peak?,
            elements_visited: self.elements_visited?,
        };
        let method = match self.ambient_method.as_deref()? {
            "enumerated" => OrderMethod::Enumerated,
            _ => OrderMethod::Counted,
        };
        Some(PrimeClosure {
            p: self.p,
            outcome: Ok((res, method)),
        })
    }

    /// True when this prime hit the element cap or a size limit.
    pub fn capped(&self) -> bool {
        self.resource || self.surjective.as_deref() == Some("unknown")
    }
}

impl Report {
    pub fn load(path: &std::path::Path) -> Result<Report, crate::CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| crate::CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| crate::CliError::Schema(format!("malformed report: {e}")))
    }

    /// The report with its timings block zeroed, for determinism checks.
    pub fn without_timings(&self) -> Report {
        Report {
            timings: Timings::default(),
            ..self.clone()
        }
    }

    pub fn any_capped(&self) -> bool {
        self.jobs.iter().any(|j| j.closures.iter().any(PrimeReport::capped))
    }
}
