//! Explicit generating sets and word certificates.

mod cmprime;
mod elementary;
mod multone;

pub use cmprime::{cmprime_g_element, congruent_unit_power, CmPrimeElement};
pub use elementary::{elementary_words, ElementaryCertificate, ElementaryEntry};
pub use multone::{build_sln_multone, levi_element, WedgeReport};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matgroup::{Alphabet, GroupError, MatN, Su21Setting};
use crate::numberfield::{
    same_field, totally_positive, subring_index, CmPair, FieldElement, FieldError, FieldRef, SubringIndex,
};
use crate::units::{ThetaCertificate, UnitError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("the rational field has no suitable units")]
    RationalField,
    #[error("unit rank 0")]
    UnitRankZero,
    #[error("theta does not belong to the expected field")]
    ThetaFieldMismatch,
    #[error("Z[theta^{0}] has infinite index")]
    InfiniteIndex(u32),
    #[error("alpha^2 must be minus a totally positive element of the subfield: {0}")]
    AlphaForm(String),
    #[error("x has zero relative trace; use the CM construction instead")]
    TraceZero,
    #[error("x lies in the subfield")]
    XInSubfield,
    #[error("theta = 1 gives a degenerate element")]
    DegenerateTheta,
    #[error("theta is not congruent to 1 modulo the relative trace")]
    ThetaNotCongruent,
    #[error("element is not integral")]
    NotIntegral,
    #[error("reachable lattice has rank {rank}, need {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error("coefficient {0} does not fit in a word exponent")]
    CoefficientOverflow(String),
    #[error("wedge determinant vanishes for the {0} unipotent")]
    WedgeZero(&'static str),
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("r must be positive")]
    ZeroPower,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Unit(#[from] UnitError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "SL2_NONCM")]
    Sl2NonCm,
    #[serde(rename = "SL2_CM")]
    Sl2Cm,
    #[serde(rename = "SL2_CMPRIME")]
    Sl2CmPrime,
    #[serde(rename = "SU21")]
    Su21,
    #[serde(rename = "SLN_MULTONE")]
    SlnMultone,
}

impl CaseTag {
    pub const ALL: [CaseTag; 5] = [
        CaseTag::Sl2NonCm,
        CaseTag::Sl2Cm,
        CaseTag::Sl2CmPrime,
        CaseTag::Su21,
        CaseTag::SlnMultone,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Sl2NonCm => "SL2_NONCM",
            CaseTag::Sl2Cm => "SL2_CM",
            CaseTag::Sl2CmPrime => "SL2_CMPRIME",
            CaseTag::Su21 => "SU21",
            CaseTag::SlnMultone => "SLN_MULTONE",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        CaseTag::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown case `{s}`"))
    }
}

/// Named generators for one case, plus free-form data on how they were made.
#[derive(Clone, Debug)]
pub struct GeneratorTriple {
    pub case: CaseTag,
    pub gens: Vec<(String, MatN)>,
    pub r: u32,
    pub provenance: BTreeMap<String, String>,
}

impl GeneratorTriple {
    pub fn field(&self) -> &FieldRef {
        self.gens[0].1.field()
    }

    pub fn size(&self) -> usize {
        self.gens[0].1.size()
    }

    pub fn get(&self, name: &str) -> Option<&MatN> {
        self.gens.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    pub fn names(&self) -> Vec<&str> {
        self.gens.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn matrices(&self) -> Vec<MatN> {
        self.gens.iter().map(|(_, g)| g.clone()).collect()
    }

    /// The same set with one generator dropped.
    pub fn without(&self, name: &str) -> GeneratorTriple {
        GeneratorTriple {
            gens: self.gens.iter().filter(|(n, _)| n != name).cloned().collect(),
            ..self.clone()
        }
    }

    pub fn alphabet(&self) -> Result<Alphabet, GroupError> {
        let mut a = Alphabet::new(self.field(), self.size());
        for (n, g) in &self.gens {
            a.insert(n, g.clone())?;
        }
        Ok(a)
    }
}

fn check_theta(field: &FieldRef, cert: &ThetaCertificate, r: u32) -> Result<(), ConstructError> {
    if r == 0 {
        return Err(ConstructError::ZeroPower);
    }
    if !same_field(cert.theta.field(), field) {
        return Err(ConstructError::ThetaFieldMismatch);
    }
    if cert.index_for(r).is_some() {
        return Ok(());
    }
    match subring_index(&cert.theta, r)? {
        SubringIndex::Finite(_) => Ok(()),
        SubringIndex::Infinite => Err(ConstructError::InfiniteIndex(r)),
    }
}

fn poly_string(field: &FieldRef) -> String {
    field.defining_qpoly().to_string()
}

fn base_provenance(field: &FieldRef, theta: &FieldElement, r: u32) -> BTreeMap<String, String> {
    let mut p = BTreeMap::new();
    p.insert("field".into(), poly_string(field));
    p.insert("theta".into(), theta.to_string());
    if let Ok(SubringIndex::Finite(i)) = subring_index(theta, r) {
        p.insert("theta_index".into(), i.to_string());
    }
    p
}

/// `{u+^r, u-^r, h(theta)^r}` over a field with units of infinite order.
pub fn build_noncm(field: &FieldRef, theta_cert: &ThetaCertificate, r: u32) -> Result<GeneratorTriple, ConstructError> {
    if field.degree() == 1 {
        return Err(ConstructError::RationalField);
    }
    if field.unit_rank() == 0 {
        return Err(ConstructError::UnitRankZero);
    }
    check_theta(field, theta_cert, r)?;
    let one = FieldElement::one(field);
    let re = i64::from(r);
    let gens = vec![
        ("u+".to_string(), MatN::e12(&one).pow(re)?),
        ("u-".to_string(), MatN::e21(&one).pow(re)?),
        ("h".to_string(), MatN::torus2(&theta_cert.theta)?.pow(re)?),
    ];
    Ok(GeneratorTriple {
        case: CaseTag::Sl2NonCm,
        gens,
        r,
        provenance: base_provenance(field, &theta_cert.theta, r),
    })
}

/// Checks `alpha^2 = -beta` with `beta` a totally positive element of the
/// subfield and returns `beta`.
pub fn alpha_beta(cm: &CmPair, alpha: &FieldElement) -> Result<FieldElement, ConstructError> {
    if !same_field(alpha.field(), &cm.field) {
        return Err(ConstructError::AlphaForm("alpha is not in the CM field".into()));
    }
    if !alpha.is_integral() {
        return Err(ConstructError::NotIntegral);
    }
    let beta = cm
        .restrict(&-(alpha * alpha))
        .ok_or_else(|| ConstructError::AlphaForm("alpha^2 is not in the subfield".into()))?;
    if beta.is_zero() || !totally_positive(&beta)? {
        return Err(ConstructError::AlphaForm(format!("-alpha^2 = {beta} is not totally positive")));
    }
    Ok(beta)
}

/// `{h(theta)^r, u+^r, u-^r}` with `u- = [[1, 0], [alpha, 1]]` and `theta`
/// from the totally real subfield.
pub fn build_cm(
    cm: &CmPair,
    alpha: &FieldElement,
    theta_cert: &ThetaCertificate,
    r: u32,
) -> Result<GeneratorTriple, ConstructError> {
    let beta = alpha_beta(cm, alpha)?;
    check_theta(&cm.subfield, theta_cert, r)?;
    let e = &cm.field;
    let theta = cm.embed(&theta_cert.theta);
    let re = i64::from(r);
    let gens = vec![
        ("h".to_string(), MatN::torus2(&theta)?.pow(re)?),
        ("u+".to_string(), MatN::e12(&FieldElement::one(e)).pow(re)?),
        ("u-".to_string(), MatN::e21(alpha).pow(re)?),
    ];
    let mut provenance = base_provenance(&cm.subfield, &theta_cert.theta, r);
    provenance.insert("subfield".into(), poly_string(&cm.subfield));
    provenance.insert("field".into(), poly_string(e));
    provenance.insert("embedding".into(), cm.embedding.to_string());
    provenance.insert("alpha".into(), alpha.to_string());
    provenance.insert("beta".into(), beta.to_string());
    Ok(GeneratorTriple {
        case: CaseTag::Sl2Cm,
        gens,
        r,
        provenance,
    })
}

/// `{h(theta)^r, u+^r, [[1, 0], [r x, 1]]}` for `x` in the CM field but not
/// in the subfield, together with the product element used to reach the
/// lower unipotents over the subfield.
pub fn build_cmprime(
    cm: &CmPair,
    x: &FieldElement,
    theta_cert: &ThetaCertificate,
    r: u32,
) -> Result<(GeneratorTriple, CmPrimeElement), ConstructError> {
    check_theta(&cm.subfield, theta_cert, r)?;
    let (_, theta_k) = congruent_unit_power(cm, &theta_cert.theta, x)?;
    let g = cmprime_g_element(cm, x, &theta_k)?;
    let e = &cm.field;
    let re = i64::from(r);
    let gens = vec![
        ("h".to_string(), MatN::torus2(&cm.embed(&theta_cert.theta))?.pow(re)?),
        ("u+".to_string(), MatN::e12(&FieldElement::one(e)).pow(re)?),
        ("u-".to_string(), MatN::e21(x).pow(re)?),
    ];
    let mut provenance = base_provenance(&cm.subfield, &theta_cert.theta, r);
    provenance.insert("subfield".into(), poly_string(&cm.subfield));
    provenance.insert("field".into(), poly_string(e));
    provenance.insert("x".into(), x.to_string());
    provenance.insert("congruent_theta".into(), theta_k.to_string());
    Ok((
        GeneratorTriple {
            case: CaseTag::Sl2CmPrime,
            gens,
            r,
            provenance,
        },
        g,
    ))
}

/// `{diag(theta, theta^-2, theta)^r, U_2a generator with x = r,
/// transpose of the U+ generator with t = 1, u = 1, x = r}`.
pub fn build_su21(
    setting: &Su21Setting,
    t: &FieldElement,
    theta: &FieldElement,
    r: u32,
) -> Result<GeneratorTriple, ConstructError> {
    if r == 0 {
        return Err(ConstructError::ZeroPower);
    }
    if !theta.is_integral() || !(theta * &setting.conj().apply(theta)).is_one() {
        return Err(ConstructError::Group(GroupError::Malformed(
            "theta must be an integral unit with theta * conj(theta) = 1".into(),
        )));
    }
    if t.as_rational().is_some() {
        return Err(ConstructError::Group(GroupError::Malformed("t must not be rational".into())));
    }
    let k = setting.field();
    let re = i64::from(r);
    let one = FieldElement::one(k);
    let gens = vec![
        ("h".to_string(), setting.torus(theta)?.pow(re)?),
        ("u2a".to_string(), setting.center_generator(t, re)?),
        ("u-".to_string(), setting.full_generator(&one, re, &one)?.transpose()),
    ];
    for (name, g) in &gens {
        if !setting.check(g) {
            return Err(ConstructError::Group(GroupError::Malformed(format!(
                "generator {name} is not in SU(2,1)"
            ))));
        }
    }
    let mut provenance = BTreeMap::new();
    provenance.insert("field".into(), poly_string(k));
    provenance.insert("sqrt_z".into(), setting.sqrt_z.to_string());
    provenance.insert("conjugation".into(), setting.conj().image().to_string());
    provenance.insert("t".into(), t.to_string());
    provenance.insert("theta".into(), theta.to_string());
    Ok(GeneratorTriple {
        case: CaseTag::Su21,
        gens,
        r,
        provenance,
    })
}

pub(crate) fn to_i64(x: &BigInt) -> Result<i64, ConstructError> {
    i64::try_from(x).map_err(|_| ConstructError::CoefficientOverflow(x.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::NumberField;
    use crate::units::{select_theta, UnitSource, DEFAULT_R_MAX};

    fn q2() -> FieldRef {
        NumberField::from_coefficients(&[-2, 0, 1]).unwrap()
    }

    fn zeta8_pair() -> CmPair {
        let e = NumberField::from_coefficients(&[1, 0, 0, 0, 1]).unwrap();
        let z = FieldElement::generator(&e);
        let emb = &z - &z.pow(3).unwrap();
        CmPair::new(e, q2(), emb).unwrap()
    }

    #[test]
    fn noncm_sqrt2() {
        let k = q2();
        let cert = select_theta(&k, &UnitSource::Pell, DEFAULT_R_MAX).unwrap();
        let t = build_noncm(&k, &cert, 1).unwrap();
        let s = FieldElement::generator(&k);
        let one = FieldElement::one(&k);
        assert_eq!(t.get("u+").unwrap(), &MatN::from_ints(&k, &[&[1, 1], &[0, 1]]).unwrap());
        assert_eq!(t.get("u-").unwrap(), &MatN::from_ints(&k, &[&[1, 0], &[1, 1]]).unwrap());
        assert_eq!(t.get("h").unwrap(), &MatN::diag(&k, &[&one + &s, &s - &one]));
        let t2 = build_noncm(&k, &cert, 2).unwrap();
        for (n, g) in &t.gens {
            assert_eq!(t2.get(n).unwrap(), &(g * g));
            assert!(g.det().is_one() && g.is_integral());
        }
        assert_eq!(t.without("u-").names(), vec!["u+", "h"]);
    }

    #[test]
    fn noncm_rejections() {
        let qi = NumberField::from_coefficients(&[1, 0, 1]).unwrap();
        let cert = select_theta(&q2(), &UnitSource::Pell, 3).unwrap();
        assert_eq!(build_noncm(&qi, &cert, 1).unwrap_err(), ConstructError::UnitRankZero);
        let q3 = NumberField::from_coefficients(&[-3, 0, 1]).unwrap();
        assert_eq!(build_noncm(&q3, &cert, 1).unwrap_err(), ConstructError::ThetaFieldMismatch);
        assert_eq!(
            build_noncm(&NumberField::rationals(), &cert, 1).unwrap_err(),
            ConstructError::RationalField
        );
    }

    #[test]
    fn cm_triple() {
        let cm = zeta8_pair();
        let i = FieldElement::generator(&cm.field).pow(2).unwrap();
        let cert = select_theta(&cm.subfield, &UnitSource::Pell, DEFAULT_R_MAX).unwrap();
        let t = build_cm(&cm, &i, &cert, 1).unwrap();
        assert_eq!(t.get("u-").unwrap(), &MatN::e21(&i));
        let t3 = build_cm(&cm, &i, &cert, 3).unwrap();
        assert_eq!(t3.get("h").unwrap(), &t.get("h").unwrap().pow(3).unwrap());
        assert_eq!(t3.get("u-").unwrap(), &MatN::e21(&(&i * &FieldElement::from_int(&cm.field, 3))));
        let sqrt2 = cm.embedding.clone();
        assert!(matches!(build_cm(&cm, &sqrt2, &cert, 1), Err(ConstructError::AlphaForm(_))));
    }

    #[test]
    fn case_tags_round_trip() {
        for c in CaseTag::ALL {
            assert_eq!(c.as_str().parse::<CaseTag>().unwrap(), c);
        }
        assert!("SL2".parse::<CaseTag>().is_err());
    }
}
