use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use trigen_core::numberfield::{CmPair, FieldElement, FieldRef, NumberField};
use trigen_core::units::{UnitSource, DEFAULT_R_MAX};
use trigen_core::verify::{CertifyOptions, DEFAULT_CLOSURE_CAP, DEFAULT_ENUM_CAP};
use trigen_core::CaseTag;

use crate::CliError;

/// An exact number in a config: a decimal string (`"-3"`, `"1/2"`) or a
/// plain JSON integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Str(String),
    Int(i64),
}

impl Num {
    pub fn text(&self) -> String {
        match self {
            Num::Str(s) => s.trim().to_string(),
            Num::Int(i) => i.to_string(),
        }
    }
}

/// Integral-basis coordinates of one element.
pub type Coords = Vec<Num>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum UnitsConfig {
    #[default]
    Pell,
    Configured {
        units: Vec<Coords>,
    },
    Search {
        height_bound: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Su21Config {
    /// Element whose square is a positive rational and which the
    /// conjugation negates.
    pub sqrt_z: Coords,
    /// Image of the field generator under the order-two automorphism.
    pub conjugation: Coords,
    pub t: Coords,
    /// Unit with `theta * conj(theta) = 1`.
    pub theta: Coords,
    #[serde(default = "default_height")]
    pub height: i64,
}

fn default_height() -> i64 {
    3
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlnConfig {
    /// Rows of the `(n-1) x (n-1)` Levi block; each entry is a coordinate vector.
    pub levi: Vec<Vec<Coords>>,
    pub column: Vec<Coords>,
    pub exponents: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub name: String,
    /// Defining polynomial, constant term first.
    pub coefficients: Vec<Num>,
    /// Rows give the integral basis in power-basis coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral_basis: Option<Vec<Vec<Num>>>,
    #[serde(default)]
    pub units: Option<UnitsConfig>,
    /// Name of another declared field, the totally real subfield.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subfield: Option<String>,
    /// Image of the subfield generator, in this field's integral basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Coords>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Coords>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Coords>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub su21: Option<Su21Config>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sln: Option<SlnConfig>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub field: String,
    pub case: CaseTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    #[serde(default = "default_closure_cap")]
    pub closure: usize,
    #[serde(default = "default_enum_cap")]
    pub enumeration: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            closure: DEFAULT_CLOSURE_CAP,
            enumeration: DEFAULT_ENUM_CAP,
        }
    }
}

fn default_closure_cap() -> usize {
    DEFAULT_CLOSURE_CAP
}

fn default_enum_cap() -> u64 {
    DEFAULT_ENUM_CAP
}

fn default_r_values() -> Vec<u32> {
    vec![1]
}

fn default_r_max() -> u32 {
    DEFAULT_R_MAX
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub fields: Vec<FieldConfig>,
    #[serde(default)]
    pub cases: Vec<CaseConfig>,
    #[serde(default = "default_r_values")]
    pub r_values: Vec<u32>,
    #[serde(default)]
    pub primes: Vec<u32>,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default = "default_r_max")]
    pub r_max: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<JobConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<JobConfig, CliError> {
        let cfg: JobConfig = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn field(&self, name: &str) -> Option<&FieldConfig> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn options(&self) -> CertifyOptions {
        CertifyOptions {
            closure_cap: self.caps.closure,
            enum_cap: self.caps.enumeration,
            allow_ramified: false,
        }
    }

    /// Cross-references the schema cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        let schema = |m: String| Err(CliError::Schema(m));
        let mut names = HashSet::new();
        for f in &self.fields {
            if !names.insert(f.name.as_str()) {
                return schema(format!("field {} declared twice", f.name));
            }
        }
        for f in &self.fields {
            if let Some(s) = &f.subfield {
                if !names.contains(s.as_str()) {
                    return schema(format!("field {}: subfield {s} is not declared", f.name));
                }
                if f.embedding.is_none() {
                    return schema(format!("field {}: subfield needs an embedding", f.name));
                }
            }
        }
        if self.r_values.contains(&0) || self.r_max == 0 {
            return schema("r values must be positive".into());
        }
        if self.caps.closure == 0 {
            return schema("closure cap must be positive".into());
        }
        for c in &self.cases {
            let Some(f) = self.field(&c.field) else {
                return schema(format!("case {} refers to undeclared field {}", c.case, c.field));
            };
            let missing = |what: &str| schema(format!("{} case on field {} needs {what}", c.case, c.field));
            match c.case {
                CaseTag::Sl2Cm | CaseTag::Sl2CmPrime if f.subfield.is_none() => return missing("a subfield"),
                CaseTag::Sl2Cm if f.alpha.is_none() => return missing("alpha"),
                CaseTag::Sl2CmPrime if f.x.is_none() => return missing("x"),
                CaseTag::Su21 if f.su21.is_none() => return missing("su21 parameters"),
                CaseTag::SlnMultone if f.sln.is_none() => return missing("sln parameters"),
                _ => {}
            }
        }
        Ok(())
    }
}

fn parse_int(n: &Num) -> Result<BigInt, CliError> {
    let s = n.text();
    s.parse()
        .map_err(|_| CliError::Schema(format!("expected an integer, found {s:?}")))
}

/// Fields built from a config, with subfield links resolved.
pub struct FieldTable {
    fields: BTreeMap<String, FieldRef>,
}

impl FieldTable {
    pub fn build(cfg: &JobConfig) -> Result<FieldTable, CliError> {
        let mut fields = BTreeMap::new();
        for f in &cfg.fields {
            let poly = f.coefficients.iter().map(parse_int).collect::<Result<Vec<_>, _>>()?;
            let basis = match &f.integral_basis {
                None => None,
                Some(rows) => Some(
                    rows.iter()
                        .map(|row| {
                            row.iter()
                                .map(|c| {
                                    let s = c.text();
                                    trigen_core::numberfield::parse_rational(&s)
                                        .map_err(|e| CliError::Schema(format!("field {}: {e}", f.name)))
                                })
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
            };
            let k = NumberField::new(poly, basis).map_err(|e| CliError::Schema(format!("field {}: {e}", f.name)))?;
            fields.insert(f.name.clone(), k);
        }
        Ok(FieldTable { fields })
    }

    pub fn get(&self, name: &str) -> Result<&FieldRef, CliError> {
        self.fields
            .get(name)
            .ok_or_else(|| CliError::Schema(format!("undeclared field {name}")))
    }
}

pub fn element(k: &FieldRef, coords: &Coords, what: &str) -> Result<FieldElement, CliError> {
    let strings: Vec<String> = coords.iter().map(Num::text).collect();
    FieldElement::parse_basis_coords(k, &strings).map_err(|e| CliError::Schema(format!("{what}: {e}")))
}

pub fn unit_source(k: &FieldRef, units: Option<&UnitsConfig>) -> Result<UnitSource, CliError> {
    Ok(match units {
        None | Some(UnitsConfig::Pell) => UnitSource::Pell,
        Some(UnitsConfig::Search { height_bound }) => UnitSource::Search {
            height_bound: *height_bound,
        },
        Some(UnitsConfig::Configured { units }) => UnitSource::Configured(
            units
                .iter()
                .map(|u| element(k, u, "configured unit"))
                .collect::<Result<_, _>>()?,
        ),
    })
}

pub fn cm_pair(table: &FieldTable, f: &FieldConfig) -> Result<CmPair, CliError> {
    let sub = f.subfield.as_deref().ok_or_else(|| CliError::Schema(format!("{} has no subfield", f.name)))?;
    let e = table.get(&f.name)?.clone();
    let s = table.get(sub)?.clone();
    let emb = element(&e, f.embedding.as_ref().expect("validated"), "embedding")?;
    CmPair::new(e, s, emb).map_err(|e| CliError::Schema(format!("field {}: {e}", f.name)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"fields": [{"name": "Q2", "coefficients": ["-2", "0", "1"]}]"#;

    #[test]
    fn defaults_and_numbers() {
        let cfg = JobConfig::parse(&format!("{BASE}}}")).unwrap();
        assert!(cfg.cases.is_empty());
        assert_eq!(cfg.r_values, vec![1]);
        assert_eq!(cfg.caps, Caps::default());
        let t = FieldTable::build(&cfg).unwrap();
        let k = t.get("Q2").unwrap();
        let x = element(k, &vec![Num::Int(1), Num::Str("1/2".into())], "x").unwrap();
        assert_eq!(x.to_coord_strings(), vec!["1", "1/2"]);
    }

    #[test]
    fn schema_errors() {
        let bad = [
            format!(r#"{BASE}, "cases": [{{"field": "Q3", "case": "SL2_NONCM"}}]}}"#),
            format!(r#"{BASE}, "cases": [{{"field": "Q2", "case": "SL2_CM"}}]}}"#),
            format!(r#"{BASE}, "cases": [{{"field": "Q2", "case": "NOPE"}}]}}"#),
            format!(r#"{BASE}, "cases": [{{"field": "Q2", "case": "SU21"}}]}}"#),
            format!(r#"{BASE}, "r_values": [0]}}"#),
            format!(r#"{BASE}, "extra": 1}}"#),
        ];
        for text in bad {
            assert!(matches!(JobConfig::parse(&text), Err(CliError::Schema(_))), "{text}");
        }
    }

    #[test]
    fn reducible_polynomial_is_a_user_error() {
        let cfg = JobConfig::parse(r#"{"fields": [{"name": "bad", "coefficients": ["-4", "0", "1"]}]}"#).unwrap();
        assert!(matches!(FieldTable::build(&cfg), Err(CliError::Schema(_))));
    }
}
