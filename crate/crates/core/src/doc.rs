//! JSON documents: instance and campaign descriptors, report emission,
//! and the serialization conventions shared by all of them.
//!
//! Numbers are emitted with 17 significant digits, enough to round-trip
//! any double exactly, so reports are byte-stable and diffable. Documents
//! echo the descriptor family they were parsed from (a dirac capacity
//! stays `"type": "dirac"` instead of collapsing to a table), which keeps
//! parse -> emit -> parse the identity.

use crate::capacity::{
    Capacity, CapacityError, CapacityFamily, ClosureBias, FiniteSpace, FunctionError,
    SimpleFunction, SpaceError,
};
use crate::homogeneity::{Expect, FuzzConfig, Instance};
use crate::integral::IntegralError;
use crate::semicopula::{Semicopula, SemicopulaError, SemicopulaKind};
use crate::unit::UnitValue;
use serde::{Deserialize, Serialize, Serializer};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits: the shortest count that is injective on `f64`.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes an `f64` as a raw JSON number with 17 significant digits.
pub fn serialize_f64_sig17<S: Serializer>(v: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    let raw = serde_json::value::RawValue::from_string(sig17(*v))
        .map_err(serde::ser::Error::custom)?;
    raw.serialize(serializer)
}

pub fn to_json_pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

/// Hex sha-256 of the canonical (compact) serialization of a document.
/// Stamped into reports so a report names the exact configuration that
/// produced it.
pub fn config_hash<T: Serialize>(doc: &T) -> String {
    let canonical = serde_json::to_string(doc).expect("documents always serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Semicopula(#[from] SemicopulaError),
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error("missing capacity value for subset {0:?}")]
    MissingSubset(String),
    #[error("missing function value for point {0:?}")]
    MissingFunctionValue(String),
    #[error("function assigns a value to unknown point {0:?}")]
    UnknownFunctionPoint(String),
    #[error("document is missing required field {0:?}")]
    MissingField(&'static str),
}

/// Capacity descriptor. `table` lists every subset by comma-joined point
/// labels (the empty subset is `""`); the named families carry only their
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CapacitySpec {
    Table { values: BTreeMap<String, UnitValue> },
    Dirac { point: String },
    NormalizedCardinality,
    MinCapacity,
    MaxCapacity,
    DistortedCounting { samples: Vec<UnitValue> },
}

pub fn build_capacity(space: &Arc<FiniteSpace>, spec: &CapacitySpec) -> Result<Capacity, DocError> {
    match spec {
        CapacitySpec::Table { values } => {
            let mut table: Vec<Option<f64>> = vec![None; space.subset_count()];
            for (key, v) in values {
                let mask = space.parse_subset(key)?;
                table[mask.0 as usize] = Some(v.get());
            }
            let mut dense = Vec::with_capacity(table.len());
            for (i, slot) in table.into_iter().enumerate() {
                match slot {
                    Some(v) => dense.push(v),
                    None => {
                        let label = space.subset_label(crate::capacity::SubsetMask(i as u32));
                        return Err(DocError::MissingSubset(label));
                    }
                }
            }
            Ok(Capacity::from_table(space.clone(), dense)?)
        }
        CapacitySpec::Dirac { point } => Ok(Capacity::dirac(space.clone(), point)?),
        CapacitySpec::NormalizedCardinality => Ok(Capacity::normalized_cardinality(space.clone())),
        CapacitySpec::MinCapacity => Ok(Capacity::min_capacity(space.clone())),
        CapacitySpec::MaxCapacity => Ok(Capacity::max_capacity(space.clone())),
        CapacitySpec::DistortedCounting { samples } => Ok(Capacity::distorted_counting(
            space.clone(),
            samples.iter().map(|v| v.get()).collect(),
        )?),
    }
}

pub fn capacity_spec(capacity: &Capacity) -> CapacitySpec {
    let space = capacity.space();
    match capacity.family() {
        CapacityFamily::Table => CapacitySpec::Table {
            values: space
                .masks()
                .map(|m| {
                    (
                        space.subset_label(m),
                        UnitValue::clamped(capacity.value_f64(m)),
                    )
                })
                .collect(),
        },
        CapacityFamily::Dirac { point } => CapacitySpec::Dirac {
            point: point.clone(),
        },
        CapacityFamily::NormalizedCardinality => CapacitySpec::NormalizedCardinality,
        CapacityFamily::MinCapacity => CapacitySpec::MinCapacity,
        CapacityFamily::MaxCapacity => CapacitySpec::MaxCapacity,
        CapacityFamily::DistortedCounting { samples } => CapacitySpec::DistortedCounting {
            samples: samples.iter().map(|v| UnitValue::clamped(*v)).collect(),
        },
    }
}

/// A fully spelled-out check or integration case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub space: Vec<String>,
    pub capacity: CapacitySpec,
    pub function: BTreeMap<String, UnitValue>,
    pub semicopula: SemicopulaKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<UnitValue>,
}

pub fn parse_instance_document(json: &str) -> Result<InstanceDocument, DocError> {
    Ok(serde_json::from_str(json)?)
}

pub struct InstanceParts {
    pub semicopula: Semicopula,
    pub capacity: Capacity,
    pub function: SimpleFunction,
    pub a: Option<UnitValue>,
}

pub fn build_parts(doc: &InstanceDocument) -> Result<InstanceParts, DocError> {
    let space = Arc::new(FiniteSpace::new(doc.space.iter().cloned())?);
    let capacity = build_capacity(&space, &doc.capacity)?;
    for key in doc.function.keys() {
        if space.index_of(key).is_none() {
            return Err(DocError::UnknownFunctionPoint(key.clone()));
        }
    }
    let values = space
        .labels()
        .iter()
        .map(|l| {
            doc.function
                .get(l)
                .map(|v| v.get())
                .ok_or_else(|| DocError::MissingFunctionValue(l.clone()))
        })
        .collect::<Result<Vec<f64>, DocError>>()?;
    let function = SimpleFunction::from_values(space, values)?;
    let semicopula = Semicopula::from_kind(doc.semicopula.clone())?;
    Ok(InstanceParts {
        semicopula,
        capacity,
        function,
        a: doc.a,
    })
}

pub fn build_instance(doc: &InstanceDocument) -> Result<Instance, DocError> {
    let parts = build_parts(doc)?;
    let a = parts.a.ok_or(DocError::MissingField("a"))?;
    Ok(Instance::new(
        parts.semicopula,
        parts.capacity,
        parts.function,
        a,
    )?)
}

pub fn instance_document(instance: &Instance) -> InstanceDocument {
    let space = instance.space();
    InstanceDocument {
        space: space.labels().to_vec(),
        capacity: capacity_spec(&instance.capacity),
        function: space
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), instance.function.value(i)))
            .collect(),
        semicopula: instance.semicopula.kind().clone(),
        a: Some(instance.a),
    }
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        instance_document(self).serialize(serializer)
    }
}

fn default_max_points() -> usize {
    5
}

/// Fuzz campaign configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignDocument {
    pub semicopula: SemicopulaKind,
    pub trials: u32,
    pub seed: u64,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_grid: Option<Vec<UnitValue>>,
    pub expect: Expect,
    #[serde(default)]
    pub continuous: bool,
    #[serde(default)]
    pub closure: ClosureBias,
}

pub fn parse_campaign_document(json: &str) -> Result<CampaignDocument, DocError> {
    Ok(serde_json::from_str(json)?)
}

pub fn build_campaign(doc: &CampaignDocument) -> Result<(Semicopula, FuzzConfig), DocError> {
    let semicopula = Semicopula::from_kind(doc.semicopula.clone())?;
    let config = FuzzConfig {
        trials: doc.trials,
        seed: doc.seed,
        max_points: doc.max_points,
        value_grid: doc
            .value_grid
            .clone()
            .unwrap_or_else(crate::homogeneity::default_value_grid),
        continuous: doc.continuous,
        closure: doc.closure,
        expect: doc.expect,
    };
    Ok((semicopula, config))
}

pub fn parse_semicopula(json: &str) -> Result<Semicopula, DocError> {
    let kind: SemicopulaKind = serde_json::from_str(json)?;
    Ok(Semicopula::from_kind(kind)?)
}

// ---- report documents emitted by the command-line tool ----

#[derive(Debug, Serialize)]
pub struct IntegrateReportDoc {
    pub value: UnitValue,
    pub argmax_level: UnitValue,
    pub method: crate::integral::IntegralMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<crate::integral::IntegralResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_agrees: Option<bool>,
    pub version: String,
    pub config_hash: String,
}

#[derive(Debug, Serialize)]
pub struct CheckReportDoc {
    pub l: UnitValue,
    pub p: UnitValue,
    #[serde(serialize_with = "serialize_f64_sig17")]
    pub gap: f64,
    pub verdict: crate::homogeneity::CheckVerdict,
    #[serde(serialize_with = "serialize_f64_sig17")]
    pub tolerance: f64,
    pub instance: InstanceDocument,
    pub version: String,
    pub config_hash: String,
}

#[derive(Debug, Serialize)]
pub struct CampaignReportDoc {
    pub semicopula: SemicopulaKind,
    pub trials: u32,
    pub violations: u32,
    #[serde(serialize_with = "serialize_f64_sig17")]
    pub worst_gap: f64,
    pub first_witness: Option<InstanceDocument>,
    pub expect: Expect,
    pub passed: bool,
    pub seed: u64,
    pub version: String,
    pub config_hash: String,
}

impl CampaignReportDoc {
    pub fn from_report(report: &crate::homogeneity::CampaignReport, config_hash: String) -> Self {
        CampaignReportDoc {
            semicopula: report.semicopula.clone(),
            trials: report.trials,
            violations: report.violations,
            worst_gap: report.worst_gap,
            first_witness: report.first_witness.as_ref().map(instance_document),
            expect: report.expect,
            passed: report.passed,
            seed: report.seed,
            version: TOOL_VERSION.to_string(),
            config_hash,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClassifyReportDoc {
    pub name: String,
    pub detected: crate::section::DetectedClass,
    pub declared: crate::semicopula::DeclaredClass,
    pub mismatch: bool,
    pub associativity: crate::semicopula::AssocOutcome,
    pub evidence: crate::section::ClassEvidence,
    pub sections: Vec<crate::section::SectionProfile>,
    pub version: String,
    pub config_hash: String,
}

/// Emitted when classification aborts mid-scan: what failed plus every
/// section that finished before the failure.
#[derive(Debug, Serialize)]
pub struct ClassifyPartialDoc {
    pub error: String,
    pub sections: Vec<crate::section::SectionProfile>,
    pub version: String,
    pub config_hash: String,
}

#[derive(Debug, Serialize)]
pub struct LimitReportDoc {
    pub a: UnitValue,
    pub b: UnitValue,
    pub direction: crate::limit_lab::Direction,
    pub family: crate::limit_lab::LimitFamily,
    #[serde(serialize_with = "serialize_f64_sig17")]
    pub l: f64,
    #[serde(serialize_with = "serialize_f64_sig17")]
    pub p: f64,
    #[serde(serialize_with = "serialize_f64_sig17")]
    pub gap: f64,
    pub verdict: crate::limit_lab::LimitVerdict,
    pub method: crate::limit_lab::LimitMethod,
    pub version: String,
    pub config_hash: String,
}

impl LimitReportDoc {
    pub fn from_outcome(out: &crate::limit_lab::LimitOutcome, config_hash: String) -> Self {
        LimitReportDoc {
            a: out.a,
            b: out.b,
            direction: out.direction,
            family: out.family,
            l: out.l,
            p: out.p,
            gap: out.gap,
            verdict: out.verdict,
            method: out.method,
            version: TOOL_VERSION.to_string(),
            config_hash,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homogeneity::indicator_instance;

    #[test]
    fn sig17_round_trips_awkward_doubles() {
        for v in [0.1, 0.3, 1.0 / 3.0, 0.05, 1.0 - 0.6, f64::MIN_POSITIVE] {
            let text = sig17(v);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{text}");
        }
    }

    #[test]
    fn instance_documents_round_trip_through_emission() {
        let json = r#"{
            "space": ["p", "q"],
            "capacity": {"type": "table", "values": {"": 0, "p": 0.1, "q": 0, "p,q": 1}},
            "function": {"p": 0.8, "q": 0},
            "semicopula": {"type": "cubic"},
            "a": 0.9
        }"#;
        let doc = parse_instance_document(json).unwrap();
        let instance = build_instance(&doc).unwrap();
        let emitted = to_json_pretty(&instance_document(&instance));
        let doc2 = parse_instance_document(&emitted).unwrap();
        assert_eq!(doc, doc2);
        let emitted2 = to_json_pretty(&instance_document(&build_instance(&doc2).unwrap()));
        assert_eq!(emitted, emitted2);
    }

    #[test]
    fn named_capacity_descriptors_survive_emission() {
        let json = r#"{
            "space": ["x", "y", "z"],
            "capacity": {"type": "dirac", "point": "y"},
            "function": {"x": 0.2, "y": 0.4, "z": 0.6},
            "semicopula": {"type": "minimum"},
            "a": 0.5
        }"#;
        let doc = parse_instance_document(json).unwrap();
        let instance = build_instance(&doc).unwrap();
        let echoed = instance_document(&instance);
        assert_eq!(
            echoed.capacity,
            CapacitySpec::Dirac {
                point: "y".to_string()
            }
        );
    }

    #[test]
    fn table_capacity_with_missing_subset_is_rejected() {
        let json = r#"{
            "space": ["p", "q"],
            "capacity": {"type": "table", "values": {"": 0, "p": 0.5, "p,q": 1}},
            "function": {"p": 1, "q": 0},
            "semicopula": {"type": "product"},
            "a": 0.5
        }"#;
        let doc = parse_instance_document(json).unwrap();
        let err = build_instance(&doc).unwrap_err();
        assert!(matches!(err, DocError::MissingSubset(s) if s == "q"));
    }

    #[test]
    fn function_keys_must_match_the_space() {
        let json = r#"{
            "space": ["p"],
            "capacity": {"type": "max_capacity"},
            "function": {"p": 0.5, "ghost": 0.1},
            "semicopula": {"type": "minimum"},
            "a": 0.5
        }"#;
        let doc = parse_instance_document(json).unwrap();
        assert!(matches!(
            build_instance(&doc).unwrap_err(),
            DocError::UnknownFunctionPoint(k) if k == "ghost"
        ));
    }

    #[test]
    fn missing_a_is_reported_by_field_name() {
        let json = r#"{
            "space": ["p"],
            "capacity": {"type": "max_capacity"},
            "function": {"p": 0.5},
            "semicopula": {"type": "minimum"}
        }"#;
        let doc = parse_instance_document(json).unwrap();
        assert!(matches!(
            build_instance(&doc).unwrap_err(),
            DocError::MissingField("a")
        ));
    }

    #[test]
    fn campaign_documents_apply_defaults() {
        let json = r#"{
            "semicopula": {"type": "cubic"},
            "trials": 100,
            "seed": 7,
            "expect": "may_fail"
        }"#;
        let doc = parse_campaign_document(json).unwrap();
        let (s, config) = build_campaign(&doc).unwrap();
        assert_eq!(s.name(), "cubic");
        assert_eq!(config.max_points, 5);
        assert_eq!(config.value_grid.len(), 21);
        assert!(!config.continuous);
        assert_eq!(config.closure, ClosureBias::Upward);
    }

    #[test]
    fn ordinal_sum_descriptor_parses_and_validates() {
        let good = r#"{"type": "ordinal_sum", "summands": [
            {"lo": 0, "hi": 0.5, "base": "product"},
            {"lo": 0.5, "hi": 1, "base": "lukasiewicz"}
        ]}"#;
        let s = parse_semicopula(good).unwrap();
        assert_eq!(s.name(), "ordinal_sum");
        let bad = r#"{"type": "ordinal_sum", "summands": [
            {"lo": 0, "hi": 0.6, "base": "product"},
            {"lo": 0.5, "hi": 1, "base": "lukasiewicz"}
        ]}"#;
        assert!(parse_semicopula(bad).is_err());
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let s = Semicopula::builtin("cubic").unwrap();
        let u = |v: f64| UnitValue::new(v).unwrap();
        let inst = indicator_instance(&s, u(0.9), u(0.8), u(0.1));
        let doc = instance_document(&inst);
        let h1 = config_hash(&doc);
        let h2 = config_hash(&doc);
        assert_eq!(h1, h2);
        assert_eq!(h1.len(), 64);
        let mut other = doc.clone();
        other.a = Some(u(0.5));
        assert_ne!(h1, config_hash(&other));
    }
}
