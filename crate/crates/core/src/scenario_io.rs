//! Scenario files: JSON ingestion, canonical serialization and reproducible
//! random generation.
//!
//! Files are UTF-8 JSON with `schema_version` "1". Two model variants exist:
//! `"physical"` carries gains, signatures and receivers; `"derived"` carries
//! the coefficients `A` and `Cdiag` directly. `save` is canonical (sorted
//! keys, shortest round-trip decimals, trailing newline), so identical
//! scenarios always produce identical bytes. Generation uses ChaCha8 seeded
//! from a `u64`, which is stable across platforms.

use std::collections::BTreeSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::link_model::{ModelSpec, Scenario};
use crate::projection::{box_constraints, total_budget, ConstraintSet, Halfspace};

pub const SCHEMA_VERSION: &str = "1";

/// Objective requested by a scenario file; `NashGame` picks its caps up from
/// the constraint block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveSpec {
    Sum,
    Lq { q: f64 },
    NashGame,
}

/// A parsed scenario document.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDoc {
    pub scenario: Scenario<f64>,
    pub objective: Option<ObjectiveSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawFile {
    schema_version: String,
    scenario: RawScenario,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective: Option<RawObjective>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawScenario {
    model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    gains: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    signatures: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    receivers: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cdiag: Option<Vec<f64>>,
    sigma2: f64,
    gamma: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constraints: Option<RawConstraints>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawConstraints {
    #[serde(skip_serializing_if = "Option::is_none")]
    pmax: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    halfspaces: Option<Vec<RawHalfspace>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawHalfspace {
    normal: Vec<f64>,
    offset: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawObjective {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
}

/// How to treat unknown JSON keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// Unknown keys are an error.
    Strict,
    /// Unknown keys produce warnings.
    Lenient,
}

fn known_keys(path: &str) -> Option<&'static [&'static str]> {
    match path {
        "" => Some(&["schema_version", "scenario", "objective"]),
        "scenario" => Some(&[
            "model",
            "gains",
            "signatures",
            "receivers",
            "a",
            "cdiag",
            "sigma2",
            "gamma",
            "constraints",
        ]),
        "scenario.constraints" => Some(&["pmax", "total_power", "halfspaces"]),
        "objective" => Some(&["kind", "q"]),
        _ if path.starts_with("scenario.constraints.halfspaces") => Some(&["normal", "offset"]),
        _ => None,
    }
}

fn collect_unknown(value: &Value, path: &str, unknown: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            if let Some(keys) = known_keys(path) {
                let allowed: BTreeSet<&str> = keys.iter().copied().collect();
                for key in map.keys() {
                    if !allowed.contains(key.as_str()) {
                        let full = if path.is_empty() {
                            key.clone()
                        } else {
                            format!("{path}.{key}")
                        };
                        unknown.push(full);
                    }
                }
            }
            for (key, v) in map {
                let child = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                collect_unknown(v, &child, unknown);
            }
        }
        Value::Array(items) => {
            for v in items {
                collect_unknown(v, path, unknown);
            }
        }
        _ => {}
    }
}

fn parse_err(message: impl Into<String>) -> Error {
    Error::Parse {
        location: "document".into(),
        message: message.into(),
    }
}

fn require<V>(field: &str, v: Option<V>) -> Result<V> {
    v.ok_or_else(|| Error::Validation {
        field: field.into(),
        reason: "required for this model variant".into(),
    })
}

fn build_constraints(raw: &RawConstraints, k: usize) -> Result<ConstraintSet<f64>> {
    let mut cs = ConstraintSet::default();
    if let Some(pmax) = &raw.pmax {
        if pmax.len() != k {
            return Err(Error::Validation {
                field: "constraints.pmax".into(),
                reason: format!("expected length {k}"),
            });
        }
        cs = cs.intersect(box_constraints(pmax)?);
    }
    if let Some(total) = raw.total_power {
        cs = cs.intersect(total_budget(total, k)?);
    }
    if let Some(halfspaces) = &raw.halfspaces {
        let hs: Result<Vec<_>> = halfspaces
            .iter()
            .map(|h| Halfspace::new(h.normal.clone(), h.offset))
            .collect();
        cs = cs.intersect(ConstraintSet::new(hs?));
    }
    cs.validate(k)?;
    Ok(cs)
}

fn doc_from_raw(raw: RawFile) -> Result<ScenarioDoc> {
    if raw.schema_version != SCHEMA_VERSION {
        return Err(Error::Validation {
            field: "schema_version".into(),
            reason: format!("expected \"{SCHEMA_VERSION}\", got \"{}\"", raw.schema_version),
        });
    }
    let k = raw.scenario.gamma.len();
    let model = match raw.scenario.model.as_str() {
        "physical" => {
            let gains = require("scenario.gains", raw.scenario.gains)?;
            let signatures = require("scenario.signatures", raw.scenario.signatures)?;
            let receivers = raw.scenario.receivers.unwrap_or_else(|| signatures.clone());
            ModelSpec::Physical {
                gains: Matrix::from_rows(gains)?,
                signatures,
                receivers,
            }
        }
        "derived" => ModelSpec::Derived {
            a: Matrix::from_rows(require("scenario.a", raw.scenario.a)?)?,
            cdiag: require("scenario.cdiag", raw.scenario.cdiag)?,
        },
        other => {
            return Err(Error::Validation {
                field: "scenario.model".into(),
                reason: format!("unknown variant \"{other}\""),
            })
        }
    };
    let constraints = raw
        .scenario
        .constraints
        .as_ref()
        .map(|c| build_constraints(c, k))
        .transpose()?;
    let scenario = Scenario {
        model,
        sigma2: raw.scenario.sigma2,
        gamma: raw.scenario.gamma,
        constraints,
    };
    scenario.validate()?;
    let objective = raw
        .objective
        .map(|o| match o.kind.as_str() {
            "sum" => Ok(ObjectiveSpec::Sum),
            "lq" => Ok(ObjectiveSpec::Lq {
                q: require("objective.q", o.q)?,
            }),
            "nash_game" => Ok(ObjectiveSpec::NashGame),
            other => Err(Error::Validation {
                field: "objective.kind".into(),
                reason: format!("unknown kind \"{other}\""),
            }),
        })
        .transpose()?;
    if let Some(ObjectiveSpec::Lq { q }) = objective {
        if !(q.is_finite() && q >= 1.0) {
            return Err(Error::Validation {
                field: "objective.q".into(),
                reason: "must be >= 1".into(),
            });
        }
    }
    Ok(ScenarioDoc { scenario, objective })
}

/// Parses a scenario document, returning warnings for unknown keys in
/// lenient mode.
pub fn load_str_with(input: &str, strictness: Strictness) -> Result<(ScenarioDoc, Vec<String>)> {
    let value: Value = serde_json::from_str(input).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let mut unknown = Vec::new();
    collect_unknown(&value, "", &mut unknown);
    if strictness == Strictness::Strict {
        if let Some(field) = unknown.first() {
            return Err(Error::Validation {
                field: field.clone(),
                reason: "unknown field".into(),
            });
        }
    }
    let raw: RawFile = serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))?;
    let warnings = unknown
        .into_iter()
        .map(|f| format!("ignoring unknown field `{f}`"))
        .collect();
    Ok((doc_from_raw(raw)?, warnings))
}

/// Strict parse from a string.
pub fn load_str(input: &str) -> Result<ScenarioDoc> {
    load_str_with(input, Strictness::Strict).map(|(doc, _)| doc)
}

/// Strict parse from a file.
pub fn load(path: impl AsRef<Path>) -> Result<ScenarioDoc> {
    load_str(&std::fs::read_to_string(path)?)
}

fn raw_from_doc(doc: &ScenarioDoc) -> RawFile {
    let scn = &doc.scenario;
    let (model, gains, signatures, receivers, a, cdiag) = match &scn.model {
        ModelSpec::Physical {
            gains,
            signatures,
            receivers,
        } => (
            "physical".to_string(),
            Some((0..gains.nrows()).map(|i| gains.row(i).to_vec()).collect()),
            Some(signatures.clone()),
            Some(receivers.clone()),
            None,
            None,
        ),
        ModelSpec::Derived { a, cdiag } => (
            "derived".to_string(),
            None,
            None,
            None,
            Some((0..a.nrows()).map(|i| a.row(i).to_vec()).collect()),
            Some(cdiag.clone()),
        ),
    };
    let constraints = scn.constraints.as_ref().map(|cs| RawConstraints {
        pmax: None,
        total_power: None,
        halfspaces: Some(
            cs.halfspaces
                .iter()
                .map(|h| RawHalfspace {
                    normal: h.normal.clone(),
                    offset: h.offset,
                })
                .collect(),
        ),
    });
    let objective = doc.objective.map(|o| match o {
        ObjectiveSpec::Sum => RawObjective {
            kind: "sum".into(),
            q: None,
        },
        ObjectiveSpec::Lq { q } => RawObjective {
            kind: "lq".into(),
            q: Some(q),
        },
        ObjectiveSpec::NashGame => RawObjective {
            kind: "nash_game".into(),
            q: None,
        },
    });
    RawFile {
        schema_version: SCHEMA_VERSION.into(),
        scenario: RawScenario {
            model,
            gains,
            signatures,
            receivers,
            a,
            cdiag,
            sigma2: scn.sigma2,
            gamma: scn.gamma.clone(),
            constraints,
        },
        objective,
    }
}

/// Canonical serialization: sorted keys, shortest round-trip decimals,
/// trailing newline. Identical documents serialize to identical bytes.
pub fn to_canonical_string(doc: &ScenarioDoc) -> Result<String> {
    doc.scenario.validate()?;
    let value = serde_json::to_value(raw_from_doc(doc)).map_err(|e| parse_err(e.to_string()))?;
    let mut out = serde_json::to_string_pretty(&value).map_err(|e| parse_err(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

/// Writes the canonical form to a file.
pub fn save(doc: &ScenarioDoc, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_canonical_string(doc)?)?;
    Ok(())
}

/// Parameters for reproducible random scenario generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub users: usize,
    pub processing_gain: usize,
    /// Ratio by which own-cell gains dominate cross gains; larger is easier.
    pub near_far: f64,
    /// Scale of the SIR targets; larger pushes toward infeasibility.
    pub gamma_scale: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            users: 4,
            processing_gain: 8,
            near_far: 10.0,
            gamma_scale: 1.0,
        }
    }
}

/// Deterministic random scenario: unit-norm random signatures, matched-filter
/// receivers, own-cell gains dominating cross gains by the near-far ratio.
pub fn generate(cfg: &GeneratorConfig) -> Scenario<f64> {
    assert!(cfg.users >= 1 && cfg.processing_gain >= 1);
    assert!(cfg.near_far > 0.0 && cfg.gamma_scale > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = cfg.users;
    let n = cfg.processing_gain;

    let mut signatures = Vec::with_capacity(k);
    for _ in 0..k {
        loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                signatures.push(v.into_iter().map(|x| x / norm).collect::<Vec<f64>>());
                break;
            }
        }
    }

    let mut gains = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let u: f64 = rng.gen();
            gains[(i, j)] = if i == j {
                1.0 + u
            } else {
                u / cfg.near_far
            };
        }
    }

    let gamma: Vec<f64> = (0..k)
        .map(|_| cfg.gamma_scale * (0.5 + rng.gen::<f64>()))
        .collect();

    Scenario {
        model: ModelSpec::Physical {
            gains,
            signatures: signatures.clone(),
            receivers: signatures,
        },
        sigma2: 0.01,
        gamma,
        constraints: None,
    }
}
