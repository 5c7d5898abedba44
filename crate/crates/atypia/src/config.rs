//! JSON configuration schemas for the CLI: constraint-set descriptions and
//! run parameters. Schemas are strict — unknown keys are rejected before any
//! computation starts.

use nalgebra::{Complex, DMatrix};

use crate::qstate::HermitianObservable;
use crate::solver::{
    BlochPredicate, ConstraintKind, ConstraintSet, LinearConstraint, Relation, SpectralConstraint,
    SpectralFn,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("config schema: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("config invalid: {0}")]
    Invalid(String),
}

/// An observable in a config file: dense complex matrix (rows of `[re, im]`
/// pairs), a diagonal shorthand, or a rank-k projector shorthand.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ObservableSpec {
    Dense(Vec<Vec<[f64; 2]>>),
    Diag { diag: Vec<f64> },
    Projector { projector_rank_k: usize },
}

impl ObservableSpec {
    pub fn to_observable(&self, m: usize) -> Result<HermitianObservable, ConfigError> {
        let obs = match self {
            ObservableSpec::Dense(rows) => {
                if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                    return Err(ConfigError::Invalid(format!(
                        "dense observable must be {m}×{m}"
                    )));
                }
                let mat = DMatrix::from_fn(m, m, |i, j| Complex::new(rows[i][j][0], rows[i][j][1]));
                HermitianObservable::new(mat).map_err(|e| ConfigError::Invalid(e.to_string()))?
            }
            ObservableSpec::Diag { diag } => {
                if diag.len() != m {
                    return Err(ConfigError::Invalid(format!(
                        "diag observable must have {m} entries"
                    )));
                }
                HermitianObservable::from_diagonal(diag)
            }
            ObservableSpec::Projector { projector_rank_k } => {
                if *projector_rank_k == 0 || *projector_rank_k > m {
                    return Err(ConfigError::Invalid(format!(
                        "projector rank must be in 1..={m}"
                    )));
                }
                HermitianObservable::projector_rank_k(m, *projector_rank_k)
            }
        };
        Ok(obs)
    }
}

/// Only non-strict relations are representable; `<` and `>` fail at parse.
fn parse_relation(rel: &str) -> Result<Relation, ConfigError> {
    match rel {
        "=" => Ok(Relation::Eq),
        ">=" => Ok(Relation::Ge),
        "<=" => Ok(Relation::Le),
        other => Err(ConfigError::Invalid(format!(
            "relation {other:?} not supported (use \"=\", \">=\", \"<=\"; strict inequalities define open sets with the same rate)"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSpec {
    #[serde(rename = "W")]
    pub observable: ObservableSpec,
    pub w: f64,
    pub rel: String,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSpec {
    #[serde(rename = "fn")]
    pub function: SpectralFn,
    pub target: f64,
    pub rel: String,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub enum BlochSpec {
    #[serde(rename = "norm_at_least")]
    NormAtLeast(f64),
    #[serde(rename = "halfspace")]
    Halfspace { axis: [f64; 3], offset: f64 },
}

/// Top-level constraint-set description: dimension plus exactly one family.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintConfig {
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<Vec<LinearSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<BlochSpec>,
}

impl ConstraintConfig {
    pub fn to_constraint_set(&self) -> Result<ConstraintSet, ConfigError> {
        let families =
            self.linear.is_some() as u8 + self.spectral.is_some() as u8 + self.bloch.is_some() as u8;
        if families != 1 {
            return Err(ConfigError::Invalid(
                "exactly one of `linear`, `spectral`, `bloch` is required".into(),
            ));
        }
        let kind = if let Some(linear) = &self.linear {
            if linear.is_empty() {
                return Err(ConfigError::Invalid("empty constraint list".into()));
            }
            let constraints = linear
                .iter()
                .map(|spec| {
                    Ok(LinearConstraint {
                        observable: spec.observable.to_observable(self.m)?,
                        target: spec.w,
                        relation: parse_relation(&spec.rel)?,
                    })
                })
                .collect::<Result<Vec<_>, ConfigError>>()?;
            ConstraintKind::Linear(constraints)
        } else if let Some(spec) = &self.spectral {
            ConstraintKind::Spectral(SpectralConstraint {
                function: spec.function,
                target: spec.target,
                relation: parse_relation(&spec.rel)?,
            })
        } else {
            let pred = match self.bloch.as_ref().unwrap() {
                BlochSpec::NormAtLeast(r) => BlochPredicate::NormAtLeast(*r),
                BlochSpec::Halfspace { axis, offset } => BlochPredicate::Halfspace {
                    axis: *axis,
                    offset: *offset,
                },
            };
            ConstraintKind::BlochRegion(pred)
        };
        ConstraintSet::new(self.m, kind).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Output row format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Full run description, recorded verbatim in the JSON sidecar so a run can
/// be reproduced from its outputs alone.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    pub samples: u64,
    pub method: crate::experiments::Method,
    pub seed: u64,
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub format: Format,
}
