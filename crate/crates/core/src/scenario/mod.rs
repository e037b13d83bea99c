//! Scenario-driven front end: TOML configs, the five commands and
//! deterministic report emission. The `qequiv` binary is a thin wrapper
//! around [`execute`].

mod commands;
mod config;
mod presets;
mod report;

pub use commands::{execute, Command, CommandOutput, ReduceChannel};
pub use config::{
    parse_config, ApparatusSpec, CandidateSpec, DynamicsSpec, IntervalSpec, OutputSection,
    ReduceSection, RunSection, Scenario, ScenarioConfig, SpaceConfig, StateSpec,
};
pub use presets::{preset, PRESET_NAMES};
pub use report::{format_float, round_json, RunReport};

use std::path::Path;

use serde::Serialize;

use crate::error::Error;

/// One violated requirement of a scenario config.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Dotted path of the offending field; empty for whole-document errors.
    pub field: String,
    pub invariant: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl Violation {
    pub fn new(field: &str, invariant: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            invariant: invariant.to_string(),
            message: message.into(),
            residual: None,
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.field.is_empty() {
            write!(f, "[{}] {}", self.invariant, self.message)
        } else {
            write!(f, "{}: [{}] {}", self.field, self.invariant, self.message)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid scenario ({} violation(s))", .0.len())]
    Config(Vec<Violation>),
    #[error("numerical invariant failed: {0}")]
    Numerical(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Internal(_) => 4,
        }
    }

    /// Machine-readable description, one violation per entry.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Self::Config(v) => serde_json::json!({ "valid": false, "violations": v }),
            Self::Numerical(m) => serde_json::json!({ "error": "numerical", "message": m }),
            Self::Internal(m) => serde_json::json!({ "error": "internal", "message": m }),
        }
    }
}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_)
            | Error::MaxEntropyCounterexample { .. }
            | Error::SectorExtraction(_)
            | Error::NotPositive { .. }
            | Error::NonFinite
            | Error::InvalidTrace { .. }
            | Error::NotHermitian { .. } => Self::Numerical(e.to_string()),
            Error::Precondition(_)
            | Error::DimensionMismatch { .. }
            | Error::DimensionCap { .. }
            | Error::InvalidProjectorSet(_)
            | Error::UnoccupiedSector { .. } => {
                Self::Config(vec![Violation::new("", "precondition", e.to_string())])
            }
            other => Self::Internal(other.to_string()),
        }
    }
}

impl From<Vec<Violation>> for ScenarioError {
    fn from(v: Vec<Violation>) -> Self {
        Self::Config(v)
    }
}

/// Read a config file, or fall back to a shipped preset of that name.
pub fn load_config(source: &str) -> Result<ScenarioConfig, ScenarioError> {
    let path = Path::new(source);
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|e| {
            ScenarioError::Config(vec![Violation::new(
                "",
                "readable",
                format!("{source}: {e}"),
            )])
        })?
    } else if let Some(text) = preset(source) {
        text.to_string()
    } else {
        return Err(ScenarioError::Config(vec![Violation::new(
            "",
            "readable",
            format!(
                "{source}: no such file and not a preset (presets: {})",
                PRESET_NAMES.join(", ")
            ),
        )]));
    };
    parse_config(&text).map_err(|v| ScenarioError::Config(vec![v]))
}
