//! JSON problem files and the built-in example registry.
//!
//! A problem file is a single JSON object:
//!
//! ```json
//! {
//!   "label": "two strips",
//!   "T": 2,
//!   "curves": ["t/3"],
//!   "kernels": ["1+t-s", "-1"],
//!   "rhs": "t^4/108 - 25*t^3/81",
//!   "exact": "t^2"
//! }
//! ```
//!
//! `curves` lists the interior discontinuity curves in increasing order;
//! `kernels` has one more entry than `curves`. `exact` and `label` are optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::expr::{Expr, ExprError};
use crate::problem::{Problem, ProblemError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(rename = "T")]
    pub t_end: f64,
    pub curves: Vec<String>,
    pub kernels: Vec<String>,
    pub rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("`{key}`: {source}")]
    Expression {
        key: String,
        #[source]
        source: ExprError,
    },
    #[error("schema: {0}")]
    Schema(#[from] ProblemError),
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("unknown built-in example {0} (expected 1, 2 or 3)")]
    UnknownExample(u32),
}

impl ProblemConfig {
    /// Parses every expression and builds the problem without validating it.
    pub fn to_problem_unchecked(&self) -> Result<Problem, ConfigError> {
        let parse = |key: String, text: &str| {
            text.parse::<Expr>()
                .map_err(|source| ConfigError::Expression { key, source })
        };
        let curves = self
            .curves
            .iter()
            .enumerate()
            .map(|(i, c)| parse(format!("curves[{i}]"), c))
            .collect::<Result<Vec<_>, _>>()?;
        let kernels = self
            .kernels
            .iter()
            .enumerate()
            .map(|(i, k)| parse(format!("kernels[{i}]"), k))
            .collect::<Result<Vec<_>, _>>()?;
        let rhs = parse("rhs".into(), &self.rhs)?;
        let exact = self.exact.as_deref().map(|e| parse("exact".into(), e)).transpose()?;
        let problem = Problem::new(self.t_end, curves, kernels, rhs, exact)?;
        Ok(match &self.label {
            Some(label) => problem.with_label(label.clone()),
            None => problem,
        })
    }

    /// Parses, builds and validates.
    pub fn to_problem(&self) -> Result<Problem, ConfigError> {
        let problem = self.to_problem_unchecked()?;
        let diag = problem.validate();
        if !diag.ordering_ok {
            return Err(ConfigError::Validation(diag.messages));
        }
        Ok(problem)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// Reads and validates a JSON problem file.
pub fn load_config(path: &Path) -> Result<Problem, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    ProblemConfig::from_json(&text)?.to_problem()
}

/// Built-in problems. All three have exact solution `t²`.
pub fn example_config(id: u32) -> Result<ProblemConfig, ConfigError> {
    let strings = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
    Ok(match id {
        1 => ProblemConfig {
            t_end: 2.0,
            curves: strings(&["t/3"]),
            kernels: strings(&["1+t-s", "-1"]),
            rhs: "t^4/108 - 25*t^3/81".into(),
            exact: Some("t^2".into()),
            label: Some("example 1: two strips split at t/3".into()),
        },
        2 => ProblemConfig {
            t_end: 2.0,
            curves: strings(&["t/9", "2*t/9", "4*t/9"]),
            kernels: strings(&["1+t-s", "-1", "-2", "1"]),
            rhs: "11*t^4/26244 + 547*t^3/2187".into(),
            exact: Some("t^2".into()),
            label: Some("example 2: four strips split at t/9, 2t/9, 4t/9".into()),
        },
        3 => ProblemConfig {
            t_end: 1.5 * std::f64::consts::PI,
            curves: strings(&["sin(t/2)", "2*sin(t/3)"]),
            kernels: strings(&["2", "-1", "1"]),
            rhs: "t^3/3 + sin(t/2)^3 - 16/3*sin(t/3)^3".into(),
            exact: Some("t^2".into()),
            label: Some("example 3: three strips split at sin(t/2), 2 sin(t/3)".into()),
        },
        other => return Err(ConfigError::UnknownExample(other)),
    })
}

pub fn example(id: u32) -> Result<Problem, ConfigError> {
    example_config(id)?.to_problem()
}
