use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    InputParse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{context}: {message}")]
    Module { context: String, message: String },
}

impl CliError {
    pub fn module(context: impl Into<String>, err: impl std::fmt::Display) -> Self {
        CliError::Module {
            context: context.into(),
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// `None` when the check has no numeric residual (a structural failure).
    pub residual: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub data: Value,
}

/// Accumulates checks against one threshold.
#[derive(Debug)]
pub struct Checks {
    tolerance: f64,
    items: Vec<Check>,
}

impl Checks {
    pub fn new(tolerance: f64) -> Self {
        Checks {
            tolerance,
            items: Vec::new(),
        }
    }

    /// Passes when `residual ≤ tolerance`.
    pub fn residual(&mut self, name: impl Into<String>, residual: f64) {
        let pass = residual <= self.tolerance;
        self.items.push(Check {
            name: name.into(),
            residual: Some(residual),
            pass,
        });
    }

    /// Integer comparison; the residual is `|got − expected|`.
    pub fn exact(&mut self, name: impl Into<String>, got: i64, expected: i64) {
        self.items.push(Check {
            name: name.into(),
            residual: Some((got - expected).abs() as f64),
            pass: got == expected,
        });
    }

    /// A failure detected upstream, with the residual that triggered it.
    pub fn failed(&mut self, name: impl Into<String>, residual: f64) {
        self.items.push(Check {
            name: name.into(),
            residual: Some(residual),
            pass: false,
        });
    }

    pub fn flag(&mut self, name: impl Into<String>, pass: bool) {
        self.items.push(Check {
            name: name.into(),
            residual: None,
            pass,
        });
    }

    pub fn into_vec(self) -> Vec<Check> {
        self.items
    }
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
