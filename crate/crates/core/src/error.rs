use thiserror::Error;

use crate::schedule::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or configuration parameter is outside its valid range.
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: String, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("modal analysis failed: {0}")]
    Analysis(String),

    #[error("integration diverged at t = {time} s")]
    Divergence { time: f64 },

    #[error("trajectories are not comparable: {0}")]
    Comparison(String),

    #[error("bound violated: {0}")]
    Bound(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("solution violates {} constraint(s): {}", .0.len(), summarize(.0))]
    Validation(Vec<Violation>),

    #[error("cannot split block: {0}")]
    InfeasibleSplit(String),

    #[error("no feasible schedule found after {iterations} iterations (best penalized F = {best_penalized})")]
    Infeasible { iterations: u32, best_penalized: f64 },

    #[error("schedule table overflow on core {core}, RT-cycle {cycle}: {demand} > {capacity}")]
    TableOverflow {
        core: usize,
        cycle: u64,
        demand: f64,
        capacity: u64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("worker failed: {0}")]
    Worker(String),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parameter(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by malformed input or the environment rather
    /// than by a model, schedule, or tolerance failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Json { .. }
                | Error::Io(_)
                | Error::Config(_)
                | Error::UnknownStrategy { .. }
                | Error::Parameter { .. }
                | Error::NonFinite(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json {
            line: e.line(),
            column: e.column(),
            message: {
                let text = e.to_string();
                let suffix = format!(" at line {} column {}", e.line(), e.column());
                text.strip_suffix(&suffix).map(str::to_string).unwrap_or(text)
            },
        }
    }
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
