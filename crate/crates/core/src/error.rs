use thiserror::Error;

use crate::polygon::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),

    #[error("no closed polygon found after {attempts} attempts")]
    NoClosure { attempts: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("polygon failed validation: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("operator L is singular (smallest/largest singular value = {ratio:e})")]
    SingularOperator { ratio: f64 },

    #[error("calibrated slice has dimension {found}, expected {expected}")]
    RankDeficient { expected: usize, found: usize },

    #[error("tangent vector is not calibrated")]
    NotCalibrated,

    #[error("tangent vectors live over different polygons")]
    BaseMismatch,

    #[error("length mismatch: expected {expected} components, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("not a tangent vector: condition {condition} violated (residual {residual:e})")]
    NotTangent { condition: &'static str, residual: f64 },

    #[error("retraction failed: {0}")]
    StepTooLarge(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
