//! Mamdani fuzzy inference with Gaussian membership functions.

mod engine;
mod membership;
mod rule;
pub mod traffic;
mod variable;

pub use engine::{Fis, Inference, DEFAULT_RESOLUTION, MIN_RESOLUTION};
pub use membership::GaussianMf;
pub use rule::{Connective, Rule};
pub use traffic::build_traffic_fis;
pub use variable::{LinguisticVariable, Term, Universe};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FisError {
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("range lower bound {lo} must be below upper bound {hi}")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("variable '{0}' has no terms")]
    NoTerms(String),
    #[error("variable '{variable}' declares label '{label}' twice")]
    DuplicateLabel { variable: String, label: String },
    #[error("term centers of variable '{0}' are not in non-decreasing order")]
    UnorderedTerms(String),
    #[error("variable '{variable}' has no term labelled '{label}'")]
    UnknownLabel { variable: String, label: String },
    #[error("expected {expected} input values, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("term index {index} out of range for variable {input}")]
    TermIndex { input: usize, index: usize },
    #[error("rule weight must lie in (0, 1], got {0}")]
    InvalidWeight(f64),
    #[error("rule has no antecedent terms")]
    EmptyAntecedent,
    #[error("defuzzification resolution must be at least {MIN_RESOLUTION}, got {0}")]
    Resolution(usize),
}
