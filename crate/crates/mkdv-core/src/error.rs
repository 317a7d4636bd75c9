//! Crate-wide error type.

/// Errors produced by the numerical layers.
#[derive(Debug, thiserror::Error)]
pub enum MkdvError {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or iteration failed to reach its accuracy target.
    #[error("accuracy failure: {0}")]
    Accuracy(String),

    /// Evaluation at (or too close to) a pole or vanishing denominator.
    #[error("singular evaluation: {0}")]
    Singular(String),

    /// Inconsistent or insufficient run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Parameter combination the theory deliberately does not cover.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// Time stepping produced a non-finite field.
    #[error("numerical blow-up, last stable t = {t}")]
    BlowUp { t: f64 },
}

pub type Result<T> = std::result::Result<T, MkdvError>;
