use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("denominator is zero")]
    ZeroDenominator,

    #[error("degenerate resultant: {0}")]
    DegenerateResultant(String),

    #[error("{stage}: structural mismatch: {detail}")]
    StructuralMismatch { stage: &'static str, detail: String },

    #[error("interpolation failed: {0}")]
    Interpolation(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl ProofError {
    pub fn mismatch(stage: &'static str, detail: impl Into<String>) -> Self {
        ProofError::StructuralMismatch {
            stage,
            detail: detail.into(),
        }
    }
}
