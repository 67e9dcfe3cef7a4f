use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("bodies 1 and 2 coincide; the shape variable is undefined")]
    DegenerateShape,

    #[error("binary collision at shape {x}, {y}")]
    Collision { x: f64, y: f64 },

    #[error("singular state: {0}")]
    Singular(String),

    #[error("gradient of mu vanishes at ({x}, {y}); curvature undefined")]
    CriticalPoint { x: f64, y: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("contour tracing failed: {0}")]
    Contour(String),
}
