//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LiestarError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("elements belong to different Lie algebras")]
    AlgebraMismatch,

    #[error("negative seminorm weight c = {0}")]
    NegativeWeight(f64),

    #[error("no certified bound: series not detected convergent (R = {r}, ratio ≥ 1 at degree {degree})")]
    NoCertifiedBound { r: f64, degree: usize },

    #[error("group element evaluator missing")]
    MissingEvaluator,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("tangent map is not a Lie algebra morphism (brackets differ at ({0}, {1}))")]
    NotLieMorphism(usize, usize),

    #[error("orbit module invariant violated at generator pair ({0}, {1})")]
    ModuleCommutation(usize, usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
