use thiserror::Error;

/// Failures raised by the geometric and algebraic routines.
///
/// Residuals are carried as `f64` so the error type stays independent of the scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not normal (residual {residual:e})")]
    NotNormal { residual: f64 },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("exponential is only defined for complex-linear operators")]
    ConjugateLinearInput,
    #[error("cannot combine a complex-linear and a conjugate-linear operator")]
    MixedLinearity,
    #[error("operator is not invertible")]
    Singular,
    #[error("not a tripotent (residual {residual:e})")]
    NotTripotent { residual: f64 },
    #[error("tripotents {0} and {1} are not orthogonal")]
    NotOrthogonalFamily(usize, usize),
    #[error("element is not in the Peirce 1-space (residual {residual:e})")]
    NotInPeirceOne { residual: f64 },
    #[error("element is zero")]
    ZeroElement,
    #[error("Vandermonde system is singular (repeated spectral values)")]
    SingularVandermonde,
    #[error("supplied spectral values do not match the spectrum")]
    SpectrumMismatch,
    #[error("elements lie in different components")]
    DifferentComponents,
    #[error("vector is not tangent at the base point (residual {residual:e})")]
    NotTangent { residual: f64 },
    #[error("vector is not in the selfadjoint Peirce-1 parts (residual {residual:e})")]
    NotInA { residual: f64 },
    #[error("iterative decomposition did not converge")]
    NoConvergence,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
