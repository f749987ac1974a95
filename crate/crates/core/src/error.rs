use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not Hermitian (max asymmetry {margin:e})")]
    NotHermitian { margin: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("Kraus operators are not trace preserving (residual {residual:e})")]
    NotTracePreserving { residual: f64 },

    #[error("operator dimension {required} exceeds the budget of {budget}")]
    BudgetExceeded { required: usize, budget: usize },

    #[error("channel has no {0} Hamiltonian attached")]
    MissingHamiltonian(&'static str),

    #[error("solver stopped after {iterations} iterations with gap {gap:e} (best value {value})")]
    NotConverged { iterations: usize, gap: f64, value: f64 },

    #[error("semidefinite program appears infeasible")]
    Infeasible,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("typicality constraint admits no outcome combination")]
    EmptyConstraintSet,

    #[error("measurement is not a valid POVM (completeness residual {residual:e})")]
    InvalidPovm { residual: f64 },

    #[error("could not parse input: {0}")]
    Parse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::Infeasible | Error::NumericalFailure(_) | Error::EmptyConstraintSet
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
