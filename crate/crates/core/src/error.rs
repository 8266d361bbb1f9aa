use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("non-unique steady state: second-smallest singular value {sigma:.3e} below {threshold:.3e}")]
    NonUniqueSteadyState { sigma: f64, threshold: f64 },

    #[error("solver failed: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    SolverFailed { residual: f64, tolerance: f64 },

    #[error("steady state is not positive: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("step size too large at t = {time:.6e} s ({detail}); reduce dt")]
    StepTooLarge { time: f64, detail: String },

    #[error("unknown preset `{name}`; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },

    #[error("preset `{preset}` requires input `{input}`")]
    MissingPresetInput {
        preset: &'static str,
        input: &'static str,
    },

    #[error("all {points} sweep points failed; first error: {first}")]
    AllPointsFailed { points: usize, first: String },

    #[error("no rows to analyse")]
    EmptyRows,
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
