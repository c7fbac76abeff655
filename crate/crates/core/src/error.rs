use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure modes of the simulator.
///
/// Every message starts with the variant name so that a one-line diagnostic
/// identifies the failing condition unambiguously.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DimensionMismatch: expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("NotSquare: matrix has {rows} rows and {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    #[error("ZeroNorm: vector cannot be normalized")]
    ZeroNorm,

    #[error("NotHermitian: max |A - A^dagger| = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("OverlapVanishes: |<bra|ket>| = {overlap:e} is below {threshold:e}")]
    OverlapVanishes { overlap: f64, threshold: f64 },

    #[error("DegenerateSpectrum: eigenvalue gap {gap:e} is below {tolerance:e}")]
    DegenerateSpectrum { gap: f64, tolerance: f64 },

    #[error("InvalidSpin: 2j must be a nonnegative integer (got j = {0})")]
    InvalidSpin(f64),

    #[error("InvalidAxis: axis must be a unit vector (norm {norm})")]
    InvalidAxis { norm: f64 },

    #[error("InvalidGrid: {0}")]
    InvalidGrid(&'static str),

    #[error("GridResolution: width {delta} must lie in ({min}, {max})")]
    GridResolution { delta: f64, min: f64, max: f64 },

    #[error("ShiftTooLarge: |{shift}| must stay below {limit}")]
    ShiftTooLarge { shift: f64, limit: f64 },

    #[error("NormalizationUnderflow: density integral {integral:e} is not normalizable")]
    NormalizationUnderflow { integral: f64 },

    #[error("PostSelectionImpossible: success probability {probability:e}")]
    PostSelectionImpossible { probability: f64 },

    #[error("WeaknessViolated: delta = {delta} but at least {required} is needed")]
    WeaknessViolated { delta: f64, required: f64 },

    #[error("UnitarityDrift: slice norm drifted by {drift:e}")]
    UnitarityDrift { drift: f64 },

    #[error("ProtectionTooWeak: 1/(lambda N T) = {ratio} must stay below {limit}")]
    ProtectionTooWeak { ratio: f64, limit: f64 },

    #[error("ConvergenceFailure: {0}")]
    ConvergenceFailure(&'static str),

    #[error("EmptyInput: {0}")]
    EmptyInput(&'static str),

    #[error("InvalidParameter: {name} {constraint}")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
    },
}

impl Error {
    /// Variant name, as printed at the start of the message.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotSquare { .. } => "NotSquare",
            Error::ZeroNorm => "ZeroNorm",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::OverlapVanishes { .. } => "OverlapVanishes",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            Error::InvalidSpin(_) => "InvalidSpin",
            Error::InvalidAxis { .. } => "InvalidAxis",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::GridResolution { .. } => "GridResolution",
            Error::ShiftTooLarge { .. } => "ShiftTooLarge",
            Error::NormalizationUnderflow { .. } => "NormalizationUnderflow",
            Error::PostSelectionImpossible { .. } => "PostSelectionImpossible",
            Error::WeaknessViolated { .. } => "WeaknessViolated",
            Error::UnitarityDrift { .. } => "UnitarityDrift",
            Error::ProtectionTooWeak { .. } => "ProtectionTooWeak",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::EmptyInput(_) => "EmptyInput",
            Error::InvalidParameter { .. } => "InvalidParameter",
        }
    }

    pub(crate) fn invalid(name: &'static str, constraint: &'static str) -> Self {
        Error::InvalidParameter { name, constraint }
    }
}
