use thiserror::Error;

/// Configuration and model validation failures. Every variant names the
/// offending field by its dotted path in the configuration document.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("malformed configuration at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("`{path}`: {reason}")]
    Invalid { path: String, reason: String },
    #[error("`{path}`: expected {expected}, found {found}")]
    Dimension {
        path: String,
        expected: String,
        found: String,
    },
}

impl ModelError {
    pub(crate) fn invalid(path: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::Invalid {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn dimension(
        path: impl Into<String>,
        expected: impl Into<String>,
        found: impl Into<String>,
    ) -> Self {
        ModelError::Dimension {
            path: path.into(),
            expected: expected.into(),
            found: found.into(),
        }
    }

    /// Dotted path of the field the error refers to.
    pub fn path(&self) -> &str {
        match self {
            ModelError::Parse { path, .. }
            | ModelError::Invalid { path, .. }
            | ModelError::Dimension { path, .. } => path,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid must have an odd number of points >= 3, got {0}")]
    EvenOrTooSmall(usize),
    #[error("grid half-width must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("matrix dimensions are incompatible: {0}")]
    DimensionMismatch(String),
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("Bose function evaluated at its pole omega = 0 (temperature {temperature})")]
    BosePole { temperature: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("singular linear system at omega = {omega}")]
    Singular { omega: f64 },
    #[error("non-finite values at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("the junction has no phonon modes")]
    NoPhonons,
    #[error("expected an electron Green function")]
    NotElectron,
    #[error("current has a non-negligible imaginary part ({imag:e} vs real {real:e})")]
    ImaginaryCurrent { real: f64, imag: f64 },
    #[error("occupation of level {level} is {value}, outside [0, 1]")]
    OccupationOutOfRange { level: usize, value: f64 },
}
