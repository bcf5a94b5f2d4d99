use std::path::PathBuf;

use equidist_core::curve::CurveError;
use equidist_core::parallelism::ParallelError;
use equidist_core::EquidistantError;

/// Exit status of a failed run.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("curve is not generic: {0}")]
    NonGeneric(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("verification failed: {0} check(s) failed")]
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Invalid(_) | CliError::Io { .. } => 2,
            CliError::NonGeneric(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

fn from_curve(e: &CurveError) -> CliError {
    match e {
        CurveError::InvalidCoefficients | CurveError::DegreeTooLarge(_) | CurveError::Irregular { .. } => {
            CliError::Invalid(e.to_string())
        }
        CurveError::DegenerateInflexion { .. } => CliError::NonGeneric(e.to_string()),
        CurveError::LiftInconsistent { .. } => CliError::Numerical(e.to_string()),
    }
}

impl From<EquidistantError> for CliError {
    fn from(e: EquidistantError) -> Self {
        match &e {
            EquidistantError::Curve(c) | EquidistantError::Parallel(ParallelError::Curve(c)) => from_curve(c),
            EquidistantError::Parallel(
                ParallelError::CoincidentLevels { .. }
                | ParallelError::TangentCoincidence { .. }
                | ParallelError::OriginUnavailable,
            )
            | EquidistantError::TangentialRoot { .. }
            | EquidistantError::DegenerateQuartic(_) => CliError::NonGeneric(e.to_string()),
            EquidistantError::InvalidLambda(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
