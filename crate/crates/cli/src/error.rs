//! CLI-level error type and its mapping to process exit codes.
//!
//! Exit codes are part of the command-line contract:
//!
//! * `0` — success;
//! * `2` — configuration error: bad flags, malformed or inconsistent input
//!   files, parameters outside their documented domains;
//! * `3` — coverage failure: points fall outside every landmark ball at the
//!   working scale;
//! * `4` — no admissible class: the degree-1 diagram has no pair with
//!   `death > 2 * birth` (and, for operations that need any class at all,
//!   no usable pair whatsoever);
//! * `1` — everything else: I/O failures and internal numerical errors.

use lenscoords_core::Error as CoreError;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_COVERAGE: u8 = 3;
pub const EXIT_NO_CLASS: u8 = 4;
pub const EXIT_OTHER: u8 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A flag value or input-file combination that the CLI itself rejects.
    #[error("configuration error: {0}")]
    Config(String),
    /// An error surfaced by the computational core.
    #[error(transparent)]
    Core(#[from] CoreError),
    /// Reading or writing an artifact failed.
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// An input file exists but does not parse as the expected document.
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Parse { .. } => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_OTHER,
            CliError::Core(e) => match e {
                // The user asked for something outside the documented domain
                // or handed files that cannot belong together.
                CoreError::NotPrime(_)
                | CoreError::InvalidParameter(_)
                | CoreError::BadLandmarkCount { .. }
                | CoreError::BadSeedIndex(_)
                | CoreError::LengthMismatch { .. }
                | CoreError::ModulusMismatch { .. }
                | CoreError::AsymmetricInput { .. }
                | CoreError::PointOutsideDisc { .. }
                | CoreError::NotUnit
                | CoreError::EmptyCloud
                | CoreError::DisconnectedGraph { .. }
                | CoreError::MissingEdge { .. } => EXIT_CONFIG,
                CoreError::Uncovered | CoreError::CoverageFailure { .. } => EXIT_COVERAGE,
                CoreError::NoAdmissibleClass | CoreError::EmptyDiagram => EXIT_NO_CLASS,
                CoreError::NoConvergence
                | CoreError::DegenerateProjection
                | CoreError::InvalidComplex(_)
                | CoreError::NonSquare { .. } => EXIT_OTHER,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
