use nlcavity::detector::DetectorError;
use nlcavity::fock::FockError;
use nlcavity::hawking::HawkingError;
use nlcavity::info::InfoError;
use nlcavity::numerics::NumericsError;
use nlcavity::trilinear::TrilinearError;
use std::path::PathBuf;
use thiserror::Error;

/// Run failures, grouped by the exit status they map to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validity gate: {0}")]
    Validity(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Validity(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::Domain(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<DetectorError> for CliError {
    fn from(e: DetectorError) -> Self {
        match e {
            DetectorError::Numerics(n) => n.into(),
            DetectorError::NoPhysicalRoot => CliError::Numerical(e.to_string()),
            ref v if v.is_validity() => CliError::Validity(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<HawkingError> for CliError {
    fn from(e: HawkingError) -> Self {
        match e {
            HawkingError::Numerics(n) => n.into(),
            ref v if v.is_validity() => CliError::Validity(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        match e {
            FockError::Truncation { .. } => CliError::Validity(e.to_string()),
            FockError::InvalidState(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<TrilinearError> for CliError {
    fn from(e: TrilinearError) -> Self {
        match e {
            TrilinearError::Truncation { .. } => CliError::Validity(e.to_string()),
            TrilinearError::Fock(f) => f.into(),
            TrilinearError::Numerics(n) => n.into(),
            TrilinearError::Domain(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<InfoError> for CliError {
    fn from(e: InfoError) -> Self {
        match e {
            InfoError::Fock(f) => f.into(),
            InfoError::InvalidState(_) => CliError::Numerical(e.to_string()),
            InfoError::Mismatch(_) => CliError::Config(e.to_string()),
        }
    }
}
