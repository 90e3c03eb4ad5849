use sphinv::datagen::DatagenError;
use sphinv::harmonics::HarmonicsError;
use sphinv::kernel_ridge::KrrError;
use sphinv::perms::PermError;
use sphinv::spectra::SpectraError;
use thiserror::Error;

/// Command failure, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config file or descriptors (exit 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// A compute cap would be exceeded (exit 3).
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// Rejected by the argument parser; also carries help and version output.
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("{0}")]
    Runtime(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Usage(e) => e.exit_code(),
            CliError::Runtime(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<PermError> for CliError {
    fn from(e: PermError) -> Self {
        match e {
            PermError::CapExceeded { .. } => CliError::Budget(e.to_string()),
            PermError::Overflow(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<HarmonicsError> for CliError {
    fn from(e: HarmonicsError) -> Self {
        match e {
            HarmonicsError::NonConvergent(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::Perm(p) => p.into(),
            SpectraError::Harmonics(h) => h.into(),
            SpectraError::InvalidArgument(m) => CliError::Config(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<KrrError> for CliError {
    fn from(e: KrrError) -> Self {
        match e {
            KrrError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            KrrError::InvalidArgument(m) => CliError::Config(m),
            KrrError::DimensionMismatch { .. } => CliError::Config(e.to_string()),
            KrrError::Io(io) => CliError::Io(io),
            KrrError::Numerical(m) => CliError::Runtime(m),
        }
    }
}

impl From<DatagenError> for CliError {
    fn from(e: DatagenError) -> Self {
        match e {
            DatagenError::InvalidArgument(m) => CliError::Config(m),
            DatagenError::Perm(p) => p.into(),
            DatagenError::Io(io) => CliError::Io(io),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(format!("json: {e}"))
    }
}
