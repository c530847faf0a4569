use std::path::PathBuf;

/// Failures surfaced to the user, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input file, arguments or configuration.
    #[error("{0}")]
    Input(String),

    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Estimation(#[from] permcov::Error),

    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }

    /// 2 for anything the caller can fix, 3 for numerical failures inside
    /// the estimator.
    pub fn exit_code(&self) -> u8 {
        use permcov::Error as E;
        match self {
            Self::Input(_) | Self::Read { .. } | Self::Write { .. } => 2,
            Self::Estimation(E::InvalidArgument(_) | E::DimensionMismatch { .. } | E::EmptyGrid) => 2,
            Self::Estimation(_) | Self::Pool(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
