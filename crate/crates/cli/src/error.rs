use std::fmt;
use std::path::PathBuf;

use chainstat::error::Error as ComputeError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or invalid configuration.
    Usage(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Compute {
        module: &'static str,
        source: ComputeError,
    },
    /// `validate` ran and some checks did not pass.
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            // parameters outside the model's domain come from the config
            CliError::Compute {
                source: ComputeError::Domain(_),
                ..
            } => 2,
            CliError::Compute { .. } | CliError::ChecksFailed { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Compute { module, source } => match source {
                ComputeError::Domain(msg) | ComputeError::Convergence(msg) => {
                    write!(f, "{module}: {}: {msg}", source.kind())
                }
                _ => write!(f, "{module}: {}: {source}", source.kind()),
            },
            CliError::ChecksFailed { failed, total } => {
                write!(f, "{failed} of {total} checks failed")
            }
        }
    }
}

impl std::error::Error for CliError {}

/// Tags a core error with the module it came from.
pub fn in_module<T>(module: &'static str, r: chainstat::error::Result<T>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Compute { module, source })
}
