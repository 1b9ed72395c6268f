//! Command-line front end for `hfi-core`: configuration, parallel drivers
//! and report emission.

pub mod commands;
pub mod config;
pub mod output;

use hfi_core::collision::CollisionError;
use hfi_core::dispersion::ModelError;
use hfi_core::hill::HillError;
use hfi_core::krein::KreinError;
use hfi_core::waves::WaveError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for anything the user can fix in the input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NotDispersive { .. } | ModelError::Eval(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<CollisionError> for CliError {
    fn from(e: CollisionError) -> Self {
        match e {
            CollisionError::Model(m) => m.into(),
            CollisionError::InvalidOptions(_) | CollisionError::SameMode => {
                CliError::Config(e.to_string())
            }
            CollisionError::NoCollisionFound { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<WaveError> for CliError {
    fn from(e: WaveError) -> Self {
        match e {
            WaveError::Model(m) => m.into(),
            WaveError::Unsupported(_) | WaveError::Invalid(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<HillError> for CliError {
    fn from(e: HillError) -> Self {
        match e {
            HillError::Model(m) => m.into(),
            HillError::Unsupported(_) => CliError::Config(e.to_string()),
            HillError::Eigen { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<KreinError> for CliError {
    fn from(e: KreinError) -> Self {
        match e {
            KreinError::Model(m) => m.into(),
            KreinError::Collision(c) => c.into(),
            KreinError::WrongKind { .. } | KreinError::NotEvenSystem => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
