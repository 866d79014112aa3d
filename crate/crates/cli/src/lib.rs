//! Command-line surface of zerocert: problem configs in, human-readable
//! reports, JSON certificates and CSV tables out.

pub mod certificate;
pub mod commands;
pub mod config;
pub mod output;

pub use certificate::{CertificateFile, Payload, SCHEMA_VERSION};
pub use commands::{run, Command, Outcome};
pub use config::{BodySpec, OperatorSpec, ProblemConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Core(#[from] zerocert::Error),
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const ERROR: u8 = 1;
    /// A sound negative outcome: no certificate, empty search, or a
    /// failed check.
    pub const NO_CERTIFICATE: u8 = 2;
}
