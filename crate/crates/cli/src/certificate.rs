//! Versioned certificate files.

use serde::{Deserialize, Serialize};
use zerocert::certify::{Example11Table, NearZeroCertificate, SearchResult};
use zerocert::minimax::{ConvexityCheck, GapCheck};
use zerocert::operators::LipschitzProvenance;
use zerocert::{ConvexBody, DeltaBounds};

use crate::config::ProblemConfig;
use crate::output::to_json;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// δ bracket of a body transformed by a similarity, compared with the
/// bracket predicted from the original.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceCheck {
    pub transform: String,
    pub lower: f64,
    pub upper: f64,
    pub expected_lower: f64,
    pub expected_upper: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub body: ConvexBody,
    pub bounds: DeltaBounds,
    pub self_checks: Vec<InvarianceCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoCertificate {
    pub body: ConvexBody,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub body: ConvexBody,
    pub l: f64,
    pub l_provenance: LipschitzProvenance,
    pub gap: GapCheck,
    pub mechanism: ConvexityCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum Payload {
    Delta(Box<DeltaReport>),
    NearZero(Box<NearZeroCertificate>),
    NoCertificate(NoCertificate),
    Search(SearchResult),
    Example11(Example11Table),
    Gap(Box<GapReport>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema_version: u32,
    pub library_version: String,
    pub command: String,
    /// The effective config, after command-line overrides.
    pub config: ProblemConfig,
    pub status: String,
    pub result: Payload,
    /// Wall-clock creation time (seconds since the Unix epoch). The only
    /// field allowed to differ between identical runs.
    pub created_unix: u64,
}

impl CertificateFile {
    pub fn new(command: &str, config: &ProblemConfig, status: &str, result: Payload) -> Self {
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        CertificateFile {
            schema_version: SCHEMA_VERSION,
            library_version: zerocert::VERSION.to_string(),
            command: command.to_string(),
            config: config.clone(),
            status: status.to_string(),
            result,
            created_unix,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: CertificateFile = serde_json::from_str(text).map_err(|e| CliError::Json(e.to_string()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Json(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        Ok(file)
    }

    /// Serialized form with the timestamp zeroed: equal for identical runs.
    pub fn payload_json(&self) -> Result<String, CliError> {
        let mut copy = self.clone();
        copy.created_unix = 0;
        copy.to_json()
    }
}
