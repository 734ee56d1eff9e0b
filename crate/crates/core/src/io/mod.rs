//! Files and documents: the binary share format, octet/symbol mapping for
//! file sources, TOML instance configuration and JSON export.

mod config;
mod files;
mod octets;
mod share;

pub use config::InstanceConfig;
pub use files::{decode_files, encode_files, DecodedSource};
pub use octets::{octets_to_symbols, symbols_to_octets};
pub use share::{read_share, write_share, Layer, ShareFile, MAGIC, VERSION};

use crate::regions::{RateTuple, RegionSpec};
use crate::schemes::SchemeError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed share file: {0}")]
    FormatError(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("unsupported for file I/O: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Os(#[from] std::io::Error),
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

/// A region together with its vertices, as exported by `region --json`.
/// Rationals serialize as `[numerator, denominator]`.
#[derive(Clone, Debug, Serialize)]
pub struct RegionDocument<'a> {
    pub region: &'a RegionSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corners: Option<&'a [RateTuple]>,
}

pub fn region_json(region: &RegionSpec, corners: Option<&[RateTuple]>) -> String {
    serde_json::to_string_pretty(&RegionDocument { region, corners }).expect("regions serialize")
}

pub fn report_json<T: Serialize>(report: &T) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}
