//! Input formats and JSON reports.

mod json;
mod report;
mod text;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Probability;
use crate::sysmodel::Coalgebra;

pub use json::{coalgebra_from_json, coalgebra_to_json, parse_coalgebra_json, write_coalgebra_json};
pub use report::{partition_json, stats_json, tree_from_json, tree_json, TreeFile};
pub use text::{parse_aut, parse_dfa_text, parse_mc_tsv};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Json(String),
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
}

impl IoError {
    pub(crate) fn at(line: usize, message: impl Into<String>) -> Self {
        Self::Parse { line, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    CoalgJson,
    DfaText,
    Aut,
    McTsv,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CoalgJson => "coalg-json",
            Self::DfaText => "dfa-text",
            Self::Aut => "aut",
            Self::McTsv => "mc-tsv",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coalg-json" => Ok(Self::CoalgJson),
            "dfa-text" => Ok(Self::DfaText),
            "aut" => Ok(Self::Aut),
            "mc-tsv" => Ok(Self::McTsv),
            _ => Err(format!("unknown format `{s}` (expected coalg-json, dfa-text, aut or mc-tsv)")),
        }
    }
}

pub fn parse_str<P: Probability>(text: &str, format: Format) -> Result<Coalgebra<P>, IoError> {
    match format {
        Format::CoalgJson => parse_coalgebra_json(text),
        Format::DfaText => parse_dfa_text(text),
        Format::Aut => parse_aut(text),
        Format::McTsv => parse_mc_tsv(text),
    }
}

pub fn parse_input<P: Probability>(path: &Path, format: Format) -> Result<Coalgebra<P>, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    parse_str(&text, format)
}
