//! File formats: SST-2 data, corpus and lookup tables, the prediction
//! protocol and audit reports.
//!
//! Readers reject malformed input with the offending line number instead of
//! repairing it. Writers are deterministic.

mod corpus_file;
mod predictions;
mod report;
mod sst2;
mod tables;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use crate::error::{Error, Result};

pub use corpus_file::{parse_corpus, read_corpus, render_corpus_csv, write_corpus};
pub use predictions::{
    metadata_path, parse_predictions, parse_predictions_with_optional, read_metadata, read_predictions,
    read_predictions_multi, read_predictions_with_optional, render_predictions, write_metadata, write_predictions,
    PredictionMetadata, PredictionRecord,
};
pub use report::{
    read_report, render_human_report, render_scatter_csv, write_report, ReportDocument, REPORT_FORMAT_VERSION,
};
pub use sst2::{parse_sst2, read_sst2};
pub use tables::{
    default_lexicon, parse_aliases, parse_earnings, parse_lexicon, parse_noun_pairs, parse_professions, read_aliases,
    read_earnings, read_lexicon, read_noun_pairs, read_professions, render_professions_csv,
};

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Serde adapter writing `±∞` as the strings `"inf"` / `"-inf"`.
pub mod nonfinite {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            serializer.serialize_f64(*value)
        } else if value.is_nan() {
            serializer.serialize_str("nan")
        } else if *value > 0.0 {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("invalid number {other:?}"))),
            },
        }
    }
}
