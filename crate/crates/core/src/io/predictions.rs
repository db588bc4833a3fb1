//! The model-independent prediction protocol: one JSON object per line,
//! `{"id": "<sentence id>", "p_pos": <probability>}`.
//!
//! An optional sidecar `<name>.meta.json` next to the prediction file carries
//! the model name, held-out accuracy and free-form training metadata.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{open, write_file};
use crate::audit::PredictionSet;
use crate::corpus::Corpus;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRecord {
    pub id: String,
    pub p_pos: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PredictionMetadata {
    pub model_name: Option<String>,
    pub dev_accuracy: Option<f64>,
    /// Seeds, hyperparameters and anything else the producer wants recorded.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

/// `preds.jsonl` → `preds.meta.json`
pub fn metadata_path(predictions: &Path) -> PathBuf {
    predictions.with_extension("meta.json")
}

pub fn read_metadata(predictions: &Path) -> Result<Option<PredictionMetadata>> {
    let path = metadata_path(predictions);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| Error::parse(&path, e.line(), e.to_string()))
}

pub fn write_metadata(predictions: &Path, meta: &PredictionMetadata) -> Result<()> {
    let path = metadata_path(predictions);
    let text = serde_json::to_string_pretty(meta).expect("metadata serialises");
    write_file(&path, &(text + "\n"))
}

/// Parses protocol records and validates them against the union of the
/// given corpora: every corpus id must appear exactly once, every record id
/// must belong to a corpus and every probability must lie in [0, 1].
pub fn parse_predictions<R: Read>(
    reader: R,
    source: impl Into<PathBuf>,
    model_name: &str,
    corpora: &[&Corpus],
) -> Result<PredictionSet> {
    parse_predictions_with_optional(reader, source, model_name, corpora, &[]).map(|(p, _)| p)
}

/// Like [`parse_predictions`], but the `optional` corpora may be left out.
/// Each optional corpus must be covered completely or not at all; the
/// returned flags say which ones were covered.
pub fn parse_predictions_with_optional<R: Read>(
    reader: R,
    source: impl Into<PathBuf>,
    model_name: &str,
    required: &[&Corpus],
    optional: &[&Corpus],
) -> Result<(PredictionSet, Vec<bool>)> {
    let source = source.into();
    let known: HashSet<&str> = required
        .iter()
        .chain(optional)
        .flat_map(|c| c.sentences().iter().map(|s| s.id.as_str()))
        .collect();

    let mut predictions = BTreeMap::new();
    let mut problems = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(&source, e))?;
        if line.trim().is_empty() {
            return Err(Error::parse(&source, line_no, "blank line"));
        }
        let record: PredictionRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(&source, line_no, format!("malformed record: {e}")))?;
        if record.id.is_empty() {
            problems.push(format!("line {line_no}: empty id"));
            continue;
        }
        if !(0.0..=1.0).contains(&record.p_pos) {
            problems.push(format!(
                "line {line_no}: p_pos {} for {:?} outside [0, 1]",
                record.p_pos, record.id
            ));
        }
        if !known.contains(record.id.as_str()) {
            problems.push(format!("line {line_no}: unknown id {:?}", record.id));
        }
        if predictions.insert(record.id.clone(), record.p_pos).is_some() {
            problems.push(format!("line {line_no}: duplicate id {:?}", record.id));
        }
    }
    let mut covered = Vec::with_capacity(optional.len());
    for corpus in optional {
        let present = corpus.sentences().iter().any(|s| predictions.contains_key(&s.id));
        covered.push(present);
    }
    let checked = required
        .iter()
        .chain(optional.iter().zip(&covered).filter(|(_, &c)| c).map(|(o, _)| o));
    for corpus in checked {
        for s in corpus.sentences() {
            if !predictions.contains_key(&s.id) {
                problems.push(format!("missing id {:?}", s.id));
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::validation(format!(
            "{}: {} problem(s): {}",
            source.display(),
            problems.len(),
            problems.join("; ")
        )));
    }
    Ok((PredictionSet::new(model_name, predictions)?, covered))
}

fn default_model_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".to_string())
}

pub fn read_predictions(path: &Path, corpus: &Corpus) -> Result<PredictionSet> {
    read_predictions_multi(path, &[corpus])
}

/// Reads a prediction file covering several corpora (e.g. main + control).
/// The model name comes from the sidecar when present, else the file stem.
pub fn read_predictions_multi(path: &Path, corpora: &[&Corpus]) -> Result<PredictionSet> {
    let name = read_metadata(path)?
        .and_then(|m| m.model_name)
        .unwrap_or_else(|| default_model_name(path));
    parse_predictions(open(path)?, path, &name, corpora)
}

/// Reads a prediction file that must cover `required` and may cover each of
/// the `optional` corpora; see [`parse_predictions_with_optional`].
pub fn read_predictions_with_optional(
    path: &Path,
    required: &[&Corpus],
    optional: &[&Corpus],
) -> Result<(PredictionSet, Vec<bool>)> {
    let name = read_metadata(path)?
        .and_then(|m| m.model_name)
        .unwrap_or_else(|| default_model_name(path));
    parse_predictions_with_optional(open(path)?, path, &name, required, optional)
}

/// Records in id order.
pub fn render_predictions(preds: &PredictionSet) -> String {
    let mut out = String::new();
    for (id, p_pos) in preds.iter() {
        let record = PredictionRecord {
            id: id.to_string(),
            p_pos,
        };
        out.push_str(&serde_json::to_string(&record).expect("record serialises"));
        out.push('\n');
    }
    out
}

pub fn write_predictions(preds: &PredictionSet, path: &Path) -> Result<()> {
    write_file(path, &render_predictions(preds))
}
