//! Bag-of-words tf-idf + logistic regression sentiment baseline.

mod dataset;
mod logistic;
mod tfidf;
mod tokenize;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dataset::{LabeledDataset, LabeledText};
pub use logistic::{
    sigmoid, train_logistic, LogisticModel, Objective, TrainConfig, TrainingMetadata, DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
};
pub use tfidf::{fit_tfidf, smooth_idf, SparseVector, TfIdfModel, TfIdfParts};
pub use tokenize::tokenize;

pub const MODEL_FORMAT_VERSION: &str = "occbias-baseline/1";

/// Probability threshold for a positive decision; ties count as positive.
pub const DECISION_THRESHOLD: f64 = 0.5;

/// A fitted vectoriser and classifier pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineClassifier {
    pub tfidf: TfIdfModel,
    pub logistic: LogisticModel,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: String,
    tfidf: TfIdfParts,
    weights: Vec<f64>,
    bias: f64,
    l2_strength: f64,
    training: TrainingMetadata,
}

impl BaselineClassifier {
    /// Fits tf-idf on `train`, then the logistic model on its vectors.
    /// `config = None` uses the defaults for the training-set size.
    pub fn fit(train: &LabeledDataset, config: Option<TrainConfig>) -> Result<Self> {
        let tfidf = fit_tfidf(train)?;
        let x: Vec<SparseVector> = train.items().iter().map(|i| tfidf.vectorize(&i.text)).collect();
        let config = config.unwrap_or_else(|| TrainConfig::for_samples(train.len()));
        let logistic = train_logistic(&x, &train.labels(), tfidf.vocabulary_size(), &config)?;
        Ok(BaselineClassifier { tfidf, logistic })
    }

    pub fn predict_text(&self, text: &str) -> f64 {
        self.logistic
            .predict_positive(&self.tfidf.vectorize(text))
            .expect("tf-idf columns are within the model dimension")
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format_version: MODEL_FORMAT_VERSION.to_string(),
            tfidf: self.tfidf.to_parts(),
            weights: self.logistic.weights.clone(),
            bias: self.logistic.bias,
            l2_strength: self.logistic.l2_strength,
            training: self.logistic.training.clone(),
        };
        serde_json::to_string(&file).map_err(|e| Error::validation(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::validation(format!("malformed model file: {e}")))?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::validation(format!(
                "unsupported model format {:?} (expected {MODEL_FORMAT_VERSION})",
                file.format_version
            )));
        }
        let tfidf = TfIdfModel::from_parts(file.tfidf)?;
        if file.weights.len() != tfidf.vocabulary_size() {
            return Err(Error::validation(format!(
                "model has {} weights for a vocabulary of {}",
                file.weights.len(),
                tfidf.vocabulary_size()
            )));
        }
        Ok(BaselineClassifier {
            tfidf,
            logistic: LogisticModel {
                weights: file.weights,
                bias: file.bias,
                l2_strength: file.l2_strength,
                training: file.training,
            },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Fraction of items whose thresholded prediction matches the label.
pub fn evaluate_accuracy(model: &LogisticModel, tfidf: &TfIdfModel, dataset: &LabeledDataset) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::validation("cannot evaluate on an empty dataset"));
    }
    let mut correct = 0usize;
    for item in dataset.items() {
        let p = model.predict_positive(&tfidf.vectorize(&item.text))?;
        let predicted = u8::from(p >= DECISION_THRESHOLD);
        if predicted == item.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / dataset.len() as f64)
}
