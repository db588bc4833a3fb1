use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::dataset::LabeledDataset;
use super::tokenize::tokenize;
use crate::error::{Error, Result};

/// Sparse vector stored as `(index, value)` pairs with strictly increasing
/// indices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::validation("sparse vector indices must be strictly increasing"));
        }
        Ok(SparseVector { entries })
    }

    pub fn zero() -> Self {
        SparseVector::default()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&(_, v)| v == 0.0)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|&(i, _)| i)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// Dot product with a dense vector. Indices must be in range.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i]).sum()
    }

    /// Scales to unit Euclidean norm; the zero vector is left unchanged.
    pub fn l2_normalized(mut self) -> Self {
        let norm = self.norm();
        if norm > 0.0 {
            for (_, v) in &mut self.entries {
                *v /= norm;
            }
        }
        self
    }
}

/// Fitted bag-of-words vocabulary with smooth idf weights:
/// `idf(t) = ln((1 + n) / (1 + df(t))) + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TfIdfModel {
    n_documents: usize,
    /// Terms in column order (sorted).
    terms: Vec<String>,
    document_frequency: Vec<usize>,
    idf: Vec<f64>,
    index: HashMap<String, usize>,
}

/// The serialisable part of a [`TfIdfModel`]; idf is recomputed on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfIdfParts {
    pub n_documents: usize,
    pub terms: Vec<String>,
    pub document_frequency: Vec<usize>,
}

pub fn smooth_idf(n_documents: usize, document_frequency: usize) -> f64 {
    ((1.0 + n_documents as f64) / (1.0 + document_frequency as f64)).ln() + 1.0
}

impl TfIdfModel {
    pub fn from_parts(parts: TfIdfParts) -> Result<Self> {
        let TfIdfParts {
            n_documents,
            terms,
            document_frequency,
        } = parts;
        if terms.len() != document_frequency.len() {
            return Err(Error::validation(
                "tf-idf vocabulary and document frequencies differ in length",
            ));
        }
        if let Some(&df) = document_frequency.iter().find(|&&df| df == 0 || df > n_documents) {
            return Err(Error::validation(format!(
                "document frequency {df} outside 1..={n_documents}"
            )));
        }
        let index: HashMap<String, usize> = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        if index.len() != terms.len() {
            return Err(Error::validation("tf-idf vocabulary has duplicate terms"));
        }
        let idf = document_frequency
            .iter()
            .map(|&df| smooth_idf(n_documents, df))
            .collect();
        Ok(TfIdfModel {
            n_documents,
            terms,
            document_frequency,
            idf,
            index,
        })
    }

    pub fn to_parts(&self) -> TfIdfParts {
        TfIdfParts {
            n_documents: self.n_documents,
            terms: self.terms.clone(),
            document_frequency: self.document_frequency.clone(),
        }
    }

    pub fn n_documents(&self) -> usize {
        self.n_documents
    }

    pub fn vocabulary_size(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.column(term).map(|i| self.document_frequency[i])
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.column(term).map(|i| self.idf[i])
    }

    /// Term counts × idf, L2-normalised. Out-of-vocabulary tokens are ignored.
    pub fn vectorize(&self, text: &str) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for token in tokenize(text) {
            if let Some(&col) = self.index.get(&token) {
                *counts.entry(col).or_insert(0.0) += 1.0;
            }
        }
        let entries = counts.into_iter().map(|(col, tf)| (col, tf * self.idf[col])).collect();
        SparseVector { entries }.l2_normalized()
    }
}

/// Builds the vocabulary and document frequencies of `dataset`.
pub fn fit_tfidf(dataset: &LabeledDataset) -> Result<TfIdfModel> {
    if dataset.is_empty() {
        return Err(Error::validation("cannot fit tf-idf on an empty dataset"));
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for item in dataset.items() {
        let unique: BTreeSet<String> = tokenize(&item.text).into_iter().collect();
        for term in unique {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let (terms, document_frequency) = df.into_iter().unzip();
    TfIdfModel::from_parts(TfIdfParts {
        n_documents: dataset.len(),
        terms,
        document_frequency,
    })
}
