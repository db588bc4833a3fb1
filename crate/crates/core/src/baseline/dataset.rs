use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledText {
    pub text: String,
    /// 1 = positive, 0 = negative.
    pub label: u8,
}

/// Binary-labelled sentences in SST-2 style.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDataset {
    items: Vec<LabeledText>,
}

impl LabeledDataset {
    pub fn new(items: Vec<LabeledText>) -> Result<Self> {
        for (i, item) in items.iter().enumerate() {
            if item.label > 1 {
                return Err(Error::validation(format!(
                    "item {i}: label {} is not 0 or 1",
                    item.label
                )));
            }
            if item.text.trim().is_empty() {
                return Err(Error::validation(format!("item {i}: empty text")));
            }
        }
        Ok(LabeledDataset { items })
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, u8)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(text, label)| LabeledText {
                    text: text.into(),
                    label,
                })
                .collect(),
        )
    }

    pub fn items(&self) -> &[LabeledText] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.items.iter().map(|i| i.label).collect()
    }
}
