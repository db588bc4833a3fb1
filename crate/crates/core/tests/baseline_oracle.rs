//! The baseline checked against scikit-learn's TfidfVectorizer +
//! LogisticRegression(C=1) on a synthetic labelled text set.

use std::collections::BTreeMap;

use occbias::baseline::{BaselineClassifier, LabeledDataset, LabeledText, TrainConfig};
use serde::Deserialize;

#[derive(Deserialize)]
struct Oracle {
    train: Vec<LabeledText>,
    test: Vec<String>,
    p_pos: Vec<f64>,
    idf: BTreeMap<String, f64>,
}

fn oracle() -> Oracle {
    serde_json::from_str(include_str!("oracle/sklearn_oracle.json")).unwrap()
}

#[test]
fn vocabulary_and_idf_match() {
    let o = oracle();
    let clf = BaselineClassifier::fit(&LabeledDataset::new(o.train).unwrap(), None).unwrap();
    let terms: Vec<&str> = o.idf.keys().map(String::as_str).collect();
    assert_eq!(clf.tfidf.terms(), terms.as_slice());
    for (term, &want) in &o.idf {
        let got = clf.tfidf.idf(term).unwrap();
        assert!((got - want).abs() < 1e-12, "{term}: {got} vs {want}");
    }
}

#[test]
fn probabilities_match() {
    let o = oracle();
    let train = LabeledDataset::new(o.train).unwrap();
    let config = TrainConfig {
        tolerance: 1e-8,
        ..TrainConfig::for_samples(train.len())
    };
    let clf = BaselineClassifier::fit(&train, Some(config)).unwrap();
    assert!(clf.logistic.training.converged);
    for (text, &want) in o.test.iter().zip(&o.p_pos) {
        let got = clf.predict_text(text);
        assert!((got - want).abs() < 1e-6, "{text:?}: {got} vs {want}");
    }
}

#[test]
fn unreachable_tolerance_stops_early() {
    let o = oracle();
    let train = LabeledDataset::new(o.train).unwrap();
    let config = TrainConfig {
        tolerance: 1e-15,
        ..TrainConfig::for_samples(train.len())
    };
    let clf = BaselineClassifier::fit(&train, Some(config)).unwrap();
    assert!(!clf.logistic.training.converged);
    assert!(
        clf.logistic.training.iterations < 200,
        "{}",
        clf.logistic.training.iterations
    );
}
