//! Writes the aggregate-encoding prediction fixtures used by the test suite.
//!
//! Each fixture assigns per-sentence probabilities whose audit aggregates
//! (overall gap, group gaps, profession means, control gap) equal chosen
//! targets up to float rounding. Cells are built as
//! `female = mean + d / 2`, `male = mean - d / 2`, with the differences `d`
//! following an additive pair + profession model.
//!
//! Usage: `cargo run -p occbias --example make_fixtures [OUT_DIR]`
//! (default `crates/core/tests/fixtures`).

use std::collections::BTreeMap;
use std::path::PathBuf;

use occbias::audit::PredictionSet;
use occbias::corpus::{
    default_noun_pairs, default_professions, generate_control_corpus, generate_corpus, Corpus, Gender,
};
use occbias::io::{write_metadata, write_predictions, PredictionMetadata};

/// Zero-sum pattern of the given length with amplitude `scale`.
fn zero_sum(n: usize, scale: f64) -> Vec<f64> {
    let mid = (n as f64 - 1.0) / 2.0;
    (0..n).map(|k| scale * (k as f64 - mid) / mid).collect()
}

struct Design {
    name: &'static str,
    dev_accuracy: f64,
    overall: f64,
    /// Per-pair gap targets; `None` entries share what is left of the total.
    pair_gaps: Vec<(&'static str, Option<f64>)>,
    /// Per-profession gap targets; `None` entries share the remainder.
    profession_gaps: Vec<(&'static str, Option<f64>)>,
    /// Mean probability per profession.
    means: Vec<(&'static str, f64)>,
    /// Professions whose gap is kept free of pair effects (means near 0 or 1).
    fixed: Vec<&'static str>,
    control_gap: Option<f64>,
}

/// Fills `None` targets so that the targets average to `overall`, spreading
/// the remainder with a small zero-sum pattern.
fn resolve(targets: &[(&'static str, Option<f64>)], overall: f64, spread: f64) -> Vec<(&'static str, f64)> {
    let n = targets.len() as f64;
    let known: f64 = targets.iter().filter_map(|t| t.1).sum();
    let free: Vec<usize> = (0..targets.len()).filter(|&k| targets[k].1.is_none()).collect();
    let share = (overall * n - known) / free.len() as f64;
    let pattern = zero_sum(free.len(), spread);
    let mut out: Vec<(&'static str, f64)> = targets.iter().map(|t| (t.0, t.1.unwrap_or(0.0))).collect();
    for (slot, &k) in free.iter().enumerate() {
        out[k].1 = share + pattern[slot];
    }
    out
}

fn build(design: &Design, corpus: &Corpus, control: &Corpus) -> PredictionSet {
    let pairs = resolve(&design.pair_gaps, design.overall, 0.03);
    let professions = resolve(&design.profession_gaps, design.overall, 0.02);
    let n_professions = professions.len() as f64;
    let n_fixed = design.fixed.len() as f64;
    let n_free = professions.len() as f64 - n_fixed;
    let wobble = zero_sum(pairs.len(), 0.004);

    let u: BTreeMap<&str, f64> = pairs.iter().copied().collect();
    let t: BTreeMap<&str, f64> = professions.iter().copied().collect();
    let mu: BTreeMap<&str, f64> = design.means.iter().copied().collect();
    let eps: BTreeMap<&str, f64> = pairs.iter().zip(&wobble).map(|(p, w)| (p.0, *w)).collect();

    let mut values = BTreeMap::new();
    for couple in corpus.couples() {
        let pair = couple.pair_id;
        let prof = couple.profession_name;
        let d = if design.fixed.contains(&prof) {
            t[prof] + eps[pair]
        } else {
            let alpha = n_professions / n_free * (u[pair] - design.overall - n_fixed * eps[pair] / n_professions);
            alpha + t[prof]
        };
        let m = mu[prof];
        let (f, male) = (m + d / 2.0, m - d / 2.0);
        assert!(
            (0.0..=1.0).contains(&f) && (0.0..=1.0).contains(&male),
            "{pair}/{prof}: {f} {male}"
        );
        values.insert(couple.female_id.to_string(), f);
        values.insert(couple.male_id.to_string(), male);
    }
    if let Some(gap) = design.control_gap {
        let pattern = zero_sum(control.couples().len(), 0.02);
        for (couple, w) in control.couples().into_iter().zip(pattern) {
            values.insert(couple.female_id.to_string(), 0.6 + (gap + w) / 2.0);
            values.insert(couple.male_id.to_string(), 0.6 - (gap + w) / 2.0);
        }
    }
    PredictionSet::new(design.name, values).expect("probabilities in range")
}

fn designs() -> Vec<Design> {
    let pair_ids: Vec<&'static str> = vec![
        "boy",
        "man",
        "bachelor",
        "brother",
        "son",
        "husband",
        "boyfriend",
        "father",
        "uncle",
        "dad",
        "gentleman",
        "groom",
        "nephew",
        "grandfather",
        "stepfather",
        "fiance",
        "grandson",
        "king",
        "prince",
        "schoolboy",
    ];
    let all_free = |ids: &[&'static str]| ids.iter().map(|p| (*p, None)).collect::<Vec<_>>();

    let bert = Design {
        name: "bert",
        dev_accuracy: 0.930,
        overall: -0.040,
        pair_gaps: pair_ids
            .iter()
            .map(|&p| (p, (p == "bachelor").then_some(-0.404)))
            .collect(),
        profession_gaps: vec![
            ("truck driver", None),
            ("mechanic", None),
            ("pilot", Some(0.080)),
            ("chef", Some(-0.020)),
            ("soldier", None),
            ("teacher", None),
            ("flight attendant", Some(-0.132)),
            ("clerk", Some(-0.116)),
            ("secretary", None),
            ("nurse", None),
            ("scientist", Some(0.010)),
            ("lawyer", None),
            ("doctor", None),
            ("writer", None),
            ("dancer", Some(0.015)),
            ("professor", None),
            ("tailor", None),
            ("gym trainer", None),
            ("baker", None),
            ("bartender", Some(-0.126)),
        ],
        means: vec![
            ("truck driver", 0.34),
            ("mechanic", 0.47),
            ("pilot", 0.72),
            ("chef", 0.78),
            ("soldier", 0.55),
            ("teacher", 0.62),
            ("flight attendant", 0.50),
            ("clerk", 0.38),
            ("secretary", 0.52),
            ("nurse", 0.66),
            ("scientist", 0.99),
            ("lawyer", 0.75),
            ("doctor", 0.74),
            ("writer", 0.64),
            ("dancer", 0.77),
            ("professor", 0.70),
            ("tailor", 0.40),
            ("gym trainer", 0.46),
            ("baker", 0.48),
            ("bartender", 0.50),
        ],
        fixed: vec!["scientist", "chef", "dancer"],
        control_gap: Some(0.039),
    };

    let bilstm = Design {
        name: "bilstm",
        dev_accuracy: 0.841,
        overall: 0.077,
        pair_gaps: all_free(&pair_ids),
        profession_gaps: all_free(&[
            "truck driver",
            "mechanic",
            "pilot",
            "chef",
            "soldier",
            "teacher",
            "flight attendant",
            "clerk",
            "secretary",
            "nurse",
            "scientist",
            "lawyer",
            "doctor",
            "writer",
            "dancer",
            "professor",
            "tailor",
            "gym trainer",
            "baker",
            "bartender",
        ]),
        means: vec![
            ("truck driver", 0.30),
            ("mechanic", 0.52),
            ("pilot", 0.58),
            ("chef", 0.61),
            ("soldier", 0.50),
            ("teacher", 0.63),
            ("flight attendant", 0.47),
            ("clerk", 0.45),
            ("secretary", 0.80),
            ("nurse", 0.40),
            ("scientist", 0.76),
            ("lawyer", 0.55),
            ("doctor", 0.60),
            ("writer", 0.66),
            ("dancer", 0.84),
            ("professor", 0.64),
            ("tailor", 0.49),
            ("gym trainer", 0.36),
            ("baker", 0.57),
            ("bartender", 0.53),
        ],
        fixed: vec![],
        control_gap: None,
    };

    // Professions absent from the training data share one mean and one gap,
    // so their cells and means are bitwise identical.
    let unseen = 0.55;
    let unseen_names = ["mechanic", "clerk", "tailor", "gym trainer", "baker", "bartender"];
    let bow = Design {
        name: "bow-logreg",
        dev_accuracy: 0.827,
        overall: 0.035,
        pair_gaps: all_free(&pair_ids),
        profession_gaps: [
            "truck driver",
            "mechanic",
            "pilot",
            "chef",
            "soldier",
            "teacher",
            "flight attendant",
            "clerk",
            "secretary",
            "nurse",
            "scientist",
            "lawyer",
            "doctor",
            "writer",
            "dancer",
            "professor",
            "tailor",
            "gym trainer",
            "baker",
            "bartender",
        ]
        .iter()
        .map(|&p| (p, unseen_names.contains(&p).then_some(0.035)))
        .collect(),
        means: vec![
            ("truck driver", 0.41),
            ("mechanic", unseen),
            ("pilot", 0.60),
            ("chef", 0.58),
            ("soldier", 0.57),
            ("teacher", 0.72),
            ("flight attendant", 0.47),
            ("clerk", unseen),
            ("secretary", 0.86),
            ("nurse", 0.62),
            ("scientist", 0.59),
            ("lawyer", 0.61),
            ("doctor", 0.63),
            ("writer", 0.70),
            ("dancer", 0.66),
            ("professor", 0.64),
            ("tailor", unseen),
            ("gym trainer", unseen),
            ("baker", unseen),
            ("bartender", unseen),
        ],
        fixed: vec![],
        control_gap: None,
    };
    vec![bow, bilstm, bert]
}

fn main() {
    let out_dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"));
    std::fs::create_dir_all(&out_dir).expect("create output directory");

    let pairs = default_noun_pairs();
    let corpus = generate_corpus(&pairs, &default_professions()).expect("default corpus");
    let control = generate_control_corpus(&pairs).expect("control corpus");
    debug_assert_eq!(corpus.count_gender(Gender::Female), 400);

    for design in designs() {
        let preds = build(&design, &corpus, &control);
        let path = out_dir.join(format!("{}.jsonl", design.name));
        write_predictions(&preds, &path).expect("write predictions");
        let meta = PredictionMetadata {
            model_name: Some(design.name.to_string()),
            dev_accuracy: Some(design.dev_accuracy),
            details: serde_json::json!({
                "kind": "aggregate fixture",
                "target_overall_gap": design.overall,
            }),
        };
        write_metadata(&path, &meta).expect("write metadata");
        println!("wrote {} ({} predictions)", path.display(), preds.len());
    }
}
