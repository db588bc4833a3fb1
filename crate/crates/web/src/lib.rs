//! Browser demo bindings.
//!
//! Three operations, each returning JSON to the page:
//! - [`corpus_preview`]: the template corpus for the default or pasted tables
//! - [`t_test_explorer`]: a paired t-test on pasted differences with the
//!   Bonferroni decision and t-density curve data
//! - [`audit_predictions`]: a full audit of pasted prediction JSONL against
//!   the default corpus
//!
//! The plain functions are what the native tests exercise; the `wasm_*`
//! wrappers only convert errors for JavaScript.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use occbias::audit::{audit_model, AuditInputs};
use occbias::corpus::{default_noun_pairs, default_professions, generate_control_corpus, generate_corpus};
use occbias::io::{self, ReportDocument};
use occbias::stats::special::ln_gamma;
use occbias::stats::{bonferroni_decision, t_test_on_differences, HypothesisFamily};

const EARNINGS_CSV: &str = include_str!("../../core/data/cps_earnings_approx.csv");
const EXAMPLE_PREDICTIONS: &str = include_str!("../../core/tests/fixtures/bert.jsonl");
const CURVE_POINTS: usize = 241;

type Outcome = Result<String, String>;

fn to_json<T: Serialize>(value: &T) -> Outcome {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PreviewRow<'a> {
    id: &'a str,
    text: &'a str,
    gender: &'a str,
}

#[derive(Serialize)]
struct Preview<'a> {
    main: Vec<PreviewRow<'a>>,
    control: Vec<PreviewRow<'a>>,
}

/// Generates the main and control corpora. Empty inputs use the shipped
/// noun pairs and professions; otherwise they are parsed as CSV.
pub fn corpus_preview(pairs_csv: &str, professions_csv: &str) -> Outcome {
    let pairs = if pairs_csv.trim().is_empty() {
        default_noun_pairs()
    } else {
        io::parse_noun_pairs(pairs_csv.as_bytes(), "pairs").map_err(|e| e.to_string())?
    };
    let professions = if professions_csv.trim().is_empty() {
        default_professions()
    } else {
        io::parse_professions(professions_csv.as_bytes(), "professions").map_err(|e| e.to_string())?
    };
    let corpus = generate_corpus(&pairs, &professions).map_err(|e| e.to_string())?;
    let control = generate_control_corpus(&pairs).map_err(|e| e.to_string())?;
    to_json(&Preview {
        main: preview_rows(&corpus),
        control: preview_rows(&control),
    })
}

fn preview_rows(corpus: &occbias::corpus::Corpus) -> Vec<PreviewRow<'_>> {
    corpus
        .sentences()
        .iter()
        .map(|s| PreviewRow {
            id: &s.id,
            text: &s.text,
            gender: s.gender.as_str(),
        })
        .collect()
}

#[derive(Serialize)]
struct Explorer {
    n: usize,
    mean_difference: f64,
    t: Option<f64>,
    df: u32,
    p_two_sided: f64,
    threshold: f64,
    adjusted_p: f64,
    reject: bool,
    curve_x: Vec<f64>,
    curve_density: Vec<f64>,
}

fn t_density(x: f64, df: u32) -> f64 {
    let nu = df as f64;
    let log_norm = ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * std::f64::consts::PI).ln();
    (log_norm - (nu + 1.0) / 2.0 * (x * x / nu).ln_1p()).exp()
}

/// Parses whitespace- or comma-separated differences and tests their mean
/// against zero. `t` is `null` in the JSON when infinite.
pub fn t_test_explorer(differences: &str, alpha: f64, m: u32) -> Outcome {
    let diffs = differences
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("{s:?} is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    let family = HypothesisFamily::new(alpha, m).map_err(|e| e.to_string())?;
    let test = t_test_on_differences(&diffs).map_err(|e| e.to_string())?;
    let decision = bonferroni_decision(test.p_two_sided, &family);
    let span = if test.t_statistic.is_finite() {
        test.t_statistic.abs().max(4.0) + 1.0
    } else {
        5.0
    };
    let curve_x: Vec<f64> = (0..CURVE_POINTS)
        .map(|k| -span + 2.0 * span * k as f64 / (CURVE_POINTS - 1) as f64)
        .collect();
    let curve_density = curve_x.iter().map(|&x| t_density(x, test.degrees_of_freedom)).collect();
    to_json(&Explorer {
        n: test.n_pairs,
        mean_difference: test.mean_difference,
        t: test.t_statistic.is_finite().then_some(test.t_statistic),
        df: test.degrees_of_freedom,
        p_two_sided: test.p_two_sided,
        threshold: family.threshold(),
        adjusted_p: decision.adjusted_p,
        reject: decision.reject,
        curve_x,
        curve_density,
    })
}

/// Audits pasted prediction JSONL against the default corpus. Control
/// sentences are analysed when present; the earnings scatter uses the
/// shipped approximate table.
pub fn audit_predictions(jsonl: &str, alpha: f64, m: u32) -> Outcome {
    let pairs = default_noun_pairs();
    let corpus = generate_corpus(&pairs, &default_professions()).map_err(|e| e.to_string())?;
    let control = generate_control_corpus(&pairs).map_err(|e| e.to_string())?;
    let (preds, covered) = io::parse_predictions_with_optional(
        jsonl.as_bytes(),
        "pasted predictions",
        "pasted",
        &[&corpus],
        &[&control],
    )
    .map_err(|e| e.to_string())?;
    let earnings = io::parse_earnings(EARNINGS_CSV.as_bytes(), "earnings").map_err(|e| e.to_string())?;
    let family = HypothesisFamily::new(alpha, m).map_err(|e| e.to_string())?;
    let inputs = AuditInputs {
        corpus: &corpus,
        control_corpus: covered[0].then_some(&control),
        family,
        earnings: Some(&earnings),
    };
    let report = audit_model(&inputs, &preds, None).map_err(|e| e.to_string())?;
    to_json(&ReportDocument::new(family, vec![report]))
}

/// A complete example prediction file (main + control corpus).
pub fn example_predictions() -> &'static str {
    EXAMPLE_PREDICTIONS
}

#[wasm_bindgen(js_name = corpusPreview)]
pub fn wasm_corpus_preview(pairs_csv: &str, professions_csv: &str) -> Result<String, JsValue> {
    corpus_preview(pairs_csv, professions_csv).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = tTestExplorer)]
pub fn wasm_t_test_explorer(differences: &str, alpha: f64, m: u32) -> Result<String, JsValue> {
    t_test_explorer(differences, alpha, m).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = auditPredictions)]
pub fn wasm_audit_predictions(jsonl: &str, alpha: f64, m: u32) -> Result<String, JsValue> {
    audit_predictions(jsonl, alpha, m).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = examplePredictions)]
pub fn wasm_example_predictions() -> String {
    example_predictions().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preview_has_both_corpora() {
        let v: serde_json::Value = serde_json::from_str(&corpus_preview("", "").unwrap()).unwrap();
        assert_eq!(v["main"].as_array().unwrap().len(), 800);
        assert_eq!(v["control"].as_array().unwrap().len(), 40);
        assert_eq!(v["control"][0]["text"], "This boy is a person.");
        assert!(corpus_preview("pair_id,male,female\nboy,This boy,This girl\n", "").is_err());
    }

    #[test]
    fn explorer_reports_decision_and_curve() {
        let v: serde_json::Value =
            serde_json::from_str(&t_test_explorer("0.1, 0.2 0.2\n0.2", 0.01, 3).unwrap()).unwrap();
        assert!((v["t"].as_f64().unwrap() - 7.0).abs() < 1e-12);
        assert_eq!(v["df"], 3);
        assert_eq!(v["reject"], false);
        let density = v["curve_density"].as_array().unwrap();
        assert_eq!(density.len(), CURVE_POINTS);
        let peak = density[CURVE_POINTS / 2].as_f64().unwrap();
        // t(3) density at zero: 2 / (pi sqrt 3)
        assert!((peak - 2.0 / (std::f64::consts::PI * 3f64.sqrt())).abs() < 1e-12);

        let constant: serde_json::Value = serde_json::from_str(&t_test_explorer("1 1 1", 0.01, 1).unwrap()).unwrap();
        assert!(constant["t"].is_null());
        assert!(t_test_explorer("1 x", 0.01, 1).is_err());
        assert!(t_test_explorer("1 2", 0.01, 0).is_err());
    }

    #[test]
    fn audit_of_example_matches_fixture() {
        let v: serde_json::Value =
            serde_json::from_str(&audit_predictions(example_predictions(), 0.01, 3).unwrap()).unwrap();
        let model = &v["models"][0];
        assert!((model["overall"]["f_minus_m"].as_f64().unwrap() + 0.040).abs() < 1e-9);
        assert!(model["control"].is_object());
        assert!(model["earnings"]["r"].as_f64().unwrap() > 0.0);

        let partial: String = example_predictions()
            .lines()
            .skip(1)
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(audit_predictions(&partial, 0.01, 3).unwrap_err().contains("missing id"));
    }
}
