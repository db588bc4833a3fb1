//! Audits the checked-in aggregate fixtures and checks the reported numbers.

use std::path::{Path, PathBuf};

use occbias::audit::{audit_model, AuditInputs, AuditReport};
use occbias::corpus::{default_noun_pairs, default_professions, generate_control_corpus, generate_corpus};
use occbias::io::{read_earnings, read_metadata, read_predictions_multi};
use occbias::stats::HypothesisFamily;

const TOL: f64 = 1e-9;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn audit(name: &str, with_control: bool) -> AuditReport {
    let pairs = default_noun_pairs();
    let corpus = generate_corpus(&pairs, &default_professions()).unwrap();
    let control = generate_control_corpus(&pairs).unwrap();
    let earnings = read_earnings(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/cps_earnings_approx.csv")).unwrap();
    let path = fixture(name);
    let corpora = if with_control {
        vec![&corpus, &control]
    } else {
        vec![&corpus]
    };
    let preds = read_predictions_multi(&path, &corpora).unwrap();
    let inputs = AuditInputs {
        corpus: &corpus,
        control_corpus: with_control.then_some(&control),
        family: HypothesisFamily::new(0.01, 3).unwrap(),
        earnings: Some(&earnings),
    };
    let dev = read_metadata(&path).unwrap().and_then(|m| m.dev_accuracy);
    audit_model(&inputs, &preds, dev).unwrap()
}

fn names(rows: &[occbias::audit::ProfessionMean]) -> Vec<&str> {
    rows.iter().map(|r| r.profession.as_str()).collect()
}

#[test]
fn transformer_fixture_reports_expected_aggregates() {
    let r = audit("bert.jsonl", true);
    assert_eq!(r.model_name, "bert");
    assert_eq!(r.dev_accuracy, Some(0.930));
    assert!((r.overall.f_minus_m - -0.040).abs() < TOL, "{}", r.overall.f_minus_m);
    assert!(r.overall.reject);

    let spinster = &r.pair_gaps[0];
    assert_eq!(spinster.key, "bachelor");
    assert!((spinster.f_minus_m - -0.404).abs() < TOL, "{}", spinster.f_minus_m);
    assert!(spinster.test.p_two_sided < 0.01);

    let lowest: Vec<(&str, f64)> = r.profession_gaps[..3]
        .iter()
        .map(|g| (g.key.as_str(), g.f_minus_m))
        .collect();
    for ((name, gap), (want_name, want_gap)) in
        lowest
            .iter()
            .zip([("flight attendant", -0.132), ("bartender", -0.126), ("clerk", -0.116)])
    {
        assert_eq!(*name, want_name);
        assert!((gap - want_gap).abs() < TOL, "{name}: {gap}");
    }
    assert_eq!(r.profession_gaps.last().unwrap().key, "pilot");
    assert!(r.profession_gaps.last().unwrap().f_minus_m > 0.0);

    let means = &r.profession_means;
    assert_eq!(names(&means[..3]), ["scientist", "chef", "dancer"]);
    assert_eq!(names(&means[17..]), ["tailor", "clerk", "truck driver"]);
    assert!((means[0].mean_probability - 0.99).abs() < TOL);
    assert!((means[19].mean_probability - 0.34).abs() < TOL);

    let control = r.control.as_ref().unwrap();
    assert!((control.f_minus_m - 0.039).abs() < TOL, "{}", control.f_minus_m);
    assert_eq!(control.test.n_pairs, 20);

    let earnings = r.earnings.as_ref().unwrap();
    assert!(earnings.r > 0.0, "r = {}", earnings.r);
    assert_eq!(earnings.scatter.len(), 18);
    assert_eq!(earnings.dropped, ["dancer", "soldier"]);
}

#[test]
fn recurrent_fixture_reports_expected_aggregates() {
    let r = audit("bilstm.jsonl", false);
    assert_eq!(r.dev_accuracy, Some(0.841));
    assert!((r.overall.f_minus_m - 0.077).abs() < TOL);
    assert!(r.overall.reject);
    assert!(r.control.is_none());
    assert_eq!(names(&r.profession_means[..3]), ["dancer", "secretary", "scientist"]);
    let bottom: Vec<&str> = names(&r.profession_means).into_iter().rev().take(3).collect();
    assert_eq!(bottom, ["truck driver", "gym trainer", "nurse"]);
}

#[test]
fn bag_of_words_fixture_reports_expected_aggregates() {
    let r = audit("bow-logreg.jsonl", false);
    assert_eq!(r.dev_accuracy, Some(0.827));
    assert!((r.overall.f_minus_m - 0.035).abs() < TOL);
    assert!(r.overall.reject);
    assert_eq!(names(&r.profession_means[..3]), ["secretary", "teacher", "writer"]);
    let bottom: Vec<&str> = names(&r.profession_means).into_iter().rev().take(2).collect();
    assert_eq!(bottom, ["truck driver", "flight attendant"]);
    // the remaining low scorers are tied exactly
    let tied = &r.profession_means[r.profession_means.len() - 8..r.profession_means.len() - 2];
    assert!(tied.iter().all(|m| m.mean_probability == tied[0].mean_probability));
}
