//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! Criteria that need SST-2 read `train.tsv` and `dev.tsv` (GLUE layout,
//! header `sentence<TAB>label`) from `$SST2_DIR`, or from `data/sst2/` at the
//! workspace root when the variable is unset.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use occbias::audit::{
    audit_model, noun_pair_gaps, overall_gender_gap, profession_gender_gaps, training_set_gender_stats, AuditInputs,
    AuditReport, PredictionSet,
};
use occbias::baseline::{evaluate_accuracy, BaselineClassifier, LabeledDataset};
use occbias::corpus::{
    default_noun_pairs, default_professions, generate_control_corpus, generate_corpus, has_template_shape, Corpus,
    Gender,
};
use occbias::io::{self, ReportDocument};
use occbias::stats::{bonferroni_decision, paired_t_test, student_t_cdf, HypothesisFamily};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn default_corpora() -> (Corpus, Corpus) {
    let pairs = default_noun_pairs();
    (
        generate_corpus(&pairs, &default_professions()).unwrap(),
        generate_control_corpus(&pairs).unwrap(),
    )
}

struct Sst2 {
    train: LabeledDataset,
    dev: LabeledDataset,
}

fn sst2_dir() -> PathBuf {
    std::env::var_os("SST2_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest_dir().parent().unwrap().parent().unwrap().join("data/sst2"))
}

fn load_sst2() -> Result<Sst2, String> {
    let dir = sst2_dir();
    let (train, dev) = (dir.join("train.tsv"), dir.join("dev.tsv"));
    if !train.exists() || !dev.exists() {
        return Err(format!(
            "SST-2 not found (need {} and {}; set SST2_DIR)",
            train.display(),
            dev.display()
        ));
    }
    Ok(Sst2 {
        train: io::read_sst2(&train).map_err(|e| e.to_string())?,
        dev: io::read_sst2(&dev).map_err(|e| e.to_string())?,
    })
}

fn corpus_generation() -> Verdict {
    let started = Instant::now();
    let (corpus, control) = default_corpora();
    let elapsed = started.elapsed();
    ensure(corpus.len() == 800, format!("{} sentences", corpus.len()))?;
    ensure(
        corpus.count_gender(Gender::Male) == 400 && corpus.count_gender(Gender::Female) == 400,
        "gender counts are not 400/400",
    )?;
    ensure(
        corpus.pair_ids().len() == 20 && corpus.profession_names().len() == 20,
        "grid is not 20 x 20",
    )?;
    ensure(
        corpus.sentences().iter().all(|s| has_template_shape(&s.text)),
        "template shape violated",
    )?;
    ensure(control.len() == 40, format!("control has {} sentences", control.len()))?;
    ensure(elapsed.as_secs_f64() < 1.0, format!("took {elapsed:?}"))?;
    Ok(format!(
        "800 sentences (400/400), 20x20x2 grid, control 40, {elapsed:?}"
    ))
}

struct TrainedBaseline {
    clf: BaselineClassifier,
    dev_accuracy: f64,
    seconds: f64,
}

fn train_baseline(data: &Sst2) -> Result<TrainedBaseline, String> {
    let started = Instant::now();
    let clf = BaselineClassifier::fit(&data.train, None).map_err(|e| e.to_string())?;
    let dev_accuracy = evaluate_accuracy(&clf.logistic, &clf.tfidf, &data.dev).map_err(|e| e.to_string())?;
    Ok(TrainedBaseline {
        clf,
        dev_accuracy,
        seconds: started.elapsed().as_secs_f64(),
    })
}

fn baseline_dev_accuracy(trained: &Result<TrainedBaseline, String>) -> Verdict {
    let t = trained.as_ref().map_err(Clone::clone)?;
    ensure(
        (0.80..=0.86).contains(&t.dev_accuracy),
        format!("dev accuracy {:.4} outside [0.80, 0.86]", t.dev_accuracy),
    )?;
    ensure(t.seconds < 300.0, format!("training took {:.1} s", t.seconds))?;
    Ok(format!("dev accuracy {:.4} in {:.1} s", t.dev_accuracy, t.seconds))
}

fn baseline_gender_gap(trained: &Result<TrainedBaseline, String>) -> Verdict {
    let t = trained.as_ref().map_err(Clone::clone)?;
    let (corpus, _) = default_corpora();
    let preds = PredictionSet::new(
        "baseline",
        corpus
            .sentences()
            .iter()
            .map(|s| (s.id.clone(), t.clf.predict_text(&s.text)))
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let family = HypothesisFamily::new(0.01, 3).unwrap();
    let gap = overall_gender_gap(&corpus, &preds, &family).map_err(|e| e.to_string())?;
    let summary = format!("F-M {:.4}, p {:.3e}", gap.f_minus_m, gap.test.p_two_sided);
    ensure(gap.f_minus_m > 0.0, format!("{summary}: not positive"))?;
    ensure(
        gap.test.p_two_sided < 0.01 / 3.0,
        format!("{summary}: not significant at 0.01/3"),
    )?;
    ensure(
        (0.005..=0.080).contains(&gap.f_minus_m),
        format!("{summary}: outside [0.005, 0.080]"),
    )?;
    Ok(summary)
}

fn statistical_oracles() -> Verdict {
    let cases = common::ttest_oracle();
    ensure(cases.len() == 100, "oracle file does not hold 100 cases")?;
    let mut worst_p: f64 = 0.0;
    for (k, case) in cases.iter().enumerate() {
        let p = paired_t_test(&case.a, &case.b).map_err(|e| e.to_string())?.p_two_sided;
        let err = (p - case.p).abs();
        ensure(err < 1e-8, format!("case {k}: p {p} vs reference {}", case.p))?;
        worst_p = worst_p.max(err);
    }
    let grid = common::cdf_grid();
    ensure(grid.len() == 50, "CDF grid does not hold 50 points")?;
    let mut worst_cdf: f64 = 0.0;
    for &(t, df) in &grid {
        let err = (student_t_cdf(t, df) - common::t_cdf_by_quadrature(t, df)).abs();
        ensure(err < 1e-9, format!("CDF at t={t}, df={df} off by {err:e}"))?;
        worst_cdf = worst_cdf.max(err);
    }
    Ok(format!(
        "100 paired tests vs scipy (max |dp| {worst_p:.1e}); 50 CDF points vs quadrature (max {worst_cdf:.1e})"
    ))
}

fn bonferroni_rule() -> Verdict {
    let mut checked = 0;
    for m in [1u32, 3, 10] {
        let family = HypothesisFamily::new(0.01, m).unwrap();
        for p in common::bonferroni_p_grid() {
            let d = bonferroni_decision(p, &family);
            ensure(
                d.reject == (p < 0.01 / m as f64),
                format!("p={p}, m={m}: reject={}", d.reject),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (p, m) decisions equal p < alpha/m"))
}

fn consistency_invariants() -> Verdict {
    let (corpus, _) = default_corpora();
    let family = HypothesisFamily::default();
    let mut rng = StdRng::seed_from_u64(0x5EED);
    let mut worst: f64 = 0.0;
    for round in 0..200 {
        let preds = PredictionSet::new(
            "random",
            corpus
                .sentences()
                .iter()
                .map(|s| (s.id.clone(), rng.random::<f64>()))
                .collect(),
        )
        .unwrap();
        let overall = overall_gender_gap(&corpus, &preds, &family).unwrap();
        let mean =
            |rows: Vec<occbias::audit::GroupGap>| rows.iter().map(|g| g.f_minus_m).sum::<f64>() / rows.len() as f64;
        let by_prof = mean(profession_gender_gaps(&corpus, &preds).unwrap());
        let by_pair = mean(noun_pair_gaps(&corpus, &preds).unwrap());
        let err = (overall.f_minus_m - by_prof)
            .abs()
            .max((overall.f_minus_m - by_pair).abs());
        ensure(err < 1e-12, format!("round {round}: group means differ by {err:e}"))?;
        worst = worst.max(err);

        let swapped = overall_gender_gap(&corpus, &preds.gender_swapped(&corpus).unwrap(), &family).unwrap();
        ensure(
            swapped.f_minus_m == -overall.f_minus_m
                && swapped.test.t_statistic == -overall.test.t_statistic
                && swapped.test.p_two_sided == overall.test.p_two_sided,
            format!("round {round}: swap is not exactly antisymmetric"),
        )?;
    }
    Ok(format!(
        "200 random prediction sets; max group-mean deviation {worst:.1e}; swap exact"
    ))
}

fn sst2_skew(data: &Result<Sst2, String>) -> Verdict {
    let data = data.as_ref().map_err(Clone::clone)?;
    let skew = training_set_gender_stats(&data.train, &io::default_lexicon()).map_err(|e| e.to_string())?;
    let (male, female) = (&skew.male, &skew.female);
    let summary = format!(
        "male {} (mean {:.3}), female {} (mean {:.3})",
        male.count,
        male.mean_label.unwrap_or(f64::NAN),
        female.count,
        female.mean_label.unwrap_or(f64::NAN)
    );
    let within = |v: usize, target: f64| (v as f64 - target).abs() <= 0.15 * target;
    ensure(
        within(male.count, 1182.0),
        format!("{summary}: male count outside 1182 +/- 15%"),
    )?;
    ensure(
        within(female.count, 601.0),
        format!("{summary}: female count outside 601 +/- 15%"),
    )?;
    let near = |m: Option<f64>, target: f64| m.is_some_and(|v| (v - target).abs() <= 0.05);
    ensure(
        near(male.mean_label, 0.535),
        format!("{summary}: male mean outside 0.535 +/- 0.05"),
    )?;
    ensure(
        near(female.mean_label, 0.599),
        format!("{summary}: female mean outside 0.599 +/- 0.05"),
    )?;
    Ok(summary)
}

fn run_cli(args: &[&std::ffi::OsStr]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_occbias"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn protocol_end_to_end() -> Verdict {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let fixture = manifest_dir().join("tests/fixtures/mini_sst");
    let model = dir.join("model.json");
    let preds = dir.join("baseline.jsonl");
    let report = dir.join("report");
    let os = |p: &Path| p.as_os_str().to_owned();
    let steps: Vec<(&str, Vec<std::ffi::OsString>)> = vec![
        ("gen-corpus", vec!["gen-corpus".into(), "--out-dir".into(), os(dir)]),
        (
            "train",
            vec![
                "train".into(),
                "--train".into(),
                os(&fixture.join("train.tsv")),
                "--model".into(),
                os(&model),
            ],
        ),
        (
            "predict",
            vec![
                "predict".into(),
                "--model".into(),
                os(&model),
                "--corpus".into(),
                os(&dir.join("corpus.csv")),
                "--out".into(),
                os(&preds),
            ],
        ),
        (
            "audit",
            vec![
                "audit".into(),
                "--quiet".into(),
                "--corpus".into(),
                os(&dir.join("corpus.csv")),
                "--predictions".into(),
                os(&preds),
                "--out-dir".into(),
                os(&report),
            ],
        ),
    ];
    for (name, args) in &steps {
        let refs: Vec<&std::ffi::OsStr> = args.iter().map(|a| a.as_os_str()).collect();
        let out = run_cli(&refs)?;
        ensure(
            out.status.code() == Some(0),
            format!(
                "{name} exited {:?}: {}",
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            ),
        )?;
    }
    let json_path = report.join("report.json");
    let text = std::fs::read_to_string(&json_path).map_err(|e| e.to_string())?;
    let doc = ReportDocument::from_json(&text).map_err(|e| e.to_string())?;
    ensure(doc.to_json() == text, "report.json does not re-serialise byte-for-byte")?;

    // drop one record and audit again
    let lines = std::fs::read_to_string(&preds).map_err(|e| e.to_string())?;
    let dropped = "bachelor:f:pilot";
    let kept: Vec<&str> = lines
        .lines()
        .filter(|l| !l.contains(&format!("\"{dropped}\"")))
        .collect();
    ensure(kept.len() == 799, "expected to drop exactly one record")?;
    std::fs::write(&preds, kept.join("\n") + "\n").map_err(|e| e.to_string())?;
    let audit_args: Vec<&std::ffi::OsStr> = steps[3].1.iter().map(|a| a.as_os_str()).collect();
    let out = run_cli(&audit_args)?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(
        out.status.code() == Some(1),
        format!("incomplete file exited {:?}", out.status.code()),
    )?;
    ensure(
        stderr.contains(dropped),
        format!("error does not name {dropped}: {stderr}"),
    )?;
    Ok(format!(
        "4 steps exit 0; report.json round-trips; incomplete file rejected naming {dropped}"
    ))
}

fn fixture_audit(name: &str, corpus: &Corpus, control: Option<&Corpus>) -> AuditReport {
    let path = manifest_dir().join("../core/tests/fixtures").join(name);
    let earnings = io::read_earnings(&manifest_dir().join("../core/data/cps_earnings_approx.csv")).unwrap();
    let corpora: Vec<&Corpus> = std::iter::once(corpus).chain(control).collect();
    let preds = io::read_predictions_multi(&path, &corpora).unwrap();
    let inputs = AuditInputs {
        corpus,
        control_corpus: control,
        family: HypothesisFamily::new(0.01, 3).unwrap(),
        earnings: Some(&earnings),
    };
    let dev = io::read_metadata(&path).unwrap().and_then(|m| m.dev_accuracy);
    audit_model(&inputs, &preds, dev).unwrap()
}

fn reported_aggregates() -> Verdict {
    let (corpus, control) = default_corpora();
    let close = |got: f64, want: f64, what: &str| ensure((got - want).abs() < 1e-9, format!("{what}: {got} vs {want}"));

    for (file, gap) in [("bow-logreg.jsonl", 0.035), ("bilstm.jsonl", 0.077)] {
        let r = fixture_audit(file, &corpus, None);
        close(r.overall.f_minus_m, gap, file)?;
        ensure(r.overall.reject, format!("{file}: not significant"))?;
    }
    let r = fixture_audit("bert.jsonl", &corpus, Some(&control));
    close(r.overall.f_minus_m, -0.040, "bert F-M")?;
    ensure(r.overall.reject, "bert F-M not significant")?;
    ensure(
        r.pair_gaps[0].key == "bachelor",
        "spinster-bachelor is not the most negative pair",
    )?;
    close(r.pair_gaps[0].f_minus_m, -0.404, "spinster-bachelor")?;
    for (row, (name, want)) in
        r.profession_gaps
            .iter()
            .zip([("flight attendant", -0.132), ("bartender", -0.126), ("clerk", -0.116)])
    {
        ensure(row.key == name, format!("expected {name}, found {}", row.key))?;
        close(row.f_minus_m, want, name)?;
    }
    let top = r.profession_gaps.last().unwrap();
    ensure(
        top.key == "pilot" && top.f_minus_m > 0.0,
        "pilot is not the largest positive gap",
    )?;
    let means = &r.profession_means;
    ensure(
        means[0].profession == "scientist",
        "scientist is not the top profession",
    )?;
    close(means[0].mean_probability, 0.99, "scientist mean")?;
    ensure(
        means[19].profession == "truck driver",
        "truck driver is not the bottom profession",
    )?;
    close(means[19].mean_probability, 0.34, "truck driver mean")?;
    close(r.control.as_ref().unwrap().f_minus_m, 0.039, "control gap")?;
    let corr = r.earnings.as_ref().unwrap().r;
    ensure(corr > 0.0, format!("earnings r = {corr}"))?;
    Ok(format!(
        "F-M 0.035/0.077/-0.040 (all **), spinster-bachelor -0.404, fl.att./bartender/clerk -0.132/-0.126/-0.116, \
         scientist 0.99, truck driver 0.34, control 0.039, earnings r {corr:.3}"
    ))
}

type Criterion<'a> = Box<dyn FnOnce() -> Verdict + 'a>;

fn main() {
    let sst2 = load_sst2();
    let trained = sst2.as_ref().map_err(Clone::clone).and_then(train_baseline);

    let criteria: Vec<(&str, Criterion)> = vec![
        ("corpus generation", Box::new(corpus_generation)),
        ("baseline dev accuracy", Box::new(|| baseline_dev_accuracy(&trained))),
        ("baseline gender gap", Box::new(|| baseline_gender_gap(&trained))),
        ("statistical oracle equivalence", Box::new(statistical_oracles)),
        ("Bonferroni rule", Box::new(bonferroni_rule)),
        ("consistency invariants", Box::new(consistency_invariants)),
        ("SST-2 skew", Box::new(|| sst2_skew(&sst2))),
        ("protocol end-to-end", Box::new(protocol_end_to_end)),
        ("reported aggregates via fixtures", Box::new(reported_aggregates)),
    ];

    let mut failures = 0;
    for (name, check) in criteria {
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        match verdict {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {failures} failing criterion(s)");
    if failures > 0 {
        std::process::exit(1);
    }
}
