//! `occbias`: generate the template corpus, train the bag-of-words baseline,
//! emit protocol predictions and audit one or more prediction files.
//!
//! Exit codes: 0 on success, 1 for invalid input (usage, parse, validation,
//! missing files), 2 for anything else.

use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use occbias::audit::{audit_model, training_set_gender_stats, AuditInputs, GenderLexicon, PredictionSet};
use occbias::baseline::{evaluate_accuracy, BaselineClassifier, TrainConfig};
use occbias::corpus::{default_noun_pairs, default_professions, generate_control_corpus, generate_corpus, Corpus};
use occbias::io;
use occbias::stats::{HypothesisFamily, DEFAULT_ALPHA};
use occbias::{Error, Result};

#[derive(Parser)]
#[command(
    name = "occbias",
    version,
    about = "Occupational gender bias audit for sentiment models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the main and control template corpora as CSV.
    GenCorpus(GenCorpusArgs),
    /// Train the tf-idf + logistic regression baseline on SST-2 style TSV.
    Train(TrainArgs),
    /// Score a corpus with a trained baseline and write protocol predictions.
    Predict(PredictArgs),
    /// Audit one or more prediction files and write the report.
    Audit(AuditArgs),
    /// Count training sentences with gendered nouns and their mean label.
    Skew(SkewArgs),
}

#[derive(Args)]
struct GenCorpusArgs {
    /// Noun pairs CSV (pair_id,male,female); defaults to the shipped pairs.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Professions CSV (name,article,dominance,cps_female_share).
    #[arg(long)]
    professions: Option<PathBuf>,
    /// Directory for corpus.csv and control_corpus.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Training TSV with header `sentence<TAB>label`.
    #[arg(long)]
    train: PathBuf,
    /// Optional held-out TSV for accuracy.
    #[arg(long)]
    dev: Option<PathBuf>,
    /// Where to write the model JSON.
    #[arg(long)]
    model: PathBuf,
    /// L2 strength on the mean loss; defaults to 1 / n_train.
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long, default_value_t = occbias::baseline::DEFAULT_MAX_ITERATIONS)]
    max_iter: usize,
    /// Stop when the gradient infinity norm falls below this.
    #[arg(long, default_value_t = occbias::baseline::DEFAULT_TOLERANCE)]
    tol: f64,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Main corpus CSV; defaults to the generated default corpus.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Control corpus CSV to score as well.
    #[arg(long)]
    control_corpus: Option<PathBuf>,
    /// Output JSONL; a `.meta.json` sidecar is written next to it.
    #[arg(long)]
    out: PathBuf,
    /// Model name recorded in the sidecar; defaults to the output file stem.
    #[arg(long)]
    name: Option<String>,
    /// Held-out TSV whose accuracy is recorded in the sidecar.
    #[arg(long)]
    dev: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Main corpus CSV; defaults to the generated default corpus.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Control corpus CSV; prediction files that cover it get a control
    /// analysis. Defaults to the generated control corpus when `--corpus` is
    /// also omitted.
    #[arg(long)]
    control_corpus: Option<PathBuf>,
    /// Prediction JSONL files, one per model.
    #[arg(long, num_args = 1.., required = true)]
    predictions: Vec<PathBuf>,
    /// Family-wise significance level.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Number of hypotheses for Bonferroni; defaults to the number of prediction files.
    #[arg(long)]
    m: Option<u32>,
    /// Earnings CSV (profession,median_weekly_earnings_usd).
    #[arg(long)]
    earnings: Option<PathBuf>,
    /// Alias CSV (profession,earnings_name) for earnings lookups.
    #[arg(long, requires = "earnings")]
    aliases: Option<PathBuf>,
    /// Training TSV for the gendered-noun skew section.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Gendered-noun lexicon CSV (term,gender); defaults to the shipped lexicon.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Directory for report.json, report.txt and scatter.csv.
    #[arg(long)]
    out_dir: PathBuf,
    /// Do not print the human-readable report.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct SkewArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::GenCorpus(args) => gen_corpus(args),
        Command::Train(args) => train(args),
        Command::Predict(args) => predict(args),
        Command::Audit(args) => audit(args),
        Command::Skew(args) => skew(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        e if e.is_user_error() => 1,
        Error::Io { source, .. } if source.kind() == ErrorKind::NotFound => 1,
        _ => 2,
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("summary serialises"));
}

fn load_corpus(path: Option<&Path>) -> Result<Corpus> {
    match path {
        Some(p) => io::read_corpus(p),
        None => generate_corpus(&default_noun_pairs(), &default_professions()),
    }
}

fn load_lexicon(path: Option<&Path>) -> Result<GenderLexicon> {
    path.map_or_else(|| Ok(io::default_lexicon()), io::read_lexicon)
}

fn gen_corpus(args: GenCorpusArgs) -> Result<()> {
    let started = Instant::now();
    let pairs = args
        .pairs
        .as_deref()
        .map_or_else(|| Ok(default_noun_pairs()), io::read_noun_pairs)?;
    let professions = args
        .professions
        .as_deref()
        .map_or_else(|| Ok(default_professions()), io::read_professions)?;
    let corpus = generate_corpus(&pairs, &professions)?;
    let control = generate_control_corpus(&pairs)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::Io {
        path: args.out_dir.clone(),
        source: e,
    })?;
    let main_path = args.out_dir.join("corpus.csv");
    let control_path = args.out_dir.join("control_corpus.csv");
    io::write_corpus(&corpus, &main_path)?;
    io::write_corpus(&control, &control_path)?;
    print_json(&serde_json::json!({
        "corpus": main_path,
        "sentences": corpus.len(),
        "control_corpus": control_path,
        "control_sentences": control.len(),
        "seconds": started.elapsed().as_secs_f64(),
    }));
    Ok(())
}

fn train(args: TrainArgs) -> Result<()> {
    let started = Instant::now();
    let train = io::read_sst2(&args.train)?;
    let mut config = TrainConfig::for_samples(train.len());
    if let Some(l2) = args.l2 {
        config.l2_strength = l2;
    }
    config.max_iterations = args.max_iter;
    config.tolerance = args.tol;
    let clf = BaselineClassifier::fit(&train, Some(config))?;
    if !clf.logistic.training.converged {
        eprintln!(
            "warning: optimiser stopped after {} iterations without converging (gradient norm {:e})",
            clf.logistic.training.iterations, clf.logistic.training.final_gradient_norm
        );
    }
    let dev_accuracy = match &args.dev {
        Some(path) => Some(evaluate_accuracy(&clf.logistic, &clf.tfidf, &io::read_sst2(path)?)?),
        None => None,
    };
    clf.save(&args.model)?;
    print_json(&serde_json::json!({
        "model": args.model,
        "train_sentences": train.len(),
        "vocabulary": clf.tfidf.vocabulary_size(),
        "l2_strength": clf.logistic.l2_strength,
        "iterations": clf.logistic.training.iterations,
        "converged": clf.logistic.training.converged,
        "final_objective": clf.logistic.training.final_objective,
        "dev_accuracy": dev_accuracy,
        "seconds": started.elapsed().as_secs_f64(),
    }));
    Ok(())
}

fn predict(args: PredictArgs) -> Result<()> {
    let clf = BaselineClassifier::load(&args.model)?;
    let corpus = load_corpus(args.corpus.as_deref())?;
    let control = args.control_corpus.as_deref().map(io::read_corpus).transpose()?;
    let name = args.name.clone().unwrap_or_else(|| {
        args.out
            .file_stem()
            .map_or_else(|| "baseline".to_string(), |s| s.to_string_lossy().into_owned())
    });
    let scored = corpus
        .sentences()
        .iter()
        .chain(control.iter().flat_map(|c| c.sentences()))
        .map(|s| (s.id.clone(), clf.predict_text(&s.text)))
        .collect();
    let preds = PredictionSet::new(name.clone(), scored)?;
    let dev_accuracy = match &args.dev {
        Some(path) => Some(evaluate_accuracy(&clf.logistic, &clf.tfidf, &io::read_sst2(path)?)?),
        None => None,
    };
    io::write_predictions(&preds, &args.out)?;
    let meta = io::PredictionMetadata {
        model_name: Some(name),
        dev_accuracy,
        details: serde_json::json!({
            "model_file": args.model,
            "vocabulary": clf.tfidf.vocabulary_size(),
            "l2_strength": clf.logistic.l2_strength,
            "iterations": clf.logistic.training.iterations,
        }),
    };
    io::write_metadata(&args.out, &meta)?;
    print_json(&serde_json::json!({
        "predictions": args.out,
        "metadata": io::metadata_path(&args.out),
        "records": preds.len(),
        "dev_accuracy": dev_accuracy,
    }));
    Ok(())
}

fn audit(args: AuditArgs) -> Result<()> {
    let corpus = load_corpus(args.corpus.as_deref())?;
    let control = match (&args.control_corpus, &args.corpus) {
        (Some(path), _) => Some((io::read_corpus(path)?, path.display().to_string())),
        (None, None) => Some((generate_control_corpus(&default_noun_pairs())?, "default".to_string())),
        (None, Some(_)) => None,
    };
    let m = args.m.unwrap_or(args.predictions.len() as u32);
    let family = HypothesisFamily::new(args.alpha, m)?;
    let earnings = match &args.earnings {
        Some(path) => {
            let table = io::read_earnings(path)?;
            Some(match &args.aliases {
                Some(a) => table.with_aliases(io::read_aliases(a)?),
                None => table,
            })
        }
        None => None,
    };

    let mut reports = Vec::new();
    for path in &args.predictions {
        let optional: Vec<&Corpus> = control.iter().map(|(c, _)| c).collect();
        let (preds, covered) = io::read_predictions_with_optional(path, &[&corpus], &optional)?;
        let dev_accuracy = io::read_metadata(path)?.and_then(|m| m.dev_accuracy);
        let inputs = AuditInputs {
            corpus: &corpus,
            control_corpus: control
                .as_ref()
                .map(|(c, _)| c)
                .filter(|_| covered.first() == Some(&true)),
            family,
            earnings: earnings.as_ref(),
        };
        reports.push(audit_model(&inputs, &preds, dev_accuracy)?);
    }

    let mut doc = io::ReportDocument::new(family, reports);
    if let Some(path) = &args.train {
        let lexicon = load_lexicon(args.lexicon.as_deref())?;
        doc.training_skew = Some(training_set_gender_stats(&io::read_sst2(path)?, &lexicon)?);
    }
    if let Some((_, label)) = &control {
        for model in doc.models.iter().filter(|m| m.control.is_none()) {
            doc.notes.push(format!(
                "{}: predictions do not cover the {label} control corpus",
                model.model_name
            ));
        }
    }
    io::write_report(&doc, &args.out_dir)?;
    if !args.quiet {
        print!("{}", io::render_human_report(&doc));
    }
    Ok(())
}

fn skew(args: SkewArgs) -> Result<()> {
    let lexicon = load_lexicon(args.lexicon.as_deref())?;
    let stats = training_set_gender_stats(&io::read_sst2(&args.train)?, &lexicon)?;
    print_json(&serde_json::to_value(stats).expect("stats serialise"));
    Ok(())
}
