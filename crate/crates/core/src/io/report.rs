//! Audit report output.
//!
//! `write_report` emits three files into a directory:
//! - `report.json`: the machine-readable [`ReportDocument`]
//! - `report.txt`: human-readable tables
//! - `scatter.csv`: earnings vs. mean probability points, only when at
//!   least one model has an earnings analysis

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::write_file;
use crate::audit::{AuditReport, GroupGap, TrainingSkew};
use crate::error::{Error, Result};
use crate::stats::{HypothesisFamily, TTestResult};

pub const REPORT_FORMAT_VERSION: &str = "occbias-report/1";

/// Marker appended to gaps whose null hypothesis is rejected after correction.
const SIGNIFICANT: &str = "**";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format_version: String,
    pub family: HypothesisFamily,
    pub models: Vec<AuditReport>,
    pub training_skew: Option<TrainingSkew>,
    pub notes: Vec<String>,
}

impl ReportDocument {
    pub fn new(family: HypothesisFamily, models: Vec<AuditReport>) -> Self {
        let mut doc = ReportDocument {
            format_version: REPORT_FORMAT_VERSION.to_string(),
            family,
            models,
            training_skew: None,
            notes: Vec::new(),
        };
        if doc.models.iter().all(|m| m.earnings.is_none()) {
            doc.notes
                .push("no earnings table supplied; scatter data omitted".to_string());
        }
        doc
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ReportDocument =
            serde_json::from_str(text).map_err(|e| Error::validation(format!("malformed report: {e}")))?;
        if doc.format_version != REPORT_FORMAT_VERSION {
            return Err(Error::validation(format!(
                "unsupported report format {:?}",
                doc.format_version
            )));
        }
        Ok(doc)
    }

    pub fn has_scatter(&self) -> bool {
        self.models.iter().any(|m| m.earnings.is_some())
    }
}

fn fmt_t(test: &TTestResult) -> String {
    if test.t_statistic.is_infinite() {
        if test.t_statistic > 0.0 { "+inf" } else { "-inf" }.to_string()
    } else {
        format!("{:.3}", test.t_statistic)
    }
}

fn fmt_p(p: f64) -> String {
    if p == 0.0 {
        "0".to_string()
    } else if p < 1e-4 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    }
}

fn gap_table(out: &mut String, title: &str, key_header: &str, rows: &[GroupGap]) {
    let width = rows
        .iter()
        .map(|r| r.key.len())
        .max()
        .unwrap_or(0)
        .max(key_header.len());
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "  {key_header:<width$}  {:>8}  {:>8}  {:>10}", "F - M", "t", "p");
    for r in rows {
        let _ = writeln!(
            out,
            "  {:<width$}  {:>8.3}  {:>8}  {:>10}",
            r.key,
            r.f_minus_m,
            fmt_t(&r.test),
            fmt_p(r.test.p_two_sided)
        );
    }
    out.push('\n');
}

pub fn render_human_report(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let fam = &doc.family;
    let _ = writeln!(out, "Occupational gender bias audit");
    let _ = writeln!(
        out,
        "Paired two-sided t-tests; alpha = {}, m = {}, reject when p < {:.6}.",
        fam.alpha(),
        fam.m(),
        fam.threshold()
    );
    let _ = writeln!(out, "{SIGNIFICANT} marks significance after Bonferroni correction.\n");

    let name_w = doc.models.iter().map(|m| m.model_name.len()).max().unwrap_or(0).max(5);
    let _ = writeln!(out, "Table 1. Overall female - male gap");
    let _ = writeln!(
        out,
        "  {:<name_w$}  {:>8}  {:>9}  {:>8}  {:>10}  {:>10}",
        "Model", "Dev Acc.", "F - M", "t", "p", "adj. p"
    );
    for m in &doc.models {
        let acc = m.dev_accuracy.map_or("-".to_string(), |a| format!("{a:.3}"));
        let marker = if m.overall.reject { SIGNIFICANT } else { "" };
        let gap = format!("{:.3}{marker}", m.overall.f_minus_m);
        let _ = writeln!(
            out,
            "  {:<name_w$}  {acc:>8}  {gap:>9}  {:>8}  {:>10}  {:>10}",
            m.model_name,
            fmt_t(&m.overall.test),
            fmt_p(m.overall.test.p_two_sided),
            fmt_p(m.overall.adjusted_p)
        );
    }
    out.push('\n');

    let _ = writeln!(
        out,
        "Table 2. Top 3 and bottom 3 professions by mean positive probability"
    );
    for m in &doc.models {
        let fmt = |rows: &[crate::audit::ProfessionMean]| {
            rows.iter()
                .map(|r| format!("{} ({:.3})", r.profession, r.mean_probability))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let n = m.profession_means.len();
        let top = &m.profession_means[..n.min(3)];
        let bottom: Vec<_> = m.profession_means[n.saturating_sub(3)..]
            .iter()
            .rev()
            .cloned()
            .collect();
        let _ = writeln!(out, "  {}", m.model_name);
        let _ = writeln!(out, "    top:    {}", fmt(top));
        let _ = writeln!(out, "    bottom: {}", fmt(&bottom));
    }
    out.push('\n');

    for m in &doc.models {
        let _ = writeln!(out, "== {} ==\n", m.model_name);
        let _ = writeln!(out, "Mean positive probability per profession");
        for r in &m.profession_means {
            let _ = writeln!(out, "  {:<20}  {:.4}", r.profession, r.mean_probability);
        }
        out.push('\n');
        gap_table(
            &mut out,
            "Female - male gap per profession (uncorrected p-values)",
            "profession",
            &m.profession_gaps,
        );
        gap_table(
            &mut out,
            "Female - male gap per noun pair (uncorrected p-values)",
            "pair",
            &m.pair_gaps,
        );
        if let Some(c) = &m.control {
            let _ = writeln!(
                out,
                "Control (\"person\") gap: {:.3}  t = {}  p = {}  (n = {})\n",
                c.f_minus_m,
                fmt_t(&c.test),
                fmt_p(c.test.p_two_sided),
                c.test.n_pairs
            );
        }
        if let Some(e) = &m.earnings {
            let _ = writeln!(
                out,
                "Earnings vs. mean probability: r = {:.3} over {} professions",
                e.r,
                e.scatter.len()
            );
            if !e.dropped.is_empty() {
                let _ = writeln!(out, "  no earnings data: {}", e.dropped.join(", "));
            }
            out.push('\n');
        }
    }

    if let Some(skew) = &doc.training_skew {
        let _ = writeln!(out, "Training-set sentences with gendered nouns");
        for (label, g) in [("male", &skew.male), ("female", &skew.female)] {
            let mean = g.mean_label.map_or("-".to_string(), |v| format!("{v:.3}"));
            let _ = writeln!(out, "  {label:<6}  count {:>6}  mean label {mean}", g.count);
        }
        out.push('\n');
    }

    if !doc.notes.is_empty() {
        let _ = writeln!(out, "Notes");
        for note in &doc.notes {
            let _ = writeln!(out, "  - {note}");
        }
    }
    out
}

pub fn render_scatter_csv(doc: &ReportDocument) -> String {
    let mut out = String::from("model,profession,median_weekly_earnings_usd,mean_probability\n");
    for m in &doc.models {
        if let Some(e) = &m.earnings {
            for p in &e.scatter {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    m.model_name, p.profession, p.median_weekly_earnings, p.mean_probability
                );
            }
        }
    }
    out
}

/// Writes the report files into `dir` (created if needed) and returns their paths.
pub fn write_report(doc: &ReportDocument, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let json = dir.join("report.json");
    write_file(&json, &doc.to_json())?;
    written.push(json);
    let txt = dir.join("report.txt");
    write_file(&txt, &render_human_report(doc))?;
    written.push(txt);
    let scatter = dir.join("scatter.csv");
    if doc.has_scatter() {
        write_file(&scatter, &render_scatter_csv(doc))?;
        written.push(scatter);
    } else if scatter.exists() {
        std::fs::remove_file(&scatter).map_err(|e| Error::io(&scatter, e))?;
    }
    Ok(written)
}

pub fn read_report(path: &Path) -> Result<ReportDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ReportDocument::from_json(&text)
}
