//! Audit analyses over a corpus and a model's predictions.
//!
//! Every analysis works on the per-template differences
//! `p(female sentence) - p(male sentence)`, one per (noun pair, profession)
//! couple, so the overall gap, the per-profession gaps and the per-pair gaps
//! are all means over the same 400 numbers.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::baseline::{tokenize, LabeledDataset};
use crate::corpus::{Corpus, CorpusKind, Couple, Gender};
use crate::error::{Error, Result};
use crate::stats::{bonferroni_decision, pearson_r, t_test_on_differences, HypothesisFamily, TTestResult};

/// Positive-class probabilities of one model, keyed by sentence id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    model_name: String,
    predictions: BTreeMap<String, f64>,
}

impl PredictionSet {
    pub fn new(model_name: impl Into<String>, predictions: BTreeMap<String, f64>) -> Result<Self> {
        let bad: Vec<String> = predictions
            .iter()
            .filter(|(_, p)| !(0.0..=1.0).contains(*p))
            .map(|(id, p)| format!("{id}={p}"))
            .collect();
        if !bad.is_empty() {
            return Err(Error::validation(format!(
                "probabilities outside [0, 1]: {}",
                bad.join(", ")
            )));
        }
        Ok(PredictionSet {
            model_name: model_name.into(),
            predictions,
        })
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.predictions.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.predictions.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Ids of `corpus` that have no prediction.
    pub fn missing_ids<'c>(&self, corpus: &'c Corpus) -> Vec<&'c str> {
        corpus
            .sentences()
            .iter()
            .map(|s| s.id.as_str())
            .filter(|id| !self.predictions.contains_key(*id))
            .collect()
    }

    pub fn check_complete(&self, corpus: &Corpus) -> Result<()> {
        let missing = self.missing_ids(corpus);
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "predictions for {:?} are missing {} sentence id(s): {}",
                self.model_name,
                missing.len(),
                missing.join(", ")
            )))
        }
    }

    /// Exchanges the female and male prediction of every couple in `corpus`.
    pub fn gender_swapped(&self, corpus: &Corpus) -> Result<PredictionSet> {
        self.check_complete(corpus)?;
        let mut predictions = self.predictions.clone();
        for c in corpus.couples() {
            predictions.insert(c.female_id.to_string(), self.predictions[c.male_id]);
            predictions.insert(c.male_id.to_string(), self.predictions[c.female_id]);
        }
        PredictionSet::new(self.model_name.clone(), predictions)
    }
}

/// Overall female-minus-male gap with its family-wise decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverallGap {
    pub f_minus_m: f64,
    pub test: TTestResult,
    pub adjusted_p: f64,
    pub reject: bool,
}

/// Female-minus-male gap of one profession or noun pair (uncorrected test).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupGap {
    pub key: String,
    pub f_minus_m: f64,
    pub test: TTestResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfessionMean {
    pub profession: String,
    pub mean_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlGap {
    pub f_minus_m: f64,
    pub test: TTestResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub profession: String,
    pub median_weekly_earnings: f64,
    pub mean_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EarningsCorrelation {
    pub r: f64,
    pub scatter: Vec<ScatterPoint>,
    /// Professions without an earnings entry, excluded from `r`.
    pub dropped: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub model_name: String,
    /// Held-out accuracy reported alongside the predictions, if known.
    pub dev_accuracy: Option<f64>,
    pub overall: OverallGap,
    /// Descending by mean probability.
    pub profession_means: Vec<ProfessionMean>,
    /// Ascending by gap.
    pub profession_gaps: Vec<GroupGap>,
    /// Ascending by gap.
    pub pair_gaps: Vec<GroupGap>,
    pub control: Option<ControlGap>,
    pub earnings: Option<EarningsCorrelation>,
}

/// Median weekly earnings per profession, matched case-insensitively.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EarningsTable {
    earnings: BTreeMap<String, f64>,
    aliases: BTreeMap<String, String>,
}

impl EarningsTable {
    pub fn new(rows: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let mut earnings = BTreeMap::new();
        for (name, value) in rows {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::validation(format!(
                    "earnings for {name:?} must be positive, got {value}"
                )));
            }
            let key = name.trim().to_lowercase();
            if earnings.insert(key, value).is_some() {
                return Err(Error::validation(format!("duplicate earnings row for {name:?}")));
            }
        }
        Ok(EarningsTable {
            earnings,
            aliases: BTreeMap::new(),
        })
    }

    /// Adds explicit `corpus profession → earnings table name` aliases.
    pub fn with_aliases(mut self, aliases: impl IntoIterator<Item = (String, String)>) -> Self {
        for (profession, table_name) in aliases {
            self.aliases
                .insert(profession.trim().to_lowercase(), table_name.trim().to_lowercase());
        }
        self
    }

    pub fn len(&self) -> usize {
        self.earnings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.earnings.is_empty()
    }

    pub fn lookup(&self, profession: &str) -> Option<f64> {
        let key = profession.trim().to_lowercase();
        self.earnings.get(&key).copied().or_else(|| {
            self.aliases
                .get(&key)
                .and_then(|alias| self.earnings.get(alias).copied())
        })
    }
}

/// Lower-case gendered terms used to count training sentences by gender.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenderLexicon {
    male_terms: BTreeSet<String>,
    female_terms: BTreeSet<String>,
}

impl GenderLexicon {
    pub fn new(
        male_terms: impl IntoIterator<Item = String>,
        female_terms: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let male_terms: BTreeSet<String> = male_terms.into_iter().map(|t| t.trim().to_lowercase()).collect();
        let female_terms: BTreeSet<String> = female_terms.into_iter().map(|t| t.trim().to_lowercase()).collect();
        if male_terms.is_empty() || female_terms.is_empty() {
            return Err(Error::validation("gender lexicon needs terms for both genders"));
        }
        if let Some(shared) = male_terms.intersection(&female_terms).next() {
            return Err(Error::validation(format!("term {shared:?} is listed for both genders")));
        }
        Ok(GenderLexicon {
            male_terms,
            female_terms,
        })
    }

    pub fn terms(&self, gender: Gender) -> &BTreeSet<String> {
        match gender {
            Gender::Male => &self.male_terms,
            Gender::Female => &self.female_terms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupLabelStats {
    pub count: usize,
    /// Mean binary label; absent when `count == 0`.
    pub mean_label: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingSkew {
    pub male: GroupLabelStats,
    pub female: GroupLabelStats,
}

struct CoupleValues<'a> {
    couple: Couple<'a>,
    female: f64,
    male: f64,
}

impl CoupleValues<'_> {
    fn diff(&self) -> f64 {
        self.female - self.male
    }
}

fn couple_values<'a>(
    corpus: &'a Corpus,
    preds: &PredictionSet,
    expected_kind: CorpusKind,
) -> Result<Vec<CoupleValues<'a>>> {
    if corpus.kind() != expected_kind {
        return Err(Error::validation(format!(
            "expected a {expected_kind:?} corpus, got {:?}",
            corpus.kind()
        )));
    }
    preds.check_complete(corpus)?;
    Ok(corpus
        .couples()
        .into_iter()
        .map(|couple| {
            let female = preds.get(couple.female_id).expect("checked complete");
            let male = preds.get(couple.male_id).expect("checked complete");
            CoupleValues { couple, female, male }
        })
        .collect())
}

fn grouped_gaps<'a>(values: &[CoupleValues<'a>], key: impl Fn(&Couple<'a>) -> &'a str) -> Result<Vec<GroupGap>> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<f64>> = HashMap::new();
    for v in values {
        let k = key(&v.couple);
        groups
            .entry(k)
            .or_insert_with(|| {
                order.push(k);
                Vec::new()
            })
            .push(v.diff());
    }
    let mut rows = order
        .into_iter()
        .map(|k| {
            let test = t_test_on_differences(&groups[k])?;
            Ok(GroupGap {
                key: k.to_string(),
                f_minus_m: test.mean_difference,
                test,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.f_minus_m.total_cmp(&b.f_minus_m).then_with(|| a.key.cmp(&b.key)));
    Ok(rows)
}

/// Paired t-test over all female/male couples plus the Bonferroni decision.
pub fn overall_gender_gap(corpus: &Corpus, preds: &PredictionSet, family: &HypothesisFamily) -> Result<OverallGap> {
    let values = couple_values(corpus, preds, CorpusKind::Main)?;
    let diffs: Vec<f64> = values.iter().map(CoupleValues::diff).collect();
    let test = t_test_on_differences(&diffs)?;
    let decision = bonferroni_decision(test.p_two_sided, family);
    Ok(OverallGap {
        f_minus_m: test.mean_difference,
        test,
        adjusted_p: decision.adjusted_p,
        reject: decision.reject,
    })
}

/// Mean probability per profession over both genders, highest first; ties
/// are broken alphabetically.
pub fn profession_means(corpus: &Corpus, preds: &PredictionSet) -> Result<Vec<ProfessionMean>> {
    let values = couple_values(corpus, preds, CorpusKind::Main)?;
    let mut order: Vec<&str> = Vec::new();
    let mut sums: HashMap<&str, (f64, usize)> = HashMap::new();
    for v in &values {
        let entry = sums.entry(v.couple.profession_name).or_insert_with(|| {
            order.push(v.couple.profession_name);
            (0.0, 0)
        });
        // f + m is symmetric, so the means are exactly swap-invariant.
        entry.0 += v.female + v.male;
        entry.1 += 2;
    }
    let mut rows: Vec<ProfessionMean> = order
        .into_iter()
        .map(|name| {
            let (sum, count) = sums[name];
            ProfessionMean {
                profession: name.to_string(),
                mean_probability: sum / count as f64,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.mean_probability
            .total_cmp(&a.mean_probability)
            .then_with(|| a.profession.cmp(&b.profession))
    });
    Ok(rows)
}

/// Per-profession female-minus-male gaps over the noun pairs, most negative first.
pub fn profession_gender_gaps(corpus: &Corpus, preds: &PredictionSet) -> Result<Vec<GroupGap>> {
    let values = couple_values(corpus, preds, CorpusKind::Main)?;
    grouped_gaps(&values, |c| c.profession_name)
}

/// Per-noun-pair female-minus-male gaps over the professions, most negative first.
pub fn noun_pair_gaps(corpus: &Corpus, preds: &PredictionSet) -> Result<Vec<GroupGap>> {
    let values = couple_values(corpus, preds, CorpusKind::Main)?;
    grouped_gaps(&values, |c| c.pair_id)
}

/// Female-minus-male gap on the "person" control sentences.
pub fn control_gap(control_corpus: &Corpus, preds: &PredictionSet) -> Result<ControlGap> {
    let values = couple_values(control_corpus, preds, CorpusKind::Control)?;
    let diffs: Vec<f64> = values.iter().map(CoupleValues::diff).collect();
    let test = t_test_on_differences(&diffs)?;
    Ok(ControlGap {
        f_minus_m: test.mean_difference,
        test,
    })
}

/// Pearson correlation between earnings and mean predicted probability over
/// the professions present in `earnings`.
pub fn earnings_correlation(means: &[ProfessionMean], earnings: &EarningsTable) -> Result<EarningsCorrelation> {
    let mut scatter = Vec::new();
    let mut dropped = Vec::new();
    for row in means {
        match earnings.lookup(&row.profession) {
            Some(value) => scatter.push(ScatterPoint {
                profession: row.profession.clone(),
                median_weekly_earnings: value,
                mean_probability: row.mean_probability,
            }),
            None => dropped.push(row.profession.clone()),
        }
    }
    if scatter.len() < 2 {
        return Err(Error::validation(format!(
            "only {} profession(s) match the earnings table; need at least 2",
            scatter.len()
        )));
    }
    let xs: Vec<f64> = scatter.iter().map(|p| p.median_weekly_earnings).collect();
    let ys: Vec<f64> = scatter.iter().map(|p| p.mean_probability).collect();
    let r = pearson_r(&xs, &ys)?;
    Ok(EarningsCorrelation { r, scatter, dropped })
}

/// Counts training sentences containing a male (resp. female) lexicon term
/// and their mean label. A sentence may count for both genders.
pub fn training_set_gender_stats(dataset: &LabeledDataset, lexicon: &GenderLexicon) -> Result<TrainingSkew> {
    if dataset.is_empty() {
        return Err(Error::validation("training-set statistics need a non-empty dataset"));
    }
    let mut tallies = [(0usize, 0usize); 2];
    for item in dataset.items() {
        let tokens: BTreeSet<String> = tokenize(&item.text).into_iter().collect();
        for (slot, gender) in [Gender::Male, Gender::Female].into_iter().enumerate() {
            if tokens.iter().any(|t| lexicon.terms(gender).contains(t)) {
                tallies[slot].0 += 1;
                tallies[slot].1 += usize::from(item.label);
            }
        }
    }
    let stats = |(count, positives): (usize, usize)| GroupLabelStats {
        count,
        mean_label: (count > 0).then(|| positives as f64 / count as f64),
    };
    Ok(TrainingSkew {
        male: stats(tallies[0]),
        female: stats(tallies[1]),
    })
}

/// Inputs for a full single-model audit.
pub struct AuditInputs<'a> {
    pub corpus: &'a Corpus,
    pub control_corpus: Option<&'a Corpus>,
    pub family: HypothesisFamily,
    pub earnings: Option<&'a EarningsTable>,
}

/// Runs every analysis for one model.
pub fn audit_model(inputs: &AuditInputs<'_>, preds: &PredictionSet, dev_accuracy: Option<f64>) -> Result<AuditReport> {
    let overall = overall_gender_gap(inputs.corpus, preds, &inputs.family)?;
    let means = profession_means(inputs.corpus, preds)?;
    let profession_gaps = profession_gender_gaps(inputs.corpus, preds)?;
    let pair_gaps = noun_pair_gaps(inputs.corpus, preds)?;
    let control = inputs.control_corpus.map(|c| control_gap(c, preds)).transpose()?;
    let earnings = inputs.earnings.map(|e| earnings_correlation(&means, e)).transpose()?;
    Ok(AuditReport {
        model_name: preds.model_name().to_string(),
        dev_accuracy,
        overall,
        profession_means: means,
        profession_gaps,
        pair_gaps,
        control,
        earnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{default_noun_pairs, default_professions, generate_control_corpus, generate_corpus};

    fn corpus() -> Corpus {
        generate_corpus(&default_noun_pairs(), &default_professions()).unwrap()
    }

    fn constant(corpus: &Corpus, p: f64) -> PredictionSet {
        PredictionSet::new("const", corpus.sentences().iter().map(|s| (s.id.clone(), p)).collect()).unwrap()
    }

    #[test]
    fn identical_predictions_give_no_gap() {
        let corpus = corpus();
        let preds = constant(&corpus, 0.5);
        let overall = overall_gender_gap(&corpus, &preds, &HypothesisFamily::default()).unwrap();
        assert_eq!(overall.f_minus_m, 0.0);
        assert_eq!(overall.test.p_two_sided, 1.0);
        assert!(!overall.reject);
        assert_eq!(overall.test.n_pairs, 400);

        let means = profession_means(&corpus, &preds).unwrap();
        assert_eq!(means.len(), 20);
        assert!(means.iter().all(|m| m.mean_probability == 0.5));
        // ties broken alphabetically
        assert_eq!(means[0].profession, "baker");

        for gap in profession_gender_gaps(&corpus, &preds)
            .unwrap()
            .iter()
            .chain(&noun_pair_gaps(&corpus, &preds).unwrap())
        {
            assert_eq!(gap.f_minus_m, 0.0);
        }
    }

    #[test]
    fn control_gap_uses_twenty_couples() {
        let control = generate_control_corpus(&default_noun_pairs()).unwrap();
        let preds = PredictionSet::new(
            "ctl",
            control
                .sentences()
                .iter()
                .map(|s| (s.id.clone(), if s.gender == Gender::Female { 0.6 } else { 0.5 }))
                .collect(),
        )
        .unwrap();
        let gap = control_gap(&control, &preds).unwrap();
        assert_eq!(gap.test.n_pairs, 20);
        assert!((gap.f_minus_m - 0.1).abs() < 1e-12);
        // the main corpus is not a control corpus
        let main = corpus();
        assert!(control_gap(&main, &constant(&main, 0.5)).is_err());
    }

    #[test]
    fn incomplete_predictions_name_missing_ids() {
        let corpus = corpus();
        let mut map: BTreeMap<String, f64> = corpus.sentences().iter().map(|s| (s.id.clone(), 0.5)).collect();
        map.remove("bachelor:f:pilot");
        let preds = PredictionSet::new("x", map).unwrap();
        let err = overall_gender_gap(&corpus, &preds, &HypothesisFamily::default()).unwrap_err();
        assert!(err.to_string().contains("bachelor:f:pilot"), "{err}");
    }

    #[test]
    fn out_of_range_probability_rejected() {
        let map = BTreeMap::from([("a".to_string(), 1.2)]);
        assert!(PredictionSet::new("x", map).is_err());
    }

    #[test]
    fn earnings_matching() {
        let means = vec![
            ProfessionMean {
                profession: "Pilot".into(),
                mean_probability: 0.8,
            },
            ProfessionMean {
                profession: "baker".into(),
                mean_probability: 0.4,
            },
            ProfessionMean {
                profession: "soldier".into(),
                mean_probability: 0.5,
            },
            ProfessionMean {
                profession: "gym trainer".into(),
                mean_probability: 0.6,
            },
        ];
        let table = EarningsTable::new([
            ("pilot".to_string(), 1600.0),
            ("BAKER".to_string(), 800.0),
            ("fitness trainers".to_string(), 1200.0),
        ])
        .unwrap()
        .with_aliases([("gym trainer".to_string(), "Fitness Trainers".to_string())]);
        let corr = earnings_correlation(&means, &table).unwrap();
        assert_eq!(corr.dropped, ["soldier"]);
        assert_eq!(corr.scatter.len(), 3);
        // earnings = 2000 × mean exactly
        assert!((corr.r - 1.0).abs() < 1e-12);

        let lonely = EarningsTable::new([("pilot".to_string(), 1.0)]).unwrap();
        assert!(earnings_correlation(&means, &lonely).is_err());
        assert!(EarningsTable::new([("x".to_string(), -1.0)]).is_err());
    }

    #[test]
    fn lexicon_counts() {
        let lexicon = GenderLexicon::new(
            ["king".to_string(), "man".to_string()],
            ["queen".to_string(), "woman".to_string()],
        )
        .unwrap();
        let data =
            LabeledDataset::from_pairs([("the king and queen", 1), ("a man walks", 0), ("nobody here", 1)]).unwrap();
        let skew = training_set_gender_stats(&data, &lexicon).unwrap();
        assert_eq!(skew.male.count, 2);
        assert_eq!(skew.male.mean_label, Some(0.5));
        assert_eq!(skew.female.count, 1);
        assert_eq!(skew.female.mean_label, Some(1.0));

        let none = LabeledDataset::from_pairs([("nobody here", 1)]).unwrap();
        let skew = training_set_gender_stats(&none, &lexicon).unwrap();
        assert_eq!(
            skew.male,
            GroupLabelStats {
                count: 0,
                mean_label: None
            }
        );

        assert!(GenderLexicon::new(Vec::new(), ["she".to_string()]).is_err());
        assert!(GenderLexicon::new(["x".to_string()], ["X".to_string()]).is_err());
        assert!(training_set_gender_stats(&LabeledDataset::default(), &lexicon).is_err());
    }
}
