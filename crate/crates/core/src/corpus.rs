//! Template corpus generation.
//!
//! Every sentence has the shape `"<noun> is a/an <profession>."`. The main
//! corpus crosses 20 gendered noun pairs with 20 professions, once per gender,
//! for 800 sentences. The control corpus replaces the profession with
//! `"person"`, giving one female/male couple per noun pair.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PAIRS_PER_CORPUS: usize = 20;
pub const PROFESSIONS_PER_CORPUS: usize = 20;
pub const MAIN_CORPUS_SIZE: usize = 2 * PAIRS_PER_CORPUS * PROFESSIONS_PER_CORPUS;
pub const CONTROL_CORPUS_SIZE: usize = 2 * PAIRS_PER_CORPUS;
pub const CONTROL_PROFESSION: &str = "person";

const DEFAULT_NOUN_PAIRS_CSV: &str = include_str!("../data/noun_pairs.csv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    /// Single-letter tag used inside sentence ids.
    pub fn id_tag(self) -> &'static str {
        match self {
            Gender::Male => "m",
            Gender::Female => "f",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Male => "male",
            Gender::Female => "female",
        }
    }

    pub fn opposite(self) -> Gender {
        match self {
            Gender::Male => Gender::Female,
            Gender::Female => Gender::Male,
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "male" | "m" => Ok(Gender::Male),
            "female" | "f" => Ok(Gender::Female),
            other => Err(format!("unknown gender {other:?} (expected male or female)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Article {
    A,
    An,
}

impl Article {
    /// First-letter-vowel heuristic, used only when no explicit article is
    /// given. Words such as "hour" or "unicorn" need an explicit article.
    pub fn guess_for(word: &str) -> Article {
        match word.trim_start().chars().next().map(|c| c.to_ascii_lowercase()) {
            Some('a' | 'e' | 'i' | 'o' | 'u') => Article::An,
            _ => Article::A,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Article::A => "a",
            Article::An => "an",
        }
    }
}

impl FromStr for Article {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Article::A),
            "an" => Ok(Article::An),
            other => Err(format!("unknown article {other:?} (expected a or an)")),
        }
    }
}

/// Gender-distribution category of a profession.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Dominance {
    /// More than 70% male.
    MaleDominated,
    /// More than 70% female.
    FemaleDominated,
    /// 60-65% male.
    SlightlyMale,
    /// 60-65% female.
    SlightlyFemale,
    /// Split differs between senior and junior ranks.
    MixedSeniority,
    Neutral,
    /// Historically male, with growing female representation.
    Shifting,
}

impl Dominance {
    pub const ALL: [Dominance; 7] = [
        Dominance::MaleDominated,
        Dominance::FemaleDominated,
        Dominance::SlightlyMale,
        Dominance::SlightlyFemale,
        Dominance::MixedSeniority,
        Dominance::Neutral,
        Dominance::Shifting,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dominance::MaleDominated => "MALE_DOMINATED",
            Dominance::FemaleDominated => "FEMALE_DOMINATED",
            Dominance::SlightlyMale => "SLIGHTLY_MALE",
            Dominance::SlightlyFemale => "SLIGHTLY_FEMALE",
            Dominance::MixedSeniority => "MIXED_SENIORITY",
            Dominance::Neutral => "NEUTRAL",
            Dominance::Shifting => "SHIFTING",
        }
    }
}

impl FromStr for Dominance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        Dominance::ALL
            .into_iter()
            .find(|d| d.as_str() == wanted)
            .ok_or_else(|| format!("unknown dominance category {s:?}"))
    }
}

/// A matched male/female noun phrase filling the `noun` slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenderedNounPair {
    pub pair_id: String,
    pub male_text: String,
    pub female_text: String,
}

impl GenderedNounPair {
    pub fn new(
        pair_id: impl Into<String>,
        male_text: impl Into<String>,
        female_text: impl Into<String>,
    ) -> Result<Self> {
        let pair = GenderedNounPair {
            pair_id: pair_id.into(),
            male_text: male_text.into(),
            female_text: female_text.into(),
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pair_id.trim().is_empty() {
            return Err(Error::validation("noun pair has an empty pair_id"));
        }
        if self.pair_id.contains(':') || self.pair_id.chars().any(char::is_whitespace) {
            return Err(Error::validation(format!(
                "pair_id {:?} must not contain ':' or whitespace",
                self.pair_id
            )));
        }
        if self.male_text.trim().is_empty() || self.female_text.trim().is_empty() {
            return Err(Error::validation(format!(
                "noun pair {:?} has an empty noun phrase",
                self.pair_id
            )));
        }
        if self.male_text == self.female_text {
            return Err(Error::validation(format!(
                "noun pair {:?} uses the same phrase {:?} for both genders",
                self.pair_id, self.male_text
            )));
        }
        Ok(())
    }

    pub fn text_for(&self, gender: Gender) -> &str {
        match gender {
            Gender::Male => &self.male_text,
            Gender::Female => &self.female_text,
        }
    }

    /// The same pair with the two phrases exchanged.
    pub fn swapped(&self) -> GenderedNounPair {
        GenderedNounPair {
            pair_id: self.pair_id.clone(),
            male_text: self.female_text.clone(),
            female_text: self.male_text.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profession {
    pub name: String,
    pub article: Article,
    pub dominance: Dominance,
    /// Female share of the workforce according to the CPS, when known.
    pub cps_female_share: Option<f64>,
}

impl Profession {
    pub fn new(
        name: impl Into<String>,
        article: Option<Article>,
        dominance: Dominance,
        cps_female_share: Option<f64>,
    ) -> Result<Self> {
        let name = name.into();
        let article = article.unwrap_or_else(|| Article::guess_for(&name));
        let profession = Profession {
            name,
            article,
            dominance,
            cps_female_share,
        };
        profession.validate()?;
        Ok(profession)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::validation("profession has an empty name"));
        }
        if let Some(share) = self.cps_female_share {
            if !(0.0..=1.0).contains(&share) {
                return Err(Error::validation(format!(
                    "profession {:?}: cps_female_share {share} outside [0, 1]",
                    self.name
                )));
            }
            let consistent = match self.dominance {
                Dominance::MaleDominated => share < 0.30,
                Dominance::FemaleDominated => share > 0.70,
                _ => true,
            };
            if !consistent {
                return Err(Error::validation(format!(
                    "profession {:?}: female share {share} contradicts category {}",
                    self.name,
                    self.dominance.as_str()
                )));
            }
        }
        Ok(())
    }

    /// Profession name as it appears inside sentence ids.
    pub fn id_slug(&self) -> String {
        profession_slug(&self.name)
    }
}

pub fn profession_slug(name: &str) -> String {
    name.replace(' ', "_")
}

pub fn sentence_id(pair_id: &str, gender: Gender, profession_name: &str) -> String {
    format!("{pair_id}:{}:{}", gender.id_tag(), profession_slug(profession_name))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub id: String,
    pub text: String,
    pub gender: Gender,
    pub pair_id: String,
    pub profession_name: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    Main,
    Control,
}

impl CorpusKind {
    pub fn expected_size(self) -> usize {
        match self {
            CorpusKind::Main => MAIN_CORPUS_SIZE,
            CorpusKind::Control => CONTROL_CORPUS_SIZE,
        }
    }
}

/// A validated, ordered set of template sentences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    kind: CorpusKind,
    sentences: Vec<Sentence>,
}

/// The female and male sentence ids of one template instantiation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Couple<'a> {
    pub pair_id: &'a str,
    pub profession_name: &'a str,
    pub female_id: &'a str,
    pub male_id: &'a str,
}

impl Corpus {
    /// Builds a corpus after checking every invariant of its kind.
    pub fn new(kind: CorpusKind, sentences: Vec<Sentence>) -> Result<Self> {
        let expected = kind.expected_size();
        if sentences.len() != expected {
            return Err(Error::validation(format!(
                "{kind:?} corpus must have {expected} sentences, found {}",
                sentences.len()
            )));
        }

        let mut ids = HashSet::with_capacity(sentences.len());
        let mut cells = HashSet::with_capacity(sentences.len());
        let mut pairs = HashSet::new();
        let mut professions = HashSet::new();
        for s in &sentences {
            if !ids.insert(s.id.as_str()) {
                return Err(Error::validation(format!("duplicate sentence id {:?}", s.id)));
            }
            if s.id != sentence_id(&s.pair_id, s.gender, &s.profession_name) {
                return Err(Error::validation(format!(
                    "sentence id {:?} does not match its pair, gender and profession",
                    s.id
                )));
            }
            if !has_template_shape(&s.text) {
                return Err(Error::validation(format!(
                    "sentence {:?} does not have the template shape: {:?}",
                    s.id, s.text
                )));
            }
            if kind == CorpusKind::Control && s.profession_name != CONTROL_PROFESSION {
                return Err(Error::validation(format!(
                    "control sentence {:?} must use the profession {CONTROL_PROFESSION:?}",
                    s.id
                )));
            }
            cells.insert((s.pair_id.as_str(), s.gender, s.profession_name.as_str()));
            pairs.insert(s.pair_id.as_str());
            professions.insert(s.profession_name.as_str());
        }

        let n_professions = match kind {
            CorpusKind::Main => PROFESSIONS_PER_CORPUS,
            CorpusKind::Control => 1,
        };
        if pairs.len() != PAIRS_PER_CORPUS || professions.len() != n_professions {
            return Err(Error::validation(format!(
                "{kind:?} corpus must cover {PAIRS_PER_CORPUS} noun pairs and {n_professions} \
                 professions, found {} and {}",
                pairs.len(),
                professions.len()
            )));
        }
        // With the counts above, distinct cells == size means a full grid.
        if cells.len() != expected {
            return Err(Error::validation(format!(
                "{kind:?} corpus repeats a (pair, gender, profession) cell"
            )));
        }
        Ok(Corpus { kind, sentences })
    }

    pub fn kind(&self) -> CorpusKind {
        self.kind
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Sentence> {
        self.sentences.iter().find(|s| s.id == id)
    }

    pub fn count_gender(&self, gender: Gender) -> usize {
        self.sentences.iter().filter(|s| s.gender == gender).count()
    }

    /// Pair ids in order of first appearance.
    pub fn pair_ids(&self) -> Vec<&str> {
        first_appearance(self.sentences.iter().map(|s| s.pair_id.as_str()))
    }

    /// Profession names in order of first appearance.
    pub fn profession_names(&self) -> Vec<&str> {
        first_appearance(self.sentences.iter().map(|s| s.profession_name.as_str()))
    }

    /// Female/male id couples in corpus order, one per (pair, profession).
    pub fn couples(&self) -> Vec<Couple<'_>> {
        let mut by_cell: BTreeMap<(&str, &str), [Option<&str>; 2]> = BTreeMap::new();
        let mut order = Vec::new();
        for s in &self.sentences {
            let key = (s.pair_id.as_str(), s.profession_name.as_str());
            let slot = by_cell.entry(key).or_insert_with(|| {
                order.push(key);
                [None, None]
            });
            match s.gender {
                Gender::Female => slot[0] = Some(s.id.as_str()),
                Gender::Male => slot[1] = Some(s.id.as_str()),
            }
        }
        order
            .into_iter()
            .map(|key| {
                let [female, male] = by_cell[&key];
                Couple {
                    pair_id: key.0,
                    profession_name: key.1,
                    female_id: female.expect("validated corpus has both genders per cell"),
                    male_id: male.expect("validated corpus has both genders per cell"),
                }
            })
            .collect()
    }
}

fn first_appearance<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = HashSet::new();
    items.filter(|item| seen.insert(*item)).collect()
}

/// Checks the `^[A-Z].* is an? .*\.$` shape (first letter may be any
/// upper-case character).
pub fn has_template_shape(text: &str) -> bool {
    let starts_upper = text.chars().next().is_some_and(char::is_uppercase);
    let Some(body) = text.strip_suffix('.') else {
        return false;
    };
    starts_upper && (body.contains(" is a ") || body.contains(" is an "))
}

/// Renders `"{noun} is {a|an} {profession}."` with the first character
/// upper-cased.
pub fn render_sentence(noun: &str, article: Article, profession_name: &str) -> String {
    let noun = noun.trim();
    let mut chars = noun.chars();
    let capitalised: String = match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    };
    format!("{capitalised} is {} {}.", article.as_str(), profession_name.trim())
}

/// The 20 professions with their gender-distribution categories.
pub fn default_professions() -> Vec<Profession> {
    use Dominance::*;
    let table: [(&str, Dominance, Option<f64>); PROFESSIONS_PER_CORPUS] = [
        ("truck driver", MaleDominated, None),
        ("mechanic", MaleDominated, None),
        ("pilot", MaleDominated, None),
        ("chef", MaleDominated, None),
        ("soldier", MaleDominated, None),
        ("teacher", FemaleDominated, None),
        ("flight attendant", FemaleDominated, Some(0.72)),
        ("clerk", FemaleDominated, Some(0.86)),
        ("secretary", FemaleDominated, None),
        ("nurse", FemaleDominated, None),
        ("scientist", SlightlyMale, None),
        ("lawyer", SlightlyMale, None),
        ("doctor", SlightlyMale, None),
        ("writer", SlightlyFemale, None),
        ("dancer", SlightlyFemale, None),
        ("professor", MixedSeniority, None),
        ("tailor", Neutral, None),
        ("gym trainer", Neutral, None),
        ("baker", Shifting, None),
        ("bartender", Shifting, Some(0.55)),
    ];
    table
        .into_iter()
        .map(|(name, dominance, share)| Profession {
            name: name.to_string(),
            article: Article::A,
            dominance,
            cps_female_share: share,
        })
        .collect()
}

/// The shipped noun pairs (see `data/noun_pairs.csv`).
pub fn default_noun_pairs() -> Vec<GenderedNounPair> {
    crate::io::parse_noun_pairs(DEFAULT_NOUN_PAIRS_CSV.as_bytes(), "<default noun pairs>")
        .expect("shipped noun pair file is valid")
}

fn validate_pairs(pairs: &[GenderedNounPair]) -> Result<()> {
    if pairs.len() != PAIRS_PER_CORPUS {
        return Err(Error::validation(format!(
            "expected {PAIRS_PER_CORPUS} noun pairs, got {}",
            pairs.len()
        )));
    }
    let mut seen = HashSet::new();
    for pair in pairs {
        pair.validate()?;
        if !seen.insert(pair.pair_id.as_str()) {
            return Err(Error::validation(format!("duplicate pair_id {:?}", pair.pair_id)));
        }
    }
    Ok(())
}

fn validate_professions(professions: &[Profession]) -> Result<()> {
    if professions.len() != PROFESSIONS_PER_CORPUS {
        return Err(Error::validation(format!(
            "expected {PROFESSIONS_PER_CORPUS} professions, got {}",
            professions.len()
        )));
    }
    let mut seen = HashSet::new();
    for profession in professions {
        profession.validate()?;
        if !seen.insert(profession.id_slug()) {
            return Err(Error::validation(format!(
                "duplicate profession name {:?}",
                profession.name
            )));
        }
    }
    Ok(())
}

fn make_sentence(pair: &GenderedNounPair, gender: Gender, article: Article, profession_name: &str) -> Sentence {
    Sentence {
        id: sentence_id(&pair.pair_id, gender, profession_name),
        text: render_sentence(pair.text_for(gender), article, profession_name),
        gender,
        pair_id: pair.pair_id.clone(),
        profession_name: profession_name.to_string(),
    }
}

/// Builds the 800-sentence main corpus. Order: professions outer, pairs
/// inner, male before female.
pub fn generate_corpus(pairs: &[GenderedNounPair], professions: &[Profession]) -> Result<Corpus> {
    validate_pairs(pairs)?;
    validate_professions(professions)?;
    let mut sentences = Vec::with_capacity(MAIN_CORPUS_SIZE);
    for profession in professions {
        for pair in pairs {
            for gender in [Gender::Male, Gender::Female] {
                sentences.push(make_sentence(pair, gender, profession.article, &profession.name));
            }
        }
    }
    Corpus::new(CorpusKind::Main, sentences)
}

/// Builds the 40-sentence control corpus (`"<noun> is a person."`).
pub fn generate_control_corpus(pairs: &[GenderedNounPair]) -> Result<Corpus> {
    validate_pairs(pairs)?;
    let mut sentences = Vec::with_capacity(CONTROL_CORPUS_SIZE);
    for pair in pairs {
        for gender in [Gender::Male, Gender::Female] {
            sentences.push(make_sentence(pair, gender, Article::A, CONTROL_PROFESSION));
        }
    }
    Corpus::new(CorpusKind::Control, sentences)
}
