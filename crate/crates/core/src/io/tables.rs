//! Comma-separated lookup tables: noun pairs, professions, earnings,
//! earnings aliases and the gender lexicon.

use std::io::Read;
use std::path::{Path, PathBuf};

use csv::StringRecord;

use super::open;
use crate::audit::{EarningsTable, GenderLexicon};
use crate::corpus::{Article, Dominance, Gender, GenderedNounPair, Profession};
use crate::error::{Error, Result};

const DEFAULT_LEXICON_CSV: &str = include_str!("../../data/gender_lexicon.csv");

/// Reads every data row after checking the header, yielding `(line, record)`.
fn read_rows<R: Read>(reader: R, source: &Path, expected_header: &[&str]) -> Result<Vec<(usize, StringRecord)>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = csv.records();
    let header = match records.next() {
        None => return Err(Error::parse(source, 1, "missing header")),
        Some(r) => r.map_err(|e| Error::parse(source, 1, e.to_string()))?,
    };
    let found: Vec<&str> = header.iter().collect();
    if found != expected_header {
        return Err(Error::parse(
            source,
            1,
            format!(
                "expected header {:?}, found {:?}",
                expected_header.join(","),
                found.join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(source, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != expected_header.len() {
            return Err(Error::parse(
                source,
                line,
                format!("expected {} fields, found {}", expected_header.len(), record.len()),
            ));
        }
        rows.push((line, record));
    }
    Ok(rows)
}

fn nonempty<'r>(record: &'r StringRecord, idx: usize, field: &str, source: &Path, line: usize) -> Result<&'r str> {
    let value = record[idx].trim();
    if value.is_empty() {
        Err(Error::parse(source, line, format!("field {field:?} is empty")))
    } else {
        Ok(value)
    }
}

/// `pair_id,male,female`
pub fn parse_noun_pairs<R: Read>(reader: R, source: impl Into<PathBuf>) -> Result<Vec<GenderedNounPair>> {
    let source = source.into();
    let mut pairs: Vec<GenderedNounPair> = Vec::new();
    for (line, rec) in read_rows(reader, &source, &["pair_id", "male", "female"])? {
        let pair = GenderedNounPair::new(
            nonempty(&rec, 0, "pair_id", &source, line)?,
            nonempty(&rec, 1, "male", &source, line)?,
            nonempty(&rec, 2, "female", &source, line)?,
        )
        .map_err(|e| Error::parse(&source, line, e.to_string()))?;
        if pairs.iter().any(|p| p.pair_id == pair.pair_id) {
            return Err(Error::parse(
                &source,
                line,
                format!("duplicate pair_id {:?}", pair.pair_id),
            ));
        }
        pairs.push(pair);
    }
    Ok(pairs)
}

pub fn read_noun_pairs(path: &Path) -> Result<Vec<GenderedNounPair>> {
    parse_noun_pairs(open(path)?, path)
}

/// `name,article,dominance,cps_female_share`; a blank article falls back to
/// the a/an heuristic and a blank share means unknown.
pub fn parse_professions<R: Read>(reader: R, source: impl Into<PathBuf>) -> Result<Vec<Profession>> {
    let source = source.into();
    let header = ["name", "article", "dominance", "cps_female_share"];
    let mut professions: Vec<Profession> = Vec::new();
    for (line, rec) in read_rows(reader, &source, &header)? {
        let at = |msg: String| Error::parse(&source, line, msg);
        let name = nonempty(&rec, 0, "name", &source, line)?;
        let article = match rec[1].trim() {
            "" => None,
            a => Some(a.parse::<Article>().map_err(at)?),
        };
        let dominance: Dominance = nonempty(&rec, 2, "dominance", &source, line)?.parse().map_err(at)?;
        let share = match rec[3].trim() {
            "" => None,
            s => Some(
                s.parse::<f64>()
                    .map_err(|_| at(format!("cps_female_share {s:?} is not a number")))?,
            ),
        };
        let profession = Profession::new(name, article, dominance, share).map_err(|e| at(e.to_string()))?;
        if professions.iter().any(|p| p.name == profession.name) {
            return Err(at(format!("duplicate profession {name:?}")));
        }
        professions.push(profession);
    }
    Ok(professions)
}

pub fn read_professions(path: &Path) -> Result<Vec<Profession>> {
    parse_professions(open(path)?, path)
}

pub fn render_professions_csv(professions: &[Profession]) -> String {
    let mut out = String::from("name,article,dominance,cps_female_share\n");
    for p in professions {
        let share = p.cps_female_share.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{share}\n",
            p.name,
            p.article.as_str(),
            p.dominance.as_str()
        ));
    }
    out
}

/// `profession,median_weekly_earnings_usd`
pub fn parse_earnings<R: Read>(reader: R, source: impl Into<PathBuf>) -> Result<EarningsTable> {
    let source = source.into();
    let mut rows = Vec::new();
    for (line, rec) in read_rows(reader, &source, &["profession", "median_weekly_earnings_usd"])? {
        let name = nonempty(&rec, 0, "profession", &source, line)?;
        let raw = nonempty(&rec, 1, "median_weekly_earnings_usd", &source, line)?;
        let value: f64 = raw
            .parse()
            .map_err(|_| Error::parse(&source, line, format!("earnings {raw:?} is not a number")))?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::parse(
                &source,
                line,
                format!("earnings must be positive, got {raw}"),
            ));
        }
        if rows.iter().any(|(n, _): &(String, f64)| n.eq_ignore_ascii_case(name)) {
            return Err(Error::parse(&source, line, format!("duplicate profession {name:?}")));
        }
        rows.push((name.to_string(), value));
    }
    EarningsTable::new(rows)
}

pub fn read_earnings(path: &Path) -> Result<EarningsTable> {
    parse_earnings(open(path)?, path)
}

/// `profession,earnings_name`: maps a corpus profession onto the name used
/// in the earnings table.
pub fn parse_aliases<R: Read>(reader: R, source: impl Into<PathBuf>) -> Result<Vec<(String, String)>> {
    let source = source.into();
    read_rows(reader, &source, &["profession", "earnings_name"])?
        .into_iter()
        .map(|(line, rec)| {
            Ok((
                nonempty(&rec, 0, "profession", &source, line)?.to_string(),
                nonempty(&rec, 1, "earnings_name", &source, line)?.to_string(),
            ))
        })
        .collect()
}

pub fn read_aliases(path: &Path) -> Result<Vec<(String, String)>> {
    parse_aliases(open(path)?, path)
}

/// `term,gender`
pub fn parse_lexicon<R: Read>(reader: R, source: impl Into<PathBuf>) -> Result<GenderLexicon> {
    let source = source.into();
    let mut male = Vec::new();
    let mut female = Vec::new();
    for (line, rec) in read_rows(reader, &source, &["term", "gender"])? {
        let term = nonempty(&rec, 0, "term", &source, line)?.to_lowercase();
        let gender: Gender = nonempty(&rec, 1, "gender", &source, line)?
            .parse()
            .map_err(|e: String| Error::parse(&source, line, e))?;
        match gender {
            Gender::Male => male.push(term),
            Gender::Female => female.push(term),
        }
    }
    GenderLexicon::new(male, female).map_err(|e| Error::parse(&source, 0, e.to_string()))
}

pub fn read_lexicon(path: &Path) -> Result<GenderLexicon> {
    parse_lexicon(open(path)?, path)
}

/// The shipped gendered-noun lexicon (see `data/gender_lexicon.csv`).
pub fn default_lexicon() -> GenderLexicon {
    parse_lexicon(DEFAULT_LEXICON_CSV.as_bytes(), "<default lexicon>").expect("shipped lexicon is valid")
}
