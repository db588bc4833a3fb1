//! Corpus files: header `id,text,gender,pair_id,profession`.

use std::io::Read;
use std::path::{Path, PathBuf};

use super::{open, write_file};
use crate::corpus::{Corpus, CorpusKind, Gender, Sentence, CONTROL_PROFESSION};
use crate::error::{Error, Result};

const HEADER: [&str; 5] = ["id", "text", "gender", "pair_id", "profession"];

pub fn render_corpus_csv(corpus: &Corpus) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(HEADER).expect("in-memory write");
    for s in corpus.sentences() {
        writer
            .write_record([
                s.id.as_str(),
                s.text.as_str(),
                s.gender.as_str(),
                s.pair_id.as_str(),
                s.profession_name.as_str(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    write_file(path, &render_corpus_csv(corpus))
}

/// Parses a corpus file. The kind is CONTROL when every row uses the
/// "person" profession, MAIN otherwise; the kind's invariants are enforced.
pub fn parse_corpus<R: Read>(reader: R, source: impl Into<PathBuf>) -> Result<Corpus> {
    let source = source.into();
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = csv.records();
    let header = match records.next() {
        None => return Err(Error::parse(&source, 1, "missing header")),
        Some(r) => r.map_err(|e| Error::parse(&source, 1, e.to_string()))?,
    };
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::parse(
            &source,
            1,
            format!("expected header {:?}", HEADER.join(",")),
        ));
    }
    let mut sentences = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(&source, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != HEADER.len() {
            return Err(Error::parse(
                &source,
                line,
                format!("expected {} fields, found {}", HEADER.len(), record.len()),
            ));
        }
        for (i, name) in HEADER.iter().enumerate() {
            if record[i].is_empty() {
                return Err(Error::parse(&source, line, format!("field {name:?} is empty")));
            }
        }
        let gender: Gender = record[2]
            .parse()
            .map_err(|e: String| Error::parse(&source, line, format!("field \"gender\": {e}")))?;
        sentences.push(Sentence {
            id: record[0].to_string(),
            text: record[1].to_string(),
            gender,
            pair_id: record[3].to_string(),
            profession_name: record[4].to_string(),
        });
    }
    let kind = if !sentences.is_empty() && sentences.iter().all(|s| s.profession_name == CONTROL_PROFESSION) {
        CorpusKind::Control
    } else {
        CorpusKind::Main
    };
    Corpus::new(kind, sentences).map_err(|e| match e {
        Error::Validation(msg) => Error::validation(format!("{}: {msg}", source.display())),
        other => other,
    })
}

pub fn read_corpus(path: &Path) -> Result<Corpus> {
    parse_corpus(open(path)?, path)
}
