//! SST-2 tab-separated files: header `sentence\tlabel`, labels 0/1.

use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use super::open;
use crate::baseline::{LabeledDataset, LabeledText};
use crate::error::{Error, Result};

const HEADER: &str = "sentence\tlabel";

pub fn parse_sst2<R: Read>(reader: R, source: impl Into<PathBuf>) -> Result<LabeledDataset> {
    let source = source.into();
    let mut lines = BufReader::new(reader).lines();
    match lines.next() {
        None => return Err(Error::parse(&source, 1, "missing header (empty file)")),
        Some(header) => {
            let header = header.map_err(|e| Error::io(&source, e))?;
            if header != HEADER {
                return Err(Error::parse(
                    &source,
                    1,
                    format!("expected header {HEADER:?}, found {header:?}"),
                ));
            }
        }
    }
    let mut items = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line.map_err(|e| Error::io(&source, e))?;
        let Some((sentence, label)) = line.rsplit_once('\t') else {
            return Err(Error::parse(&source, line_no, "expected two tab-separated fields"));
        };
        let label = match label {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::parse(
                    &source,
                    line_no,
                    format!("field \"label\": {other:?} is not 0 or 1"),
                ))
            }
        };
        if sentence.trim().is_empty() {
            return Err(Error::parse(&source, line_no, "field \"sentence\" is empty"));
        }
        items.push(LabeledText {
            text: sentence.to_string(),
            label,
        });
    }
    LabeledDataset::new(items)
}

pub fn read_sst2(path: &Path) -> Result<LabeledDataset> {
    parse_sst2(open(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows() {
        let text = "sentence\tlabel\nit 's a charming journey . \t1\nflat , unfunny \t0\n";
        let data = parse_sst2(text.as_bytes(), "train.tsv").unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.labels(), [1, 0]);
        assert_eq!(data.items()[0].text, "it 's a charming journey . ");
    }

    #[test]
    fn rejects_bad_label_with_line() {
        let text = "sentence\tlabel\ngood\t1\nodd\t2\n";
        let err = parse_sst2(text.as_bytes(), "train.tsv").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(err.to_string().contains("train.tsv:3"), "{err}");
    }

    #[test]
    fn rejects_missing_header_and_empty_sentence() {
        assert!(matches!(
            parse_sst2("".as_bytes(), "x").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_sst2("text\tlabel\nhi\t1\n".as_bytes(), "x").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_sst2("sentence\tlabel\n \t1\n".as_bytes(), "x").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            parse_sst2("sentence\tlabel\nno tab here\n".as_bytes(), "x").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
    }
}
