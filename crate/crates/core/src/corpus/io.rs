use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{token_count, Corpus, SentencePair};
use crate::error::{Error, Result};

/// On-disk corpus layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusFormat {
    /// `source sentence<TAB>target sentence`, lengths counted in whitespace tokens.
    ParallelTsv,
    /// `src_len<TAB>tgt_len`, positive decimal integers.
    LengthsTsv,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "parallel-tsv" => Ok(CorpusFormat::ParallelTsv),
            "lengths-tsv" => Ok(CorpusFormat::LengthsTsv),
            other => Err(format!(
                "unknown corpus format `{other}` (expected parallel-tsv or lengths-tsv)"
            )),
        }
    }
}

impl fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusFormat::ParallelTsv => "parallel-tsv",
            CorpusFormat::LengthsTsv => "lengths-tsv",
        })
    }
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(BufReader::new(file), format).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Reads a corpus from any buffered reader. Ids follow line order.
pub fn parse_corpus<R: BufRead>(reader: R, format: CorpusFormat) -> Result<Corpus> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io("<input>", e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let pair = match format {
            CorpusFormat::LengthsTsv => parse_lengths_line(idx, line, line_no)?,
            CorpusFormat::ParallelTsv => parse_parallel_line(idx, line, line_no)?,
        };
        pairs.push(pair);
    }
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Corpus::new(pairs)
}

fn split_two(line: &str, line_no: usize) -> Result<(&str, &str)> {
    let mut cols = line.split('\t');
    match (cols.next(), cols.next(), cols.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(Error::Parse {
            line: line_no,
            reason: format!(
                "expected 2 tab-separated columns, found {}",
                line.split('\t').count()
            ),
        }),
    }
}

fn parse_length(field: &str, side: &str, line_no: usize) -> Result<u32> {
    let value: i64 = field.trim().parse().map_err(|_| Error::Parse {
        line: line_no,
        reason: format!("{side} length `{field}` is not an integer"),
    })?;
    if value < 1 || value > i64::from(u32::MAX) {
        return Err(Error::Parse {
            line: line_no,
            reason: format!("{side} length must be a positive integer, got {value}"),
        });
    }
    Ok(value as u32)
}

fn parse_lengths_line(id: usize, line: &str, line_no: usize) -> Result<SentencePair> {
    let (src, tgt) = split_two(line, line_no)?;
    Ok(SentencePair {
        id,
        src_len: parse_length(src, "source", line_no)?,
        tgt_len: parse_length(tgt, "target", line_no)?,
        src_text: None,
        tgt_text: None,
    })
}

fn parse_parallel_line(id: usize, line: &str, line_no: usize) -> Result<SentencePair> {
    let (src, tgt) = split_two(line, line_no)?;
    let (src_len, tgt_len) = (token_count(src), token_count(tgt));
    if src_len == 0 || tgt_len == 0 {
        return Err(Error::Parse {
            line: line_no,
            reason: "empty sentence (non-positive length)".into(),
        });
    }
    Ok(SentencePair {
        id,
        src_len,
        tgt_len,
        src_text: Some(src.to_owned()),
        tgt_text: Some(tgt.to_owned()),
    })
}

/// Writes the canonical lengths-tsv interchange format.
pub fn write_lengths_tsv<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for p in corpus.pairs() {
        writeln!(out, "{}\t{}", p.src_len, p.tgt_len)?;
    }
    out.flush()
}

impl Corpus {
    pub fn save_lengths_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        write_lengths_tsv(self, BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}
