use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::error::{Error, Result};

/// Length summary of a corpus. Standard deviations are population values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub n: usize,
    pub mean_src: f64,
    pub mean_tgt: f64,
    pub std_src: f64,
    pub std_tgt: f64,
    pub max_src: u32,
    pub max_tgt: u32,
    /// Mean over pairs of `|src_len - tgt_len|`.
    pub mean_pairwise_abs_diff: f64,
    pub histogram_src: BTreeMap<u32, usize>,
    pub histogram_tgt: BTreeMap<u32, usize>,
}

fn mean_std(values: impl Iterator<Item = u32> + Clone, n: usize) -> (f64, f64) {
    let sum: u64 = values.clone().map(u64::from).sum();
    let mean = sum as f64 / n as f64;
    let ss: f64 = values.map(|v| (f64::from(v) - mean).powi(2)).sum();
    (mean, (ss / n as f64).sqrt())
}

pub fn compute_stats(corpus: &Corpus) -> Result<LengthStats> {
    let pairs = corpus.pairs();
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = pairs.len();
    let (mean_src, std_src) = mean_std(pairs.iter().map(|p| p.src_len), n);
    let (mean_tgt, std_tgt) = mean_std(pairs.iter().map(|p| p.tgt_len), n);
    let diff_sum: u64 = pairs
        .iter()
        .map(|p| u64::from(p.src_len.abs_diff(p.tgt_len)))
        .sum();

    let mut histogram_src = BTreeMap::new();
    let mut histogram_tgt = BTreeMap::new();
    for p in pairs {
        *histogram_src.entry(p.src_len).or_insert(0) += 1;
        *histogram_tgt.entry(p.tgt_len).or_insert(0) += 1;
    }

    Ok(LengthStats {
        n,
        mean_src,
        mean_tgt,
        std_src,
        std_tgt,
        max_src: pairs.iter().map(|p| p.src_len).max().unwrap_or(0),
        max_tgt: pairs.iter().map(|p| p.tgt_len).max().unwrap_or(0),
        mean_pairwise_abs_diff: diff_sum as f64 / n as f64,
        histogram_src,
        histogram_tgt,
    })
}

impl LengthStats {
    /// `length,src_count,tgt_count` rows for every length seen on either side.
    pub fn histogram_csv(&self) -> Result<String> {
        let mut lengths: Vec<u32> = self
            .histogram_src
            .keys()
            .chain(self.histogram_tgt.keys())
            .copied()
            .collect();
        lengths.sort_unstable();
        lengths.dedup();

        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["length", "src_count", "tgt_count"])?;
        for len in lengths {
            let src = self.histogram_src.get(&len).copied().unwrap_or(0);
            let tgt = self.histogram_tgt.get(&len).copied().unwrap_or(0);
            w.write_record([len.to_string(), src.to_string(), tgt.to_string()])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
