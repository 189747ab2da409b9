//! Padding cost accounting.
//!
//! A batch padded to its longest member wastes `|pairs| × padded − Σ len`
//! token slots per side. Besides the raw slot counts, three proxies stand in
//! for compute time: a linear one (total slots), a quadratic one
//! (`|pairs| × padded²` per side, self-attention scale) and a cross term
//! (`|pairs| × padded_src × padded_tgt`, encoder-decoder attention scale).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::batcher::{Batch, BatchPlanConfig, Policy};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// How `avg_padded_*` is defined; carried in every report.
pub const AVG_LENGTH_DEFINITION: &str =
    "unweighted mean over batches of the per-batch maximum length";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchCost {
    pub epoch: usize,
    pub iteration: usize,
    pub size: usize,
    pub padded_src: u32,
    pub padded_tgt: u32,
    pub useful_src: u64,
    pub useful_tgt: u64,
    pub padded_src_total: u64,
    pub padded_tgt_total: u64,
    pub waste_fraction_src: f64,
    pub waste_fraction_tgt: f64,
    pub linear_cost: u64,
    pub quadratic_cost: u64,
    pub cross_cost: u64,
}

fn waste(useful: u64, padded_total: u64) -> f64 {
    (padded_total - useful) as f64 / padded_total as f64
}

pub fn cost_of_batch(batch: &Batch) -> BatchCost {
    let size = batch.len() as u64;
    let useful_src: u64 = batch.pairs.iter().map(|p| u64::from(p.src_len)).sum();
    let useful_tgt: u64 = batch.pairs.iter().map(|p| u64::from(p.tgt_len)).sum();
    let (ps, pt) = (u64::from(batch.padded_src), u64::from(batch.padded_tgt));
    let padded_src_total = size * ps;
    let padded_tgt_total = size * pt;
    BatchCost {
        epoch: batch.epoch,
        iteration: batch.iteration,
        size: batch.len(),
        padded_src: batch.padded_src,
        padded_tgt: batch.padded_tgt,
        useful_src,
        useful_tgt,
        padded_src_total,
        padded_tgt_total,
        waste_fraction_src: waste(useful_src, padded_src_total),
        waste_fraction_tgt: waste(useful_tgt, padded_tgt_total),
        linear_cost: padded_src_total + padded_tgt_total,
        quadratic_cost: size * (ps * ps + pt * pt),
        cross_cost: size * ps * pt,
    }
}

/// Aggregate padding cost of one `(corpus, config)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: BatchPlanConfig,
    #[serde(default)]
    pub corpus_hash: Option<String>,
    #[serde(default)]
    pub corpus_size: Option<usize>,
    pub avg_length_definition: String,
    pub num_batches: usize,
    pub avg_padded_src: f64,
    pub avg_padded_tgt: f64,
    pub total_useful_src: u64,
    pub total_useful_tgt: u64,
    pub total_padded_src: u64,
    pub total_padded_tgt: u64,
    pub total_linear_cost: u64,
    pub total_quadratic_cost: u64,
    pub total_cross_cost: u64,
    pub overall_waste_fraction_src: f64,
    pub overall_waste_fraction_tgt: f64,
    pub per_batch: Vec<BatchCost>,
}

impl RunReport {
    /// Stamps the report with the identity of the corpus it was computed on.
    pub fn with_corpus(mut self, corpus: &Corpus) -> Self {
        self.corpus_hash = Some(corpus.content_hash());
        self.corpus_size = Some(corpus.len());
        self
    }
}

pub fn summarize_run(batches: &[Batch], config: &BatchPlanConfig) -> Result<RunReport> {
    if batches.is_empty() {
        return Err(Error::EmptyStream);
    }
    let per_batch: Vec<BatchCost> = batches.iter().map(cost_of_batch).collect();
    let count = per_batch.len() as f64;
    let sum = |f: fn(&BatchCost) -> u64| per_batch.iter().map(f).sum::<u64>();

    let total_useful_src = sum(|c| c.useful_src);
    let total_useful_tgt = sum(|c| c.useful_tgt);
    let total_padded_src = sum(|c| c.padded_src_total);
    let total_padded_tgt = sum(|c| c.padded_tgt_total);

    Ok(RunReport {
        config: config.clone(),
        corpus_hash: None,
        corpus_size: None,
        avg_length_definition: AVG_LENGTH_DEFINITION.to_owned(),
        num_batches: per_batch.len(),
        avg_padded_src: sum(|c| u64::from(c.padded_src)) as f64 / count,
        avg_padded_tgt: sum(|c| u64::from(c.padded_tgt)) as f64 / count,
        total_useful_src,
        total_useful_tgt,
        total_padded_src,
        total_padded_tgt,
        total_linear_cost: sum(|c| c.linear_cost),
        total_quadratic_cost: sum(|c| c.quadratic_cost),
        total_cross_cost: sum(|c| c.cross_cost),
        overall_waste_fraction_src: waste(total_useful_src, total_padded_src),
        overall_waste_fraction_tgt: waste(total_useful_tgt, total_padded_tgt),
        per_batch,
    })
}

/// Each metric of a row divided by the same metric of the unsorted baseline row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRatios {
    pub avg_padded_src: f64,
    pub avg_padded_tgt: f64,
    pub waste_src: f64,
    pub waste_tgt: f64,
    pub linear_cost: f64,
    pub quadratic_cost: f64,
}

/// One policy/k setting, averaged over all runs (seeds) that share it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub policy: Policy,
    pub k: String,
    pub runs: usize,
    pub seeds: Vec<u64>,
    pub avg_padded_src: f64,
    pub avg_padded_tgt: f64,
    pub waste_src: f64,
    pub waste_tgt: f64,
    pub linear_cost: f64,
    pub quadratic_cost: f64,
    pub ratios: Option<CostRatios>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub batch_size: usize,
    pub corpus_hash: Option<String>,
    pub avg_length_definition: String,
    /// Set when no unsorted (k = 1) row exists, in which case ratios are omitted.
    pub baseline_missing: bool,
    pub rows: Vec<ComparisonRow>,
}

/// Row order: k ascending with unsorted first and full sort last.
fn row_key(config: &BatchPlanConfig) -> (usize, Policy) {
    match config.policy {
        Policy::Unsorted => (1, Policy::Unsorted),
        Policy::PartialSort => (config.look_ahead, Policy::PartialSort),
        Policy::FullSort => (usize::MAX, Policy::FullSort),
    }
}

fn ratio(value: f64, base: f64) -> f64 {
    if base == 0.0 {
        if value == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        value / base
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

pub fn compare_costs(reports: &[RunReport]) -> Result<ComparisonTable> {
    let first = reports.first().ok_or(Error::EmptyStream)?;
    let batch_size = first.config.batch_size;
    for r in reports {
        if r.config.batch_size != batch_size {
            return Err(Error::Incomparable(format!(
                "batch size m = {batch_size} vs m = {}",
                r.config.batch_size
            )));
        }
        if let (Some(a), Some(b)) = (&first.corpus_hash, &r.corpus_hash) {
            if a != b {
                return Err(Error::Incomparable(format!("corpus hash {a} vs {b}")));
            }
        }
    }

    let mut groups: BTreeMap<(usize, Policy), Vec<&RunReport>> = BTreeMap::new();
    for r in reports {
        groups.entry(row_key(&r.config)).or_default().push(r);
    }

    let mut rows: Vec<ComparisonRow> = groups
        .into_values()
        .map(|mut group| {
            group.sort_by_key(|r| (r.config.seed, r.config.epochs, r.config.drop_last));
            let g = &group;
            ComparisonRow {
                policy: g[0].config.policy,
                k: g[0].config.k_label(),
                runs: g.len(),
                seeds: g.iter().map(|r| r.config.seed).collect(),
                avg_padded_src: mean(g.iter().map(|r| r.avg_padded_src)),
                avg_padded_tgt: mean(g.iter().map(|r| r.avg_padded_tgt)),
                waste_src: mean(g.iter().map(|r| r.overall_waste_fraction_src)),
                waste_tgt: mean(g.iter().map(|r| r.overall_waste_fraction_tgt)),
                linear_cost: mean(g.iter().map(|r| r.total_linear_cost as f64)),
                quadratic_cost: mean(g.iter().map(|r| r.total_quadratic_cost as f64)),
                ratios: None,
            }
        })
        .collect();

    // partial_sort with k = 1 pads exactly like unsorted chunking
    let baseline = rows
        .iter()
        .find(|r| r.policy == Policy::Unsorted)
        .or_else(|| {
            rows.iter()
                .find(|r| r.policy == Policy::PartialSort && r.k == "1")
        })
        .cloned();
    if let Some(base) = &baseline {
        for row in &mut rows {
            row.ratios = Some(CostRatios {
                avg_padded_src: ratio(row.avg_padded_src, base.avg_padded_src),
                avg_padded_tgt: ratio(row.avg_padded_tgt, base.avg_padded_tgt),
                waste_src: ratio(row.waste_src, base.waste_src),
                waste_tgt: ratio(row.waste_tgt, base.waste_tgt),
                linear_cost: ratio(row.linear_cost, base.linear_cost),
                quadratic_cost: ratio(row.quadratic_cost, base.quadratic_cost),
            });
        }
    }

    let shared_hash = first.corpus_hash.clone();
    Ok(ComparisonTable {
        batch_size,
        corpus_hash: shared_hash,
        avg_length_definition: AVG_LENGTH_DEFINITION.to_owned(),
        baseline_missing: baseline.is_none(),
        rows,
    })
}

const COLUMNS: [&str; 15] = [
    "k",
    "policy",
    "runs",
    "avg_len_src",
    "avg_len_tgt",
    "waste_src",
    "waste_tgt",
    "linear_cost",
    "quadratic_cost",
    "ratio_len_src",
    "ratio_len_tgt",
    "ratio_waste_src",
    "ratio_waste_tgt",
    "ratio_linear",
    "ratio_quadratic",
];

fn fmt4(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else {
        "inf".into()
    }
}

impl ComparisonRow {
    fn cells(&self) -> Vec<String> {
        let mut cells = vec![
            self.k.clone(),
            self.policy.to_string(),
            self.runs.to_string(),
            fmt4(self.avg_padded_src),
            fmt4(self.avg_padded_tgt),
            fmt4(self.waste_src),
            fmt4(self.waste_tgt),
            format!("{:.1}", self.linear_cost),
            format!("{:.1}", self.quadratic_cost),
        ];
        match &self.ratios {
            Some(r) => cells.extend(
                [
                    r.avg_padded_src,
                    r.avg_padded_tgt,
                    r.waste_src,
                    r.waste_tgt,
                    r.linear_cost,
                    r.quadratic_cost,
                ]
                .map(fmt4),
            ),
            None => cells.extend(std::iter::repeat_n(String::new(), 6)),
        }
        cells
    }
}

impl ComparisonTable {
    pub fn row(&self, k: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.k == k)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.cells())?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Markdown table: k, average padded length per side, then ratios to unsorted.
    pub fn to_markdown(&self) -> String {
        let header = [
            "k",
            "runs",
            "avg length source",
            "avg length target",
            "waste source",
            "waste target",
            "linear cost",
            "quadratic cost",
            "ratio source",
            "ratio target",
            "ratio linear",
            "ratio quadratic",
        ];
        let mut out = String::new();
        let _ = writeln!(out, "| {} |", header.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
        for row in &self.rows {
            let c = row.cells();
            let cols = [
                &c[0], &c[2], &c[3], &c[4], &c[5], &c[6], &c[7], &c[8], &c[9], &c[10], &c[13],
                &c[14],
            ];
            let cols: Vec<&str> = cols
                .iter()
                .map(|s| if s.is_empty() { "-" } else { s.as_str() })
                .collect();
            let _ = writeln!(out, "| {} |", cols.join(" | "));
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "m = {}; avg length = {}; costs are means over runs.",
            self.batch_size, self.avg_length_definition
        );
        if self.baseline_missing {
            let _ = writeln!(
                out,
                "WARNING: no unsorted (k = 1) baseline, ratios omitted."
            );
        }
        out
    }
}
