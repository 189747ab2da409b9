//! Stochasticity diagnostics for batch streams.
//!
//! Randomly chunked batches give a per-batch statistic series with no serial
//! correlation. Length sorting introduces structure: inside one refill cycle
//! the padded length climbs monotonically, which shows up as positive lag
//! autocorrelation and as non-decreasing cycles.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::batcher::{run_epochs, Batch, BatchPlanConfig, Policy};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Per-batch scalar extracted into a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricTag {
    PaddedSrc,
    PaddedTgt,
    MeanSrc,
    MeanTgt,
    WasteSrc,
    WasteTgt,
    Size,
}

impl MetricTag {
    pub const ALL: [MetricTag; 7] = [
        MetricTag::PaddedSrc,
        MetricTag::PaddedTgt,
        MetricTag::MeanSrc,
        MetricTag::MeanTgt,
        MetricTag::WasteSrc,
        MetricTag::WasteTgt,
        MetricTag::Size,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricTag::PaddedSrc => "padded_src",
            MetricTag::PaddedTgt => "padded_tgt",
            MetricTag::MeanSrc => "mean_src",
            MetricTag::MeanTgt => "mean_tgt",
            MetricTag::WasteSrc => "waste_src",
            MetricTag::WasteTgt => "waste_tgt",
            MetricTag::Size => "size",
        }
    }

    fn value(self, batch: &Batch) -> f64 {
        let n = batch.len() as f64;
        let src_sum = || {
            batch
                .pairs
                .iter()
                .map(|p| f64::from(p.src_len))
                .sum::<f64>()
        };
        let tgt_sum = || {
            batch
                .pairs
                .iter()
                .map(|p| f64::from(p.tgt_len))
                .sum::<f64>()
        };
        match self {
            MetricTag::PaddedSrc => f64::from(batch.padded_src),
            MetricTag::PaddedTgt => f64::from(batch.padded_tgt),
            MetricTag::MeanSrc => src_sum() / n,
            MetricTag::MeanTgt => tgt_sum() / n,
            MetricTag::WasteSrc => 1.0 - src_sum() / (n * f64::from(batch.padded_src)),
            MetricTag::WasteTgt => 1.0 - tgt_sum() / (n * f64::from(batch.padded_tgt)),
            MetricTag::Size => n,
        }
    }
}

impl FromStr for MetricTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricTag::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_owned()))
    }
}

impl fmt::Display for MetricTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSeries {
    pub metric: MetricTag,
    pub values: Vec<f64>,
}

impl BatchSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Population mean and standard deviation.
    pub fn mean_std(&self) -> (f64, f64) {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let var = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    }

    /// `batch,<metric>` CSV for external plotting.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["batch", self.metric.name()])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([i.to_string(), v.to_string()])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn extract_series(batches: &[Batch], metric: MetricTag) -> Result<BatchSeries> {
    if batches.is_empty() {
        return Err(Error::EmptyStream);
    }
    Ok(BatchSeries {
        metric,
        values: batches.iter().map(|b| metric.value(b)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Autocorrelation {
    /// Lag → Pearson correlation of `(v[t], v[t + lag])`.
    pub lags: BTreeMap<usize, f64>,
    /// Some lag had a constant side, so its correlation was reported as 0.
    pub degenerate: bool,
}

impl Autocorrelation {
    pub fn at(&self, lag: usize) -> Option<f64> {
        self.lags.get(&lag).copied()
    }
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Lag autocorrelations for lags `1..=max_lag`.
///
/// Requires `values.len() > max_lag + 2` so every lag has at least three pairs.
pub fn autocorrelation(values: &[f64], max_lag: usize) -> Result<Autocorrelation> {
    if max_lag == 0 || values.len() <= max_lag + 2 {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            max_lag,
        });
    }
    let mut degenerate = false;
    let lags = (1..=max_lag)
        .map(|lag| {
            let n = values.len() - lag;
            let r = pearson(&values[..n], &values[lag..]).unwrap_or_else(|| {
                degenerate = true;
                0.0
            });
            (lag, r)
        })
        .collect();
    Ok(Autocorrelation { lags, degenerate })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSummary {
    pub epoch: usize,
    pub first_iteration: usize,
    pub batches: usize,
    pub min_padded_src: u32,
    pub max_padded_src: u32,
    pub non_decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleAnalysis {
    /// Fraction of refill cycles whose padded source length never decreases.
    pub cycle_score: f64,
    /// With k = 1 every cycle is a single batch and the score says nothing.
    pub uninformative: bool,
    pub cycles: Vec<CycleSummary>,
}

/// Splits a partial-sort stream into refill cycles and checks each is sorted.
///
/// The buffer is refilled to `m × k` whenever it empties, so within an epoch
/// cycles are consecutive runs of `k` batches; only the last one may be shorter.
pub fn cycle_analysis(batches: &[Batch], config: &BatchPlanConfig) -> Result<CycleAnalysis> {
    if config.policy != Policy::PartialSort {
        return Err(Error::PolicyMismatch(config.policy.to_string()));
    }
    config.validate()?;
    if batches.is_empty() {
        return Err(Error::EmptyStream);
    }

    let mut cycles = Vec::new();
    for epoch_batches in batches.chunk_by(|a, b| a.epoch == b.epoch) {
        for cycle in epoch_batches.chunks(config.look_ahead) {
            let padded: Vec<u32> = cycle.iter().map(|b| b.padded_src).collect();
            cycles.push(CycleSummary {
                epoch: cycle[0].epoch,
                first_iteration: cycle[0].iteration,
                batches: cycle.len(),
                min_padded_src: *padded.iter().min().expect("non-empty cycle"),
                max_padded_src: *padded.iter().max().expect("non-empty cycle"),
                non_decreasing: padded.windows(2).all(|w| w[0] <= w[1]),
            });
        }
    }
    let sorted = cycles.iter().filter(|c| c.non_decreasing).count();
    Ok(CycleAnalysis {
        cycle_score: sorted as f64 / cycles.len() as f64,
        uninformative: config.look_ahead == 1,
        cycles,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IidReport {
    pub config: BatchPlanConfig,
    pub metric: MetricTag,
    pub series_len: usize,
    pub series_mean: f64,
    pub series_std: f64,
    pub max_lag: usize,
    pub lag_autocorrs: BTreeMap<usize, f64>,
    pub degenerate: bool,
    /// Present for partial-sort runs only.
    pub cycle_score: Option<f64>,
    pub cycle_count: Option<usize>,
    pub cycle_uninformative: bool,
}

impl IidReport {
    pub fn lag1(&self) -> Option<f64> {
        self.lag_autocorrs.get(&1).copied()
    }
}

/// Diagnostics of an already generated batch stream, on the padded source length.
///
/// The lag horizon defaults to `2k`, shortened when the series is too short.
pub fn iid_report(
    batches: &[Batch],
    config: &BatchPlanConfig,
    max_lag: Option<usize>,
) -> Result<IidReport> {
    let series = extract_series(batches, MetricTag::PaddedSrc)?;
    let (series_mean, series_std) = series.mean_std();
    let wanted = max_lag.unwrap_or(2 * config.look_ahead).max(1);
    let max_lag = wanted.min(series.len().saturating_sub(3));
    let (lag_autocorrs, degenerate) = if max_lag == 0 {
        (BTreeMap::new(), true)
    } else {
        let ac = autocorrelation(&series.values, max_lag)?;
        (ac.lags, ac.degenerate)
    };
    let cycles = match config.policy {
        Policy::PartialSort => Some(cycle_analysis(batches, config)?),
        _ => None,
    };
    Ok(IidReport {
        config: config.clone(),
        metric: series.metric,
        series_len: series.len(),
        series_mean,
        series_std,
        max_lag,
        lag_autocorrs,
        degenerate,
        cycle_score: cycles.as_ref().map(|c| c.cycle_score),
        cycle_count: cycles.as_ref().map(|c| c.cycles.len()),
        cycle_uninformative: cycles.as_ref().is_some_and(|c| c.uninformative),
    })
}

/// Runs every config over the shared corpus and reports its diagnostics.
pub fn policy_iid_report(corpus: &Corpus, configs: &[BatchPlanConfig]) -> Result<Vec<IidReport>> {
    configs
        .iter()
        .map(|config| {
            let batches = run_epochs(corpus, config)?;
            iid_report(&batches, config, None)
        })
        .collect()
}
