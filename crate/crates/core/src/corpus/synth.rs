//! Synthetic paired-length corpora parameterized by summary moments.
//!
//! Source lengths come from an integer distribution on `[1, max_len]` whose
//! mean and (population) standard deviation match the requested values after
//! truncation and rounding. The underlying continuous family is log-normal by
//! default; its location/scale are tuned by fixed-point iteration until the
//! discretized moments hit the targets.
//!
//! Target lengths are `src_len + d`, where `d` is a symmetric two-sided
//! geometric variable with `E|d| = pair_diff_mean`, clamped to `[1, max_len]`.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Geometric;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{Corpus, SentencePair};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthDist {
    #[default]
    LogNormal,
    TruncatedNormal,
}

impl FromStr for LengthDist {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lognormal" | "log-normal" => Ok(LengthDist::LogNormal),
            "normal" | "truncated-normal" => Ok(LengthDist::TruncatedNormal),
            other => Err(format!("unknown length distribution `{other}`")),
        }
    }
}

impl fmt::Display for LengthDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LengthDist::LogNormal => "log-normal",
            LengthDist::TruncatedNormal => "truncated-normal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n: usize,
    pub mean_src: f64,
    pub std_src: f64,
    pub max_len: u32,
    /// Expected `|src_len - tgt_len|` before clamping.
    pub pair_diff_mean: f64,
    #[serde(default)]
    pub length_dist: LengthDist,
    pub seed: u64,
}

impl SynthParams {
    /// English-Korean-like source side: 22.64 ± 15.55 tokens, cut at 125.
    pub fn en_kr(n: usize, seed: u64) -> Self {
        SynthParams {
            n,
            mean_src: 22.64,
            std_src: 15.55,
            max_len: 125,
            pair_diff_mean: 2.45,
            length_dist: LengthDist::LogNormal,
            seed,
        }
    }

    /// English-Luganda-like source side: 10.68 ± 3.17 tokens, at most 50.
    pub fn en_lu(n: usize, seed: u64) -> Self {
        SynthParams {
            n,
            mean_src: 10.68,
            std_src: 3.17,
            max_len: 50,
            pair_diff_mean: 0.006,
            length_dist: LengthDist::LogNormal,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n == 0 {
            return bad("n must be >= 1".into());
        }
        if self.max_len == 0 {
            return bad("max_len must be >= 1".into());
        }
        if !self.mean_src.is_finite()
            || self.mean_src < 1.0
            || self.mean_src > f64::from(self.max_len)
        {
            return bad(format!(
                "mean_src {} must lie in [1, max_len = {}]",
                self.mean_src, self.max_len
            ));
        }
        if !self.std_src.is_finite() || self.std_src < 0.0 {
            return bad(format!("std_src {} must be finite and >= 0", self.std_src));
        }
        if !self.pair_diff_mean.is_finite() || self.pair_diff_mean < 0.0 {
            return bad(format!(
                "pair_diff_mean {} must be finite and >= 0",
                self.pair_diff_mean
            ));
        }
        Ok(())
    }

    /// Probability of each source length `1..=max_len` (index 0 is length 1).
    pub fn source_pmf(&self) -> Result<Vec<f64>> {
        self.validate()?;
        calibrated_pmf(self.length_dist, self.mean_src, self.std_src, self.max_len)
    }
}

/// Unnormalized mass of each integer bin `[l - 0.5, l + 0.5)` for `l` in `1..=max_len`.
fn binned_mass(dist: LengthDist, loc: f64, scale: f64, max_len: u32) -> Vec<f64> {
    let std_normal = Normal::standard();
    let (mu, sigma) = match dist {
        LengthDist::LogNormal => {
            let s2 = (1.0 + (scale / loc).powi(2)).ln();
            (loc.ln() - s2 / 2.0, s2.sqrt())
        }
        LengthDist::TruncatedNormal => (loc, scale),
    };
    let z = |x: f64| match dist {
        LengthDist::LogNormal => (x.ln() - mu) / sigma,
        LengthDist::TruncatedNormal => (x - mu) / sigma,
    };
    (1..=max_len)
        .map(|l| {
            let l = f64::from(l);
            (std_normal.cdf(z(l + 0.5)) - std_normal.cdf(z(l - 0.5))).max(0.0)
        })
        .collect()
}

fn normalized_moments(mass: &[f64]) -> Option<(Vec<f64>, f64, f64)> {
    let total: f64 = mass.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return None;
    }
    let pmf: Vec<f64> = mass.iter().map(|m| m / total).collect();
    let mean: f64 = pmf
        .iter()
        .enumerate()
        .map(|(i, p)| (i + 1) as f64 * p)
        .sum();
    let var: f64 = pmf
        .iter()
        .enumerate()
        .map(|(i, p)| ((i + 1) as f64 - mean).powi(2) * p)
        .sum();
    Some((pmf, mean, var.sqrt()))
}

const CALIBRATION_ROUNDS: usize = 1000;

fn calibrated_pmf(dist: LengthDist, mean: f64, std: f64, max_len: u32) -> Result<Vec<f64>> {
    if std == 0.0 {
        let at = (mean.round() as u32).clamp(1, max_len);
        let mut pmf = vec![0.0; max_len as usize];
        pmf[at as usize - 1] = 1.0;
        return Ok(pmf);
    }

    let (mut loc, mut scale) = (mean, std);
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    for _ in 0..CALIBRATION_ROUNDS {
        let Some((pmf, got_mean, got_std)) =
            normalized_moments(&binned_mass(dist, loc, scale, max_len))
        else {
            break;
        };
        let (dm, ds) = (mean - got_mean, std - got_std);
        best = Some((pmf, got_mean, got_std));
        if dm.abs() < 1e-10 && ds.abs() < 1e-10 {
            break;
        }
        loc += dm;
        if dist == LengthDist::LogNormal {
            loc = loc.max(1e-3);
        }
        scale = if got_std > 1e-9 {
            scale * std / got_std
        } else {
            scale * 2.0
        };
        if !loc.is_finite() || !scale.is_finite() || scale > 1e9 {
            break;
        }
    }

    match best {
        Some((pmf, got_mean, got_std))
            if (got_mean - mean).abs() <= 0.01 && (got_std - std).abs() <= 0.01 * (1.0 + std) =>
        {
            Ok(pmf)
        }
        Some((_, got_mean, got_std)) => Err(Error::InvalidParams(format!(
            "no {dist} length distribution on [1, {max_len}] has mean {mean} and std {std} \
             (closest reached: mean {got_mean:.3}, std {got_std:.3})"
        ))),
        None => Err(Error::InvalidParams(format!(
            "{dist} length distribution with mean {mean}, std {std} puts no mass on [1, {max_len}]"
        ))),
    }
}

/// Ratio `q` of the two-sided geometric law `P(d) ∝ q^|d|` with `E|d| = target`.
fn perturbation_ratio(target: f64) -> f64 {
    if target == 0.0 {
        0.0
    } else {
        ((1.0 + target * target).sqrt() - 1.0) / target
    }
}

pub fn synth_generate(params: &SynthParams) -> Result<Corpus> {
    let pmf = params.source_pmf()?;
    let lengths = WeightedIndex::new(&pmf)
        .map_err(|e| Error::InvalidParams(format!("degenerate length distribution: {e}")))?;

    let q = perturbation_ratio(params.pair_diff_mean);
    let nonzero = 2.0 * q / (1.0 + q);
    let magnitude = if q > 0.0 {
        Some(Geometric::new(1.0 - q).map_err(|e| Error::InvalidParams(e.to_string()))?)
    } else {
        None
    };

    let mut rng = seed::rng(params.seed);
    let max_len = i64::from(params.max_len);
    let mut pairs = Vec::with_capacity(params.n);
    for id in 0..params.n {
        let src = lengths.sample(&mut rng) as i64 + 1;
        let mut delta = 0i64;
        if let Some(geo) = &magnitude {
            if rng.random::<f64>() < nonzero {
                let size = 1 + geo.sample(&mut rng) as i64;
                delta = if rng.random::<bool>() { size } else { -size };
            }
        }
        let tgt = (src + delta).clamp(1, max_len);
        pairs.push(SentencePair {
            id,
            src_len: src as u32,
            tgt_len: tgt as u32,
            src_text: None,
            tgt_text: None,
        });
    }
    Corpus::new(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, mean: f64, std: f64, max_len: u32, diff: f64) -> SynthParams {
        SynthParams {
            n,
            mean_src: mean,
            std_src: std,
            max_len,
            pair_diff_mean: diff,
            length_dist: LengthDist::LogNormal,
            seed: 3,
        }
    }

    #[test]
    fn degenerate_distribution_gives_constant_pairs() {
        let c = synth_generate(&params(10, 7.0, 0.0, 50, 0.0)).unwrap();
        assert_eq!(c.len(), 10);
        assert!(c.pairs().iter().all(|p| p.sort_key() == (7, 7)));
    }

    #[test]
    fn same_seed_same_corpus() {
        let p = SynthParams::en_kr(2000, 42);
        assert_eq!(synth_generate(&p).unwrap(), synth_generate(&p).unwrap());
        let other = SynthParams {
            seed: 43,
            ..p.clone()
        };
        assert_ne!(synth_generate(&p).unwrap(), synth_generate(&other).unwrap());
    }

    #[test]
    fn infeasible_params_are_rejected() {
        assert!(synth_generate(&params(10, 60.0, 3.0, 50, 0.0)).is_err());
        assert!(synth_generate(&params(0, 5.0, 1.0, 50, 0.0)).is_err());
        assert!(synth_generate(&params(10, 0.5, 1.0, 50, 0.0)).is_err());
        assert!(synth_generate(&params(10, 5.0, -1.0, 50, 0.0)).is_err());
        assert!(synth_generate(&params(10, 5.0, 1.0, 50, -0.1)).is_err());
        // mean at the upper bound leaves no room for spread
        assert!(synth_generate(&params(10, 50.0, 5.0, 50, 0.0)).is_err());
    }

    #[test]
    fn pmf_moments_match_targets() {
        for dist in [LengthDist::LogNormal, LengthDist::TruncatedNormal] {
            for p in [SynthParams::en_kr(1, 0), SynthParams::en_lu(1, 0)] {
                let p = SynthParams {
                    length_dist: dist,
                    ..p
                };
                let pmf = p.source_pmf().unwrap();
                let (_, mean, std) = normalized_moments(&pmf).unwrap();
                assert!((mean - p.mean_src).abs() < 1e-6, "{dist}: {mean}");
                assert!((std - p.std_src).abs() < 1e-6, "{dist}: {std}");
                assert_eq!(pmf.len(), p.max_len as usize);
            }
        }
    }

    #[test]
    fn perturbation_ratio_hits_expected_abs_difference() {
        for target in [0.006, 0.5, 2.45, 7.0] {
            let q = perturbation_ratio(target);
            // E|d| = 2q / (1 - q^2) for P(d) = (1-q)/(1+q) q^|d|
            let closed = 2.0 * q / (1.0 - q * q);
            assert!((closed - target).abs() < 1e-12);
            // direct summation as an independent check
            let norm = (1.0 - q) / (1.0 + q);
            let summed: f64 = (1..2000).map(|j| 2.0 * norm * j as f64 * q.powi(j)).sum();
            assert!((summed - target).abs() < 1e-9, "{target}: {summed}");
        }
    }

    #[test]
    fn lengths_stay_in_range() {
        let c = synth_generate(&SynthParams::en_kr(20_000, 1)).unwrap();
        assert!(c
            .pairs()
            .iter()
            .all(|p| (1..=125).contains(&p.src_len) && (1..=125).contains(&p.tgt_len)));
    }
}
