//! Paired-length corpora: loading, filtering, shuffling, statistics and
//! synthetic generation.
//!
//! A [`Corpus`] is immutable once built. Every transformation returns a new
//! value and records what was applied to it (length filter, shuffle seed), so
//! a corpus carries enough provenance to be reproduced.

mod io;
mod stats;
mod synth;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::seed;

pub use self::io::{load_corpus, parse_corpus, write_lengths_tsv, CorpusFormat};
pub use self::stats::{compute_stats, LengthStats};
pub use self::synth::{synth_generate, LengthDist, SynthParams};

/// One parallel example.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SentencePair {
    /// Position in the original file, 0-based.
    pub id: usize,
    pub src_len: u32,
    pub tgt_len: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub src_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tgt_text: Option<String>,
}

impl SentencePair {
    pub fn new(id: usize, src_len: u32, tgt_len: u32) -> Result<Self> {
        let pair = SentencePair {
            id,
            src_len,
            tgt_len,
            src_text: None,
            tgt_text: None,
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Builds a pair from raw sentences, measuring length in whitespace tokens.
    pub fn from_text(id: usize, src: &str, tgt: &str) -> Result<Self> {
        let pair = SentencePair {
            id,
            src_len: token_count(src),
            tgt_len: token_count(tgt),
            src_text: Some(src.to_owned()),
            tgt_text: Some(tgt.to_owned()),
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Sort key used by every length-ordering policy: source first, then target.
    #[inline]
    pub fn sort_key(&self) -> (u32, u32) {
        (self.src_len, self.tgt_len)
    }

    fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidPair {
            id: self.id,
            reason,
        };
        if self.src_len == 0 || self.tgt_len == 0 {
            return Err(invalid(format!(
                "lengths must be positive, got ({}, {})",
                self.src_len, self.tgt_len
            )));
        }
        if let Some(text) = &self.src_text {
            if token_count(text) != self.src_len {
                return Err(invalid("src_len disagrees with source text".into()));
            }
        }
        if let Some(text) = &self.tgt_text {
            if token_count(text) != self.tgt_len {
                return Err(invalid("tgt_len disagrees with target text".into()));
            }
        }
        Ok(())
    }
}

pub(crate) fn token_count(text: &str) -> u32 {
    text.split_whitespace().count() as u32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pairs: Vec<SentencePair>,
    max_len_filter: Option<u32>,
    shuffle_seed: Option<u64>,
}

impl Corpus {
    /// Wraps `pairs` after checking lengths are positive and ids are distinct.
    pub fn new(pairs: Vec<SentencePair>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(pairs.len());
        for pair in &pairs {
            pair.validate()?;
            if !seen.insert(pair.id) {
                return Err(Error::InvalidPair {
                    id: pair.id,
                    reason: "duplicate id".into(),
                });
            }
        }
        Ok(Corpus {
            pairs,
            max_len_filter: None,
            shuffle_seed: None,
        })
    }

    /// Lengths-only corpus with ids `0..n` in the given order.
    pub fn from_lengths(lengths: &[(u32, u32)]) -> Result<Self> {
        let pairs = lengths
            .iter()
            .enumerate()
            .map(|(id, &(s, t))| SentencePair::new(id, s, t))
            .collect::<Result<Vec<_>>>()?;
        Corpus::new(pairs)
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn max_len_filter(&self) -> Option<u32> {
        self.max_len_filter
    }

    pub fn shuffle_seed(&self) -> Option<u64> {
        self.shuffle_seed
    }

    /// Keeps the pairs whose source and target both fit within `limit`.
    pub fn filter_max_len(&self, limit: u32) -> Result<Corpus> {
        if limit == 0 {
            return Err(Error::InvalidConfig(
                "max length filter must be >= 1".into(),
            ));
        }
        let pairs = self
            .pairs
            .iter()
            .filter(|p| p.src_len <= limit && p.tgt_len <= limit)
            .cloned()
            .collect();
        Ok(Corpus {
            pairs,
            max_len_filter: Some(self.max_len_filter.map_or(limit, |l| l.min(limit))),
            shuffle_seed: self.shuffle_seed,
        })
    }

    /// Uniform seeded permutation of the pairs.
    pub fn shuffle(&self, seed: u64) -> Result<Corpus> {
        if self.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let order = shuffled_order(self.len(), seed);
        Ok(Corpus {
            pairs: order.into_iter().map(|i| self.pairs[i].clone()).collect(),
            max_len_filter: self.max_len_filter,
            shuffle_seed: Some(seed),
        })
    }

    pub fn stats(&self) -> Result<LengthStats> {
        compute_stats(self)
    }

    /// SHA-256 of the canonical lengths-tsv rendering, hex encoded.
    ///
    /// Two corpora hash equal iff they hold the same lengths in the same order.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for p in &self.pairs {
            hasher.update(format!("{}\t{}\n", p.src_len, p.tgt_len).as_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

/// Seeded Fisher-Yates permutation of `0..n`.
pub(crate) fn shuffled_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lens(c: &Corpus) -> Vec<(u32, u32)> {
        c.pairs().iter().map(SentencePair::sort_key).collect()
    }

    fn sorted_ids(c: &Corpus) -> Vec<usize> {
        let mut ids: Vec<usize> = c.pairs().iter().map(|p| p.id).collect();
        ids.sort_unstable();
        ids
    }

    #[test]
    fn rejects_zero_lengths_and_duplicate_ids() {
        assert!(SentencePair::new(0, 0, 3).is_err());
        assert!(SentencePair::new(0, 3, 0).is_err());
        let a = SentencePair::new(1, 2, 2).unwrap();
        assert!(Corpus::new(vec![a.clone(), a]).is_err());
    }

    #[test]
    fn text_lengths_must_match_payload() {
        let mut p = SentencePair::from_text(0, "a b c", "d e").unwrap();
        assert_eq!(p.sort_key(), (3, 2));
        p.src_len = 4;
        assert!(Corpus::new(vec![p]).is_err());
    }

    #[test]
    fn filter_drops_pairs_over_limit_on_either_side() {
        let c = Corpus::from_lengths(&[(3, 4), (126, 10), (5, 130)]).unwrap();
        let f = c.filter_max_len(125).unwrap();
        assert_eq!(lens(&f), vec![(3, 4)]);
        assert_eq!(f.max_len_filter(), Some(125));
    }

    #[test]
    fn filter_noop_and_boundary() {
        let c = Corpus::from_lengths(&[(3, 4), (9, 2), (5, 5)]).unwrap();
        assert_eq!(c.filter_max_len(9).unwrap().pairs(), c.pairs());
        let ones = Corpus::from_lengths(&[(1, 1), (1, 1)]).unwrap();
        assert_eq!(ones.filter_max_len(1).unwrap().pairs(), ones.pairs());
        assert!(c.filter_max_len(0).is_err());
    }

    #[test]
    fn filter_may_empty_the_corpus() {
        let c = Corpus::from_lengths(&[(3, 4)]).unwrap();
        let f = c.filter_max_len(2).unwrap();
        assert!(f.is_empty());
        assert!(f.stats().is_err());
    }

    #[test]
    fn shuffle_single_pair_is_identity() {
        let c = Corpus::from_lengths(&[(4, 2)]).unwrap();
        assert_eq!(c.shuffle(99).unwrap().pairs(), c.pairs());
    }

    #[test]
    fn shuffle_is_deterministic_and_records_seed() {
        let c = Corpus::from_lengths(&(1..=50).map(|i| (i, i)).collect::<Vec<_>>()).unwrap();
        let a = c.shuffle(11).unwrap();
        let b = c.shuffle(11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shuffle_seed(), Some(11));
        assert_ne!(a.pairs(), c.pairs());
    }

    #[test]
    fn shuffle_with_distinct_seeds_permutes_same_multiset() {
        let c = Corpus::from_lengths(&[(1, 2), (3, 4), (5, 6), (7, 8)]).unwrap();
        let a = c.shuffle(1).unwrap();
        let b = c.shuffle(2).unwrap();
        assert_eq!(sorted_ids(&a), vec![0, 1, 2, 3]);
        assert_eq!(sorted_ids(&b), vec![0, 1, 2, 3]);
    }

    #[test]
    fn shuffle_of_empty_corpus_fails() {
        let c = Corpus::new(vec![]).unwrap();
        assert!(matches!(c.shuffle(0), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn content_hash_tracks_lengths_and_order() {
        let a = Corpus::from_lengths(&[(1, 2), (3, 4)]).unwrap();
        let b = Corpus::from_lengths(&[(3, 4), (1, 2)]).unwrap();
        assert_eq!(
            a.content_hash(),
            Corpus::from_lengths(&[(1, 2), (3, 4)])
                .unwrap()
                .content_hash()
        );
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash().len(), 64);
    }
}
