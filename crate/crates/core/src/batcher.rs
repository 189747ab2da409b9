//! Minibatch scheduling over a shuffled corpus.
//!
//! Three policies share one loader:
//!
//! * `partial_sort` keeps a buffer of up to `m × k` pairs. Whenever fewer than
//!   `m` pairs remain buffered, the buffer is topped up to `m × k` from the
//!   shuffled stream and stably sorted by `(src_len, tgt_len)`. Batches are the
//!   `m` shortest buffered pairs.
//! * `unsorted` chunks the shuffled stream into consecutive groups of `m`.
//! * `full_sort` stably sorts the whole shuffled epoch and then chunks it.
//!
//! Every epoch is reshuffled with a seed derived from the base seed and the
//! epoch index, so a `(corpus, config)` pair always replays the same stream.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::{shuffled_order, Corpus, SentencePair};
use crate::error::{Error, Result};
use crate::seed::epoch_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Unsorted,
    PartialSort,
    FullSort,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Unsorted => "unsorted",
            Policy::PartialSort => "partial_sort",
            Policy::FullSort => "full_sort",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BatchPlanConfig {
    /// Pairs per batch (`m`).
    pub batch_size: usize,
    /// Look-ahead multiplier (`k`); the sort buffer holds `m × k` pairs.
    pub look_ahead: usize,
    pub policy: Policy,
    pub seed: u64,
    pub drop_last: bool,
    pub epochs: usize,
}

impl BatchPlanConfig {
    pub fn partial_sort(batch_size: usize, look_ahead: usize) -> Self {
        BatchPlanConfig {
            batch_size,
            look_ahead,
            policy: Policy::PartialSort,
            seed: 0,
            drop_last: false,
            epochs: 1,
        }
    }

    pub fn unsorted(batch_size: usize) -> Self {
        BatchPlanConfig {
            policy: Policy::Unsorted,
            ..Self::partial_sort(batch_size, 1)
        }
    }

    pub fn full_sort(batch_size: usize) -> Self {
        BatchPlanConfig {
            policy: Policy::FullSort,
            ..Self::partial_sort(batch_size, 1)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn with_drop_last(mut self, drop_last: bool) -> Self {
        self.drop_last = drop_last;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be >= 1".into()));
        }
        if self.look_ahead == 0 {
            return Err(Error::InvalidConfig("look-ahead k must be >= 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        Ok(())
    }

    /// Column label used in comparison tables: `1` for unsorted, `all` for a full sort.
    pub fn k_label(&self) -> String {
        match self.policy {
            Policy::Unsorted => "1".into(),
            Policy::PartialSort => self.look_ahead.to_string(),
            Policy::FullSort => "all".into(),
        }
    }

    /// Capacity of the sort buffer.
    pub fn buffer_capacity(&self) -> usize {
        self.batch_size.saturating_mul(self.look_ahead)
    }
}

/// One emitted minibatch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    pub epoch: usize,
    /// Index of this batch within its epoch.
    pub iteration: usize,
    pub pairs: Vec<SentencePair>,
    pub padded_src: u32,
    pub padded_tgt: u32,
}

impl Batch {
    pub fn new(epoch: usize, iteration: usize, pairs: Vec<SentencePair>) -> Result<Self> {
        let padded_src = pairs
            .iter()
            .map(|p| p.src_len)
            .max()
            .ok_or(Error::EmptyBatch)?;
        let padded_tgt = pairs
            .iter()
            .map(|p| p.tgt_len)
            .max()
            .ok_or(Error::EmptyBatch)?;
        Ok(Batch {
            epoch,
            iteration,
            pairs,
            padded_src,
            padded_tgt,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.id).collect()
    }

    pub fn to_record(&self) -> BatchRecord {
        BatchRecord {
            epoch: self.epoch,
            iteration: self.iteration,
            ids: self.ids(),
            src_lens: self.pairs.iter().map(|p| p.src_len).collect(),
            tgt_lens: self.pairs.iter().map(|p| p.tgt_len).collect(),
            padded_src: self.padded_src,
            padded_tgt: self.padded_tgt,
        }
    }

    pub fn from_record(record: BatchRecord) -> Result<Self> {
        let BatchRecord {
            epoch,
            iteration,
            ids,
            src_lens,
            tgt_lens,
            padded_src,
            padded_tgt,
        } = record;
        if ids.len() != src_lens.len() || ids.len() != tgt_lens.len() {
            return Err(Error::InvalidConfig(format!(
                "batch {epoch}/{iteration}: ids and length columns differ in size"
            )));
        }
        let pairs = ids
            .into_iter()
            .zip(src_lens.into_iter().zip(tgt_lens))
            .map(|(id, (s, t))| SentencePair::new(id, s, t))
            .collect::<Result<Vec<_>>>()?;
        let batch = Batch::new(epoch, iteration, pairs)?;
        if (batch.padded_src, batch.padded_tgt) != (padded_src, padded_tgt) {
            return Err(Error::InvalidConfig(format!(
                "batch {epoch}/{iteration}: recorded padding ({padded_src}, {padded_tgt}) \
                 disagrees with member lengths ({}, {})",
                batch.padded_src, batch.padded_tgt
            )));
        }
        Ok(batch)
    }
}

/// JSON-lines form of a [`Batch`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub epoch: usize,
    pub iteration: usize,
    pub ids: Vec<usize>,
    pub src_lens: Vec<u32>,
    pub tgt_lens: Vec<u32>,
    pub padded_src: u32,
    pub padded_tgt: u32,
}

pub fn write_batches_jsonl<W: Write>(batches: &[Batch], mut out: W) -> Result<()> {
    for batch in batches {
        serde_json::to_writer(&mut out, &batch.to_record())?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    out.flush().map_err(|e| Error::io("<output>", e))
}

pub fn read_batches_jsonl<R: BufRead>(reader: R) -> Result<Vec<Batch>> {
    let mut batches = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: BatchRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        batches.push(Batch::from_record(record)?);
    }
    Ok(batches)
}

/// Resumable position of a [`Loader`].
///
/// `order` and `buffer` hold indices into the corpus' pair list.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LoaderState {
    /// This epoch's visiting order (already sorted for `full_sort`).
    pub order: Vec<usize>,
    pub buffer: VecDeque<usize>,
    /// Next unread position in `order`.
    pub cursor: usize,
    /// Batches emitted so far this epoch.
    pub iteration: usize,
    pub epoch: usize,
}

#[derive(Debug, Clone)]
pub struct Loader<'a> {
    corpus: &'a Corpus,
    config: BatchPlanConfig,
    state: LoaderState,
    epoch_done: bool,
}

impl<'a> Loader<'a> {
    pub fn new(corpus: &'a Corpus, config: BatchPlanConfig) -> Result<Self> {
        check_inputs(corpus, &config)?;
        let mut loader = Loader {
            corpus,
            config,
            state: LoaderState::default(),
            epoch_done: false,
        };
        loader.start_epoch(0);
        Ok(loader)
    }

    /// Continues from an explicit state, e.g. a checkpoint or a hand-built order.
    pub fn resume(corpus: &'a Corpus, config: BatchPlanConfig, state: LoaderState) -> Result<Self> {
        check_inputs(corpus, &config)?;
        let n = corpus.len();
        let invalid = |msg: String| Err(Error::InvalidConfig(format!("loader state: {msg}")));
        if state.order.len() != n {
            return invalid(format!(
                "order has {} entries for {n} pairs",
                state.order.len()
            ));
        }
        let mut seen = vec![false; n];
        for &i in &state.order {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return invalid("order is not a permutation of the corpus".into());
            }
        }
        if state.cursor > n {
            return invalid(format!("cursor {} past corpus end {n}", state.cursor));
        }
        if state.buffer.len() > config.buffer_capacity() {
            return invalid(format!(
                "buffer holds {} pairs, capacity is {}",
                state.buffer.len(),
                config.buffer_capacity()
            ));
        }
        if state.buffer.iter().any(|&i| i >= n) {
            return invalid("buffer index out of range".into());
        }
        if state.epoch >= config.epochs {
            return invalid(format!(
                "epoch {} >= configured epochs {}",
                state.epoch, config.epochs
            ));
        }
        Ok(Loader {
            corpus,
            config,
            state,
            epoch_done: false,
        })
    }

    pub fn config(&self) -> &BatchPlanConfig {
        &self.config
    }

    pub fn state(&self) -> &LoaderState {
        &self.state
    }

    /// Pairs currently held in the sort buffer, front first.
    pub fn buffered(&self) -> impl Iterator<Item = &SentencePair> + '_ {
        self.state.buffer.iter().map(|&i| &self.corpus.pairs()[i])
    }

    fn start_epoch(&mut self, epoch: usize) {
        let pairs = self.corpus.pairs();
        let mut order = shuffled_order(pairs.len(), epoch_seed(self.config.seed, epoch));
        if self.config.policy == Policy::FullSort {
            order.sort_by_key(|&i| pairs[i].sort_key());
        }
        self.state = LoaderState {
            order,
            buffer: VecDeque::with_capacity(self.config.buffer_capacity().min(pairs.len())),
            cursor: 0,
            iteration: 0,
            epoch,
        };
        self.epoch_done = false;
    }

    /// Moves to the next epoch. Returns `false` once all epochs are consumed.
    pub fn next_epoch(&mut self) -> bool {
        let next = self.state.epoch + 1;
        if next >= self.config.epochs {
            self.epoch_done = true;
            return false;
        }
        self.start_epoch(next);
        true
    }

    /// Tops the buffer up to `m × k` from the shuffled stream, then stably
    /// sorts all of it by `(src_len, tgt_len)`.
    pub fn refill(&mut self) {
        let capacity = self.config.buffer_capacity();
        let state = &mut self.state;
        let wanted = capacity.saturating_sub(state.buffer.len());
        let end = state.order.len().min(state.cursor + wanted);
        state.buffer.extend(&state.order[state.cursor..end]);
        state.cursor = end;

        let pairs = self.corpus.pairs();
        state
            .buffer
            .make_contiguous()
            .sort_by_key(|&i| pairs[i].sort_key());
    }

    /// Next batch of the current epoch, or `None` at end of epoch.
    pub fn next_batch(&mut self) -> Option<Batch> {
        if self.epoch_done {
            return None;
        }
        let m = self.config.batch_size;
        let n = self.state.order.len();

        let members: Vec<usize> = match self.config.policy {
            Policy::PartialSort => {
                if self.state.buffer.len() < m && self.state.cursor < n {
                    self.refill();
                }
                let take = m.min(self.state.buffer.len());
                self.state.buffer.drain(..take).collect()
            }
            Policy::Unsorted | Policy::FullSort => {
                let start = self.state.cursor;
                let end = n.min(start + m);
                self.state.cursor = end;
                self.state.order[start..end].to_vec()
            }
        };

        if members.is_empty() || (members.len() < m && self.config.drop_last) {
            self.state.buffer.clear();
            self.state.cursor = n;
            self.epoch_done = true;
            return None;
        }

        let pairs = self.corpus.pairs();
        let batch = Batch::new(
            self.state.epoch,
            self.state.iteration,
            members.into_iter().map(|i| pairs[i].clone()).collect(),
        )
        .expect("members are non-empty");
        self.state.iteration += 1;
        Some(batch)
    }
}

/// Streams every batch of every epoch.
impl Iterator for Loader<'_> {
    type Item = Batch;

    fn next(&mut self) -> Option<Batch> {
        loop {
            if let Some(batch) = self.next_batch() {
                return Some(batch);
            }
            if !self.next_epoch() {
                return None;
            }
        }
    }
}

fn check_inputs(corpus: &Corpus, config: &BatchPlanConfig) -> Result<()> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if config.drop_last && config.batch_size > corpus.len() {
        return Err(Error::InvalidConfig(format!(
            "batch size {} exceeds corpus size {} with drop_last set",
            config.batch_size,
            corpus.len()
        )));
    }
    Ok(())
}

/// All batches of all configured epochs, in emission order.
pub fn run_epochs(corpus: &Corpus, config: &BatchPlanConfig) -> Result<Vec<Batch>> {
    Ok(Loader::new(corpus, config.clone())?.collect())
}
