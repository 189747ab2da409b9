//! Partial-sort minibatch loading for variable-length paired sequences.
//!
//! The crate is organized as a pipeline:
//!
//! * [`corpus`] loads, filters, summarizes and synthesizes paired-length corpora.
//! * [`batcher`] turns a corpus into a stream of minibatches under one of three
//!   policies: unsorted chunking, buffered partial sorting with look-ahead `k`,
//!   or a full sort of each epoch.
//! * [`cost`] accounts for padding: useful vs padded token slots and simple
//!   compute-cost proxies, aggregated into run reports and comparison tables.
//! * [`diagnostics`] measures how far a batch stream drifts from i.i.d.
//!   sampling through autocorrelation of batch statistics and refill-cycle
//!   monotonicity.

pub mod batcher;
pub mod corpus;
pub mod cost;
pub mod diagnostics;
mod error;
mod seed;

pub use batcher::{run_epochs, Batch, BatchPlanConfig, Loader, LoaderState, Policy};
pub use corpus::{
    compute_stats, load_corpus, synth_generate, Corpus, CorpusFormat, LengthDist, LengthStats,
    SentencePair, SynthParams,
};
pub use cost::{
    compare_costs, cost_of_batch, summarize_run, BatchCost, ComparisonTable, RunReport,
};
pub use diagnostics::{
    autocorrelation, cycle_analysis, extract_series, iid_report, policy_iid_report, BatchSeries,
    IidReport, MetricTag,
};
pub use error::{Error, Result};
pub use seed::epoch_seed;
