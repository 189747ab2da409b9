mod simulate;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use partsort_core::{
    compare_costs, compute_stats, load_corpus, synth_generate, ComparisonTable, Corpus,
    LengthStats, RunReport, SynthParams,
};
use serde::Serialize;

use crate::args::{Cli, GenArgs, OutputFormat, Preset, ReportArgs, StatsArgs, SynthArgs};
use crate::UsageError;

pub use self::simulate::simulate;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Writes `text` to `--out` when given, stdout otherwise.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub(crate) fn synth_params(args: &SynthArgs, seed: u64) -> Result<SynthParams> {
    let base = args.preset.map(|p| match p {
        Preset::EnKr => SynthParams::en_kr(500_000, seed),
        Preset::EnLu => SynthParams::en_lu(41_070, seed),
    });
    fn pick<T: Copy>(flag: &str, given: Option<T>, base: Option<T>) -> Result<T> {
        given
            .or(base)
            .ok_or_else(|| usage(format!("--{flag} is required unless --preset is given")))
    }
    let params = SynthParams {
        n: pick("n", args.n, base.as_ref().map(|b| b.n))?,
        mean_src: pick("mean-src", args.mean_src, base.as_ref().map(|b| b.mean_src))?,
        std_src: pick("std-src", args.std_src, base.as_ref().map(|b| b.std_src))?,
        max_len: pick("max-len", args.max_len, base.as_ref().map(|b| b.max_len))?,
        pair_diff_mean: pick(
            "pair-diff",
            args.pair_diff,
            base.as_ref().map(|b| b.pair_diff_mean),
        )?,
        length_dist: args.dist.unwrap_or_default(),
        seed,
    };
    Ok(params)
}

pub fn gen(cli: &Cli, args: &GenArgs) -> Result<()> {
    let params = synth_params(&args.synth, cli.seed.unwrap_or(0))?;
    let corpus = synth_generate(&params)?;
    match &cli.out {
        Some(path) => {
            corpus.save_lengths_tsv(path)?;
            eprintln!("wrote {} pairs to {}", corpus.len(), path.display());
            Ok(())
        }
        None => {
            partsort_core::corpus::write_lengths_tsv(&corpus, io::stdout().lock())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct StatsOutput<'a> {
    path: &'a Path,
    pairs_before_filter: usize,
    /// Applied to source and target alike.
    max_len_filter: Option<u32>,
    std_kind: &'static str,
    stats: &'a LengthStats,
}

fn render_stats(out: &StatsOutput<'_>, format: OutputFormat) -> Result<String> {
    let s = out.stats;
    let filter = out
        .max_len_filter
        .map_or_else(|| "none".to_owned(), |l| format!("{l} (source and target)"));
    Ok(match format {
        OutputFormat::Json => serde_json::to_string_pretty(out)? + "\n",
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "pairs",
                "mean_src",
                "std_src",
                "max_src",
                "mean_tgt",
                "std_tgt",
                "max_tgt",
                "mean_pairwise_abs_diff",
                "max_len_filter",
            ])?;
            w.write_record([
                s.n.to_string(),
                format!("{:.4}", s.mean_src),
                format!("{:.4}", s.std_src),
                s.max_src.to_string(),
                format!("{:.4}", s.mean_tgt),
                format!("{:.4}", s.std_tgt),
                s.max_tgt.to_string(),
                format!("{:.4}", s.mean_pairwise_abs_diff),
                out.max_len_filter
                    .map(|l| l.to_string())
                    .unwrap_or_default(),
            ])?;
            String::from_utf8(w.into_inner()?)?
        }
        OutputFormat::Md => format!(
            "| side | mean | std | max |\n|---|---|---|---|\n\
             | source | {:.2} | {:.2} | {} |\n| target | {:.2} | {:.2} | {} |\n\n\
             pairs: {} (of {} before filtering)\n\
             mean pairwise |src - tgt|: {:.3}\n\
             max length filter: {}\n\
             std is the population standard deviation.\n",
            s.mean_src,
            s.std_src,
            s.max_src,
            s.mean_tgt,
            s.std_tgt,
            s.max_tgt,
            s.n,
            out.pairs_before_filter,
            s.mean_pairwise_abs_diff,
            filter,
        ),
    })
}

pub fn stats(cli: &Cli, args: &StatsArgs) -> Result<()> {
    let corpus = load_corpus(&args.path, args.input_format)?;
    let before = corpus.len();
    let corpus = match args.max_len {
        Some(limit) => corpus.filter_max_len(limit)?,
        None => corpus,
    };
    let stats = compute_stats(&corpus)
        .with_context(|| format!("no pairs left in {} after filtering", args.path.display()))?;
    if let Some(path) = &args.histogram {
        fs::write(path, stats.histogram_csv()?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let out = StatsOutput {
        path: &args.path,
        pairs_before_filter: before,
        max_len_filter: corpus.max_len_filter(),
        std_kind: "population",
        stats: &stats,
    };
    emit(cli.out.as_deref(), &render_stats(&out, cli.format)?)
}

pub(crate) fn render_table(table: &ComparisonTable, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Md => table.to_markdown(),
        OutputFormat::Csv => table.to_csv()?,
        OutputFormat::Json => serde_json::to_string_pretty(table)? + "\n",
    })
}

pub(crate) const REPORT_SUFFIX: &str = ".report.json";

fn report_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for candidate in [dir.to_path_buf(), dir.join("runs")] {
        if !candidate.is_dir() {
            continue;
        }
        for entry in
            fs::read_dir(&candidate).with_context(|| format!("reading {}", candidate.display()))?
        {
            let path = entry?.path();
            if path
                .file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with(REPORT_SUFFIX))
            {
                files.push(path);
            }
        }
    }
    files.sort();
    Ok(files)
}

pub(crate) fn load_reports(dir: &Path) -> Result<Vec<RunReport>> {
    if !dir.is_dir() {
        return Err(io::Error::new(io::ErrorKind::NotFound, "not a directory"))
            .with_context(|| format!("reading {}", dir.display()));
    }
    let files = report_files(dir)?;
    if files.is_empty() {
        return Err(anyhow::Error::new(partsort_core::Error::EmptyStream)
            .context(format!("no run reports in {}", dir.display())));
    }
    files
        .iter()
        .map(|path| {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(partsort_core::Error::from)
                .with_context(|| format!("parsing {}", path.display()))
        })
        .collect()
}

pub fn report(cli: &Cli, args: &ReportArgs) -> Result<()> {
    let mut reports = Vec::new();
    for dir in &args.dirs {
        reports.extend(load_reports(dir)?);
    }
    let table = compare_costs(&reports)?;
    emit(cli.out.as_deref(), &render_table(&table, cli.format)?)
}

pub(crate) fn corpus_summary(corpus: &Corpus) -> Result<serde_json::Value> {
    let s = compute_stats(corpus)?;
    Ok(serde_json::json!({
        "hash": corpus.content_hash(),
        "pairs": corpus.len(),
        "max_len_filter": corpus.max_len_filter(),
        "max_len_filter_sides": "both",
        "mean_src": s.mean_src,
        "std_src": s.std_src,
        "max_src": s.max_src,
        "mean_tgt": s.mean_tgt,
        "std_tgt": s.std_tgt,
        "max_tgt": s.max_tgt,
        "mean_pairwise_abs_diff": s.mean_pairwise_abs_diff,
    }))
}
