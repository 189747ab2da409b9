use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use partsort_core::batcher::write_batches_jsonl;
use partsort_core::{
    compare_costs, extract_series, iid_report, load_corpus, run_epochs, summarize_run,
    synth_generate, BatchPlanConfig, Corpus, IidReport, MetricTag, Policy, RunReport,
};
use rayon::prelude::*;
use serde::Serialize;

use super::{corpus_summary, render_table, report_files, synth_params, usage, REPORT_SUFFIX};
use crate::args::{Cli, KValue, SimulateArgs};

fn cell_config(args: &SimulateArgs, k: KValue, seed: u64) -> BatchPlanConfig {
    let base = match k {
        KValue::Finite(1) => BatchPlanConfig::unsorted(args.m),
        KValue::Finite(k) => BatchPlanConfig::partial_sort(args.m, k),
        KValue::All => BatchPlanConfig::full_sort(args.m),
    };
    base.with_seed(seed)
        .with_epochs(args.epochs)
        .with_drop_last(args.drop_last)
}

fn cell_stem(config: &BatchPlanConfig) -> String {
    format!("k{}_seed{}", config.k_label(), config.seed)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_cell(
    corpus: &Corpus,
    config: &BatchPlanConfig,
    args: &SimulateArgs,
    runs_dir: &Path,
) -> Result<(RunReport, IidReport)> {
    let batches = run_epochs(corpus, config)?;
    let report = summarize_run(&batches, config)?.with_corpus(corpus);
    let iid = iid_report(&batches, config, args.max_lag)?;

    let stem = cell_stem(config);
    write_json(&runs_dir.join(format!("{stem}{REPORT_SUFFIX}")), &report)?;
    write_json(&runs_dir.join(format!("{stem}.iid.json")), &iid)?;
    let path = runs_dir.join(format!("{stem}.batches.jsonl"));
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_batches_jsonl(&batches, BufWriter::new(file))
        .with_context(|| format!("writing {}", path.display()))?;
    if args.series_csv {
        let series = extract_series(&batches, MetricTag::PaddedSrc)?;
        write_text(
            &runs_dir.join(format!("{stem}.series.csv")),
            &series.to_csv()?,
        )?;
    }
    Ok((report, iid))
}

fn iid_summary_csv(reports: &[IidReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "k",
        "seed",
        "batches",
        "max_lag",
        "lag1_autocorr",
        "cycle_score",
        "degenerate",
    ])?;
    for r in reports {
        w.write_record([
            r.config.k_label(),
            r.config.seed.to_string(),
            r.series_len.to_string(),
            r.max_lag.to_string(),
            r.lag1().map(|v| format!("{v:.6}")).unwrap_or_default(),
            r.cycle_score.map(|v| format!("{v:.6}")).unwrap_or_default(),
            r.degenerate.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn load_or_generate(args: &SimulateArgs) -> Result<(Corpus, serde_json::Value)> {
    let (corpus, source) = match &args.corpus {
        Some(path) => (
            load_corpus(path, args.input_format)?,
            serde_json::json!({ "path": path, "format": args.input_format }),
        ),
        None => {
            let params = synth_params(&args.synth, args.corpus_seed)?;
            (
                synth_generate(&params)?,
                serde_json::json!({ "synthetic": params }),
            )
        }
    };
    let corpus = match args.filter_max_len {
        Some(limit) => corpus.filter_max_len(limit)?,
        None => corpus,
    };
    if corpus.is_empty() {
        anyhow::bail!(partsort_core::Error::EmptyCorpus);
    }
    Ok((corpus, source))
}

/// Moves every file under `from` into the same relative place under `to`.
fn promote(from: &Path, to: &Path) -> Result<()> {
    for entry in fs::read_dir(from)? {
        let entry = entry?;
        let target = to.join(entry.file_name());
        if entry.file_type()?.is_dir() {
            fs::create_dir_all(&target)?;
            promote(&entry.path(), &target)?;
        } else {
            fs::rename(entry.path(), &target)
                .with_context(|| format!("moving output into {}", target.display()))?;
        }
    }
    Ok(())
}

pub fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<()> {
    let out = cli
        .out
        .clone()
        .ok_or_else(|| usage("simulate needs --out <DIR>"))?;
    if args.k.is_empty() {
        return Err(usage("--k needs at least one value"));
    }
    if args.m == 0 || args.epochs == 0 {
        return Err(usage("--m and --epochs must be >= 1"));
    }
    let seeds = match (&args.seeds[..], cli.seed) {
        ([], Some(seed)) => vec![seed],
        ([], None) => vec![0, 1, 2],
        (given, _) => given.to_vec(),
    };
    let mut k_values = args.k.clone();
    k_values.dedup();

    if out.is_dir() && !report_files(&out)?.is_empty() {
        return Err(usage(format!(
            "{} already holds run reports; pick an empty output directory",
            out.display()
        )));
    }

    let (corpus, source) = load_or_generate(args)?;
    let configs: Vec<BatchPlanConfig> = k_values
        .iter()
        .flat_map(|&k| seeds.iter().map(move |&s| (k, s)))
        .map(|(k, s)| cell_config(args, k, s))
        .collect();
    for config in &configs {
        partsort_core::Loader::new(&corpus, config.clone())?;
    }

    let created_out = !out.exists();
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let staging: PathBuf = out.join(format!(".partial-{}", std::process::id()));
    let result = (|| -> Result<String> {
        let runs_dir = staging.join("runs");
        fs::create_dir_all(&runs_dir)
            .with_context(|| format!("creating {}", runs_dir.display()))?;

        let cells: Vec<(RunReport, IidReport)> = configs
            .par_iter()
            .map(|config| run_cell(&corpus, config, args, &runs_dir))
            .collect::<Result<_>>()?;
        let (reports, iids): (Vec<RunReport>, Vec<IidReport>) = cells.into_iter().unzip();

        let table = compare_costs(&reports)?;
        write_text(&staging.join("comparison.md"), &table.to_markdown())?;
        write_text(&staging.join("comparison.csv"), &table.to_csv()?)?;
        write_json(&staging.join("comparison.json"), &table)?;
        write_text(&staging.join("iid_summary.csv"), &iid_summary_csv(&iids)?)?;
        write_json(
            &staging.join("sweep.json"),
            &serde_json::json!({
                "corpus_source": source,
                "corpus": corpus_summary(&corpus)?,
                "m": args.m,
                "k": configs.iter().map(BatchPlanConfig::k_label).collect::<Vec<_>>(),
                "seeds": seeds,
                "epochs": args.epochs,
                "drop_last": args.drop_last,
                "policy_for_k1": Policy::Unsorted,
            }),
        )?;
        promote(&staging, &out)?;
        render_table(&table, cli.format)
    })();

    let _ = fs::remove_dir_all(&staging);
    match result {
        Ok(rendered) => {
            eprintln!("wrote {} runs to {}", configs.len(), out.display());
            print!("{rendered}");
            Ok(())
        }
        Err(err) => {
            if created_out {
                let _ = fs::remove_dir_all(&out);
            }
            Err(err)
        }
    }
}
