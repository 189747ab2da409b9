use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use partsort_core::{
    autocorrelation, extract_series, run_epochs, summarize_run, synth_generate, BatchPlanConfig,
    MetricTag, SynthParams,
};

const N: usize = 50_000;
const M: usize = 64;

fn batching(c: &mut Criterion) {
    let corpus = synth_generate(&SynthParams::en_kr(N, 11)).expect("preset is valid");
    let mut group = c.benchmark_group("run_epochs");
    group.throughput(Throughput::Elements(N as u64));
    group.sample_size(20);

    let configs = [
        ("unsorted", BatchPlanConfig::unsorted(M)),
        ("partial_k100", BatchPlanConfig::partial_sort(M, 100)),
        ("partial_k1000", BatchPlanConfig::partial_sort(M, 1000)),
        ("full_sort", BatchPlanConfig::full_sort(M)),
    ];
    for (name, config) in &configs {
        group.bench_with_input(BenchmarkId::from_parameter(name), config, |b, config| {
            b.iter(|| run_epochs(black_box(&corpus), config).unwrap())
        });
    }
    group.finish();

    let config = BatchPlanConfig::partial_sort(M, 100);
    let batches = run_epochs(&corpus, &config).unwrap();
    c.bench_function("summarize_run", |b| {
        b.iter(|| summarize_run(black_box(&batches), &config).unwrap())
    });

    let series = extract_series(&batches, MetricTag::PaddedSrc).unwrap();
    c.bench_function("autocorrelation_lag200", |b| {
        b.iter(|| autocorrelation(black_box(&series.values), 200).unwrap())
    });
}

criterion_group!(benches, batching);
criterion_main!(benches);
