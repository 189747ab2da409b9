mod common;

use partsort_core::{run_epochs, summarize_run, BatchPlanConfig, Corpus};

use common::*;

#[test]
fn enumeration_oracle_on_known_instances() {
    // {1,5,5,9}: pairing (1,5)(5,9) gives 5 + 9, best possible
    assert_eq!(min_sum_of_group_maxima(&[9, 5, 1, 5], 2), 14);
    assert_eq!(min_sum_of_group_maxima(&[3, 1, 2], 3), 3);
    assert_eq!(min_sum_of_group_maxima(&[4, 4, 1, 1, 2, 2], 2), 7);
}

#[test]
fn full_sort_minimizes_sum_of_group_maxima() {
    let mut r = rng(11);
    for m in 1..=4usize {
        for groups in 1..=(12 / m) {
            let n = groups * m;
            for case in 0..15 {
                let lengths = random_lengths(&mut r, n, 9);
                let corpus = Corpus::from_lengths(&lengths).unwrap();
                let srcs: Vec<u32> = lengths.iter().map(|l| l.0).collect();
                let best = min_sum_of_group_maxima(&srcs, m);
                let batches =
                    run_epochs(&corpus, &BatchPlanConfig::full_sort(m).with_seed(case)).unwrap();
                let got: u64 = batches.iter().map(|b| u64::from(b.padded_src)).sum();
                assert_eq!(got, best, "n={n} m={m} lengths={srcs:?}");
            }
        }
    }
}

#[test]
fn padding_is_bracketed_by_full_sort_and_unsorted_on_average() {
    let lengths = random_lengths(&mut rng(5), 600, 80);
    let corpus = Corpus::from_lengths(&lengths).unwrap();
    let m = 8;
    let seeds = 0..24u64;
    let mean_slots = |make: &dyn Fn(u64) -> BatchPlanConfig| {
        let total: u64 = seeds
            .clone()
            .map(|s| padded_src_slots(&run_epochs(&corpus, &make(s)).unwrap()))
            .sum();
        total as f64 / seeds.clone().count() as f64
    };
    let full = mean_slots(&|s| BatchPlanConfig::full_sort(m).with_seed(s));
    let unsorted = mean_slots(&|s| BatchPlanConfig::unsorted(m).with_seed(s));
    let mut previous = unsorted;
    for k in [2, 4, 16, 64] {
        let partial = mean_slots(&|s| BatchPlanConfig::partial_sort(m, k).with_seed(s));
        assert!(
            full <= partial && partial <= unsorted,
            "k={k}: {full} <= {partial} <= {unsorted}"
        );
        assert!(
            partial <= previous,
            "k={k} should not pad more than a smaller k"
        );
        previous = partial;
    }
}

#[test]
fn report_costs_are_bracketed_on_average() {
    let lengths = random_lengths(&mut rng(9), 1000, 100);
    let corpus = Corpus::from_lengths(&lengths).unwrap();
    let mut sums = [0.0f64; 3];
    let mut linear = [0u64; 3];
    for seed in 0..20 {
        let configs = [
            BatchPlanConfig::unsorted(16).with_seed(seed),
            BatchPlanConfig::partial_sort(16, 8).with_seed(seed),
            BatchPlanConfig::full_sort(16).with_seed(seed),
        ];
        for (i, cfg) in configs.iter().enumerate() {
            let report = summarize_run(&run_epochs(&corpus, cfg).unwrap(), cfg).unwrap();
            assert!(report.avg_padded_src >= corpus.stats().unwrap().mean_src);
            assert_eq!(
                report.per_batch.iter().map(|c| c.linear_cost).sum::<u64>(),
                report.total_linear_cost
            );
            sums[i] += report.avg_padded_src;
            linear[i] += report.total_linear_cost;
        }
    }
    assert!(sums[2] <= sums[1] && sums[1] <= sums[0], "{sums:?}");
    assert!(
        linear[2] <= linear[1] && linear[1] <= linear[0],
        "{linear:?}"
    );
}
