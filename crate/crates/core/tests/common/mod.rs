//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the loader's batching logic; inputs are plain
//! vectors and every step uses naive list operations.

#![allow(dead_code)]

use partsort_core::{Batch, BatchPlanConfig, Corpus, Loader};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(id, src_len, tgt_len)`
pub type Item = (usize, u32, u32);

/// Epoch-0 visiting order the loader draws for this config, as items.
pub fn shuffled_items(corpus: &Corpus, config: &BatchPlanConfig) -> Vec<Item> {
    let cfg = BatchPlanConfig {
        policy: partsort_core::Policy::Unsorted,
        ..config.clone()
    };
    let loader = Loader::new(corpus, cfg).unwrap();
    loader
        .state()
        .order
        .iter()
        .map(|&i| {
            let p = &corpus.pairs()[i];
            (p.id, p.src_len, p.tgt_len)
        })
        .collect()
}

/// Straight-line buffered partial sort: top the buffer up to m*k when it holds
/// fewer than m items, insertion-sort it by (src, tgt), pop the first m.
pub fn reference_partial_sort(
    items: &[Item],
    m: usize,
    k: usize,
    drop_last: bool,
) -> Vec<Vec<Item>> {
    let mut unread: Vec<Item> = items.to_vec();
    let mut buffer: Vec<Item> = Vec::new();
    let mut out = Vec::new();
    loop {
        if buffer.len() < m && !unread.is_empty() {
            while buffer.len() < m * k && !unread.is_empty() {
                buffer.push(unread.remove(0));
            }
            // stable insertion sort
            for i in 1..buffer.len() {
                let mut j = i;
                while j > 0 && (buffer[j - 1].1, buffer[j - 1].2) > (buffer[j].1, buffer[j].2) {
                    buffer.swap(j - 1, j);
                    j -= 1;
                }
            }
        }
        if buffer.is_empty() {
            break;
        }
        let take = m.min(buffer.len());
        if take < m && drop_last {
            break;
        }
        let batch: Vec<Item> = buffer.drain(..take).collect();
        out.push(batch);
    }
    out
}

/// Consecutive m-chunks of the shuffled items.
pub fn reference_chunks(items: &[Item], m: usize, drop_last: bool) -> Vec<Vec<Item>> {
    items
        .chunks(m)
        .filter(|c| !(drop_last && c.len() < m))
        .map(<[Item]>::to_vec)
        .collect()
}

pub fn as_items(batch: &Batch) -> Vec<Item> {
    batch
        .pairs
        .iter()
        .map(|p| (p.id, p.src_len, p.tgt_len))
        .collect()
}

pub fn sorted_ids(batch: &[Item]) -> Vec<usize> {
    let mut ids: Vec<usize> = batch.iter().map(|x| x.0).collect();
    ids.sort_unstable();
    ids
}

/// Minimum over all partitions of `lengths` into groups of exactly `m`
/// of the summed group maxima. `lengths.len()` must be a multiple of `m`.
pub fn min_sum_of_group_maxima(lengths: &[u32], m: usize) -> u64 {
    assert_eq!(lengths.len() % m, 0);
    fn go(rest: &[u32], m: usize) -> u64 {
        if rest.is_empty() {
            return 0;
        }
        let first = rest[0];
        let others = &rest[1..];
        let mut best = u64::MAX;
        // choose m - 1 companions for the first remaining element
        let mut chosen = Vec::with_capacity(m - 1);
        choose(others, 0, m - 1, &mut chosen, &mut |picked: &[usize]| {
            let group_max = picked.iter().map(|&i| others[i]).fold(first, u32::max);
            let remaining: Vec<u32> = others
                .iter()
                .enumerate()
                .filter(|(i, _)| !picked.contains(i))
                .map(|(_, &l)| l)
                .collect();
            best = best.min(u64::from(group_max) + go(&remaining, m));
        });
        best
    }
    fn choose(
        pool: &[u32],
        start: usize,
        need: usize,
        chosen: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if need == 0 {
            f(chosen);
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < need {
                break;
            }
            chosen.push(i);
            choose(pool, i + 1, need - 1, chosen, f);
            chosen.pop();
        }
    }
    go(lengths, m)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_lengths(rng: &mut ChaCha8Rng, n: usize, max: u32) -> Vec<(u32, u32)> {
    (0..n)
        .map(|_| (rng.random_range(1..=max), rng.random_range(1..=max)))
        .collect()
}

/// Total padded source slots of a batch stream.
pub fn padded_src_slots(batches: &[Batch]) -> u64 {
    batches
        .iter()
        .map(|b| b.len() as u64 * u64::from(b.padded_src))
        .sum()
}
