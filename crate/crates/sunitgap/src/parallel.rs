//! Rayon drivers. Output never depends on the worker count: shards are
//! disjoint `x` ranges merged by sort, and families are collected in `k`
//! order.

use std::ops::Range;

use rayon::prelude::*;
use sunitgap_core::arith::{ExponentVector, PrimeSet};
use sunitgap_core::hensel::{construct_extremal, WitnessFamily};
use sunitgap_core::search::{enumerate, enumerate_shard, merge_shards, Dataset, SearchBudget, SearchWindow};

use crate::{AppError, AppResult};

pub fn pool(workers: usize) -> AppResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AppError::Usage(format!("cannot start {workers} workers: {e}")))
}

/// Splits `1..=x_max` into at most `pieces` contiguous ranges.
pub fn x_ranges(x_max: u64, pieces: usize) -> Vec<(u64, u64)> {
    if x_max == 0 {
        return Vec::new();
    }
    let pieces = (pieces.max(1) as u64).min(x_max);
    let step = x_max.div_ceil(pieces);
    (0..pieces)
        .map(|i| (i * step + 1, ((i + 1) * step).min(x_max)))
        .filter(|(lo, hi)| lo <= hi)
        .collect()
}

pub fn enumerate_parallel(
    s: &PrimeSet,
    t: &PrimeSet,
    window: &SearchWindow,
    budget: &SearchBudget,
    workers: usize,
) -> AppResult<Dataset> {
    if window.x_max == 0 {
        return Ok(enumerate(s, t, window, budget)?);
    }
    window.check_budget(budget.max_window)?;
    let ranges = x_ranges(window.x_max, workers * 4);
    let shards = pool(workers)?.install(|| {
        ranges
            .par_iter()
            .map(|&(lo, hi)| enumerate_shard(s, t, window, lo..=hi, budget))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(merge_shards(s, t, window, shards))
}

pub fn hensel_family_parallel(a: &ExponentVector, p: u64, ks: Range<u32>, workers: usize) -> AppResult<WitnessFamily> {
    let results: Vec<_> =
        pool(workers)?.install(|| ks.into_par_iter().map(|k| (k, construct_extremal(a, p, k))).collect());
    let mut family = WitnessFamily { witnesses: Vec::new(), skipped: Vec::new() };
    for (k, r) in results {
        match r {
            Ok(w) => family.witnesses.push(w),
            Err(e) => family.skipped.push((k, e)),
        }
    }
    Ok(family)
}
