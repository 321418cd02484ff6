use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};

use super::{Dataset, Origin, SearchBudget, SearchWindow, SkipCounts, SolutionRecord};
use crate::arith::{is_coprime_to_set, ExponentVector, PrimeSet};
use crate::error::{domain, Result};

/// Records and skip counts for one contiguous range of `x`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Shard {
    pub records: Vec<SolutionRecord>,
    pub skipped: SkipCounts,
}

pub(super) fn validate(s: &PrimeSet, t: &PrimeSet, window: &SearchWindow) -> Result<()> {
    if t.is_empty() {
        return Err(domain("T must contain at least one prime"));
    }
    s.ensure_disjoint(t)?;
    if window.exp_max.len() != t.len() {
        return Err(domain(alloc::format!(
            "{} exponent bounds for {} primes of T",
            window.exp_max.len(),
            t.len()
        )));
    }
    Ok(())
}

/// Every exponent vector of the window in lexicographic order.
pub(super) fn exponent_vectors(t: &PrimeSet, bounds: &[u32]) -> Vec<ExponentVector> {
    let mut out = Vec::new();
    let mut cur = alloc::vec![0u32; bounds.len()];
    loop {
        out.push(ExponentVector::new(t.clone(), cur.clone()).expect("length matches T"));
        let mut i = bounds.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < bounds[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
    }
}

/// One record per `(x, a)` with `x` in `xs` (zero excluded) and nonzero
/// difference; `x` must be coprime to T when the window asks for it.
pub fn enumerate_shard(
    s: &PrimeSet,
    t: &PrimeSet,
    window: &SearchWindow,
    xs: RangeInclusive<u64>,
    budget: &SearchBudget,
) -> Result<Shard> {
    validate(s, t, window)?;
    let vectors = exponent_vectors(t, &window.exp_max);
    let mut shard = Shard::default();
    let lo = (*xs.start()).max(1);
    let hi = (*xs.end()).min(window.x_max);
    for x in lo..=hi {
        if window.require_coprime && !is_coprime_to_set(&BigInt::from(x), t) {
            shard.skipped.not_coprime += vectors.len() as u64;
            continue;
        }
        for a in &vectors {
            match SolutionRecord::build(BigUint::from(x), a.clone(), s, &budget.factor)? {
                Some(r) => shard.records.push(r),
                None => shard.skipped.zero_delta += 1,
            }
        }
    }
    Ok(shard)
}

pub fn merge_shards(
    s: &PrimeSet,
    t: &PrimeSet,
    window: &SearchWindow,
    shards: impl IntoIterator<Item = Shard>,
) -> Dataset {
    let mut records = Vec::new();
    let mut skipped = SkipCounts::default();
    for shard in shards {
        records.extend(shard.records);
        skipped += shard.skipped;
    }
    Dataset::new(s.clone(), t.clone(), Origin::Window(window.clone()), records, skipped)
}

/// Single-threaded enumeration of the whole window.
pub fn enumerate(s: &PrimeSet, t: &PrimeSet, window: &SearchWindow, budget: &SearchBudget) -> Result<Dataset> {
    validate(s, t, window)?;
    window.check_budget(budget.max_window)?;
    let shard = enumerate_shard(s, t, window, 1..=window.x_max, budget)?;
    Ok(merge_shards(s, t, window, [shard]))
}
