//! Exhaustive desk-scale search over windows `0 < x <= x_max`,
//! `0 <= a_i <= exp_max_i`, and the measured quantities of each tuple.

mod enumerate;
mod solve;

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::{gpf_with_budget, s_part, ExponentVector, FactorBudget, Factorization, PrimeSet};
use crate::error::{domain, Error, Result};
use crate::hensel::ExtremalWitness;
use crate::num::ln_big;

pub use enumerate::{enumerate, enumerate_shard, merge_shards, Shard};
pub use solve::{
    fixed_rhs_exponent, solve_fixed_rhs, solve_sunit_rhs, SunitSolution,
};

/// Bounds of an exhaustive search. Tuples with `x^2 = N` are never records;
/// they are counted in [`SkipCounts`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchWindow {
    pub x_max: u64,
    /// One bound per prime of T.
    pub exp_max: Vec<u32>,
    pub require_coprime: bool,
}

impl SearchWindow {
    pub fn new(x_max: u64, exp_max: Vec<u32>) -> Self {
        SearchWindow { x_max, exp_max, require_coprime: true }
    }

    /// Same exponent bound for each of `t` primes.
    pub fn uniform(x_max: u64, exp_max: u32, t: usize) -> Self {
        SearchWindow::new(x_max, alloc::vec![exp_max; t])
    }

    /// Number of exponent vectors in the window.
    pub fn exponent_count(&self) -> u128 {
        self.exp_max
            .iter()
            .fold(1u128, |acc, &e| acc.saturating_mul(e as u128 + 1))
    }

    /// `x_max * prod(exp_max_i + 1)`.
    pub fn size(&self) -> u128 {
        self.exponent_count().saturating_mul(self.x_max as u128)
    }

    pub fn check_budget(&self, limit: u128) -> Result<()> {
        let size = self.size();
        if size > limit {
            return Err(Error::Budget { size, limit });
        }
        Ok(())
    }
}

/// Limits for one search call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_window: u128,
    pub factor: FactorBudget,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_window: 1_000_000_000, factor: FactorBudget::default() }
    }
}

/// One tuple `(x, a)` with nonzero difference `delta = x^2 - N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub x: BigUint,
    pub a: ExponentVector,
    pub n_value: BigUint,
    pub delta: BigInt,
    pub spart: Factorization,
    /// `P[delta]`; `None` when the factorization budget ran out.
    pub gpf: Option<BigUint>,
    /// `log [delta]_S / log |delta|`, defined for `|delta| >= 2`.
    pub ratio: Option<f64>,
}

impl SolutionRecord {
    /// Builds the record for `(x, a)`, or `None` when `x^2 = N`.
    pub fn build(x: BigUint, a: ExponentVector, s: &PrimeSet, budget: &FactorBudget) -> Result<Option<Self>> {
        let n_value = a.value();
        let delta = BigInt::from(&x * &x) - BigInt::from(n_value.clone());
        if delta.is_zero() {
            return Ok(None);
        }
        let spart = s_part(&delta, s)?;
        let gpf = match gpf_with_budget(&delta, budget) {
            Ok(g) => Some(g),
            Err(Error::IncompleteFactorization { .. }) => None,
            Err(e) => return Err(e),
        };
        let ratio = ratio_of(&spart.spart_value(), &delta);
        Ok(Some(SolutionRecord { x, a, n_value, delta, spart, gpf, ratio }))
    }

    pub fn spart_value(&self) -> BigUint {
        self.spart.spart_value()
    }

    pub fn one_minus_ratio(&self) -> Option<f64> {
        self.ratio.map(|r| 1.0 - r)
    }

    /// Sort key: `x`, then `a` lexicographically.
    pub fn key_cmp(&self, other: &Self) -> Ordering {
        self.x.cmp(&other.x).then_with(|| self.a.exps().cmp(other.a.exps()))
    }

    /// Recomputes `delta` and the S-part from `(x, a)` and compares.
    pub fn verify(&self, s: &PrimeSet) -> bool {
        let delta = BigInt::from(&self.x * &self.x) - BigInt::from(self.a.value());
        delta == self.delta
            && self.n_value == self.a.value()
            && matches!(s_part(&delta, s), Ok(f) if f == self.spart)
    }
}

pub(crate) fn ratio_of(spart_value: &BigUint, delta: &BigInt) -> Option<f64> {
    let mag = delta.magnitude();
    if *mag < BigUint::from(2u32) {
        return None;
    }
    if spart_value.is_one() {
        return Some(0.0);
    }
    Some(ln_big(spart_value) / ln_big(mag))
}

/// Where a dataset came from; serialized into file headers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Window(SearchWindow),
    HenselFamily { p: u64, k_min: u32, k_max: u32 },
    Imported,
}

/// Tuples seen by a search that did not become records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SkipCounts {
    pub zero_delta: u64,
    pub not_coprime: u64,
}

impl core::ops::AddAssign for SkipCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.zero_delta += rhs.zero_delta;
        self.not_coprime += rhs.not_coprime;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub s: PrimeSet,
    pub t: PrimeSet,
    pub origin: Origin,
    /// Sorted by `(x, a)`.
    pub records: Vec<SolutionRecord>,
    pub skipped: SkipCounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub records: usize,
    pub skipped: SkipCounts,
    pub max_ratio: Option<f64>,
    /// Index of the first record attaining `max_ratio`.
    pub argmax: Option<usize>,
    pub min_one_minus_ratio: Option<f64>,
    pub min_gpf: Option<BigUint>,
    pub gpf_unknown: usize,
    /// Records whose difference is exactly an S-unit.
    pub s_unit_records: usize,
}

impl Dataset {
    pub fn new(s: PrimeSet, t: PrimeSet, origin: Origin, mut records: Vec<SolutionRecord>, skipped: SkipCounts) -> Self {
        records.sort_by(SolutionRecord::key_cmp);
        Dataset { s, t, origin, records, skipped }
    }

    /// Records for a Hensel family; all witnesses must share `p` and T.
    pub fn from_witnesses(witnesses: &[ExtremalWitness], budget: &FactorBudget) -> Result<Self> {
        let first = witnesses.first().ok_or_else(|| Error::Empty("no witnesses".into()))?;
        let p = first.p;
        let t = first.t_set().clone();
        let s = PrimeSet::new([p])?;
        let mut records = Vec::with_capacity(witnesses.len());
        let (mut k_min, mut k_max) = (first.k, first.k);
        for w in witnesses {
            if w.p != p || *w.t_set() != t {
                return Err(domain("witnesses from different primes or sets T"));
            }
            k_min = k_min.min(w.k);
            k_max = k_max.max(w.k);
            if let Some(r) = SolutionRecord::build(w.x.clone(), w.a.clone(), &s, budget)? {
                records.push(r);
            }
        }
        Ok(Dataset::new(s, t, Origin::HenselFamily { p, k_min, k_max }, records, SkipCounts::default()))
    }

    pub fn summary(&self) -> Summary {
        let mut max_ratio: Option<f64> = None;
        let mut argmax = None;
        let mut min_gpf: Option<BigUint> = None;
        let mut gpf_unknown = 0;
        let mut s_unit_records = 0;
        for (i, r) in self.records.iter().enumerate() {
            if let Some(q) = r.ratio {
                if max_ratio.is_none_or(|m| q > m) {
                    max_ratio = Some(q);
                    argmax = Some(i);
                }
            }
            match &r.gpf {
                Some(g) => {
                    if min_gpf.as_ref().is_none_or(|m| g < m) {
                        min_gpf = Some(g.clone());
                    }
                }
                None => gpf_unknown += 1,
            }
            if r.spart.cofactor.is_one() {
                s_unit_records += 1;
            }
        }
        Summary {
            records: self.records.len(),
            skipped: self.skipped,
            max_ratio,
            argmax,
            min_one_minus_ratio: max_ratio.map(|m| 1.0 - m),
            min_gpf,
            gpf_unknown,
            s_unit_records,
        }
    }
}

/// Largest ratio among records with `|delta| >= min_abs_delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalExponent {
    pub max_ratio: f64,
    pub index: usize,
}

pub fn empirical_exponent(ds: &Dataset, min_abs_delta: &BigUint) -> Result<EmpiricalExponent> {
    if *min_abs_delta < BigUint::from(2u32) {
        return Err(domain("empirical_exponent: min_abs_delta must be at least 2"));
    }
    let mut best: Option<EmpiricalExponent> = None;
    for (index, r) in ds.records.iter().enumerate() {
        if r.delta.magnitude() < min_abs_delta {
            continue;
        }
        let Some(q) = r.ratio else { continue };
        if best.is_none_or(|b| q > b.max_ratio) {
            best = Some(EmpiricalExponent { max_ratio: q, index });
        }
    }
    best.ok_or_else(|| Error::Empty("no record with |delta| above the threshold".into()))
}
