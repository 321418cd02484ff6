//! Prime sets, exponent vectors, S-parts and factorization.

mod factor;
mod prime;

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::num::{abs_big, big_pow};

pub use factor::{factorize, FactorBudget};
pub use prime::{is_prime_u64, primality, Primality};

/// An ordered set of distinct primes, e.g. `S = {p_1, ..., p_s}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PrimeSet {
    primes: Vec<u64>,
}

impl PrimeSet {
    /// Sorts `primes` and rejects duplicates or non-primes.
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut primes: Vec<u64> = primes.into_iter().collect();
        primes.sort_unstable();
        for w in primes.windows(2) {
            if w[0] == w[1] {
                return Err(domain(alloc::format!("prime {} listed twice", w[0])));
            }
        }
        if let Some(&bad) = primes.iter().find(|&&p| !factor::is_word_prime(p)) {
            return Err(domain(alloc::format!("{bad} is not prime")));
        }
        Ok(PrimeSet { primes })
    }

    pub fn empty() -> Self {
        PrimeSet::default()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.primes.last().copied()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn is_disjoint(&self, other: &PrimeSet) -> bool {
        !self.primes.iter().any(|&p| other.contains(p))
    }

    /// Errors unless the two sets are disjoint.
    pub fn ensure_disjoint(&self, other: &PrimeSet) -> Result<()> {
        match self.primes.iter().find(|&&p| other.contains(p)) {
            Some(p) => Err(domain(alloc::format!("prime {p} lies in both S and T"))),
            None => Ok(()),
        }
    }

    pub fn product(&self) -> BigUint {
        self.primes.iter().fold(BigUint::one(), |acc, &p| acc * p)
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.primes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// Nonnegative exponents over a [`PrimeSet`], standing for `prod p_i^{e_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    base: PrimeSet,
    exps: Vec<u32>,
}

impl ExponentVector {
    pub fn new(base: PrimeSet, exps: Vec<u32>) -> Result<Self> {
        if base.len() != exps.len() {
            return Err(domain(alloc::format!(
                "{} exponents given for {} primes",
                exps.len(),
                base.len()
            )));
        }
        Ok(ExponentVector { base, exps })
    }

    pub fn zero(base: PrimeSet) -> Self {
        let exps = alloc::vec![0; base.len()];
        ExponentVector { base, exps }
    }

    pub fn base(&self) -> &PrimeSet {
        &self.base
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn value(&self) -> BigUint {
        self.base
            .primes
            .iter()
            .zip(&self.exps)
            .filter(|(_, &e)| e > 0)
            .fold(BigUint::one(), |acc, (&p, &e)| acc * big_pow(p, e))
    }

    /// `max(e_1, ..., e_k)`, zero when empty.
    pub fn max_exponent(&self) -> u32 {
        self.exps.iter().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.base.primes.iter().copied().zip(self.exps.iter().copied())
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, e) in self.iter().filter(|&(_, e)| e > 0) {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// The split `n = sign * [n]_S * b` with `b > 0` coprime to every prime of S.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: BigInt,
    pub negative: bool,
    pub spart: ExponentVector,
    pub cofactor: BigUint,
}

impl Factorization {
    pub fn sign(&self) -> i32 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn spart_value(&self) -> BigUint {
        self.spart.value()
    }
}

/// `[n]_S` and its cofactor. Only divides out primes of S, so `n` may be
/// arbitrarily large.
pub fn s_part(n: &BigInt, set: &PrimeSet) -> Result<Factorization> {
    if n.is_zero() {
        return Err(domain("s_part: n must be nonzero"));
    }
    let negative = n.sign() == num_bigint::Sign::Minus;
    let mag = abs_big(n);
    let (exps, cofactor) = match mag.to_u128() {
        Some(small) => {
            let (exps, rest) = strip_u128(small, set.primes());
            (exps, BigUint::from(rest))
        }
        None => strip_big(mag, set.primes()),
    };
    Ok(Factorization {
        n: n.clone(),
        negative,
        spart: ExponentVector { base: set.clone(), exps },
        cofactor,
    })
}

fn strip_u128(mut m: u128, primes: &[u64]) -> (Vec<u32>, u128) {
    let exps = primes
        .iter()
        .map(|&p| {
            let p = p as u128;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            e
        })
        .collect();
    (exps, m)
}

fn strip_big(mut m: BigUint, primes: &[u64]) -> (Vec<u32>, BigUint) {
    let mut exps = Vec::with_capacity(primes.len());
    for &p in primes {
        let mut e = 0;
        while (&m % p).is_zero() {
            m /= p;
            e += 1;
            if let Some(small) = m.to_u128() {
                let (rest_e, rest) = strip_u128(small, &[p]);
                e += rest_e[0];
                m = BigUint::from(rest);
                break;
            }
        }
        exps.push(e);
    }
    (exps, m)
}

/// Largest `e` with `p^e | n`.
pub fn valuation(n: &BigInt, p: u64) -> Result<u32> {
    if n.is_zero() {
        return Err(domain("valuation: n must be nonzero"));
    }
    if !is_prime_u64(p) {
        return Err(domain(alloc::format!("valuation: {p} is not prime")));
    }
    let set = PrimeSet { primes: alloc::vec![p] };
    Ok(s_part(n, &set)?.spart.exps[0])
}

/// Greatest prime factor of `|n|`, with `P[+-1] = 1`.
pub fn gpf(n: &BigInt) -> Result<BigUint> {
    gpf_with_budget(n, &FactorBudget::default())
}

pub fn gpf_with_budget(n: &BigInt, budget: &FactorBudget) -> Result<BigUint> {
    let f = factorize(n, budget)?;
    Ok(f.into_iter().last().map(|(p, _)| p).unwrap_or_else(BigUint::one))
}

/// `gcd(x, prod q) = 1`. Zero is coprime to the empty set only.
pub fn is_coprime_to_set(x: &BigInt, set: &PrimeSet) -> bool {
    if x.is_zero() {
        return set.is_empty();
    }
    let mag = abs_big(x);
    set.primes.iter().all(|&q| !(&mag % q).is_zero())
}
