//! Budgeted complete factorization: trial division, then Brent's variant of
//! Pollard rho, with every prime certified by [`super::prime`].

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::prime::{is_prime_u64, primality, Primality};
use crate::error::{domain, Error, Result};
use crate::num::{abs_big, exact_sqrt, mul_mod};

/// Effort allowed for a single call to [`factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division covers every divisor up to this bound.
    pub trial_bound: u64,
    /// Total Pollard-rho iterations across all splits.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_bound: 1 << 12,
            rho_iterations: 1 << 20,
        }
    }
}

/// Complete factorization of `|n|` as ascending `(prime, exponent)` pairs.
///
/// Fails with [`Error::IncompleteFactorization`] when a composite survives
/// the budget or a probable prime lies above the certified primality range.
pub fn factorize(n: &BigInt, budget: &FactorBudget) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(domain("factorize: n must be nonzero"));
    }
    let mut primes: Vec<BigUint> = Vec::new();
    let rest = trial_divide(abs_big(n), budget.trial_bound, &mut primes);

    // Every factor of `rest` now exceeds the trial bound, so anything below
    // its square is prime.
    let small_prime_limit = BigUint::from(budget.trial_bound.saturating_add(1)).pow(2);
    let mut rho_left = budget.rho_iterations;
    let mut stack = Vec::new();
    if !rest.is_one() {
        stack.push(rest);
    }
    while let Some(m) = stack.pop() {
        if m < small_prime_limit {
            primes.push(m);
            continue;
        }
        match primality(&m) {
            Primality::Prime => primes.push(m),
            Primality::Uncertified => {
                return Err(Error::IncompleteFactorization {
                    cofactor: alloc::format!("{m}"),
                })
            }
            Primality::Composite => {
                if let Some(r) = exact_sqrt(&m) {
                    stack.push(r.clone());
                    stack.push(r);
                    continue;
                }
                match split(&m, &mut rho_left) {
                    Some(f) => {
                        let g = &m / &f;
                        stack.push(f);
                        stack.push(g);
                    }
                    None => {
                        return Err(Error::IncompleteFactorization {
                            cofactor: alloc::format!("{m}"),
                        })
                    }
                }
            }
        }
    }

    primes.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// Divides out every prime up to `bound`, in machine words once `m` fits.
fn trial_divide(mut rest: BigUint, bound: u64, primes: &mut Vec<BigUint>) -> BigUint {
    let mut d = 2u64;
    while d <= bound {
        if let Some(mut small) = rest.to_u128() {
            while d <= bound && (d as u128) * (d as u128) <= small {
                while small % d as u128 == 0 {
                    small /= d as u128;
                    primes.push(BigUint::from(d));
                }
                d += if d == 2 { 1 } else { 2 };
            }
            return BigUint::from(small);
        }
        if BigUint::from(d) * d > rest {
            break;
        }
        while (&rest % d).is_zero() {
            rest /= d;
            primes.push(BigUint::from(d));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    rest
}

/// A nontrivial factor of the composite `m`, or `None` once `budget` runs out.
fn split(m: &BigUint, budget: &mut u64) -> Option<BigUint> {
    if let Some(small) = m.to_u64() {
        return (1..64).find_map(|c| rho_u64(small, c, budget)).map(BigUint::from);
    }
    (1u32..64).find_map(|c| rho_big(m, c, budget))
}

const BATCH: u64 = 128;

fn rho_u64(n: u64, c: u64, budget: &mut u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    if *budget == 0 {
        return None;
    }
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let (mut x, mut ys);
    let mut g: u64;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        *budget = budget.saturating_sub(r);
        let mut k = 0;
        loop {
            ys = y;
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            *budget = budget.saturating_sub(steps);
            g = q.gcd(&n);
            k += steps;
            if k >= r || g > 1 {
                break;
            }
            if *budget == 0 {
                return None;
            }
        }
        r *= 2;
        if g > 1 || *budget == 0 {
            break;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g > 1 && g < n).then_some(g)
}

fn rho_big(n: &BigUint, c: u32, budget: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    if *budget == 0 {
        return None;
    }
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut q = BigUint::one();
    let mut r = 1u64;
    let mut g: BigUint;
    let mut x;
    let mut ys;
    loop {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        *budget = budget.saturating_sub(r);
        let mut k = 0;
        loop {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = (q * diff(&x, &y)) % n;
            }
            *budget = budget.saturating_sub(steps);
            g = q.gcd(n);
            k += steps;
            if k >= r || !g.is_one() {
                break;
            }
            if *budget == 0 {
                return None;
            }
        }
        r *= 2;
        if !g.is_one() || *budget == 0 {
            break;
        }
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (!g.is_one() && g != *n).then_some(g)
}

/// Whether `p` is a prime that fits a machine word.
pub(crate) fn is_word_prime(p: u64) -> bool {
    is_prime_u64(p)
}
