//! Deterministic Miller-Rabin.
//!
//! Below 2^64 the first twelve primes as bases are a proof of primality;
//! with the first thirteen the proof extends to 3.317e24. Above that bound a
//! number that passes every round is reported as [`Primality::Uncertified`].

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::num::{mul_mod, pow_mod};

const BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// psi_13: the smallest strong pseudoprime to all of `BASES`.
const CERTIFIED_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Prime,
    Composite,
    /// Passed every round but lies above the range where the test is a proof.
    Uncertified,
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &BASES[..12] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES[..12] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

pub fn primality(n: &BigUint) -> Primality {
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    for &p in &BASES {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'bases: for &a in &BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return Primality::Composite;
    }
    match n.to_u128() {
        Some(v) if v < CERTIFIED_BOUND => Primality::Prime,
        _ => Primality::Uncertified,
    }
}
