//! Rational decompositions of `N = prod q_i^{a_i}`: the squarefree/square
//! split `N = Q1 * Q2^2` and the S-factorizations of `x - Q2` and `x + Q2`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{s_part, ExponentVector, Factorization, PrimeSet};
use crate::error::{domain, Result};
use crate::num::big_pow;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityDecomposition {
    pub a: ExponentVector,
    /// Product of the primes with odd exponent.
    pub q1: BigUint,
    /// `sqrt(N / Q1)`.
    pub q2: BigUint,
}

pub fn parity_decompose(a: &ExponentVector) -> ParityDecomposition {
    let mut q1 = BigUint::one();
    let mut q2 = BigUint::one();
    for (q, e) in a.iter() {
        if e % 2 == 1 {
            q1 *= q;
        }
        if e >= 2 {
            q2 *= big_pow(q, e / 2);
        }
    }
    ParityDecomposition { a: a.clone(), q1, q2 }
}

/// `prod q_i^{floor(a_i / 2)}`.
pub fn floor_half_radical(a: &ExponentVector) -> BigUint {
    a.iter()
        .filter(|&(_, e)| e >= 2)
        .fold(BigUint::one(), |acc, (q, e)| acc * big_pow(q, e / 2))
}

/// S-factorizations of `x - Q2` and `x + Q2` together with their gcd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprimeSplit {
    pub x: BigUint,
    pub q2: BigUint,
    pub minus: Factorization,
    pub plus: Factorization,
    pub g: BigUint,
}

impl CoprimeSplit {
    /// `x^2 - Q2^2` rebuilt from the two factorizations.
    pub fn product(&self) -> BigInt {
        let side = |f: &Factorization| BigInt::from(f.spart_value() * &f.cofactor) * f.sign();
        side(&self.minus) * side(&self.plus)
    }
}

pub fn coprime_split(x: &BigUint, q2: &BigUint, set: &PrimeSet) -> Result<CoprimeSplit> {
    if x.is_zero() || q2.is_zero() {
        return Err(domain("coprime_split: x and Q2 must be positive"));
    }
    if x == q2 {
        return Err(domain("coprime_split: x = Q2 gives a zero difference"));
    }
    let xi = BigInt::from(x.clone());
    let qi = BigInt::from(q2.clone());
    let lo = &xi - &qi;
    let hi = &xi + &qi;
    let g = lo.gcd(&hi).magnitude().clone();
    Ok(CoprimeSplit {
        x: x.clone(),
        q2: q2.clone(),
        minus: s_part(&lo, set)?,
        plus: s_part(&hi, set)?,
        g,
    })
}
