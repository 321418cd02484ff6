//! Small numeric helpers shared across modules: big-integer logarithms,
//! integer square roots and word-sized modular arithmetic.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Natural log of a positive big integer, relative error about 1e-16.
pub(crate) fn ln_big(n: &BigUint) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    if bits <= 63 {
        return ln(n.to_u64().unwrap_or(u64::MAX) as f64);
    }
    let shift = bits - 63;
    let top = (n >> shift).to_u64().unwrap_or(u64::MAX);
    ln(top as f64) + shift as f64 * LN_2
}

/// `ln(a + b * sqrt(d))` for nonnegative `a`, `b` not both zero. No
/// cancellation occurs, so the result inherits the accuracy of `ln_big`.
pub(crate) fn ln_sum_sqrt(a: &BigUint, b: &BigUint, d: u64) -> f64 {
    let bits = a.bits().max(b.bits());
    let shift = bits.saturating_sub(62);
    let a_f = (a >> shift).to_f64().unwrap_or(0.0);
    let b_f = (b >> shift).to_f64().unwrap_or(0.0);
    ln(a_f + b_f * libm::sqrt(d as f64)) + shift as f64 * LN_2
}

/// `Some(r)` when `n = r^2` exactly.
pub(crate) fn exact_sqrt(n: &BigUint) -> Option<BigUint> {
    // Quadratic residues mod 64 reject most non-squares cheaply.
    let low = n.iter_u64_digits().next().unwrap_or(0) & 63;
    if (0x0202_0212_0203_0213_u64 >> low) & 1 == 0 {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

pub(crate) fn exact_sqrt_signed(n: &BigInt) -> Option<BigUint> {
    match n.sign() {
        Sign::Minus => None,
        _ => exact_sqrt(n.magnitude()),
    }
}

/// Least nonnegative residue of `n` modulo `m > 0`.
pub(crate) fn mod_floor_u64(n: &BigInt, m: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(m));
    r.to_u64().unwrap_or(0)
}

/// Inverse of `a` modulo `m`, when it exists.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let ext = a.mod_floor(m).extended_gcd(m);
    if ext.gcd.is_one() {
        Some(ext.x.mod_floor(m))
    } else {
        None
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn big_pow(base: u64, exp: u32) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

pub(crate) fn abs_big(n: &BigInt) -> BigUint {
    n.abs().to_biguint().unwrap_or_default()
}
