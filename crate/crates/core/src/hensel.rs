//! Modular square roots, Hensel lifting and the extremal families: tuples
//! `(x, a)` for which `p^k | x^2 - N`, so that the `{p}`-part of the
//! difference is about its square root.

use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{is_coprime_to_set, is_prime_u64, s_part, ExponentVector, PrimeSet};
use crate::error::{domain, Error, Result};
use crate::num::{big_pow, ln_big, mod_floor_u64, mod_inverse, mul_mod, pow_mod};

/// All `r` in `[0, p)` with `r^2 = n (mod p)`, ascending.
pub fn sqrt_mod_p(n: &BigInt, p: u64) -> Result<Vec<u64>> {
    if p == 2 || !is_prime_u64(p) {
        return Err(domain(alloc::format!("sqrt_mod_p: {p} is not an odd prime")));
    }
    let a = mod_floor_u64(n, p);
    if a == 0 {
        return Ok(alloc::vec![0]);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return Ok(Vec::new());
    }
    let r = tonelli_shanks(a, p);
    let mut roots = alloc::vec![r, p - r];
    roots.sort_unstable();
    Ok(roots)
}

fn tonelli_shanks(a: u64, p: u64) -> u64 {
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1).unwrap_or(2);
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Lifts a simple root `r` of `X^2 + bX + c` modulo `p` to the unique root
/// modulo `p^k` congruent to it.
pub fn lift_quadratic_root(b: &BigInt, c: &BigInt, p: u64, r: &BigInt, k: u32) -> Result<BigUint> {
    if k == 0 {
        return Err(domain("lifting exponent must be at least 1"));
    }
    let f = |y: &BigInt| y * y + b * y + c;
    let pb = BigInt::from(p);
    if !f(r).mod_floor(&pb).is_zero() {
        return Err(Error::Lifting(alloc::format!("{r} is not a root modulo {p}")));
    }
    let deriv = BigInt::from(2) * r + b;
    if deriv.mod_floor(&pb).is_zero() {
        return Err(Error::Lifting(alloc::format!(
            "derivative vanishes modulo {p} at {r}"
        )));
    }
    let target = BigInt::from(big_pow(p, k));
    let mut y = r.mod_floor(&pb);
    let mut prec = 1u32;
    while prec < k {
        prec = (prec * 2).min(k);
        let m = BigInt::from(big_pow(p, prec));
        let d = (BigInt::from(2) * &y + b).mod_floor(&m);
        // d is a unit because it agrees with the derivative at r modulo p.
        let inv = mod_inverse(&d, &m).ok_or_else(|| Error::Lifting("non-invertible derivative".into()))?;
        y = (&y - f(&y) * inv).mod_floor(&m);
    }
    Ok(y.mod_floor(&target).magnitude().clone())
}

/// The root of `Y^2 = n` modulo `p^k` lifted from `r`.
pub fn hensel_lift(n: &BigInt, p: u64, r: u64, k: u32) -> Result<BigUint> {
    if p == 2 || !is_prime_u64(p) {
        return Err(domain(alloc::format!("hensel_lift: {p} is not an odd prime")));
    }
    lift_quadratic_root(&BigInt::zero(), &(-n), p, &BigInt::from(r), k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalWitness {
    pub a: ExponentVector,
    pub p: u64,
    /// Lifting exponent actually used, at least the one requested.
    pub k: u32,
    pub x: BigUint,
    pub n_value: BigUint,
    /// `x^2 - N`.
    pub delta: BigInt,
    /// `p^{v_p(delta)}`.
    pub spart_value: BigUint,
    /// `log(spart_value) / log|delta|`.
    pub ratio: f64,
}

impl ExtremalWitness {
    pub fn t_set(&self) -> &PrimeSet {
        self.a.base()
    }
}

/// How many times `k` may be raised when neither lift is usable.
const MAX_RAISE: u32 = 8;

/// Builds `x` in `(0, p^k)` with `x^2 = N (mod p^k)`, `x^2 != N` and `x`
/// coprime to T, where `N = value(a)`.
///
/// Of the two lifts the one with the larger `v_p(x^2 - N)` wins, ties going
/// to the smaller `x`. If neither lift qualifies `k` is raised.
pub fn construct_extremal(a: &ExponentVector, p: u64, k: u32) -> Result<ExtremalWitness> {
    if p == 2 {
        return Err(domain("construct_extremal: p = 2 is unsupported"));
    }
    if !is_prime_u64(p) {
        return Err(domain(alloc::format!("construct_extremal: {p} is not prime")));
    }
    if a.base().contains(p) {
        return Err(domain(alloc::format!("construct_extremal: {p} lies in T")));
    }
    if k == 0 {
        return Err(domain("construct_extremal: k must be at least 1"));
    }
    let n_value = a.value();
    let n = BigInt::from(n_value.clone());
    let roots = sqrt_mod_p(&n, p)?;
    let Some(&r) = roots.first() else {
        return Err(Error::NoWitness(alloc::format!(
            "{n_value} is not a quadratic residue modulo {p}"
        )));
    };
    let s = PrimeSet::new([p])?;
    for kk in k..k + MAX_RAISE {
        let modulus = big_pow(p, kk);
        let y = hensel_lift(&n, p, r, kk)?;
        let other = &modulus - &y;
        let mut best: Option<(u32, BigUint, BigInt)> = None;
        for x in [y, other] {
            let xi = BigInt::from(x.clone());
            let delta = &xi * &xi - &n;
            if delta.is_zero() || !is_coprime_to_set(&xi, a.base()) {
                continue;
            }
            let v = s_part(&delta, &s)?.spart.exps()[0];
            let better = match &best {
                None => true,
                Some((bv, bx, _)) => v > *bv || (v == *bv && x < *bx),
            };
            if better {
                best = Some((v, x, delta));
            }
        }
        if let Some((v, x, delta)) = best {
            let spart_value = big_pow(p, v);
            let ratio = ln_big(&spart_value) / ln_big(delta.magnitude());
            return Ok(ExtremalWitness {
                a: a.clone(),
                p,
                k: kk,
                x,
                n_value,
                delta,
                spart_value,
                ratio,
            });
        }
    }
    Err(Error::NoWitness(alloc::format!(
        "no lift modulo {p}^{k}..{p}^{} avoids x^2 = N and stays coprime to T",
        k + MAX_RAISE - 1
    )))
}

/// Witnesses for each `k` in `ks`, with the reason for every skipped `k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WitnessFamily {
    pub witnesses: Vec<ExtremalWitness>,
    pub skipped: Vec<(u32, Error)>,
}

pub fn witness_family(a: &ExponentVector, p: u64, ks: Range<u32>) -> WitnessFamily {
    let mut fam = WitnessFamily::default();
    for k in ks {
        match construct_extremal(a, p, k) {
            Ok(w) => fam.witnesses.push(w),
            Err(e) => fam.skipped.push((k, e)),
        }
    }
    fam
}

/// Smallest odd prime `p >= from`, outside T and not dividing `N`, modulo
/// which `N` is a square.
pub fn find_witness_prime(a: &ExponentVector, from: u64) -> Option<u64> {
    let n = BigInt::from(a.value());
    (from.max(3)..)
        .take(1 << 20)
        .filter(|&p| is_prime_u64(p) && !a.base().contains(p))
        .find(|&p| mod_floor_u64(&n, p) != 0 && matches!(sqrt_mod_p(&n, p), Ok(r) if !r.is_empty()))
}
