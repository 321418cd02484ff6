use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use super::enumerate::{exponent_vectors, validate};
use super::{SearchBudget, SearchWindow};
use crate::arith::{is_coprime_to_set, ExponentVector, PrimeSet};
use crate::error::{domain, Error, Result};
use crate::num::{exact_sqrt, exact_sqrt_signed, ln_big};

/// All `(x, a)` with `x^2 - N = m`, `0 < x <= x_max` and `a_i <= exp_max_i`.
///
/// Walks exponent vectors depth-first and tests `N + m` for squareness, so
/// the answer is complete for the window. A branch is cut once its partial
/// product already exceeds `x_max^2 - m`.
pub fn solve_fixed_rhs(
    t: &PrimeSet,
    m: &BigInt,
    x_max: u64,
    exp_max: &[u32],
    budget: &SearchBudget,
) -> Result<Vec<(BigUint, ExponentVector)>> {
    if m.is_zero() {
        return Err(domain("solve_fixed_rhs: m must be nonzero"));
    }
    let window = SearchWindow::new(x_max, exp_max.to_vec());
    validate(&PrimeSet::empty(), t, &window)?;
    let count = window.exponent_count();
    if count > budget.max_window {
        return Err(Error::Budget { size: count, limit: budget.max_window });
    }
    let x_max_sq = BigInt::from(x_max) * BigInt::from(x_max);
    let cap = &x_max_sq - m;
    let mut out = Vec::new();
    let mut exps = alloc::vec![0u32; t.len()];
    fixed_rhs_dfs(t, m, exp_max, &cap, 0, BigInt::one(), &mut exps, &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.exps().cmp(b.1.exps())));
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn fixed_rhs_dfs(
    t: &PrimeSet,
    m: &BigInt,
    exp_max: &[u32],
    cap: &BigInt,
    depth: usize,
    partial: BigInt,
    exps: &mut Vec<u32>,
    out: &mut Vec<(BigUint, ExponentVector)>,
) {
    if depth == exps.len() {
        if let Some(x) = exact_sqrt_signed(&(&partial + m)) {
            if !x.is_zero() {
                out.push((x, ExponentVector::new(t.clone(), exps.clone()).expect("length matches")));
            }
        }
        return;
    }
    let q = t.primes()[depth];
    let mut value = partial;
    for e in 0..=exp_max[depth] {
        if value > *cap {
            break;
        }
        exps[depth] = e;
        fixed_rhs_dfs(t, m, exp_max, cap, depth + 1, value.clone(), exps, out);
        value *= q;
    }
    exps[depth] = 0;
}

/// `max log x / log|2m|` over the solutions: the smallest `c` with
/// `x <= |2m|^c` for all of them. `None` without solutions.
pub fn fixed_rhs_exponent(solutions: &[(BigUint, ExponentVector)], m: &BigInt) -> Option<f64> {
    let two_m = (m * BigInt::from(2)).abs().to_biguint()?;
    let denom = ln_big(&two_m);
    solutions
        .iter()
        .map(|(x, _)| if x.is_one() { 0.0 } else { ln_big(x) / denom })
        .reduce(f64::max)
}

/// A solution of `x^2 - N = sign * U` with `U` an S-unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SunitSolution {
    pub x: BigUint,
    pub a: ExponentVector,
    pub u: ExponentVector,
    pub sign: i32,
}

/// All window solutions of `x^2 - N = +-U` with `U` a positive S-unit.
///
/// For each `N` it runs over the S-units `U <= max(x_max^2 - N, N - 1)` and
/// tests `N + U` and `N - U` for squareness.
pub fn solve_sunit_rhs(
    s: &PrimeSet,
    t: &PrimeSet,
    window: &SearchWindow,
    budget: &SearchBudget,
) -> Result<Vec<SunitSolution>> {
    validate(s, t, window)?;
    window.check_budget(budget.max_window)?;
    let vectors = exponent_vectors(t, &window.exp_max);
    let x_max = BigUint::from(window.x_max);
    let x_max_sq = &x_max * &x_max;

    let largest_n = vectors.iter().map(ExponentVector::value).max().unwrap_or_else(BigUint::one);
    let unit_cap = if largest_n > x_max_sq { &largest_n - 1u32 } else { &x_max_sq - 1u32 };
    let units = s_units_up_to(s, &unit_cap);

    let mut out = Vec::new();
    for a in vectors {
        let n = a.value();
        for (u_value, u_exps) in &units {
            let plus_ok = &n + u_value <= x_max_sq;
            let minus_ok = u_value < &n;
            if !plus_ok && !minus_ok {
                break;
            }
            let mut candidates = [(1, None), (-1, None)];
            if plus_ok {
                candidates[0].1 = exact_sqrt(&(&n + u_value));
            }
            if minus_ok {
                candidates[1].1 = exact_sqrt(&(&n - u_value));
            }
            for (sign, x) in candidates {
                let Some(x) = x else { continue };
                if x.is_zero() || x > x_max {
                    continue;
                }
                if window.require_coprime && !is_coprime_to_set(&BigInt::from(x.clone()), t) {
                    continue;
                }
                out.push(SunitSolution {
                    x,
                    a: a.clone(),
                    u: ExponentVector::new(s.clone(), u_exps.clone())?,
                    sign,
                });
            }
        }
    }
    out.sort_by(|p, q| {
        p.x.cmp(&q.x)
            .then_with(|| p.a.exps().cmp(q.a.exps()))
            .then_with(|| p.sign.cmp(&q.sign))
            .then_with(|| p.u.exps().cmp(q.u.exps()))
    });
    Ok(out)
}

/// S-units `<= cap` in ascending order with their exponents.
fn s_units_up_to(s: &PrimeSet, cap: &BigUint) -> Vec<(BigUint, Vec<u32>)> {
    let mut out = Vec::new();
    let mut exps = alloc::vec![0u32; s.len()];
    units_dfs(s.primes(), cap, 0, BigUint::one(), &mut exps, &mut out);
    out.sort();
    out
}

fn units_dfs(
    primes: &[u64],
    cap: &BigUint,
    depth: usize,
    value: BigUint,
    exps: &mut Vec<u32>,
    out: &mut Vec<(BigUint, Vec<u32>)>,
) {
    if depth == primes.len() {
        out.push((value, exps.clone()));
        return;
    }
    let mut v = value;
    let mut e = 0;
    while v <= *cap {
        exps[depth] = e;
        units_dfs(primes, cap, depth + 1, v.clone(), exps, out);
        v *= primes[depth];
        e += 1;
    }
    exps[depth] = 0;
}
