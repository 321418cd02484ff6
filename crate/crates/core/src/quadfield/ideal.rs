use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::element::{check_field, QuadInt};
use crate::arith::{is_prime_u64, valuation};
use crate::error::{domain, Result};
use crate::hensel::{lift_quadratic_root, sqrt_mod_p};
use crate::num::{big_pow, pow_mod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSplitting {
    pub d: u64,
    pub p: u64,
    pub kind: SplitKind,
    /// Square roots of `d` modulo `p`, ascending (empty when inert).
    pub roots: Vec<u64>,
}

/// Decomposition type of `p` in `Q(sqrt(d))`, read off the field
/// discriminant (`d` or `4d`).
pub fn splitting_type(d: u64, p: u64) -> Result<PrimeSplitting> {
    check_field(d)?;
    if !is_prime_u64(p) {
        return Err(domain(alloc::format!("{p} is not prime")));
    }
    let disc_odd = d % 4 == 1;
    let (kind, roots) = if p == 2 {
        let roots = alloc::vec![d % 2];
        if !disc_odd {
            (SplitKind::Ramified, roots)
        } else if d % 8 == 1 {
            (SplitKind::Split, roots)
        } else {
            (SplitKind::Inert, Vec::new())
        }
    } else if d.is_multiple_of(p) {
        (SplitKind::Ramified, alloc::vec![0])
    } else if pow_mod(d % p, (p - 1) / 2, p) == 1 {
        (SplitKind::Split, sqrt_mod_p(&BigInt::from(d), p)?)
    } else {
        (SplitKind::Inert, Vec::new())
    };
    Ok(PrimeSplitting { d, p, kind, roots })
}

/// A prime ideal above `p`. Split primes carry the residue of `sqrt(d)` that
/// the ideal reduces to: modulo `p` for odd `p`, modulo 4 for `p = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdealTag {
    Inert,
    Ramified,
    Split { root: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdealValuation {
    pub p: u64,
    pub tag: IdealTag,
    /// Ramification index.
    pub e: u32,
    /// Residue degree.
    pub f: u32,
    /// Exponent of the ideal in `(alpha)`.
    pub v: u32,
}

impl IdealValuation {
    /// `v / e`, the valuation normalized so that `v_p(p) = 1`.
    pub fn normalized(&self) -> f64 {
        self.v as f64 / self.e as f64
    }
}

/// Valuations of `alpha` at each prime ideal above `p`.
pub fn quad_valuation(alpha: &QuadInt, p: u64) -> Result<Vec<IdealValuation>> {
    if alpha.is_zero() {
        return Err(domain("quad_valuation: alpha must be nonzero"));
    }
    let d = alpha.d();
    let split = splitting_type(d, p)?;
    let vn = valuation(&alpha.norm(), p)?;
    let one = |tag, e, f, v| alloc::vec![IdealValuation { p, tag, e, f, v }];
    match split.kind {
        SplitKind::Inert => Ok(one(IdealTag::Inert, 1, 2, vn / 2)),
        SplitKind::Ramified => Ok(one(IdealTag::Ramified, 2, 1, vn)),
        SplitKind::Split => split_valuations(alpha, p, vn),
    }
}

/// Embeds `alpha = A + B*omega` into `Z_p` at each root of the minimal
/// polynomial of `omega`, lifted to precision `v_p(N(alpha)) + 1`; the two
/// valuations sum to `v_p(N(alpha))`, so that precision always suffices.
fn split_valuations(alpha: &QuadInt, p: u64, vn: u32) -> Result<Vec<IdealValuation>> {
    let d = alpha.d();
    let half = d % 4 == 1;
    let (u, v) = (alpha.u(), alpha.v());
    // omega = (1 + sqrt d)/2 with X^2 - X - (d-1)/4, or sqrt d with X^2 - d.
    let (a_coef, b_coef, lin, cst) = if half {
        let (a, b) = if alpha.den() == 2 { ((u - v) / 2, v.clone()) } else { (u - v, v * 2) };
        (a, b, BigInt::from(-1), -BigInt::from((d - 1) / 4))
    } else {
        (u.clone(), v.clone(), BigInt::zero(), -BigInt::from(d))
    };

    let omega_roots: Vec<u64> = if p == 2 {
        alloc::vec![0, 1]
    } else {
        let inv2 = p.div_ceil(2);
        sqrt_mod_p(&BigInt::from(d), p)?
            .into_iter()
            .map(|s| if half { ((1 + s) % p) * inv2 % p } else { s })
            .collect()
    };

    let k = vn + 1;
    let modulus = BigInt::from(big_pow(p, k));
    let mut out = Vec::with_capacity(2);
    for r in omega_roots {
        let rho = BigInt::from(lift_quadratic_root(&lin, &cst, p, &BigInt::from(r), k)?);
        let image = (&a_coef + &b_coef * &rho).mod_floor(&modulus);
        let v_here = if image.is_zero() { k } else { valuation(&image, p)? };
        let root = match (p, half) {
            (2, _) => (2 * r + 3) % 4,
            (_, true) => (2 * r + p - 1) % p,
            _ => r,
        };
        out.push(IdealValuation { p, tag: IdealTag::Split { root }, e: 1, f: 1, v: v_here });
    }
    out.sort_by_key(|iv| match iv.tag {
        IdealTag::Split { root } => root,
        _ => 0,
    });
    debug_assert_eq!(out.iter().map(|iv| iv.v).sum::<u32>(), vn);
    Ok(out)
}
