use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::element::{check_field, QuadInt};
use crate::error::{domain, Result};
use crate::num::{abs_big, ln_big};

/// The fundamental unit of the maximal order of `Q(sqrt(d))`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitInfo {
    pub d: u64,
    /// Smallest unit greater than one under `sqrt(d) > 0`.
    pub eta: QuadInt,
    /// `N(eta)`, either 1 or -1.
    pub norm: i32,
    pub log_eta: f64,
}

impl UnitInfo {
    /// `eta^-1 = N(eta) * sigma(eta)`.
    pub fn inverse(&self) -> QuadInt {
        let c = self.eta.conj();
        if self.norm < 0 {
            c.neg()
        } else {
            c
        }
    }

    /// `eta^m` for any integer `m`.
    pub fn power(&self, m: i64) -> QuadInt {
        let e = m.unsigned_abs() as u32;
        if m >= 0 {
            self.eta.pow(e)
        } else {
            self.inverse().pow(e)
        }
    }
}

/// Continued-fraction expansion of `theta = (P + sqrt(d)) / Q` where
/// `theta = sqrt(d)` for `d = 2, 3 (mod 4)` and `(1 + sqrt(d)) / 2` otherwise.
/// The first convergent `p/q` for which `p - q*sigma(theta)` has norm +-1
/// gives the fundamental unit.
pub fn fundamental_unit(d: u64) -> Result<UnitInfo> {
    check_field(d)?;
    let half = d % 4 == 1;
    let root = d.sqrt() as i128;
    let di = d as i128;
    let (mut pp, mut qq): (i128, i128) = if half { (1, 2) } else { (0, 1) };
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    loop {
        let a = floor_surd(pp, qq, root);
        let p_next = &p_cur * a + &p_prev;
        let q_next = &q_cur * a + &q_prev;
        p_prev = core::mem::replace(&mut p_cur, p_next);
        q_prev = core::mem::replace(&mut q_cur, q_next);

        let eta = if half {
            QuadInt::reduced(d, &p_cur * 2 - &q_cur, q_cur.clone(), 2)
        } else {
            QuadInt::reduced(d, p_cur.clone(), q_cur.clone(), 1)
        };
        let n = eta.norm();
        if n.abs().is_one() {
            let log_eta = eta.ln_abs()?;
            return Ok(UnitInfo { d, eta, norm: n.to_i32().unwrap_or(1), log_eta });
        }

        let p_new = a * qq - pp;
        qq = (di - p_new * p_new) / qq;
        pp = p_new;
    }
}

/// `floor((p + sqrt(d)) / q)` for `q != 0`, with `root = floor(sqrt(d))`.
fn floor_surd(p: i128, q: i128, root: i128) -> i128 {
    if q > 0 {
        (p + root).div_euclid(q)
    } else {
        (-p - root - 1).div_euclid(-q)
    }
}

/// Writes `alpha = delta * eta^m` with `N^(1/2) eta^(-1/2) < |delta| <=
/// N^(1/2) eta^(1/2)` where `N = |N(alpha)|`; hence
/// `h(delta) <= (log N + log eta) / 2`.
pub fn reduce_height(alpha: &QuadInt) -> Result<(i64, QuadInt)> {
    let unit = fundamental_unit(alpha.d())?;
    reduce_height_with(alpha, &unit)
}

pub fn reduce_height_with(alpha: &QuadInt, unit: &UnitInfo) -> Result<(i64, QuadInt)> {
    if alpha.is_zero() {
        return Err(domain("reduce_height: alpha must be nonzero"));
    }
    if unit.d != alpha.d() {
        return Err(domain("reduce_height: unit from another field"));
    }
    let n = abs_big(&alpha.norm());
    let guess = (alpha.ln_abs()? - 0.5 * ln_big(&n)) / unit.log_eta;
    let mut m = libm::round(guess) as i64;
    let mut delta = alpha.mul_same(&unit.power(-m));

    // The window test is exact: N / eta < delta^2 <= N * eta, evaluated as
    // signs of elements of the order.
    let n_elem = QuadInt::reduced(alpha.d(), BigInt::from(n), BigInt::zero(), 1);
    let upper = n_elem.mul_same(&unit.eta);
    let eta_inv = unit.inverse();
    for _ in 0..64 {
        let sq = delta.mul_same(&delta);
        if upper.try_sub(&sq)?.signum() == Ordering::Less {
            delta = delta.mul_same(&eta_inv);
            m += 1;
        } else if sq.mul_same(&unit.eta).try_sub(&n_elem)?.signum() != Ordering::Greater {
            delta = delta.mul_same(&unit.eta);
            m -= 1;
        } else {
            return Ok((m, delta));
        }
    }
    Err(domain("reduce_height: window search did not converge"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(d: u64, u: i64, v: i64, den: u8) -> QuadInt {
        QuadInt::new(d, u, v, den).unwrap()
    }

    #[test]
    fn unit_examples() {
        let u = fundamental_unit(2).unwrap();
        assert_eq!((u.eta, u.norm), (q(2, 1, 1, 1), -1));
        let u = fundamental_unit(5).unwrap();
        assert_eq!((u.eta, u.norm), (q(5, 1, 1, 2), -1));
        let u = fundamental_unit(3).unwrap();
        assert_eq!((u.eta, u.norm), (q(3, 2, 1, 1), 1));
        let u = fundamental_unit(13).unwrap();
        assert_eq!(u.eta, q(13, 3, 1, 2));
        let u = fundamental_unit(94).unwrap();
        assert_eq!(u.eta, q(94, 2_143_295, 221_064, 1));
        assert!(fundamental_unit(12).is_err());
        assert!(fundamental_unit(1).is_err());
    }

    #[test]
    fn conjugate_is_inverse_up_to_sign() {
        for d in [2u64, 3, 5, 6, 7, 13, 21, 61] {
            let u = fundamental_unit(d).unwrap();
            let prod = u.eta.mul_same(&u.eta.conj());
            assert_eq!(prod.norm().abs(), BigInt::one());
            assert!(prod.is_rational());
            assert_eq!(u.eta.mul_same(&u.inverse()), q(d, 1, 0, 1));
        }
    }

    #[test]
    fn reduce_examples() {
        let (m, delta) = reduce_height(&q(2, 123, 87, 1)).unwrap();
        assert_eq!((m, delta.clone()), (5, q(2, 3, 0, 1)));
        assert!((delta.weil_height().unwrap() - libm::log(3.0)).abs() < 1e-12);

        let (m, delta) = reduce_height(&q(2, 3, 0, 1)).unwrap();
        assert_eq!((m, delta), (0, q(2, 3, 0, 1)));

        let u = fundamental_unit(7).unwrap();
        let (_, delta) = reduce_height(&u.eta).unwrap();
        assert!(delta.weil_height().unwrap() <= 0.5 * u.log_eta + 1e-12);
        assert!(reduce_height(&q(2, 0, 0, 1)).is_err());
    }

    #[test]
    fn reduce_negative_powers() {
        let u = fundamental_unit(5).unwrap();
        let base = q(5, 7, 3, 2);
        let alpha = base.mul_same(&u.power(-17));
        let (m, delta) = reduce_height_with(&alpha, &u).unwrap();
        assert_eq!(delta.mul_same(&u.power(m)), alpha);
        let bound = 0.5 * ln_big(&abs_big(&alpha.norm())) + 0.5 * u.log_eta;
        assert!(delta.weil_height().unwrap() <= bound + 1e-9);
    }
}
