use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{domain, Result};
use crate::num::{abs_big, ln_big, ln_sum_sqrt};

/// `(u + v*sqrt(d)) / den` in the maximal order of `Q(sqrt(d))`.
///
/// `den = 2` only when `d = 1 (mod 4)` and `u = v (mod 2)`; elements are
/// kept in lowest terms so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    d: u64,
    u: BigInt,
    v: BigInt,
    den: u8,
}

pub fn is_squarefree(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

pub(crate) fn check_field(d: u64) -> Result<()> {
    if d < 2 || !is_squarefree(d) {
        return Err(domain(alloc::format!("{d} is not a squarefree integer >= 2")));
    }
    Ok(())
}

impl QuadInt {
    pub fn new(d: u64, u: impl Into<BigInt>, v: impl Into<BigInt>, den: u8) -> Result<Self> {
        check_field(d)?;
        let (u, v) = (u.into(), v.into());
        match den {
            1 => {}
            2 => {
                if d % 4 != 1 {
                    return Err(domain(alloc::format!(
                        "half-integral elements need d = 1 mod 4, got {d}"
                    )));
                }
                if u.is_odd() != v.is_odd() {
                    return Err(domain("half-integral element needs u = v mod 2"));
                }
            }
            _ => return Err(domain("denominator must be 1 or 2")),
        }
        Ok(QuadInt::reduced(d, u, v, den as u32))
    }

    pub fn integer(d: u64, n: impl Into<BigInt>) -> Result<Self> {
        QuadInt::new(d, n, 0, 1)
    }

    pub(crate) fn reduced(d: u64, mut u: BigInt, mut v: BigInt, mut den: u32) -> Self {
        while den > 1 && u.is_even() && v.is_even() {
            u >>= 1;
            v >>= 1;
            den /= 2;
        }
        debug_assert!(den == 1 || den == 2, "element left the maximal order");
        QuadInt { d, u, v, den: den as u8 }
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn u(&self) -> &BigInt {
        &self.u
    }

    pub fn v(&self) -> &BigInt {
        &self.v
    }

    pub fn den(&self) -> u8 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    fn same_field(&self, other: &QuadInt) -> Result<()> {
        if self.d != other.d {
            return Err(domain(alloc::format!(
                "elements of Q(sqrt {}) and Q(sqrt {}) mixed",
                self.d, other.d
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_field(other)?;
        let (du, dv) = (other.den as u32, self.den as u32);
        let u = &self.u * du + &other.u * dv;
        let v = &self.v * du + &other.v * dv;
        Ok(QuadInt::reduced(self.d, u, v, du * dv))
    }

    pub fn try_sub(&self, other: &QuadInt) -> Result<QuadInt> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_field(other)?;
        Ok(self.mul_same(other))
    }

    pub(crate) fn mul_same(&self, other: &QuadInt) -> QuadInt {
        let u = &self.u * &other.u + &self.v * &other.v * self.d;
        let v = &self.u * &other.v + &self.v * &other.u;
        QuadInt::reduced(self.d, u, v, self.den as u32 * other.den as u32)
    }

    pub fn neg(&self) -> QuadInt {
        QuadInt { d: self.d, u: -&self.u, v: -&self.v, den: self.den }
    }

    /// The Galois conjugate `sigma`, sending `sqrt(d)` to `-sqrt(d)`.
    pub fn conj(&self) -> QuadInt {
        QuadInt { d: self.d, u: self.u.clone(), v: -&self.v, den: self.den }
    }

    /// `alpha * sigma(alpha)`, an exact integer.
    pub fn norm(&self) -> BigInt {
        let num = &self.u * &self.u - &self.v * &self.v * self.d;
        num / (self.den as u32 * self.den as u32)
    }

    pub fn trace(&self) -> BigInt {
        (&self.u * 2u32) / self.den as u32
    }

    pub fn pow(&self, mut e: u32) -> QuadInt {
        let mut acc = QuadInt::reduced(self.d, BigInt::one(), BigInt::zero(), 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_same(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_same(&base);
            }
        }
        acc
    }

    /// Exact sign of the real embedding with `sqrt(d) > 0`.
    pub fn signum(&self) -> Ordering {
        let (su, sv) = (self.u.sign(), self.v.sign());
        match (su, sv) {
            (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
            (Sign::Minus, Sign::Plus) | (Sign::Plus, Sign::Minus) => {
                // Compare u^2 with d v^2; they are never equal.
                let lhs = &self.u * &self.u;
                let rhs = &self.v * &self.v * self.d;
                let u_wins = lhs > rhs;
                match (su, u_wins) {
                    (Sign::Plus, true) | (Sign::Minus, false) => Ordering::Greater,
                    _ => Ordering::Less,
                }
            }
            (Sign::Minus, _) | (_, Sign::Minus) => Ordering::Less,
            _ => Ordering::Greater,
        }
    }

    /// `ln|alpha|` under the real embedding. Uses `|alpha| = |N| / |sigma(alpha)|`
    /// when `u` and `v` have opposite signs, so no cancellation occurs.
    pub fn ln_abs(&self) -> Result<f64> {
        if self.is_zero() {
            return Err(domain("log of zero"));
        }
        let den_ln = if self.den == 2 { crate::num::LN_2 } else { 0.0 };
        let (au, av) = (abs_big(&self.u), abs_big(&self.v));
        let same_sign = self.u.sign() != Sign::Minus && self.v.sign() != Sign::Minus
            || self.u.sign() != Sign::Plus && self.v.sign() != Sign::Plus;
        if same_sign {
            return Ok(ln_sum_sqrt(&au, &av, self.d) - den_ln);
        }
        let num_norm = (&self.u * &self.u - &self.v * &self.v * self.d).abs();
        let num_norm: BigUint = num_norm.to_biguint().unwrap_or_default();
        Ok(ln_big(&num_norm) - ln_sum_sqrt(&au, &av, self.d) - den_ln)
    }

    /// Absolute logarithmic Weil height: the mean of `ln+ |.|` over both
    /// real embeddings (the finite places contribute nothing for integers).
    pub fn weil_height(&self) -> Result<f64> {
        let here = self.ln_abs()?.max(0.0);
        if self.is_rational() {
            return Ok(here);
        }
        let there = self.conj().ln_abs()?.max(0.0);
        Ok(0.5 * (here + there))
    }
}

pub fn quad_add(a: &QuadInt, b: &QuadInt) -> Result<QuadInt> {
    a.try_add(b)
}

pub fn quad_mul(a: &QuadInt, b: &QuadInt) -> Result<QuadInt> {
    a.try_mul(b)
}

pub fn quad_conj(a: &QuadInt) -> QuadInt {
    a.conj()
}

pub fn quad_norm(a: &QuadInt) -> BigInt {
    a.norm()
}

pub fn weil_height(a: &QuadInt) -> Result<f64> {
    a.weil_height()
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return write!(f, "{}", self.u);
        }
        let mut body = alloc::string::String::new();
        use core::fmt::Write;
        if !self.u.is_zero() {
            write!(body, "{}", self.u)?;
            body.push(if self.v.is_negative() { '-' } else { '+' });
        } else if self.v.is_negative() {
            body.push('-');
        }
        let av = self.v.abs();
        if !av.is_one() {
            write!(body, "{av}")?;
        }
        write!(body, "√{}", self.d)?;
        if self.den == 2 {
            write!(f, "({body})/2")
        } else {
            f.write_str(&body)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn q(d: u64, u: i64, v: i64, den: u8) -> QuadInt {
        QuadInt::new(d, u, v, den).unwrap()
    }

    #[test]
    fn construction_rules() {
        assert!(QuadInt::new(4, 1, 1, 1).is_err());
        assert!(QuadInt::new(1, 1, 1, 1).is_err());
        assert!(QuadInt::new(3, 1, 1, 2).is_err());
        assert!(QuadInt::new(5, 1, 2, 2).is_err());
        assert!(QuadInt::new(5, 1, 1, 3).is_err());
        assert_eq!(q(5, 2, 4, 2), q(5, 1, 2, 1));
    }

    #[test]
    fn norm_examples() {
        // x - sqrt(Q1) Q2 with x = 5, Q1 = 2, Q2 = 3.
        assert_eq!(q(2, 5, -3, 1).norm(), BigInt::from(7));
        assert_eq!(q(2, 1, 1, 1).norm(), BigInt::from(-1));
        assert_eq!(q(5, 1, 1, 2).norm(), BigInt::from(-1));
        let a = q(13, 3, 1, 2);
        assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn mixed_fields_rejected() {
        assert!(q(2, 1, 1, 1).try_mul(&q(3, 1, 1, 1)).is_err());
        assert!(q(2, 1, 1, 1).try_add(&q(3, 1, 1, 1)).is_err());
    }

    #[test]
    fn half_integral_products_stay_integral() {
        let w = q(5, 1, 1, 2);
        // w^2 = w + 1.
        assert_eq!(w.mul_same(&w), w.try_add(&q(5, 1, 0, 1)).unwrap());
        assert_eq!(w.pow(5), q(5, 11, 5, 2));
        assert_eq!(w.trace(), BigInt::one());
    }

    #[test]
    fn signum_exact() {
        assert_eq!(q(2, 3, -2, 1).signum(), Ordering::Greater);
        assert_eq!(q(2, -3, 2, 1).signum(), Ordering::Less);
        assert_eq!(q(2, 1, -1, 1).signum(), Ordering::Less);
        assert_eq!(q(2, 0, 0, 1).signum(), Ordering::Equal);
    }

    #[test]
    fn heights() {
        let a = q(2, 3, 2, 1);
        assert!((a.weil_height().unwrap() - 0.5 * libm::log(3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(q(2, 1, 0, 1).weil_height().unwrap(), 0.0);
        assert!((q(2, 7, 0, 1).weil_height().unwrap() - libm::log(7.0)).abs() < 1e-15);
        assert!(q(2, 0, 0, 1).weil_height().is_err());
    }

    #[test]
    fn ln_abs_through_cancellation() {
        // (1 + sqrt 2)^-40 = conj((1+sqrt 2)^40) up to sign: tiny but exact.
        let e = q(2, 1, 1, 1).pow(40).conj();
        let want = -40.0 * libm::log(1.0 + 2f64.sqrt());
        assert!((e.ln_abs().unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn display() {
        assert_eq!(q(5, 1, 1, 2).to_string(), "(1+√5)/2");
        assert_eq!(q(2, 1, 1, 1).to_string(), "1+√2");
        assert_eq!(q(3, 2, -1, 1).to_string(), "2-√3");
        assert_eq!(q(2, 0, -3, 1).to_string(), "-3√2");
        assert_eq!(q(2, 7, 0, 1).to_string(), "7");
    }
}
