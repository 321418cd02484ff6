//! Arithmetic of the S-part of `x^2 - q_1^{a_1} ... q_t^{a_t}`.
//!
//! The crate is `no_std` (it needs `alloc`) and every operation is a pure
//! function over immutable values. It provides:
//!
//! * [`arith`]: S-parts, valuations, greatest prime factors and a budgeted
//!   factorizer that never returns an unverified answer.
//! * [`decomp`]: the parity split `N = Q1 * Q2^2` and the coprime split of
//!   `x - Q2`, `x + Q2`.
//! * [`quadfield`]: real quadratic fields, fundamental units, Weil heights,
//!   prime ideal valuations and height reduction modulo units.
//! * [`hensel`]: modular square roots, Hensel lifting, and families of
//!   tuples whose S-part is about the square root of the difference.
//! * [`search`]: exhaustive window enumeration and equation solving.
//! * [`bounds`]: evaluators for the bound shapes and empirical constant fits.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arith;
pub mod bounds;
pub mod decomp;
mod error;
pub mod hensel;
pub(crate) mod num;
pub mod quadfield;
pub mod search;

pub use error::{Error, Result};
