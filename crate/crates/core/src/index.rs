//! One-based modular index arithmetic.
//!
//! Every "index taken mod N" in the public API is represented by an integer in
//! `1..=N`, never `0`. This module owns that convention.

use crate::error::{Error, Result};

/// Reduces an integer index into the representative range `1..=n`.
///
/// # Panics
/// Panics if `n == 0`.
pub fn wrap(i: i64, n: usize) -> usize {
    assert!(n > 0, "modulus must be positive");
    let r = (i - 1).rem_euclid(n as i64);
    r as usize + 1
}

/// Greatest common divisor.
pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `n` as a representative in `1..=n`.
///
/// For `n == 1` every residue is zero and the representative `1` is returned.
pub fn mod_inverse(a: usize, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    let g = gcd(a % n, n);
    if g != 1 && n != 1 {
        return Err(Error::NoInverse { step: a, n, gcd: g });
    }
    if n == 1 {
        return Ok(1);
    }
    let (mut old_r, mut r) = (a as i64 % n as i64, n as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    Ok(wrap(old_s, n))
}
