//! Exact scalars: arbitrary-precision rationals and prime fields.
//!
//! Every coefficient in this crate is a [`Q`] (a reduced fraction of
//! arbitrary-precision integers).  Computations can additionally be carried
//! out modulo a prime via [`FpCtx`], which is used both as a cross-check on
//! the rational results and as a cheaper arithmetic for large instances.

use alloc::string::{String, ToString};
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar, always kept in reduced canonical form
/// (positive denominator, gcd(numerator, denominator) = 1).
pub type Q = num_rational::BigRational;

/// Shorthand for an integer rational.
pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Errors from scalar parsing and modular reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarError {
    /// The textual form was not `p` or `p/q` with integer `p`, `q`.
    Malformed(String),
    /// A fraction with zero denominator was supplied.
    ZeroDenominator,
    /// The modulus is not a prime in the supported range.
    BadModulus(u64),
    /// Reduction mod `p` hit a denominator divisible by `p`.
    DenominatorVanishes(u64),
}

#[cfg(feature = "std")]
impl std::error::Error for ScalarError {}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::Malformed(s) => write!(f, "malformed scalar `{s}` (expected `p` or `p/q`)"),
            ScalarError::ZeroDenominator => write!(f, "scalar has zero denominator"),
            ScalarError::BadModulus(p) => write!(f, "{p} is not a prime in the supported range (2..2^31)"),
            ScalarError::DenominatorVanishes(p) => {
                write!(f, "denominator divisible by {p}; cannot reduce mod {p}")
            }
        }
    }
}

/// Parses `p` or `p/q` (decimal, optionally signed) into a reduced rational.
pub fn parse_q(text: &str) -> Result<Q, ScalarError> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| ScalarError::Malformed(text.to_string()))?;
    let den: BigInt = den.parse().map_err(|_| ScalarError::Malformed(text.to_string()))?;
    if den.is_zero() {
        return Err(ScalarError::ZeroDenominator);
    }
    Ok(Q::new(num, den))
}

/// Formats a rational as `p` (integer) or `p/q`; inverse of [`parse_q`].
pub fn format_q(value: &Q) -> String {
    value.to_string()
}

/// Arithmetic context for the prime field `F_p`.
///
/// Elements are represented as `u64` in `0..p`.  The modulus is restricted to
/// `p < 2^31` so that products fit in `u64` via `u128` intermediates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FpCtx {
    p: u64,
}

impl FpCtx {
    /// Creates the field context, verifying that `p` is prime and in range.
    pub fn new(p: u64) -> Result<Self, ScalarError> {
        if !(2..1u64 << 31).contains(&p) || !is_prime(p) {
            return Err(ScalarError::BadModulus(p));
        }
        Ok(FpCtx { p })
    }

    /// The modulus.
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Addition in `F_p`.
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    /// Subtraction in `F_p`.
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }

    /// Negation in `F_p`.
    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    /// Multiplication in `F_p`.
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// Multiplicative inverse of a nonzero element (Fermat).
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p), "inverse of zero mod {}", self.p);
        self.pow(a, self.p - 2)
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        base %= self.p;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Reduces a rational mod `p`; errors if the denominator vanishes mod `p`.
    pub fn reduce(&self, value: &Q) -> Result<u64, ScalarError> {
        let p = BigInt::from(self.p);
        let den = value.denom().mod_floor(&p);
        if den.is_zero() {
            return Err(ScalarError::DenominatorVanishes(self.p));
        }
        let num = value.numer().mod_floor(&p);
        let num = big_to_u64(&num);
        let den = big_to_u64(&den);
        Ok(self.mul(num, self.inv(den)))
    }
}

fn big_to_u64(n: &BigInt) -> u64 {
    // `mod_floor` against a positive modulus always yields a value in range.
    debug_assert!(!n.is_negative());
    let (_, digits) = n.to_u64_digits();
    match digits.first() {
        Some(d) => *d,
        None => 0,
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(-1)^k` as a rational.
pub fn sign_pow(k: usize) -> Q {
    if k.is_multiple_of(2) {
        Q::one()
    } else {
        -Q::one()
    }
}
