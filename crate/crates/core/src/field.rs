//! The coefficient-field abstraction shared by every layer.
//!
//! The engine runs over [`QRat`] (formal `q`, exact proofs) or over
//! [`Rational`] with `q` specialized to a fixed rational (classical limit and
//! probabilistic sampling). Everything above this module is generic in `F`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::qfield::QRat;
use crate::tensor::Entry;

pub type Rational = BigRational;

pub trait Field:
    Entry<Scalar = Self>
    + Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn inv(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out *= other;
        out
    }

    fn neg_ref(&self) -> Self {
        self.clone().neg()
    }

    /// Integer power, negative exponents through `inv`.
    fn powi(&self, e: i32) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc *= &base;
        }
        Some(acc)
    }
}

impl Field for QRat {
    fn zero() -> Self {
        QRat::zero()
    }
    fn one() -> Self {
        QRat::one()
    }
    fn is_zero(&self) -> bool {
        QRat::is_zero(self)
    }
    fn is_one(&self) -> bool {
        QRat::is_one(self)
    }
    fn from_i64(v: i64) -> Self {
        QRat::from_int(v)
    }
    fn inv(&self) -> Option<Self> {
        QRat::inv(self)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

/// `k_q` computed inside `F` from a value of `q`.
pub fn q_number<F: Field>(q: &F, k: usize) -> F {
    let qinv = q.inv().expect("q must be nonzero");
    let mut acc = F::zero();
    // q^{k-1}, q^{k-3}, ..., q^{1-k}
    let mut term = match q.powi(k as i32 - 1) {
        Some(t) => t,
        None => return acc,
    };
    let step = qinv.mul_ref(&qinv);
    for _ in 0..k {
        acc += &term;
        term *= &step;
    }
    acc
}

/// Parses a decimal rational literal such as `3`, `-2`, or `5/7`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if Zero::is_zero(&d) {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::qnum;

    #[test]
    fn q_number_matches_formal() {
        for k in 0..6 {
            assert_eq!(q_number(&QRat::q(), k), qnum(k as u32));
        }
        let x = parse_rational("3").unwrap();
        // 3_q at q=3: 9 + 1 + 1/9
        assert_eq!(q_number(&x, 3), parse_rational("91/9").unwrap());
        assert_eq!(q_number(&<Rational as Field>::one(), 4), parse_rational("4").unwrap());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-5/10"), parse_rational("-1/2"));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }
}
