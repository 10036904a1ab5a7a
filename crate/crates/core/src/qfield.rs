//! Exact arithmetic in the rational function field Q(q).
//!
//! [`LaurentPoly`] holds finite Laurent polynomials in the formal parameter
//! `q` with arbitrary-precision rational coefficients. [`QRat`] is a quotient
//! of two such polynomials kept in a canonical form, so that equality is
//! structural equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::EvalError;

/// A Laurent polynomial `sum c_e q^e` with rational coefficients.
///
/// Zero coefficients are never stored, so the zero polynomial is the empty map.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0)
    }

    /// The generator `q`.
    pub fn q() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: BigRational, exp: i32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        Self { coeffs }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (i32, BigRational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    fn add_term(&mut self, exp: i32, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(exp).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    /// True for a single term `c q^e`.
    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, exp: i32) -> BigRational {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient of the highest power of `q`.
    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.values().next_back()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }

    /// Substitutes `q -> -q^{-1}`.
    pub fn reflect(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, v)| (-e, if e % 2 == 0 { v.clone() } else { -v }))
                .collect(),
        }
    }

    /// Evaluates at a nonzero rational point.
    pub fn eval(&self, x: &BigRational) -> Result<BigRational, EvalError> {
        if x.is_zero() {
            if self.min_exp().is_some_and(|e| e < 0) {
                return Err(EvalError::ZeroPoint);
            }
            return Ok(self.coeff(0));
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.coeffs {
            acc += c * pow_rational(x, *e);
        }
        Ok(acc)
    }

    /// Splits into `q^shift * p(q)` with `p(0) != 0`; `p` as low-to-high dense coefficients.
    fn to_dense(&self) -> (i32, Vec<BigRational>) {
        let lo = match self.min_exp() {
            Some(e) => e,
            None => return (0, Vec::new()),
        };
        let hi = self.max_exp().unwrap();
        let mut v = vec![BigRational::zero(); (hi - lo + 1) as usize];
        for (e, c) in &self.coeffs {
            v[(e - lo) as usize] = c.clone();
        }
        (lo, v)
    }

    fn from_dense(shift: i32, dense: &[BigRational]) -> Self {
        Self {
            coeffs: dense
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (shift + i as i32, c.clone()))
                .collect(),
        }
    }
}

pub(crate) fn pow_rational(x: &BigRational, e: i32) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

// Dense univariate helpers, coefficients stored low-to-high.

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = &b[db];
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quot = vec![BigRational::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let c = &r[r.len() - 1] / lb;
        for (i, bc) in b.iter().enumerate() {
            let t = &c * bc;
            r[shift + i] -= t;
        }
        quot[shift] = c;
        r.pop();
        trim(&mut r);
    }
    (quot, r)
}

fn make_monic(p: &mut [BigRational]) {
    if let Some(lc) = p.last().cloned() {
        if !lc.is_one() {
            for c in p.iter_mut() {
                *c /= &lc;
            }
        }
    }
}

/// Monic gcd of two nonzero dense polynomials.
fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let (mut x, mut y) = if a.len() >= b.len() {
        (a.to_vec(), b.to_vec())
    } else {
        (b.to_vec(), a.to_vec())
    };
    make_monic(&mut y);
    while !y.is_empty() {
        let (_, mut r) = poly_divrem(&x, &y);
        make_monic(&mut r);
        x = std::mem::replace(&mut y, r);
    }
    x
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.coeffs {
            self.add_term(*e, c);
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.coeffs {
            self.add_term(*e, &-c);
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &rhs.coeffs {
                out.add_term(ea + eb, &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

fn fmt_coeff_term(f: &mut fmt::Formatter<'_>, c: &BigRational, exp: i32, first: bool) -> fmt::Result {
    let neg = c.is_negative();
    let abs = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let var = match exp {
        0 => None,
        1 => Some("q".to_string()),
        e => Some(format!("q^{e}")),
    };
    match var {
        None => write!(f, "{abs}"),
        Some(v) if abs.is_one() => write!(f, "{v}"),
        Some(v) => write!(f, "{abs}*{v}"),
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.coeffs.iter().rev().enumerate() {
            fmt_coeff_term(f, c, *e, i == 0)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// An element of Q(q) in canonical form.
///
/// Canonical means: numerator and denominator are coprime, the denominator
/// is an ordinary polynomial with nonzero constant term, and it is monic.
/// Zero is `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QRat {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl QRat {
    pub fn zero() -> Self {
        Self::from_poly(LaurentPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn q() -> Self {
        Self::from_poly(LaurentPoly::q())
    }

    /// `q^e` for any integer `e`.
    pub fn q_pow(e: i32) -> Self {
        Self::from_poly(LaurentPoly::monomial(BigRational::one(), e))
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        Self {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    /// Builds `num / den` in canonical form. Returns `None` when `den` is zero.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(Self::zero());
        }
        if den.is_one() {
            return Some(Self::from_poly(num));
        }
        let (sn, mut n) = num.to_dense();
        let (sd, mut d) = den.to_dense();
        if n.len() > 1 && d.len() > 1 {
            let g = poly_gcd(&n, &d);
            if g.len() > 1 {
                n = poly_divrem(&n, &g).0;
                d = poly_divrem(&d, &g).0;
            }
        }
        let lc = d.last().unwrap().clone();
        if !lc.is_one() {
            for c in n.iter_mut() {
                *c /= &lc;
            }
            for c in d.iter_mut() {
                *c /= &lc;
            }
        }
        Some(Self {
            num: LaurentPoly::from_dense(sn - sd, &n),
            den: LaurentPoly::from_dense(0, &d),
        })
    }

    pub fn numer(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denom(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    /// True when the value is a Laurent polynomial (denominator 1).
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn inv(&self) -> Option<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Substitutes `q -> -q^{-1}`; an involution.
    pub fn reflect(&self) -> Self {
        Self::new(self.num.reflect(), self.den.reflect()).expect("reflection preserves nonzero denominators")
    }

    /// Evaluates at the rational point `q = x`.
    pub fn eval_at(&self, x: &BigRational) -> Result<BigRational, EvalError> {
        if x.is_zero() {
            return Err(EvalError::ZeroPoint);
        }
        let d = self.den.eval(x)?;
        if d.is_zero() {
            return Err(EvalError::Pole { at: x.to_string() });
        }
        Ok(self.num.eval(x)? / d)
    }

    pub fn pow(&self, e: i32) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }
}

/// The q-number `k_q = (q^k - q^{-k}) / (q - q^{-1}) = q^{k-1} + q^{k-3} + ... + q^{1-k}`.
pub fn qnum(k: u32) -> QRat {
    let k = k as i32;
    QRat::from_poly(LaurentPoly::from_terms(
        (0..k).map(|j| (k - 1 - 2 * j, BigRational::one())),
    ))
}

/// Substitutes `q -> -q^{-1}` in `f`.
pub fn reflect(f: &QRat) -> QRat {
    f.reflect()
}

/// Evaluates `f` at `q = x`.
pub fn eval_at(f: &QRat, x: &BigRational) -> Result<BigRational, EvalError> {
    f.eval_at(x)
}

impl Default for QRat {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<LaurentPoly> for QRat {
    fn from(p: LaurentPoly) -> Self {
        Self::from_poly(p)
    }
}

impl From<i64> for QRat {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl Add for &QRat {
    type Output = QRat;
    fn add(self, rhs: &QRat) -> QRat {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return QRat::from_poly(&self.num + &rhs.num);
            }
            return QRat::new(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        // a + c/d with c/d canonical is already coprime to d.
        if self.den.is_one() {
            return QRat {
                num: &(&self.num * &rhs.den) + &rhs.num,
                den: rhs.den.clone(),
            };
        }
        if rhs.den.is_one() {
            return QRat {
                num: &(&rhs.num * &self.den) + &self.num,
                den: self.den.clone(),
            };
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        QRat::new(num, &self.den * &rhs.den).unwrap()
    }
}

impl Sub for &QRat {
    type Output = QRat;
    fn sub(self, rhs: &QRat) -> QRat {
        self + &(-rhs)
    }
}

impl Mul for &QRat {
    type Output = QRat;
    fn mul(self, rhs: &QRat) -> QRat {
        if self.is_zero() || rhs.is_zero() {
            return QRat::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return QRat::from_poly(&self.num * &rhs.num);
        }
        if self.num.is_monomial() && self.den.is_one() {
            return QRat { num: &self.num * &rhs.num, den: rhs.den.clone() };
        }
        if rhs.num.is_monomial() && rhs.den.is_one() {
            return QRat { num: &self.num * &rhs.num, den: self.den.clone() };
        }
        QRat::new(&self.num * &rhs.num, &self.den * &rhs.den).unwrap()
    }
}

impl Div for &QRat {
    type Output = QRat;
    fn div(self, rhs: &QRat) -> QRat {
        let inv = rhs.inv().expect("division by zero in Q(q)");
        self.mul(&inv)
    }
}

impl Neg for &QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        QRat {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QRat {
            type Output = QRat;
            fn $m(self, rhs: QRat) -> QRat {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QRat> for QRat {
            type Output = QRat;
            fn $m(self, rhs: &QRat) -> QRat {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        -&self
    }
}

impl AddAssign<&QRat> for QRat {
    fn add_assign(&mut self, rhs: &QRat) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&QRat> for QRat {
    fn sub_assign(&mut self, rhs: &QRat) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&QRat> for QRat {
    fn mul_assign(&mut self, rhs: &QRat) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QRat({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn q() -> QRat {
        QRat::q()
    }

    #[test]
    fn qnum_small_values() {
        assert!(qnum(0).is_zero());
        assert!(qnum(1).is_one());
        // (q^2 - q^-2) / (q - q^-1) by long division
        let expect = &q() + &QRat::q_pow(-1);
        assert_eq!(qnum(2), expect);
        let num = &QRat::q_pow(2) - &QRat::q_pow(-2);
        let den = &q() - &QRat::q_pow(-1);
        assert_eq!(&num / &den, expect);
    }

    #[test]
    fn reflect_examples() {
        assert_eq!(q().reflect(), -&QRat::q_pow(-1));
        for k in 1..7u32 {
            let sign = if (k - 1) % 2 == 0 { QRat::one() } else { QRat::from_int(-1) };
            assert_eq!(qnum(k).reflect(), &sign * &qnum(k));
        }
        let d = &q() - &QRat::q_pow(-1);
        assert_eq!(d.reflect(), d);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(qnum(2).eval_at(&rat(1, 1)).unwrap(), rat(2, 1));
        let d = &q() - &QRat::q_pow(-1);
        assert_eq!(d.eval_at(&rat(2, 1)).unwrap(), rat(3, 2));
        let inv = d.inv().unwrap();
        assert!(matches!(inv.eval_at(&rat(1, 1)), Err(EvalError::Pole { .. })));
        assert!(matches!(q().eval_at(&rat(0, 1)), Err(EvalError::ZeroPoint)));
    }

    #[test]
    fn canonical_denominator() {
        // q / (2 q^3 + 2 q) == 1 / (2 q^2 + 2) == (1/2) / (q^2 + 1)
        let num = LaurentPoly::q();
        let den = LaurentPoly::from_terms([(3, rat(2, 1)), (1, rat(2, 1))]);
        let f = QRat::new(num, den).unwrap();
        assert_eq!(f.numer(), &LaurentPoly::constant(rat(1, 2)));
        assert_eq!(f.denom().min_exp(), Some(0));
        assert!(f.denom().leading_coeff().unwrap().is_one());
        // (q^2 - 1)/(q - 1) reduces to q + 1
        let g = QRat::new(
            LaurentPoly::from_terms([(2, rat(1, 1)), (0, rat(-1, 1))]),
            LaurentPoly::from_terms([(1, rat(1, 1)), (0, rat(-1, 1))]),
        )
        .unwrap();
        assert_eq!(g, &q() + &QRat::one());
        assert!(QRat::new(LaurentPoly::one(), LaurentPoly::zero()).is_none());
    }

    #[test]
    fn display_is_readable() {
        let f = &(&QRat::q_pow(2) - &QRat::from_rational(rat(1, 2))) / &(&q() + &QRat::one());
        assert_eq!(f.to_string(), "(q^2 - 1/2)/(q + 1)");
        assert_eq!((-&QRat::q_pow(-1)).to_string(), "-q^-1");
    }
}
