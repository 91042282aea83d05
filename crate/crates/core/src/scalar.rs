//! Arithmetic backends: exact rationals, exact elements of the imaginary
//! quadratic field `ℚ(√d)` (`d` a negative square-free integer), and
//! arbitrary-precision complex floats with explicit precision tags.
//!
//! Exactness is the point: rank decisions in the Padé/Hermite–Padé solvers
//! hinge on equality tests, so every exact value is kept in canonical form
//! (rationals reduced, positive denominators, and `d = 0` for values whose
//! √d-coefficient vanishes). Precision escalation for the float backend is
//! owned by callers; this module only records precision, it never guesses.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use rug::float::Round;
use rug::ops::Pow;
use rug::{Complex, Float};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rational = num_rational::BigRational;

/// Shorthand for small rational constants.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("mismatched quadratic fields: sqrt({0}) vs sqrt({1})")]
    MismatchedField(i64, i64),
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("invalid discriminant base {0}: must be a negative square-free integer")]
    InvalidDiscriminant(i64),
    #[error("binary operation {0:?} requires a second operand")]
    MissingOperand(QfOp),
    #[error("cannot parse {0:?} as an exact scalar")]
    Parse(String),
}

fn is_square_free(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Element of `ℚ(√d)` with `d < 0` square-free: `value = re + im_coeff·√d`,
/// where `√d` is purely imaginary.
///
/// Pure rationals are stored with `d = 0` and unify with any field, so a
/// single value type covers both `ℚ` and `ℚ(√d)` pipelines. Two elements
/// with distinct nonzero `d` never mix; that is an error, not a coercion.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QFElement {
    d: i64,
    re: Rational,
    im: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfOp {
    Add,
    Mul,
    Inv,
    Neg,
}

impl QFElement {
    /// Builds `re + im·√d`. Fails unless `d` is a negative square-free
    /// integer (or `im = 0`, in which case `d` is ignored).
    pub fn new(d: i64, re: Rational, im: Rational) -> Result<Self, ScalarError> {
        if im.is_zero() {
            return Ok(QFElement { d: 0, re, im });
        }
        if d >= 0 || !is_square_free(d.unsigned_abs()) {
            return Err(ScalarError::InvalidDiscriminant(d));
        }
        Ok(QFElement { d, re, im })
    }

    pub fn from_rational(re: Rational) -> Self {
        QFElement { d: 0, re, im: Rational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(rat(v, 1))
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_int(v)
    }

    /// `√d` itself.
    pub fn sqrt_d(d: i64) -> Result<Self, ScalarError> {
        Self::new(d, Rational::zero(), Rational::one())
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im_coeff(&self) -> &Rational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    fn unify(a: i64, b: i64) -> Result<i64, ScalarError> {
        match (a, b) {
            (0, d) => Ok(d),
            (d, 0) => Ok(d),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(ScalarError::MismatchedField(x, y)),
        }
    }

    fn normalized(d: i64, re: Rational, im: Rational) -> Self {
        if im.is_zero() {
            QFElement { d: 0, re, im }
        } else {
            QFElement { d, re, im }
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = Self::unify(self.d, rhs.d)?;
        Ok(Self::normalized(d, &self.re + &rhs.re, &self.im + &rhs.im))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = Self::unify(self.d, rhs.d)?;
        Ok(Self::normalized(d, &self.re - &rhs.re, &self.im - &rhs.im))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = Self::unify(self.d, rhs.d)?;
        let dd = rat(d, 1);
        let re = &self.re * &rhs.re + &(&self.im * &rhs.im) * &dd;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        Ok(Self::normalized(d, re, im))
    }

    pub fn negated(&self) -> Self {
        QFElement { d: self.d, re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn conj(&self) -> Self {
        Self::normalized(self.d, self.re.clone(), -self.im.clone())
    }

    /// Field norm `re² − d·im²`; non-negative rational since `d < 0`.
    pub fn norm(&self) -> Rational {
        &self.re * &self.re - &(&self.im * &self.im) * &rat(self.d, 1)
    }

    pub fn checked_inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::normalized(self.d, &self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        self.checked_mul(&rhs.checked_inv()?)
    }

    /// Unchecked field operations for internal arithmetic; panic on zero
    /// inverses or mismatched fields (programming errors, not data errors).
    pub fn add(&self, rhs: &Self) -> Self {
        self.checked_add(rhs).expect("quadratic field mismatch")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.checked_sub(rhs).expect("quadratic field mismatch")
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs).expect("quadratic field mismatch")
    }

    pub fn neg(&self) -> Self {
        self.negated()
    }

    pub fn inv(&self) -> Self {
        self.checked_inv().expect("inverse of zero")
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self.checked_div(rhs).expect("division error")
    }

    /// Rounds into a [`BigComplex`]; relative error is below `2^(1−p)` per
    /// component (one guarded sqrt plus one final rounding).
    pub fn embed(&self, precision_bits: u32) -> BigComplex {
        let guard = precision_bits + 32;
        let re = Float::with_val(precision_bits, &rug_rational(&self.re));
        let im = if self.im.is_zero() {
            Float::with_val(precision_bits, 0)
        } else {
            // im·√d = sign(im)·sqrt(|d|·im²), purely imaginary part.
            let mag2 = rug_rational(&(&self.im * &self.im * rat(-self.d, 1)));
            let mut v = Float::with_val(guard, &mag2).sqrt();
            if self.im.is_negative() {
                v = -v;
            }
            Float::with_val_round(precision_bits, &v, Round::Nearest).0
        };
        BigComplex::from_floats(re, im)
    }

    /// Decimal digits of the largest numerator/denominator involved; a cheap
    /// size proxy for pivot selection.
    pub fn bit_size(&self) -> usize {
        let b = |x: &BigInt| x.bits() as usize;
        b(self.re.numer())
            .max(b(self.re.denom()))
            .max(b(self.im.numer()))
            .max(b(self.im.denom()))
    }
}

impl fmt::Debug for QFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for QFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}*sqrt({})", fmt_rational(&self.im), self.d);
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(
            f,
            "{}{}{}*sqrt({})",
            fmt_rational(&self.re),
            sign,
            fmt_rational(&self.im.abs()),
            self.d
        )
    }
}

fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let bad = || ScalarError::Parse(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p = BigInt::from_str(s.trim()).map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

impl FromStr for QFElement {
    type Err = ScalarError;

    /// Parses the canonical serialization: `p/q`, `r/s*sqrt(d)`, or
    /// `p/q±r/s*sqrt(d)` (integer parts may omit `/q`).
    fn from_str(s: &str) -> Result<Self, ScalarError> {
        let s = s.trim();
        let bad = || ScalarError::Parse(s.to_string());
        let Some(star) = s.find("*sqrt(") else {
            return Ok(QFElement::from_rational(parse_rational(s)?));
        };
        if !s.ends_with(')') {
            return Err(bad());
        }
        let d: i64 = s[star + 6..s.len() - 1].trim().parse().map_err(|_| bad())?;
        let head = &s[..star];
        // Split `head` into an optional rational part and the √d coefficient:
        // the separator is a '+' or '-' that is not the leading sign.
        let mut split = None;
        for (i, c) in head.char_indices().skip(1) {
            if (c == '+' || c == '-') && !head[..i].ends_with('/') {
                split = Some(i);
            }
        }
        let (re, im) = match split {
            Some(i) => {
                let re = parse_rational(&head[..i])?;
                let sign = if head.as_bytes()[i] == b'-' { -1 } else { 1 };
                let im = parse_rational(&head[i + 1..])? * rat(sign, 1);
                (re, im)
            }
            None => (Rational::zero(), parse_rational(head)?),
        };
        QFElement::new(d, re, im)
    }
}

impl std::ops::Add for &QFElement {
    type Output = QFElement;
    fn add(self, rhs: &QFElement) -> QFElement {
        self.checked_add(rhs).expect("quadratic field mismatch")
    }
}

impl std::ops::Sub for &QFElement {
    type Output = QFElement;
    fn sub(self, rhs: &QFElement) -> QFElement {
        self.checked_sub(rhs).expect("quadratic field mismatch")
    }
}

impl std::ops::Mul for &QFElement {
    type Output = QFElement;
    fn mul(self, rhs: &QFElement) -> QFElement {
        self.checked_mul(rhs).expect("quadratic field mismatch")
    }
}

impl std::ops::Neg for &QFElement {
    type Output = QFElement;
    fn neg(self) -> QFElement {
        self.negated()
    }
}

/// Exact field arithmetic entry point: `add`/`mul` take two operands,
/// `inv`/`neg` one.
pub fn qf_arith(op: QfOp, x: &QFElement, y: Option<&QFElement>) -> Result<QFElement, ScalarError> {
    match op {
        QfOp::Add => x.checked_add(y.ok_or(ScalarError::MissingOperand(op))?),
        QfOp::Mul => x.checked_mul(y.ok_or(ScalarError::MissingOperand(op))?),
        QfOp::Inv => x.checked_inv(),
        QfOp::Neg => Ok(x.negated()),
    }
}

fn rug_int(x: &BigInt) -> rug::Integer {
    let (sign, digits) = x.to_u64_digits();
    let mut v = rug::Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == Sign::Minus {
        v = -v;
    }
    v
}

fn rug_rational(q: &Rational) -> rug::Rational {
    rug::Rational::from((rug_int(q.numer()), rug_int(q.denom())))
}

/// Arbitrary-precision complex float. The precision tag is the minimum of
/// the component precisions; mixed-precision operations compute at (and
/// record) the minimum of the operand precisions.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    inner: Complex,
}

impl BigComplex {
    pub fn zero(precision_bits: u32) -> Self {
        Self { inner: Complex::with_val(precision_bits, (0, 0)) }
    }

    pub fn one(precision_bits: u32) -> Self {
        Self { inner: Complex::with_val(precision_bits, (1, 0)) }
    }

    pub fn with_f64(precision_bits: u32, re: f64, im: f64) -> Self {
        Self { inner: Complex::with_val(precision_bits, (re, im)) }
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        let prec = re.prec().min(im.prec());
        Self { inner: Complex::with_val(prec, (re, im)) }
    }

    pub fn from_rationals(precision_bits: u32, re: &Rational, im: &Rational) -> Self {
        Self {
            inner: Complex::with_val(
                precision_bits,
                (
                    Float::with_val(precision_bits, &rug_rational(re)),
                    Float::with_val(precision_bits, &rug_rational(im)),
                ),
            ),
        }
    }

    pub fn precision_bits(&self) -> u32 {
        let (p, q) = self.inner.prec();
        p.min(q)
    }

    pub fn re(&self) -> &Float {
        self.inner.real()
    }

    pub fn im(&self) -> &Float {
        self.inner.imag()
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re().to_f64(), self.im().to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.inner.real().is_zero() && self.inner.imag().is_zero()
    }

    fn join(&self, rhs: &Self) -> u32 {
        self.precision_bits().min(rhs.precision_bits())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self { inner: Complex::with_val(self.join(rhs), &self.inner + &rhs.inner) }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self { inner: Complex::with_val(self.join(rhs), &self.inner - &rhs.inner) }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self { inner: Complex::with_val(self.join(rhs), &self.inner * &rhs.inner) }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        Self { inner: Complex::with_val(self.join(rhs), &self.inner / &rhs.inner) }
    }

    pub fn neg(&self) -> Self {
        Self { inner: Complex::with_val(self.precision_bits(), -&self.inner) }
    }

    pub fn conj(&self) -> Self {
        Self { inner: Complex::with_val(self.precision_bits(), self.inner.conj_ref()) }
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        Self { inner: Complex::with_val(self.precision_bits(), &self.inner * s) }
    }

    pub fn recip(&self) -> Self {
        Self {
            inner: Complex::with_val(self.precision_bits(), self.inner.recip_ref()),
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        Self { inner: Complex::with_val(self.precision_bits(), self.inner.sqrt_ref()) }
    }

    pub fn exp(&self) -> Self {
        Self { inner: Complex::with_val(self.precision_bits(), self.inner.exp_ref()) }
    }

    /// Principal logarithm (imaginary part in `(−π, π]`).
    pub fn ln(&self) -> Self {
        Self { inner: Complex::with_val(self.precision_bits(), self.inner.ln_ref()) }
    }

    /// Principal power with a real rational exponent: `exp(a·ln z)`.
    pub fn pow_rational(&self, a: &Rational) -> Self {
        let prec = self.precision_bits();
        let e = Float::with_val(prec, &rug_rational(a));
        Self { inner: Complex::with_val(prec, self.inner.clone().pow(&e)) }
    }

    pub fn abs(&self) -> Float {
        let prec = self.precision_bits();
        Float::with_val(prec, self.re().hypot_ref(self.im()))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn arg(&self) -> Float {
        let prec = self.precision_bits();
        Float::with_val(prec, self.im().atan2_ref(self.re()))
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:.6e} + {:.6e}i; {} bits)",
            self.re().to_f64(),
            self.im().to_f64(),
            self.precision_bits()
        )
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.inner)
    }
}

impl std::ops::Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::add(self, rhs)
    }
}

impl std::ops::Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::sub(self, rhs)
    }
}

impl std::ops::Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::mul(self, rhs)
    }
}

impl std::ops::Div for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::div(self, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega() -> QFElement {
        QFElement::sqrt_d(-3).unwrap()
    }

    #[test]
    fn product_of_conjugate_units() {
        // (1+ω)(1−ω) = 1 − ω² = 1 + 3 = 4 with ω = √−3.
        let one = QFElement::one();
        let a = one.add(&omega());
        let b = one.sub(&omega());
        assert_eq!(a.mul(&b), QFElement::from_int(4));
    }

    #[test]
    fn inverse_of_omega() {
        let w = omega();
        let inv = qf_arith(QfOp::Inv, &w, None).unwrap();
        let expected = QFElement::new(-3, rat(0, 1), rat(-1, 3)).unwrap();
        assert_eq!(inv, expected);
        assert_eq!(w.mul(&inv), QFElement::one());
    }

    #[test]
    fn rational_embeds_add() {
        let a = QFElement::from_rational(rat(1, 2));
        let b = QFElement::from_rational(rat(1, 3));
        let s = qf_arith(QfOp::Add, &a, Some(&b)).unwrap();
        assert_eq!(s, QFElement::from_rational(rat(5, 6)));
        assert_eq!(s.d(), 0);
    }

    #[test]
    fn mismatched_fields_error() {
        let a = QFElement::sqrt_d(-3).unwrap();
        let b = QFElement::sqrt_d(-1).unwrap();
        assert!(matches!(
            a.checked_add(&b),
            Err(ScalarError::MismatchedField(-3, -1))
        ));
    }

    #[test]
    fn discriminant_must_be_negative_square_free() {
        assert!(QFElement::new(-4, rat(0, 1), rat(1, 1)).is_err());
        assert!(QFElement::new(3, rat(0, 1), rat(1, 1)).is_err());
        assert!(QFElement::new(-6, rat(0, 1), rat(1, 1)).is_ok());
    }

    #[test]
    fn embed_sqrt_minus_three() {
        // Independent oracle for √3: integer square root of 3·4^k.
        let k = 40u32;
        let scaled = BigInt::from(3u32) << (2 * k);
        let isqrt = scaled.sqrt();
        let oracle = Rational::new(isqrt, BigInt::one() << k);
        let e = omega().embed(64);
        assert!(e.re().to_f64().abs() < 1e-18);
        let diff = (e.im().to_f64() - oracle_to_f64(&oracle)).abs();
        assert!(diff < 1e-15, "√3 embed off by {diff}");
        assert!((e.im().to_f64() - 1.7320508075688772).abs() < 1e-15);
    }

    fn oracle_to_f64(q: &Rational) -> f64 {
        use num_traits::ToPrimitive;
        q.to_f64().unwrap()
    }

    #[test]
    fn embed_zero_and_third() {
        let z = QFElement::zero().embed(64);
        assert!(z.is_zero());
        let t = QFElement::from_rational(rat(1, 3)).embed(53);
        let err = (t.re().to_f64() - 1.0 / 3.0).abs() / (1.0 / 3.0);
        assert!(err <= f64::EPSILON);
    }

    #[test]
    fn embed_min_precision_rule() {
        let a = QFElement::from_rational(rat(1, 3)).embed(128);
        let b = QFElement::from_rational(rat(1, 7)).embed(64);
        assert_eq!(a.mul(&b).precision_bits(), 64);
    }

    #[test]
    fn serialization_round_trip() {
        for s in ["5/6", "-7", "2/3+1/5*sqrt(-3)", "1-1/3*sqrt(-1)", "-1/3*sqrt(-3)"] {
            let v: QFElement = s.parse().unwrap();
            let back: QFElement = v.to_string().parse().unwrap();
            assert_eq!(v, back, "round trip failed for {s}");
        }
        let fig4: QFElement = "-1/3*sqrt(-3)".parse().unwrap();
        assert_eq!(fig4.d(), -3);
        assert_eq!(*fig4.im_coeff(), rat(-1, 3));
    }

    #[test]
    fn complex_min_precision_and_sqrt() {
        let a = BigComplex::with_f64(256, 0.0, 1.0);
        let r = a.sqrt();
        // sqrt(i) = (1+i)/√2.
        let expect = (0.5f64).sqrt();
        assert!((r.re().to_f64() - expect).abs() < 1e-15);
        assert!((r.im().to_f64() - expect).abs() < 1e-15);
    }
}
