//! Exact arithmetic over Q and the real quadratic extension Q(sqrt(d)),
//! plus a tolerance-based float scalar for trigonometric datasets.
//!
//! Every coordinate that enters the linear algebra is either a [`QuadScalar`]
//! (exact, arbitrary-precision) or an [`ApproxScalar`] (f64 with a dataset-wide
//! epsilon). The two kinds never mix inside one computation; generic code is
//! written against the [`Scalar`] trait.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational. Always reduced, denominator positive.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("scalars live in different fields: sqrt({0}) vs sqrt({1})")]
    FieldMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not square-free")]
    NotSquareFree(u64),
}

/// Parse failure with the byte offset where it happened.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

fn parse_fail<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

pub fn is_square_free(d: u64) -> bool {
    if d < 4 {
        return true;
    }
    let mut n = d;
    let mut f = 2u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            n /= f;
            if n.is_multiple_of(f) {
                return false;
            }
        }
        f += 1;
    }
    true
}

/// An exact real number `a + b*sqrt(d)` with rational `a`, `b`.
///
/// `d` is square-free and shared by every scalar of a dataset. For `d` in
/// {0, 1} the radical collapses and `b` is folded into `a`, so equality is
/// plain structural equality of `(a, b, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    a: Rational,
    b: Rational,
    d: u64,
}

impl QuadScalar {
    pub fn new(a: Rational, b: Rational, d: u64) -> Result<Self, NumError> {
        if !is_square_free(d) {
            return Err(NumError::NotSquareFree(d));
        }
        Ok(Self::fold(a, b, d))
    }

    /// Canonicalize: for degenerate radicals sqrt(0) = 0 and sqrt(1) = 1 the
    /// b-part is absorbed so that one value has one representation.
    fn fold(a: Rational, b: Rational, d: u64) -> Self {
        match d {
            0 => QuadScalar {
                a,
                b: Rational::zero(),
                d,
            },
            1 => QuadScalar {
                a: a + b,
                b: Rational::zero(),
                d,
            },
            _ => QuadScalar { a, b, d },
        }
    }

    pub fn from_rational(a: Rational, d: u64) -> Self {
        debug_assert!(is_square_free(d));
        QuadScalar {
            a,
            b: Rational::zero(),
            d,
        }
    }

    pub fn from_int(n: i64, d: u64) -> Self {
        Self::from_rational(Rational::from(BigInt::from(n)), d)
    }

    /// The pure radical `sqrt(d)` itself.
    pub fn sqrt_d(d: u64) -> Result<Self, NumError> {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn radical_part(&self) -> &Rational {
        &self.b
    }

    pub fn field(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn expect_same_field(&self, rhs: &Self) -> Result<(), NumError> {
        if self.d != rhs.d {
            return Err(NumError::FieldMismatch(self.d, rhs.d));
        }
        Ok(())
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, NumError> {
        self.expect_same_field(rhs)?;
        Ok(Self::fold(&self.a + &rhs.a, &self.b + &rhs.b, self.d))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, NumError> {
        self.expect_same_field(rhs)?;
        Ok(Self::fold(&self.a - &rhs.a, &self.b - &rhs.b, self.d))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, NumError> {
        self.expect_same_field(rhs)?;
        let d = Rational::from(BigInt::from(self.d));
        // (a1 + b1 r)(a2 + b2 r) = a1 a2 + b1 b2 d + (a1 b2 + b1 a2) r
        let a = &self.a * &rhs.a + &self.b * &rhs.b * d;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Ok(Self::fold(a, b, self.d))
    }

    /// Multiplicative inverse via the conjugate: 1/(a+br) = (a-br)/(a^2 - b^2 d).
    pub fn checked_inv(&self) -> Result<Self, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        let d = Rational::from(BigInt::from(self.d));
        let norm = &self.a * &self.a - &self.b * &self.b * d;
        if norm.is_zero() {
            // a^2 = b^2 d with d square-free forces a = b = 0, handled above.
            unreachable!("nonzero quadratic scalar with zero norm");
        }
        Ok(Self::fold(&self.a / &norm, -(&self.b / &norm), self.d))
    }

    pub fn negated(&self) -> Self {
        QuadScalar {
            a: -&self.a,
            b: -&self.b,
            d: self.d,
        }
    }

    /// Exact sign of the real number `a + b*sqrt(d)`, by case analysis on the
    /// signs of `a` and `b` and comparison of `a^2` against `b^2 d`. No floats.
    pub fn sign(&self) -> i8 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        if sb == 0 || self.d == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: compare |a| with |b| sqrt(d) via squares.
        let d = Rational::from(BigInt::from(self.d));
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * d;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Float image, for reporting and test oracles only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }
}

fn rational_sign(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QuadScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.d != other.d {
            return None;
        }
        let diff = self.checked_sub(other).ok()?;
        Some(match diff.sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        })
    }
}

impl fmt::Display for QuadScalar {
    /// Canonical text form, re-readable by [`parse_scalar`]: `a`, `a+br`,
    /// or `a-br` with `r` standing for sqrt(d). Examples: `-1`, `1/2+3r`, `0+1r`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.b.is_negative() {
            write!(f, "{}-{}r", self.a, -&self.b)
        } else {
            write!(f, "{}+{}r", self.a, self.b)
        }
    }
}

/// Parse the scalar grammar `rational (('+'|'-') rational 'r')?` where
/// `rational` is `'-'? int ('/' posint)?` and `r` denotes sqrt(d).
///
/// A bare radical needs an explicit rational part: write `0+1r`, not `1r`.
pub fn parse_scalar(text: &str, d: u64) -> Result<QuadScalar, ParseError> {
    if !is_square_free(d) {
        return parse_fail(0, format!("{d} is not square-free"));
    }
    let bytes = text.as_bytes();
    let (a, mut pos) = parse_rational(bytes, 0)?;
    if pos == bytes.len() {
        return QuadScalar::new(a, Rational::zero(), d).map_err(|e| ParseError {
            position: 0,
            message: e.to_string(),
        });
    }
    let sign = match bytes[pos] {
        b'+' => Rational::one(),
        b'-' => -Rational::one(),
        b'r' => {
            return parse_fail(pos, "radical needs an explicit rational part, e.g. 0+1r");
        }
        c => return parse_fail(pos, format!("expected '+' or '-', found {:?}", c as char)),
    };
    pos += 1;
    let (b_mag, pos2) = parse_rational(bytes, pos)?;
    pos = pos2;
    if pos >= bytes.len() || bytes[pos] != b'r' {
        return parse_fail(pos, "expected 'r' after radical coefficient");
    }
    pos += 1;
    if pos != bytes.len() {
        return parse_fail(pos, "trailing characters after scalar");
    }
    QuadScalar::new(a, sign * b_mag, d).map_err(|e| ParseError {
        position: 0,
        message: e.to_string(),
    })
}

fn parse_rational(bytes: &[u8], mut pos: usize) -> Result<(Rational, usize), ParseError> {
    let start = pos;
    if pos < bytes.len() && bytes[pos] == b'-' {
        pos += 1;
    }
    let num_start = pos;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == num_start {
        return parse_fail(pos, "expected an integer");
    }
    let num: BigInt = std::str::from_utf8(&bytes[start..pos])
        .expect("ascii digits")
        .parse()
        .expect("digit run parses as BigInt");
    if pos < bytes.len() && bytes[pos] == b'/' {
        pos += 1;
        let den_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == den_start {
            return parse_fail(pos, "expected a positive denominator");
        }
        let den: BigInt = std::str::from_utf8(&bytes[den_start..pos])
            .expect("ascii digits")
            .parse()
            .expect("digit run parses as BigInt");
        if den.is_zero() {
            return parse_fail(den_start, "denominator must be positive");
        }
        Ok((Rational::new(num, den), pos))
    } else {
        Ok((Rational::from(num), pos))
    }
}

/// `f64` with a dataset-wide tolerance; two values are equal when they differ
/// by at most epsilon. Backs the trigonometric datasets only.
#[derive(Debug, Clone, Copy)]
pub struct ApproxScalar {
    value: f64,
    eps: f64,
}

impl ApproxScalar {
    pub fn new(value: f64, eps: f64) -> Self {
        debug_assert!(eps > 0.0 && eps.is_finite());
        ApproxScalar { value, eps }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn sign(&self) -> i8 {
        if self.value.abs() <= self.eps {
            0
        } else if self.value > 0.0 {
            1
        } else {
            -1
        }
    }
}

impl PartialEq for ApproxScalar {
    fn eq(&self, other: &Self) -> bool {
        (self.value - other.value).abs() <= self.eps.max(other.eps)
    }
}

impl fmt::Display for ApproxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // {:?} on f64 prints the shortest representation that round-trips.
        write!(f, "{:?}", self.value)
    }
}

/// Common face of [`QuadScalar`] and [`ApproxScalar`] for the generic linear
/// algebra. The arithmetic methods panic on a field mismatch: datasets fix a
/// single field up front, so a mismatch inside the algorithms is a bug, and
/// the fallible entry points live on the concrete types.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Multiplicative inverse of a value already known to be nonzero.
    fn invert(&self) -> Self;
    fn negated(&self) -> Self;
    fn sign(&self) -> i8;
    /// Total order used only for canonical sorting of distinct objects.
    fn canonical_cmp(&self, rhs: &Self) -> Ordering;
    fn is_zero(&self) -> bool {
        self.sign() == 0
    }
    fn is_one(&self) -> bool {
        self.sub(&self.one_like()).is_zero()
    }
}

impl Scalar for QuadScalar {
    fn zero_like(&self) -> Self {
        Self::from_int(0, self.d)
    }

    fn one_like(&self) -> Self {
        Self::from_int(1, self.d)
    }

    fn add(&self, rhs: &Self) -> Self {
        self.checked_add(rhs).expect("mixed quadratic fields")
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.checked_sub(rhs).expect("mixed quadratic fields")
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs).expect("mixed quadratic fields")
    }

    fn invert(&self) -> Self {
        self.checked_inv().expect("inverting zero")
    }

    fn negated(&self) -> Self {
        QuadScalar::negated(self)
    }

    fn sign(&self) -> i8 {
        QuadScalar::sign(self)
    }

    fn canonical_cmp(&self, rhs: &Self) -> Ordering {
        self.partial_cmp(rhs).expect("mixed quadratic fields")
    }
}

impl Scalar for ApproxScalar {
    fn zero_like(&self) -> Self {
        ApproxScalar::new(0.0, self.eps)
    }

    fn one_like(&self) -> Self {
        ApproxScalar::new(1.0, self.eps)
    }

    fn add(&self, rhs: &Self) -> Self {
        ApproxScalar::new(self.value + rhs.value, self.eps.max(rhs.eps))
    }

    fn sub(&self, rhs: &Self) -> Self {
        ApproxScalar::new(self.value - rhs.value, self.eps.max(rhs.eps))
    }

    fn mul(&self, rhs: &Self) -> Self {
        ApproxScalar::new(self.value * rhs.value, self.eps.max(rhs.eps))
    }

    fn invert(&self) -> Self {
        debug_assert!(self.sign() != 0, "inverting zero");
        ApproxScalar::new(1.0 / self.value, self.eps)
    }

    fn negated(&self) -> Self {
        ApproxScalar::new(-self.value, self.eps)
    }

    fn sign(&self) -> i8 {
        ApproxScalar::sign(self)
    }

    fn canonical_cmp(&self, rhs: &Self) -> Ordering {
        self.value.total_cmp(&rhs.value)
    }
}
