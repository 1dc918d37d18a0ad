//! Scalar backends: exact rationals, `f64` reals and `Complex64` complexes.
//!
//! Library code is generic over [`Field`], so two backends can never meet in
//! one arithmetic expression. The runtime-tagged [`Scalar`] exists for the
//! text surface (CLI documents, Python bindings) and rejects mixing with
//! [`Error::BackendMismatch`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Entries with modulus at or below this are zero in float backends.
pub const ZERO_TOL: f64 = 1e-12;
/// Row-reduction pivots below `PIVOT_REL_TOL * max|entry|` are treated as zero.
pub const PIVOT_REL_TOL: f64 = 1e-10;
/// Identity checks (Leibniz, multiplicativity, alpha^eta = 1) in float backends.
pub const CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    Rational,
    Real,
    Complex,
}

impl FieldTag {
    pub fn supports_exp(self) -> bool {
        !matches!(self, FieldTag::Rational)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FieldTag::Rational => "rational",
            FieldTag::Real => "real",
            FieldTag::Complex => "complex",
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rational" | "q" => Ok(FieldTag::Rational),
            "real" | "r" => Ok(FieldTag::Real),
            "complex" | "c" => Ok(FieldTag::Complex),
            other => Err(Error::Parse(format!("unknown field tag {other:?}"))),
        }
    }
}

/// Nonnegative magnitudes produced by [`Field::modulus`]: exact for
/// rationals, `f64` otherwise.
pub trait Modulus:
    Clone + fmt::Debug + PartialOrd + Add<Output = Self> + Mul<Output = Self>
{
    fn zero() -> Self;
    fn to_f64(&self) -> f64;
}

impl Modulus for Rational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Modulus for f64 {
    fn zero() -> Self {
        0.0
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

/// A characteristic-zero field backend.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type Modulus: Modulus;
    const TAG: FieldTag;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    /// Exact for rationals (binary expansion of the float).
    fn from_f64(v: f64) -> Self;
    fn modulus(&self) -> Self::Modulus;
    /// Approximate modulus, used for pivoting and tolerance scaling.
    fn magnitude(&self) -> f64;
    fn to_complex(&self) -> Complex64;
    fn encode(&self) -> String;

    fn is_exact() -> bool {
        Self::TAG == FieldTag::Rational
    }

    /// Exact zero test for rationals, `|x| <= rel * scale` for floats.
    fn is_negligible(&self, rel: f64, scale: f64) -> bool;

    /// Exact equality for rationals; for floats each of the real and
    /// imaginary parts must agree within `tol * scale`.
    fn approx_eq(&self, other: &Self, tol: f64, scale: f64) -> bool;

    /// Zero test used for structural entries (`a_ij != 0`).
    fn is_structurally_zero(&self) -> bool {
        self.is_negligible(ZERO_TOL, 1.0)
    }
}

impl Field for Rational {
    type Modulus = Rational;
    const TAG: FieldTag = FieldTag::Rational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(Zero::zero)
    }
    fn modulus(&self) -> Rational {
        self.abs()
    }
    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(ToPrimitive::to_f64(self).unwrap_or(f64::NAN), 0.0)
    }
    fn encode(&self) -> String {
        format_rational(self)
    }
    fn is_negligible(&self, _rel: f64, _scale: f64) -> bool {
        self.is_zero()
    }
    fn approx_eq(&self, other: &Self, _tol: f64, _scale: f64) -> bool {
        self == other
    }
}

impl Field for f64 {
    type Modulus = f64;
    const TAG: FieldTag = FieldTag::Real;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn encode(&self) -> String {
        // `+ 0.0` maps -0 to 0.
        format!("{}", self + 0.0)
    }
    fn is_negligible(&self, rel: f64, scale: f64) -> bool {
        self.abs() <= rel * scale
    }
    fn approx_eq(&self, other: &Self, tol: f64, scale: f64) -> bool {
        (self - other).abs() <= tol * scale
    }
}

impl Field for Complex64 {
    type Modulus = f64;
    const TAG: FieldTag = FieldTag::Complex;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_bigint(v: &BigInt) -> Self {
        Complex64::new(v.to_f64().unwrap_or(f64::INFINITY), 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn encode(&self) -> String {
        format_complex(*self)
    }
    fn is_negligible(&self, rel: f64, scale: f64) -> bool {
        self.norm() <= rel * scale
    }
    fn approx_eq(&self, other: &Self, tol: f64, scale: f64) -> bool {
        let d = self - other;
        d.re.abs() <= tol * scale && d.im.abs() <= tol * scale
    }
}

/// Backends with an exponential: reals and complexes.
pub trait Transcendental: Field {
    fn exp(&self) -> Self;
    /// Principal logarithm; nonpositive reals are a branch error.
    fn ln(&self) -> Result<Self>;
    /// Principal power `self^e`; nonpositive reals are a branch error.
    fn powf(&self, e: f64) -> Result<Self>;
}

impl Transcendental for f64 {
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Result<Self> {
        if *self > 0.0 {
            Ok(f64::ln(*self))
        } else {
            Err(Error::Branch(format!("no real logarithm of {self}")))
        }
    }
    fn powf(&self, e: f64) -> Result<Self> {
        if *self > 0.0 {
            Ok(f64::powf(*self, e))
        } else {
            Err(Error::Branch(format!(
                "fractional power of nonpositive real {self}"
            )))
        }
    }
}

impl Transcendental for Complex64 {
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn ln(&self) -> Result<Self> {
        if self.norm() == 0.0 {
            Err(Error::Branch("logarithm of zero".into()))
        } else {
            Ok(Complex64::ln(*self))
        }
    }
    fn powf(&self, e: f64) -> Result<Self> {
        if self.norm() == 0.0 {
            Err(Error::Branch("fractional power of zero".into()))
        } else {
            Ok(Complex64::powf(*self, e))
        }
    }
}

/// `x^k` by repeated squaring.
pub fn pow_int<F: Field>(x: &F, mut k: u64) -> F {
    let mut base = x.clone();
    let mut acc = F::one();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base.clone();
        }
        k >>= 1;
        if k > 0 {
            base = base.clone() * base;
        }
    }
    acc
}

/// `x^(2^e)` by `e` squarings.
pub fn pow_two_power<F: Field>(x: &F, e: u32) -> F {
    let mut acc = x.clone();
    for _ in 0..e {
        acc = acc.clone() * acc;
    }
    acc
}

/// `2^e` as an exact big integer.
pub fn two_pow(e: u32) -> BigInt {
    BigInt::from(1u8) << e as usize
}

/// Positive gcd of the absolute values.
pub fn gcd_int(values: &[BigInt]) -> Result<BigInt> {
    let (first, rest) = values
        .split_first()
        .ok_or_else(|| Error::Domain("gcd of an empty list".into()))?;
    let g = rest.iter().fold(first.abs(), |g, v| g.gcd(v));
    if g.is_zero() {
        return Err(Error::Domain("gcd of zeros".into()));
    }
    Ok(g)
}

fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn format_complex(z: Complex64) -> String {
    let z = Complex64::new(z.re + 0.0, z.im + 0.0);
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::Parse(format!("invalid rational {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| err())?;
    let q: BigInt = q.parse().map_err(|_| err())?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(p, q))
}

fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("invalid real literal {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite real literal {s:?}")));
    }
    Ok(v)
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let err = || Error::Parse(format!("invalid complex literal {s:?}"));
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(s).map_err(|_| err())?, 0.0));
    };
    // Split at the last sign that is not part of an exponent or leading.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            t => parse_real(t).map_err(|_| err()),
        }
    };
    match split {
        Some(k) => {
            let re = parse_real(&body[..k]).map_err(|_| err())?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// A field element carrying its backend tag at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(Rational),
    Real(f64),
    Complex(Complex64),
}

impl Scalar {
    pub fn tag(&self) -> FieldTag {
        match self {
            Scalar::Rational(_) => FieldTag::Rational,
            Scalar::Real(_) => FieldTag::Real,
            Scalar::Complex(_) => FieldTag::Complex,
        }
    }

    /// Parses the text encoding of `tag`: `p/q` or `p` for rationals, decimal
    /// literals for reals, `a+bi` / `a-bi` for complexes.
    pub fn parse(tag: FieldTag, text: &str) -> Result<Self> {
        let s = text.trim();
        match tag {
            FieldTag::Rational => parse_rational(s).map(Scalar::Rational),
            FieldTag::Real => parse_real(s).map(Scalar::Real),
            FieldTag::Complex => parse_complex(s).map(Scalar::Complex),
        }
    }

    pub fn encode(&self) -> String {
        match self {
            Scalar::Rational(q) => q.encode(),
            Scalar::Real(x) => x.encode(),
            Scalar::Complex(z) => z.encode(),
        }
    }

    pub fn pow_int(&self, k: u64) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(pow_int(q, k)),
            Scalar::Real(x) => Scalar::Real(pow_int(x, k)),
            Scalar::Complex(z) => Scalar::Complex(pow_int(z, k)),
        }
    }

    pub fn exp(&self) -> Result<Scalar> {
        match self {
            Scalar::Rational(_) => Err(Error::UnsupportedBackend(FieldTag::Rational)),
            Scalar::Real(x) => Ok(Scalar::Real(x.exp())),
            Scalar::Complex(z) => Ok(Scalar::Complex(z.exp())),
        }
    }

    fn combine(
        &self,
        other: &Scalar,
        q: impl FnOnce(&Rational, &Rational) -> Rational,
        r: impl FnOnce(f64, f64) -> f64,
        c: impl FnOnce(Complex64, Complex64) -> Complex64,
    ) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(q(a, b))),
            (Scalar::Real(a), Scalar::Real(b)) => Ok(Scalar::Real(r(*a, *b))),
            (Scalar::Complex(a), Scalar::Complex(b)) => Ok(Scalar::Complex(c(*a, *b))),
            _ => Err(Error::BackendMismatch {
                left: self.tag(),
                right: other.tag(),
            }),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.combine(other, |a, b| a + b, |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.combine(other, |a, b| a - b, |a, b| a - b, |a, b| a - b)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.combine(other, |a, b| a * b, |a, b| a * b, |a, b| a * b)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        let zero = match other {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Real(x) => *x == 0.0,
            Scalar::Complex(z) => z.norm() == 0.0,
        };
        if zero && self.tag() == other.tag() {
            return Err(Error::Domain("division by zero".into()));
        }
        self.combine(other, |a, b| a / b, |a, b| a / b, |a, b| a / b)
    }

    pub fn as_rational(&self) -> Result<&Rational> {
        match self {
            Scalar::Rational(q) => Ok(q),
            s => Err(Error::BackendMismatch {
                left: FieldTag::Rational,
                right: s.tag(),
            }),
        }
    }

    pub fn as_real(&self) -> Result<f64> {
        match self {
            Scalar::Real(x) => Ok(*x),
            s => Err(Error::BackendMismatch {
                left: FieldTag::Real,
                right: s.tag(),
            }),
        }
    }

    pub fn as_complex(&self) -> Result<Complex64> {
        match self {
            Scalar::Complex(z) => Ok(*z),
            s => Err(Error::BackendMismatch {
                left: FieldTag::Complex,
                right: s.tag(),
            }),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Typed view of a [`Scalar`].
pub trait FromScalar: Field {
    fn from_scalar(s: &Scalar) -> Result<Self>;
    fn into_scalar(self) -> Scalar;
}

impl FromScalar for Rational {
    fn from_scalar(s: &Scalar) -> Result<Self> {
        s.as_rational().cloned()
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Rational(self)
    }
}

impl FromScalar for f64 {
    fn from_scalar(s: &Scalar) -> Result<Self> {
        s.as_real()
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Real(self)
    }
}

impl FromScalar for Complex64 {
    fn from_scalar(s: &Scalar) -> Result<Self> {
        s.as_complex()
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Complex(self)
    }
}
