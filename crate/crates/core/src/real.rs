//! Extended-precision reals.
//!
//! Every sequence value in the crate is a [`Real`]: a binary floating point
//! number with a configurable mantissa (at least 100 bits, 128 by default)
//! and a 32-bit binary exponent. The exponent range is what matters here:
//! `exp(12 * 4096^2)` is far outside `f64` but representable as a `Real`.
//!
//! The working precision is read once from `KDIAM_PRECISION_BITS`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{KdiamError, Result};

/// Environment variable selecting the mantissa width in bits.
pub const PRECISION_ENV: &str = "KDIAM_PRECISION_BITS";
pub const DEFAULT_PRECISION_BITS: usize = 128;
pub const MIN_PRECISION_BITS: usize = 100;

const RM: RoundingMode = RoundingMode::ToEven;

static PRECISION: OnceLock<usize> = OnceLock::new();

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

/// Working precision in bits. Values below [`MIN_PRECISION_BITS`] are raised
/// to the minimum; unparsable values fall back to the default.
pub fn precision_bits() -> usize {
    *PRECISION.get_or_init(|| {
        std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .map(|p| p.max(MIN_PRECISION_BITS))
            .unwrap_or(DEFAULT_PRECISION_BITS)
    })
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// A finite extended-precision real. NaN and infinities never escape the
/// constructors; operations that would produce them return an error.
#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    fn checked(v: BigFloat, what: &str) -> Result<Real> {
        if v.is_nan() {
            Err(KdiamError::Domain(format!("{what} is undefined")))
        } else if v.is_inf() {
            Err(KdiamError::Range(format!(
                "{what} overflows the working precision ({} bits)",
                precision_bits()
            )))
        } else {
            Ok(Real(v))
        }
    }

    pub fn zero() -> Real {
        Real(BigFloat::from_word(0, precision_bits()))
    }

    pub fn one() -> Real {
        Real::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Real {
        Real(BigFloat::from_i64(v, precision_bits()))
    }

    pub fn from_u64(v: u64) -> Real {
        Real(BigFloat::from_u64(v, precision_bits()))
    }

    /// Converts a finite `f64`; NaN and infinities are rejected.
    pub fn from_f64(v: f64) -> Result<Real> {
        if !v.is_finite() {
            return Err(KdiamError::Domain(format!("non-finite value {v}")));
        }
        Ok(Real(BigFloat::from_f64(v, precision_bits())))
    }

    pub fn from_bigint(v: &BigInt) -> Real {
        if let Some(small) = v.to_i64() {
            return Real::from_i64(small);
        }
        let p = precision_bits();
        with_consts(|cc| Real(BigFloat::parse(&v.to_string(), Radix::Dec, p, RM, cc)))
    }

    pub fn from_rational(r: &BigRational) -> Real {
        let n = Real::from_bigint(r.numer());
        if r.denom() == &BigInt::from(1) {
            return n;
        }
        let d = Real::from_bigint(r.denom());
        Real(n.0.div(&d.0, precision_bits(), RM))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.0.is_zero() && self.0.is_positive()
    }

    pub fn add(&self, other: &Real) -> Result<Real> {
        Real::checked(self.0.add(&other.0, precision_bits(), RM), "sum")
    }

    pub fn sub(&self, other: &Real) -> Result<Real> {
        Real::checked(self.0.sub(&other.0, precision_bits(), RM), "difference")
    }

    pub fn mul(&self, other: &Real) -> Result<Real> {
        Real::checked(self.0.mul(&other.0, precision_bits(), RM), "product")
    }

    pub fn div(&self, other: &Real) -> Result<Real> {
        if other.is_zero() {
            return Err(KdiamError::Domain("division by zero".into()));
        }
        Real::checked(self.0.div(&other.0, precision_bits(), RM), "quotient")
    }

    pub fn neg(&self) -> Real {
        Real(self.0.neg())
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }

    pub fn exp(&self) -> Result<Real> {
        let p = precision_bits();
        let v = with_consts(|cc| self.0.exp(p, RM, cc));
        Real::checked(v, "exponential")
    }

    /// Natural logarithm of a strictly positive value.
    pub fn ln(&self) -> Result<Real> {
        if !self.is_positive() {
            return Err(KdiamError::Domain(format!(
                "logarithm of non-positive value {self}"
            )));
        }
        let p = precision_bits();
        let v = with_consts(|cc| self.0.ln(p, RM, cc));
        Real::checked(v, "logarithm")
    }

    /// `self^e` for `self >= 0`. `0^e` is 0 for `e > 0` and 1 for `e = 0`.
    pub fn pow(&self, e: &Real) -> Result<Real> {
        if self.is_negative() {
            return Err(KdiamError::Domain(format!(
                "real power of negative value {self}"
            )));
        }
        if self.is_zero() {
            return if e.is_zero() {
                Ok(Real::one())
            } else if e.is_positive() {
                Ok(Real::zero())
            } else {
                Err(KdiamError::Domain("negative power of zero".into()))
            };
        }
        // BigFloat::pow does not terminate on exact results such as 4^(1/2)
        self.ln()?.mul(e)?.exp()
    }

    pub fn powi(&self, n: usize) -> Result<Real> {
        Real::checked(self.0.powi(n, precision_bits(), RM), "integer power")
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Nearest `f64`; saturates to `±inf` / `0` outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        let Some((words, _bits, sign, exponent, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let top = *words.last().unwrap_or(&0) as u64;
        let next = if words.len() >= 2 {
            words[words.len() - 2] as u64
        } else {
            0
        };
        let word_bits = (std::mem::size_of_val(&top) * 8) as i32;
        // mantissa is 0.top next ... in binary, value = 0.m * 2^exponent
        let m = top as f64 + next as f64 / 2f64.powi(word_bits);
        let scale = exponent - word_bits;
        let v = ldexp(m, scale);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }

    /// Exact conversion of a short decimal or rational literal.
    pub fn parse_decimal(text: &str) -> Result<Real> {
        let r = parse_rational(text)?;
        Ok(Real::from_rational(&r))
    }

    /// Shortest-ish decimal rendering at full working precision.
    pub fn to_decimal_string(&self) -> String {
        if self.0.is_zero() {
            return "0".into();
        }
        let s = with_consts(|cc| self.0.format(Radix::Dec, RM, cc));
        s.unwrap_or_else(|_| format!("{}", self.to_f64()))
    }
}

fn ldexp(m: f64, e: i32) -> f64 {
    if e > 2200 {
        return f64::INFINITY;
    }
    if e < -2200 {
        return 0.0;
    }
    let mut v = m;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e)
}

/// Parses `a`, `a/b`, or a decimal `x.y[e±z]` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let err = || KdiamError::Parse {
        location: 0,
        message: format!("invalid number `{text}`"),
    };
    if let Some((a, b)) = t.split_once('/') {
        let n = parse_rational(a)?;
        let d = parse_rational(b)?;
        if d.is_zero() {
            return Err(KdiamError::Parse {
                location: 0,
                message: format!("zero denominator in `{text}`"),
            });
        }
        return Ok(n / d);
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (mantissa, exp10) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0")
        .parse::<BigInt>()
        .map_err(|_| err())?
        / BigInt::from(10);
    let scale = exp10 - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(if neg { -r } else { r })
}

/// Renders a rational in the literal syntax accepted by [`parse_rational`].
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        let s = format!("{}/{}", r.numer().abs(), r.denom());
        if r.is_negative() {
            format!("-{s}")
        } else {
            s
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.0.cmp(&other.0) {
            Some(c) if c < 0 => Ordering::Less,
            Some(c) if c > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_f64())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_f64();
        if v.is_finite() && (v == 0.0 || v.abs() > 1e-300) {
            write!(f, "{v}")
        } else {
            f.write_str(&self.to_decimal_string())
        }
    }
}

/// A value in `[-inf, +inf]` used for logarithms of non-negative
/// quantities and for criterion values that may be unbounded.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtendedReal {
    NegInfinity,
    Finite(Real),
    PosInfinity,
}

impl ExtendedReal {
    pub fn finite(&self) -> Option<&Real> {
        match self {
            ExtendedReal::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_pos_infinite(&self) -> bool {
        matches!(self, ExtendedReal::PosInfinity)
    }

    /// `+inf` absorbs addition; `-inf + +inf` is reported as a domain error.
    pub fn add(&self, other: &ExtendedReal) -> Result<ExtendedReal> {
        use ExtendedReal::*;
        match (self, other) {
            (PosInfinity, NegInfinity) | (NegInfinity, PosInfinity) => Err(KdiamError::Domain(
                "indeterminate sum of opposite infinities".into(),
            )),
            (PosInfinity, _) | (_, PosInfinity) => Ok(PosInfinity),
            (NegInfinity, _) | (_, NegInfinity) => Ok(NegInfinity),
            (Finite(a), Finite(b)) => Ok(Finite(a.add(b)?)),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedReal::NegInfinity => f64::NEG_INFINITY,
            ExtendedReal::PosInfinity => f64::INFINITY,
            ExtendedReal::Finite(r) => r.to_f64(),
        }
    }
}

impl From<Real> for ExtendedReal {
    fn from(r: Real) -> Self {
        ExtendedReal::Finite(r)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInfinity => f.write_str("-inf"),
            ExtendedReal::PosInfinity => f.write_str("+inf"),
            ExtendedReal::Finite(r) => write!(f, "{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_literals() {
        assert_eq!(rat("3"), BigRational::from_integer(3.into()));
        assert_eq!(rat("1/2"), BigRational::new(1.into(), 2.into()));
        assert_eq!(rat("-0.25"), BigRational::new((-1).into(), 4.into()));
        assert_eq!(rat("1e-3"), BigRational::new(1.into(), 1000.into()));
        assert_eq!(rat("2.5e2"), BigRational::from_integer(250.into()));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn f64_round_trip() {
        for v in [1.0, -2.5, 1e-200, 3.75e150, 0.1] {
            let r = Real::from_f64(v).unwrap();
            assert_eq!(r.to_f64(), v);
        }
    }

    #[test]
    fn huge_exponentials_stay_finite() {
        let x = Real::from_i64(12 * 4096 * 4096);
        let e = x.exp().unwrap();
        assert_eq!(e.to_f64(), f64::INFINITY);
        assert_eq!(e.ln().unwrap(), x.clone().max(Real::zero()));
    }

    #[test]
    fn overflow_is_an_error() {
        let x = Real::from_f64(1e12).unwrap();
        assert!(matches!(x.exp(), Err(KdiamError::Range(_))));
    }

    #[test]
    fn precision_is_at_least_minimum() {
        assert!(precision_bits() >= MIN_PRECISION_BITS);
    }

    #[test]
    fn extended_ordering() {
        let a = ExtendedReal::Finite(Real::one());
        assert!(ExtendedReal::NegInfinity < a);
        assert!(a < ExtendedReal::PosInfinity);
        assert_eq!(
            a.add(&ExtendedReal::PosInfinity).unwrap(),
            ExtendedReal::PosInfinity
        );
    }
}
