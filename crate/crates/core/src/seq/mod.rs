//! Closed-form and tabulated real sequences indexed from 0.
//!
//! A [`Seq`] is a small expression tree over the index `n`. The textual
//! grammar (see [`parse`]) is the one used in space files and candidate
//! lists; `Display` prints the canonical form, which re-parses to an equal
//! tree.

mod cached;
pub mod limits;
mod parse;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{KdiamError, Result};
use crate::real::{format_rational, ExtendedReal, Real};

pub use cached::CachedSeq;
pub use limits::{liminf_ratio, limsup_ratio, CriterionValue, Mode};
pub use parse::parse;

pub type Index = u64;

#[derive(Clone, Debug, PartialEq)]
pub enum Seq {
    Const(BigRational),
    /// `n^s`; `0^s` is 0 for `s > 0` and 1 for `s = 0`.
    Poly(BigRational),
    /// `ln n`, with `ln 0 := 0`.
    Log,
    /// `ln ln n` for `n >= 3`, and 0 below.
    LogLog,
    /// `e^{c n}`.
    ExpLinear(BigRational),
    Exp(Box<Seq>),
    LogOf(Box<Seq>),
    Pow(Box<Seq>, BigRational),
    /// `sum c_i S_i`; never nested, never a single `(1, S)` term.
    Combo(Vec<(BigRational, Seq)>),
    Product(Vec<Seq>),
    Max(Box<Seq>, Box<Seq>),
    /// Exact prefix values, then `tail` evaluated at the same index.
    Table {
        prefix: Vec<BigRational>,
        tail: Option<Box<Seq>>,
    },
    /// Periodic values `v[n mod len]`.
    Cycle(Vec<BigRational>),
    /// Computed values without a closed form, e.g. rearranged diameters.
    Samples(Arc<Vec<ExtendedReal>>),
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl Seq {
    pub fn constant(c: BigRational) -> Seq {
        Seq::Const(c)
    }

    pub fn identity() -> Seq {
        Seq::Poly(rat(1))
    }

    pub fn poly(s: BigRational) -> Seq {
        Seq::Poly(s)
    }

    /// `ln(n + 1)`.
    pub fn log1p() -> Seq {
        Seq::log_of(Seq::sum(vec![Seq::identity(), Seq::Const(rat(1))]))
    }

    pub fn exp_linear(c: BigRational) -> Seq {
        Seq::ExpLinear(c)
    }

    pub fn exp(s: Seq) -> Seq {
        match s {
            Seq::Poly(ref e) if e.is_one() => Seq::ExpLinear(rat(1)),
            Seq::Combo(ref terms) if terms.len() == 1 && terms[0].1 == Seq::Poly(rat(1)) => {
                Seq::ExpLinear(terms[0].0.clone())
            }
            other => Seq::Exp(Box::new(other)),
        }
    }

    pub fn log_of(s: Seq) -> Seq {
        if s == Seq::identity() {
            return Seq::Log;
        }
        Seq::LogOf(Box::new(s))
    }

    pub fn pow(s: Seq, e: BigRational) -> Seq {
        if e.is_one() {
            return s;
        }
        match s {
            Seq::Poly(p) => Seq::Poly(p * e),
            Seq::Pow(inner, p) => Seq::Pow(inner, p * e),
            other => Seq::Pow(Box::new(other), e),
        }
    }

    pub fn max(a: Seq, b: Seq) -> Seq {
        Seq::Max(Box::new(a), Box::new(b))
    }

    /// `c * s`, distributing over sums and folding constants.
    pub fn scale(c: BigRational, s: Seq) -> Seq {
        if c.is_zero() {
            return Seq::Const(rat(0));
        }
        if c.is_one() {
            return s;
        }
        match s {
            Seq::Const(v) => Seq::Const(c * v),
            Seq::Combo(terms) => {
                Seq::Combo(terms.into_iter().map(|(k, t)| (k * c.clone(), t)).collect())
            }
            other => Seq::Combo(vec![(c, other)]),
        }
    }

    /// Sum of sequences with like constants merged.
    pub fn sum(parts: Vec<Seq>) -> Seq {
        let mut terms: Vec<(BigRational, Seq)> = Vec::new();
        let mut constant = rat(0);
        for p in parts {
            match p {
                Seq::Const(v) => constant += v,
                Seq::Combo(ts) => {
                    for (c, t) in ts {
                        match t {
                            Seq::Const(v) => constant += c * v,
                            t => terms.push((c, t)),
                        }
                    }
                }
                other => terms.push((rat(1), other)),
            }
        }
        if !constant.is_zero() {
            terms.push((constant, Seq::Const(rat(1))));
        }
        match terms.len() {
            0 => Seq::Const(rat(0)),
            1 => {
                let (c, t) = terms.pop().unwrap();
                if t == Seq::Const(rat(1)) {
                    Seq::Const(c)
                } else {
                    Seq::scale(c, t)
                }
            }
            _ => Seq::Combo(terms),
        }
    }

    /// Pointwise product with constant factors pulled out front.
    pub fn product(parts: Vec<Seq>) -> Seq {
        let mut c = rat(1);
        let mut factors = Vec::new();
        for p in parts {
            match p {
                Seq::Const(v) => c *= v,
                Seq::Combo(ref ts) if ts.len() == 1 => {
                    let (k, t) = ts[0].clone();
                    c *= k;
                    match t {
                        Seq::Product(fs) => factors.extend(fs),
                        t => factors.push(t),
                    }
                }
                Seq::Product(fs) => factors.extend(fs),
                other => factors.push(other),
            }
        }
        let base = match factors.len() {
            0 => return Seq::Const(c),
            1 => factors.pop().unwrap(),
            _ => Seq::Product(factors),
        };
        Seq::scale(c, base)
    }

    pub fn table(prefix: Vec<BigRational>, tail: Option<Seq>) -> Seq {
        Seq::Table {
            prefix,
            tail: tail.map(Box::new),
        }
    }

    pub fn samples(values: Vec<ExtendedReal>) -> Seq {
        Seq::Samples(Arc::new(values))
    }

    /// Splits off the top-level constant factor: `c * base`; a constant
    /// has no base.
    pub fn scale_and_base(&self) -> (BigRational, Option<&Seq>) {
        match self {
            Seq::Combo(ts) if ts.len() == 1 => {
                let (c, inner) = ts[0].1.scale_and_base();
                (ts[0].0.clone() * c, inner)
            }
            Seq::Const(v) => (v.clone(), None),
            other => (rat(1), Some(other)),
        }
    }

    /// `num / den` as an exact rational when both share the same base.
    pub fn exact_ratio(num: &Seq, den: &Seq) -> Option<BigRational> {
        let (cn, bn) = num.scale_and_base();
        let (cd, bd) = den.scale_and_base();
        if cd.is_zero() {
            return None;
        }
        if cn.is_zero() {
            return Some(rat(0));
        }
        let same = match (bn, bd) {
            (None, None) => true,
            (Some(Seq::Samples(x)), Some(Seq::Samples(y))) => Arc::ptr_eq(x, y) || x == y,
            (Some(x), Some(y)) => x == y,
            _ => false,
        };
        same.then(|| cn / cd)
    }

    pub fn eval(&self, n: Index) -> Result<Real> {
        match self {
            Seq::Const(v) => Ok(Real::from_rational(v)),
            Seq::Poly(s) => eval_poly(n, s),
            Seq::Log => {
                if n <= 1 {
                    Ok(Real::zero())
                } else {
                    Real::from_u64(n).ln()
                }
            }
            Seq::LogLog => {
                if n < 3 {
                    Ok(Real::zero())
                } else {
                    Real::from_u64(n).ln()?.ln()
                }
            }
            Seq::ExpLinear(c) => Real::from_rational(c).mul(&Real::from_u64(n))?.exp(),
            Seq::Exp(s) => s.eval(n)?.exp(),
            Seq::LogOf(s) => s.eval(n)?.ln(),
            Seq::Pow(s, e) => {
                let base = s.eval(n)?;
                pow_rational(&base, e)
            }
            Seq::Combo(terms) => {
                let mut acc = Real::zero();
                for (c, t) in terms {
                    acc = acc.add(&Real::from_rational(c).mul(&t.eval(n)?)?)?;
                }
                Ok(acc)
            }
            Seq::Product(fs) => {
                let mut acc = Real::one();
                for f in fs {
                    acc = acc.mul(&f.eval(n)?)?;
                }
                Ok(acc)
            }
            Seq::Max(a, b) => Ok(a.eval(n)?.max(b.eval(n)?)),
            Seq::Table { prefix, tail } => match prefix.get(n as usize) {
                Some(v) => Ok(Real::from_rational(v)),
                None => match tail {
                    Some(t) => t.eval(n),
                    None => Err(KdiamError::Argument(format!(
                        "index {n} beyond table of length {} without tail",
                        prefix.len()
                    ))),
                },
            },
            Seq::Cycle(vs) => Ok(Real::from_rational(&vs[(n % vs.len() as u64) as usize])),
            Seq::Samples(vs) => match vs.get(n as usize) {
                Some(ExtendedReal::Finite(v)) => Ok(v.clone()),
                Some(other) => Err(KdiamError::Range(format!(
                    "sample {n} is {other}, not a finite real"
                ))),
                None => Err(KdiamError::Argument(format!(
                    "index {n} beyond computed range {}",
                    vs.len()
                ))),
            },
        }
    }

    /// `ln |s_n|` computed without forming `s_n` where the tree allows it,
    /// so `exp(poly(2))` stays representable far beyond the point where its
    /// value would overflow. Zero maps to `-inf`.
    pub fn eval_ln_abs(&self, n: Index) -> Result<ExtendedReal> {
        match self {
            Seq::ExpLinear(c) => Ok(Real::from_rational(c).mul(&Real::from_u64(n))?.into()),
            Seq::Exp(s) => Ok(s.eval(n)?.into()),
            Seq::Poly(s) if n > 0 => {
                Ok(Real::from_rational(s).mul(&Real::from_u64(n).ln()?)?.into())
            }
            Seq::Pow(s, e) => {
                let inner = s.eval_ln_abs(n)?;
                scale_extended(&inner, e)
            }
            Seq::Combo(ts) if ts.len() == 1 => {
                let (c, t) = &ts[0];
                if c.is_zero() {
                    return Ok(ExtendedReal::NegInfinity);
                }
                let c_ln = Real::from_rational(&c.abs()).ln()?;
                t.eval_ln_abs(n)?.add(&ExtendedReal::Finite(c_ln))
            }
            Seq::Product(fs) => {
                let mut acc = ExtendedReal::Finite(Real::zero());
                for f in fs {
                    let l = f.eval_ln_abs(n)?;
                    if l == ExtendedReal::NegInfinity {
                        return Ok(l);
                    }
                    acc = acc.add(&l)?;
                }
                Ok(acc)
            }
            Seq::Samples(vs) => match vs.get(n as usize) {
                Some(ExtendedReal::Finite(v)) => ln_abs(v),
                Some(ExtendedReal::NegInfinity) | Some(ExtendedReal::PosInfinity) => {
                    Ok(ExtendedReal::PosInfinity)
                }
                None => self.eval(n).and_then(|v| ln_abs(&v)),
            },
            _ => ln_abs(&self.eval(n)?),
        }
    }

    /// Binary64 evaluation; `None` when an intermediate value is not a
    /// finite double or sits at a domain edge, where `eval` decides.
    pub fn eval_f64(&self, n: Index) -> Option<f64> {
        let x = n as f64;
        let v = match self {
            Seq::Const(v) => v.to_f64()?,
            Seq::Poly(s) if s.is_integer() && !s.is_negative() => x.powi(s.to_integer().to_i32()?),
            Seq::Poly(_) if n == 0 => return None,
            Seq::Poly(s) => x.powf(s.to_f64()?),
            Seq::Log => {
                if n <= 1 {
                    0.0
                } else {
                    x.ln()
                }
            }
            Seq::LogLog => {
                if n < 3 {
                    0.0
                } else {
                    x.ln().ln()
                }
            }
            Seq::ExpLinear(c) => (c.to_f64()? * x).exp(),
            Seq::Exp(s) => s.eval_f64(n)?.exp(),
            Seq::LogOf(s) => {
                let v = s.eval_f64(n)?;
                if v <= 0.0 {
                    return None;
                }
                v.ln()
            }
            Seq::Pow(s, e) => {
                let b = s.eval_f64(n)?;
                if e.is_integer() && !e.is_negative() {
                    b.powi(e.to_integer().to_i32()?)
                } else if b > 0.0 {
                    b.powf(e.to_f64()?)
                } else {
                    return None;
                }
            }
            Seq::Combo(terms) => {
                let mut acc = 0.0;
                for (c, t) in terms {
                    acc += c.to_f64()? * t.eval_f64(n)?;
                }
                acc
            }
            Seq::Product(fs) => {
                let mut acc = 1.0;
                for f in fs {
                    acc *= f.eval_f64(n)?;
                }
                acc
            }
            Seq::Max(a, b) => a.eval_f64(n)?.max(b.eval_f64(n)?),
            Seq::Table { prefix, tail } => match prefix.get(n as usize) {
                Some(v) => v.to_f64()?,
                None => tail.as_ref()?.eval_f64(n)?,
            },
            Seq::Cycle(vs) => vs[(n % vs.len() as u64) as usize].to_f64()?,
            Seq::Samples(vs) => match vs.get(n as usize)? {
                ExtendedReal::Finite(v) => v.to_f64(),
                _ => return None,
            },
        };
        v.is_finite().then_some(v)
    }

    /// `ln |s_n|` in binary64, falling back to `eval_ln_abs` whenever the
    /// fast path cannot represent an intermediate value.
    pub fn ln_abs_f64(&self, n: Index) -> Result<f64> {
        if let Some(v) = self.ln_abs_fast(n) {
            return Ok(v);
        }
        Ok(self.eval_ln_abs(n)?.to_f64())
    }

    fn ln_abs_fast(&self, n: Index) -> Option<f64> {
        match self {
            Seq::ExpLinear(c) => Some(c.to_f64()? * n as f64),
            Seq::Exp(s) => s.eval_f64(n),
            Seq::Poly(s) if n > 0 => Some(s.to_f64()? * (n as f64).ln()),
            Seq::Pow(s, e) => {
                let inner = s.ln_abs_fast(n)?;
                if inner == f64::NEG_INFINITY {
                    return None;
                }
                Some(inner * e.to_f64()?)
            }
            Seq::Combo(ts) if ts.len() == 1 => {
                let (c, t) = &ts[0];
                if c.is_zero() {
                    return Some(f64::NEG_INFINITY);
                }
                Some(c.abs().to_f64()?.ln() + t.ln_abs_fast(n)?)
            }
            Seq::Product(fs) => {
                let mut acc = 0.0;
                for f in fs {
                    let l = f.ln_abs_fast(n)?;
                    if l == f64::NEG_INFINITY {
                        return Some(l);
                    }
                    acc += l;
                }
                Some(acc)
            }
            Seq::Samples(_) => None,
            _ => {
                let v = self.eval_f64(n)?;
                Some(if v == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    v.abs().ln()
                })
            }
        }
    }

    /// Exact rational value when every node involved is rational at `n`.
    pub fn eval_rational(&self, n: Index) -> Option<BigRational> {
        match self {
            Seq::Const(v) => Some(v.clone()),
            Seq::Poly(s) => {
                if !s.is_integer() {
                    return None;
                }
                let e = s.to_integer().to_i64()?;
                let base = BigRational::from_integer(BigInt::from(n));
                if e >= 0 {
                    Some(num_traits::pow(base, e as usize))
                } else if n == 0 {
                    None
                } else {
                    Some(num_traits::pow(base, (-e) as usize).recip())
                }
            }
            Seq::Log | Seq::LogLog if n <= 1 => Some(rat(0)),
            Seq::ExpLinear(c) if c.is_zero() || n == 0 => Some(rat(1)),
            Seq::Combo(ts) => {
                let mut acc = rat(0);
                for (c, t) in ts {
                    acc += c * t.eval_rational(n)?;
                }
                Some(acc)
            }
            Seq::Product(fs) => {
                let mut acc = rat(1);
                for f in fs {
                    acc *= f.eval_rational(n)?;
                }
                Some(acc)
            }
            Seq::Max(a, b) => {
                let (x, y) = (a.eval_rational(n)?, b.eval_rational(n)?);
                Some(if x >= y { x } else { y })
            }
            Seq::Table { prefix, tail } => match prefix.get(n as usize) {
                Some(v) => Some(v.clone()),
                None => tail.as_ref()?.eval_rational(n),
            },
            Seq::Cycle(vs) => Some(vs[(n % vs.len() as u64) as usize].clone()),
            _ => None,
        }
    }

    /// Number of exact prefix entries that override the generator.
    pub fn prefix_len(&self) -> usize {
        match self {
            Seq::Table { prefix, .. } => prefix.len(),
            Seq::Samples(vs) => vs.len(),
            Seq::Combo(ts) => ts.iter().map(|(_, t)| t.prefix_len()).max().unwrap_or(0),
            Seq::Product(fs) => fs.iter().map(Seq::prefix_len).max().unwrap_or(0),
            Seq::Max(a, b) => a.prefix_len().max(b.prefix_len()),
            Seq::Exp(s) | Seq::LogOf(s) | Seq::Pow(s, _) => s.prefix_len(),
            _ => 0,
        }
    }

    /// Largest index that can be evaluated, if bounded.
    pub fn domain_limit(&self) -> Option<Index> {
        match self {
            Seq::Samples(vs) => Some(vs.len() as Index),
            Seq::Table { prefix, tail: None } => Some(prefix.len() as Index),
            Seq::Table { tail: Some(t), .. } => t.domain_limit(),
            Seq::Combo(ts) => ts.iter().filter_map(|(_, t)| t.domain_limit()).min(),
            Seq::Product(fs) => fs.iter().filter_map(Seq::domain_limit).min(),
            Seq::Max(a, b) => match (a.domain_limit(), b.domain_limit()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            Seq::Exp(s) | Seq::LogOf(s) | Seq::Pow(s, _) => s.domain_limit(),
            _ => None,
        }
    }

    /// `s_n^2`, kept in closed form where possible.
    pub fn squared(&self) -> Seq {
        match self {
            Seq::ExpLinear(c) => Seq::ExpLinear(c * rat(2)),
            Seq::Exp(s) => Seq::exp(Seq::scale(rat(2), (**s).clone())),
            Seq::Const(v) => Seq::Const(v * v),
            other => Seq::pow(other.clone(), rat(2)),
        }
    }
}

fn ln_abs(v: &Real) -> Result<ExtendedReal> {
    if v.is_zero() {
        Ok(ExtendedReal::NegInfinity)
    } else {
        Ok(v.abs().ln()?.into())
    }
}

fn scale_extended(v: &ExtendedReal, c: &BigRational) -> Result<ExtendedReal> {
    Ok(match v {
        ExtendedReal::Finite(r) => r.mul(&Real::from_rational(c))?.into(),
        inf if c.is_zero() => {
            let _ = inf;
            Real::zero().into()
        }
        ExtendedReal::NegInfinity if c.is_positive() => ExtendedReal::NegInfinity,
        ExtendedReal::NegInfinity => ExtendedReal::PosInfinity,
        ExtendedReal::PosInfinity if c.is_positive() => ExtendedReal::PosInfinity,
        ExtendedReal::PosInfinity => ExtendedReal::NegInfinity,
    })
}

fn eval_poly(n: Index, s: &BigRational) -> Result<Real> {
    if s.is_integer() && !s.is_negative() {
        if let Some(e) = s.to_integer().to_usize() {
            return Real::from_u64(n).powi(e);
        }
    }
    if n == 0 && s.is_negative() {
        return Err(KdiamError::Domain(format!(
            "poly({}) is undefined at n = 0",
            format_rational(s)
        )));
    }
    Real::from_u64(n).pow(&Real::from_rational(s))
}

fn pow_rational(base: &Real, e: &BigRational) -> Result<Real> {
    if e.is_integer() && !e.is_negative() && !base.is_negative() {
        if let Some(k) = e.to_integer().to_usize() {
            return base.powi(k);
        }
    }
    base.pow(&Real::from_rational(e))
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seq::Const(v) => f.write_str(&format_rational(v)),
            Seq::Poly(s) if s.is_one() => f.write_str("n"),
            Seq::Poly(s) => write!(f, "poly({})", format_rational(s)),
            Seq::Log => f.write_str("log"),
            Seq::LogLog => f.write_str("loglog"),
            Seq::ExpLinear(c) => write!(f, "exp({})", format_rational(c)),
            Seq::Exp(s) => match **s {
                Seq::Const(_) => write!(f, "exp(({s}))"),
                _ => write!(f, "exp({s})"),
            },
            Seq::LogOf(s) => write!(f, "log({s})"),
            Seq::Pow(s, e) => write!(f, "pow({s}, {})", format_rational(e)),
            Seq::Combo(terms) => {
                for (i, (c, t)) in terms.iter().enumerate() {
                    let neg = c.is_negative();
                    let mag = c.abs();
                    if i == 0 {
                        if neg {
                            f.write_str("-")?;
                        }
                    } else {
                        f.write_str(if neg { " - " } else { " + " })?;
                    }
                    if *t == Seq::Const(rat(1)) {
                        write!(f, "{}", format_rational(&mag))?;
                    } else if mag.is_one() {
                        write_factor(f, t)?;
                    } else {
                        write!(f, "{}*", format_coefficient(&mag))?;
                        write_factor(f, t)?;
                    }
                }
                Ok(())
            }
            Seq::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    write_factor(f, x)?;
                }
                Ok(())
            }
            Seq::Max(a, b) => write!(f, "max({a}, {b})"),
            Seq::Table { prefix, tail } => {
                f.write_str("table([")?;
                write_list(f, prefix)?;
                f.write_str("]")?;
                if let Some(t) = tail {
                    write!(f, ", tail={t}")?;
                }
                f.write_str(")")
            }
            Seq::Cycle(vs) => {
                f.write_str("cycle([")?;
                write_list(f, vs)?;
                f.write_str("])")
            }
            Seq::Samples(vs) => write!(f, "<{} computed samples>", vs.len()),
        }
    }
}

/// Fractions as coefficients need parentheses: `1/2*n` would parse as
/// `1 / (2*n)`-free but is clearer as `(1/2)*n`.
fn format_coefficient(c: &BigRational) -> String {
    if c.is_integer() {
        format_rational(c)
    } else {
        format!("({})", format_rational(c))
    }
}

fn write_factor(f: &mut fmt::Formatter<'_>, s: &Seq) -> fmt::Result {
    match s {
        Seq::Combo(_) => write!(f, "({s})"),
        Seq::Const(v) if !v.is_integer() || v.is_negative() => write!(f, "({s})"),
        _ => write!(f, "{s}"),
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, vs: &[BigRational]) -> fmt::Result {
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(&format_rational(v))?;
    }
    Ok(())
}

/// A sequence certified (at a resolution) to be a valid exponent sequence:
/// non-negative, non-decreasing, and growing without bound.
#[derive(Clone, Debug)]
pub struct ExponentSequence {
    base: CachedSeq,
    checked_to: Index,
}

impl PartialEq for ExponentSequence {
    fn eq(&self, other: &Self) -> bool {
        self.base.seq() == other.base.seq()
    }
}

impl ExponentSequence {
    /// Validates `base` on `[0, resolution]`: non-negative, monotone, and
    /// `alpha_N` strictly above every earlier geometric checkpoint.
    pub fn new(base: Seq, resolution: Index) -> Result<ExponentSequence> {
        let cached = CachedSeq::new(base);
        let mut prev: Option<Real> = None;
        let mut checkpoints = Vec::new();
        for n in 0..=resolution {
            let v = cached.eval(n)?;
            if v.is_negative() {
                return Err(KdiamError::Argument(format!(
                    "exponent sequence {} is negative at n = {n}",
                    cached.seq()
                )));
            }
            if let Some(p) = &prev {
                if v < *p {
                    return Err(KdiamError::Argument(format!(
                        "exponent sequence {} decreases at n = {n}",
                        cached.seq()
                    )));
                }
            }
            if n > 0 && n.is_power_of_two() {
                checkpoints.push(v.clone());
            }
            prev = Some(v);
        }
        let last = prev.expect("non-empty range");
        let stalled = checkpoints.len() >= 2
            && checkpoints[..checkpoints.len() - 1]
                .iter()
                .any(|c| *c >= last);
        if stalled || last.is_zero() {
            return Err(KdiamError::Argument(format!(
                "exponent sequence {} does not grow at resolution {resolution}",
                cached.seq()
            )));
        }
        Ok(ExponentSequence {
            base: cached,
            checked_to: resolution,
        })
    }

    pub fn seq(&self) -> &Seq {
        self.base.seq()
    }

    pub fn cached(&self) -> &CachedSeq {
        &self.base
    }

    pub fn eval(&self, n: Index) -> Result<Real> {
        self.base.eval(n)
    }

    pub fn checked_to(&self) -> Index {
        self.checked_to
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::parse_rational;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn f(s: &Seq, n: Index) -> f64 {
        s.eval(n).unwrap().to_f64()
    }

    #[test]
    fn identity_at_five() {
        assert_eq!(f(&Seq::poly(r("1")), 5), 5.0);
    }

    #[test]
    fn log_of_one_is_zero() {
        assert_eq!(f(&Seq::Log, 1), 0.0);
        assert_eq!(f(&Seq::Log, 0), 0.0);
    }

    #[test]
    fn half_identity_at_eight() {
        let s = Seq::scale(r("1/2"), Seq::identity());
        assert_eq!(f(&s, 8), 4.0);
    }

    #[test]
    fn table_prefix_overrides_tail() {
        let s = Seq::table(vec![r("7"), r("9")], Some(Seq::identity()));
        assert_eq!(f(&s, 0), 7.0);
        assert_eq!(f(&s, 1), 9.0);
        assert_eq!(f(&s, 2), 2.0);
        let open = Seq::table(vec![r("1")], None);
        assert!(open.eval(3).is_err());
    }

    #[test]
    fn exp_overflow_is_range_error() {
        let s = Seq::exp(Seq::exp_linear(r("1")));
        assert!(matches!(s.eval(40), Err(KdiamError::Range(_))));
    }

    #[test]
    fn binary64_path_matches_extended() {
        let cases = [
            "n",
            "pow(n, 1/2)",
            "exp(pow(n, 1/3))",
            "exp(-2*n)",
            "n*log(n+1)",
            "pow(log(n+1), 2)",
            "exp(-pow(n, 2))",
            "exp(n*log(n+1))",
            "3*n - 2",
            "max(n, 5)",
            "0",
        ];
        for c in cases {
            let s = parse(c).unwrap();
            for n in [0, 1, 2, 7, 100, 4096] {
                let fast = s.ln_abs_f64(n).unwrap();
                let slow = s.eval_ln_abs(n).unwrap().to_f64();
                if slow.is_finite() {
                    assert!(
                        (fast - slow).abs() <= 1e-12 * slow.abs().max(1.0),
                        "{c} at {n}"
                    );
                } else {
                    assert_eq!(fast, slow, "{c} at {n}");
                }
            }
        }
    }

    #[test]
    fn ln_abs_avoids_overflow() {
        let s = Seq::exp(Seq::poly(r("2")));
        let l = s.eval_ln_abs(100_000).unwrap();
        assert_eq!(l.to_f64(), 1e10);
        let z = Seq::Const(r("0"));
        assert_eq!(z.eval_ln_abs(3).unwrap(), ExtendedReal::NegInfinity);
    }

    #[test]
    fn exact_ratio_of_scaled_bases() {
        let a = Seq::scale(r("1/2"), Seq::identity());
        let b = Seq::identity();
        assert_eq!(Seq::exact_ratio(&a, &b), Some(r("1/2")));
        assert_eq!(Seq::exact_ratio(&b, &Seq::poly(r("2"))), None);
        let c = Seq::scale(r("3"), Seq::Log);
        assert_eq!(
            Seq::exact_ratio(&c, &Seq::scale(r("6"), Seq::Log)),
            Some(r("1/2"))
        );
    }

    #[test]
    fn rational_evaluation() {
        let f = Seq::scale(r("-1"), Seq::poly(r("-1")));
        assert_eq!(f.eval_rational(4), Some(r("-1/4")));
        assert_eq!(Seq::Log.eval_rational(5), None);
    }

    #[test]
    fn exponent_sequence_validation() {
        assert!(ExponentSequence::new(Seq::identity(), 256).is_ok());
        assert!(ExponentSequence::new(Seq::log1p(), 256).is_ok());
        assert!(ExponentSequence::new(Seq::Const(r("1")), 256).is_err());
        let neg = Seq::sum(vec![Seq::identity(), Seq::Const(r("-3"))]);
        assert!(ExponentSequence::new(neg, 64).is_err());
        let alternating = Seq::product(vec![Seq::Cycle(vec![r("1"), r("2")]), Seq::identity()]);
        assert!(ExponentSequence::new(alternating, 64).is_err());
    }
}
