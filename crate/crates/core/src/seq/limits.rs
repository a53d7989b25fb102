//! Window estimates of limsup/liminf and decay trends at a resolution `N`.
//!
//! Three geometric windows `[N/8, N/4]`, `[N/4, N/2]`, `[N/2, N]` are
//! scanned; each contributes one checkpoint (its right end and the window
//! extreme). The reported estimate is the extreme over the last window.

use num_rational::BigRational;

use super::{Index, Seq};
use crate::error::{KdiamError, Result};
use crate::real::{format_rational, ExtendedReal, Real};

pub const MIN_RESOLUTION: Index = 64;

/// Growth factor across the three checkpoints that flags divergence.
pub const DIVERGENCE_FACTOR: f64 = 2.0;

/// Products below this at the last checkpoint count as tending to zero.
pub const VANISHING_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Estimated,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Estimated => "estimated",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub index: Index,
    pub value: ExtendedReal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionValue {
    pub value: ExtendedReal,
    /// Present exactly when `mode` is `Exact` and the value is finite.
    pub rational: Option<BigRational>,
    pub mode: Mode,
    pub resolution: Option<Index>,
    pub checkpoints: Vec<Checkpoint>,
    pub divergent: bool,
}

impl CriterionValue {
    pub fn exact(c: BigRational) -> CriterionValue {
        CriterionValue {
            value: Real::from_rational(&c).into(),
            rational: Some(c),
            mode: Mode::Exact,
            resolution: None,
            checkpoints: Vec::new(),
            divergent: false,
        }
    }

    /// Exact `+inf`, for suprema known to be unbounded.
    pub fn exact_infinite() -> CriterionValue {
        CriterionValue {
            value: ExtendedReal::PosInfinity,
            rational: None,
            mode: Mode::Exact,
            resolution: None,
            checkpoints: Vec::new(),
            divergent: true,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn describe(&self) -> String {
        match (&self.rational, self.mode) {
            (Some(r), Mode::Exact) => format!("{} (exact)", format_rational(r)),
            _ if self.divergent => format!("{} (divergent, {})", self.value, self.mode.as_str()),
            _ => format!("{} ({})", self.value, self.mode.as_str()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Extreme {
    Sup,
    Inf,
}

/// The three windows, oldest first.
pub fn windows(n: Index) -> [(Index, Index); 3] {
    [(n / 8, n / 4), (n / 4, n / 2), (n / 2, n)]
}

pub fn check_resolution(n: Index) -> Result<()> {
    if n < MIN_RESOLUTION {
        return Err(KdiamError::Argument(format!(
            "resolution {n} is below the minimum {MIN_RESOLUTION}"
        )));
    }
    Ok(())
}

pub fn limsup_ratio(num: &Seq, den: &Seq, n: Index) -> Result<CriterionValue> {
    ratio_extreme(num, den, n, Extreme::Sup)
}

pub fn liminf_ratio(num: &Seq, den: &Seq, n: Index) -> Result<CriterionValue> {
    ratio_extreme(num, den, n, Extreme::Inf)
}

fn ratio_at(num: &Seq, den: &Seq, i: Index) -> Result<Option<Real>> {
    let d = den.eval(i);
    let x = num.eval(i);
    match (x, d) {
        (Ok(x), Ok(d)) => {
            if d.is_zero() {
                return if (i as usize) < den.prefix_len() {
                    Ok(None)
                } else {
                    Err(KdiamError::Domain(format!(
                        "denominator {den} vanishes at n = {i}"
                    )))
                };
            }
            Ok(Some(x.div(&d)?))
        }
        (Err(KdiamError::Range(_)), _) | (_, Err(KdiamError::Range(_))) => {
            let lx = num.eval_ln_abs(i)?;
            let ld = den.eval_ln_abs(i)?;
            match (lx, ld) {
                (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => Ok(Some(a.sub(&b)?.exp()?)),
                (ExtendedReal::NegInfinity, ExtendedReal::Finite(_)) => Ok(Some(Real::zero())),
                _ => Err(KdiamError::Range(format!(
                    "ratio {num} / {den} not representable at n = {i}"
                ))),
            }
        }
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

fn ratio_extreme(num: &Seq, den: &Seq, n: Index, which: Extreme) -> Result<CriterionValue> {
    if let Some(c) = Seq::exact_ratio(num, den) {
        return Ok(CriterionValue::exact(c));
    }
    check_resolution(n)?;
    let mut checkpoints = Vec::with_capacity(3);
    for (lo, hi) in windows(n) {
        let mut best: Option<Real> = None;
        for i in lo..=hi {
            if let Some(v) = ratio_at(num, den, i)? {
                best = Some(match best {
                    None => v,
                    Some(b) => match which {
                        Extreme::Sup => b.max(v),
                        Extreme::Inf => b.min(v),
                    },
                });
            }
        }
        let best = best
            .ok_or_else(|| KdiamError::Domain(format!("no usable index in window [{lo}, {hi}]")))?;
        checkpoints.push(Checkpoint {
            index: hi,
            value: best.into(),
        });
    }
    let vals: Vec<f64> = checkpoints.iter().map(|c| c.value.to_f64()).collect();
    let divergent = is_growing(&vals);
    Ok(CriterionValue {
        value: checkpoints[2].value.clone(),
        rational: None,
        mode: Mode::Estimated,
        resolution: Some(n),
        checkpoints,
        divergent,
    })
}

/// Strictly increasing with the last value at least twice the first.
pub fn is_growing(vals: &[f64]) -> bool {
    vals.len() >= 3
        && vals.windows(2).all(|w| w[0] < w[1])
        && vals[0] > 0.0
        && vals[vals.len() - 1] >= DIVERGENCE_FACTOR * vals[0]
}

/// Asymptotic class of a non-negative sequence, read from the logarithms
/// of its window maxima.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Trend {
    /// Below the threshold and non-increasing: tends to zero.
    Vanishing,
    /// Non-increasing but not small: bounded.
    Bounded,
    /// Grows by the divergence factor across the windows.
    Divergent,
    Indeterminate,
}

impl Trend {
    pub fn is_bounded(self) -> bool {
        matches!(self, Trend::Vanishing | Trend::Bounded)
    }

    /// Classifies from `ln` of the three window maxima, oldest first.
    pub fn classify(log_max: [f64; 3]) -> Trend {
        let [a, b, c] = log_max;
        let tol = 1e-12 * (1.0 + a.abs().max(c.abs()));
        let non_increasing = b <= a + tol && c <= b + tol;
        if non_increasing && c < VANISHING_THRESHOLD.ln() {
            return Trend::Vanishing;
        }
        if c == f64::NEG_INFINITY {
            return Trend::Vanishing;
        }
        if a < b && b < c && c - a >= DIVERGENCE_FACTOR.ln() {
            return Trend::Divergent;
        }
        if non_increasing {
            return Trend::Bounded;
        }
        Trend::Indeterminate
    }

    /// Classifies `u_n` given `ln u_n` on `0..=N` (extra entries ignored).
    pub fn of_log_values(log_u: impl Fn(Index) -> f64, n: Index) -> Trend {
        let mut maxima = [f64::NEG_INFINITY; 3];
        for (slot, (lo, hi)) in windows(n).into_iter().enumerate() {
            for i in lo..=hi {
                let v = log_u(i);
                if v > maxima[slot] {
                    maxima[slot] = v;
                }
            }
        }
        Trend::classify(maxima)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Trend::Vanishing => "vanishing",
            Trend::Bounded => "bounded",
            Trend::Divergent => "divergent",
            Trend::Indeterminate => "indeterminate",
        }
    }
}
