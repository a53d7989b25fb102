//! Coincidence criteria and structural diameter conditions.
//!
//! Graded matrices whose grade function is rational on `1..=16 kmax` take
//! the exact route: `d_n(U_q, U_p) = e^{-(f(q) - f(p)) alpha_n}` turns every
//! inequality between diameters into a comparison of rational
//! coefficients, and `sup f` settles the unbounded quantifiers. Everything
//! else is sampled at resolution from the computed diameters.

mod coincidence;
mod conditions;

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

pub use coincidence::{
    finite_delta_coincidence, finite_delta_zero_flag, infinite_delta_coincidence,
    infinite_delta_divergent_flag, infinite_diametral_coincidence,
};
pub use conditions::{
    canonical_bounded_sets, condition_a, condition_b, condition_d2, condition_wq, lemma46,
    prominence_canonical, prominence_criterion, prop45_criterion, D2Report,
};

use crate::config::Config;
use crate::error::{KdiamError, Result};
use crate::invariants::Probe;
use crate::real::{format_rational, ExtendedReal, Real};
use crate::seq::limits::{is_growing, windows, Checkpoint, CriterionValue, Mode};
use crate::seq::Index;
use crate::space::{KotheMatrix, Supremum};
use crate::verdict::{Grade, Verdict};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CriterionId {
    FiniteDeltaCoincidence,
    InfiniteDeltaCoincidence,
    InfiniteDiametralCoincidence,
    D2,
    Prop45,
    Prominence,
    ConditionA,
    ConditionB,
    ConditionWq,
    Lemma46,
}

impl CriterionId {
    pub const ALL: [CriterionId; 10] = [
        CriterionId::FiniteDeltaCoincidence,
        CriterionId::InfiniteDeltaCoincidence,
        CriterionId::InfiniteDiametralCoincidence,
        CriterionId::D2,
        CriterionId::Prop45,
        CriterionId::Prominence,
        CriterionId::ConditionA,
        CriterionId::ConditionB,
        CriterionId::ConditionWq,
        CriterionId::Lemma46,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionId::FiniteDeltaCoincidence => "finite_delta_coincidence",
            CriterionId::InfiniteDeltaCoincidence => "infinite_delta_coincidence",
            CriterionId::InfiniteDiametralCoincidence => "infinite_Delta_coincidence",
            CriterionId::D2 => "condition_D2",
            CriterionId::Prop45 => "prop45",
            CriterionId::Prominence => "prominence",
            CriterionId::ConditionA => "condition_A",
            CriterionId::ConditionB => "condition_B",
            CriterionId::ConditionWq => "condition_wQ",
            CriterionId::Lemma46 => "lemma46",
        }
    }

    pub fn parse(s: &str) -> Option<CriterionId> {
        CriterionId::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

/// One criterion on one space.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub criterion: CriterionId,
    pub space: String,
    pub value: Option<CriterionValue>,
    pub verdict: Option<Verdict>,
    /// Labeled companion verdicts, e.g. the D2 variants.
    pub rows: Vec<(String, Verdict)>,
    pub config: Value,
}

impl CriterionReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "criterion": self.criterion.as_str(),
            "space": self.space,
            "config": self.config,
        });
        if let Some(cv) = &self.value {
            v["value"] = value_json(cv);
        }
        if let Some(verdict) = &self.verdict {
            v["outcome"] = Value::String(verdict.outcome.as_str().into());
            v["verdict"] = verdict.to_json();
        }
        if !self.rows.is_empty() {
            let rows: serde_json::Map<String, Value> = self
                .rows
                .iter()
                .map(|(k, r)| (k.clone(), r.to_json()))
                .collect();
            v["rows"] = Value::Object(rows);
        }
        v
    }
}

fn f64_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("+inf")
    } else if x < 0.0 {
        json!("-inf")
    } else {
        json!("nan")
    }
}

pub fn value_json(cv: &CriterionValue) -> Value {
    let mut v = json!({
        "value": f64_json(cv.to_f64()),
        "mode": cv.mode.as_str(),
        "divergent": cv.divergent,
    });
    if let Some(r) = &cv.rational {
        v["rational"] = json!(format_rational(r));
    }
    if let Some(n) = cv.resolution {
        v["resolution_n"] = json!(n);
    }
    if !cv.checkpoints.is_empty() {
        v["checkpoints"] = cv
            .checkpoints
            .iter()
            .map(|c| json!({ "index": c.index, "value": f64_json(c.value.to_f64()) }))
            .collect();
    }
    v
}

/// Evaluates one criterion with its companion rows.
pub fn evaluate(
    id: CriterionId,
    m: &KotheMatrix,
    label: &str,
    cfg: &Config,
) -> Result<CriterionReport> {
    cfg.validate()?;
    let mut report = CriterionReport {
        criterion: id,
        space: label.to_string(),
        value: None,
        verdict: None,
        rows: Vec::new(),
        config: cfg.to_json(),
    };
    match id {
        CriterionId::FiniteDeltaCoincidence => {
            report.value = Some(finite_delta_coincidence(m, cfg)?);
            report.verdict = Some(finite_delta_zero_flag(m, cfg)?);
        }
        CriterionId::InfiniteDeltaCoincidence => {
            report.value = Some(infinite_delta_coincidence(m, cfg)?);
            report.verdict = Some(infinite_delta_divergent_flag(m, cfg)?);
        }
        CriterionId::InfiniteDiametralCoincidence => {
            report.verdict = Some(infinite_diametral_coincidence(m, cfg)?)
        }
        CriterionId::D2 => {
            let d2 = condition_d2(m, cfg)?;
            report.verdict = Some(d2.integer.clone());
            report.rows = vec![
                ("integer_grade".into(), d2.integer),
                ("bounded_form".into(), d2.bounded),
                ("dense_grade_refinement".into(), d2.dense),
            ];
        }
        CriterionId::Prop45 => report.verdict = Some(prop45_criterion(m, cfg)?),
        CriterionId::Prominence => {
            let (overall, rows) = prominence_canonical(m, cfg)?;
            report.verdict = Some(overall);
            report.rows = rows;
        }
        CriterionId::ConditionA => report.verdict = Some(condition_a(m, cfg)?),
        CriterionId::ConditionB => report.verdict = Some(condition_b(m, cfg)?),
        CriterionId::ConditionWq => report.verdict = Some(condition_wq(m, cfg)?),
        CriterionId::Lemma46 => report.verdict = Some(lemma46(m, cfg)?),
    }
    Ok(report)
}

/// Exact grade data of a graded matrix: `f(k)` for `k <= 16 kmax`,
/// `sup f`, and the normalizing coefficient `c` with `epsilon = c alpha`.
pub(crate) struct ExactGrades {
    f: Vec<BigRational>,
    pub(crate) sup: Supremum,
    pub(crate) c: BigRational,
    pub(crate) horizon: Grade,
}

impl ExactGrades {
    pub(crate) fn new(m: &KotheMatrix, cfg: &Config) -> Option<ExactGrades> {
        let (_, f) = m.graded_parts()?;
        let horizon = cfg.resolution.horizon();
        let mut values = vec![BigRational::zero()];
        for k in 1..=horizon {
            values.push(f.rational_at(k)?);
        }
        let c = &cfg.eps_scale * (&values[2] - &values[1]);
        Some(ExactGrades {
            f: values,
            sup: f.supremum(),
            c,
            horizon,
        })
    }

    pub(crate) fn f(&self, k: Grade) -> &BigRational {
        &self.f[k as usize]
    }

    /// `f(q) - f(p)`, the coefficient of `epsilon_n(p, q) = -log d_n(U_q, U_p)`.
    pub(crate) fn x(&self, p: Grade, q: Grade) -> BigRational {
        &self.f[q as usize] - &self.f[p as usize]
    }

    /// `sup f - f(q)` when the supremum is a known finite number.
    pub(crate) fn gap_to_sup(&self, q: Grade) -> Option<BigRational> {
        match &self.sup {
            Supremum::Finite(s) => Some(s - self.f(q)),
            _ => None,
        }
    }

    /// `sup_{k > q} (f(k) - f(q))`: exact when `sup f` is known, otherwise
    /// truncated at the horizon. `None` means `+inf`.
    pub(crate) fn reach(&self, q: Grade) -> Option<BigRational> {
        match &self.sup {
            Supremum::Finite(s) => Some(s - self.f(q)),
            Supremum::Infinite => None,
            Supremum::Unknown => Some(self.x(q, self.horizon)),
        }
    }

    /// Exclusive end of existential grade searches. With a truncated `reach`
    /// the witness must stay well below the horizon, so the search stops at
    /// `kmax`.
    pub(crate) fn search_end(&self) -> Grade {
        if self.sup_known() {
            self.horizon
        } else {
            self.horizon / 16 + 1
        }
    }

    /// Whether `reach` is exact rather than truncated.
    pub(crate) fn sup_known(&self) -> bool {
        !matches!(self.sup, Supremum::Unknown)
    }
}

/// Grade ranges for nested quantifiers on sampled matrices: outermost
/// grades up to `kmax/4`, middle ones up to `kmax/2`, innermost up to
/// `kmax`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Tiers {
    pub(crate) outer: Grade,
    pub(crate) middle: Grade,
    pub(crate) inner: Grade,
}

impl Tiers {
    pub(crate) fn new(kmax: Grade) -> Tiers {
        let outer = (kmax / 4).max(1);
        let middle = (kmax / 2).max(outer + 1);
        Tiers {
            outer,
            middle,
            inner: kmax.max(middle + 1),
        }
    }
}

type LogDiameters = Rc<Vec<f64>>;

/// Sampled diameters `log d_n(U_q, U_p)` in binary64 with a per-call cache,
/// and `epsilon = eps_scale * epsilon(1, 2)`.
pub(crate) struct Sampled<'a> {
    probe: Probe<'a>,
    cache: RefCell<HashMap<(Grade, Grade), LogDiameters>>,
    eps: Vec<f64>,
}

impl<'a> Sampled<'a> {
    pub(crate) fn new(m: &'a KotheMatrix, cfg: &Config) -> Result<Sampled<'a>> {
        let r = cfg.resolution;
        if !m.is_graded() && m.max_grade() < 2 {
            return Err(KdiamError::Config(
                "criteria need at least two grades".into(),
            ));
        }
        let r = if !m.is_graded() && r.kmax > m.max_grade() {
            crate::verdict::Resolution::new(r.n, m.max_grade())
        } else {
            r
        };
        let probe = Probe::new(m, r)?;
        let scale = cfg.eps_scale.to_f64().unwrap_or(1.0);
        let eps: Vec<f64> = probe.log_d(1, 2)?.iter().map(|l| -l * scale).collect();
        if eps.iter().skip(1).any(|e| !e.is_finite()) {
            return Err(KdiamError::DegenerateMatrix(
                "d_n(U_2, U_1) vanishes".into(),
            ));
        }
        Ok(Sampled {
            probe,
            cache: RefCell::new(HashMap::new()),
            eps,
        })
    }

    pub(crate) fn kmax(&self) -> Grade {
        self.probe.r.kmax
    }

    pub(crate) fn n(&self) -> Index {
        self.probe.r.n
    }

    pub(crate) fn existential_bound(&self) -> Grade {
        self.probe.existential_bound()
    }

    pub(crate) fn tiers(&self) -> Tiers {
        Tiers::new(self.kmax())
    }

    pub(crate) fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub(crate) fn ld(&self, p: Grade, q: Grade) -> Result<LogDiameters> {
        if let Some(v) = self.cache.borrow().get(&(p, q)) {
            return Ok(v.clone());
        }
        let v = Rc::new(self.probe.log_d(p, q)?);
        self.cache.borrow_mut().insert((p, q), v.clone());
        Ok(v)
    }

    /// `epsilon_n(p, q)` samples.
    pub(crate) fn e(&self, p: Grade, q: Grade) -> Result<Vec<f64>> {
        Ok(self.ld(p, q)?.iter().map(|l| -l).collect())
    }
}

/// `max_{n <= N} (a_n - b_n)` with `-inf - x = -inf`.
pub(crate) fn max_log_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            if *x == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                x - y
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Window estimate of `limsup` (or `liminf`) of `num_n / den_n`, skipping
/// indices with a vanishing denominator.
pub(crate) fn ratio_estimate(num: &[f64], den: &[f64], n: Index, sup: bool) -> CriterionValue {
    let mut extremes = Vec::with_capacity(3);
    let mut checkpoints = Vec::with_capacity(3);
    for (lo, hi) in windows(n) {
        let mut best: Option<f64> = None;
        for i in lo..=hi {
            let (x, d) = (num[i as usize], den[i as usize]);
            if d <= 0.0 {
                continue;
            }
            let r = x / d;
            best = Some(match best {
                None => r,
                Some(b) if sup => b.max(r),
                Some(b) => b.min(r),
            });
        }
        let b = best.unwrap_or(f64::NAN);
        extremes.push(b);
        checkpoints.push(Checkpoint {
            index: hi,
            value: extended(b),
        });
    }
    let last = *extremes.last().unwrap();
    CriterionValue {
        value: extended(last),
        rational: None,
        mode: Mode::Estimated,
        resolution: Some(n),
        checkpoints,
        divergent: is_growing(&extremes),
    }
}

pub(crate) fn extended(x: f64) -> ExtendedReal {
    if x == f64::INFINITY {
        ExtendedReal::PosInfinity
    } else if x == f64::NEG_INFINITY {
        ExtendedReal::NegInfinity
    } else {
        Real::from_f64(x)
            .map(ExtendedReal::Finite)
            .unwrap_or(ExtendedReal::PosInfinity)
    }
}

pub(crate) fn rat_str(r: &BigRational) -> String {
    format_rational(r)
}
