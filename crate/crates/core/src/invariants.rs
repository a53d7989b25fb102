//! Membership semi-decisions for the diametral dimension `Delta(E)`, the
//! approximate diametral dimension `delta(E)` and `Tdot(E)`.
//!
//! Universally quantified grades run up to `kmax`; existential grade
//! searches on graded matrices run up to the horizon `16 kmax`, otherwise
//! up to `kmax`. On graded matrices with `sup f` finite the limit ball
//! `e^{(f(p) - sup f) alpha}` bounds every `d_n(U_q, U_p)` from below,
//! which turns some truncated searches into definite refutations.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::diameters::diameters_between_grades;
use crate::error::{KdiamError, Result};
use crate::seq::limits::{check_resolution, Trend};
use crate::seq::{Index, Mode, Seq};
use crate::space::{KotheMatrix, Supremum};
use crate::verdict::{Grade, Outcome, Resolution, Verdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantSet {
    /// `Delta(E)`.
    DiametralDimension,
    /// `delta(E)`.
    ApproximateDiametralDimension,
    /// `Tdot(E)`.
    Tdot,
}

impl InvariantSet {
    pub fn parse(s: &str) -> Option<InvariantSet> {
        match s {
            "Delta" => Some(InvariantSet::DiametralDimension),
            "delta" => Some(InvariantSet::ApproximateDiametralDimension),
            "Tdot" => Some(InvariantSet::Tdot),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InvariantSet::DiametralDimension => "Delta",
            InvariantSet::ApproximateDiametralDimension => "delta",
            InvariantSet::Tdot => "Tdot",
        }
    }
}

/// Default exponent grid for `Tdot`: `{1/2, 1/4, 1/8, 1/16}`.
pub fn default_eps_grid() -> Vec<BigRational> {
    [2, 4, 8, 16]
        .iter()
        .map(|d| BigRational::new(1.into(), (*d).into()))
        .collect()
}

/// `ln |t_n|` for `n <= N` in binary64.
pub fn log_candidate(t: &Seq, n: Index) -> Result<Vec<f64>> {
    (0..=n).map(|i| t.ln_abs_f64(i)).collect()
}

struct GradedView {
    alpha: Vec<f64>,
    sup: Option<f64>,
}

/// Diameter logs for one matrix at one resolution.
pub(crate) struct Probe<'a> {
    m: &'a KotheMatrix,
    pub(crate) r: Resolution,
    graded: Option<GradedView>,
}

impl<'a> Probe<'a> {
    pub(crate) fn new(m: &'a KotheMatrix, r: Resolution) -> Result<Probe<'a>> {
        check_resolution(r.n)?;
        if r.kmax < 2 {
            return Err(KdiamError::Config("kmax must be at least 2".into()));
        }
        if !m.is_graded() && r.kmax > m.max_grade() {
            return Err(KdiamError::Config(format!(
                "kmax {} exceeds maxGrade {}",
                r.kmax,
                m.max_grade()
            )));
        }
        let graded = match m.graded_parts() {
            Some((alpha, f)) => Some(GradedView {
                alpha: alpha
                    .cached()
                    .range(0, r.n)?
                    .iter()
                    .map(|a| a.to_f64())
                    .collect(),
                sup: match f.supremum() {
                    Supremum::Finite(s) => s.to_f64(),
                    _ => None,
                },
            }),
            None => None,
        };
        Ok(Probe { m, r, graded })
    }

    pub(crate) fn existential_bound(&self) -> Grade {
        if self.graded.is_some() {
            self.r.horizon()
        } else {
            self.r.kmax
        }
    }

    fn f(&self, k: Grade) -> Result<f64> {
        Ok(self.m.graded_parts().expect("graded").1.at(k)?.to_f64())
    }

    /// `log d_n(U_q, U_p)` for `n <= N`.
    pub(crate) fn log_d(&self, p: Grade, q: Grade) -> Result<Vec<f64>> {
        match &self.graded {
            Some(g) => {
                let x = self.f(q)? - self.f(p)?;
                Ok(g.alpha.iter().map(|a| -x * a).collect())
            }
            None => Ok(diameters_between_grades(self.m, p, q, self.r.n)?.log_f64()),
        }
    }

    /// Lower envelope `log e^{-(sup f - f(p)) alpha_n}` of all `d_n(U_q, U_p)`.
    pub(crate) fn log_d_limit(&self, p: Grade) -> Result<Option<Vec<f64>>> {
        match &self.graded {
            Some(GradedView {
                alpha,
                sup: Some(s),
            }) => {
                let x = s - self.f(p)?;
                Ok(Some(alpha.iter().map(|a| -x * a).collect()))
            }
            _ => Ok(None),
        }
    }

    pub(crate) fn n(&self) -> Index {
        self.r.n
    }
}

/// Trend of `t_n * d_n^power` from logs.
pub(crate) fn trend(lt: &[f64], ld: &[f64], power: f64, n: Index) -> Trend {
    Trend::of_log_values(
        |i| {
            let (a, b) = (lt[i as usize], ld[i as usize]);
            if a == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                a + power * b
            }
        },
        n,
    )
}

/// `forall p <= kmax-1 exists q > p: t_n d_n(U_q, U_p)^power -> 0`.
fn forall_p_exists_q(probe: &Probe, lt: &[f64], power: f64, tag: &str) -> Result<Verdict> {
    let r = probe.r;
    let n = probe.n();
    let mut witnesses = Vec::new();
    let mut open = Vec::new();
    for p in 1..r.kmax {
        let mut hit = None;
        let mut all_divergent = true;
        for q in p + 1..=probe.existential_bound() {
            let t = trend(lt, &probe.log_d(p, q)?, power, n);
            if t == Trend::Vanishing {
                hit = Some(q);
                break;
            }
            all_divergent &= t == Trend::Divergent;
            if !all_divergent {
                // a limit refutation may still settle this p
                if let Some(lim) = probe.log_d_limit(p)? {
                    if trend(lt, &lim, power, n) == Trend::Divergent {
                        return Ok(Verdict::fails(
                            r,
                            Witness::new()
                                .with("p", p)
                                .with("q", "any")
                                .with("set", tag),
                        )
                        .with_note("product diverges against the limit ball, so for every q"));
                    }
                }
            }
        }
        match hit {
            Some(q) => witnesses.push(Witness::new().with("p", p).with("q", q)),
            None if all_divergent => {
                return Ok(Verdict::fails(
                    r,
                    Witness::new()
                        .with("p", p)
                        .with("q_max", probe.existential_bound())
                        .with("set", tag),
                )
                .with_note("every q in range gives a divergent product"));
            }
            None => open.push(p),
        }
    }
    if open.is_empty() {
        Ok(Verdict::holds(r, witnesses))
    } else {
        Ok(Verdict::undetermined(
            r,
            format!("no decision for p in {open:?}"),
        ))
    }
}

/// `t in Delta(E)`: `forall p exists q: t_n d_n(U_q, U_p) -> 0`. The note
/// carries the bounded variant (`sup_n t_n d_n < inf`).
pub fn in_diametral(m: &KotheMatrix, t: &Seq, r: Resolution) -> Result<Verdict> {
    let probe = Probe::new(m, r)?;
    let lt = log_candidate(t, r.n)?;
    let v = forall_p_exists_q(&probe, &lt, 1.0, "Delta")?;
    let bounded = bounded_variant(&probe, &lt)?;
    let note = match &v.note {
        Some(n) => format!("{n}; bounded variant: {bounded}"),
        None => format!("bounded variant: {bounded}"),
    };
    Ok(v.with_note(note))
}

fn bounded_variant(probe: &Probe, lt: &[f64]) -> Result<Outcome> {
    let mut out = Outcome::Holds;
    for p in 1..probe.r.kmax {
        let mut found = false;
        let mut all_divergent = true;
        for q in p + 1..=probe.existential_bound() {
            let t = trend(lt, &probe.log_d(p, q)?, 1.0, probe.n());
            if t.is_bounded() {
                found = true;
                break;
            }
            all_divergent &= t == Trend::Divergent;
        }
        if !found {
            if all_divergent {
                return Ok(Outcome::Fails);
            }
            out = Outcome::Undetermined;
        }
    }
    Ok(out)
}

/// `t in delta(E)`: `exists p forall q > p: t_n / d_n(U_q, U_p) -> 0`.
pub fn in_approximate(m: &KotheMatrix, t: &Seq, r: Resolution) -> Result<Verdict> {
    let probe = Probe::new(m, r)?;
    let lt = log_candidate(t, r.n)?;
    let n = r.n;
    let mut refuted = Vec::new();
    for p in 1..r.kmax {
        // with a limit ball the worst q is the limit itself
        if let Some(lim) = probe.log_d_limit(p)? {
            match trend(&lt, &lim, -1.0, n) {
                Trend::Vanishing => {
                    return Ok(Verdict::holds(
                        r,
                        vec![Witness::new().with("p", p).with("q", "all")],
                    ))
                }
                _ => {}
            }
        }
        let mut all_vanish = true;
        let mut divergent_at = None;
        for q in p + 1..=r.kmax {
            let tr = trend(&lt, &probe.log_d(p, q)?, -1.0, n);
            if tr != Trend::Vanishing {
                all_vanish = false;
            }
            if tr == Trend::Divergent {
                divergent_at = Some(q);
                break;
            }
        }
        if all_vanish && probe.log_d_limit(p)?.is_none() {
            return Ok(Verdict::holds(
                r,
                vec![Witness::new().with("p", p).with("q_max", r.kmax)],
            ));
        }
        match divergent_at {
            Some(q) => refuted.push(Witness::new().with("p", p).with("q", q)),
            None => {
                return Ok(Verdict::undetermined(
                    r,
                    format!("p = {p} neither verified nor refuted"),
                ))
            }
        }
    }
    Ok(Verdict {
        outcome: Outcome::Fails,
        witnesses: refuted,
        resolution: r,
        note: Some("every p meets a q with a divergent quotient".into()),
        mode: Mode::Estimated,
    })
}

/// `t in Tdot(E)`: for every `p` and every grid exponent some `q` has
/// `t_n d_n(U_q, U_p)^eps -> 0`.
pub fn in_tdot(
    m: &KotheMatrix,
    t: &Seq,
    r: Resolution,
    eps_grid: &[BigRational],
) -> Result<Verdict> {
    if eps_grid.is_empty() {
        return Err(KdiamError::Argument("epsilon grid is empty".into()));
    }
    let probe = Probe::new(m, r)?;
    let lt = log_candidate(t, r.n)?;
    let mut grid: Vec<(f64, &BigRational)> = eps_grid
        .iter()
        .map(|e| {
            let v = e.to_f64().unwrap_or(f64::NAN);
            if !(v > 0.0 && v < 1.0) {
                return Err(KdiamError::Argument(format!("epsilon {e} outside (0, 1)")));
            }
            Ok((v, e))
        })
        .collect::<Result<_>>()?;
    // the smallest exponent is the hardest; decide it first
    grid.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut witnesses = Vec::new();
    let mut outcome = Outcome::Holds;
    let mut note = None;
    for (e, label) in grid {
        let v = forall_p_exists_q(&probe, &lt, e, "Tdot")?;
        match v.outcome {
            Outcome::Fails => {
                let mut w = v.witnesses;
                for x in &mut w {
                    x.fields.push(("eps".into(), label.to_string()));
                }
                return Ok(Verdict {
                    outcome: Outcome::Fails,
                    witnesses: w,
                    resolution: r,
                    note: v.note,
                    mode: Mode::Estimated,
                });
            }
            Outcome::Undetermined => {
                outcome = Outcome::Undetermined;
                note = v.note.map(|n| format!("eps = {label}: {n}"));
            }
            Outcome::Holds => {
                for mut w in v.witnesses {
                    w.fields.push(("eps".into(), label.to_string()));
                    witnesses.push(w);
                }
            }
        }
    }
    Ok(Verdict {
        outcome,
        witnesses: if outcome == Outcome::Holds {
            witnesses
        } else {
            Vec::new()
        },
        resolution: r,
        note,
        mode: Mode::Estimated,
    })
}

pub fn membership(
    set: InvariantSet,
    m: &KotheMatrix,
    t: &Seq,
    r: Resolution,
    eps_grid: &[BigRational],
) -> Result<Verdict> {
    match set {
        InvariantSet::DiametralDimension => in_diametral(m, t, r),
        InvariantSet::ApproximateDiametralDimension => in_approximate(m, t, r),
        InvariantSet::Tdot => in_tdot(m, t, r, eps_grid),
    }
}

/// `Delta(E)` closed under squaring on the candidates: fails on a
/// candidate in `Delta(E)` whose square is decided outside.
pub fn algebra_closed(m: &KotheMatrix, candidates: &[Seq], r: Resolution) -> Result<Verdict> {
    if candidates.is_empty() {
        return Err(KdiamError::Argument("candidate list is empty".into()));
    }
    let mut witnesses = Vec::new();
    let mut open = false;
    for t in candidates {
        if in_diametral(m, t, r)?.outcome != Outcome::Holds {
            continue;
        }
        let sq = t.squared();
        match in_diametral(m, &sq, r)?.outcome {
            Outcome::Holds => witnesses.push(Witness::new().with("t", t).with("t_squared", "in")),
            Outcome::Fails => {
                return Ok(Verdict::fails(
                    r,
                    Witness::new().with("t", t).with("t_squared", &sq),
                ))
            }
            Outcome::Undetermined => open = true,
        }
    }
    if open {
        Ok(Verdict::undetermined(r, "some squares undecided"))
    } else {
        Ok(Verdict::holds(r, witnesses))
    }
}

/// Direct power-series membership tests used to cross-check the identities
/// `Delta(Lambda_1) = Lambda_1`, `Delta(Lambda_inf) = Lambda_inf'`,
/// `delta(Lambda_inf) = Lambda_inf`, `delta(Lambda_1) = Lambda_1'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerSeriesSet {
    /// `forall k: sup |t_n| e^{-alpha_n/k} < inf`.
    Lambda1,
    /// `exists k: sup |t_n| e^{alpha_n/k} < inf`.
    Lambda1Dual,
    /// `forall k: sup |t_n| e^{k alpha_n} < inf`.
    LambdaInf,
    /// `exists R: sup |t_n| e^{-R alpha_n} < inf`.
    LambdaInfDual,
}

impl PowerSeriesSet {
    pub fn as_str(self) -> &'static str {
        match self {
            PowerSeriesSet::Lambda1 => "Lambda_1",
            PowerSeriesSet::Lambda1Dual => "Lambda_1'",
            PowerSeriesSet::LambdaInf => "Lambda_inf",
            PowerSeriesSet::LambdaInfDual => "Lambda_inf'",
        }
    }
}

/// Norm (universal, grades up to `kmax`) or dual (existential, up to
/// `16 kmax`) test of `t` against the power series space over `alpha`.
pub fn power_series_membership(
    set: PowerSeriesSet,
    alpha: &Seq,
    t: &Seq,
    r: Resolution,
) -> Result<Verdict> {
    check_resolution(r.n)?;
    let lt = log_candidate(t, r.n)?;
    let la: Vec<f64> = (0..=r.n)
        .map(|i| match alpha.eval_f64(i) {
            Some(v) => Ok(v),
            None => alpha.eval(i).map(|v| v.to_f64()),
        })
        .collect::<Result<_>>()?;
    let weight = |k: Grade| -> f64 {
        match set {
            PowerSeriesSet::Lambda1 => -1.0 / k as f64,
            PowerSeriesSet::Lambda1Dual => 1.0 / k as f64,
            PowerSeriesSet::LambdaInf => k as f64,
            PowerSeriesSet::LambdaInfDual => -(k as f64),
        }
    };
    let tr = |k: Grade| trend(&lt, &la, weight(k), r.n);
    match set {
        PowerSeriesSet::Lambda1 | PowerSeriesSet::LambdaInf => {
            let mut open = None;
            for k in 1..=r.kmax {
                match tr(k) {
                    Trend::Divergent => return Ok(Verdict::fails(r, Witness::new().with("k", k))),
                    t if t.is_bounded() => {}
                    _ => open = open.or(Some(k)),
                }
            }
            Ok(match open {
                None => Verdict::holds(r, vec![Witness::new().with("k_max", r.kmax)]),
                Some(k) => Verdict::undetermined(r, format!("grade {k} undecided")),
            })
        }
        PowerSeriesSet::Lambda1Dual | PowerSeriesSet::LambdaInfDual => {
            let mut all_divergent = true;
            for k in 1..=r.horizon() {
                let t = tr(k);
                if t.is_bounded() {
                    return Ok(Verdict::holds(r, vec![Witness::new().with("k", k)]));
                }
                all_divergent &= t == Trend::Divergent;
            }
            Ok(if all_divergent {
                Verdict::fails(r, Witness::new().with("k_max", r.horizon()))
            } else {
                Verdict::undetermined(r, "no bounded grade found")
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{parse, ExponentSequence};

    fn alpha(s: &str) -> ExponentSequence {
        ExponentSequence::new(parse(s).unwrap(), 64).unwrap()
    }

    fn l1() -> KotheMatrix {
        KotheMatrix::power_series_finite(alpha("n"))
    }

    fn linf() -> KotheMatrix {
        KotheMatrix::power_series_infinite(alpha("n"))
    }

    fn res(kmax: Grade) -> Resolution {
        Resolution::new(4096, kmax)
    }

    fn t(s: &str) -> Seq {
        parse(s).unwrap()
    }

    #[test]
    fn zero_is_everywhere() {
        let z = t("0");
        for m in [l1(), linf()] {
            assert_eq!(
                in_diametral(&m, &z, res(12)).unwrap().outcome,
                Outcome::Holds
            );
            assert_eq!(
                in_approximate(&m, &z, res(12)).unwrap().outcome,
                Outcome::Holds
            );
            let g = default_eps_grid();
            assert_eq!(
                in_tdot(&m, &z, res(12), &g).unwrap().outcome,
                Outcome::Holds
            );
        }
    }

    #[test]
    fn delta_of_finite_type() {
        let v = in_diametral(&l1(), &t("exp(pow(n, 1/2))"), res(12)).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        let v = in_diametral(&l1(), &t("exp(1/4)"), res(12)).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        // e^{n/4} escapes once 1/p <= 1/4
        let p: u32 = v.witnesses[0].get("p").unwrap().parse().unwrap();
        assert!(p >= 4);
    }

    #[test]
    fn approximate_of_infinite_type() {
        assert_eq!(
            in_approximate(&linf(), &t("exp(-poly(2))"), res(12))
                .unwrap()
                .outcome,
            Outcome::Holds
        );
        let v = in_approximate(&linf(), &t("1"), res(12)).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        assert_eq!(v.witnesses[0].get("q"), Some("2"));
    }

    #[test]
    fn tdot_examples() {
        let g = default_eps_grid();
        assert_eq!(
            in_tdot(&l1(), &t("exp(pow(n, 1/4))"), res(4), &g)
                .unwrap()
                .outcome,
            Outcome::Holds
        );
        // p <= 2 needs eps (1/p - 1/q) > 1/100 for some q
        let v = in_tdot(&l1(), &t("exp(1/100)"), res(3), &g).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        let coarse = vec![BigRational::new(1.into(), 64.into())];
        let v = in_tdot(&l1(), &t("exp(1/100)"), res(3), &coarse).unwrap();
        // (1/2)(1/64) < 1/100 even against the limit ball
        assert_eq!(v.outcome, Outcome::Fails);
    }

    #[test]
    fn squaring_regression() {
        let m = l1();
        let cands = vec![t("exp(pow(n, 1/2))"), t("poly(3)"), t("0")];
        assert_eq!(
            algebra_closed(&m, &cands, res(12)).unwrap().outcome,
            Outcome::Holds
        );
        let third = t("exp(1/3)");
        assert_eq!(
            in_diametral(&m, &third, res(12)).unwrap().outcome,
            Outcome::Fails
        );
        let v = algebra_closed(&m, &[third], res(12)).unwrap();
        assert_ne!(v.outcome, Outcome::Fails);
    }

    #[test]
    fn direct_tests() {
        let r = res(12);
        let a = t("n");
        use PowerSeriesSet::*;
        let o = |s, c: &str| power_series_membership(s, &a, &t(c), r).unwrap().outcome;
        assert_eq!(o(Lambda1, "exp(pow(n, 1/2))"), Outcome::Holds);
        assert_eq!(o(Lambda1, "exp(1/4)"), Outcome::Fails);
        assert_eq!(o(LambdaInfDual, "exp(3)"), Outcome::Holds);
        assert_eq!(o(LambdaInfDual, "exp(poly(2))"), Outcome::Fails);
        assert_eq!(o(LambdaInf, "exp(-poly(2))"), Outcome::Holds);
        assert_eq!(o(LambdaInf, "exp(-2)"), Outcome::Fails);
        assert_eq!(o(Lambda1Dual, "exp(-1/3)"), Outcome::Holds);
        assert_eq!(o(Lambda1Dual, "1"), Outcome::Fails);
    }

    #[test]
    fn member_example_from_cli() {
        let v = in_diametral(&linf(), &t("exp(3)"), res(12)).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
    }
}
