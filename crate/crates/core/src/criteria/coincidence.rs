//! `inf_p sup_q lim{sup,inf}_n epsilon_n(p, q) / epsilon_n` and condition (*).

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::{rat_str, ratio_estimate, ExactGrades, Sampled};
use crate::config::Config;
use crate::error::{KdiamError, Result};
use crate::real::ExtendedReal;
use crate::seq::limits::{CriterionValue, DIVERGENCE_FACTOR};
use crate::space::{KotheMatrix, Supremum};
use crate::verdict::{Grade, Outcome, Verdict, Witness};

fn exact_grades(m: &KotheMatrix, cfg: &Config) -> Result<Option<ExactGrades>> {
    cfg.validate()?;
    match ExactGrades::new(m, cfg) {
        Some(g) if !g.c.is_positive() => Err(KdiamError::DegenerateMatrix(
            "epsilon(1, 2) vanishes identically".into(),
        )),
        g => Ok(g),
    }
}

/// `min_{p < kk} max_{p < q <= kk} (f(q) - f(p)) / c` and the minimizing `p`.
fn exact_min_max(g: &ExactGrades, kk: Grade) -> (BigRational, Grade) {
    let mut best: Option<(BigRational, Grade)> = None;
    for p in 1..kk {
        let top = (p + 1..=kk).map(|q| g.x(p, q)).max().unwrap() / &g.c;
        if best.as_ref().map_or(true, |(b, _)| top < *b) {
            best = Some((top, p));
        }
    }
    best.expect("kk >= 2")
}

/// Sampled `min_{p <= kk/2} max_{p < q <= kk}` of the window estimate.
fn sampled_min_max(s: &Sampled, kk: Grade, sup: bool) -> Result<CriterionValue> {
    let mut best: Option<CriterionValue> = None;
    for p in 1..=(kk / 2).max(1) {
        let mut top: Option<CriterionValue> = None;
        for q in p + 1..=kk {
            let v = ratio_estimate(&s.e(p, q)?, s.eps(), s.n(), sup);
            if top.as_ref().map_or(true, |t| v.value > t.value) {
                top = Some(v);
            }
        }
        let top = top.expect("q range non-empty");
        if best.as_ref().map_or(true, |b| top.value < b.value) {
            best = Some(top);
        }
    }
    Ok(best.expect("p range non-empty"))
}

/// Adds the grade-doubling divergence test: the value at `kmax` is at
/// least twice the value at `kmax/2`.
fn sampled_value(s: &Sampled, sup: bool) -> Result<CriterionValue> {
    let k = s.kmax();
    let mut v = sampled_min_max(s, k, sup)?;
    if k >= 4 {
        let half = sampled_min_max(s, k / 2, sup)?;
        let (a, b) = (half.to_f64(), v.to_f64());
        if a > 0.0 && b >= DIVERGENCE_FACTOR * a {
            v.divergent = true;
        }
    }
    Ok(v)
}

/// The left side of the finite-type coincidence test: `0` iff
/// `delta(E) = delta(Lambda_1(epsilon))`.
pub fn finite_delta_coincidence(m: &KotheMatrix, cfg: &Config) -> Result<CriterionValue> {
    if let Some(g) = exact_grades(m, cfg)? {
        if g.sup == Supremum::Infinite {
            return Ok(CriterionValue::exact_infinite());
        }
        return Ok(CriterionValue::exact(
            exact_min_max(&g, cfg.resolution.kmax).0,
        ));
    }
    sampled_value(&Sampled::new(m, cfg)?, true)
}

/// The infinite-type value: `+inf` (divergent flag) iff
/// `delta(E) = delta(Lambda_inf(epsilon))`.
pub fn infinite_delta_coincidence(m: &KotheMatrix, cfg: &Config) -> Result<CriterionValue> {
    if let Some(g) = exact_grades(m, cfg)? {
        if g.sup == Supremum::Infinite {
            return Ok(CriterionValue::exact_infinite());
        }
        let kk = cfg.resolution.kmax;
        let mut v = CriterionValue::exact(exact_min_max(&g, kk).0);
        if g.sup == Supremum::Unknown {
            let half = exact_min_max(&g, (kk / 2).max(2)).0;
            let top = exact_min_max(&g, 4 * kk).0;
            v.divergent = half.is_positive()
                && top.to_f64().unwrap_or(0.0) >= DIVERGENCE_FACTOR * half.to_f64().unwrap_or(0.0);
        }
        return Ok(v);
    }
    sampled_value(&Sampled::new(m, cfg)?, false)
}

fn ladder_witness(values: &[(Grade, String)]) -> Witness {
    values
        .iter()
        .fold(Witness::new(), |w, (k, v)| w.with(&format!("kmax={k}"), v))
}

/// "= 0" flag: the value decreases strictly along a grade ladder and ends
/// below the zero threshold.
pub fn finite_delta_zero_flag(m: &KotheMatrix, cfg: &Config) -> Result<Verdict> {
    let r = cfg.resolution;
    let k = r.kmax;
    if let Some(g) = exact_grades(m, cfg)? {
        if g.sup == Supremum::Infinite {
            return Ok(Verdict::fails(r, Witness::new().with("value", "+inf"))
                .with_note("sup f = +inf: sup over q is unbounded for every p")
                .exact());
        }
        let ladder: Vec<(Grade, BigRational)> = [k, 2 * k, 4 * k]
            .iter()
            .map(|kk| (*kk, exact_min_max(&g, *kk).0))
            .collect();
        let shown: Vec<(Grade, String)> = ladder.iter().map(|(k, v)| (*k, rat_str(v))).collect();
        let values: Vec<f64> = ladder
            .iter()
            .map(|(_, v)| v.to_f64().unwrap_or(f64::NAN))
            .collect();
        return Ok(ladder_verdict(cfg, &values, shown).exact());
    }
    let s = Sampled::new(m, cfg)?;
    let k = s.kmax();
    if k < 4 {
        return Ok(Verdict::undetermined(r, "grade ladder needs kmax >= 4"));
    }
    let mut values = Vec::new();
    let mut shown = Vec::new();
    for kk in [k / 4, k / 2, k] {
        if kk < 2 {
            continue;
        }
        let v = sampled_min_max(&s, kk, true)?;
        values.push(v.to_f64());
        shown.push((kk, format!("{}", v.value)));
    }
    Ok(ladder_verdict(cfg, &values, shown))
}

fn ladder_verdict(cfg: &Config, values: &[f64], shown: Vec<(Grade, String)>) -> Verdict {
    let r = cfg.resolution;
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let last = *values.last().unwrap();
    let first = values[0];
    if decreasing && last < cfg.zero_threshold {
        Verdict::holds(r, vec![ladder_witness(&shown)])
    } else if !decreasing && last >= first {
        Verdict::fails(r, ladder_witness(&shown)).with_note("value does not decrease with kmax")
    } else {
        Verdict::new(Outcome::Undetermined, r)
            .with_note(format!("decreasing but still >= {}", cfg.zero_threshold))
    }
}

/// Divergent flag of the infinite-type value as a verdict.
pub fn infinite_delta_divergent_flag(m: &KotheMatrix, cfg: &Config) -> Result<Verdict> {
    let r = cfg.resolution;
    let v = infinite_delta_coincidence(m, cfg)?;
    let w = Witness::new().with("value", v.describe());
    let exact = v.mode == crate::seq::Mode::Exact;
    let out = if v.divergent || v.value == ExtendedReal::PosInfinity {
        Verdict::holds(r, vec![w])
    } else if exact && v.rational.is_some() && known_sup(m) {
        Verdict::fails(r, w).with_note("sup f is finite, so the value is bounded for every kmax")
    } else {
        let growing = v.checkpoints.windows(2).any(|c| c[1].value > c[0].value);
        if growing {
            Verdict::undetermined(r, "value grows but not by the divergence factor")
        } else {
            Verdict::fails(r, w)
        }
    };
    Ok(if exact { out.exact() } else { out })
}

fn known_sup(m: &KotheMatrix) -> bool {
    m.graded_parts()
        .map_or(false, |(_, f)| matches!(f.supremum(), Supremum::Finite(_)))
}

/// Condition (*): `forall p forall M exists q: epsilon_n(p, q) >= M epsilon_n`
/// for every `n <= N`.
pub fn infinite_diametral_coincidence(m: &KotheMatrix, cfg: &Config) -> Result<Verdict> {
    let r = cfg.resolution;
    if cfg.m_grid.is_empty() {
        return Err(KdiamError::Argument("M grid is empty".into()));
    }
    if let Some(g) = exact_grades(m, cfg)? {
        let mut witnesses = Vec::new();
        let mut open = None;
        for p in 1..r.kmax {
            for mm in &cfg.m_grid {
                let target = mm * &g.c;
                let w = Witness::new().with("p", p).with("M", rat_str(mm));
                if let Some(gap) = g.gap_to_sup(p) {
                    if target.is_positive() && gap <= target {
                        return Ok(Verdict::fails(r, w.with("q", "any"))
                            .with_note("sup_q (f(q) - f(p)) does not exceed M c")
                            .exact());
                    }
                }
                match (p + 1..=g.horizon).find(|q| g.x(p, *q) >= target) {
                    Some(q) => witnesses.push(w.with("q", q)),
                    None => open = open.or(Some(w)),
                }
            }
        }
        return Ok(match open {
            None => Verdict::holds(r, witnesses).exact(),
            Some(w) => Verdict::undetermined(r, format!("no q up to the horizon for {w}")).exact(),
        });
    }
    let s = Sampled::new(m, cfg)?;
    let k = s.kmax();
    let tol = cfg.tol_exact;
    let mut witnesses = Vec::new();
    let mut open = None;
    for p in 1..=s.tiers().middle.min(k - 1) {
        // min_n epsilon_n(p, q) / epsilon_n for each q
        let mut lows = Vec::new();
        for q in p + 1..=k {
            let e = s.e(p, q)?;
            let low = e
                .iter()
                .zip(s.eps())
                .filter(|(_, d)| **d > 0.0)
                .map(|(x, d)| x / d)
                .fold(f64::INFINITY, f64::min);
            lows.push((q, low));
        }
        for mm in &cfg.m_grid {
            let mv = mm.to_f64().unwrap_or(f64::INFINITY);
            let w = Witness::new().with("p", p).with("M", rat_str(mm));
            match lows.iter().find(|(_, low)| *low >= mv * (1.0 - tol)) {
                Some((q, _)) => witnesses.push(w.with("q", q)),
                None => {
                    let n = lows.len();
                    let still_growing = n >= 2 && lows[n - 1].1 > lows[n - 2].1;
                    if still_growing {
                        open = open.or(Some(w));
                    } else {
                        return Ok(Verdict::fails(r, w.with("q_max", k)));
                    }
                }
            }
        }
    }
    Ok(match open {
        None => Verdict::holds(r, witnesses),
        Some(w) => {
            Verdict::undetermined(r, format!("ratio still growing at the last grade for {w}"))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{parse, ExponentSequence, Mode};
    use crate::verdict::Resolution;

    fn alpha(s: &str) -> ExponentSequence {
        ExponentSequence::new(parse(s).unwrap(), 256).unwrap()
    }

    fn cfg(kmax: Grade) -> Config {
        Config::default().with_resolution(Resolution::new(1024, kmax))
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn finite_value_on_lambda1() {
        let m = KotheMatrix::power_series_finite(alpha("n"));
        for (k, want) in [(4, q(1, 6)), (8, q(1, 28)), (12, q(2, 132))] {
            let v = finite_delta_coincidence(&m, &cfg(k)).unwrap();
            assert_eq!(v.mode, Mode::Exact);
            assert_eq!(v.rational, Some(want));
        }
        let flag = finite_delta_zero_flag(&m, &cfg(12)).unwrap();
        assert_eq!(flag.outcome, Outcome::Holds);
    }

    #[test]
    fn finite_value_on_lambda_inf_is_infinite() {
        let m = KotheMatrix::power_series_infinite(alpha("n"));
        let v = finite_delta_coincidence(&m, &cfg(12)).unwrap();
        assert!(v.divergent);
        assert_eq!(v.value, ExtendedReal::PosInfinity);
        assert_eq!(
            finite_delta_zero_flag(&m, &cfg(12)).unwrap().outcome,
            Outcome::Fails
        );
    }

    #[test]
    fn infinite_value() {
        let m = KotheMatrix::power_series_finite(alpha("n"));
        let v = infinite_delta_coincidence(&m, &cfg(12)).unwrap();
        assert!(!v.divergent);
        assert!(v.to_f64() <= 2.0);
        assert_eq!(
            infinite_delta_divergent_flag(&m, &cfg(12)).unwrap().outcome,
            Outcome::Fails
        );
        let m = KotheMatrix::power_series_infinite(alpha("poly(2)"));
        assert_eq!(
            infinite_delta_divergent_flag(&m, &cfg(12)).unwrap().outcome,
            Outcome::Holds
        );
    }

    #[test]
    fn condition_star() {
        let linf = KotheMatrix::power_series_infinite(alpha("n"));
        let v = infinite_diametral_coincidence(&linf, &cfg(12)).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        let l1 = KotheMatrix::power_series_finite(alpha("n"));
        let v = infinite_diametral_coincidence(&l1, &cfg(12)).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        // the ratios approach 2 without reaching it, so M = 2 already fails
        assert_eq!(v.witnesses[0].get("M"), Some("2"));
        let mut c = cfg(12);
        c.m_grid = vec![q(0, 1)];
        let v = infinite_diametral_coincidence(&l1, &c).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn sampled_interleave() {
        let mix = KotheMatrix::interleave(
            KotheMatrix::power_series_finite(alpha("n")),
            KotheMatrix::power_series_infinite(alpha("n")),
        );
        let c = Config::default().with_resolution(Resolution::new(256, 12));
        let v = infinite_delta_coincidence(&mix, &c).unwrap();
        assert_eq!(v.mode, Mode::Estimated);
        assert!(!v.divergent);
        assert!(v.to_f64() <= 2.0 + 1e-9);
    }
}
