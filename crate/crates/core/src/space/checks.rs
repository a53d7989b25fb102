//! Nuclearity and the diagonal DN / Omega interpolation checks.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::KotheMatrix;
use crate::error::{KdiamError, Result};
use crate::seq::limits::check_resolution;
use crate::seq::Index;
use crate::verdict::{Grade, Outcome, Resolution, Verdict, Witness};

/// Default interpolation grid `{i/16 : i = 1..15}` for tau and theta.
pub const DEFAULT_GRID_STEPS: i64 = 16;

pub const C_MAX: f64 = 1e6;

/// Grothendieck-Pietsch test: for each `p < maxGrade` some `q` has
/// `sum a_n(p)/a_n(q)` convergent at resolution. Graded matrices search
/// `q` up to `16 maxGrade`, others up to `maxGrade`. Dyadic block sums must
/// shrink by a factor 0.9 (or vanish) to count as convergent; blocks that
/// do not shrink count as divergent.
pub fn is_nuclear(m: &KotheMatrix, n: Index) -> Result<Verdict> {
    check_resolution(n)?;
    let kmax = m.max_grade();
    let res = Resolution::new(n, kmax);
    if kmax < 2 {
        return Err(KdiamError::Config("nuclearity needs maxGrade >= 2".into()));
    }
    let len = n as usize + 1;
    let q_bound = existential_grade_bound(m);
    let mut witnesses = Vec::new();
    let mut open = Vec::new();
    for p in 1..kmax {
        let lp = m.log_column_f64(p, len)?;
        let mut found = None;
        let mut all_divergent = true;
        for q in p + 1..=q_bound {
            let lq = m.log_column_f64(q, len)?;
            let block =
                |lo: usize, hi: usize| -> f64 { (lo..hi).map(|j| (lp[j] - lq[j]).exp()).sum() };
            let (n4, n2) = (len / 4, len / 2);
            let head = block(0, n4);
            let t1 = block(n4, n2);
            let t2 = block(n2, len);
            let total = head + t1 + t2;
            if t2 <= 1e-12 * total || t2 <= 0.9 * t1 {
                found = Some((q, total));
                break;
            }
            if t2 < t1 {
                all_divergent = false;
            }
        }
        match found {
            Some((q, total)) => witnesses.push(
                Witness::new()
                    .with("p", p)
                    .with("q", q)
                    .with("partial_sum", format!("{total:.6e}")),
            ),
            None if all_divergent => {
                return Ok(
                    Verdict::fails(res, Witness::new().with("p", p).with("q_max", q_bound))
                        .with_note("every q in the search range gives non-shrinking dyadic blocks"),
                );
            }
            None => open.push(p),
        }
    }
    if open.is_empty() {
        Ok(Verdict::holds(res, witnesses))
    } else {
        Ok(Verdict::undetermined(
            res,
            format!("no decision for p in {open:?}"),
        ))
    }
}

pub fn default_grid() -> Vec<BigRational> {
    (1..DEFAULT_GRID_STEPS)
        .map(|i| BigRational::new(i.into(), DEFAULT_GRID_STEPS.into()))
        .collect()
}

/// `max_{j <= N} sum_i c_i log a_j(k_i)`.
fn max_combo(m: &KotheMatrix, terms: &[(Grade, f64)], len: usize) -> Result<f64> {
    if let Some((alpha, f)) = m.graded_parts() {
        // linear in alpha_j, and alpha is monotone: the max sits at an end
        let mut c = 0.0;
        for (k, w) in terms {
            c += w * f.at(*k)?.to_f64();
        }
        let a0 = alpha.eval(0)?.to_f64();
        let an = alpha.eval(len as Index - 1)?.to_f64();
        return Ok((c * a0).max(c * an));
    }
    let cols = terms
        .iter()
        .map(|(k, _)| m.log_column_f64(*k, len))
        .collect::<Result<Vec<_>>>()?;
    let mut best = f64::NEG_INFINITY;
    for j in 0..len {
        let v: f64 = terms.iter().zip(&cols).map(|((_, w), c)| w * c[j]).sum();
        best = best.max(v);
    }
    Ok(best)
}

fn grid_f64(grid: &[BigRational]) -> Result<Vec<(f64, String)>> {
    if grid.is_empty() {
        return Err(KdiamError::Argument("interpolation grid is empty".into()));
    }
    grid.iter()
        .map(|g| {
            let v = g.to_f64().unwrap_or(f64::NAN);
            if !(v > 0.0 && v < 1.0) {
                return Err(KdiamError::Argument(format!(
                    "grid value {g} outside (0, 1)"
                )));
            }
            Ok((v, g.to_string()))
        })
        .collect()
}

fn existential_grade_bound(m: &KotheMatrix) -> Grade {
    if m.is_graded() {
        16 * m.max_grade()
    } else {
        m.max_grade()
    }
}

/// Diagonal DN: `exists p forall k > p exists n > k, tau, C <= 1e6` with
/// `a_j(k) <= C a_j(p)^(1-tau) a_j(n)^tau` for `j <= N`. `p` ranges up to
/// `maxGrade/2`, `k` up to `maxGrade`, `n` up to the existential bound.
pub fn check_dn(m: &KotheMatrix, n: Index, tau_grid: &[BigRational]) -> Result<Verdict> {
    check_resolution(n)?;
    let grid = grid_f64(tau_grid)?;
    let kmax = m.max_grade();
    let res = Resolution::new(n, kmax);
    if kmax < 2 {
        return Ok(Verdict::undetermined(res, "no grade k > p exists"));
    }
    let len = n as usize + 1;
    let n_bound = existential_grade_bound(m);
    let log_c = C_MAX.ln();
    let mut any_open = false;
    for p in 1..=(kmax / 2).max(1) {
        let mut per_k = Vec::new();
        let mut refuted = false;
        let mut open = false;
        for k in p + 1..=kmax {
            let mut hit = None;
            'search: for g in k + 1..=n_bound {
                for (tau, label) in &grid {
                    let v = max_combo(m, &[(k, 1.0), (p, -(1.0 - tau)), (g, -tau)], len)?;
                    if v <= log_c {
                        hit = Some((g, label.clone(), v.max(0.0).exp()));
                        break 'search;
                    }
                }
            }
            match hit {
                Some((g, tau, c)) => per_k.push(
                    Witness::new()
                        .with("p", p)
                        .with("k", k)
                        .with("n", g)
                        .with("tau", tau)
                        .with("C", format!("{c:.4e}")),
                ),
                None if k + 1 > n_bound => {
                    open = true;
                    break;
                }
                None => {
                    refuted = true;
                    break;
                }
            }
        }
        if !refuted && !open {
            return Ok(Verdict::holds(res, per_k));
        }
        any_open |= open;
    }
    if any_open {
        Ok(Verdict::undetermined(res, "grade search exhausted"))
    } else {
        Ok(Verdict::new(Outcome::Fails, res).with_note(
            "every p <= maxGrade/2 has a k with no interpolating (n, tau) at resolution",
        ))
    }
}

/// Diagonal Omega on dual norms: `forall p exists q > p forall k > q
/// exists theta, C <= 1e6` with
/// `1/a_j(q) <= C (1/a_j(p))^(1-theta) (1/a_j(k))^theta` for `j <= N`.
/// Tiers: `p <= maxGrade/4`, `q <= maxGrade/2`, `k <= maxGrade`.
pub fn check_omega(m: &KotheMatrix, n: Index, theta_grid: &[BigRational]) -> Result<Verdict> {
    check_resolution(n)?;
    let grid = grid_f64(theta_grid)?;
    let kmax = m.max_grade();
    let res = Resolution::new(n, kmax);
    if kmax < 3 {
        return Ok(Verdict::undetermined(res, "need grades p < q < k"));
    }
    let len = n as usize + 1;
    let log_c = C_MAX.ln();
    let p_top = (kmax / 4).max(1);
    let q_top = (kmax / 2).max(p_top + 1).min(kmax - 1);
    let mut witnesses = Vec::new();
    for p in 1..=p_top {
        let mut found = None;
        for q in p + 1..=q_top {
            let mut per_k = Vec::new();
            let mut ok = true;
            for k in q + 1..=kmax {
                let mut hit = None;
                for (theta, label) in &grid {
                    let v = max_combo(m, &[(p, 1.0 - theta), (k, *theta), (q, -1.0)], len)?;
                    if v <= log_c {
                        hit = Some((label.clone(), v.max(0.0).exp()));
                        break;
                    }
                }
                match hit {
                    Some((theta, c)) => per_k.push(
                        Witness::new()
                            .with("p", p)
                            .with("q", q)
                            .with("k", k)
                            .with("theta", theta)
                            .with("C", format!("{c:.4e}")),
                    ),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                found = Some(per_k);
                break;
            }
        }
        match found {
            Some(ws) => witnesses.extend(ws),
            None => {
                return Ok(
                    Verdict::fails(res, Witness::new().with("p", p).with("q_max", q_top))
                        .with_note(
                            "every q in the search range meets a k with no interpolating theta",
                        ),
                );
            }
        }
    }
    Ok(Verdict::holds(res, witnesses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{parse, ExponentSequence};

    fn alpha(s: &str) -> ExponentSequence {
        ExponentSequence::new(parse(s).unwrap(), 512).unwrap()
    }

    #[test]
    fn nuclearity_of_power_series() {
        let li = KotheMatrix::power_series_infinite(alpha("n"));
        assert_eq!(is_nuclear(&li, 512).unwrap().outcome, Outcome::Holds);
        let l1 = KotheMatrix::power_series_finite(alpha("n"));
        assert_eq!(is_nuclear(&l1, 4096).unwrap().outcome, Outcome::Holds);
        let l1log = KotheMatrix::power_series_finite(alpha("log(n + 1)"));
        let v = is_nuclear(&l1log, 4096).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        assert_eq!(v.witnesses[0].get("p"), Some("1"));
        let lilog = KotheMatrix::power_series_infinite(alpha("log(n + 1)"));
        let v = is_nuclear(&lilog, 4096).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        // (n+1)^-1 is the harmonic series, so p = 1 needs q = 3
        assert_eq!(v.witnesses[0].get("q"), Some("3"));
    }

    #[test]
    fn nuclearity_needs_two_grades() {
        let t = KotheMatrix::table(vec![parse("1").unwrap()]).unwrap();
        assert!(matches!(is_nuclear(&t, 64), Err(KdiamError::Config(_))));
    }

    #[test]
    fn dn_on_power_series() {
        let grid = default_grid();
        let li = KotheMatrix::power_series_infinite(alpha("n"));
        let v = check_dn(&li, 512, &grid).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert_eq!(v.witnesses[0].get("p"), Some("1"));
        // this form of DN lets the interpolating grade n depend on k, so
        // finite type passes too
        let l1 = KotheMatrix::power_series_finite(alpha("n"));
        assert_eq!(check_dn(&l1, 512, &grid).unwrap().outcome, Outcome::Holds);
        let single = KotheMatrix::table(vec![parse("1").unwrap()]).unwrap();
        assert_eq!(
            check_dn(&single, 64, &grid).unwrap().outcome,
            Outcome::Undetermined
        );
    }

    #[test]
    fn dn_monotone_in_max_grade() {
        let grid = default_grid();
        let l1 = KotheMatrix::power_series_finite(alpha("n"));
        let mut last = Outcome::Undetermined;
        for k in 2..=8 {
            let v = check_dn(&l1.with_max_grade(k).unwrap(), 256, &grid)
                .unwrap()
                .outcome;
            assert!(!(last == Outcome::Holds && v == Outcome::Fails));
            last = v;
        }
    }

    #[test]
    fn omega_on_power_series() {
        let grid = default_grid();
        for m in [
            KotheMatrix::power_series_finite(alpha("n")),
            KotheMatrix::power_series_infinite(alpha("n")),
        ] {
            assert_eq!(check_omega(&m, 512, &grid).unwrap().outcome, Outcome::Holds);
        }
        let flat = KotheMatrix::table(vec![
            parse("exp((-1))").unwrap(),
            parse("1").unwrap(),
            parse("1").unwrap(),
            parse("1").unwrap(),
        ])
        .unwrap();
        let v = check_omega(&flat, 64, &grid).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert_eq!(v.witnesses[0].get("C"), Some("1.0000e0"));
    }

    #[test]
    fn grids_are_validated() {
        let li = KotheMatrix::power_series_infinite(alpha("n"));
        assert!(check_dn(&li, 64, &[]).is_err());
        assert!(check_omega(&li, 64, &[BigRational::from_integer(1.into())]).is_err());
    }
}
