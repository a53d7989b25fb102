//! D2 and its restatements, prominence, conditions A, B and (wQ), and the
//! diameter decay lemma behind the bounded form of D2.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{max_log_gap, rat_str, ExactGrades, Sampled};
use crate::config::Config;
use crate::diameters::BoundedSetSpec;
use crate::error::Result;
use crate::real::ExtendedReal;
use crate::seq::limits::Trend;
use crate::seq::{Index, Seq};
use crate::space::{KotheMatrix, Supremum};
use crate::verdict::{Grade, Outcome, Resolution, Verdict, Witness};

fn exact(m: &KotheMatrix, cfg: &Config) -> Result<Option<ExactGrades>> {
    cfg.validate()?;
    Ok(ExactGrades::new(m, cfg))
}

fn mark(v: Verdict, exact: bool) -> Verdict {
    if exact {
        v.exact()
    } else {
        v
    }
}

/// D2 in its three reported forms.
#[derive(Clone, Debug)]
pub struct D2Report {
    /// `lim d_n(U_q, U_p) / d_n(U_k, U_q) = 0`, integer grades.
    pub integer: Verdict,
    /// `sup_n d_n(U_q, U_p) / d_n(U_k, U_q) < inf`, integer grades.
    pub bounded: Verdict,
    /// Limit form with `q` on the rational grid `p + j * dense_step`.
    pub dense: Verdict,
}

/// `forall p exists q > p forall k > q: d_n(U_q, U_p) / d_n(U_k, U_q) -> 0`.
pub fn condition_d2(m: &KotheMatrix, cfg: &Config) -> Result<D2Report> {
    let r = cfg.resolution;
    if let Some(g) = exact(m, cfg)? {
        if g.sup == Supremum::Infinite {
            let w = Witness::new().with("p", 1).with("q", "any").with("k", "2q");
            let note = "sup f = +inf: k = 2q has f(k) - f(q) > f(q) - f(1)";
            let fail = Verdict::fails(r, w).with_note(note).exact();
            return Ok(D2Report {
                integer: fail.clone(),
                bounded: fail.clone(),
                dense: fail.with_note(format!("dense grades: {note}")),
            });
        }
        return Ok(D2Report {
            integer: d2_exact(&g, r, true),
            bounded: d2_exact(&g, r, false),
            dense: d2_dense(m, &g, cfg),
        });
    }
    let s = Sampled::new(m, cfg)?;
    Ok(D2Report {
        integer: d2_sampled(&s, r, true)?,
        bounded: d2_sampled(&s, r, false)?,
        dense: Verdict::undetermined(r, "dense grades need a closed-form grade function"),
    })
}

fn d2_exact(g: &ExactGrades, r: Resolution, strict: bool) -> Verdict {
    let mut witnesses = Vec::new();
    for p in 1..r.kmax {
        let found = (p + 1..g.search_end()).find(|q| {
            let x = g.x(p, *q);
            match g.reach(*q) {
                // f(k) < sup f for every k, so `<=` against the sup is strict at each k
                Some(reach) if g.sup_known() => reach <= x,
                Some(reach) if strict => reach < x,
                Some(reach) => reach <= x,
                None => false,
            }
        });
        match found {
            Some(q) => witnesses.push(Witness::new().with("p", p).with("q", q)),
            None if g.sup_known() => {
                return Verdict::undetermined(r, format!("no q below the horizon for p = {p}"))
                    .exact()
            }
            None => {
                return Verdict::fails(
                    r,
                    Witness::new()
                        .with("p", p)
                        .with("q_max", g.search_end() - 1),
                )
            }
        }
    }
    mark(Verdict::holds(r, witnesses), g.sup_known())
}

fn d2_dense(m: &KotheMatrix, g: &ExactGrades, cfg: &Config) -> Verdict {
    let r = cfg.resolution;
    let f = m.graded_parts().expect("graded").1;
    let s = match &g.sup {
        Supremum::Finite(s) => s.clone(),
        _ => return Verdict::undetermined(r, "dense grades need a known sup f"),
    };
    let horizon = BigRational::from_integer(BigInt::from(g.horizon));
    let mut witnesses = Vec::new();
    for p in 1..r.kmax {
        let fp = g.f(p).clone();
        let mut q = BigRational::from_integer(BigInt::from(p)) + &cfg.dense_step;
        let mut hit = None;
        while q < horizon {
            let fq = match f.at_dense(&q) {
                Some(v) => v,
                None => return Verdict::undetermined(r, "grade function has no dense extension"),
            };
            if &s - &fq <= &fq - &fp {
                hit = Some(q.clone());
                break;
            }
            q += &cfg.dense_step;
        }
        match hit {
            Some(q) => witnesses.push(Witness::new().with("p", p).with("q", rat_str(&q))),
            None => {
                return Verdict::undetermined(
                    r,
                    format!("no dense q below the horizon for p = {p}"),
                )
                .exact()
            }
        }
    }
    Verdict::holds(r, witnesses).exact()
}

fn d2_sampled(s: &Sampled, r: Resolution, strict: bool) -> Result<Verdict> {
    let t = s.tiers();
    let n = s.n();
    let mut witnesses = Vec::new();
    for p in 1..=t.outer {
        let mut hit = None;
        for q in p + 1..=t.middle {
            let lpq = s.ld(p, q)?;
            let mut all = true;
            for k in q + 1..=t.inner {
                let lqk = s.ld(q, k)?;
                let tr = Trend::of_log_values(|i| lpq[i as usize] - lqk[i as usize], n);
                let ok = if strict {
                    tr == Trend::Vanishing
                } else {
                    tr.is_bounded()
                };
                if !ok {
                    all = false;
                    break;
                }
            }
            if all {
                hit = Some(q);
                break;
            }
        }
        match hit {
            Some(q) => witnesses.push(Witness::new().with("p", p).with("q", q)),
            None => {
                return Ok(Verdict::fails(
                    r,
                    Witness::new().with("p", p).with("q_max", t.middle),
                ))
            }
        }
    }
    Ok(Verdict::holds(r, witnesses))
}

/// `forall p exists q > p: sup_{l > q} limsup epsilon_n(q, l) / epsilon_n(p, q) <= 1`.
pub fn prop45_criterion(m: &KotheMatrix, cfg: &Config) -> Result<Verdict> {
    let r = cfg.resolution;
    if let Some(g) = exact(m, cfg)? {
        if g.sup == Supremum::Infinite {
            return Ok(
                Verdict::fails(r, Witness::new().with("p", 1).with("q", "any"))
                    .with_note("sup_l epsilon(q, l) / epsilon(p, q) = +inf for every q")
                    .exact(),
            );
        }
        let bound = BigRational::one()
            + BigRational::from_float(cfg.tol_exact).unwrap_or_else(BigRational::zero);
        let mut witnesses = Vec::new();
        for p in 1..r.kmax {
            let found = (p + 1..g.search_end()).find_map(|q| {
                let ratio = g.reach(q)? / g.x(p, q);
                (ratio <= bound).then_some((q, ratio))
            });
            match found {
                Some((q, ratio)) => witnesses.push(
                    Witness::new()
                        .with("p", p)
                        .with("q", q)
                        .with("sup_ratio", rat_str(&ratio)),
                ),
                None if g.sup_known() => {
                    return Ok(Verdict::undetermined(
                        r,
                        format!("no q below the horizon for p = {p}"),
                    )
                    .exact())
                }
                None => {
                    return Ok(Verdict::fails(
                        r,
                        Witness::new()
                            .with("p", p)
                            .with("q_max", g.search_end() - 1),
                    ))
                }
            }
        }
        return Ok(mark(Verdict::holds(r, witnesses), g.sup_known()));
    }
    let s = Sampled::new(m, cfg)?;
    let t = s.tiers();
    let mut witnesses = Vec::new();
    for p in 1..=t.outer {
        let mut hit = None;
        for q in p + 1..=t.middle {
            let epq = s.e(p, q)?;
            let mut worst = f64::NEG_INFINITY;
            for l in q + 1..=t.inner {
                let v = super::ratio_estimate(&s.e(q, l)?, &epq, s.n(), true);
                worst = worst.max(v.to_f64());
            }
            if worst <= 1.0 + cfg.tol_estimated {
                hit = Some((q, worst));
                break;
            }
        }
        match hit {
            Some((q, w)) => witnesses.push(
                Witness::new()
                    .with("p", p)
                    .with("q", q)
                    .with("sup_ratio", format!("{w:.6}")),
            ),
            None => {
                return Ok(Verdict::fails(
                    r,
                    Witness::new().with("p", p).with("q_max", t.middle),
                ))
            }
        }
    }
    Ok(Verdict::holds(r, witnesses))
}

/// Canonical bounded-set candidates: `b = e^{-(sup f) alpha}` for graded
/// matrices with finite `sup f` (none when `sup f = +inf`), otherwise
/// `b_n = 1/a_n(kmax)`.
pub fn canonical_bounded_sets(m: &KotheMatrix, cfg: &Config) -> Result<Vec<BoundedSetSpec>> {
    if let Some((alpha, f)) = m.graded_parts() {
        return Ok(match f.supremum() {
            Supremum::Finite(s) if s.is_zero() => {
                vec![BoundedSetSpec::new(
                    "b = 1",
                    Seq::constant(BigRational::one()),
                )]
            }
            Supremum::Finite(s) => vec![BoundedSetSpec::new(
                format!("b = exp(-({}) alpha)", rat_str(&s)),
                Seq::exp(Seq::scale(-s, alpha.seq().clone())),
            )],
            _ => Vec::new(),
        });
    }
    let k = cfg.resolution.kmax.min(m.max_grade());
    let len = 2 * (cfg.resolution.n as usize + 1);
    let col = m.log_column(k, len)?;
    let values = col
        .iter()
        .map(|l| l.neg().exp().map(ExtendedReal::Finite))
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![BoundedSetSpec::new(
        format!("b = 1/a({k})"),
        Seq::samples(values),
    )])
}

/// `log d_n(B, U_q)` in binary64 for `n <= N`.
fn log_diameters_b(m: &KotheMatrix, logb: &[f64], q: Grade, n: Index) -> Result<Vec<f64>> {
    let col = m.log_column_f64(q, logb.len())?;
    let mut v: Vec<f64> = logb.iter().zip(col.iter()).map(|(b, a)| b + a).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    v.truncate(n as usize + 1);
    v.resize(n as usize + 1, f64::NEG_INFINITY);
    Ok(v)
}

/// Terzioglu's test: `forall p exists q, C <= c_max: d_n(U_q, U_p) <= C d_n(B, U_q)`.
pub fn prominence_criterion(m: &KotheMatrix, b: &BoundedSetSpec, cfg: &Config) -> Result<Verdict> {
    cfg.validate()?;
    let s = Sampled::new(m, cfg)?;
    let r = cfg.resolution;
    let n = s.n();
    let k = s.kmax();
    b.check_bounded(m, n, k)?;
    let len = 2 * (n as usize + 1);
    let logb = (0..len as Index)
        .map(|j| {
            b.log_weight(j).map(|v| match v {
                ExtendedReal::Finite(x) => x.to_f64(),
                ExtendedReal::NegInfinity => f64::NEG_INFINITY,
                ExtendedReal::PosInfinity => f64::INFINITY,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if logb.iter().all(|x| *x == f64::NEG_INFINITY) {
        return Ok(Verdict::fails(r, Witness::new().with("B", &b.label))
            .with_note("B = {0}: every d_n(B, U_q) vanishes"));
    }
    let cap = cfg.c_max.ln();
    // Finitely many grades: B is weighted by the top grade, so p and q stay
    // in the outer and middle tiers.
    let (p_end, q_max) = if m.is_graded() {
        (k - 1, s.existential_bound())
    } else {
        let t = s.tiers();
        (t.outer, t.middle)
    };
    let mut witnesses = Vec::new();
    for p in 1..=p_end {
        let mut hit = None;
        for q in p + 1..=q_max {
            let gap = max_log_gap(&s.ld(p, q)?, &log_diameters_b(m, &logb, q, n)?);
            if gap <= cap {
                hit = Some((q, gap.max(0.0).exp()));
                break;
            }
        }
        match hit {
            Some((q, c)) => witnesses.push(
                Witness::new()
                    .with("p", p)
                    .with("q", q)
                    .with("C", format!("{c:.6e}")),
            ),
            None => {
                return Ok(Verdict::fails(
                    r,
                    Witness::new()
                        .with("p", p)
                        .with("q_max", q_max)
                        .with("B", &b.label),
                ))
            }
        }
    }
    Ok(Verdict::holds(r, witnesses))
}

/// Prominence over the canonical candidates, with one row per candidate.
pub fn prominence_canonical(
    m: &KotheMatrix,
    cfg: &Config,
) -> Result<(Verdict, Vec<(String, Verdict)>)> {
    let r = cfg.resolution;
    let cands = canonical_bounded_sets(m, cfg)?;
    if cands.is_empty() {
        return Ok((
            Verdict::undetermined(
                r,
                "no canonical bounded candidate: with sup f = +inf no weight of the form e^{-c alpha} is bounded against every grade",
            ),
            Vec::new(),
        ));
    }
    let mut rows = Vec::new();
    for b in &cands {
        rows.push((b.label.clone(), prominence_criterion(m, b, cfg)?));
    }
    let overall = if let Some((_, v)) = rows.iter().find(|(_, v)| v.outcome == Outcome::Holds) {
        v.clone()
    } else if rows.iter().all(|(_, v)| v.outcome == Outcome::Fails) {
        Verdict::fails(r, Witness::new().with("candidates", rows.len()))
            .with_note("no canonical candidate is prominent at resolution")
    } else {
        Verdict::undetermined(r, "no canonical candidate decided")
    };
    Ok((overall, rows))
}

/// Condition A: `forall p forall q > p exists s > q forall k > s exists C:
/// d_n(U_q, U_p) <= C d_n(U_k, U_s)`.
pub fn condition_a(m: &KotheMatrix, cfg: &Config) -> Result<Verdict> {
    let r = cfg.resolution;
    if let Some(g) = exact(m, cfg)? {
        if g.sup == Supremum::Infinite {
            return Ok(Verdict::fails(
                r,
                Witness::new()
                    .with("p", 1)
                    .with("q", 2)
                    .with("s", "any")
                    .with("k", "s + f-gap"),
            )
            .with_note("sup f = +inf: f(k) - f(s) exceeds f(2) - f(1) for large k")
            .exact());
        }
        let mut witnesses = Vec::new();
        for p in 1..r.kmax {
            for q in p + 1..=r.kmax {
                let x = g.x(p, q);
                let found = (q + 1..g.search_end()).find(|s| g.reach(*s).map_or(false, |v| v <= x));
                match found {
                    Some(s) => witnesses.push(
                        Witness::new()
                            .with("p", p)
                            .with("q", q)
                            .with("s", s)
                            .with("C", 1),
                    ),
                    None if g.sup_known() => {
                        return Ok(Verdict::undetermined(
                            r,
                            format!("no s below the horizon for p = {p}, q = {q}"),
                        )
                        .exact())
                    }
                    None => {
                        return Ok(Verdict::fails(
                            r,
                            Witness::new()
                                .with("p", p)
                                .with("q", q)
                                .with("s_max", g.search_end() - 1),
                        ))
                    }
                }
            }
        }
        return Ok(mark(Verdict::holds(r, witnesses), g.sup_known()));
    }
    let s = Sampled::new(m, cfg)?;
    let t = s.tiers();
    if t.middle + 2 > t.inner {
        return Ok(Verdict::undetermined(
            r,
            "kmax too small for the k > s range",
        ));
    }
    let cap = cfg.c_max.ln();
    // Keep a block of grades above s so that `forall k > s` is not vacuous
    // near the top grade.
    let s_end = t.middle + (t.inner - t.middle) / 2;
    let mut witnesses = Vec::new();
    for p in 1..=t.outer {
        for q in p + 1..=t.middle {
            let lpq = s.ld(p, q)?;
            let mut hit = None;
            for sg in q + 1..=s_end {
                let mut ok = true;
                for k in sg + 1..=t.inner {
                    if max_log_gap(&lpq, &s.ld(sg, k)?) > cap {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    hit = Some(sg);
                    break;
                }
            }
            match hit {
                Some(sg) => witnesses.push(Witness::new().with("p", p).with("q", q).with("s", sg)),
                None => {
                    return Ok(Verdict::fails(
                        r,
                        Witness::new()
                            .with("p", p)
                            .with("q", q)
                            .with("s_max", s_end),
                    ))
                }
            }
        }
    }
    Ok(Verdict::holds(r, witnesses))
}

/// Condition B: for every tuple `(q_1, ..., q_p)` with `q_i > i` some `s`
/// has `max_i d_n(U_{q_i}, U_i) <= C d_n(U_{q_s}, U_s)`. Tuples are
/// enumerated for `p <= 4` and drawn with the configured seed beyond.
pub fn condition_b(m: &KotheMatrix, cfg: &Config) -> Result<Verdict> {
    let r = cfg.resolution;
    cfg.validate()?;
    if m.is_graded() {
        return Ok(Verdict::holds(
            r,
            vec![Witness::new()
                .with("tuples", "all")
                .with("s", "argmin_i (f(q_i) - f(i))")
                .with("C", 1)],
        )
        .with_note("max_i e^{-x_i alpha_n} = e^{-(min_i x_i) alpha_n} for a single alpha")
        .exact());
    }
    let s = Sampled::new(m, cfg)?;
    let k = s.kmax();
    let cap = cfg.c_max.ln();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut witnesses = Vec::new();
    for len in 1..k {
        let tuples: Vec<Vec<Grade>> = if len <= 4 {
            all_tuples(len, k)
        } else {
            (0..cfg.b_samples)
                .map(|_| (1..=len).map(|i| rng.gen_range(i + 1..=k)).collect())
                .collect()
        };
        for tuple in &tuples {
            let logs = tuple
                .iter()
                .enumerate()
                .map(|(i, q)| s.ld(i as Grade + 1, *q))
                .collect::<Result<Vec<_>>>()?;
            let n = logs[0].len();
            let top: Vec<f64> = (0..n)
                .map(|j| logs.iter().map(|l| l[j]).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            if !logs.iter().any(|l| max_log_gap(&top, l) <= cap) {
                let shown = tuple
                    .iter()
                    .map(|q| q.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                return Ok(Verdict::fails(
                    r,
                    Witness::new().with("p", len).with("tuple", shown),
                ));
            }
        }
        witnesses.push(
            Witness::new()
                .with("p", len)
                .with("tuples_checked", tuples.len()),
        );
    }
    Ok(Verdict::holds(r, witnesses).with_note(format!("seed {}", cfg.seed)))
}

fn all_tuples(len: Grade, k: Grade) -> Vec<Vec<Grade>> {
    let mut out = vec![Vec::new()];
    for i in 1..=len {
        out = out
            .into_iter()
            .flat_map(|t: Vec<Grade>| {
                (i + 1..=k).map(move |q| {
                    let mut t = t.clone();
                    t.push(q);
                    t
                })
            })
            .collect();
    }
    out
}

/// (wQ): `forall N exists M, n forall K, m exists k, S:
/// min(d(U_n, U_N), d(U_k, U_K)) <= S d(U_m, U_M)`.
pub fn condition_wq(m: &KotheMatrix, cfg: &Config) -> Result<Verdict> {
    let r = cfg.resolution;
    if r.kmax < 3 {
        return Ok(Verdict::undetermined(
            r,
            "quantifier ranges empty for kmax < 3",
        ));
    }
    if let Some(g) = exact(m, cfg)? {
        let h = g.horizon;
        // every inner comparison is monotone in m and k, so m = k = h decides
        let worst_k = g.x(r.kmax - 1, h);
        let ok = |nn: Grade, mm: Grade, n: Grade| {
            let rhs = g.x(mm, h);
            g.x(nn, n) >= rhs || worst_k >= rhs
        };
        let mut witnesses = Vec::new();
        for nn in 1..r.kmax {
            let d2 = (nn + 1..h).find(|q| g.reach(*q).map_or(false, |v| v <= g.x(nn, *q)));
            if let Some(q) = d2.filter(|q| ok(nn, *q, *q)) {
                witnesses.push(
                    Witness::new()
                        .with("N", nn)
                        .with("M", q)
                        .with("n", q)
                        .with("via", "D2"),
                );
                continue;
            }
            let found =
                (1..h).find_map(|mm| (nn + 1..=h).find(|n| ok(nn, mm, *n)).map(|n| (mm, n)));
            match found {
                Some((mm, n)) => witnesses.push(
                    Witness::new()
                        .with("N", nn)
                        .with("M", mm)
                        .with("n", n)
                        .with("via", "search"),
                ),
                None => return Ok(Verdict::fails(r, Witness::new().with("N", nn)).exact()),
            }
        }
        return Ok(Verdict::holds(r, witnesses).exact());
    }
    let s = Sampled::new(m, cfg)?;
    let t = s.tiers();
    let cap = cfg.c_max.ln();
    let mut witnesses = Vec::new();
    for nn in 1..=t.outer {
        let mut hit = None;
        'search: for mm in 1..t.middle {
            for n in nn + 1..=t.middle {
                let lnn = s.ld(nn, n)?;
                let mut all = true;
                'inner: for kk in 1..=t.middle {
                    for mq in mm + 1..=t.inner {
                        let lmm = s.ld(mm, mq)?;
                        let mut any = false;
                        for k in kk + 1..=t.inner {
                            let lk = s.ld(kk, k)?;
                            let lo: Vec<f64> =
                                lnn.iter().zip(lk.iter()).map(|(a, b)| a.min(*b)).collect();
                            if max_log_gap(&lo, &lmm) <= cap {
                                any = true;
                                break;
                            }
                        }
                        if !any {
                            all = false;
                            break 'inner;
                        }
                    }
                }
                if all {
                    hit = Some((mm, n));
                    break 'search;
                }
            }
        }
        match hit {
            Some((mm, n)) => {
                witnesses.push(Witness::new().with("N", nn).with("M", mm).with("n", n))
            }
            None => return Ok(Verdict::fails(r, Witness::new().with("N", nn))),
        }
    }
    Ok(Verdict::holds(r, witnesses))
}

/// `forall p forall q > p exists s > q: d_n(U_s, U_p) / d_n(U_q, U_p) -> 0`.
pub fn lemma46(m: &KotheMatrix, cfg: &Config) -> Result<Verdict> {
    let r = cfg.resolution;
    if exact(m, cfg)?.is_some() {
        return Ok(Verdict::holds(r, vec![Witness::new().with("s", "q + 1")])
            .with_note("f is strictly increasing, so e^{-(f(q+1) - f(q)) alpha_n} -> 0")
            .exact());
    }
    let s = Sampled::new(m, cfg)?;
    let t = s.tiers();
    let mut witnesses = Vec::new();
    for p in 1..=t.outer {
        for q in p + 1..=t.middle {
            let lq = s.ld(p, q)?;
            let mut hit = None;
            for sg in q + 1..=t.inner {
                let ls = s.ld(p, sg)?;
                if Trend::of_log_values(|i| ls[i as usize] - lq[i as usize], s.n())
                    == Trend::Vanishing
                {
                    hit = Some(sg);
                    break;
                }
            }
            match hit {
                Some(sg) => witnesses.push(Witness::new().with("p", p).with("q", q).with("s", sg)),
                None => {
                    // the ratio is at most 1, so only an undecided outcome is possible
                    return Ok(Verdict::undetermined(
                        r,
                        format!("no vanishing ratio for p = {p}, q = {q}"),
                    ));
                }
            }
        }
    }
    Ok(Verdict::holds(r, witnesses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{parse, ExponentSequence, Mode};
    use crate::space::GradeFunction;

    fn alpha(s: &str) -> ExponentSequence {
        ExponentSequence::new(parse(s).unwrap(), 256).unwrap()
    }

    fn l1() -> KotheMatrix {
        KotheMatrix::power_series_finite(alpha("n"))
    }

    fn linf() -> KotheMatrix {
        KotheMatrix::power_series_infinite(alpha("n"))
    }

    fn cfg(kmax: Grade) -> Config {
        Config::default().with_resolution(Resolution::new(512, kmax))
    }

    #[test]
    fn d2_on_power_series() {
        let d = condition_d2(&l1(), &cfg(12)).unwrap();
        assert_eq!(d.integer.outcome, Outcome::Holds);
        assert_eq!(d.integer.mode, Mode::Exact);
        // q = 2p is the least grade with 1/p - 1/q >= 1/q
        assert_eq!(d.integer.witnesses[0].get("q"), Some("2"));
        assert_eq!(d.integer.witnesses[10].get("q"), Some("22"));
        assert_eq!(d.dense.outcome, Outcome::Holds);
        let d = condition_d2(&linf(), &cfg(12)).unwrap();
        assert_eq!(d.integer.outcome, Outcome::Fails);
        assert_eq!(d.bounded.outcome, Outcome::Fails);
        assert_eq!(d.dense.outcome, Outcome::Fails);
    }

    #[test]
    fn prop45_examples() {
        let v = prop45_criterion(&l1(), &cfg(12)).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        // p = 1, q = 2 sits exactly on the boundary 1
        assert_eq!(v.witnesses[0].get("q"), Some("2"));
        assert_eq!(v.witnesses[0].get("sup_ratio"), Some("1"));
        assert_eq!(
            prop45_criterion(&linf(), &cfg(12)).unwrap().outcome,
            Outcome::Fails
        );
    }

    #[test]
    fn prominence_examples() {
        let c = cfg(12);
        let (v, rows) = prominence_canonical(&l1(), &c).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert_eq!(rows.len(), 1);
        let zero = BoundedSetSpec::new("zero", Seq::constant(BigRational::zero()));
        assert_eq!(
            prominence_criterion(&l1(), &zero, &c).unwrap().outcome,
            Outcome::Fails
        );
        let (v, rows) = prominence_canonical(&linf(), &c).unwrap();
        assert_eq!(v.outcome, Outcome::Undetermined);
        assert!(rows.is_empty());
    }

    #[test]
    fn condition_a_examples() {
        let v = condition_a(&l1(), &cfg(12)).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert_eq!(v.witnesses[0].get("s"), Some("3"));
        assert_eq!(
            condition_a(&linf(), &cfg(12)).unwrap().outcome,
            Outcome::Fails
        );
    }

    #[test]
    fn condition_b_graded_and_sampled() {
        assert_eq!(
            condition_b(&l1(), &cfg(12)).unwrap().outcome,
            Outcome::Holds
        );
        let mix = KotheMatrix::interleave(l1(), KotheMatrix::power_series_finite(alpha("poly(2)")))
            .with_max_grade(6)
            .unwrap();
        let c = Config::default().with_resolution(Resolution::new(128, 6));
        let v = condition_b(&mix, &c).unwrap();
        assert_ne!(v.outcome, Outcome::Undetermined);
    }

    #[test]
    fn wq_examples() {
        let v = condition_wq(&l1(), &cfg(12)).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert_eq!(v.witnesses[0].get("via"), Some("D2"));
        assert_eq!(
            condition_wq(&linf(), &cfg(12)).unwrap().outcome,
            Outcome::Holds
        );
        assert_eq!(
            condition_wq(&l1(), &cfg(2)).unwrap().outcome,
            Outcome::Undetermined
        );
    }

    #[test]
    fn lemma46_graded() {
        assert_eq!(lemma46(&l1(), &cfg(12)).unwrap().outcome, Outcome::Holds);
    }

    #[test]
    fn custom_grade_function_takes_exact_route_with_truncated_sup() {
        let m = KotheMatrix::graded(
            alpha("n"),
            GradeFunction::Custom(parse("2*k + 1").unwrap()),
            12,
        )
        .unwrap();
        let d = condition_d2(&m, &cfg(12)).unwrap();
        assert_eq!(d.integer.outcome, Outcome::Fails);
        assert_eq!(d.integer.mode, Mode::Estimated);
    }
}
