//! Kolmogorov diameters of diagonal balls and bounded sets.
//!
//! For `V = {|x_n| <= v_n}` and `U = {|x_n| <= u_n}` in sup-norm, the
//! `n`-th diameter is the `n`-th largest of `v_j / u_j` (0-based). All
//! values are carried as logarithms; a zero diameter is `-inf`.

use std::fmt::Write as _;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{KdiamError, Result};
use crate::real::{ExtendedReal, Real};
use crate::seq::limits::Trend;
use crate::seq::{Index, Seq};
use crate::space::KotheMatrix;
use crate::verdict::Grade;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Rearranged,
    Oracle,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Rearranged => "rearranged",
            Provenance::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiameterSource {
    /// `d_n(U_q, U_p)`.
    Grades { p: Grade, q: Grade },
    /// `d_n(B, U_p)`.
    BoundedSet { label: String, p: Grade },
}

#[derive(Clone, Debug)]
pub struct DiameterSequence {
    pub source: DiameterSource,
    /// `log d_n` for `n = 0..=N`.
    pub log_values: Arc<Vec<ExtendedReal>>,
    pub provenance: Provenance,
    /// `-log d_n` in closed form, when available.
    pub closed_form: Option<Seq>,
}

impl DiameterSequence {
    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    pub fn value(&self, n: usize) -> Result<Real> {
        match &self.log_values[n] {
            ExtendedReal::Finite(l) => l.exp(),
            ExtendedReal::NegInfinity => Ok(Real::zero()),
            ExtendedReal::PosInfinity => Err(KdiamError::Range("infinite diameter".into())),
        }
    }

    /// `epsilon_n = -log d_n`.
    pub fn epsilon(&self, n: usize) -> ExtendedReal {
        match &self.log_values[n] {
            ExtendedReal::Finite(l) => ExtendedReal::Finite(l.neg()),
            ExtendedReal::NegInfinity => ExtendedReal::PosInfinity,
            ExtendedReal::PosInfinity => ExtendedReal::NegInfinity,
        }
    }

    pub fn log_f64(&self) -> Vec<f64> {
        self.log_values.iter().map(ExtendedReal::to_f64).collect()
    }

    /// Rows `n,d_n,epsilon_n` with a header line.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("n,d_n,eps_n\n");
        for n in 0..self.len() {
            let d = self.value(n)?;
            let _ = writeln!(out, "{n},{d},{}", self.epsilon(n));
        }
        Ok(out)
    }
}

/// `log(a_j(p) / a_j(q))`, the shared primitive for rearrangement and the
/// exhaustive oracle.
pub fn log_ratio(m: &KotheMatrix, p: Grade, q: Grade, j: Index) -> Result<Real> {
    m.log_weight(p, j)?.sub(&m.log_weight(q, j)?)
}

fn check_grades(m: &KotheMatrix, p: Grade, q: Grade) -> Result<()> {
    if p == 0 || q == 0 {
        return Err(KdiamError::Argument("grades start at 1".into()));
    }
    if p > q {
        return Err(KdiamError::Argument(format!(
            "need p <= q, got p = {p}, q = {q}"
        )));
    }
    if !m.is_graded() && q > m.max_grade() {
        return Err(KdiamError::Argument(format!(
            "grade {q} above maxGrade {}",
            m.max_grade()
        )));
    }
    Ok(())
}

/// Window of source indices scanned when the ratios need sorting: twice
/// the requested length, so interleaves of monotone pieces are exact.
fn scan_len(n: Index) -> usize {
    2 * (n as usize + 1)
}

/// `d_n(U_q, U_p)` for `n = 0..=N`. `p = q` is allowed as a diagnostic and
/// gives the constant 1.
pub fn diameters_between_grades(
    m: &KotheMatrix,
    p: Grade,
    q: Grade,
    n: Index,
) -> Result<DiameterSequence> {
    check_grades(m, p, q)?;
    let source = DiameterSource::Grades { p, q };
    if p == q {
        return Ok(DiameterSequence {
            source,
            log_values: Arc::new(vec![Real::zero().into(); n as usize + 1]),
            provenance: Provenance::ClosedForm,
            closed_form: Some(Seq::Const(BigRational::from_integer(0.into()))),
        });
    }
    if let Some(eps) = m.log_ratio_closed_form(p, q) {
        // the ratio e^{-(f(q)-f(p)) alpha_j} is already non-increasing
        let log_values = m.memo_log_diameters((p, q, n), || {
            (0..=n)
                .map(|j| log_ratio(m, p, q, j).map(Into::into))
                .collect()
        })?;
        return Ok(DiameterSequence {
            source,
            log_values,
            provenance: Provenance::ClosedForm,
            closed_form: Some(eps),
        });
    }
    let log_values = m.memo_log_diameters((p, q, n), || {
        let len = scan_len(n);
        let lp = m.log_column(p, len)?;
        let lq = m.log_column(q, len)?;
        let ratios = (0..len)
            .map(|j| lp[j].sub(&lq[j]).map(ExtendedReal::from))
            .collect::<Result<Vec<_>>>()?;
        Ok(rearrange(ratios, n as usize + 1))
    })?;
    Ok(DiameterSequence {
        source,
        log_values,
        provenance: Provenance::Rearranged,
        closed_form: None,
    })
}

/// Non-increasing rearrangement, ties by index, padded with `-inf`.
fn rearrange(mut values: Vec<ExtendedReal>, keep: usize) -> Vec<ExtendedReal> {
    // stable sort keeps index order among ties
    values.sort_by(|a, b| b.cmp(a));
    values.truncate(keep);
    values.resize(keep, ExtendedReal::NegInfinity);
    values
}

/// `B = {x : |x_n| <= b_n}`; zero weights drop the coordinate from `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedSetSpec {
    pub label: String,
    pub weights: Seq,
}

impl BoundedSetSpec {
    pub fn new(label: impl Into<String>, weights: Seq) -> BoundedSetSpec {
        BoundedSetSpec {
            label: label.into(),
            weights,
        }
    }

    pub fn log_weight(&self, j: Index) -> Result<ExtendedReal> {
        self.weights.eval_ln_abs(j)
    }

    /// Verifies `sup_n b_n a_n(k) < inf` at resolution for every grade up
    /// to `grade_bound`; the first violating grade is reported.
    pub fn check_bounded(&self, m: &KotheMatrix, n: Index, grade_bound: Grade) -> Result<()> {
        let len = n as usize + 1;
        let logb = (0..len as Index)
            .map(|j| self.log_weight(j).map(|v| v.to_f64()))
            .collect::<Result<Vec<f64>>>()?;
        for k in 1..=grade_bound {
            let la = m.log_column_f64(k, len)?;
            let trend = Trend::of_log_values(|j| logb[j as usize] + la[j as usize], n);
            if !trend.is_bounded() {
                return Err(KdiamError::Unbounded {
                    grade: k,
                    detail: format!("b_n a_n({k}) is {} for B = {}", trend.as_str(), self.label),
                });
            }
        }
        Ok(())
    }
}

/// `d_n(B, U_p)` for `n = 0..=N`: the rearrangement of `b_j a_j(p)`.
/// Boundedness is checked for grades up to `maxGrade`.
pub fn diameters_bounded_set(
    m: &KotheMatrix,
    b: &BoundedSetSpec,
    p: Grade,
    n: Index,
) -> Result<DiameterSequence> {
    b.check_bounded(m, n, m.max_grade())?;
    diameters_bounded_set_unchecked(m, b, p, n)
}

pub(crate) fn diameters_bounded_set_unchecked(
    m: &KotheMatrix,
    b: &BoundedSetSpec,
    p: Grade,
    n: Index,
) -> Result<DiameterSequence> {
    let len = scan_len(n);
    let lp = m.log_column(p, len)?;
    let mut values = Vec::with_capacity(len);
    for (j, l) in lp.iter().enumerate() {
        match b.log_weight(j as Index)? {
            ExtendedReal::Finite(lb) => values.push(ExtendedReal::Finite(lb.add(l)?)),
            _ => {}
        }
    }
    Ok(DiameterSequence {
        source: DiameterSource::BoundedSet {
            label: b.label.clone(),
            p,
        },
        log_values: Arc::new(rearrange(values, n as usize + 1)),
        provenance: Provenance::Rearranged,
        closed_form: None,
    })
}

pub const ORACLE_MAX_SECTION: usize = 12;
pub const ORACLE_MAX_RANK: usize = 4;

/// Exhaustive oracle on the section `0..section`: for each rank `r <= rank`
/// minimizes `delta(U_q, U_p, L) = max_{j not in L} a_j(p)/a_j(q)` over all
/// coordinate subspaces `L` with `dim L <= r`.
pub fn oracle_diameters_coordinate(
    m: &KotheMatrix,
    p: Grade,
    q: Grade,
    section: usize,
    rank: usize,
) -> Result<DiameterSequence> {
    check_grades(m, p, q)?;
    if section > ORACLE_MAX_SECTION || rank > ORACLE_MAX_RANK || section == 0 {
        return Err(KdiamError::OracleBounds(format!(
            "section {section} / rank {rank} outside 1..={ORACLE_MAX_SECTION} / 0..={ORACLE_MAX_RANK}"
        )));
    }
    let ratios = (0..section as Index)
        .map(|j| log_ratio(m, p, q, j))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(rank + 1);
    for r in 0..=rank {
        let mut best = ExtendedReal::PosInfinity;
        for mask in 0u32..(1 << section) {
            if mask.count_ones() as usize > r {
                continue;
            }
            let delta = (0..section)
                .filter(|j| mask & (1 << j) == 0)
                .map(|j| ExtendedReal::Finite(ratios[j].clone()))
                .max()
                .unwrap_or(ExtendedReal::NegInfinity);
            if delta < best {
                best = delta;
            }
        }
        out.push(best);
    }
    Ok(DiameterSequence {
        source: DiameterSource::Grades { p, q },
        log_values: Arc::new(out),
        provenance: Provenance::Oracle,
        closed_form: None,
    })
}

/// `epsilon_n(p, q) = -log d_n(U_q, U_p)` as a sequence: closed form for
/// graded matrices, computed samples otherwise.
pub fn log_diameters(m: &KotheMatrix, p: Grade, q: Grade, n: Index) -> Result<Seq> {
    let d = diameters_between_grades(m, p, q, n)?;
    if let Some(c) = d.closed_form {
        return Ok(c);
    }
    Ok(Seq::samples((0..d.len()).map(|i| d.epsilon(i)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{parse, ExponentSequence};

    fn alpha(s: &str) -> ExponentSequence {
        ExponentSequence::new(parse(s).unwrap(), 256).unwrap()
    }

    fn l1(s: &str) -> KotheMatrix {
        KotheMatrix::power_series_finite(alpha(s))
    }

    fn linf(s: &str) -> KotheMatrix {
        KotheMatrix::power_series_infinite(alpha(s))
    }

    #[test]
    fn finite_type_half_rate() {
        let d = diameters_between_grades(&l1("n"), 1, 2, 4096).unwrap();
        assert_eq!(d.provenance, Provenance::ClosedForm);
        assert_eq!(d.closed_form, Some(parse("1/2*n").unwrap()));
        // sorted-ratio oracle: ratio e^{-j/2} at every j, already sorted
        for j in [0usize, 1, 100, 4096] {
            let expect = Real::from_f64(-(j as f64) / 2.0).unwrap();
            assert_eq!(d.log_values[j], ExtendedReal::Finite(expect));
        }
    }

    #[test]
    fn infinite_type_gap_two() {
        let d = diameters_between_grades(&linf("n"), 1, 3, 64).unwrap();
        assert_eq!(d.epsilon(5).to_f64(), 10.0);
    }

    #[test]
    fn equal_grades_give_one() {
        let d = diameters_between_grades(&l1("n"), 3, 3, 64).unwrap();
        assert!((0..d.len()).all(|i| d.value(i).unwrap() == Real::one()));
        assert_eq!(
            log_diameters(&l1("n"), 3, 3, 64).unwrap(),
            Seq::Const(BigRational::from_integer(0.into()))
        );
        assert!(diameters_between_grades(&l1("n"), 3, 2, 64).is_err());
    }

    #[test]
    fn log_diameter_closed_forms() {
        assert_eq!(
            log_diameters(&l1("n"), 1, 2, 64).unwrap(),
            parse("1/2*n").unwrap()
        );
        assert_eq!(
            log_diameters(&linf("n"), 2, 5, 64).unwrap(),
            parse("3*n").unwrap()
        );
    }

    #[test]
    fn oracle_matches_sorting() {
        for m in [l1("n"), linf("n"), l1("log(n + 1)"), linf("poly(2)")] {
            for (p, q) in [(1, 2), (1, 4), (2, 3), (3, 4)] {
                let o = oracle_diameters_coordinate(&m, p, q, 12, 4).unwrap();
                let d = diameters_between_grades(&m, p, q, 64).unwrap();
                assert_eq!(&o.log_values[..], &d.log_values[..5]);
            }
        }
    }

    #[test]
    fn oracle_top_rank_and_limits() {
        let o = oracle_diameters_coordinate(&l1("n"), 1, 2, 6, 0).unwrap();
        assert_eq!(o.value(0).unwrap(), Real::one());
        let full = oracle_diameters_coordinate(&l1("n"), 1, 2, 4, 4).unwrap();
        assert_eq!(full.log_values[4], ExtendedReal::NegInfinity);
        assert!(matches!(
            oracle_diameters_coordinate(&l1("n"), 1, 2, 13, 2),
            Err(KdiamError::OracleBounds(_))
        ));
    }

    #[test]
    fn interleave_doubles_multiplicity() {
        let m = l1("n");
        let mm = KotheMatrix::interleave(m.clone(), m.clone());
        let d = diameters_between_grades(&m, 1, 3, 128).unwrap();
        let dd = diameters_between_grades(&mm, 1, 3, 128).unwrap();
        assert_eq!(dd.provenance, Provenance::Rearranged);
        for i in 0..=64 {
            assert_eq!(dd.log_values[2 * i], d.log_values[i]);
            if 2 * i + 1 <= 128 {
                assert_eq!(dd.log_values[2 * i + 1], d.log_values[i]);
            }
        }
    }

    #[test]
    fn bounded_set_diameters() {
        let m = l1("n");
        // b = 1/a(2) reproduces d(U_2, U_p)
        let b = BoundedSetSpec::new("U_2", parse("exp(1/2)").unwrap());
        let d = diameters_bounded_set_unchecked(&m, &b, 1, 64).unwrap();
        let e = diameters_between_grades(&m, 1, 2, 64).unwrap();
        for i in 0..=64 {
            assert!((d.log_values[i].to_f64() - e.log_values[i].to_f64()).abs() < 1e-25);
        }
        let b = BoundedSetSpec::new("exp(-n)", parse("exp(-1)").unwrap());
        let d = diameters_bounded_set(&m, &b, 1, 64).unwrap();
        assert_eq!(d.log_values[3].to_f64(), -6.0);
        let gap = BoundedSetSpec::new("gap", parse("table([0, 0], tail=exp(-1))").unwrap());
        let d = diameters_bounded_set(&m, &gap, 1, 64).unwrap();
        assert_eq!(d.log_values[0].to_f64(), -4.0);
    }

    #[test]
    fn unbounded_set_names_grade() {
        let m = linf("n");
        let b = BoundedSetSpec::new("1/a(2)", parse("exp(-2)").unwrap());
        match diameters_bounded_set(&m, &b, 1, 256) {
            Err(KdiamError::Unbounded { grade, .. }) => assert_eq!(grade, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let d = diameters_between_grades(&l1("n"), 1, 2, 15).unwrap();
        let csv = d.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 17);
        assert!(csv.lines().nth(1).unwrap().starts_with("0,1,"));
    }
}
