//! Köthe matrices and the power series families.

mod checks;
mod file;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{KdiamError, Result};
use crate::real::{ExtendedReal, Real};
use crate::seq::{ExponentSequence, Index, Seq};
use crate::verdict::Grade;

pub use checks::{check_dn, check_omega, default_grid, is_nuclear, C_MAX, DEFAULT_GRID_STEPS};
pub use file::{parse_space_file, space_to_toml, SpaceFile};

pub const DEFAULT_MAX_GRADE: Grade = 12;
pub const DEFAULT_RESOLUTION: Index = 4096;

/// `f` in `a_n(k) = exp(f(k) alpha_n)`.
#[derive(Clone, Debug, PartialEq)]
pub enum GradeFunction {
    /// `f(k) = -1/k`.
    FiniteType,
    /// `f(k) = k`.
    InfiniteType,
    /// Grammar sequence evaluated at the grade.
    Custom(Seq),
}

/// `sup_k f(k)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Supremum {
    Finite(BigRational),
    Infinite,
    Unknown,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl GradeFunction {
    pub fn at(&self, k: Grade) -> Result<Real> {
        match self.rational_at(k) {
            Some(r) => Ok(Real::from_rational(&r)),
            None => match self {
                GradeFunction::Custom(s) => s.eval(k as Index),
                _ => unreachable!("closed forms are rational"),
            },
        }
    }

    pub fn rational_at(&self, k: Grade) -> Option<BigRational> {
        match self {
            GradeFunction::FiniteType => Some(-rat(1) / rat(k as i64)),
            GradeFunction::InfiniteType => Some(rat(k as i64)),
            GradeFunction::Custom(s) => s.eval_rational(k as Index),
        }
    }

    /// `f` at a positive rational grade; only the two closed forms extend.
    pub fn at_dense(&self, g: &BigRational) -> Option<BigRational> {
        match self {
            GradeFunction::FiniteType => Some(-g.recip()),
            GradeFunction::InfiniteType => Some(g.clone()),
            GradeFunction::Custom(_) => None,
        }
    }

    pub fn supremum(&self) -> Supremum {
        match self {
            GradeFunction::FiniteType => Supremum::Finite(rat(0)),
            GradeFunction::InfiniteType => Supremum::Infinite,
            GradeFunction::Custom(_) => Supremum::Unknown,
        }
    }

    pub fn grammar(&self) -> String {
        match self {
            GradeFunction::FiniteType => "-poly(-1)".into(),
            GradeFunction::InfiniteType => "k".into(),
            GradeFunction::Custom(s) => s.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum MatrixKind {
    Graded {
        alpha: ExponentSequence,
        f: GradeFunction,
    },
    /// `a_n(k)` is the `k`-th sequence (grades from 1).
    Table { grades: Vec<Seq> },
    /// Even indices from the first matrix, odd from the second.
    Interleave(Box<KotheMatrix>, Box<KotheMatrix>),
}

type ColumnCache<T> = Arc<Mutex<HashMap<Grade, Arc<Vec<T>>>>>;

#[derive(Clone)]
pub struct KotheMatrix {
    kind: MatrixKind,
    max_grade: Grade,
    columns: ColumnCache<Real>,
    columns_f64: ColumnCache<f64>,
    diameters: DiameterCache,
}

type DiameterCache = Arc<Mutex<HashMap<(Grade, Grade, Index), Arc<Vec<ExtendedReal>>>>>;

impl fmt::Debug for KotheMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KotheMatrix")
            .field("kind", &self.kind)
            .field("max_grade", &self.max_grade)
            .finish()
    }
}

impl KotheMatrix {
    fn from_kind(kind: MatrixKind, max_grade: Grade) -> KotheMatrix {
        KotheMatrix {
            kind,
            max_grade,
            columns: Arc::default(),
            columns_f64: Arc::default(),
            diameters: Arc::default(),
        }
    }

    /// Memoized `log d_n(U_q, U_p)` tables, filled by the diameters module.
    pub(crate) fn memo_log_diameters(
        &self,
        key: (Grade, Grade, Index),
        compute: impl FnOnce() -> Result<Vec<ExtendedReal>>,
    ) -> Result<Arc<Vec<ExtendedReal>>> {
        if let Some(v) = self.diameters.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(compute()?);
        self.diameters.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// Graded matrix; `f` must be strictly increasing on `1..=max_grade`.
    pub fn graded(
        alpha: ExponentSequence,
        f: GradeFunction,
        max_grade: Grade,
    ) -> Result<KotheMatrix> {
        if max_grade < 1 {
            return Err(KdiamError::Config("maxGrade must be at least 1".into()));
        }
        let mut prev = f.at(1)?;
        for k in 2..=max_grade {
            let cur = f.at(k)?;
            if cur <= prev {
                return Err(KdiamError::InvalidMatrix {
                    grade: k,
                    index: 0,
                    detail: format!("f({k}) = {cur} is not above f({}) = {prev}", k - 1),
                });
            }
            prev = cur;
        }
        Ok(KotheMatrix::from_kind(
            MatrixKind::Graded { alpha, f },
            max_grade,
        ))
    }

    pub fn power_series_finite(alpha: ExponentSequence) -> KotheMatrix {
        Self::graded(alpha, GradeFunction::FiniteType, DEFAULT_MAX_GRADE).expect("-1/k increases")
    }

    pub fn power_series_infinite(alpha: ExponentSequence) -> KotheMatrix {
        Self::graded(alpha, GradeFunction::InfiniteType, DEFAULT_MAX_GRADE).expect("k increases")
    }

    pub fn table(grades: Vec<Seq>) -> Result<KotheMatrix> {
        if grades.is_empty() {
            return Err(KdiamError::Config("table needs at least one grade".into()));
        }
        let k = grades.len() as Grade;
        Ok(KotheMatrix::from_kind(MatrixKind::Table { grades }, k))
    }

    pub fn interleave(first: KotheMatrix, second: KotheMatrix) -> KotheMatrix {
        let k = first.max_grade.min(second.max_grade);
        KotheMatrix::from_kind(MatrixKind::Interleave(Box::new(first), Box::new(second)), k)
    }

    /// Same matrix with a different grade cap (caches are not shared).
    pub fn with_max_grade(&self, max_grade: Grade) -> Result<KotheMatrix> {
        match &self.kind {
            MatrixKind::Graded { alpha, f } => Self::graded(alpha.clone(), f.clone(), max_grade),
            MatrixKind::Table { grades } if (max_grade as usize) <= grades.len() => {
                Ok(KotheMatrix::from_kind(self.kind.clone(), max_grade))
            }
            MatrixKind::Table { grades } => Err(KdiamError::Config(format!(
                "table has only {} grades",
                grades.len()
            ))),
            MatrixKind::Interleave(a, b) => Ok(KotheMatrix::interleave(
                a.with_max_grade(max_grade)?,
                b.with_max_grade(max_grade)?,
            )),
        }
    }

    pub fn kind(&self) -> &MatrixKind {
        &self.kind
    }

    pub fn max_grade(&self) -> Grade {
        self.max_grade
    }

    /// `(alpha, f)` for graded matrices.
    pub fn graded_parts(&self) -> Option<(&ExponentSequence, &GradeFunction)> {
        match &self.kind {
            MatrixKind::Graded { alpha, f } => Some((alpha, f)),
            _ => None,
        }
    }

    pub fn is_graded(&self) -> bool {
        self.graded_parts().is_some()
    }

    /// Largest admissible grade; graded matrices extend past `max_grade`.
    fn grade_ok(&self, k: Grade) -> Result<()> {
        if k == 0 || (!self.is_graded() && k > self.max_grade) {
            return Err(KdiamError::Argument(format!(
                "grade {k} outside 1..={}",
                self.max_grade
            )));
        }
        Ok(())
    }

    pub fn log_weight(&self, k: Grade, n: Index) -> Result<Real> {
        self.grade_ok(k)?;
        match &self.kind {
            MatrixKind::Graded { alpha, f } => f.at(k)?.mul(&alpha.eval(n)?),
            MatrixKind::Table { grades } => {
                let s = &grades[(k - 1) as usize];
                if let Ok(v) = s.eval(n) {
                    if !v.is_positive() {
                        return Err(KdiamError::InvalidMatrix {
                            grade: k,
                            index: n,
                            detail: format!("a_n(k) = {v} is not positive"),
                        });
                    }
                }
                match s.eval_ln_abs(n)? {
                    ExtendedReal::Finite(r) => Ok(r),
                    other => Err(KdiamError::InvalidMatrix {
                        grade: k,
                        index: n,
                        detail: format!("log a_n(k) = {other}"),
                    }),
                }
            }
            MatrixKind::Interleave(a, b) => {
                if n % 2 == 0 {
                    a.log_weight(k, n / 2)
                } else {
                    b.log_weight(k, n / 2)
                }
            }
        }
    }

    pub fn weight(&self, k: Grade, n: Index) -> Result<Real> {
        self.log_weight(k, n)?.exp()
    }

    /// `log a_n(k)` for `n < len`, cached.
    pub fn log_column(&self, k: Grade, len: usize) -> Result<Arc<Vec<Real>>> {
        self.grade_ok(k)?;
        if let Some(c) = self.columns.lock().unwrap().get(&k) {
            if c.len() >= len {
                return Ok(c.clone());
            }
        }
        let col: Vec<Real> = match &self.kind {
            MatrixKind::Graded { alpha, f } => {
                let fk = f.at(k)?;
                let alpha = alpha.cached().range(0, len.saturating_sub(1) as Index)?;
                alpha.iter().map(|a| fk.mul(a)).collect::<Result<_>>()?
            }
            MatrixKind::Table { .. } => (0..len as Index)
                .map(|n| self.log_weight(k, n))
                .collect::<Result<_>>()?,
            MatrixKind::Interleave(a, b) => {
                let ca = a.log_column(k, len.div_ceil(2))?;
                let cb = b.log_column(k, len / 2)?;
                (0..len)
                    .map(|n| {
                        if n % 2 == 0 {
                            ca[n / 2].clone()
                        } else {
                            cb[n / 2].clone()
                        }
                    })
                    .collect()
            }
        };
        let col = Arc::new(col);
        self.columns.lock().unwrap().insert(k, col.clone());
        Ok(col)
    }

    /// Binary64 view of [`Self::log_column`], for heuristic scans.
    pub fn log_column_f64(&self, k: Grade, len: usize) -> Result<Arc<Vec<f64>>> {
        if let Some(c) = self.columns_f64.lock().unwrap().get(&k) {
            if c.len() >= len {
                return Ok(c.clone());
            }
        }
        let col: Vec<f64> = match &self.kind {
            MatrixKind::Graded { alpha, f } => {
                let fk = f.at(k)?.to_f64();
                let alpha = alpha.cached().range(0, len.saturating_sub(1) as Index)?;
                alpha.iter().map(|a| fk * a.to_f64()).collect()
            }
            _ => self.log_column(k, len)?.iter().map(Real::to_f64).collect(),
        };
        let col = Arc::new(col);
        self.columns_f64.lock().unwrap().insert(k, col.clone());
        Ok(col)
    }

    /// Checks positivity and monotonicity in `k` for `n <= n_max`; graded
    /// matrices are checked structurally.
    pub fn validate(&self, n_max: Index) -> Result<()> {
        match &self.kind {
            MatrixKind::Graded { alpha, .. } => {
                if alpha.checked_to() < n_max {
                    ExponentSequence::new(alpha.seq().clone(), n_max)?;
                }
                Ok(())
            }
            MatrixKind::Interleave(a, b) => {
                a.validate(n_max / 2)?;
                b.validate(n_max / 2)
            }
            MatrixKind::Table { .. } => {
                let len = n_max as usize + 1;
                let mut prev = self.log_column(1, len)?;
                for k in 2..=self.max_grade {
                    let cur = self.log_column(k, len)?;
                    for n in 0..len {
                        if cur[n] < prev[n] {
                            return Err(KdiamError::InvalidMatrix {
                                grade: k,
                                index: n as Index,
                                detail: format!("a_n({k}) < a_n({})", k - 1),
                            });
                        }
                    }
                    prev = cur;
                }
                Ok(())
            }
        }
    }

    /// Closed-form `epsilon_n(p, q) = (f(q) - f(p)) alpha_n` when `f` is
    /// rational at both grades.
    pub fn log_ratio_closed_form(&self, p: Grade, q: Grade) -> Option<Seq> {
        let (alpha, f) = self.graded_parts()?;
        let c = f.rational_at(q)? - f.rational_at(p)?;
        Some(Seq::scale(c, alpha.seq().clone()))
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            MatrixKind::Graded { alpha, f } => match f {
                GradeFunction::FiniteType => format!("Lambda_1({})", alpha.seq()),
                GradeFunction::InfiniteType => format!("Lambda_inf({})", alpha.seq()),
                GradeFunction::Custom(s) => format!("graded(alpha={}, f={s})", alpha.seq()),
            },
            MatrixKind::Table { grades } => format!("table({} grades)", grades.len()),
            MatrixKind::Interleave(a, b) => {
                format!("interleave({}, {})", a.describe(), b.describe())
            }
        }
    }
}

/// Status of a standing hypothesis for a catalog entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypothesisStatus {
    VerifiedAtResolution,
    Assumed,
    Failed,
    Unverified,
}

impl HypothesisStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            HypothesisStatus::VerifiedAtResolution => "verified-at-resolution",
            HypothesisStatus::Assumed => "assumed",
            HypothesisStatus::Failed => "failed",
            HypothesisStatus::Unverified => "unverified",
        }
    }

    pub fn admits(self) -> bool {
        matches!(
            self,
            HypothesisStatus::VerifiedAtResolution | HypothesisStatus::Assumed
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hypotheses {
    pub nuclear: HypothesisStatus,
    pub dn: HypothesisStatus,
    pub omega: HypothesisStatus,
}

impl Hypotheses {
    pub fn unverified() -> Hypotheses {
        Hypotheses {
            nuclear: HypothesisStatus::Unverified,
            dn: HypothesisStatus::Unverified,
            omega: HypothesisStatus::Unverified,
        }
    }

    /// Whether the entry may enter pass/fail counts of a theorem campaign.
    pub fn admitted(&self) -> bool {
        self.nuclear.admits() && self.dn.admits() && self.omega.admits()
    }
}

#[derive(Clone, Debug)]
pub struct SpaceDescriptor {
    pub matrix: KotheMatrix,
    pub label: String,
    pub hypotheses: Hypotheses,
}

impl SpaceDescriptor {
    pub fn new(label: impl Into<String>, matrix: KotheMatrix) -> SpaceDescriptor {
        SpaceDescriptor {
            matrix,
            label: label.into(),
            hypotheses: Hypotheses::unverified(),
        }
    }
}

/// The canonical `epsilon = epsilon(1, 2)`: closed form for graded matrices,
/// otherwise `-log d_n(U_2, U_1)` over `n <= n_max`.
pub fn associated_exponents(m: &KotheMatrix, n_max: Index) -> Result<ExponentSequence> {
    if m.max_grade() < 2 && !m.is_graded() {
        return Err(KdiamError::Config(
            "associated exponents need at least two grades".into(),
        ));
    }
    if let Some(eps) = m.log_ratio_closed_form(1, 2) {
        return ExponentSequence::new(eps, n_max.min(m.graded_parts().unwrap().0.checked_to()));
    }
    let d = crate::diameters::diameters_between_grades(m, 1, 2, n_max)?;
    let mut values = Vec::with_capacity(d.log_values.len());
    for (n, l) in d.log_values.iter().enumerate() {
        match l {
            ExtendedReal::Finite(v) => values.push(ExtendedReal::Finite(v.neg())),
            _ => return Err(KdiamError::DegenerateMatrix(format!("d_{n}(U_2, U_1) = 0"))),
        }
    }
    ExponentSequence::new(Seq::samples(values), n_max)
}

/// Multiplies an exponent sequence by a positive rational, e.g. for the
/// scale-invariance checks.
pub fn scale_exponents(eps: &ExponentSequence, c: &BigRational) -> Result<ExponentSequence> {
    if !c.is_positive() {
        return Err(KdiamError::Argument("scale must be positive".into()));
    }
    if c.is_one() {
        return Ok(eps.clone());
    }
    ExponentSequence::new(Seq::scale(c.clone(), eps.seq().clone()), eps.checked_to())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::parse;

    fn alpha(s: &str) -> ExponentSequence {
        ExponentSequence::new(parse(s).unwrap(), 256).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn finite_type_weights() {
        let m = KotheMatrix::power_series_finite(alpha("n"));
        assert!(close(m.weight(2, 5).unwrap().to_f64(), (-2.5f64).exp()));
        let a = |k| m.weight(k, 7).unwrap();
        assert!(a(1) < a(2) && a(2) < a(50) && a(50).to_f64() < 1.0);
    }

    #[test]
    fn finite_type_log_alpha_is_a_power() {
        let m = KotheMatrix::power_series_finite(alpha("log(n + 1)"));
        for n in [0u64, 3, 10] {
            let expect = ((n + 1) as f64).powf(-1.0 / 3.0);
            assert!(close(m.weight(3, n).unwrap().to_f64(), expect));
        }
    }

    #[test]
    fn infinite_type_weights() {
        let m = KotheMatrix::power_series_infinite(alpha("n"));
        assert!(close(m.weight(2, 3).unwrap().to_f64(), 6f64.exp()));
        assert_eq!(m.weight(5, 0).unwrap(), Real::one());
        let m = KotheMatrix::power_series_infinite(alpha("log(n + 1)"));
        assert!(close(m.weight(2, 4).unwrap().to_f64(), 25.0));
    }

    #[test]
    fn interleave_picks_by_parity() {
        let a = KotheMatrix::power_series_finite(alpha("n"));
        let b = KotheMatrix::power_series_infinite(alpha("n"));
        let m = KotheMatrix::interleave(a.clone(), b.clone());
        assert_eq!(m.log_weight(2, 6).unwrap(), a.log_weight(2, 3).unwrap());
        assert_eq!(m.log_weight(2, 7).unwrap(), b.log_weight(2, 3).unwrap());
        let col = m.log_column(3, 9).unwrap();
        assert_eq!(col[8], a.log_weight(3, 4).unwrap());
    }

    #[test]
    fn decreasing_f_rejected_with_grade() {
        let f = GradeFunction::Custom(parse("-k").unwrap());
        match KotheMatrix::graded(alpha("n"), f, 4) {
            Err(KdiamError::InvalidMatrix { grade, .. }) => assert_eq!(grade, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn table_validation() {
        let ok = KotheMatrix::table(vec![parse("1").unwrap(), parse("exp(1)").unwrap()]).unwrap();
        ok.validate(64).unwrap();
        let bad = KotheMatrix::table(vec![parse("2").unwrap(), parse("1").unwrap()]).unwrap();
        assert!(matches!(
            bad.validate(64),
            Err(KdiamError::InvalidMatrix {
                grade: 2,
                index: 0,
                ..
            })
        ));
        let zero = KotheMatrix::table(vec![parse("table([0], tail=1)").unwrap()]).unwrap();
        assert!(zero.log_weight(1, 0).is_err());
    }

    #[test]
    fn exponents_of_power_series() {
        let l1 = KotheMatrix::power_series_finite(alpha("n"));
        let e = associated_exponents(&l1, 256).unwrap();
        assert_eq!(e.seq(), &parse("1/2*n").unwrap());
        let li = KotheMatrix::power_series_infinite(alpha("n"));
        assert_eq!(
            associated_exponents(&li, 256).unwrap().seq(),
            &parse("n").unwrap()
        );
        // both are constant multiples of alpha
        let a = parse("n").unwrap();
        assert!(Seq::exact_ratio(e.seq(), &a).is_some());
    }
}
