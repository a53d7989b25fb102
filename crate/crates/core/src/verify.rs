//! Theorem campaigns: both sides of each equivalence or implication are
//! evaluated on a catalog of spaces and compared row by row.
//!
//! Rows of spaces whose nuclearity, DN or Omega status is not verified at
//! resolution (or assumed) are kept as observations and never count towards
//! violations.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use crate::config::Config;
use crate::criteria::{
    condition_a, condition_b, condition_d2, condition_wq, finite_delta_zero_flag,
    infinite_delta_divergent_flag, infinite_diametral_coincidence, lemma46, prominence_canonical,
    prop45_criterion, REPORT_SCHEMA_VERSION,
};
use crate::error::{KdiamError, Result};
use crate::invariants::{
    algebra_closed, in_diametral, in_tdot, power_series_membership, PowerSeriesSet,
};
use crate::seq::{parse, ExponentSequence, Seq};

use crate::space::{
    associated_exponents, check_dn, check_omega, is_nuclear, parse_space_file, Hypotheses,
    HypothesisStatus, KotheMatrix, MatrixKind, SpaceDescriptor,
};
use crate::verdict::{Outcome, Verdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    T31,
    P41,
    T42Surrogate,
    P43,
    P44,
    P45,
    C47,
    T48,
    P49,
    C410,
    L46,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::T31,
        TheoremId::P41,
        TheoremId::T42Surrogate,
        TheoremId::P43,
        TheoremId::P44,
        TheoremId::P45,
        TheoremId::C47,
        TheoremId::T48,
        TheoremId::P49,
        TheoremId::C410,
        TheoremId::L46,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T31 => "T3.1",
            TheoremId::P41 => "P4.1",
            TheoremId::T42Surrogate => "T4.2-sufficiency-surrogate",
            TheoremId::P43 => "P4.3",
            TheoremId::P44 => "P4.4",
            TheoremId::P45 => "P4.5",
            TheoremId::C47 => "C4.7",
            TheoremId::T48 => "T4.8",
            TheoremId::P49 => "P4.9",
            TheoremId::C410 => "C4.10",
            TheoremId::L46 => "L4.6",
        }
    }

    pub fn parse(s: &str) -> Option<TheoremId> {
        match s {
            "T4.2" | "T4.2-sufficiency" => Some(TheoremId::T42Surrogate),
            _ => TheoremId::ALL.iter().copied().find(|t| t.as_str() == s),
        }
    }

    /// `"all"` or a comma separated list of ids.
    pub fn parse_list(s: &str) -> Result<Vec<TheoremId>> {
        if s == "all" {
            return Ok(TheoremId::ALL.to_vec());
        }
        let mut out = Vec::new();
        for part in s.split(',') {
            let id = TheoremId::parse(part.trim())
                .ok_or_else(|| KdiamError::Argument(format!("unknown theorem id '{part}'")))?;
            if !out.contains(&id) {
                out.push(id);
            }
        }
        Ok(out)
    }

    fn relation(self) -> Relation {
        use Fact::*;
        match self {
            TheoremId::T31 => {
                Relation::Equivalent(vec![vec![InfiniteDiametral], vec![InfiniteDivergent]])
            }
            TheoremId::P41 => Relation::Implies(vec![FiniteZero], vec![DeltaFinite]),
            TheoremId::T42Surrogate => Relation::Implies(vec![Wq, DeltaFinite], vec![FiniteZero]),
            TheoremId::P43 => Relation::Implies(vec![ConditionA, DeltaFinite], vec![FiniteZero]),
            TheoremId::P44 => Relation::Implies(vec![ConditionB, DeltaFinite], vec![FiniteZero]),
            TheoremId::P45 => Relation::Equivalent(vec![vec![D2], vec![Prop45], vec![Prominent]]),
            TheoremId::C47 => Relation::Implies(vec![FiniteZero], vec![Prominent]),
            TheoremId::T48 => Relation::Equivalent(vec![vec![FiniteZero], vec![D2, DeltaFinite]]),
            TheoremId::P49 => Relation::Implies(vec![Prominent, DeltaTdot], vec![FiniteZero]),
            TheoremId::C410 => {
                Relation::Equivalent(vec![vec![Prominent, AlgebraClosed], vec![FiniteZero]])
            }
            TheoremId::L46 => Relation::Holds(vec![Lemma46]),
        }
    }

    fn needs_battery(self) -> bool {
        self.relation().facts().iter().any(|f| f.needs_battery())
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A per-space proposition evaluated once and shared across campaigns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Fact {
    /// Condition (*), equivalent to `Delta(E) = Delta(Lambda_inf(epsilon))`.
    InfiniteDiametral,
    /// Divergent flag of the infinite-type delta value.
    InfiniteDivergent,
    /// The finite-type delta value is zero.
    FiniteZero,
    /// `Delta(E) = Lambda_1(epsilon)` on the battery.
    DeltaFinite,
    /// `Delta(E) = Tdot(E)` on the battery.
    DeltaTdot,
    D2,
    Prop45,
    Prominent,
    ConditionA,
    ConditionB,
    Wq,
    AlgebraClosed,
    Lemma46,
}

impl Fact {
    fn as_str(self) -> &'static str {
        match self {
            Fact::InfiniteDiametral => "infinite_Delta_coincidence",
            Fact::InfiniteDivergent => "infinite_delta_divergent",
            Fact::FiniteZero => "finite_delta_zero",
            Fact::DeltaFinite => "Delta_eq_Lambda1_battery",
            Fact::DeltaTdot => "Delta_eq_Tdot_battery",
            Fact::D2 => "condition_D2",
            Fact::Prop45 => "prop45",
            Fact::Prominent => "prominence",
            Fact::ConditionA => "condition_A",
            Fact::ConditionB => "condition_B",
            Fact::Wq => "condition_wQ",
            Fact::AlgebraClosed => "Delta_algebra",
            Fact::Lemma46 => "lemma46",
        }
    }

    fn needs_battery(self) -> bool {
        matches!(
            self,
            Fact::DeltaFinite | Fact::DeltaTdot | Fact::AlgebraClosed
        )
    }
}

enum Relation {
    /// Conjunction of the first list implies conjunction of the second.
    Implies(Vec<Fact>, Vec<Fact>),
    /// Every group (a conjunction) has the same truth value.
    Equivalent(Vec<Vec<Fact>>),
    /// Every listed fact holds.
    Holds(Vec<Fact>),
}

impl Relation {
    fn facts(&self) -> Vec<Fact> {
        match self {
            Relation::Implies(a, b) => a.iter().chain(b).copied().collect(),
            Relation::Equivalent(g) => g.iter().flatten().copied().collect(),
            Relation::Holds(a) => a.clone(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Relation::Implies(..) => "implication",
            Relation::Equivalent(..) => "equivalence",
            Relation::Holds(..) => "property",
        }
    }
}

/// Row status. Only `Violated` rows of admitted spaces fail a campaign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    /// Implication with a false antecedent.
    Vacuous,
    Violated,
    Undecided,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Agree => "agree",
            Agreement::Vacuous => "vacuous",
            Agreement::Violated => "violated",
            Agreement::Undecided => "undecided",
        }
    }
}

/// One probe of the candidate battery, built from the associated exponents.
#[derive(Clone)]
pub struct BatteryEntry {
    pub label: &'static str,
    build: fn(&Seq) -> Seq,
}

impl BatteryEntry {
    pub fn candidate(&self, eps: &Seq) -> Seq {
        (self.build)(eps)
    }
}

impl fmt::Debug for BatteryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label)
    }
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn exp_scaled(n: i64, d: i64, s: Seq) -> Seq {
    Seq::exp(Seq::scale(r(n, d), s))
}

fn eps_log(e: &Seq) -> Seq {
    let log = Seq::log_of(Seq::sum(vec![e.clone(), Seq::constant(BigRational::one())]));
    Seq::product(vec![e.clone(), log])
}

/// The twenty probes used for every set equality tested through
/// membership: polynomial, exponential with rates `c` around the
/// borderline, sub-exponential and super-exponential growth and decay.
pub fn default_battery() -> Vec<BatteryEntry> {
    macro_rules! entry {
        ($label:expr, $f:expr) => {
            BatteryEntry {
                label: $label,
                build: $f,
            }
        };
    }
    vec![
        entry!("0", |_| Seq::constant(r(0, 1))),
        entry!("1", |_| Seq::constant(r(1, 1))),
        entry!("eps", |e| e.clone()),
        entry!("eps^2", |e| Seq::pow(e.clone(), r(2, 1))),
        entry!("eps^(1/2)", |e| Seq::pow(e.clone(), r(1, 2))),
        entry!("exp(eps^(1/2))", |e| Seq::exp(Seq::pow(e.clone(), r(1, 2)))),
        entry!("exp(eps^(1/3))", |e| Seq::exp(Seq::pow(e.clone(), r(1, 3)))),
        entry!("exp(-eps^(1/2))", |e| exp_scaled(
            -1,
            1,
            Seq::pow(e.clone(), r(1, 2))
        )),
        entry!("exp(-4 eps)", |e| exp_scaled(-4, 1, e.clone())),
        entry!("exp(-2 eps)", |e| exp_scaled(-2, 1, e.clone())),
        entry!("exp(-eps)", |e| exp_scaled(-1, 1, e.clone())),
        entry!("exp(-eps/2)", |e| exp_scaled(-1, 2, e.clone())),
        entry!("exp(eps/2)", |e| exp_scaled(1, 2, e.clone())),
        entry!("exp(eps)", |e| exp_scaled(1, 1, e.clone())),
        entry!("exp(2 eps)", |e| exp_scaled(2, 1, e.clone())),
        entry!("exp(4 eps)", |e| exp_scaled(4, 1, e.clone())),
        entry!("exp(eps^2)", |e| Seq::exp(Seq::pow(e.clone(), r(2, 1)))),
        entry!("exp(-eps^2)", |e| exp_scaled(
            -1,
            1,
            Seq::pow(e.clone(), r(2, 1))
        )),
        entry!("exp(eps log(eps+1))", |e| Seq::exp(eps_log(e))),
        entry!("exp(-eps log(eps+1))", |e| exp_scaled(-1, 1, eps_log(e))),
    ]
}

/// `epsilon = eps_scale * epsilon(1, 2)` as a sequence: the closed form for
/// graded matrices, samples of the computed diameters otherwise.
pub fn epsilon_sequence(m: &KotheMatrix, cfg: &Config) -> Result<Seq> {
    let len = 2 * (cfg.resolution.n + 1);
    let eps = match m.log_ratio_closed_form(1, 2) {
        Some(s) => s,
        None => associated_exponents(m, len)?.seq().clone(),
    };
    if cfg.eps_scale.is_one() {
        Ok(eps)
    } else {
        Ok(Seq::scale(cfg.eps_scale.clone(), eps))
    }
}

/// Per-candidate comparison of two membership tests.
#[derive(Clone, Debug)]
pub struct BatteryRow {
    pub label: String,
    pub left: Outcome,
    pub right: Outcome,
}

impl BatteryRow {
    pub fn disagrees(&self) -> bool {
        self.left.is_decided() && self.right.is_decided() && self.left != self.right
    }

    pub fn decided(&self) -> bool {
        self.left.is_decided() && self.right.is_decided()
    }
}

/// Set equality through the battery: fails on a decided disagreement,
/// undetermined when no candidate is decided on both sides.
pub fn battery_verdict(cfg: &Config, rows: &[BatteryRow], what: &str) -> Verdict {
    let r = cfg.resolution;
    if let Some(bad) = rows.iter().find(|x| x.disagrees()) {
        return Verdict::fails(
            r,
            Witness::new()
                .with("candidate", &bad.label)
                .with("left", bad.left)
                .with("right", bad.right),
        )
        .with_note(what.to_string());
    }
    let decided = rows.iter().filter(|x| x.decided()).count();
    if decided == 0 {
        return Verdict::undetermined(r, format!("{what}: no candidate decided on both sides"));
    }
    Verdict::holds(
        r,
        vec![Witness::new()
            .with("decided", decided)
            .with("candidates", rows.len())],
    )
    .with_note(what.to_string())
}

/// `in_Delta(E, t)` against the direct `Lambda_1(epsilon)` norm test.
pub fn delta_vs_lambda1(
    m: &KotheMatrix,
    cfg: &Config,
    battery: &[BatteryEntry],
) -> Result<Vec<BatteryRow>> {
    let eps = epsilon_sequence(m, cfg)?;
    let r = cfg.resolution;
    battery
        .iter()
        .map(|b| {
            let t = b.candidate(&eps);
            Ok(BatteryRow {
                label: b.label.to_string(),
                left: in_diametral(m, &t, r)?.outcome,
                right: power_series_membership(PowerSeriesSet::Lambda1, &eps, &t, r)?.outcome,
            })
        })
        .collect()
}

/// `in_Delta(E, t)` against `in_Tdot(E, t)`.
pub fn delta_vs_tdot(
    m: &KotheMatrix,
    cfg: &Config,
    battery: &[BatteryEntry],
) -> Result<Vec<BatteryRow>> {
    let eps = epsilon_sequence(m, cfg)?;
    let r = cfg.resolution;
    battery
        .iter()
        .map(|b| {
            let t = b.candidate(&eps);
            Ok(BatteryRow {
                label: b.label.to_string(),
                left: in_diametral(m, &t, r)?.outcome,
                right: in_tdot(m, &t, r, &cfg.eps_grid)?.outcome,
            })
        })
        .collect()
}

/// Facts of one space, computed on demand.
struct Facts<'a> {
    m: &'a KotheMatrix,
    cfg: &'a Config,
    battery: &'a [BatteryEntry],
    cache: RefCell<BTreeMap<Fact, Verdict>>,
}

impl<'a> Facts<'a> {
    fn get(&self, f: Fact) -> Verdict {
        if let Some(v) = self.cache.borrow().get(&f) {
            return v.clone();
        }
        let v = self.compute(f).unwrap_or_else(|e| {
            Verdict::undetermined(self.cfg.resolution, format!("not evaluated: {e}"))
        });
        self.cache.borrow_mut().insert(f, v.clone());
        v
    }

    fn compute(&self, f: Fact) -> Result<Verdict> {
        let (m, cfg) = (self.m, self.cfg);
        match f {
            Fact::InfiniteDiametral => infinite_diametral_coincidence(m, cfg),
            Fact::InfiniteDivergent => infinite_delta_divergent_flag(m, cfg),
            Fact::FiniteZero => finite_delta_zero_flag(m, cfg),
            Fact::DeltaFinite => Ok(battery_verdict(
                cfg,
                &delta_vs_lambda1(m, cfg, self.battery)?,
                "Delta(E) against Lambda_1(eps)",
            )),
            Fact::DeltaTdot => Ok(battery_verdict(
                cfg,
                &delta_vs_tdot(m, cfg, self.battery)?,
                "Delta(E) against Tdot(E)",
            )),
            Fact::D2 => Ok(condition_d2(m, cfg)?.integer),
            Fact::Prop45 => prop45_criterion(m, cfg),
            Fact::Prominent => Ok(prominence_canonical(m, cfg)?.0),
            Fact::ConditionA => condition_a(m, cfg),
            Fact::ConditionB => condition_b(m, cfg),
            Fact::Wq => condition_wq(m, cfg),
            Fact::AlgebraClosed => {
                let eps = epsilon_sequence(m, cfg)?;
                let cands: Vec<Seq> = self.battery.iter().map(|b| b.candidate(&eps)).collect();
                algebra_closed(m, &cands, cfg.resolution)
            }
            Fact::Lemma46 => lemma46(m, cfg),
        }
    }

    fn conj(&self, facts: &[Fact]) -> Outcome {
        facts
            .iter()
            .fold(Outcome::Holds, |acc, f| acc.and(self.get(*f).outcome))
    }
}

/// One space under one theorem.
#[derive(Clone, Debug)]
pub struct CampaignRow {
    pub space: String,
    pub admitted: bool,
    pub hypotheses: Hypotheses,
    /// Truth value of each side (a conjunction of facts).
    pub sides: Vec<(String, Outcome)>,
    pub facts: Vec<(String, Verdict)>,
    pub agreement: Agreement,
}

impl CampaignRow {
    fn to_json(&self) -> Value {
        let facts: serde_json::Map<String, Value> = self
            .facts
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        json!({
            "space": self.space,
            "hypothesis_status": if self.admitted { "verified" } else { "hypothesis-unverified" },
            "hypotheses": hypotheses_json(&self.hypotheses),
            "sides": self.sides.iter().map(|(k, o)| json!({"side": k, "outcome": o.as_str()})).collect::<Vec<_>>(),
            "facts": facts,
            "agreement": self.agreement.as_str(),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub agree: usize,
    pub vacuous: usize,
    pub violated: usize,
    pub undecided: usize,
    /// Rows of non-admitted spaces, by agreement status in the other fields'
    /// order.
    pub observations: usize,
    pub observed_violations: usize,
}

impl Summary {
    fn add(&mut self, row: &CampaignRow) {
        if !row.admitted {
            self.observations += 1;
            if row.agreement == Agreement::Violated {
                self.observed_violations += 1;
            }
            return;
        }
        match row.agreement {
            Agreement::Agree => self.agree += 1,
            Agreement::Vacuous => self.vacuous += 1,
            Agreement::Violated => self.violated += 1,
            Agreement::Undecided => self.undecided += 1,
        }
    }

    fn merge(&mut self, o: &Summary) {
        self.agree += o.agree;
        self.vacuous += o.vacuous;
        self.violated += o.violated;
        self.undecided += o.undecided;
        self.observations += o.observations;
        self.observed_violations += o.observed_violations;
    }

    pub fn to_json(&self) -> Value {
        json!({
            "agree": self.agree,
            "vacuous": self.vacuous,
            "violated": self.violated,
            "undecided": self.undecided,
            "observations": self.observations,
            "observed_violations": self.observed_violations,
        })
    }
}

#[derive(Clone, Debug)]
pub struct CampaignReport {
    pub theorem: TheoremId,
    pub rows: Vec<CampaignRow>,
    pub summary: Summary,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.summary.violated == 0
    }

    pub fn to_json(&self) -> Value {
        let rel = self.theorem.relation();
        let sides: Vec<String> = match &rel {
            Relation::Implies(a, b) => vec![group_label(a), group_label(b)],
            Relation::Equivalent(g) => g.iter().map(|x| group_label(x)).collect(),
            Relation::Holds(a) => vec![group_label(a)],
        };
        json!({
            "theorem": self.theorem.as_str(),
            "relation": rel.kind(),
            "sides": sides,
            "rows": self.rows.iter().map(CampaignRow::to_json).collect::<Vec<_>>(),
            "summary": self.summary.to_json(),
            "passed": self.passed(),
        })
    }
}

fn group_label(g: &[Fact]) -> String {
    g.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(" & ")
}

/// Theorems, catalog, battery and configuration of a run.
#[derive(Clone, Debug)]
pub struct Campaign {
    pub theorems: Vec<TheoremId>,
    pub catalog: Vec<SpaceDescriptor>,
    pub battery: Vec<BatteryEntry>,
    pub config: Config,
}

impl Campaign {
    pub fn new(
        theorems: Vec<TheoremId>,
        catalog: Vec<SpaceDescriptor>,
        config: Config,
    ) -> Campaign {
        Campaign {
            theorems,
            catalog,
            battery: default_battery(),
            config,
        }
    }
}

/// Results of all theorems of a campaign, in the order requested.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub campaigns: Vec<CampaignReport>,
    /// Catalog entries dropped before the run, e.g. by the nuclearity gate.
    pub excluded: Vec<String>,
    pub catalog: Vec<SpaceDescriptor>,
    pub config: Config,
}

impl VerifyReport {
    pub fn violations(&self) -> usize {
        self.campaigns.iter().map(|c| c.summary.violated).sum()
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for c in &self.campaigns {
            s.merge(&c.summary);
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "kind": "verify",
            "config": self.config.to_json(),
            "catalog": self.catalog.iter().map(descriptor_json).collect::<Vec<_>>(),
            "excluded": self.excluded,
            "campaigns": self.campaigns.iter().map(CampaignReport::to_json).collect::<Vec<_>>(),
            "summary": self.summary().to_json(),
            "violations": self.violations(),
        })
    }
}

fn hypotheses_json(h: &Hypotheses) -> Value {
    json!({
        "nuclear": h.nuclear.as_str(),
        "DN": h.dn.as_str(),
        "Omega": h.omega.as_str(),
    })
}

fn descriptor_json(d: &SpaceDescriptor) -> Value {
    json!({
        "label": d.label,
        "matrix": d.matrix.describe(),
        "hypotheses": hypotheses_json(&d.hypotheses),
        "admitted": d.hypotheses.admitted(),
    })
}

fn agreement(rel: &Relation, facts: &Facts) -> (Vec<(String, Outcome)>, Agreement) {
    match rel {
        Relation::Implies(a, b) => {
            let (l, rr) = (facts.conj(a), facts.conj(b));
            let ag = match (l, rr) {
                (Outcome::Fails, _) => Agreement::Vacuous,
                (Outcome::Holds, Outcome::Holds) => Agreement::Agree,
                (Outcome::Holds, Outcome::Fails) => Agreement::Violated,
                _ => Agreement::Undecided,
            };
            (vec![(group_label(a), l), (group_label(b), rr)], ag)
        }
        Relation::Equivalent(groups) => {
            let sides: Vec<(String, Outcome)> = groups
                .iter()
                .map(|g| (group_label(g), facts.conj(g)))
                .collect();
            let decided: Vec<Outcome> = sides
                .iter()
                .map(|s| s.1)
                .filter(|o| o.is_decided())
                .collect();
            let ag = if decided.len() < 2 {
                Agreement::Undecided
            } else if decided.iter().all(|o| *o == decided[0]) {
                Agreement::Agree
            } else {
                Agreement::Violated
            };
            (sides, ag)
        }
        Relation::Holds(a) => {
            let o = facts.conj(a);
            let ag = match o {
                Outcome::Holds => Agreement::Agree,
                Outcome::Fails => Agreement::Violated,
                Outcome::Undetermined => Agreement::Undecided,
            };
            (vec![(group_label(a), o)], ag)
        }
    }
}

fn rows_for_space(
    d: &SpaceDescriptor,
    theorems: &[TheoremId],
    battery: &[BatteryEntry],
    cfg: &Config,
) -> Vec<CampaignRow> {
    let facts = Facts {
        m: &d.matrix,
        cfg,
        battery,
        cache: RefCell::new(BTreeMap::new()),
    };
    theorems
        .iter()
        .map(|t| {
            let rel = t.relation();
            let (sides, ag) = agreement(&rel, &facts);
            let mut used = rel.facts();
            used.sort();
            used.dedup();
            CampaignRow {
                space: d.label.clone(),
                admitted: d.hypotheses.admitted(),
                hypotheses: d.hypotheses,
                sides,
                facts: used
                    .iter()
                    .map(|f| (f.as_str().to_string(), facts.get(*f)))
                    .collect(),
                agreement: ag,
            }
        })
        .collect()
}

/// Runs every theorem of the campaign. Spaces are evaluated in parallel;
/// rows keep catalog order.
pub fn run_campaign(c: &Campaign) -> Result<VerifyReport> {
    if c.catalog.is_empty() {
        return Err(KdiamError::Argument("catalog is empty".into()));
    }
    if c.theorems.is_empty() {
        return Err(KdiamError::Argument("no theorem selected".into()));
    }
    if c.battery.is_empty() && c.theorems.iter().any(|t| t.needs_battery()) {
        return Err(KdiamError::Argument("candidate battery is empty".into()));
    }
    c.config.validate()?;
    let per_space: Vec<Vec<CampaignRow>> = std::thread::scope(|s| {
        let handles: Vec<_> = c
            .catalog
            .iter()
            .map(|d| s.spawn(|| rows_for_space(d, &c.theorems, &c.battery, &c.config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("campaign worker panicked"))
            .collect()
    });
    let campaigns = c
        .theorems
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let rows: Vec<CampaignRow> = per_space.iter().map(|r| r[i].clone()).collect();
            let mut summary = Summary::default();
            rows.iter().for_each(|r| summary.add(r));
            CampaignReport {
                theorem: *t,
                rows,
                summary,
            }
        })
        .collect();
    Ok(VerifyReport {
        campaigns,
        excluded: Vec::new(),
        catalog: c.catalog.clone(),
        config: c.config.clone(),
    })
}

fn status(v: &Verdict) -> HypothesisStatus {
    match v.outcome {
        Outcome::Holds => HypothesisStatus::VerifiedAtResolution,
        Outcome::Fails => HypothesisStatus::Failed,
        Outcome::Undetermined => HypothesisStatus::Unverified,
    }
}

/// Checks nuclearity, DN and Omega at resolution. Interleaves are labelled
/// hypothesis-unverified without running the checks.
pub fn label_hypotheses(d: &mut SpaceDescriptor, cfg: &Config) -> Result<()> {
    if matches!(d.matrix.kind(), MatrixKind::Interleave(..)) {
        d.hypotheses = Hypotheses::unverified();
        return Ok(());
    }
    let n = cfg.resolution.n;
    d.hypotheses = Hypotheses {
        nuclear: status(&is_nuclear(&d.matrix, n)?),
        dn: status(&check_dn(&d.matrix, n, &cfg.tau_grid)?),
        omega: status(&check_omega(&d.matrix, n, &cfg.theta_grid)?),
    };
    Ok(())
}

/// Parses and validates space files and labels their hypotheses.
pub fn build_catalog(specs: &[(String, String)], cfg: &Config) -> Result<Vec<SpaceDescriptor>> {
    let mut out = Vec::new();
    for (name, text) in specs {
        let file = parse_space_file(text, cfg.resolution.n).map_err(|e| match e {
            KdiamError::Parse { location, message } => KdiamError::Parse {
                location,
                message: format!("{name}: {message}"),
            },
            e => e,
        })?;
        file.matrix.validate(cfg.resolution.n)?;
        let mut d = SpaceDescriptor::new(file.label, file.matrix);
        label_hypotheses(&mut d, cfg)?;
        out.push(d);
    }
    Ok(out)
}

/// Every `*.toml` file of a directory, in file name order.
pub fn catalog_from_dir(dir: &Path, cfg: &Config) -> Result<Vec<SpaceDescriptor>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map_or(false, |x| x == "toml"))
        .collect();
    paths.sort();
    let specs = paths
        .iter()
        .map(|p| Ok((p.display().to_string(), std::fs::read_to_string(p)?)))
        .collect::<Result<Vec<_>>>()?;
    build_catalog(&specs, cfg)
}

/// Exponent sequences of the default catalog.
pub const DEFAULT_EXPONENTS: [&str; 4] = ["n", "poly(2)", "n*log(n+1)", "pow(log(n+1),2)"];

/// `Lambda_1` and `Lambda_inf` over the default exponents, gated on
/// nuclearity, followed by the interleave observation
/// `Lambda_1(n) / Lambda_inf(n)`. Returns the catalog and the labels of
/// entries dropped by the nuclearity gate.
pub fn default_catalog(cfg: &Config) -> Result<(Vec<SpaceDescriptor>, Vec<String>)> {
    let mut out = Vec::new();
    let mut dropped = Vec::new();
    let check_to = 2 * (cfg.resolution.n + 1);
    for (finite, name) in [(true, "Lambda_1"), (false, "Lambda_inf")] {
        for a in DEFAULT_EXPONENTS {
            let alpha = ExponentSequence::new(parse(a)?, check_to)?;
            let m = if finite {
                KotheMatrix::power_series_finite(alpha)
            } else {
                KotheMatrix::power_series_infinite(alpha)
            };
            let mut d = SpaceDescriptor::new(format!("{name}({a})"), m);
            label_hypotheses(&mut d, cfg)?;
            if d.hypotheses.nuclear == HypothesisStatus::Failed {
                dropped.push(d.label);
            } else {
                out.push(d);
            }
        }
    }
    let alpha = ExponentSequence::new(parse("n")?, check_to)?;
    let mix = KotheMatrix::interleave(
        KotheMatrix::power_series_finite(alpha.clone()),
        KotheMatrix::power_series_infinite(alpha),
    )
    .with_max_grade(cfg.resolution.kmax)?;
    out.push(SpaceDescriptor::new(
        "interleave(Lambda_1(n), Lambda_inf(n))",
        mix,
    ));
    Ok((out, dropped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Resolution;

    fn cfg() -> Config {
        Config::default().with_resolution(Resolution::new(512, 8))
    }

    #[test]
    fn theorem_ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(TheoremId::parse(t.as_str()), Some(t));
        }
        assert_eq!(TheoremId::parse_list("all").unwrap().len(), 11);
        assert!(TheoremId::parse_list("T9.9").is_err());
        assert_eq!(
            TheoremId::parse_list("T3.1,T4.8").unwrap(),
            vec![TheoremId::T31, TheoremId::T48]
        );
    }

    #[test]
    fn battery_has_twenty_distinct_probes() {
        let b = default_battery();
        assert_eq!(b.len(), 20);
        let mut labels: Vec<_> = b.iter().map(|x| x.label).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 20);
    }

    #[test]
    fn implication_with_undecided_antecedent_is_not_a_violation() {
        let c = cfg();
        let alpha = ExponentSequence::new(parse("n").unwrap(), 2048).unwrap();
        let m = KotheMatrix::power_series_finite(alpha);
        let facts = Facts {
            m: &m,
            cfg: &c,
            battery: &[],
            cache: RefCell::new(BTreeMap::new()),
        };
        facts.cache.borrow_mut().insert(
            Fact::FiniteZero,
            Verdict::undetermined(c.resolution, "forced"),
        );
        facts.cache.borrow_mut().insert(
            Fact::DeltaFinite,
            Verdict::fails(c.resolution, Witness::new()),
        );
        let (_, ag) = agreement(&TheoremId::P41.relation(), &facts);
        assert_eq!(ag, Agreement::Undecided);
    }

    #[test]
    fn malformed_space_file_is_rejected_with_grade() {
        let text = "type = \"table\"\ngrades = [\"n+2\", \"1\"]\n";
        let err = build_catalog(&[("bad".into(), text.into())], &cfg()).unwrap_err();
        assert!(
            matches!(err, KdiamError::InvalidMatrix { grade: 2, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn empty_battery_rejected_for_battery_campaigns() {
        let (cat, _) = default_catalog(&cfg()).unwrap();
        let mut c = Campaign::new(vec![TheoremId::P49], cat, cfg());
        c.battery.clear();
        assert!(run_campaign(&c).is_err());
    }
}
