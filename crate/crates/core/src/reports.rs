//! Serializable reports printed by the command line.
//!
//! Every report derives `Deserialize` so that printed records parse back to
//! equal values.

use rug::float::Round;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::arith::ball::float_to_string;
use crate::counting::CountReport;
use crate::lattice::{IntMatrix, IsogenyOutcome, IsogenyVerdict};
use crate::predim::{Certificate, Chain, Configuration, InequalityCheck, PredimReport, SemimodularityReport, StepTag};
use crate::records::{ComplexRecord, LatticeRecord, ValueRecord};

/// Upper bounds print with a few significant digits, rounded up.
pub fn bound_string(x: &Float) -> String {
    float_to_string(x, Some(6), Round::Up)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceRecord {
    pub tau: ValueRecord,
    pub unimodular: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmRecord {
    pub tau: ValueRecord,
    pub bound: u32,
    pub cm: bool,
    pub d: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsogenyRecord {
    /// `isogenous`, `not_isogenous` or `unknown_up_to_bound`.
    pub verdict: String,
    pub witness: Option<IntMatrix>,
    pub alpha: Option<ValueRecord>,
    pub reason: Option<String>,
    pub bound: u32,
    pub downgraded: bool,
    pub used_reflection: Option<bool>,
}

impl IsogenyRecord {
    pub fn from_verdict(v: &IsogenyVerdict, bound: u32, used_reflection: Option<bool>) -> Self {
        let mut r = IsogenyRecord {
            verdict: String::new(),
            witness: None,
            alpha: None,
            reason: None,
            bound,
            downgraded: v.downgraded,
            used_reflection,
        };
        match &v.outcome {
            IsogenyOutcome::Isogenous { witness, alpha } => {
                r.verdict = "isogenous".into();
                r.witness = Some(*witness);
                r.alpha = Some(ValueRecord::from_value(alpha));
            }
            IsogenyOutcome::NotIsogenous { reason } => {
                r.verdict = "not_isogenous".into();
                r.reason = Some(reason.clone());
            }
            IsogenyOutcome::UnknownUpToBound { .. } => r.verdict = "unknown_up_to_bound".into(),
        }
        r
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsRecord {
    pub lattice: LatticeRecord,
    pub precision: u32,
    pub g2: ComplexRecord,
    pub g3: ComplexRecord,
    pub discriminant: ComplexRecord,
    pub input_limited: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub lattice: LatticeRecord,
    pub argument: ComplexRecord,
    pub precision: u32,
    pub wp: ComplexRecord,
    pub wp_prime: ComplexRecord,
}

/// One certified defect bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub identity: String,
    pub lattice: ValueRecord,
    pub argument: Vec<ComplexRecord>,
    pub precision: u32,
    pub bound: String,
    /// Set when the defect could not be bounded at this argument.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub identity: String,
    pub lattice: LatticeRecord,
    pub precision: u32,
    pub seed: u64,
    pub samples: usize,
    /// Acceptance threshold as `2^-k`.
    pub threshold: String,
    pub passed: usize,
    pub failed: usize,
    pub max_bound: String,
    pub worst: ResidualRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredimRecord {
    pub set: Vec<String>,
    pub over: Vec<String>,
    pub slots: Vec<usize>,
    pub td: usize,
    pub grk_per_slot: Vec<usize>,
    pub grk_total: usize,
    pub delta: i64,
}

impl PredimRecord {
    pub fn new(cfg: &Configuration, set: u64, over: u64, slots: u64, r: &PredimReport) -> Self {
        PredimRecord {
            set: cfg.names(set),
            over: cfg.names(over),
            slots: slot_list(slots),
            td: r.td,
            grk_per_slot: r.grk_per_slot.clone(),
            grk_total: r.grk_total,
            delta: r.delta,
        }
    }
}

pub fn slot_list(slots: u64) -> Vec<usize> {
    (0..64).filter(|i| slots >> i & 1 == 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongRecord {
    pub set: Vec<String>,
    pub slots: Vec<usize>,
    pub strong: bool,
    pub violation: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullRecord {
    pub set: Vec<String>,
    pub slots: Vec<usize>,
    pub hull: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRecord {
    pub set: Vec<String>,
    pub base: Vec<String>,
    pub slots: Vec<usize>,
    pub dim: i64,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub subset: Vec<String>,
    pub tag: String,
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub from: Vec<String>,
    pub to: Vec<String>,
    pub slots: Vec<usize>,
    pub steps: Vec<StepRecord>,
    pub total_delta: i64,
    pub delta_to: i64,
}

impl ChainRecord {
    pub fn new(cfg: &Configuration, chain: &Chain, to: u64, slots: u64) -> Self {
        ChainRecord {
            from: cfg.names(chain.start),
            to: cfg.names(to),
            slots: slot_list(slots),
            steps: chain
                .steps
                .iter()
                .map(|s| StepRecord {
                    subset: cfg.names(s.subset),
                    tag: match s.tag {
                        StepTag::DeltaZero => "delta_zero",
                        StepTag::GenericSingleton => "generic_singleton",
                    }
                    .into(),
                    delta: s.delta,
                })
                .collect(),
            total_delta: chain.total_delta(),
            delta_to: cfg.delta_value(slots, to, chain.start),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

impl From<&InequalityCheck> for CheckRecord {
    fn from(c: &InequalityCheck) -> Self {
        CheckRecord { name: c.name.clone(), lhs: c.lhs, rhs: c.rhs, holds: c.holds }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaRecord {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
    pub slots: Vec<usize>,
    pub checks: Vec<CheckRecord>,
    pub all_hold: bool,
}

impl LemmaRecord {
    pub fn new(cfg: &Configuration, (a, b, c): (u64, u64, u64), slots: u64, r: &SemimodularityReport) -> Self {
        LemmaRecord {
            a: cfg.names(a),
            b: cfg.names(b),
            c: cfg.names(c),
            slots: slot_list(slots),
            checks: r.checks().into_iter().map(CheckRecord::from).collect(),
            all_hold: r.all_hold(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    /// `F₁ ∩ F₂, F₁, F₂, F₁ ∪ F₂` as slot indices.
    pub slot_sets: Vec<Vec<usize>>,
    pub d: [i64; 4],
    pub hypotheses: [i64; 2],
    pub b1: Vec<String>,
    pub b2: Vec<String>,
    pub meet: Vec<String>,
    pub join: Vec<String>,
    pub checks: Vec<CheckRecord>,
    pub conclusion: Option<i64>,
    pub certified: bool,
    pub explanation: String,
}

impl CertificateRecord {
    pub fn new(cfg: &Configuration, c: &Certificate) -> Self {
        CertificateRecord {
            slot_sets: c.slot_sets.iter().map(|s| slot_list(*s)).collect(),
            d: c.d,
            hypotheses: c.hypotheses,
            b1: cfg.names(c.b1),
            b2: cfg.names(c.b2),
            meet: cfg.names(c.a),
            join: cfg.names(c.b),
            checks: c.checks.iter().map(CheckRecord::from).collect(),
            conclusion: c.conclusion,
            certified: c.certified,
            explanation: c.explanation.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRecord {
    pub mode: String,
    pub generators: Vec<String>,
    pub relations: usize,
    pub forms: usize,
    pub der_dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendRecord {
    /// `unique`, `family` or `inconsistent`.
    pub result: String,
    pub dimension: Option<usize>,
    /// `(generator, value)` pairs of the returned derivation.
    pub assignment: Option<Vec<(String, String)>>,
    pub row: Option<usize>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HclRecord {
    pub generator: String,
    pub in_closure: bool,
    pub witness: Option<Vec<(String, String)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRowRecord {
    pub height: u64,
    pub confirmed: u64,
    pub undetermined: u64,
    pub excluded: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub c: f64,
    pub k: f64,
    pub residuals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub target: String,
    pub domain: String,
    pub precision: u32,
    pub eps: String,
    pub rows: Vec<CountRowRecord>,
    pub fit: Option<FitRecord>,
}

impl From<&CountReport> for CountRecord {
    fn from(r: &CountReport) -> Self {
        CountRecord {
            target: r.target.clone(),
            domain: r.domain.clone(),
            precision: r.precision,
            eps: bound_string(&r.eps),
            rows: r
                .rows
                .iter()
                .map(|x| CountRowRecord {
                    height: x.height,
                    confirmed: x.confirmed,
                    undetermined: x.undetermined,
                    excluded: x.excluded,
                })
                .collect(),
            fit: r.fit.as_ref().map(|f| FitRecord { c: f.c, k: f.k, residuals: f.residuals.clone() }),
        }
    }
}

impl CountRecord {
    /// Fixed-width table for the text format.
    pub fn table(&self) -> String {
        let mut out = format!(
            "target: {}\ndomain: {}\nprecision: {}\neps: {}\n{:>8} {:>10} {:>13} {:>10}\n",
            self.target, self.domain, self.precision, self.eps, "H", "confirmed", "undetermined", "excluded"
        );
        for r in &self.rows {
            out.push_str(&format!("{:>8} {:>10} {:>13} {:>10}\n", r.height, r.confirmed, r.undetermined, r.excluded));
        }
        match &self.fit {
            Some(f) => {
                let res: Vec<String> = f.residuals.iter().map(|r| format!("{r:.4}")).collect();
                out.push_str(&format!("fit: log N = log({:.6}) + {:.6} log log H\nresiduals: {}\n", f.c, f.k, res.join(" ")))
            }
            None => out.push_str("fit: fewer than three nonzero counts\n"),
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestRecord {
    pub precision: u32,
    pub seed: u64,
    pub checks: Vec<SelftestCheck>,
    pub passed: usize,
    pub failed: usize,
}
