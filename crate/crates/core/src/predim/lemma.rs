//! Semimodularity checks and the replay of the independence argument on a
//! concrete configuration.

use super::{dim_unchecked, is_intersection_compatible, is_strong, CoordSet, Configuration, SlotSet, DEFAULT_CAP};
use crate::error::{Error, Result};

/// One inequality `lhs ≤ rhs`, evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

impl InequalityCheck {
    fn le(name: &str, lhs: i64, rhs: i64) -> Self {
        InequalityCheck { name: name.into(), lhs, rhs, holds: lhs <= rhs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemimodularityReport {
    /// `grk(A/C) + grk(B/C) ≤ grk(AB/C) + grk(A∩B/C)`.
    pub grk_upper: InequalityCheck,
    /// `td(AB/C) + td(A∩B/C) ≤ td(A/C) + td(B/C)`.
    pub td_lower: InequalityCheck,
    /// `δ(AB/C) + δ(A∩B/C) ≤ δ(A/C) + δ(B/C)`.
    pub delta_sub: InequalityCheck,
    /// `grk_{F′}(X/C) ≤ grk_F(Y/C)` for `X ⊆ Y` among `A∩B, A, B, AB` and `F′ ⊆ F`;
    /// the first failure if any.
    pub monotone: InequalityCheck,
}

impl SemimodularityReport {
    pub fn all_hold(&self) -> bool {
        self.grk_upper.holds && self.td_lower.holds && self.delta_sub.holds && self.monotone.holds
    }

    pub fn checks(&self) -> [&InequalityCheck; 4] {
        [&self.grk_upper, &self.td_lower, &self.delta_sub, &self.monotone]
    }
}

fn grk_total(cfg: &Configuration, slots: SlotSet, b: CoordSet, a: CoordSet) -> i64 {
    (0..cfg.slots.len()).filter(|i| slots >> i & 1 == 1).map(|i| cfg.grk(i, b, a) as i64).sum()
}

/// The four statements of the semimodularity lemma for `(A, B, C)` and the
/// slots `slots`. `A` and `B` are taken to contain `C`.
pub fn check_semimodularity(
    cfg: &Configuration,
    a: CoordSet,
    b: CoordSet,
    c: CoordSet,
    slots: SlotSet,
) -> Result<SemimodularityReport> {
    if !is_intersection_compatible(cfg) {
        return Err(Error::IncompatibleConfiguration(
            "group-point spans do not meet in the span of common points".into(),
        ));
    }
    let (a, b) = (a | c, b | c);
    let (join, meet) = (a | b, a & b);
    let grk = |s: CoordSet, f: SlotSet| grk_total(cfg, f, s, c);
    let td = |s: CoordSet| cfg.td(s, c) as i64;
    let delta = |s: CoordSet| cfg.delta_value(slots, s, c);

    let grk_upper = InequalityCheck::le("grk upper semimodular", grk(a, slots) + grk(b, slots), grk(join, slots) + grk(meet, slots));
    let td_lower = InequalityCheck::le("td submodular", td(join) + td(meet), td(a) + td(b));
    let delta_sub = InequalityCheck::le("delta submodular", delta(join) + delta(meet), delta(a) + delta(b));

    let sets = [meet, a, b, join];
    let mut monotone = InequalityCheck::le("grk monotone", 0, 0);
    'outer: for sub in slot_subsets(slots) {
        for &x in &sets {
            for &y in &sets {
                if x & !y != 0 {
                    continue;
                }
                let check = InequalityCheck::le("grk monotone", grk(x, sub), grk(y, slots));
                if !check.holds {
                    monotone = check;
                    break 'outer;
                }
            }
        }
    }
    Ok(SemimodularityReport { grk_upper, td_lower, delta_sub, monotone })
}

fn slot_subsets(slots: SlotSet) -> Vec<SlotSet> {
    let mut out = Vec::new();
    let mut t: SlotSet = 0;
    loop {
        out.push(t);
        if t == slots {
            break;
        }
        t = t.wrapping_sub(slots) & slots;
    }
    out
}

/// Replay of the inequality chain behind the independence argument.
///
/// `d[i] = dim_{F_i}(a/C)` for `F₀ = F₁ ∩ F₂`, `F₁`, `F₂`, `F₃ = F₁ ∪ F₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub slot_sets: [SlotSet; 4],
    pub d: [i64; 4],
    /// `dim_{F_i}(fa/C ∪ a)` for `i = 1, 2`.
    pub hypotheses: [i64; 2],
    pub b1: CoordSet,
    pub b2: CoordSet,
    /// `B₁ ∩ B₂`.
    pub a: CoordSet,
    /// `B₁ ∪ B₂`.
    pub b: CoordSet,
    pub checks: Vec<InequalityCheck>,
    /// `dim_{F₀}(fa/C ∪ a)`, when the hypotheses hold.
    pub conclusion: Option<i64>,
    pub certified: bool,
    pub explanation: String,
}

/// Computes the four dimensions, the fields `B₁, B₂` realizing them, and
/// checks each inequality of the chain on the concrete configuration.
///
/// The certificate is withheld (with `certified = false`) when `fa` is not
/// closed over `C ∪ a` for both `F₁` and `F₂`, or when a step fails.
pub fn independence_certificate(
    cfg: &Configuration,
    f1: SlotSet,
    f2: SlotSet,
    a: CoordSet,
    fa: CoordSet,
    c: CoordSet,
) -> Result<Certificate> {
    if cfg.len() > DEFAULT_CAP {
        return Err(Error::GroundSetTooLarge { size: cfg.len(), cap: DEFAULT_CAP });
    }
    let f = [f1 & f2, f1, f2, f1 | f2];
    if let Some(v) = is_strong(cfg, c, f[3])?.violation {
        return Err(Error::BaseNotStrong(format!("{} is not strong (witness {})", cfg.render(c), cfg.render(v))));
    }
    let a = a | c;
    let afa = a | fa;
    let d: [i64; 4] = std::array::from_fn(|i| dim_unchecked(cfg, a, c, f[i]).dim);
    // dimension is additive: dim(fa/Ca) = dim(a fa/C) − dim(a/C)
    let joint: [super::DimReport; 4] = std::array::from_fn(|i| dim_unchecked(cfg, afa, c, f[i]));
    let hypotheses = [joint[1].dim - d[1], joint[2].dim - d[2]];
    let (b1, b2) = (joint[1].witness, joint[2].witness);
    let (meet, join) = (b1 & b2, b1 | b2);

    let mut cert = Certificate {
        slot_sets: f,
        d,
        hypotheses,
        b1,
        b2,
        a: meet,
        b: join,
        checks: Vec::new(),
        conclusion: None,
        certified: false,
        explanation: String::new(),
    };
    if hypotheses != [0, 0] {
        cert.explanation = format!(
            "fa is not closed over C and a: dim_F1 = {}, dim_F2 = {}",
            hypotheses[0], hypotheses[1]
        );
        return Ok(cert);
    }

    let grk = |s: CoordSet, slots: SlotSet| grk_total(cfg, slots, s, c);
    let td = |s: CoordSet| cfg.td(s, c) as i64;
    let delta = |s: CoordSet, slots: SlotSet| cfg.delta_value(slots, s, c);
    let (f0, f4, f5) = (f[0], f[1] & !f[0], f[2] & !f[0]);
    let checks = vec![
        InequalityCheck::le(
            "grk_3(B) >= grk_4(B1) + grk_5(B2) + grk_0(B)",
            grk(b1, f4) + grk(b2, f5) + grk(join, f0),
            grk(join, f[3]),
        ),
        InequalityCheck::le(
            "grk_0(B) >= grk_0(B1) + grk_0(B2) - grk_0(A)",
            grk(b1, f0) + grk(b2, f0) - grk(meet, f0),
            grk(join, f0),
        ),
        InequalityCheck::le("td(B) <= td(B1) + td(B2) - td(A)", td(join), td(b1) + td(b2) - td(meet)),
        InequalityCheck::le("d3 <= delta_3(B)", d[3], delta(join, f[3])),
        InequalityCheck::le(
            "delta_3(B) <= delta_1(B1) + delta_2(B2) - delta_0(A)",
            delta(join, f[3]),
            delta(b1, f[1]) + delta(b2, f[2]) - delta(meet, f0),
        ),
        InequalityCheck::le("delta_0(A) <= d1 + d2 - d3", delta(meet, f0), d[1] + d[2] - d[3]),
        InequalityCheck::le("d3 <= d1", d[3], d[1]),
        InequalityCheck::le("d3 <= d2", d[3], d[2]),
        InequalityCheck::le("delta_0(A) <= d3", delta(meet, f0), d[3]),
        InequalityCheck::le("dim_0(a fa) <= d3", joint[0].dim, d[3]),
        InequalityCheck::le("d3 <= d0", d[3], d[0]),
    ];
    cert.conclusion = Some(joint[0].dim - d[0]);
    cert.certified = checks.iter().all(|ch| ch.holds) && cert.conclusion == Some(0);
    cert.explanation = match checks.iter().find(|ch| !ch.holds) {
        Some(ch) => format!(
            "step failed: {} ({} > {}) with B1 = {}, B2 = {}",
            ch.name,
            ch.lhs,
            ch.rhs,
            cfg.render(b1),
            cfg.render(b2)
        ),
        None => "fa lies in the F0-closure of C and a".into(),
    };
    cert.checks = checks;
    Ok(cert)
}

/// Inputs of a certificate run.
#[derive(Clone, Debug)]
pub struct CertificateInput {
    pub cfg: Configuration,
    pub f1: SlotSet,
    pub f2: SlotSet,
    pub a: CoordSet,
    pub fa: CoordSet,
    pub c: CoordSet,
}

/// Coordinates `a, fa, u, eu, v, pv` with an exp point `(u, eu)` and a ℘
/// point `(v, pv)`; `eu` is algebraic over `a, u`, `pv` over `a, v`, and `fa`
/// over `a`. `F₁ = {exp}`, `F₂ = {℘}`, `C = ∅`; all four dimensions are 1.
pub fn worked_example() -> CertificateInput {
    use super::{FunctionSlot, GroupPoint, SlotKind};
    use rug::Rational;
    let col = |v: [i32; 3]| v.map(Rational::from);
    let cols = [col([1, 0, 0]), col([2, 0, 0]), col([0, 1, 0]), col([1, 1, 0]), col([0, 0, 1]), col([1, 0, 1])];
    let matroid = (0..3).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let cfg = Configuration::new(
        ["a", "fa", "u", "eu", "v", "pv"].map(String::from).to_vec(),
        matroid,
        vec![
            FunctionSlot { index: 0, kind: SlotKind::Exp },
            FunctionSlot { index: 1, kind: SlotKind::WpGeneric("E".into()) },
        ],
        vec![GroupPoint { slot: 0, b: 2, e: 3 }, GroupPoint { slot: 1, b: 4, e: 5 }],
        vec![],
        0,
    );
    CertificateInput { cfg, f1: 0b01, f2: 0b10, a: 0b000001, fa: 0b000010, c: 0 }
}
