//! Finite configurations of field generators with a transcendence-degree
//! matroid and graph points of exponential / ℘ slots.
//!
//! Subsets of coordinates are `u64` bitmasks. Everything that searches over
//! supersets is exhaustive and capped at [`DEFAULT_CAP`] coordinates.

pub mod lemma;

use std::collections::HashMap;
use std::sync::Mutex;

use rug::Rational;

use crate::arith::linalg;
use crate::arith::quad::{is_squarefree, QuadNumber};
use crate::error::{Error, Result};

pub use lemma::{
    check_semimodularity, independence_certificate, worked_example, Certificate, CertificateInput, InequalityCheck,
    SemimodularityReport,
};

/// Bitmask over coordinate indices.
pub type CoordSet = u64;
/// Bitmask over slot indices.
pub type SlotSet = u64;

pub const DEFAULT_CAP: usize = 20;
const MAX_COORDS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlotKind {
    Exp,
    WpCM(i64),
    WpGeneric(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSlot {
    pub index: usize,
    pub kind: SlotKind,
}

impl FunctionSlot {
    /// `d` of the multiplier field `ℚ(√d)`, or `None` for `ℚ`.
    pub fn multiplier_field(&self) -> Option<i64> {
        match self.kind {
            SlotKind::WpCM(d) => Some(d),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            SlotKind::Exp => "exp".into(),
            SlotKind::WpCM(d) => format!("wp_cm({d})"),
            SlotKind::WpGeneric(l) => format!("wp({l})"),
        }
    }
}

/// `(b, f(b))` on the graph of slot `slot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupPoint {
    pub slot: usize,
    pub b: usize,
    pub e: usize,
}

impl GroupPoint {
    pub fn mask(&self) -> CoordSet {
        (1 << self.b) | (1 << self.e)
    }
}

/// Linear dependencies among the points of one slot, one column per point of
/// that slot in configuration order.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotRelations {
    pub slot: usize,
    pub rows: Vec<Vec<QuadNumber>>,
}

#[derive(Debug)]
pub struct Configuration {
    pub coordinates: Vec<String>,
    /// Rows of the representing matrix; column `j` belongs to coordinate `j`.
    pub matroid: Vec<Vec<Rational>>,
    pub slots: Vec<FunctionSlot>,
    pub points: Vec<GroupPoint>,
    pub relations: Vec<SlotRelations>,
    pub base: CoordSet,
    td_cache: Mutex<HashMap<CoordSet, usize>>,
}

impl Clone for Configuration {
    fn clone(&self) -> Self {
        Configuration::new(
            self.coordinates.clone(),
            self.matroid.clone(),
            self.slots.clone(),
            self.points.clone(),
            self.relations.clone(),
            self.base,
        )
    }
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.coordinates == other.coordinates
            && self.matroid == other.matroid
            && self.slots == other.slots
            && self.points == other.points
            && self.relations == other.relations
            && self.base == other.base
    }
}

/// Outcome of [`validate`]: the first violated condition, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics {
    pub valid: bool,
    pub intersection_compatible: bool,
    pub issue: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredimReport {
    pub td: usize,
    pub grk_per_slot: Vec<usize>,
    pub grk_total: usize,
    pub delta: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepTag {
    DeltaZero,
    GenericSingleton,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    pub subset: CoordSet,
    pub tag: StepTag,
    pub delta: i64,
}

/// `A₀ ⊆ A₁ ⊆ … ⊆ A_r`, with `A₀ = start` and `A_j = steps[j-1].subset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub start: CoordSet,
    pub steps: Vec<ChainStep>,
}

impl Chain {
    pub fn end(&self) -> CoordSet {
        self.steps.last().map_or(self.start, |s| s.subset)
    }

    pub fn total_delta(&self) -> i64 {
        self.steps.iter().map(|s| s.delta).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimReport {
    pub dim: i64,
    pub witness: CoordSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strongness {
    pub strong: bool,
    pub violation: Option<CoordSet>,
}

pub fn popcount(s: CoordSet) -> u32 {
    s.count_ones()
}

pub fn is_subset(a: CoordSet, b: CoordSet) -> bool {
    a & !b == 0
}

/// Lexicographic order of the sorted index lists of two subsets.
pub fn lex_cmp(a: CoordSet, b: CoordSet) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if a == b {
        return Ordering::Equal;
    }
    let low = (a ^ b).trailing_zeros();
    if a >> low & 1 == 1 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Smallest cardinality first, then lexicographic.
pub fn shortlex_cmp(a: CoordSet, b: CoordSet) -> std::cmp::Ordering {
    popcount(a).cmp(&popcount(b)).then_with(|| lex_cmp(a, b))
}

/// All `S` with `lower ⊆ S ⊆ upper`, in shortlex order.
pub fn supersets(lower: CoordSet, upper: CoordSet) -> Vec<CoordSet> {
    let free = upper & !lower;
    let mut out = Vec::with_capacity(1 << popcount(free));
    let mut t: CoordSet = 0;
    loop {
        out.push(lower | t);
        if t == free {
            break;
        }
        t = (t.wrapping_sub(free)) & free;
    }
    out.sort_by(|a, b| shortlex_cmp(*a, *b));
    out
}

fn rank_rational(rows: &[Vec<Rational>], ncols: usize) -> usize {
    linalg::rank(rows, ncols).expect("exact elimination never stalls")
}

fn rank_quad(rows: &[Vec<QuadNumber>], ncols: usize) -> usize {
    linalg::rank(rows, ncols).expect("exact elimination never stalls")
}

impl Configuration {
    pub fn new(
        coordinates: Vec<String>,
        matroid: Vec<Vec<Rational>>,
        slots: Vec<FunctionSlot>,
        points: Vec<GroupPoint>,
        relations: Vec<SlotRelations>,
        base: CoordSet,
    ) -> Self {
        Configuration { coordinates, matroid, slots, points, relations, base, td_cache: Mutex::new(HashMap::new()) }
    }

    pub fn empty() -> Self {
        Configuration::new(Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), 0)
    }

    /// Identity-matrix matroid: every coordinate transcendental and independent.
    pub fn free_matroid(n: usize) -> Vec<Vec<Rational>> {
        (0..n).map(|i| (0..n).map(|j| Rational::from(i32::from(i == j))).collect()).collect()
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    pub fn all(&self) -> CoordSet {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    pub fn all_slots(&self) -> SlotSet {
        (1u64 << self.slots.len()) - 1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coordinates.iter().position(|c| c == name)
    }

    /// Parses a comma-separated list of coordinate names.
    pub fn subset(&self, names: &str) -> Result<CoordSet> {
        let mut s = 0;
        for name in names.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            let i = self.index_of(name).ok_or_else(|| Error::InvalidInput(format!("unknown coordinate {name:?}")))?;
            s |= 1 << i;
        }
        Ok(s)
    }

    pub fn names(&self, s: CoordSet) -> Vec<String> {
        (0..self.len()).filter(|i| s >> i & 1 == 1).map(|i| self.coordinates[i].clone()).collect()
    }

    pub fn render(&self, s: CoordSet) -> String {
        format!("{{{}}}", self.names(s).join(","))
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.len() > cap {
            return Err(Error::GroundSetTooLarge { size: self.len(), cap });
        }
        Ok(())
    }

    /// Matroid rank of a coordinate subset.
    pub fn rank(&self, s: CoordSet) -> usize {
        if s == 0 {
            return 0;
        }
        if let Some(&r) = self.td_cache.lock().expect("cache lock").get(&s) {
            return r;
        }
        let cols: Vec<Vec<Rational>> = (0..self.len())
            .filter(|j| s >> j & 1 == 1)
            .map(|j| self.matroid.iter().map(|row| row[j].clone()).collect())
            .collect();
        let r = rank_rational(&cols, self.matroid.len());
        self.td_cache.lock().expect("cache lock").insert(s, r);
        r
    }

    /// `td(B/A) = rank(A ∪ B) − rank(A)`.
    pub fn td(&self, b: CoordSet, a: CoordSet) -> usize {
        self.rank(a | b) - self.rank(a)
    }

    fn slot_point_indices(&self, slot: usize) -> Vec<usize> {
        (0..self.points.len()).filter(|&p| self.points[p].slot == slot).collect()
    }

    fn slot_relations(&self, slot: usize) -> Vec<Vec<QuadNumber>> {
        self.relations.iter().filter(|r| r.slot == slot).flat_map(|r| r.rows.iter().cloned()).collect()
    }

    /// Points of `slot` (as positions among that slot's points) lying in `s`.
    fn contained(&self, slot_points: &[usize], s: CoordSet) -> u64 {
        (0..slot_points.len()).filter(|&k| is_subset(self.points[slot_points[k]].mask(), s)).fold(0, |m, k| m | 1 << k)
    }

    /// `dim Γ(S)` for one slot: the span of the contained points modulo relations.
    fn gamma_dim(&self, rel: &[Vec<QuadNumber>], slot_points: &[usize], s: CoordSet) -> usize {
        span_dim(rel, slot_points.len(), self.contained(slot_points, s))
    }

    /// `grk_i(B/A) = dim(Γ(A ∪ B)) − dim(Γ(A))`.
    pub fn grk(&self, slot: usize, b: CoordSet, a: CoordSet) -> usize {
        let pts = self.slot_point_indices(slot);
        let rel = self.slot_relations(slot);
        self.gamma_dim(&rel, &pts, a | b) - self.gamma_dim(&rel, &pts, a)
    }

    /// `δ(B/A)` over the slots in `slots`.
    pub fn delta(&self, slots: SlotSet, b: CoordSet, a: CoordSet) -> PredimReport {
        let td = self.td(b, a);
        let grk_per_slot: Vec<usize> =
            (0..self.slots.len()).map(|i| if slots >> i & 1 == 1 { self.grk(i, b, a) } else { 0 }).collect();
        let grk_total = grk_per_slot.iter().sum::<usize>();
        PredimReport { td, grk_per_slot, grk_total, delta: td as i64 - grk_total as i64 }
    }

    pub fn delta_value(&self, slots: SlotSet, b: CoordSet, a: CoordSet) -> i64 {
        let td = self.td(b, a) as i64;
        let grk: usize = (0..self.slots.len()).filter(|i| slots >> i & 1 == 1).map(|i| self.grk(i, b, a)).sum();
        td - grk as i64
    }
}

/// Checks the configuration invariants and intersection-compatibility.
pub fn validate(cfg: &Configuration) -> Diagnostics {
    let fail = |msg: String| Diagnostics { valid: false, intersection_compatible: false, issue: Some(msg) };
    let n = cfg.len();
    if n > MAX_COORDS {
        return fail(format!("{n} coordinates exceed the representable {MAX_COORDS}"));
    }
    for (i, name) in cfg.coordinates.iter().enumerate() {
        if name.is_empty() || cfg.coordinates[..i].contains(name) {
            return fail(format!("coordinate label {name:?} is empty or repeated"));
        }
    }
    for (r, row) in cfg.matroid.iter().enumerate() {
        if row.len() != n {
            return fail(format!("matroid row {r} has {} entries, expected {n}", row.len()));
        }
    }
    let mut labels = Vec::new();
    for (i, slot) in cfg.slots.iter().enumerate() {
        if slot.index != i {
            return fail(format!("slot {i} carries index {}", slot.index));
        }
        if let SlotKind::WpCM(d) = slot.kind {
            if d >= 0 || !is_squarefree(d) {
                return fail(format!("slot {i}: CM discriminant {d} is not a negative squarefree integer"));
            }
        }
        let label = slot.label();
        if labels.contains(&label) {
            return fail(format!("slot label {label} is repeated"));
        }
        labels.push(label);
    }
    for (k, p) in cfg.points.iter().enumerate() {
        if p.slot >= cfg.slots.len() {
            return fail(format!("point {k} refers to missing slot {}", p.slot));
        }
        if p.b >= n || p.e >= n {
            return fail(format!("point {k} refers to a missing coordinate"));
        }
        if p.b == p.e {
            return fail(format!("point {k} has b = e"));
        }
    }
    if cfg.base & !cfg.all() != 0 {
        return fail("base refers to a missing coordinate".into());
    }
    for rel in &cfg.relations {
        if rel.slot >= cfg.slots.len() {
            return fail(format!("relations refer to missing slot {}", rel.slot));
        }
        let field = cfg.slots[rel.slot].multiplier_field();
        let width = cfg.slot_point_indices(rel.slot).len();
        for (r, row) in rel.rows.iter().enumerate() {
            if row.len() != width {
                return fail(format!("slot {} relation row {r} has {} entries, expected {width}", rel.slot, row.len()));
            }
            if row.iter().filter(|x| !x.is_zero()).count() < 2 {
                return fail(format!("slot {} relation row {r} has fewer than two nonzero entries", rel.slot));
            }
            for x in row {
                let ok = match field {
                    None => x.is_rational(),
                    Some(d) => x.is_rational() || x.d == d,
                };
                if !ok {
                    return fail(format!("slot {} relation row {r}: entry {x} is outside the multiplier field", rel.slot));
                }
            }
        }
    }
    for slot in 0..cfg.slots.len() {
        let rel = cfg.slot_relations(slot);
        if !rel.is_empty() && rank_quad(&rel, rel[0].len()) != rel.len() {
            return fail(format!("slot {slot} relations are not of full row rank"));
        }
    }
    match intersection_violation(cfg) {
        None => Diagnostics { valid: true, intersection_compatible: true, issue: None },
        Some(msg) => Diagnostics { valid: true, intersection_compatible: false, issue: Some(msg) },
    }
}

/// First pair of point sets `P, Q` of a slot (each of the form `Γ(S)`) with
/// `span P ∩ span Q ≠ span(P ∩ Q)` in the quotient by the relations.
fn intersection_violation(cfg: &Configuration) -> Option<String> {
    for slot in 0..cfg.slots.len() {
        let rel = cfg.slot_relations(slot);
        if rel.is_empty() {
            continue;
        }
        let pts = cfg.slot_point_indices(slot);
        // point sets realizable as Γ(S): closed under "both coordinates covered"
        let cover = |mask: u64| (0..pts.len()).filter(|k| mask >> k & 1 == 1).fold(0, |s, k| s | cfg.points[pts[k]].mask());
        let closed: Vec<u64> = (0u64..(1 << pts.len())).filter(|&m| cfg.contained(&pts, cover(m)) == m).collect();
        let dims: Vec<usize> = closed.iter().map(|&m| span_dim(&rel, pts.len(), m)).collect();
        for x in 0..closed.len() {
            for y in x + 1..closed.len() {
                let (p, q) = (closed[x], closed[y]);
                let union = span_dim(&rel, pts.len(), p | q);
                let meet = span_dim(&rel, pts.len(), p & q);
                if dims[x] + dims[y] != union + meet {
                    return Some(format!(
                        "slot {slot}: spans of the points in {} and in {} meet in more than the span of their common points",
                        cfg.render(cover(p)),
                        cfg.render(cover(q))
                    ));
                }
            }
        }
    }
    None
}

/// Dimension of the span of a set of slot points in the quotient by `rel`.
///
/// With `J` the chosen points, `rank([R; E_J]) = |J| + rank(R restricted to
/// the columns outside J)`, and `R` has full row rank.
fn span_dim(rel: &[Vec<QuadNumber>], npoints: usize, mask: u64) -> usize {
    let chosen = popcount(mask) as usize;
    if rel.is_empty() {
        return chosen;
    }
    let outside: Vec<usize> = (0..npoints).filter(|k| mask >> k & 1 == 0).collect();
    let restricted: Vec<Vec<QuadNumber>> = rel.iter().map(|row| outside.iter().map(|&k| row[k].clone()).collect()).collect();
    chosen + rank_quad(&restricted, outside.len()) - rel.len()
}

pub fn is_intersection_compatible(cfg: &Configuration) -> bool {
    intersection_violation(cfg).is_none()
}

/// `A` strong inside `ground`: `δ(S/A) ≥ 0` for all `A ⊆ S ⊆ ground`.
pub fn is_strong_in(cfg: &Configuration, a: CoordSet, ground: CoordSet, slots: SlotSet) -> Result<Strongness> {
    cfg.check_cap(DEFAULT_CAP)?;
    let a = a & ground;
    for s in supersets(a, ground) {
        if cfg.delta_value(slots, s, a) < 0 {
            return Ok(Strongness { strong: false, violation: Some(s) });
        }
    }
    Ok(Strongness { strong: true, violation: None })
}

/// Strongness in the whole configuration, with the minimal violating superset.
pub fn is_strong(cfg: &Configuration, a: CoordSet, slots: SlotSet) -> Result<Strongness> {
    is_strong_in(cfg, a, cfg.all(), slots)
}

/// Smallest strong superset, by repeatedly adjoining the minimal violation.
pub fn strong_hull(cfg: &Configuration, a: CoordSet, slots: SlotSet) -> Result<CoordSet> {
    let mut s = a;
    loop {
        match is_strong(cfg, s, slots)?.violation {
            None => return Ok(s),
            Some(w) => s = w,
        }
    }
}

/// `dim(A/C) = min δ(S/C)` over `S ⊇ A ∪ C`, with the shortlex-first minimizer.
pub fn predim_dim(cfg: &Configuration, a: CoordSet, c: CoordSet, slots: SlotSet) -> Result<DimReport> {
    cfg.check_cap(DEFAULT_CAP)?;
    if let Some(v) = is_strong(cfg, c, slots)?.violation {
        return Err(Error::BaseNotStrong(format!("{} is not strong (witness {})", cfg.render(c), cfg.render(v))));
    }
    Ok(dim_unchecked(cfg, a | c, c, slots))
}

pub(crate) fn dim_unchecked(cfg: &Configuration, a: CoordSet, c: CoordSet, slots: SlotSet) -> DimReport {
    let mut best: Option<DimReport> = None;
    for s in supersets(a | c, cfg.all()) {
        let d = cfg.delta_value(slots, s, c);
        if best.as_ref().is_none_or(|b| d < b.dim) {
            best = Some(DimReport { dim: d, witness: s });
        }
    }
    best.expect("at least one superset")
}

/// Greedy chain from `A` to `B`: minimal `δ = 0` extensions when available,
/// otherwise the first coordinate transcendental over the current subset.
pub fn chain_decompose(cfg: &Configuration, a: CoordSet, b: CoordSet, slots: SlotSet) -> Result<Chain> {
    cfg.check_cap(DEFAULT_CAP)?;
    let b = a | b;
    if let Some(v) = is_strong_in(cfg, a, b, slots)?.violation {
        return Err(Error::NotStrong(format!("{} is not strong in {} (witness {})", cfg.render(a), cfg.render(b), cfg.render(v))));
    }
    let mut current = a;
    let mut steps = Vec::new();
    while current != b {
        let zero = supersets(current, b).into_iter().find(|&s| s != current && cfg.delta_value(slots, s, current) == 0);
        let step = match zero {
            Some(s) => ChainStep { subset: s, tag: StepTag::DeltaZero, delta: 0 },
            None => {
                let single = (0..cfg.len())
                    .filter(|&i| b >> i & 1 == 1 && current >> i & 1 == 0)
                    .map(|i| current | 1 << i)
                    .find(|&s| cfg.td(s, current) == 1 && cfg.delta_value(slots, s, current) == 1)
                    .ok_or_else(|| Error::NotStrong(format!("no admissible step above {}", cfg.render(current))))?;
                ChainStep { subset: single, tag: StepTag::GenericSingleton, delta: 1 }
            }
        };
        current = step.subset;
        steps.push(step);
    }
    Ok(Chain { start: a, steps })
}
