//! Independent oracles and random generators shared by the integration tests.
//!
//! Nothing here calls into the library's elimination or predimension code:
//! ranks are recomputed with a separate Gaussian elimination over `ℚ(√d)`,
//! and dimensions by enumerating every subset.

#![allow(dead_code)]

mod pairs;

#[allow(unused_imports)]
pub use pairs::*;

use isr_workbench::arith::ball::{Ball, ComplexBall};
use isr_workbench::arith::QuadNumber;
use isr_workbench::lattice::{make_lattice, ExactComplex, Lattice};
use isr_workbench::predim::{validate, Configuration, FunctionSlot, GroupPoint, SlotKind, SlotRelations};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};

/// `a + b√d` with `d` held by the caller.
#[derive(Clone, Debug, PartialEq)]
struct Q2 {
    a: Rational,
    b: Rational,
}

impl Q2 {
    fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    fn sub(&self, o: &Q2) -> Q2 {
        Q2 { a: Rational::from(&self.a - &o.a), b: Rational::from(&self.b - &o.b) }
    }

    fn mul(&self, o: &Q2, d: i64) -> Q2 {
        let a = Rational::from(&self.a * &o.a) + Rational::from(&self.b * &o.b) * d;
        let b = Rational::from(&self.a * &o.b) + Rational::from(&self.b * &o.a);
        Q2 { a, b }
    }

    fn inv(&self, d: i64) -> Q2 {
        let n = Rational::from(&self.a * &self.a) - Rational::from(&self.b * &self.b) * d;
        Q2 { a: Rational::from(&self.a / &n), b: -Rational::from(&self.b / &n) }
    }
}

fn rank_q2(mut m: Vec<Vec<Q2>>, d: i64) -> usize {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = m[rank][col].inv(d);
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].mul(&inv, d);
                for c in col..ncols {
                    let t = f.mul(&m[rank][c], d);
                    m[r][c] = m[r][c].sub(&t);
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank_rational(rows: &[Vec<Rational>]) -> usize {
    let m = rows.iter().map(|r| r.iter().map(|x| Q2 { a: x.clone(), b: Rational::new() }).collect()).collect();
    rank_q2(m, -1)
}

pub fn rank_quad(rows: &[Vec<QuadNumber>], d: i64) -> usize {
    let m = rows.iter().map(|r| r.iter().map(|x| Q2 { a: x.a.clone(), b: x.b.clone() }).collect()).collect();
    rank_q2(m, d)
}

fn members(s: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| s >> i & 1 == 1).collect()
}

/// Rank of the matroid columns indexed by `s`.
pub fn oracle_rank(cfg: &Configuration, s: u64) -> usize {
    let cols: Vec<Vec<Rational>> =
        members(s, cfg.len()).into_iter().map(|j| cfg.matroid.iter().map(|row| row[j].clone()).collect()).collect();
    if cols.is_empty() {
        0
    } else {
        rank_rational(&cols)
    }
}

pub fn oracle_td(cfg: &Configuration, b: u64, a: u64) -> i64 {
    oracle_rank(cfg, a | b) as i64 - oracle_rank(cfg, a) as i64
}

/// `dim span{e_k : point k of the slot inside s}` modulo the slot's relations.
fn gamma_dim(cfg: &Configuration, slot: usize, s: u64) -> usize {
    let idx: Vec<usize> = (0..cfg.points.len()).filter(|&k| cfg.points[k].slot == slot).collect();
    let rel: Vec<Vec<QuadNumber>> =
        cfg.relations.iter().filter(|r| r.slot == slot).flat_map(|r| r.rows.iter().cloned()).collect();
    let d = match cfg.slots[slot].kind {
        SlotKind::WpCM(d) => d,
        _ => -1,
    };
    let mut rows = rel.clone();
    for (col, &k) in idx.iter().enumerate() {
        if cfg.points[k].mask() & !s == 0 {
            let mut e = vec![QuadNumber::zero(); idx.len()];
            e[col] = QuadNumber::one();
            rows.push(e);
        }
    }
    if idx.is_empty() {
        return 0;
    }
    rank_quad(&rows, d) - if rel.is_empty() { 0 } else { rank_quad(&rel, d) }
}

pub fn oracle_grk(cfg: &Configuration, slot: usize, b: u64, a: u64) -> i64 {
    gamma_dim(cfg, slot, a | b) as i64 - gamma_dim(cfg, slot, a) as i64
}

pub fn oracle_delta(cfg: &Configuration, slots: u64, b: u64, a: u64) -> i64 {
    let grk: i64 = (0..cfg.slots.len()).filter(|i| slots >> i & 1 == 1).map(|i| oracle_grk(cfg, i, b, a)).sum();
    oracle_td(cfg, b, a) - grk
}

fn full(cfg: &Configuration) -> u64 {
    (1u64 << cfg.len()) - 1
}

/// Minimum of `δ(S/C)` over `S ⊇ A ∪ C`, by scanning every subset.
pub fn oracle_dim(cfg: &Configuration, a: u64, c: u64, slots: u64) -> (i64, u64) {
    let lower = a | c;
    let mut best: Option<(i64, u64)> = None;
    for s in 0..=full(cfg) {
        if s & lower != lower {
            continue;
        }
        let d = oracle_delta(cfg, slots, s, c);
        let better = match best {
            None => true,
            Some((bd, bs)) => d < bd || (d == bd && shortlex_less(s, bs, cfg.len())),
        };
        if better {
            best = Some((d, s));
        }
    }
    best.unwrap()
}

pub fn shortlex_less(x: u64, y: u64, n: usize) -> bool {
    let (mx, my) = (members(x, n), members(y, n));
    (mx.len(), mx) < (my.len(), my)
}

/// `δ(S/A) ≥ 0` for every `A ⊆ S ⊆ ground`.
pub fn oracle_strong_in(cfg: &Configuration, a: u64, ground: u64, slots: u64) -> bool {
    (0..=ground).filter(|s| s & !ground == 0 && s & a == a & ground).all(|s| oracle_delta(cfg, slots, s, a & ground) >= 0)
}

pub fn oracle_strong(cfg: &Configuration, a: u64, slots: u64) -> bool {
    oracle_strong_in(cfg, a, full(cfg), slots)
}

pub fn standard_slots() -> Vec<FunctionSlot> {
    vec![
        FunctionSlot { index: 0, kind: SlotKind::Exp },
        FunctionSlot { index: 1, kind: SlotKind::WpGeneric("E".into()) },
        FunctionSlot { index: 2, kind: SlotKind::WpCM(-1) },
    ]
}

fn small_rational(rng: &mut ChaCha8Rng, range: i32) -> Rational {
    Rational::from(rng.gen_range(-range..=range))
}

fn random_matroid(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Rational>> {
    let rank = rng.gen_range(1..=n);
    (0..rank).map(|_| (0..n).map(|_| small_rational(rng, 2)).collect()).collect()
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<GroupPoint> {
    (0..count)
        .map(|_| {
            let b = rng.gen_range(0..n);
            let e = (b + rng.gen_range(1..n)) % n;
            GroupPoint { slot: rng.gen_range(0..3), b, e }
        })
        .collect()
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// Relation-free configuration over `n ≥ 2` coordinates with random
/// matroid and up to `n` points that may share coordinates.
pub fn random_relation_free(rng: &mut ChaCha8Rng, n: usize) -> Configuration {
    let count = rng.gen_range(0..=n);
    let points = random_points(rng, n, count);
    Configuration::new(names(n), random_matroid(rng, n), standard_slots(), points, vec![], 0)
}

/// A random entry of a relation row for `slot` (Gaussian integers on the CM slot).
fn relation_entry(rng: &mut ChaCha8Rng, slot: usize) -> QuadNumber {
    let a = small_rational(rng, 2);
    let b = if slot == 2 { small_rational(rng, 1) } else { Rational::new() };
    QuadNumber::new(a, b, -1).unwrap()
}

/// Configuration with at least one relation that passes validation and the
/// intersection-compatibility check.
///
/// Points come in triangles `(x, y), (x, z), (y, z)` on one slot so that the
/// spans of different point sets meet in shared points; a relation ties the
/// three points of a triangle together.
pub fn random_with_relations(rng: &mut ChaCha8Rng, n: usize) -> Configuration {
    loop {
        let mut points = Vec::new();
        let mut rows_by_slot: Vec<Vec<Vec<QuadNumber>>> = vec![Vec::new(); 3];
        let triangles = rng.gen_range(1..=(n / 3).max(1));
        let mut pool: Vec<usize> = (0..n).collect();
        for _ in 0..triangles {
            if pool.len() < 3 {
                break;
            }
            let t: Vec<usize> = (0..3).map(|_| pool.swap_remove(rng.gen_range(0..pool.len()))).collect();
            let slot = rng.gen_range(0..3);
            let start = points.iter().filter(|p: &&GroupPoint| p.slot == slot).count();
            for (b, e) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                points.push(GroupPoint { slot, b, e });
            }
            let mut row: Vec<QuadNumber> = (0..3).map(|_| relation_entry(rng, slot)).collect();
            while row.iter().filter(|x| !x.is_zero()).count() < 2 {
                row = (0..3).map(|_| relation_entry(rng, slot)).collect();
            }
            rows_by_slot[slot].push(pad(start, row));
        }
        // extra free points on leftover coordinates
        while pool.len() >= 2 && rng.gen_bool(0.5) {
            let b = pool.swap_remove(rng.gen_range(0..pool.len()));
            let e = pool.swap_remove(rng.gen_range(0..pool.len()));
            points.push(GroupPoint { slot: rng.gen_range(0..3), b, e });
        }
        let relations: Vec<SlotRelations> = rows_by_slot
            .into_iter()
            .enumerate()
            .filter(|(_, rows)| !rows.is_empty())
            .map(|(slot, rows)| {
                let width = points.iter().filter(|p| p.slot == slot).count();
                SlotRelations { slot, rows: rows.into_iter().map(|r| widen(r, width)).collect() }
            })
            .collect();
        let cfg = Configuration::new(names(n), random_matroid(rng, n), standard_slots(), points, relations, 0);
        let diag = validate(&cfg);
        if diag.valid && diag.intersection_compatible {
            return cfg;
        }
    }
}

fn pad(start: usize, row: Vec<QuadNumber>) -> Vec<QuadNumber> {
    let mut out = vec![QuadNumber::zero(); start];
    out.extend(row);
    out
}

fn widen(mut row: Vec<QuadNumber>, width: usize) -> Vec<QuadNumber> {
    row.resize(width, QuadNumber::zero());
    row
}

/// Free matroid, no relations, distinct point masks per slot, and `∅` strong.
pub fn random_generic_strong(rng: &mut ChaCha8Rng, n: usize) -> Configuration {
    loop {
        let count = rng.gen_range(0..=n);
        let mut points = random_points(rng, n, count);
        let mut seen = Vec::new();
        points.retain(|p| {
            let key = (p.slot, p.mask());
            let fresh = !seen.contains(&key);
            seen.push(key);
            fresh
        });
        let cfg = Configuration::new(names(n), Configuration::free_matroid(n), standard_slots(), points, vec![], 0);
        if oracle_strong(&cfg, 0, 0b111) {
            return cfg;
        }
    }
}

pub fn rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rational {
    Rational::from((rng.gen_range(-num..=num), rng.gen_range(1..=den)))
}

pub const CM_FIELDS: [i64; 6] = [-1, -2, -3, -5, -7, -11];

/// `τ = a + b√d` with `d` from [`CM_FIELDS`] and `Im τ` roughly in `[1/4, 3]`.
pub fn random_cm_tau(rng: &mut ChaCha8Rng, d: i64) -> QuadNumber {
    let a = rational(rng, 9, 6);
    let im_target = Rational::from((rng.gen_range(1..=12), 4));
    let root = (-d as f64).sqrt();
    let b = Rational::from(((im_target.to_f64() / root * 64.0).round().max(1.0) as i64, 64));
    QuadNumber::new(a, b, d).unwrap()
}

/// Exact lattice `ω₁ = w`, `ω₂ = wτ` with `w` a small element of `ℚ(√d)`.
pub fn random_exact_lattice(rng: &mut ChaCha8Rng) -> Lattice {
    let d = CM_FIELDS[rng.gen_range(0..CM_FIELDS.len())];
    let tau = random_cm_tau(rng, d);
    let mut w = QuadNumber::new(rational(rng, 3, 2), rational(rng, 1, 2), d).unwrap();
    if w.is_zero() {
        w = QuadNumber::one();
    }
    let w2 = w.mul(&tau).unwrap();
    make_lattice(ExactComplex::Quad(w), ExactComplex::Quad(w2)).unwrap()
}

pub const ORACLE_PREC: u32 = 256;

fn two_pi_i(prec: u32) -> ComplexBall {
    ComplexBall::new(Ball::zero(prec), Ball::pi(prec).mul_i64(2))
}

/// Tail bound `c · |q|^n` as a Float, from a log₂ estimate with margin.
fn tail(q_abs: f64, n: u32, c: f64) -> Float {
    let log2 = c.log2() + f64::from(n) * q_abs.log2() + 1.0;
    Float::with_val(64, 1) << (log2.ceil() as i32)
}

fn sigma(n: u64, k: u32) -> u64 {
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| d.pow(k)).sum()
}

/// `g₂, g₃` of `Z + Zτ` from `E₄, E₆` as q-expansions.
pub fn q_expansion_invariants(tau: &ComplexBall) -> (ComplexBall, ComplexBall) {
    let prec = ORACLE_PREC;
    let q = two_pi_i(prec).mul(&tau.with_prec(prec)).exp();
    let q_abs = q.abs_upper().to_f64();
    assert!(q_abs < 0.05, "oracle needs Im τ ≥ 1/2");
    let terms = 120u32;
    let (mut e4, mut e6) = (ComplexBall::zero(prec), ComplexBall::zero(prec));
    let mut qn = ComplexBall::one(prec);
    for n in 1..=u64::from(terms) {
        qn = qn.mul(&q);
        e4 = e4.add(&qn.mul_i64(sigma(n, 3) as i64));
        e6 = e6.add(&qn.mul_i64(sigma(n, 5) as i64));
    }
    // σ₅(n) ≤ n⁶ and the tail ratio is below 1/2
    let t = tail(q_abs, terms + 1, 2.0 * f64::from(terms + 1).powi(6));
    let e4 = ComplexBall::one(prec).add(&e4.mul_i64(240)).inflate(&(Float::with_val(64, 240) * &t));
    let e6 = ComplexBall::one(prec).sub(&e6.mul_i64(504)).inflate(&(Float::with_val(64, 504) * &t));
    let pi = Ball::pi(prec);
    let pi4 = pi.powi(4);
    let pi6 = pi.powi(6);
    let g2 = e4.mul_real(&pi4.mul_rational(&Rational::from((4, 3))));
    let g3 = e6.mul_real(&pi6.mul_rational(&Rational::from((8, 27))));
    (g2, g3)
}

/// `℘(z; Z + Zτ)` from the q-expansion in `u = e^{2πiz}`.
pub fn q_expansion_wp(tau: &ComplexBall, z: &ComplexBall) -> ComplexBall {
    let prec = ORACLE_PREC;
    let tpi = two_pi_i(prec);
    let q = tpi.mul(&tau.with_prec(prec)).exp();
    let u = tpi.mul(&z.with_prec(prec)).exp();
    let u_inv = u.recip().unwrap();
    let one = ComplexBall::one(prec);
    let term = |w: &ComplexBall| w.div(&one.sub(w).sqr()).unwrap();
    let mut sum = term(&u).add(&ComplexBall::from_rationals(&Rational::from((1, 12)), &Rational::new(), prec));
    let terms = 150u32;
    let mut qn = one.clone();
    for _ in 0..terms {
        qn = qn.mul(&q);
        sum = sum.add(&term(&qn.mul(&u))).add(&term(&qn.mul(&u_inv))).sub(&term(&qn).mul_i64(2));
    }
    // each tail term is at most 2|w| once |w| < 1/4
    let q_abs = q.abs_upper().to_f64();
    let spread = u.abs_upper().to_f64().max(u_inv.abs_upper().to_f64());
    let t = tail(q_abs, terms + 1, 16.0 * spread);
    sum.inflate(&t).mul(&tpi.sqr())
}
