//! Paired configurations and derivation presentations.

use isr_workbench::arith::ball::ComplexBall;
use isr_workbench::arith::linalg::FieldElem;
use isr_workbench::arith::poly::{Poly, RatFunc};
use isr_workbench::differentials::{f_forms, DerivationAssignment, FForm, FieldPresentation, FormSpec, Scalar};
use isr_workbench::predim::Configuration;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rug::Rational;

use super::{oracle_strong, random_relation_free, rank_rational};

const ALL_SLOTS: u64 = 0b111;

pub fn exact(r: Rational) -> Scalar {
    Scalar::Exact(RatFunc::constant(r))
}

pub fn positive(rng: &mut ChaCha8Rng) -> Rational {
    Rational::from((rng.gen_range(1..1000), rng.gen_range(1..1000)))
}

/// Generic presentation on the coordinates, one form per point:
/// `f′(b) = e` for exp points and a random constant for ℘ points.
pub fn generic_pair(cfg: &Configuration, rng: &mut ChaCha8Rng) -> (FieldPresentation, Vec<FForm>) {
    let p = FieldPresentation::generic(cfg.coordinates.clone());
    let specs: Vec<FormSpec> = cfg
        .points
        .iter()
        .map(|pt| {
            let fprime = if pt.slot == 0 { Scalar::Exact(RatFunc::var(pt.e)) } else { exact(positive(rng)) };
            FormSpec { slot: pt.slot, b: pt.b, fb: pt.e, fprime }
        })
        .collect();
    let forms = f_forms(&p, &specs).unwrap();
    (p, forms)
}

/// Numeric presentation with generators `y₀…y_{r−1}, x₀…x_{n−1}`, linear
/// relations `x_j = Σ M_ij y_i` at a random rational point, and one form per
/// point with a random `f′`.
pub fn numeric_pair(cfg: &Configuration, rng: &mut ChaCha8Rng) -> (FieldPresentation, Vec<FForm>) {
    let prec = 128;
    let (r, n) = (cfg.matroid.len(), cfg.len());
    let mut names: Vec<String> = (0..r).map(|i| format!("y{i}")).collect();
    names.extend(cfg.coordinates.iter().cloned());
    let ys: Vec<Rational> = (0..r).map(|_| positive(rng)).collect();
    let zero = Rational::new();
    let mut point: Vec<ComplexBall> = ys.iter().map(|y| ComplexBall::from_rationals(y, &zero, prec)).collect();
    let mut relations = Vec::new();
    for j in 0..n {
        let mut rel = Poly::var(r + j);
        let mut x = Rational::new();
        for (i, y) in ys.iter().enumerate() {
            rel = rel.sub(&Poly::var(i).scale(&cfg.matroid[i][j]));
            x += Rational::from(&cfg.matroid[i][j] * y);
        }
        relations.push(rel);
        point.push(ComplexBall::from_rationals(&x, &zero, prec));
    }
    let p = FieldPresentation::numeric(names, relations, point, prec);
    let specs: Vec<FormSpec> = cfg
        .points
        .iter()
        .map(|pt| FormSpec {
            slot: pt.slot,
            b: r + pt.b,
            fb: r + pt.e,
            fprime: Scalar::Numeric(ComplexBall::from_rationals(&positive(rng), &zero, prec)),
        })
        .collect();
    let forms = f_forms(&p, &specs).unwrap();
    (p, forms)
}

/// Random full-row-rank matroid for which `∅` is strong.
pub fn strong_with_matroid(rng: &mut ChaCha8Rng, n: usize) -> Configuration {
    loop {
        let base = random_relation_free(rng, n);
        let r = rng.gen_range(1..=n);
        let matroid: Vec<Vec<Rational>> =
            (0..r).map(|_| (0..n).map(|_| Rational::from(rng.gen_range(-3..=3))).collect()).collect();
        if rank_rational(&matroid) != r {
            continue;
        }
        let cfg = Configuration::new(base.coordinates.clone(), matroid, base.slots.clone(), base.points.clone(), vec![], 0);
        if oracle_strong(&cfg, 0, ALL_SLOTS) {
            return cfg;
        }
    }
}

pub fn annihilates(forms: &[FForm], x: &DerivationAssignment) -> bool {
    forms.iter().all(|f| {
        let v = f
            .vector
            .iter()
            .enumerate()
            .fold(f.vector[0].zero_like(), |acc, (j, c)| acc.add(&c.mul(x.get(j).expect("every generator assigned"))));
        matches!(v, Scalar::Exact(ref r) if r.is_zero())
    })
}

pub fn restrict(x: &DerivationAssignment, a: u64) -> DerivationAssignment {
    DerivationAssignment { values: x.values.iter().filter(|(i, _)| a >> i & 1 == 1).cloned().collect() }
}
