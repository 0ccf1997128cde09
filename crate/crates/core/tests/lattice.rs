mod common;

use common::*;
use isr_workbench::arith::QuadNumber;
use isr_workbench::lattice::{
    cm_field, conjugate, det, is_isogenous, isr_equivalent, make_lattice, mobius, mobius_ball, reduce_tau, ExactComplex,
    IntMatrix, IsogenyOutcome, Lattice,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

fn quad(tau: &ExactComplex) -> &QuadNumber {
    tau.as_quad().expect("exact")
}

fn lattice_of(q: QuadNumber) -> Lattice {
    Lattice::from_tau(ExactComplex::Quad(q)).unwrap()
}

/// Random integer matrix with positive determinant and entries in `[-k, k]`.
fn random_matrix(rng: &mut ChaCha8Rng, k: i64) -> IntMatrix {
    loop {
        let m = [[rng.gen_range(-k..=k), rng.gen_range(-k..=k)], [rng.gen_range(-k..=k), rng.gen_range(-k..=k)]];
        if det(&m) > 0 {
            return m;
        }
    }
}

/// Primitive `(A, B, C)` with `Aτ² + Bτ + C = 0` and `A > 0`.
fn min_poly(t: &QuadNumber) -> (Integer, Integer, Integer) {
    // τ² − 2xτ + (x² − d y²)
    let b: Rational = -2 * Rational::from(&t.a);
    let c = Rational::from(&t.a * &t.a) - Rational::from(&t.b * &t.b) * t.d;
    let l = Integer::from(b.denom().lcm_ref(c.denom()));
    let (a, b, c) = (l.clone(), Integer::from(b.numer() * &l) / b.denom(), Integer::from(c.numer() * &l) / c.denom());
    let g = Integer::from(a.gcd_ref(&b)).gcd(&c);
    (a / &g, b / &g, c / &g)
}

fn squarefree_core(mut n: i64) -> i64 {
    let mut p = 2;
    while p * p <= n.abs() {
        while n % (p * p) == 0 {
            n /= p * p;
        }
        p += 1;
    }
    n
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_lands_in_fundamental_domain(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = CM_FIELDS[rng.gen_range(0..CM_FIELDS.len())];
        let t = random_cm_tau(&mut rng, d);
        let l = lattice_of(t.clone());
        let (red, m) = reduce_tau(&l).unwrap();
        prop_assert_eq!(det(&m), 1);
        let r = quad(&red);
        let half = Rational::from((1, 2));
        prop_assert!(r.re().abs() <= half);
        prop_assert!(r.abs_sqr() >= 1);
        let image = mobius(&m, &ExactComplex::Quad(t)).unwrap();
        prop_assert_eq!(quad(&image), r);
    }

    #[test]
    fn conjugation_is_an_involution(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_exact_lattice(&mut rng);
        let c = conjugate(&l);
        prop_assert_eq!(&conjugate(&c).tau, &l.tau);
        // τ(Λ̄) = −conj τ(Λ) keeps the upper half-plane
        prop_assert_eq!(quad(&c.tau), &quad(&l.tau).conj().neg());
    }

    /// Exact verdicts agree with the bounded numeric search, and both
    /// witnesses really move `τ₁` to `τ₂`.
    #[test]
    fn exact_and_numeric_isogeny_agree(seed in any::<u64>(), same_field in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d1 = CM_FIELDS[rng.gen_range(0..CM_FIELDS.len())];
        let t1 = random_cm_tau(&mut rng, d1);
        let t2 = if same_field {
            let m = random_matrix(&mut rng, 4);
            quad(&mobius(&m, &ExactComplex::Quad(t1.clone())).unwrap()).clone()
        } else {
            let others: Vec<i64> = CM_FIELDS.iter().copied().filter(|&d| d != d1).collect();
            let d2 = others[rng.gen_range(0..others.len())];
            random_cm_tau(&mut rng, d2)
        };
        let (l1, l2) = (lattice_of(t1.clone()), lattice_of(t2.clone()));
        let exact = is_isogenous(&l1, &l2, 100).unwrap();
        prop_assert_eq!(exact.is_isogenous(), same_field);
        if let Some(w) = exact.witness() {
            let image = mobius(&w, &l1.tau).unwrap();
            prop_assert_eq!(quad(&image), &t2);
        } else {
            let refused = matches!(exact.outcome, IsogenyOutcome::NotIsogenous { .. });
            prop_assert!(refused);
        }
        let (n1, n2) = (l1.to_numeric(128), l2.to_numeric(128));
        let numeric = is_isogenous(&n1, &n2, 20).unwrap();
        prop_assert_eq!(numeric.is_isogenous(), same_field);
        if let Some(w) = numeric.witness() {
            let img = mobius_ball(&w, &n1.tau_ball(128)).unwrap();
            prop_assert!(img.overlaps(&n2.tau_ball(128)));
            let image = mobius(&w, &l1.tau).unwrap();
            prop_assert_eq!(quad(&image), &t2);
        } else {
            let is_unknown = matches!(numeric.outcome, IsogenyOutcome::UnknownUpToBound { bound: 20 });
            prop_assert!(is_unknown);
        }
    }

    #[test]
    fn isr_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d1 = CM_FIELDS[rng.gen_range(0..3)];
        let d2 = CM_FIELDS[rng.gen_range(0..3)];
        let l1 = lattice_of(random_cm_tau(&mut rng, d1));
        let l2 = lattice_of(random_cm_tau(&mut rng, d2));
        let a = isr_equivalent(&l1, &l2, 100).unwrap().verdict.is_isogenous();
        let b = isr_equivalent(&l2, &l1, 100).unwrap().verdict.is_isogenous();
        prop_assert_eq!(a, b);
        prop_assert_eq!(a, d1 == d2);
    }

    #[test]
    fn cm_field_from_minimal_polynomial(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = CM_FIELDS[rng.gen_range(0..CM_FIELDS.len())];
        let t = random_cm_tau(&mut rng, d);
        let l = lattice_of(t.clone());
        prop_assert_eq!(cm_field(&l, 100).unwrap(), Some(d));
        let (a, b, c) = min_poly(&t);
        let disc: Integer = Integer::from(&b * &b) - 4 * Integer::from(&a * &c);
        let core = squarefree_core(disc.to_i64().unwrap());
        prop_assert_eq!(core, d);
        let height = a.abs().max(b.abs()).max(c.abs());
        if height <= 100 {
            prop_assert_eq!(cm_field(&l.to_numeric(192), 100).unwrap(), Some(d));
        }
    }
}

fn parse(text: &str) -> ExactComplex {
    ExactComplex::parse(text, 128).unwrap()
}

#[test]
fn translation_reduces_one_plus_i() {
    let (red, m) = reduce_tau(&Lattice::from_tau(parse("1+1i:-1")).unwrap()).unwrap();
    assert_eq!(red, parse("0+1i:-1"));
    assert_eq!(m, [[1, -1], [0, 1]]);
}

#[test]
fn orientation_is_fixed_on_input() {
    let l = make_lattice(ExactComplex::from_i64(1), parse("0-1i:-1")).unwrap();
    assert_eq!(l.tau, parse("0+1i:-1"));
    assert_eq!(l.basis_change, [[-1, 0], [0, 1]]);
}

#[test]
fn square_and_sqrt_two_are_not_isr_equivalent() {
    let l1 = Lattice::from_tau(parse("0+1i:-1")).unwrap();
    let l2 = Lattice::from_tau(parse("0+1i:-2")).unwrap();
    for other in [l2.clone(), conjugate(&l2)] {
        assert!(matches!(is_isogenous(&l1, &other, 100).unwrap().outcome, IsogenyOutcome::NotIsogenous { .. }));
    }
    let v = isr_equivalent(&l1, &l2, 100).unwrap();
    assert!(matches!(v.verdict.outcome, IsogenyOutcome::NotIsogenous { .. }));
    assert!(!v.used_reflection);
}

#[test]
fn quarter_shifts_are_directly_isogenous() {
    let l1 = Lattice::from_tau(parse("1/4+1i:-1")).unwrap();
    let l2 = Lattice::from_tau(parse("-1/4+1i:-1")).unwrap();
    let v = isr_equivalent(&l1, &l2, 100).unwrap();
    assert!(v.verdict.is_isogenous());
    assert!(!v.used_reflection);
    let w = v.verdict.witness().unwrap();
    assert_eq!(mobius(&w, &l1.tau).unwrap(), l2.tau);
}

#[test]
fn reflection_branch_for_non_cm_pair() {
    // τ₂ = −conj(τ₁) for a transcendental-looking τ₁: only the reflected branch matches
    let t1 = ExactComplex::parse("0.35355339059327376220042218105242451964+1.5707963267948966192313216916397514421i", 128).unwrap();
    let t2 = t1.conj().neg();
    let l1 = Lattice::from_tau(t1).unwrap();
    let l2 = Lattice::from_tau(t2).unwrap();
    let v = isr_equivalent(&l1, &l2, 10).unwrap();
    assert!(v.verdict.is_isogenous());
    assert!(v.used_reflection);
}
