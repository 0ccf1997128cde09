mod common;

use common::*;
use isr_workbench::arith::ball::ComplexBall;
use isr_workbench::arith::QuadNumber;
use isr_workbench::lattice::{make_lattice, ExactComplex, Lattice};
use isr_workbench::wp::curve::point_distance;
use isr_workbench::wp::{curve_smul, exp_e, invariants, EllipticModel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};

const PREC: u32 = 128;

fn tau_lattice(t: &QuadNumber) -> Lattice {
    Lattice::from_tau(ExactComplex::Quad(t.clone())).unwrap()
}

/// Random exact `τ` with `Im τ ≥ 1/2`, so the q-expansions converge fast.
fn upper_tau(rng: &mut ChaCha8Rng) -> QuadNumber {
    loop {
        let d = CM_FIELDS[rng.gen_range(0..CM_FIELDS.len())];
        let t = random_cm_tau(rng, d);
        if t.to_complex_ball(64).im.lower() >= 0.5 {
            return t;
        }
    }
}

fn argument(l: &Lattice, u: i64, v: i64, prec: u32) -> ComplexBall {
    let r = |k| ComplexBall::from_rationals(&Rational::from((k, 1000)), &Rational::new(), prec);
    l.omega1_ball(prec).mul(&r(u)).add(&l.omega2_ball(prec).mul(&r(v)))
}

#[derive(Clone, Copy)]
struct C64(f64, f64);

impl C64 {
    fn add(self, o: C64) -> C64 {
        C64(self.0 + o.0, self.1 + o.1)
    }
    fn mul(self, o: C64) -> C64 {
        C64(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn recip(self) -> C64 {
        let n = self.0 * self.0 + self.1 * self.1;
        C64(self.0 / n, -self.1 / n)
    }
    fn abs(self) -> f64 {
        self.0.hypot(self.1)
    }
}

fn to_c64(b: &ComplexBall) -> C64 {
    C64(b.re.mid().to_f64(), b.im.mid().to_f64())
}

/// `60 Σ' λ⁻⁴` over `|m|, |n| ≤ k` of the basis as given (no reduction).
fn direct_g2(w1: C64, w2: C64, k: i64) -> C64 {
    let mut s = C64(0.0, 0.0);
    for m in -k..=k {
        for n in -k..=k {
            if m == 0 && n == 0 {
                continue;
            }
            let l = C64(m as f64 * w1.0 + n as f64 * w2.0, m as f64 * w1.1 + n as f64 * w2.1);
            let inv = l.recip();
            let inv2 = inv.mul(inv);
            s = s.add(inv2.mul(inv2));
        }
    }
    C64(60.0 * s.0, 60.0 * s.1)
}

fn model(l: &Lattice) -> EllipticModel {
    invariants(l, PREC).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_match_q_expansion(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = upper_tau(&mut rng);
        let m = model(&tau_lattice(&t));
        let (g2, g3) = q_expansion_invariants(&t.to_complex_ball(ORACLE_PREC));
        prop_assert!(m.g2.overlaps(&g2), "g2 {} vs {}", m.g2, g2);
        prop_assert!(m.g3.overlaps(&g3), "g3 {} vs {}", m.g3, g3);
        prop_assert!(m.g2.max_rad() < Float::with_val(64, 1e-30));
    }

    #[test]
    fn wp_matches_q_expansion(seed in any::<u64>(), u in 1i64..1000, v in 1i64..900) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = upper_tau(&mut rng);
        let l = tau_lattice(&t);
        let z = argument(&l, u, v, PREC + 64);
        let got = model(&l).wp(&z).unwrap();
        let want = q_expansion_wp(&t.to_complex_ball(ORACLE_PREC), &z);
        prop_assert!(got.overlaps(&want), "wp {} vs {}", got, want);
        let tight = Float::with_val(64, 1e-30) * got.abs_upper().max(&Float::with_val(64, 1));
        prop_assert!(got.max_rad() < tight && want.max_rad() < tight);
    }

    #[test]
    fn basis_change_leaves_invariants_alone(seed in any::<u64>(), k in -6i64..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_exact_lattice(&mut rng);
        let (w1, w2) = (l.omega1.as_quad().unwrap().clone(), l.omega2.as_quad().unwrap().clone());
        // (ω₁, ω₂ + kω₁) and (ω₂, −ω₁) span the same lattice
        let shifted = make_lattice(ExactComplex::Quad(w1.clone()), ExactComplex::Quad(w2.add(&w1.scale(&Rational::from(k))).unwrap())).unwrap();
        let swapped = make_lattice(ExactComplex::Quad(w2), ExactComplex::Quad(w1.neg())).unwrap();
        let m = model(&l);
        for other in [shifted, swapped] {
            let o = model(&other);
            prop_assert!(m.g2.overlaps(&o.g2));
            prop_assert!(m.g3.overlaps(&o.g3));
        }
    }

    #[test]
    fn parity_and_periodicity(seed in any::<u64>(), u in 1i64..1000, v in 1i64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_exact_lattice(&mut rng);
        let m = model(&l);
        let z = argument(&l, u, v, m.working_precision());
        let (p, dp) = m.wp_pair(&z).unwrap();
        let (pn, dpn) = m.wp_pair(&z.neg()).unwrap();
        prop_assert!(p.overlaps(&pn));
        prop_assert!(dp.overlaps(&dpn.neg()));
        let (ps, dps) = m.wp_pair(&z.add(&l.omega1_ball(m.working_precision()))).unwrap();
        prop_assert!(p.overlaps(&ps));
        prop_assert!(dp.overlaps(&dps));
    }

    #[test]
    fn doubling_on_the_curve(seed in any::<u64>(), u in 1i64..1000, v in 1i64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_exact_lattice(&mut rng);
        let m = model(&l);
        let z = argument(&l, u, v, m.working_precision());
        let twice = exp_e(&m, &z.mul_i64(2));
        let doubled = exp_e(&m, &z).and_then(|p| curve_smul(&m, 2, &p));
        if let (Ok(a), Ok(b)) = (twice, doubled) {
            let gap = point_distance(&a, &b);
            prop_assert!(gap < Float::with_val(64, 1e-25), "{}", gap);
        }
    }

    #[test]
    fn precision_refinement_is_consistent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_exact_lattice(&mut rng);
        let lo = invariants(&l, 128).unwrap();
        let hi = invariants(&l, 256).unwrap();
        prop_assert!(lo.g2.overlaps(&hi.g2));
        prop_assert!(lo.g3.overlaps(&hi.g3));
        prop_assert!(hi.g2.max_rad() <= lo.g2.max_rad());
    }
}

#[test]
fn direct_lattice_sum_on_unreduced_basis() {
    // ω₁ = 2 + i, ω₂ = ω₁(τ + 3) with τ = i/2 + 1/3: a skewed basis of a CM lattice
    let w1 = QuadNumber::new(Rational::from(2), Rational::from(1), -1).unwrap();
    let tau = QuadNumber::new(Rational::from((1, 3)), Rational::from((1, 2)), -1).unwrap();
    let w2 = w1.mul(&tau.add(&QuadNumber::from_i64(3)).unwrap()).unwrap();
    let l = make_lattice(ExactComplex::Quad(w1.clone()), ExactComplex::Quad(w2.clone())).unwrap();
    let m = model(&l);
    let direct = direct_g2(to_c64(&w1.to_complex_ball(64)), to_c64(&w2.to_complex_ball(64)), 400);
    let got = to_c64(&m.g2);
    let err = C64(got.0 - direct.0, got.1 - direct.1).abs();
    assert!(err < 1e-3 * got.abs().max(1.0), "direct {} {}, model {} {}", direct.0, direct.1, got.0, got.1);
}

#[test]
fn square_lattice_half_periods() {
    let l = Lattice::from_tau(ExactComplex::i()).unwrap();
    let m = model(&l);
    let prec = m.working_precision();
    let half = |re: i64, im: i64| ComplexBall::from_rationals(&Rational::from((re, 2)), &Rational::from((im, 2)), prec);
    for z in [half(1, 0), half(0, 1), half(1, 1)] {
        assert!(m.wp_prime(&z).unwrap().contains_zero());
    }
    // g₃ = 0, so the half-period values are e, −e, 0
    let e1 = m.wp(&half(1, 0)).unwrap();
    let e2 = m.wp(&half(0, 1)).unwrap();
    let e3 = m.wp(&half(1, 1)).unwrap();
    assert!(e1.add(&e2).contains_zero());
    assert!(e3.contains_zero());
    assert!(m.g3.contains_zero());
    // 4e³ − g₂e = 0 with e ≠ 0
    assert!(e1.sqr().mul_i64(4).sub(&m.g2).contains_zero());
}
