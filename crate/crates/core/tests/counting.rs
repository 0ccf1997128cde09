mod common;

use common::*;
use isr_workbench::arith::ball::{Ball, ComplexBall};
use isr_workbench::counting::{
    all_verdicts, classify_point, count_report, default_eps, enumerate_rationals, Class, Domain, Evaluator, RationalQ,
    TargetFunction,
};
use isr_workbench::lattice::ExactComplex;
use proptest::prelude::*;
use rug::{Float, Rational};

/// Positive rationals of height `≤ h` by walking the Stern–Brocot tree.
fn stern_brocot(h: u64) -> Vec<(u64, u64)> {
    fn walk(l: (u64, u64), r: (u64, u64), h: u64, out: &mut Vec<(u64, u64)>) {
        let m = (l.0 + r.0, l.1 + r.1);
        // descendants of m have larger numerator and denominator
        if m.0 > h || m.1 > h {
            return;
        }
        walk(l, m, h, out);
        out.push(m);
        walk(m, r, h, out);
    }
    let mut out = Vec::new();
    walk((0, 1), (1, 0), h, &mut out);
    out
}

fn totient(n: u64) -> u64 {
    (1..=n).filter(|k| gcd(*k, n) == 1).count() as u64
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn q(n: u64, d: u64) -> RationalQ {
    RationalQ::new(n, d).unwrap()
}

fn tau_2i() -> ExactComplex {
    ExactComplex::parse("0+2i:-1", 128).unwrap()
}

fn default_domain() -> Domain {
    Domain::new(Rational::from((6, 5)), Some(Rational::from((23, 10)))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn enumeration_matches_stern_brocot(h in 1u64..60) {
        let got: Vec<(u64, u64)> = enumerate_rationals(h, &Domain::positive()).iter().map(|r| (r.num, r.den)).collect();
        prop_assert_eq!(got, stern_brocot(h));
    }

    #[test]
    fn enumeration_respects_the_domain(h in 1u64..40, lo in 0i64..5, width in 1i64..6, den in 1i64..4) {
        let domain = Domain::new(Rational::from((lo, den)), Some(Rational::from((lo + width, den)))).unwrap();
        let got = enumerate_rationals(h, &domain);
        let want: Vec<(u64, u64)> = stern_brocot(h)
            .into_iter()
            .filter(|&(n, d)| {
                let r = Rational::from((n, d));
                r > domain.lower && r < *domain.upper.as_ref().unwrap()
            })
            .collect();
        prop_assert_eq!(got.iter().map(|r| (r.num, r.den)).collect::<Vec<_>>(), want);
    }
}

#[test]
fn identity_counts_match_totient_formula() {
    let schedule: Vec<u64> = (1..=30).collect();
    let report = count_report(&TargetFunction::identity(), &schedule, &default_eps(128), 128).unwrap();
    for row in &report.rows {
        let expected = 2 * (1..=row.height).map(totient).sum::<u64>() - 1;
        assert_eq!(row.confirmed, expected, "H = {}", row.height);
        assert_eq!(row.undetermined, 0);
        let n = stern_brocot(row.height).len() as u64;
        assert_eq!(row.confirmed + row.excluded, n * n);
    }
    assert_eq!(report.rows[1].confirmed, 3);
    assert_eq!(report.rows[9].confirmed, 63);
}

#[test]
fn classify_examples() {
    let id = TargetFunction::identity();
    let eps = default_eps(128);
    assert_eq!(classify_point(&id, q(3, 2), q(3, 2), &eps, 128).unwrap().class, Class::ConfirmedEps);
    assert_eq!(classify_point(&id, q(1, 1), q(2, 1), &eps, 128).unwrap().class, Class::Excluded);
    let h = TargetFunction::exp_wp_log(tau_2i(), default_domain());
    assert!(classify_point(&h, q(1, 1), q(1, 1), &eps, 128).is_err(), "1 is outside (6/5, 23/10)");
}

#[test]
fn exp_wp_log_matches_q_expansion() {
    let h = TargetFunction::exp_wp_log(tau_2i(), default_domain());
    let ev = Evaluator::new(&h, 128).unwrap();
    let tau = ComplexBall::from_rationals(&Rational::new(), &Rational::from(2), ORACLE_PREC);
    for p in enumerate_rationals(12, &h.domain) {
        let got = ev.value(&p).unwrap();
        let log = Ball::from_rational(&p.to_rational(), ORACLE_PREC).ln().unwrap();
        let wp = q_expansion_wp(&tau, &ComplexBall::new(log, Ball::zero(ORACLE_PREC)));
        assert!(wp.im.contains_zero());
        let want = wp.re.exp();
        assert!(got.overlaps(&want), "h({p}) = {} vs {}", got.mid_string(30), want.mid_string(30));
        assert!(*got.rad() < Float::with_val(64, 1e-30));
    }
}

#[test]
fn incremental_counts_equal_direct_tallies() {
    let h = TargetFunction::exp_wp_log(tau_2i(), default_domain());
    let eps = default_eps(128);
    let report = count_report(&h, &[3, 7, 12], &eps, 128).unwrap();
    let all = all_verdicts(&h, 12, &eps, 128).unwrap();
    let tally = |c: Class| all.iter().filter(|v| v.class == c).count() as u64;
    let last = report.rows.last().unwrap();
    assert_eq!(last.confirmed, tally(Class::ConfirmedEps));
    assert_eq!(last.excluded, tally(Class::Excluded));
    assert_eq!(last.undetermined, tally(Class::Undetermined));
    for w in report.rows.windows(2) {
        assert!(w[0].confirmed <= w[1].confirmed);
    }
}

#[test]
fn domains_touching_a_pole_are_refused() {
    // log maps (1/2, 2) across 0, where ℘ has a pole
    let d = Domain::new(Rational::from((1, 2)), Some(Rational::from(2))).unwrap();
    assert!(Evaluator::new(&TargetFunction::exp_wp_log(tau_2i(), d), 128).is_err());
    let not_rectangular = ExactComplex::parse("1/2+2i:-1", 128).unwrap();
    assert!(Evaluator::new(&TargetFunction::exp_wp_log(not_rectangular, default_domain()), 128).is_err());
}
