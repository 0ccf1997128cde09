//! Quick cross-module consistency checks behind `isrwb selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

use crate::arith::ball::ComplexBall;
use crate::arith::poly::Poly;
use crate::cli::{self, verify_identity, VerifySpec};
use crate::counting::{count_report, default_eps, TargetFunction};
use crate::differentials::{der_dimension, f_forms, FieldPresentation, FormSpec, Scalar};
use crate::lattice::{is_isogenous, isr_equivalent, ExactComplex, Lattice};
use crate::predim::{
    chain_decompose, check_semimodularity, independence_certificate, is_strong, strong_hull, supersets,
    worked_example, Configuration, FunctionSlot, GroupPoint, SlotKind,
};
use crate::reports::{SelftestCheck, SelftestRecord};
use crate::wp::{invariants, ode_residual, IdentityTag};

fn check(name: &str, outcome: Result<String, String>) -> SelftestCheck {
    match outcome {
        Ok(detail) => SelftestCheck { name: name.into(), passed: true, detail },
        Err(detail) => SelftestCheck { name: name.into(), passed: false, detail },
    }
}

fn lattice(tau: &str, prec: u32) -> Lattice {
    Lattice::from_tau(ExactComplex::parse(tau, prec + crate::wp::GUARD_BITS).expect("fixed input")).expect("fixed input")
}

/// Runs every check; none of them panics on failure.
pub fn run(precision: u32, seed: u64) -> SelftestRecord {
    let checks = vec![
        check("ode identity", identities(&[IdentityTag::Ode], precision, seed, 10)),
        check("symmetric invariants", symmetric_invariants(precision)),
        check(
            "homogeneity, schwarz, addition, isogeny",
            identities(
                &[IdentityTag::Homogeneity, IdentityTag::Schwarz, IdentityTag::Addition, IdentityTag::Isogeny],
                precision,
                seed,
                3,
            ),
        ),
        check("negative control", negative_control(precision)),
        check("isogeny classifier", classifier()),
        check("hull and chain", hull_and_chain(seed)),
        check("semimodularity", semimodularity(seed)),
        check("derivations match delta", derivations(seed)),
        check("independence certificate", certificate()),
        check("identity counts", counts()),
        check("determinism", determinism()),
    ];
    let passed = checks.iter().filter(|c| c.passed).count();
    SelftestRecord { precision, seed, failed: checks.len() - passed, passed, checks }
}

fn identities(tags: &[IdentityTag], precision: u32, seed: u64, samples: usize) -> Result<String, String> {
    let mut worst = Vec::new();
    for tau in ["i", "1/3+5/4i:-1", "0.31+1.13i"] {
        let l = lattice(tau, precision);
        for &identity in tags {
            let spec = VerifySpec {
                identity,
                alpha: ExactComplex::parse("3/2+1/2i:-1", precision).map_err(|e| e.to_string())?,
                partner: Some(lattice(if tau == "0.31+1.13i" { "0.62+2.26i" } else { "0+2i:-1" }, precision)),
                bound: 20,
            };
            // the numeric partner above is only isogenous to the numeric lattice
            if identity == IdentityTag::Isogeny && tau == "1/3+5/4i:-1" {
                continue;
            }
            let r = verify_identity(&l, &spec, samples, seed, precision).map_err(|e| format!("{identity} at {tau}: {e}"))?;
            if r.failed > 0 {
                return Err(format!("{identity} at {tau}: max bound {} above {}", r.max_bound, r.threshold));
            }
            worst.push(format!("{identity}@{tau} <= {}", r.max_bound));
        }
    }
    Ok(worst.join("; "))
}

fn symmetric_invariants(precision: u32) -> Result<String, String> {
    let g3 = invariants(&lattice("i", precision), precision).map_err(|e| e.to_string())?.g3;
    let g2 = invariants(&lattice("1/2+1/2i:-3", precision), precision).map_err(|e| e.to_string())?.g2;
    if !g3.contains_zero() {
        return Err(format!("g3(i) = {g3} excludes zero"));
    }
    if !g2.contains_zero() {
        return Err(format!("g2(rho) = {g2} excludes zero"));
    }
    Ok(format!("|g3(i)| <= {}, |g2(rho)| <= {}", g3.abs_upper().to_f64(), g2.abs_upper().to_f64()))
}

fn negative_control(precision: u32) -> Result<String, String> {
    let m = invariants(&lattice("i", precision), precision).map_err(|e| e.to_string())?;
    let p = m.working_precision();
    let bad = m.perturbed(&ComplexBall::zero(p), &ComplexBall::from_rationals(&Rational::from((1, 100_000)), &Rational::new(), p));
    let z = ComplexBall::from_rationals(&Rational::from((17, 53)), &Rational::from((11, 31)), p);
    let r = ode_residual(&bad, &z).map_err(|e| e.to_string())?;
    if r.value < 1e-6 {
        return Err(format!("perturbed residual {} below 1e-6", r.value.to_f64()));
    }
    Ok(format!("perturbed residual >= {:.3e}", r.value.to_f64()))
}

fn classifier() -> Result<String, String> {
    let i = lattice("i", 128);
    let i_sqrt2 = lattice("0+1i:-2", 128);
    let v = isr_equivalent(&i, &i_sqrt2, 50).map_err(|e| e.to_string())?;
    if v.verdict.is_isogenous() || !matches!(v.verdict.outcome, crate::lattice::IsogenyOutcome::NotIsogenous { .. }) {
        return Err("i and i*sqrt2 not separated on both branches".into());
    }
    let exact = is_isogenous(&i, &lattice("3/5+2i:-1", 128), 50).map_err(|e| e.to_string())?;
    let numeric = is_isogenous(&lattice("0+1.0i", 128), &lattice("0.6+2.0i", 128), 50).map_err(|e| e.to_string())?;
    if !exact.is_isogenous() || !numeric.is_isogenous() {
        return Err("exact and numeric verdicts disagree on i vs 3/5+2i".into());
    }
    Ok(format!("witness {:?}", exact.witness().unwrap_or_default()))
}

/// Random relation-free configuration: one exp slot and one generic ℘ slot.
fn random_config(rng: &mut ChaCha8Rng, n: usize) -> Configuration {
    let rank = rng.gen_range(1..=n);
    let matroid = (0..rank).map(|_| (0..n).map(|_| Rational::from(rng.gen_range(-2..=2))).collect()).collect();
    let mut free: Vec<usize> = (0..n).collect();
    let mut points = Vec::new();
    while free.len() >= 2 && rng.gen_bool(0.6) {
        let b = free.swap_remove(rng.gen_range(0..free.len()));
        let e = free.swap_remove(rng.gen_range(0..free.len()));
        points.push(GroupPoint { slot: rng.gen_range(0..2), b, e });
    }
    Configuration::new(
        (0..n).map(|i| format!("x{i}")).collect(),
        matroid,
        vec![FunctionSlot { index: 0, kind: SlotKind::Exp }, FunctionSlot { index: 1, kind: SlotKind::WpGeneric("E".into()) }],
        points,
        vec![],
        0,
    )
}

fn hull_and_chain(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 0..20 {
        let cfg = random_config(&mut rng, 6);
        let slots = cfg.all_slots();
        let a = rng.gen_range(0..cfg.all() + 1);
        let h = strong_hull(&cfg, a, slots).map_err(|e| e.to_string())?;
        if a & !h != 0 || strong_hull(&cfg, h, slots).map_err(|e| e.to_string())? != h {
            return Err(format!("round {round}: hull of {} is {}", cfg.render(a), cfg.render(h)));
        }
        if !is_strong(&cfg, h, slots).map_err(|e| e.to_string())?.strong {
            return Err(format!("round {round}: hull {} is not strong", cfg.render(h)));
        }
        // the hull is the intersection of the strong supersets
        let meet = supersets(a, cfg.all())
            .into_iter()
            .filter(|&s| is_strong(&cfg, s, slots).map(|r| r.strong).unwrap_or(false))
            .fold(cfg.all(), |acc, s| acc & s);
        if meet != h {
            return Err(format!("round {round}: hull {} but meet of strong supersets {}", cfg.render(h), cfg.render(meet)));
        }
        let chain = chain_decompose(&cfg, h, cfg.all(), slots).map_err(|e| e.to_string())?;
        if chain.total_delta() != cfg.delta_value(slots, cfg.all(), h) {
            return Err(format!("round {round}: chain deltas do not add up"));
        }
    }
    Ok("20 random configurations".into())
}

fn semimodularity(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e);
    let mut triples = 0;
    for _ in 0..3 {
        let cfg = random_config(&mut rng, 5);
        let all = cfg.all();
        for a in 0..=all {
            for b in 0..=all {
                let c = a & b & rng.gen_range(0..=all);
                let r = check_semimodularity(&cfg, a, b, c, cfg.all_slots()).map_err(|e| e.to_string())?;
                if !r.all_hold() {
                    return Err(format!("fails at A={}, B={}, C={}", cfg.render(a), cfg.render(b), cfg.render(c)));
                }
                triples += 1;
            }
        }
    }
    Ok(format!("{triples} triples"))
}

/// Presentation with generators `y₁…y_r, x₁…x_n`, relations `x_j = Σ M_ij y_i`
/// at a random rational point, and one exp form per configuration point.
fn paired(cfg: &Configuration, rng: &mut ChaCha8Rng, prec: u32) -> (FieldPresentation, Vec<FormSpec>) {
    let (r, n) = (cfg.matroid.len(), cfg.len());
    let mut names: Vec<String> = (0..r).map(|i| format!("y{i}")).collect();
    names.extend(cfg.coordinates.iter().cloned());
    let ys: Vec<Rational> = (0..r).map(|_| Rational::from((rng.gen_range(1..1000), rng.gen_range(1..1000)))).collect();
    let mut point: Vec<ComplexBall> = ys.iter().map(|y| ComplexBall::from_rationals(y, &Rational::new(), prec)).collect();
    let mut relations = Vec::new();
    for j in 0..n {
        let mut rel = Poly::var(r + j);
        let mut x = Rational::new();
        for i in 0..r {
            rel = rel.sub(&Poly::var(i).scale(&cfg.matroid[i][j]));
            x += Rational::from(&cfg.matroid[i][j] * &ys[i]);
        }
        relations.push(rel);
        point.push(ComplexBall::from_rationals(&x, &Rational::new(), prec));
    }
    let specs = cfg
        .points
        .iter()
        .map(|p| {
            let fprime = Rational::from((rng.gen_range(1..1000), rng.gen_range(1..1000)));
            FormSpec {
                slot: p.slot,
                b: r + p.b,
                fb: r + p.e,
                fprime: Scalar::Numeric(ComplexBall::from_rationals(&fprime, &Rational::new(), prec)),
            }
        })
        .collect();
    (FieldPresentation::numeric(names, relations, point, prec), specs)
}

fn derivations(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xde);
    let mut compared = 0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=6);
        let mut cfg = random_config(&mut rng, n);
        // full-rank generic columns keep the point forms independent
        let r = n;
        cfg = Configuration::new(
            cfg.coordinates.clone(),
            (0..r).map(|_| (0..n).map(|_| Rational::from(rng.gen_range(-9..=9))).collect()).collect(),
            cfg.slots.clone(),
            cfg.points.clone(),
            vec![],
            0,
        );
        if cfg.rank(cfg.all()) != r {
            continue;
        }
        let (p, specs) = paired(&cfg, &mut rng, 128);
        let forms = f_forms(&p, &specs).map_err(|e| e.to_string())?;
        let der = der_dimension(&p, &forms).map_err(|e| e.to_string())? as i64;
        let delta = cfg.delta_value(cfg.all_slots(), cfg.all(), 0);
        if der != delta {
            return Err(format!("der_dimension {der} but delta {delta}"));
        }
        compared += 1;
    }
    Ok(format!("{compared} pairs"))
}

fn certificate() -> Result<String, String> {
    let w = worked_example();
    let cert = independence_certificate(&w.cfg, w.f1, w.f2, w.a, w.fa, w.c).map_err(|e| e.to_string())?;
    if !cert.certified {
        return Err(cert.explanation);
    }
    Ok(format!("d = {:?}", cert.d))
}

fn counts() -> Result<String, String> {
    let r = count_report(&TargetFunction::identity(), &[2, 10], &default_eps(128), 128).map_err(|e| e.to_string())?;
    let got: Vec<u64> = r.rows.iter().map(|x| x.confirmed).collect();
    if got != [3, 63] {
        return Err(format!("N(2), N(10) = {got:?}"));
    }
    Ok("N(2) = 3, N(10) = 63".into())
}

fn determinism() -> Result<String, String> {
    let args = ["isrwb", "wp", "eval", "--tau", "1/3+5/4i:-1", "--z", "0.2+0.3i", "--format", "record"];
    let (a, b) = (cli::run(args), cli::run(args));
    if a != b || a.code != 0 {
        return Err(format!("runs differ or failed: {}", a.stderr));
    }
    Ok(format!("{} identical bytes", a.stdout.len()))
}
