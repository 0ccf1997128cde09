mod common;

use common::*;
use isr_workbench::predim::{
    chain_decompose, check_semimodularity, is_strong, predim_dim, strong_hull, supersets, Configuration, FunctionSlot,
    GroupPoint, SlotKind, StepTag,
};
use isr_workbench::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

const ALL_SLOTS: u64 = 0b111;

fn config(seed: u64, relations: bool) -> (Configuration, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=7);
    let cfg = if relations { random_with_relations(&mut rng, n.max(3)) } else { random_relation_free(&mut rng, n) };
    (cfg, rng)
}

fn check_delta_everywhere(cfg: &Configuration, rng: &mut ChaCha8Rng) {
    let all = cfg.all();
    for _ in 0..40 {
        let b = rng.gen_range(0..=all);
        let a = rng.gen_range(0..=all);
        let slots = rng.gen_range(0..=ALL_SLOTS);
        assert_eq!(cfg.td(b, a) as i64, oracle_td(cfg, b, a), "td({b:b}/{a:b})");
        for i in 0..3 {
            assert_eq!(cfg.grk(i, b, a) as i64, oracle_grk(cfg, i, b, a), "grk_{i}({b:b}/{a:b})");
        }
        assert_eq!(cfg.delta_value(slots, b, a), oracle_delta(cfg, slots, b, a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn td_grk_delta_match_oracle(seed in any::<u64>(), relations in any::<bool>()) {
        let (cfg, mut rng) = config(seed, relations);
        check_delta_everywhere(&cfg, &mut rng);
    }

    #[test]
    fn strongness_matches_min_delta(seed in any::<u64>(), relations in any::<bool>()) {
        let (cfg, mut rng) = config(seed, relations);
        let a = rng.gen_range(0..=cfg.all());
        let slots = rng.gen_range(0..=ALL_SLOTS);
        let got = is_strong(&cfg, a, slots).unwrap();
        prop_assert_eq!(got.strong, oracle_strong(&cfg, a, slots));
        if let Some(w) = got.violation {
            prop_assert!(oracle_delta(&cfg, slots, w, a) < 0);
            prop_assert_eq!(w & a, a);
        }
    }

    #[test]
    fn dim_matches_exhaustive_minimum(seed in any::<u64>(), relations in any::<bool>()) {
        let (cfg, mut rng) = config(seed, relations);
        let slots = rng.gen_range(0..=ALL_SLOTS);
        let a = rng.gen_range(0..=cfg.all());
        let c = strong_hull(&cfg, rng.gen_range(0..=cfg.all()) & rng.gen_range(0..=cfg.all()), slots).unwrap();
        let got = predim_dim(&cfg, a, c, slots).unwrap();
        let (dim, witness) = oracle_dim(&cfg, a, c, slots);
        prop_assert_eq!(got.dim, dim);
        prop_assert_eq!(got.witness, witness);
    }

    #[test]
    fn hull_is_smallest_strong_superset(seed in any::<u64>(), relations in any::<bool>()) {
        let (cfg, mut rng) = config(seed, relations);
        let slots = rng.gen_range(0..=ALL_SLOTS);
        let a = rng.gen_range(0..=cfg.all());
        let h = strong_hull(&cfg, a, slots).unwrap();
        prop_assert_eq!(h & a, a);
        prop_assert!(oracle_strong(&cfg, h, slots));
        prop_assert_eq!(strong_hull(&cfg, h, slots).unwrap(), h);
        let meet = supersets(a, cfg.all())
            .into_iter()
            .filter(|&s| oracle_strong(&cfg, s, slots))
            .fold(cfg.all(), |acc, s| acc & s);
        prop_assert_eq!(h, meet);
        // monotone in the argument
        let bigger = a | rng.gen_range(0..=cfg.all());
        let hb = strong_hull(&cfg, bigger, slots).unwrap();
        prop_assert_eq!(h & hb, h);
    }

    #[test]
    fn chain_steps_add_up(seed in any::<u64>(), relations in any::<bool>()) {
        let (cfg, mut rng) = config(seed, relations);
        let slots = rng.gen_range(0..=ALL_SLOTS);
        let a = strong_hull(&cfg, rng.gen_range(0..=cfg.all()), slots).unwrap();
        let b = a | rng.gen_range(0..=cfg.all());
        if !oracle_strong_in(&cfg, a, b, slots) {
            prop_assert!(matches!(chain_decompose(&cfg, a, b, slots), Err(Error::NotStrong(_))));
            return Ok(());
        }
        let chain = chain_decompose(&cfg, a, b, slots).unwrap();
        prop_assert_eq!(chain.end(), b);
        let mut prev = a;
        for step in &chain.steps {
            prop_assert_eq!(step.subset & prev, prev);
            prop_assert_ne!(step.subset, prev);
            let d = oracle_delta(&cfg, slots, step.subset, prev);
            prop_assert_eq!(step.delta, d);
            match step.tag {
                StepTag::DeltaZero => prop_assert_eq!(d, 0),
                StepTag::GenericSingleton => {
                    prop_assert_eq!((step.subset & !prev).count_ones(), 1);
                    prop_assert_eq!(oracle_td(&cfg, step.subset, prev), 1);
                    prop_assert_eq!(d, 1);
                }
            }
            prev = step.subset;
        }
        prop_assert_eq!(chain.total_delta(), oracle_delta(&cfg, slots, b, a));
    }

    #[test]
    fn semimodularity_holds_with_relations(seed in any::<u64>()) {
        let (cfg, mut rng) = config(seed, true);
        let all = cfg.all();
        for _ in 0..30 {
            let c = rng.gen_range(0..=all) & rng.gen_range(0..=all);
            let a = c | rng.gen_range(0..=all);
            let b = c | rng.gen_range(0..=all);
            let r = check_semimodularity(&cfg, a, b, c, rng.gen_range(0..=ALL_SLOTS)).unwrap();
            prop_assert!(r.all_hold(), "{:?}", r);
        }
    }
}

fn two_point_config() -> Configuration {
    // (b, e) and (b', e') on exp with e = b + 1 pattern: td 1 for the whole set
    let one = || Rational::from(1);
    Configuration::new(
        vec!["b".into(), "e".into()],
        vec![vec![one(), one()]],
        vec![FunctionSlot { index: 0, kind: SlotKind::Exp }],
        vec![GroupPoint { slot: 0, b: 0, e: 1 }, GroupPoint { slot: 0, b: 1, e: 0 }],
        vec![],
        0,
    )
}

#[test]
fn two_points_on_one_algebraic_line() {
    let cfg = two_point_config();
    assert_eq!(cfg.delta_value(1, 0b11, 0), 1 - 2);
    assert_eq!(oracle_delta(&cfg, 1, 0b11, 0), -1);
    let s = is_strong(&cfg, 0, 1).unwrap();
    assert!(!s.strong);
    assert_eq!(s.violation, Some(0b11));
    assert_eq!(strong_hull(&cfg, 0, 1).unwrap(), 0b11);
    assert!(matches!(predim_dim(&cfg, 0b01, 0, 1), Err(Error::BaseNotStrong(_))));
    assert_eq!(predim_dim(&cfg, 0b01, 0b11, 1).unwrap().dim, 0);
}

#[test]
fn oversized_configuration_is_rejected() {
    let n = 21;
    let cfg = Configuration::new(
        (0..n).map(|i| format!("x{i}")).collect(),
        Configuration::free_matroid(n),
        vec![FunctionSlot { index: 0, kind: SlotKind::Exp }],
        vec![],
        vec![],
        0,
    );
    assert!(matches!(is_strong(&cfg, 0, 1), Err(Error::GroundSetTooLarge { .. })));
}

#[test]
fn relation_generator_produces_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let cfg = random_with_relations(&mut rng, 6);
        assert!(!cfg.relations.is_empty());
    }
}
