#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;

use kcfix::conditions::epsdelta::{epsgrid_oracle, uniform_epsdelta_holds};
use kcfix::conditions::{
    global_pairs_chatterjea, global_pairs_kannan, min_chatterjea_alpha, min_kannan_alpha, picard_pairs_chatterjea,
    picard_pairs_kannan, satisfies_cm, satisfies_cm2,
};
use kcfix::io::Instance;
use kcfix::metric::{metric_repair, random_space, validate_metric, FiniteMetricSpace, SelfMap};
use kcfix::orbit::{orbit, Terminal};
use kcfix::picard::{detect_fixed_points, solve_finite, verify_strict_decrease};
use kcfix::rational::{ratio, Rational};
use kcfix::sequences::{
    cond_i, cond_ii, cond_iii, cond_iv, cond_v, gap_conditions, seq_epsgrid_oracle, LemmaCondition, TestSequence,
    DEFAULT_TRUNCATION,
};
use kcfix::verifier::random_map;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance() -> impl Strategy<Value = (FiniteMetricSpace, SelfMap)> {
    (1usize..=6, 1u32..=8, any::<u64>()).prop_map(|(n, max, seed)| {
        let space = random_space(n, max, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        (space, random_map(n, &mut rng))
    })
}

fn sequence() -> impl Strategy<Value = TestSequence> {
    (0i64..3, 1i64..4, 1i64..4, 1i64..4, 2i64..6).prop_map(|(a, ad, c, cd, rd)| {
        TestSequence::closed_form(ratio(a, ad), ratio(c, cd), ratio(1, rd)).expect("valid parameters")
    })
}

#[test]
fn generated_spaces_are_metrics() {
    for seed in 0..1000u64 {
        let n = 1 + (seed % 7) as usize;
        let space = random_space(n, 9, seed);
        assert!(validate_metric(space.table()).unwrap().is_ok(), "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn repair_is_idempotent_and_never_increases(raw in prop::collection::vec(1i64..10, 15)) {
        let n = 6;
        let mut table = vec![vec![Rational::from_integer(0.into()); n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                table[i][j] = Rational::from_integer(raw[k].into());
                table[j][i] = table[i][j].clone();
                k += 1;
            }
        }
        let repaired = metric_repair(&table).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(repaired.d(i, j) <= &table[i][j]);
            }
        }
        prop_assert_eq!(metric_repair(repaired.table()).unwrap(), repaired);
    }

    #[test]
    fn orbits_follow_the_map_and_never_truncate((space, map) in instance()) {
        for x0 in 0..space.len() {
            let o = orbit(&map, x0, 2 * space.len());
            let truncated = matches!(o.terminal, Terminal::Truncated { .. });
            prop_assert!(!truncated);
            for w in o.points.windows(2) {
                prop_assert_eq!(w[1], map.apply(w[0]));
            }
        }
    }

    #[test]
    fn contraction_constants_imply_strict_conditions((space, map) in instance()) {
        if min_kannan_alpha(&space, &map).is_contraction() {
            prop_assert!(satisfies_cm(&space, &map).holds());
        }
        if min_chatterjea_alpha(&space, &map).is_contraction() {
            prop_assert!(satisfies_cm2(&space, &map).holds());
        }
    }

    #[test]
    fn reduction_agrees_with_oracle_on_instance_pairs((space, map) in instance()) {
        let mut sets = vec![global_pairs_kannan(&space, &map), global_pairs_chatterjea(&space, &map)];
        for x0 in 0..space.len() {
            sets.push(picard_pairs_kannan(&space, &map, x0));
            sets.push(picard_pairs_chatterjea(&space, &map, x0));
        }
        for set in &sets {
            prop_assert_eq!(uniform_epsdelta_holds(set).holds(), epsgrid_oracle(set).holds());
        }
    }

    #[test]
    fn global_conditions_imply_picard_conditions((space, map) in instance()) {
        let kannan = uniform_epsdelta_holds(&global_pairs_kannan(&space, &map)).holds();
        let chatterjea = uniform_epsdelta_holds(&global_pairs_chatterjea(&space, &map)).holds();
        for x0 in 0..space.len() {
            let pk = picard_pairs_kannan(&space, &map, x0);
            prop_assert!(pk.values_within(&global_pairs_kannan(&space, &map)));
            if kannan {
                prop_assert!(uniform_epsdelta_holds(&pk).holds());
            }
            if chatterjea {
                prop_assert!(uniform_epsdelta_holds(&picard_pairs_chatterjea(&space, &map, x0)).holds());
            }
        }
    }

    #[test]
    fn strict_conditions_force_an_attracting_fixed_point((space, map) in instance()) {
        let cm = satisfies_cm(&space, &map).holds();
        if cm || satisfies_cm2(&space, &map).holds() {
            prop_assert_eq!(detect_fixed_points(&map).len(), 1);
            for x0 in 0..space.len() {
                let run = solve_finite(&space, &map, x0, 10 * space.len()).unwrap();
                prop_assert!(run.converged());
                if cm {
                    prop_assert_eq!(verify_strict_decrease(&run.gaps), Ok(()));
                    prop_assert!(uniform_epsdelta_holds(&picard_pairs_kannan(&space, &map, x0)).holds());
                    prop_assert!(gap_conditions(&space, &map, x0).unwrap().all_hold());
                }
            }
        }
    }

    #[test]
    fn instances_round_trip_through_both_formats((space, map) in instance()) {
        let inst = Instance::new(space, Some(map));
        prop_assert_eq!(Instance::parse_text(&inst.to_text()).unwrap(), inst.clone());
        prop_assert_eq!(Instance::parse_json(&inst.to_json()).unwrap(), inst);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sequence_conditions_follow_the_limit(seq in sequence()) {
        let zero = cond_i(&seq);
        for k in [0, 1, 3] {
            prop_assert_eq!(cond_ii(&seq, k), Ok(zero));
        }
        for k in [1, 2] {
            prop_assert_eq!(cond_iii(&seq, k), Ok(zero));
        }
        prop_assert_eq!(cond_iv(&seq), Ok(zero));
        let v = cond_v(&seq).unwrap();
        prop_assert!(!v || cond_iv(&seq).unwrap());
        prop_assert!(!v);
        prop_assert!(seq.validate_prefix(64).is_ok());
        let oracle = seq_epsgrid_oracle(&seq, LemmaCondition::V, DEFAULT_TRUNCATION).unwrap();
        prop_assert!(!oracle.holds);
    }
}
