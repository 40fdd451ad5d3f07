mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{guard_holds, random_value};
use tareach::model::{
    eval_guard, format_valuation, parse_automaton, parse_valuation, to_json, ClockValuation, Edge, LocId,
};
use tareach::oracle::{random_automaton, FuzzConfig};
use tareach::{BigRational, Rational};

fn automaton(seed: u64) -> tareach::model::TimedAutomaton {
    random_automaton(&FuzzConfig {
        seed,
        max_clocks: 3,
        max_constant: 4,
        ..FuzzConfig::default()
    })
}

fn valuation(seed: u64, n: usize) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_value(&mut rng, 4, 5)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let ta = automaton(seed);
        let back = parse_automaton(&to_json(&ta)).unwrap();
        prop_assert_eq!(back.c_max(), ta.c_max());
        prop_assert_eq!(back, ta);
    }

    #[test]
    fn valuations_round_trip(seed in any::<u64>(), vs in any::<u64>()) {
        let ta = automaton(seed);
        let v = ClockValuation::new(valuation(vs, ta.num_clocks())).unwrap();
        let (back, missing) = parse_valuation(&ta, &format_valuation(&ta, &v)).unwrap();
        prop_assert!(missing.is_empty());
        prop_assert_eq!(back, v);
    }

    #[test]
    fn guards_agree_with_direct_comparison(seed in any::<u64>(), vs in any::<u64>()) {
        let ta = automaton(seed);
        let v = valuation(vs, ta.num_clocks());
        for e in ta.edges() {
            let cv = ClockValuation::new(v.clone()).unwrap();
            prop_assert_eq!(eval_guard(&e.guard, &cv), guard_holds(&e.guard, &v));
            let big: Vec<BigRational> = v
                .iter()
                .map(|x| BigRational::new((*x.numer()).into(), (*x.denom()).into()))
                .collect();
            prop_assert_eq!(eval_guard(&e.guard, &ClockValuation::new(big).unwrap()), guard_holds(&e.guard, &v));
        }
    }

    #[test]
    fn scaling_commutes_with_guards(seed in any::<u64>(), vs in any::<u64>(), k in 1u32..=6) {
        let ta = automaton(seed);
        let v = valuation(vs, ta.num_clocks());
        let scaled_v: Vec<Rational> = v.iter().map(|x| x * Rational::from_integer(k as i64)).collect();
        let scaled = ta.scaled(k);
        prop_assert_eq!(scaled.c_max(), ta.c_max() * k);
        for (e, s) in ta.edges().iter().zip(scaled.edges()) {
            prop_assert_eq!(guard_holds(&e.guard, &v), guard_holds(&s.guard, &scaled_v));
        }
    }

    #[test]
    fn c_max_is_the_largest_guard_constant(seed in any::<u64>(), other in any::<u64>()) {
        let mut ta = automaton(seed);
        let largest = ta.edges().iter().flat_map(|e| e.guard.atoms.iter().map(|a| a.constant)).max().unwrap_or(0);
        prop_assert_eq!(ta.c_max(), largest);
        let before = ta.c_max();
        let donor = automaton(other);
        for e in donor.edges() {
            if e.guard.atoms.iter().all(|a| a.clock.0 < ta.num_clocks()) {
                let edge = Edge { source: LocId(0), target: LocId(0), ..e.clone() };
                if e.resets.iter().all(|c| c.0 < ta.num_clocks()) {
                    ta.add_edge(edge).unwrap();
                    prop_assert!(ta.c_max() >= before);
                }
            }
        }
    }
}
