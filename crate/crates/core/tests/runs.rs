mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::random_run;
use tareach::model::ClockId;
use tareach::oracle::{random_automaton, FuzzConfig};
use tareach::region::{abstract_run, caps_for, concretize_run};
use tareach::zone::zone_member;
use tareach::Rational;

#[test]
fn visible_letters_count_final_integer_parts() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for seed in 1..=200 {
        let ta = random_automaton(&FuzzConfig { seed, ..FuzzConfig::default() });
        let steps = rng.random_range(0..=8);
        let run = random_run(&mut rng, &ta, steps, 3);
        let gamma = run.reset_clocks(&ta);
        let end = run.final_configuration(&ta).unwrap();
        let word = abstract_run(&ta, &run, gamma).unwrap().word(&ta).unwrap();
        for c in 0..ta.num_clocks() {
            let letters = word.iter().filter(|&&w| w == ClockId(c)).count() as i64;
            let expected = end.valuation.values()[c].floor().to_integer();
            assert_eq!(letters, expected, "seed {seed} clock {c}: {:?}", run.steps);
        }
    }
}

#[test]
fn concretizing_an_abstraction_returns_to_the_same_configuration() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for seed in 1..=200 {
        let ta = random_automaton(&FuzzConfig { seed, ..FuzzConfig::default() });
        let steps = rng.random_range(0..=8);
        let run = random_run(&mut rng, &ta, steps, 4);
        let end = run.final_configuration(&ta).unwrap();
        let region = abstract_run(&ta, &run, run.reset_clocks(&ta)).unwrap();
        let fraction: Vec<Rational> = end.valuation.values().iter().map(|v| v.fract()).collect();
        assert!(zone_member(&region.last().zone, &fraction));
        let back = concretize_run(&ta, &region, &fraction).unwrap();
        assert_eq!(back.final_configuration(&ta).unwrap(), end, "seed {seed}");
        let capped = region.recapped(caps_for(&ta));
        assert_eq!(capped.word(&ta).unwrap(), region.word(&ta).unwrap());
    }
}
