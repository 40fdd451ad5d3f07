//! Random automata and the differential test of `check_pair` against the
//! region-graph oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::oracle_reachable;
use crate::model::{
    concrete_successors, format_valuation, to_json, ClockId, ClockSet, ClockValuation, Configuration, Edge,
    Guard, GuardAtom, GuardRel, LocId, TimedAutomaton,
};
use crate::reach::check_pair;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub seed: u64,
    /// Number of automata to sample.
    pub automata: usize,
    pub max_locations: usize,
    pub max_clocks: usize,
    pub max_edges: usize,
    pub max_constant: u32,
    /// Query pairs per automaton; every second one is a witness walk.
    pub queries: usize,
    pub max_denominator: u32,
    /// Largest clock value in a query.
    pub max_value: u32,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0,
            automata: 500,
            max_locations: 3,
            max_clocks: 2,
            max_edges: 4,
            max_constant: 2,
            queries: 10,
            max_denominator: 3,
            max_value: 4,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("fuzz bound {0} must be at least 1")]
pub struct FuzzConfigError(pub &'static str);

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), FuzzConfigError> {
        let checks = [
            ("max_locations", self.max_locations as u64),
            ("max_clocks", self.max_clocks as u64),
            ("max_denominator", self.max_denominator as u64),
            ("max_value", self.max_value as u64),
        ];
        for (name, v) in checks {
            if v == 0 {
                return Err(FuzzConfigError(name));
            }
        }
        if self.max_clocks > crate::model::MAX_CLOCKS {
            return Err(FuzzConfigError("max_clocks (at most 31)"));
        }
        Ok(())
    }
}

fn clock_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        _ => format!("c{i}"),
    }
}

fn all_reachable(locations: usize, edges: &[Edge]) -> bool {
    let mut seen = vec![false; locations];
    seen[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for e in edges {
            if seen[e.source.0] && !seen[e.target.0] {
                seen[e.target.0] = true;
                changed = true;
            }
        }
    }
    seen.into_iter().all(|b| b)
}

fn generate(rng: &mut ChaCha8Rng, config: &FuzzConfig) -> TimedAutomaton {
    let clocks = rng.random_range(1..=config.max_clocks);
    let edges = rng.random_range(0..=config.max_edges);
    let locations = rng.random_range(1..=config.max_locations.min(edges + 1));
    loop {
        let mut list = Vec::with_capacity(edges);
        for _ in 0..edges {
            let atoms = (0..rng.random_range(0..=2))
                .map(|_| {
                    let rel = match rng.random_range(0..3) {
                        0 => GuardRel::Lt,
                        1 => GuardRel::Eq,
                        _ => GuardRel::Gt,
                    };
                    GuardAtom::new(
                        ClockId(rng.random_range(0..clocks)),
                        rel,
                        rng.random_range(0..=config.max_constant),
                    )
                })
                .collect();
            let mut resets = ClockSet::EMPTY;
            for c in 0..clocks {
                if rng.random_bool(0.5) {
                    resets.insert(ClockId(c));
                }
            }
            list.push(Edge {
                source: LocId(rng.random_range(0..locations)),
                guard: Guard::new(atoms),
                resets,
                target: LocId(rng.random_range(0..locations)),
            });
        }
        if all_reachable(locations, &list) {
            return TimedAutomaton::new(
                (0..locations).map(|l| format!("l{l}")).collect(),
                (0..clocks).map(clock_name).collect(),
                list,
            )
            .expect("generated automata are valid");
        }
    }
}

/// Deterministic function of `config.seed`; every location is reachable
/// from `l0` in the location graph.
pub fn random_automaton(config: &FuzzConfig) -> TimedAutomaton {
    generate(&mut ChaCha8Rng::seed_from_u64(config.seed), config)
}

/// A reachability query between two configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub start: LocId,
    pub target: LocId,
    pub source: ClockValuation<Rational>,
    pub goal: ClockValuation<Rational>,
    /// Produced by a concrete walk, so it must be reachable.
    pub witness: bool,
}

impl Query {
    pub fn to_json(&self, ta: &TimedAutomaton) -> serde_json::Value {
        serde_json::json!({
            "from": ta.location_name(self.start),
            "to": ta.location_name(self.target),
            "source": format_valuation(ta, &self.source),
            "target": format_valuation(ta, &self.goal),
            "witness": self.witness,
        })
    }
}

fn random_value(rng: &mut ChaCha8Rng, config: &FuzzConfig) -> Rational {
    let den = rng.random_range(1..=config.max_denominator) as i64;
    Rational::new(rng.random_range(0..=config.max_value as i64 * den), den)
}

fn random_valuation(rng: &mut ChaCha8Rng, n: usize, config: &FuzzConfig) -> ClockValuation<Rational> {
    ClockValuation::new((0..n).map(|_| random_value(rng, config)).collect()).expect("non-negative values")
}

const WALK_STEPS: usize = 8;

fn sample_query(rng: &mut ChaCha8Rng, ta: &TimedAutomaton, config: &FuzzConfig, witness: bool) -> Query {
    let n = ta.num_clocks();
    let start = LocId(rng.random_range(0..ta.num_locations()));
    let source = random_valuation(rng, n, config);
    if !witness {
        return Query {
            start,
            target: LocId(rng.random_range(0..ta.num_locations())),
            source,
            goal: random_valuation(rng, n, config),
            witness,
        };
    }
    let limit = Rational::from_integer(config.max_value as i64);
    let mut cur = Configuration::new(start, source.clone());
    for _ in 0..rng.random_range(0..=WALK_STEPS) {
        let granularity = rng.random_range(1..=config.max_denominator);
        let next: Vec<_> = concrete_successors(ta, &cur, &Rational::from_integer(1), granularity)
            .into_iter()
            .filter(|(_, c)| c.valuation.values().iter().all(|v| *v <= limit))
            .collect();
        if next.is_empty() {
            break;
        }
        cur = next[rng.random_range(0..next.len())].1.clone();
    }
    Query {
        start,
        target: cur.location,
        source,
        goal: cur.valuation,
        witness,
    }
}

/// Result of a query on both sides; `Err` carries an error message.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Outcome {
    main: Result<bool, String>,
    oracle: Result<bool, String>,
}

impl Outcome {
    fn of(ta: &TimedAutomaton, q: &Query) -> Self {
        Outcome {
            main: check_pair(ta, q.start, q.target, &q.source, &q.goal).map_err(|e| e.to_string()),
            oracle: oracle_reachable(
                ta,
                &Configuration::new(q.start, q.source.clone()),
                &Configuration::new(q.target, q.goal.clone()),
            )
            .map_err(|e| e.to_string()),
        }
    }

    fn kind(&self, witness: bool) -> Option<MismatchKind> {
        match (&self.main, &self.oracle) {
            (Ok(a), Ok(b)) if a != b => Some(MismatchKind::Disagreement),
            (Ok(a), Ok(_)) if witness && !a => Some(MismatchKind::WitnessRejected),
            (Ok(_), Ok(_)) => None,
            _ => Some(MismatchKind::Error),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchKind {
    Disagreement,
    WitnessRejected,
    Error,
}

/// A failing query with the automaton shrunk while the failure persists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub seed: u64,
    pub kind: MismatchKind,
    pub automaton: serde_json::Value,
    pub original_edges: usize,
    pub query: serde_json::Value,
    pub main_result: Option<bool>,
    pub oracle_result: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub automata: usize,
    pub queries: usize,
    pub witness_queries: usize,
    pub reachable: usize,
    pub mismatches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub mismatches: Vec<Mismatch>,
    pub summary: Summary,
}

impl FuzzReport {
    /// One JSON object per mismatch, then `{"summary": …}`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for m in &self.mismatches {
            out.push_str(&serde_json::to_string(m).expect("reports serialize"));
            out.push('\n');
        }
        let summary = serde_json::json!({ "summary": self.summary });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

/// Removes edges, then lowers guard constants, as long as the query still
/// fails the same way.
fn shrink(ta: &TimedAutomaton, q: &Query, kind: MismatchKind) -> TimedAutomaton {
    let fails = |a: &TimedAutomaton| Outcome::of(a, q).kind(q.witness) == Some(kind);
    let mut cur = ta.clone();
    let mut i = 0;
    while i < cur.edges().len() {
        let smaller = cur.without_edge(i);
        if fails(&smaller) {
            cur = smaller;
        } else {
            i += 1;
        }
    }
    let mut progress = true;
    while progress {
        progress = false;
        for e in 0..cur.edges().len() {
            for a in 0..cur.edges()[e].guard.atoms.len() {
                if cur.edges()[e].guard.atoms[a].constant == 0 {
                    continue;
                }
                let mut edges = cur.edges().to_vec();
                edges[e].guard.atoms[a].constant -= 1;
                let smaller = cur.with_edges(edges);
                if fails(&smaller) {
                    cur = smaller;
                    progress = true;
                }
            }
        }
    }
    cur
}

struct Case {
    mismatches: Vec<Mismatch>,
    queries: usize,
    witness_queries: usize,
    reachable: usize,
}

fn run_case(seed: u64, config: &FuzzConfig) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ta = generate(&mut rng, config);
    let mut case = Case {
        mismatches: Vec::new(),
        queries: 0,
        witness_queries: 0,
        reachable: 0,
    };
    for i in 0..config.queries {
        let q = sample_query(&mut rng, &ta, config, i % 2 == 1);
        let outcome = Outcome::of(&ta, &q);
        case.queries += 1;
        case.witness_queries += q.witness as usize;
        case.reachable += (outcome.oracle == Ok(true)) as usize;
        let Some(kind) = outcome.kind(q.witness) else {
            continue;
        };
        let small = if kind == MismatchKind::Error { ta.clone() } else { shrink(&ta, &q, kind) };
        let shown = Outcome::of(&small, &q);
        let error = [&shown.main, &shown.oracle].into_iter().find_map(|r| r.clone().err());
        case.mismatches.push(Mismatch {
            seed,
            kind,
            automaton: serde_json::from_str(&to_json(&small)).expect("automaton JSON"),
            original_edges: ta.edges().len(),
            query: q.to_json(&small),
            main_result: shown.main.ok(),
            oracle_result: shown.oracle.ok(),
            error,
        });
    }
    case
}

/// Samples `config.automata` automata with their queries and compares
/// `check_pair` with the oracle. Automata are evaluated in parallel; the
/// report only depends on the configuration.
pub fn differential_test(config: &FuzzConfig) -> Result<FuzzReport, FuzzConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let seeds: Vec<u64> = (0..config.automata).map(|_| rng.random()).collect();
    let cases: Vec<Case> = seeds.par_iter().map(|&s| run_case(s, config)).collect();
    let mut summary = Summary {
        seed: config.seed,
        automata: config.automata,
        ..Summary::default()
    };
    let mut mismatches = Vec::new();
    for c in cases {
        summary.queries += c.queries;
        summary.witness_queries += c.witness_queries;
        summary.reachable += c.reachable;
        mismatches.extend(c.mismatches);
    }
    summary.mismatches = mismatches.len();
    Ok(FuzzReport { mismatches, summary })
}

/// Seed of the `index`-th automaton of a run with `config`.
pub fn automaton_seed(config: &FuzzConfig, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..index).for_each(|_| {
        rng.random::<u64>();
    });
    rng.random()
}
