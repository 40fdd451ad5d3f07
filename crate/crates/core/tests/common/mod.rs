//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tareach::model::{
    concrete_successors, ClockId, ClockSet, ClockValuation, ConcreteLabel, Configuration, Edge, Guard, GuardAtom,
    GuardRel, LocId, TimedAutomaton,
};
use tareach::nfa::Nfa;
use tareach::region::ConcreteRun;
use tareach::zone::RawDbm;
use tareach::Rational;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn val(v: &[(i64, i64)]) -> ClockValuation<Rational> {
    ClockValuation::from_fracs(v).unwrap()
}

/// Two clocks, `l0 -(x = 1, reset x)-> l1`.
pub fn worked_example() -> TimedAutomaton {
    TimedAutomaton::new(
        vec!["l0".into(), "l1".into()],
        vec!["x".into(), "y".into()],
        vec![Edge {
            source: LocId(0),
            guard: Guard::new(vec![GuardAtom::new(ClockId(0), GuardRel::Eq, 1)]),
            resets: ClockSet::singleton(ClockId(0)),
            target: LocId(1),
        }],
    )
    .unwrap()
}

pub fn random_value(rng: &mut ChaCha8Rng, max_den: i64, max_value: i64) -> Rational {
    let d = rng.random_range(1..=max_den);
    r(rng.random_range(0..=max_value * d), d)
}

/// Random run from `⟨l0, 0⟩` alternating delays (multiples of `1/den`) and
/// enabled edges.
pub fn random_run(rng: &mut ChaCha8Rng, ta: &TimedAutomaton, steps: usize, den: i64) -> ConcreteRun<Rational> {
    let start = Configuration::initial(LocId(0), ta.num_clocks());
    let mut cur = start.clone();
    let mut out = Vec::new();
    for _ in 0..steps {
        let moves = concrete_successors(ta, &cur, &Rational::from_integer(2), den as u32);
        let (edges, delays): (Vec<_>, Vec<_>) = moves
            .into_iter()
            .partition(|(l, _)| matches!(l, ConcreteLabel::Edge(_)));
        let pick = if !edges.is_empty() && rng.random_bool(0.6) {
            edges[rng.random_range(0..edges.len())].clone()
        } else {
            delays[rng.random_range(1..delays.len())].clone()
        };
        out.push(pick.0);
        cur = pick.1;
    }
    ConcreteRun { start, steps: out }
}

/// Letter-count vectors of all words of length at most `max_len` accepted
/// from `initial`, by explicit enumeration of the subset construction.
pub fn enumerate_parikh(nfa: &Nfa, initial: u32, max_len: usize) -> HashSet<Vec<u64>> {
    assert!(nfa.is_epsilon_free());
    let mut found = HashSet::new();
    let mut frontier: Vec<(HashSet<u32>, Vec<u64>)> = vec![([initial].into(), vec![0; nfa.alphabet])];
    for len in 0..=max_len {
        let mut next = Vec::new();
        for (set, counts) in &frontier {
            if set.iter().any(|&q| nfa.accepting[q as usize]) {
                found.insert(counts.clone());
            }
            if len == max_len {
                continue;
            }
            for a in 0..nfa.alphabet as u32 {
                let succ: HashSet<u32> = nfa
                    .transitions
                    .iter()
                    .filter(|t| t.label == Some(a) && set.contains(&t.from))
                    .map(|t| t.to)
                    .collect();
                if !succ.is_empty() {
                    let mut c = counts.clone();
                    c[a as usize] += 1;
                    next.push((succ, c));
                }
            }
        }
        frontier = next;
    }
    found
}

/// Random NFA without silent transitions.
pub fn random_nfa(rng: &mut ChaCha8Rng, states: usize, alphabet: usize, transitions: usize) -> Nfa {
    let mut nfa = Nfa::new(states, alphabet);
    for _ in 0..transitions {
        let from = rng.random_range(0..states as u32);
        let to = rng.random_range(0..states as u32);
        nfa.add(from, Some(rng.random_range(0..alphabet as u32)), to);
    }
    for q in 0..states {
        nfa.accepting[q] = rng.random_bool(0.3);
    }
    nfa.initial = vec![0];
    nfa
}

/// A difference constraint `p_i - p_j ≺ c` over `p_0 = 0, p_1..p_n`.
#[derive(Debug, Clone, Copy)]
pub struct Diff {
    pub i: usize,
    pub j: usize,
    pub c: i8,
    pub strict: bool,
}

/// Set of points given by explicit constraints, always inside `[0,1]^n`.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub n: usize,
    pub diffs: Vec<Diff>,
}

impl ConstraintSet {
    pub fn random(rng: &mut ChaCha8Rng, n: usize) -> Self {
        let mut diffs = Vec::new();
        for _ in 0..rng.random_range(0..=n + 2) {
            let i = rng.random_range(0..=n);
            let mut j = rng.random_range(0..=n);
            if j == i {
                j = (i + 1) % (n + 1);
            }
            diffs.push(Diff {
                i,
                j,
                c: rng.random_range(-1..=1),
                strict: rng.random_bool(0.5),
            });
        }
        ConstraintSet { n, diffs }
    }

    pub fn to_raw(&self) -> RawDbm {
        let mut raw = RawDbm::unconstrained(self.n);
        for d in &self.diffs {
            let b = if d.strict {
                tareach::zone::Bound::strict(d.c)
            } else {
                tareach::zone::Bound::weak(d.c)
            };
            raw.constrain(d.i, d.j, b);
        }
        raw
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        if p.iter().any(|v| *v < zero || *v > one) {
            return false;
        }
        let coord = |i: usize| if i == 0 { zero } else { p[i - 1] };
        self.diffs.iter().all(|d| {
            let v = coord(d.i) - coord(d.j);
            let c = Rational::from_integer(d.c as i64);
            if d.strict {
                v < c
            } else {
                v <= c
            }
        })
    }
}

/// All points of `[0,1]^n` with coordinates in `(1/den)ℤ`.
pub fn grid(n: usize, den: i64) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=den).map(move |k| {
                    let mut q = p.clone();
                    q.push(r(k, den));
                    q
                })
            })
            .collect();
    }
    out
}

/// Truth of a guard at a concrete valuation.
pub fn guard_holds(g: &Guard, v: &[Rational]) -> bool {
    g.atoms.iter().all(|a| {
        let x = v[a.clock.0];
        let k = Rational::from_integer(a.constant as i64);
        match a.rel {
            GuardRel::Lt => x < k,
            GuardRel::Eq => x == k,
            GuardRel::Gt => x > k,
        }
    })
}
