use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use indexmap::IndexSet;

use super::{caps_for, region_successors, RegionError, RegionState};
use crate::model::{ClockSet, LocId, TimedAutomaton};
use crate::nfa::Nfa;
use crate::zone::BoundedZone;

/// Forward exploration of the capped region automaton from every initial
/// state `⟨start, 0, {0}, γ⟩`, independent of any target location.
///
/// States whose prophecy contains a clock that no edge reachable from their
/// location resets can never accept; they are not explored.
#[derive(Debug, Clone)]
pub struct RegionGraph {
    automaton: TimedAutomaton,
    start: LocId,
    states: Vec<RegionState>,
    /// Deduplicated, silent self-loops removed; letters are clock indices.
    nfa: Nfa,
    /// Initial state id per prophecy, in increasing prophecy order.
    initial: Vec<(u32, ClockSet)>,
}

impl RegionGraph {
    pub fn explore(ta: &TimedAutomaton, start: LocId) -> Result<Self, RegionError> {
        ta.check_location(start)?;
        let n = ta.num_clocks();
        let caps = caps_for(ta);
        let live = resettable_from(ta);
        let mut states: IndexSet<RegionState> = IndexSet::new();
        let mut initial = Vec::new();
        for gamma in ClockSet::all(n).subsets() {
            let (id, _) = states.insert_full(RegionState::initial(start, gamma, caps.clone()));
            initial.push((id as u32, gamma));
        }
        let mut transitions = Vec::new();
        let mut seen = HashSet::new();
        let mut next = 0;
        while next < states.len() {
            let id = next as u32;
            next += 1;
            let state = states[id as usize].clone();
            if !state.prophecy.is_subset(live[state.location.0]) {
                continue;
            }
            for (label, succ, _) in region_successors(ta, &state)? {
                if !succ.prophecy.is_subset(live[succ.location.0]) {
                    continue;
                }
                let to = states.insert_full(succ).0 as u32;
                if to == id && label.is_none() {
                    continue;
                }
                let label = label.map(|c| c.0 as u32);
                if seen.insert((id, label, to)) {
                    transitions.push((id, label, to));
                }
            }
        }
        let mut nfa = Nfa::new(states.len(), n);
        for (f, l, t) in transitions {
            nfa.add(f, l, t);
        }
        nfa.initial = initial.iter().map(|&(i, _)| i).collect();
        Ok(RegionGraph {
            automaton: ta.clone(),
            start,
            states: states.into_iter().collect(),
            nfa,
            initial,
        })
    }

    pub fn automaton(&self) -> &TimedAutomaton {
        &self.automaton
    }

    pub fn start(&self) -> LocId {
        self.start
    }

    pub fn states(&self) -> &[RegionState] {
        &self.states
    }

    pub fn num_transitions(&self) -> usize {
        self.nfa.transitions.len()
    }

    pub fn initial(&self) -> &[(u32, ClockSet)] {
        &self.initial
    }

    pub fn state_id(&self, s: &RegionState) -> Option<u32> {
        self.states.iter().position(|t| t == s).map(|i| i as u32)
    }

    /// Distinct zones among the explored states.
    pub fn distinct_zones(&self) -> HashSet<&BoundedZone> {
        self.states.iter().map(|s| &s.zone).collect()
    }

    /// The quotient automaton accepting at `⟨target, _, _, ∅⟩`.
    pub fn nfa_for(&self, target: LocId) -> Result<RegionNfa, RegionError> {
        self.automaton.check_location(target)?;
        let mut nfa = self.nfa.clone();
        for (q, s) in self.states.iter().enumerate() {
            nfa.accepting[q] = s.is_accepting_at(target);
        }
        Ok(RegionNfa {
            automaton: self.automaton.clone(),
            target,
            states: self.states.clone(),
            initial_prophecy: self.initial.iter().map(|&(_, g)| g).collect(),
            nfa,
        })
    }

    /// Per prophecy: states and transitions reachable from its initial state.
    pub fn stats_per_gamma(&self) -> Vec<GammaStats> {
        let out = self.nfa.out_lists();
        self.initial
            .iter()
            .map(|&(init, gamma)| {
                let mut seen = vec![false; self.states.len()];
                let mut queue = VecDeque::from([init]);
                seen[init as usize] = true;
                let mut transitions = 0;
                while let Some(q) = queue.pop_front() {
                    for &ti in &out[q as usize] {
                        transitions += 1;
                        let to = self.nfa.transitions[ti].to as usize;
                        if !seen[to] {
                            seen[to] = true;
                            queue.push_back(to as u32);
                        }
                    }
                }
                GammaStats {
                    prophecy: gamma,
                    states: seen.iter().filter(|&&b| b).count(),
                    transitions,
                }
            })
            .collect()
    }
}

/// Per location, the clocks reset by some edge reachable from it.
pub fn resettable_from(ta: &TimedAutomaton) -> Vec<ClockSet> {
    let mut sets = vec![ClockSet::EMPTY; ta.num_locations()];
    for e in ta.edges() {
        sets[e.source.0] = sets[e.source.0].union(e.resets);
    }
    let mut changed = true;
    while changed {
        changed = false;
        for e in ta.edges() {
            let merged = sets[e.source.0].union(sets[e.target.0]);
            if merged != sets[e.source.0] {
                sets[e.source.0] = merged;
                changed = true;
            }
        }
    }
    sets
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaStats {
    pub prophecy: ClockSet,
    pub states: usize,
    pub transitions: usize,
}

/// Finite quotient of the region automaton for one start and target location.
/// `nfa.initial[i]` is the initial state for prophecy `initial_prophecy[i]`.
#[derive(Debug, Clone)]
pub struct RegionNfa {
    pub automaton: TimedAutomaton,
    pub target: LocId,
    pub states: Vec<RegionState>,
    pub initial_prophecy: Vec<ClockSet>,
    pub nfa: Nfa,
}

/// Explores the quotient region automaton of `ta` from `start` and accepts at
/// `target` with an empty prophecy.
pub fn build_nfa(ta: &TimedAutomaton, start: LocId, target: LocId) -> Result<RegionNfa, RegionError> {
    RegionGraph::explore(ta, start)?.nfa_for(target)
}

/// Silent-transition-free version of `nfa` on the same states.
pub fn eliminate_epsilon(nfa: &RegionNfa) -> RegionNfa {
    RegionNfa {
        nfa: nfa.nfa.eliminate_epsilon(),
        ..nfa.clone()
    }
}

impl RegionNfa {
    pub fn initial_for(&self, prophecy: ClockSet) -> Option<u32> {
        self.initial_prophecy
            .iter()
            .position(|&g| g == prophecy)
            .map(|i| self.nfa.initial[i])
    }

    /// Restriction to useful states; initial states that cannot reach
    /// acceptance disappear together with their prophecy.
    pub fn trimmed(&self) -> RegionNfa {
        let (nfa, old) = self.nfa.trim();
        let alive: HashMap<u32, u32> = old.iter().enumerate().map(|(n, &o)| (o, n as u32)).collect();
        let mut initial = Vec::new();
        let mut initial_prophecy = Vec::new();
        for (i, &q) in self.nfa.initial.iter().enumerate() {
            if let Some(&n) = alive.get(&q) {
                initial.push(n);
                initial_prophecy.push(self.initial_prophecy[i]);
            }
        }
        RegionNfa {
            automaton: self.automaton.clone(),
            target: self.target,
            states: old.iter().map(|&o| self.states[o as usize].clone()).collect(),
            initial_prophecy,
            nfa: Nfa { initial, ..nfa },
        }
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.nfa.num_states as u32).filter(|&q| self.nfa.accepting[q as usize])
    }

    /// Graphviz rendering; silent transitions are drawn as `eps`.
    pub fn to_dot(&self) -> String {
        let ta = &self.automaton;
        let mut s = String::from("digraph quotient {\n  rankdir=LR;\n  node [shape=box];\n");
        for (q, st) in self.states.iter().enumerate() {
            let shape = if self.nfa.accepting[q] { ", peripheries=2" } else { "" };
            let label = st.describe(ta).replace('"', "\\\"");
            let _ = writeln!(s, "  s{q} [label=\"{label}\"{shape}];");
        }
        for (i, &q) in self.nfa.initial.iter().enumerate() {
            let _ = writeln!(s, "  init{i} [shape=point];\n  init{i} -> s{q};");
        }
        for t in &self.nfa.transitions {
            let label = match t.label {
                Some(c) => ta.clocks()[c as usize].clone(),
                None => "eps".into(),
            };
            let _ = writeln!(s, "  s{} -> s{} [label=\"{}\"];", t.from, t.to, label);
        }
        s.push_str("}\n");
        s
    }
}
