//! Timed automata: clocks, guards, edges and the automaton itself.

mod input;
mod semantics;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use input::{format_valuation, parse_automaton, parse_valuation, to_json};
pub use semantics::{
    apply_reset, concrete_successors, delay, eval_guard, ClockValuation, Configuration,
    ConcreteLabel,
};

/// Largest number of clocks an input automaton may declare. The memorised
/// automaton doubles this and adds one, and clock sets are 64-bit masks.
pub const MAX_CLOCKS: usize = 31;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown clock \"{0}\"")]
    UnknownClock(String),
    #[error("unknown location \"{0}\"")]
    UnknownLocation(String),
    #[error("duplicate clock name \"{0}\"")]
    DuplicateClock(String),
    #[error("duplicate location name \"{0}\"")]
    DuplicateLocation(String),
    #[error("negative guard constant {0}")]
    NegativeConstant(i64),
    #[error("guard constant {0} is too large")]
    ConstantTooLarge(i64),
    #[error("unknown guard operator \"{0}\"")]
    UnknownOperator(String),
    #[error("too many clocks ({0}, at most {MAX_CLOCKS} supported)")]
    TooManyClocks(usize),
    #[error("automaton has no locations")]
    NoLocations,
    #[error("clock index {0} out of range")]
    ClockOutOfRange(usize),
    #[error("location index {0} out of range")]
    LocationOutOfRange(usize),
    #[error("negative delay")]
    NegativeDelay,
    #[error("negative clock value")]
    NegativeValue,
    #[error("invalid clock value \"{0}\"")]
    InvalidValue(String),
    #[error("clock \"{0}\" is assigned twice")]
    DuplicateAssignment(String),
    #[error("valuation has {found} clocks, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Dense 0-based index of a clock within its automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClockId(pub usize);

impl ClockId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Dense 0-based index of a location within its automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocId(pub usize);

impl LocId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A set of clocks as a bit mask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockSet(pub u64);

impl ClockSet {
    pub const EMPTY: ClockSet = ClockSet(0);

    pub fn all(n: usize) -> ClockSet {
        if n >= 64 {
            ClockSet(u64::MAX)
        } else {
            ClockSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(c: ClockId) -> ClockSet {
        ClockSet(1 << c.0)
    }

    pub fn contains(self, c: ClockId) -> bool {
        self.0 >> c.0 & 1 == 1
    }

    pub fn insert(&mut self, c: ClockId) {
        self.0 |= 1 << c.0;
    }

    pub fn remove(&mut self, c: ClockId) {
        self.0 &= !(1 << c.0);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: ClockSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: ClockSet) -> ClockSet {
        ClockSet(self.0 | other.0)
    }

    pub fn difference(self, other: ClockSet) -> ClockSet {
        ClockSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = ClockId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(ClockId(i))
        })
    }

    /// All subsets of `self`, in increasing order of their bit patterns.
    pub fn subsets(self) -> impl Iterator<Item = ClockSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(ClockSet(cur))
        })
    }
}

impl FromIterator<ClockId> for ClockSet {
    fn from_iter<I: IntoIterator<Item = ClockId>>(iter: I) -> Self {
        let mut s = ClockSet::EMPTY;
        for c in iter {
            s.insert(c);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GuardRel {
    Lt,
    Eq,
    Gt,
}

impl GuardRel {
    pub fn symbol(self) -> &'static str {
        match self {
            GuardRel::Lt => "<",
            GuardRel::Eq => "=",
            GuardRel::Gt => ">",
        }
    }
}

/// `clock rel constant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GuardAtom {
    pub clock: ClockId,
    pub rel: GuardRel,
    pub constant: u32,
}

impl GuardAtom {
    pub fn new(clock: ClockId, rel: GuardRel, constant: u32) -> Self {
        GuardAtom {
            clock,
            rel,
            constant,
        }
    }
}

/// Conjunction of atoms; the empty conjunction is `true`.
#[derive(Debug, Clone, Default)]
pub struct Guard {
    pub atoms: Vec<GuardAtom>,
}

impl Guard {
    pub fn tt() -> Self {
        Guard::default()
    }

    pub fn new(atoms: Vec<GuardAtom>) -> Self {
        Guard { atoms }
    }

    pub fn and(&self, other: &Guard) -> Guard {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Guard { atoms }
    }

    pub fn max_constant(&self) -> u32 {
        self.atoms.iter().map(|a| a.constant).max().unwrap_or(0)
    }

    fn sorted_atoms(&self) -> Vec<GuardAtom> {
        let mut v = self.atoms.clone();
        v.sort();
        v.dedup();
        v
    }
}

impl PartialEq for Guard {
    fn eq(&self, other: &Self) -> bool {
        self.sorted_atoms() == other.sorted_atoms()
    }
}

impl Eq for Guard {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: LocId,
    pub guard: Guard,
    pub resets: ClockSet,
    pub target: LocId,
}

/// A timed automaton `⟨L, X, E⟩` with names for its locations and clocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedAutomaton {
    locations: Vec<String>,
    clocks: Vec<String>,
    edges: Vec<Edge>,
    c_max: u32,
}

impl TimedAutomaton {
    /// Builds and validates an automaton from already-interned parts.
    pub fn new(
        locations: Vec<String>,
        clocks: Vec<String>,
        edges: Vec<Edge>,
    ) -> Result<Self, ModelError> {
        if locations.is_empty() {
            return Err(ModelError::NoLocations);
        }
        if clocks.len() > MAX_CLOCKS {
            return Err(ModelError::TooManyClocks(clocks.len()));
        }
        check_unique(&locations).map_err(ModelError::DuplicateLocation)?;
        check_unique(&clocks).map_err(ModelError::DuplicateClock)?;
        let mut ta = TimedAutomaton {
            locations,
            clocks,
            edges: Vec::new(),
            c_max: 0,
        };
        for e in edges {
            ta.add_edge(e)?;
        }
        Ok(ta)
    }

    /// Builds an automaton without the clock-count limit. Used for derived
    /// automata whose clocks are not user input.
    pub(crate) fn new_unchecked(locations: Vec<String>, clocks: Vec<String>, edges: Vec<Edge>) -> Self {
        let c_max = edges.iter().map(|e| e.guard.max_constant()).max().unwrap_or(0);
        TimedAutomaton {
            locations,
            clocks,
            edges,
            c_max,
        }
    }

    pub fn add_edge(&mut self, edge: Edge) -> Result<(), ModelError> {
        for l in [edge.source, edge.target] {
            if l.0 >= self.locations.len() {
                return Err(ModelError::LocationOutOfRange(l.0));
            }
        }
        if !edge.resets.is_subset(ClockSet::all(self.clocks.len())) {
            let bad = edge
                .resets
                .iter()
                .find(|c| c.0 >= self.clocks.len())
                .map(|c| c.0)
                .unwrap_or(0);
            return Err(ModelError::ClockOutOfRange(bad));
        }
        for a in &edge.guard.atoms {
            if a.clock.0 >= self.clocks.len() {
                return Err(ModelError::ClockOutOfRange(a.clock.0));
            }
        }
        self.c_max = self.c_max.max(edge.guard.max_constant());
        self.edges.push(edge);
        Ok(())
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn clocks(&self) -> &[String] {
        &self.clocks
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_clocks(&self) -> usize {
        self.clocks.len()
    }

    pub fn num_locations(&self) -> usize {
        self.locations.len()
    }

    /// Largest constant in any guard, 0 if there are none.
    pub fn c_max(&self) -> u32 {
        self.c_max
    }

    /// Largest constant compared with `clock`, `None` if no guard mentions it.
    pub fn clock_max_constant(&self, clock: ClockId) -> Option<u32> {
        self.edges
            .iter()
            .flat_map(|e| &e.guard.atoms)
            .filter(|a| a.clock == clock)
            .map(|a| a.constant)
            .max()
    }

    pub fn location(&self, name: &str) -> Result<LocId, ModelError> {
        self.locations
            .iter()
            .position(|l| l == name)
            .map(LocId)
            .ok_or_else(|| ModelError::UnknownLocation(name.to_string()))
    }

    pub fn clock(&self, name: &str) -> Result<ClockId, ModelError> {
        self.clocks
            .iter()
            .position(|c| c == name)
            .map(ClockId)
            .ok_or_else(|| ModelError::UnknownClock(name.to_string()))
    }

    pub fn location_name(&self, l: LocId) -> &str {
        &self.locations[l.0]
    }

    pub fn clock_name(&self, c: ClockId) -> &str {
        &self.clocks[c.0]
    }

    pub fn check_location(&self, l: LocId) -> Result<(), ModelError> {
        if l.0 < self.locations.len() {
            Ok(())
        } else {
            Err(ModelError::LocationOutOfRange(l.0))
        }
    }

    /// Same automaton with every guard constant multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> TimedAutomaton {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                guard: Guard::new(
                    e.guard
                        .atoms
                        .iter()
                        .map(|a| GuardAtom::new(a.clock, a.rel, a.constant * factor))
                        .collect(),
                ),
                ..e.clone()
            })
            .collect();
        TimedAutomaton::new_unchecked(self.locations.clone(), self.clocks.clone(), edges)
    }

    /// Same automaton without edge `index`.
    pub fn without_edge(&self, index: usize) -> TimedAutomaton {
        let mut edges = self.edges.clone();
        edges.remove(index);
        TimedAutomaton::new_unchecked(self.locations.clone(), self.clocks.clone(), edges)
    }

    pub(crate) fn with_edges(&self, edges: Vec<Edge>) -> TimedAutomaton {
        TimedAutomaton::new_unchecked(self.locations.clone(), self.clocks.clone(), edges)
    }

    pub fn display_guard(&self, g: &Guard) -> String {
        if g.atoms.is_empty() {
            return "true".into();
        }
        g.atoms
            .iter()
            .map(|a| format!("{} {} {}", self.clock_name(a.clock), a.rel.symbol(), a.constant))
            .collect::<Vec<_>>()
            .join(" && ")
    }
}

impl fmt::Display for TimedAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "clocks {{{}}}, locations {{{}}}",
            self.clocks.join(", "),
            self.locations.join(", ")
        )?;
        for e in &self.edges {
            let resets: Vec<&str> = e.resets.iter().map(|c| self.clock_name(c)).collect();
            writeln!(
                f,
                "  {} -[{}; reset {{{}}}]-> {}",
                self.location_name(e.source),
                self.display_guard(&e.guard),
                resets.join(", "),
                self.location_name(e.target)
            )?;
        }
        Ok(())
    }
}

fn check_unique(names: &[String]) -> Result<(), String> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(n.clone());
        }
    }
    Ok(())
}
