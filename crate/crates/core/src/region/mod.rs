//! The discrete-time automaton whose states pair integer parts of the clocks
//! with a 1-bounded zone for their fractional parts and a prophecy set of
//! clocks that will still be reset.
//!
//! Integer parts are capped at `c_max + 1`; states that agree after capping
//! are bisimilar, which makes the explored automaton finite.

mod explore;
mod memorise;
mod runs;

use std::sync::Arc;

use thiserror::Error;

use crate::model::{ClockId, ClockSet, LocId, ModelError, TimedAutomaton};
use crate::zone::{self, BoundedZone, ZoneError};

pub use explore::{build_nfa, eliminate_epsilon, resettable_from, GammaStats, RegionGraph, RegionNfa};
pub use memorise::{memorise, Memorised};
pub use runs::{abstract_run, concretize_run, ConcreteRun, RegionRun};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegionError {
    #[error(transparent)]
    Zone(#[from] ZoneError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("run does not start at the initial configuration with all clocks zero")]
    NotFromZero,
    #[error("step {0} of the run is not a legal transition")]
    IllegalStep(usize),
    #[error("prophecy {found:#b} differs from the clocks reset along the run {expected:#b}")]
    ProphecyMismatch { expected: u64, found: u64 },
    #[error("chosen fractional point is not in the final zone")]
    FractionOutsideZone,
    #[error("empty run")]
    EmptyRun,
}

/// Integer parts of the clocks, each at most its per-clock cap. The value
/// `caps[x]` stands for every integer part `≥ caps[x]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CappedIntVector {
    values: Box<[u32]>,
    caps: Arc<[u32]>,
}

/// Cap used when integer parts should be tracked exactly.
pub const UNCAPPED: u32 = u32::MAX;

impl CappedIntVector {
    pub fn zero(caps: Arc<[u32]>) -> Self {
        CappedIntVector {
            values: vec![0; caps.len()].into_boxed_slice(),
            caps,
        }
    }

    pub fn new(values: Vec<u32>, caps: Arc<[u32]>) -> Self {
        assert_eq!(values.len(), caps.len(), "one cap per clock");
        CappedIntVector {
            values: values.iter().zip(caps.iter()).map(|(&v, &c)| v.min(c)).collect(),
            caps,
        }
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, c: ClockId) -> u32 {
        self.values[c.0]
    }

    pub fn incremented(&self, c: ClockId) -> Self {
        let mut v = self.clone();
        v.values[c.0] = v.values[c.0].saturating_add(1).min(self.caps[c.0]);
        v
    }

    pub fn reset(&self, resets: ClockSet) -> Self {
        let mut v = self.clone();
        for c in resets.iter() {
            v.values[c.0] = 0;
        }
        v
    }

    pub fn recapped(&self, caps: Arc<[u32]>) -> Self {
        CappedIntVector::new(self.values.to_vec(), caps)
    }
}

/// Per-clock caps making the quotient a strong bisimulation for `ta`: one
/// above the largest constant compared with the clock, and 0 for clocks no
/// guard mentions.
pub fn caps_for(ta: &TimedAutomaton) -> Arc<[u32]> {
    (0..ta.num_clocks())
        .map(|c| ta.clock_max_constant(ClockId(c)).map_or(0, |k| k + 1))
        .collect()
}

/// Caps for exact integer parts.
pub fn uncapped(n: usize) -> Arc<[u32]> {
    vec![UNCAPPED; n].into()
}

/// `None` is the silent label.
pub type Label = Option<ClockId>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionState {
    pub location: LocId,
    pub int_parts: CappedIntVector,
    pub zone: BoundedZone,
    pub prophecy: ClockSet,
}

impl RegionState {
    pub fn initial(location: LocId, prophecy: ClockSet, caps: Arc<[u32]>) -> Self {
        let n = caps.len();
        RegionState {
            location,
            int_parts: CappedIntVector::zero(caps),
            zone: BoundedZone::origin(n),
            prophecy,
        }
    }

    pub fn is_accepting_at(&self, target: LocId) -> bool {
        self.location == target && self.prophecy.is_empty()
    }

    pub fn recapped(&self, caps: Arc<[u32]>) -> Self {
        RegionState {
            int_parts: self.int_parts.recapped(caps),
            ..self.clone()
        }
    }

    /// `loc | υ | zone | γ`.
    pub fn describe(&self, ta: &TimedAutomaton) -> String {
        let ints: Vec<String> = self.int_parts.values().iter().map(|v| v.to_string()).collect();
        let gamma: Vec<&str> = self.prophecy.iter().map(|c| ta.clock_name(c)).collect();
        format!(
            "{} | ({}) | {} | {{{}}}",
            ta.location_name(self.location),
            ints.join(","),
            self.zone.display_with(ta.clocks()),
            gamma.join(",")
        )
    }
}

/// A single transition kind of the region automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionStep {
    Delay,
    Wrap(ClockId),
    /// Edge `edge` of the automaton; `dropped` are the reset clocks that leave
    /// the prophecy because they are never reset again.
    Discrete { edge: usize, dropped: ClockSet },
}

/// Applies `step` to `state`; `None` if the step is not enabled.
pub fn region_step(
    ta: &TimedAutomaton,
    state: &RegionState,
    step: RegionStep,
) -> Result<Option<(Label, RegionState)>, RegionError> {
    Ok(match step {
        RegionStep::Delay => Some((
            None,
            RegionState {
                zone: zone::time_successor(&state.zone),
                ..state.clone()
            },
        )),
        RegionStep::Wrap(x) => zone::wrap_face(&state.zone, x).map(|z| {
            let label = if state.prophecy.contains(x) { None } else { Some(x) };
            (
                label,
                RegionState {
                    location: state.location,
                    int_parts: state.int_parts.incremented(x),
                    zone: z,
                    prophecy: state.prophecy,
                },
            )
        }),
        RegionStep::Discrete { edge, dropped } => {
            let e = ta
                .edges()
                .get(edge)
                .ok_or(ModelError::LocationOutOfRange(edge))?;
            if e.source != state.location
                || !e.resets.is_subset(state.prophecy)
                || !dropped.is_subset(e.resets)
            {
                return Ok(None);
            }
            let restricted = zone::guard_restrict(
                &state.zone,
                state.int_parts.values(),
                state.int_parts.caps(),
                &e.guard,
            )?;
            restricted.map(|z| {
                (
                    None,
                    RegionState {
                        location: e.target,
                        int_parts: state.int_parts.reset(e.resets),
                        zone: zone::zone_reset(&z, e.resets),
                        prophecy: state.prophecy.difference(dropped),
                    },
                )
            })
        }
    })
}

/// All successors of `state`: the delay successor, one wrap per clock whose
/// face is reached, and one discrete successor per enabled edge and per
/// choice of reset clocks leaving the prophecy.
pub fn region_successors(
    ta: &TimedAutomaton,
    state: &RegionState,
) -> Result<Vec<(Label, RegionState, RegionStep)>, RegionError> {
    let mut out = Vec::new();
    let mut push = |step: RegionStep| -> Result<(), RegionError> {
        if let Some((l, s)) = region_step(ta, state, step)? {
            out.push((l, s, step));
        }
        Ok(())
    };
    push(RegionStep::Delay)?;
    for c in 0..ta.num_clocks() {
        push(RegionStep::Wrap(ClockId(c)))?;
    }
    for (i, e) in ta.edges().iter().enumerate() {
        if e.source != state.location || !e.resets.is_subset(state.prophecy) {
            continue;
        }
        for dropped in e.resets.subsets() {
            push(RegionStep::Discrete { edge: i, dropped })?;
        }
    }
    Ok(out)
}
