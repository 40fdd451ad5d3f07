//! Translation of runs between the timed automaton and its region automaton,
//! in both directions.

use std::sync::Arc;

use super::{region_step, uncapped, Label, RegionError, RegionState, RegionStep};
use crate::model::{
    apply_reset, delay, eval_guard, ClockId, ClockSet, ClockValuation, ConcreteLabel, Configuration,
    TimedAutomaton,
};
use crate::scalar::Scalar;
use crate::zone::{self, ExactDbm};

/// A run of the timed automaton: a start configuration and a sequence of
/// delays and edge firings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteRun<T> {
    pub start: Configuration<T>,
    pub steps: Vec<ConcreteLabel<T>>,
}

impl<T: Scalar> ConcreteRun<T> {
    /// All configurations visited, validating each step.
    pub fn replay(&self, ta: &TimedAutomaton) -> Result<Vec<Configuration<T>>, RegionError> {
        self.start.valuation.check_dimension(ta.num_clocks())?;
        ta.check_location(self.start.location)?;
        let mut configs = vec![self.start.clone()];
        for (i, step) in self.steps.iter().enumerate() {
            let cur = configs.last().expect("non-empty");
            let next = match step {
                ConcreteLabel::Delay(t) => Configuration::new(
                    cur.location,
                    delay(&cur.valuation, t).map_err(|_| RegionError::IllegalStep(i))?,
                ),
                ConcreteLabel::Edge(k) => {
                    let e = ta.edges().get(*k).ok_or(RegionError::IllegalStep(i))?;
                    if e.source != cur.location || !eval_guard(&e.guard, &cur.valuation) {
                        return Err(RegionError::IllegalStep(i));
                    }
                    Configuration::new(e.target, apply_reset(&cur.valuation, e.resets)?)
                }
            };
            configs.push(next);
        }
        Ok(configs)
    }

    pub fn final_configuration(&self, ta: &TimedAutomaton) -> Result<Configuration<T>, RegionError> {
        Ok(self.replay(ta)?.pop().expect("non-empty"))
    }

    /// Clocks reset by some edge of the run.
    pub fn reset_clocks(&self, ta: &TimedAutomaton) -> ClockSet {
        self.steps
            .iter()
            .filter_map(|s| match s {
                ConcreteLabel::Edge(k) => ta.edges().get(*k).map(|e| e.resets),
                ConcreteLabel::Delay(_) => None,
            })
            .fold(ClockSet::EMPTY, ClockSet::union)
    }
}

/// A run of the region automaton: `states.len() == steps.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionRun {
    pub states: Vec<RegionState>,
    pub steps: Vec<RegionStep>,
}

impl RegionRun {
    /// Labels of the steps, checking legality.
    pub fn labels(&self, ta: &TimedAutomaton) -> Result<Vec<Label>, RegionError> {
        if self.states.len() != self.steps.len() + 1 {
            return Err(RegionError::EmptyRun);
        }
        let mut labels = Vec::with_capacity(self.steps.len());
        for (i, &step) in self.steps.iter().enumerate() {
            match region_step(ta, &self.states[i], step)? {
                Some((l, s)) if s == self.states[i + 1] => labels.push(l),
                _ => return Err(RegionError::IllegalStep(i)),
            }
        }
        Ok(labels)
    }

    /// The visible word.
    pub fn word(&self, ta: &TimedAutomaton) -> Result<Vec<ClockId>, RegionError> {
        Ok(self.labels(ta)?.into_iter().flatten().collect())
    }

    pub fn last(&self) -> &RegionState {
        self.states.last().expect("non-empty")
    }

    /// The same run with integer parts capped at `caps`.
    pub fn recapped(&self, caps: Arc<[u32]>) -> RegionRun {
        RegionRun {
            states: self.states.iter().map(|s| s.recapped(caps.clone())).collect(),
            steps: self.steps.clone(),
        }
    }
}

/// Region run simulating `run`, which must start at `⟨ℓ₀, 0⟩`; `prophecy`
/// must be the set of clocks reset along `run`.
///
/// Each delay is cut wherever a clock reaches an integer, and every clock
/// landing on an integer is wrapped immediately, so fractional parts stay in
/// `[0, 1)`. Integer parts are tracked exactly (uncapped).
pub fn abstract_run<T: Scalar>(
    ta: &TimedAutomaton,
    run: &ConcreteRun<T>,
    prophecy: ClockSet,
) -> Result<RegionRun, RegionError> {
    run.replay(ta)?;
    if !run.start.is_zero() {
        return Err(RegionError::NotFromZero);
    }
    let resets = run.reset_clocks(ta);
    if resets != prophecy {
        return Err(RegionError::ProphecyMismatch {
            expected: resets.0,
            found: prophecy.0,
        });
    }
    // clocks reset strictly after each step
    let mut later = vec![ClockSet::EMPTY; run.steps.len() + 1];
    for i in (0..run.steps.len()).rev() {
        later[i] = later[i + 1];
        if let ConcreteLabel::Edge(k) = run.steps[i] {
            later[i] = later[i].union(ta.edges()[k].resets);
        }
    }

    let n = ta.num_clocks();
    let mut state = RegionState::initial(run.start.location, prophecy, uncapped(n));
    let mut frac: Vec<T> = vec![T::zero(); n];
    let mut out = RegionRun {
        states: vec![state.clone()],
        steps: Vec::new(),
    };
    let mut push = |step: RegionStep, state: &mut RegionState, idx: usize| -> Result<(), RegionError> {
        let (_, next) = region_step(ta, state, step)?.ok_or(RegionError::IllegalStep(idx))?;
        *state = next;
        out.states.push(state.clone());
        out.steps.push(step);
        Ok(())
    };
    for (i, step) in run.steps.iter().enumerate() {
        match step {
            ConcreteLabel::Delay(d) => {
                let mut remaining = d.clone();
                while remaining.is_positive() {
                    let mut seg = remaining.clone();
                    for f in &frac {
                        let to_next = T::one() - f.clone();
                        if to_next < seg {
                            seg = to_next;
                        }
                    }
                    push(RegionStep::Delay, &mut state, i)?;
                    remaining = remaining - seg.clone();
                    for (c, f) in frac.iter_mut().enumerate() {
                        *f = f.clone() + seg.clone();
                        if *f == T::one() {
                            *f = T::zero();
                            push(RegionStep::Wrap(ClockId(c)), &mut state, i)?;
                        }
                    }
                }
            }
            ConcreteLabel::Edge(k) => {
                let e = &ta.edges()[*k];
                let dropped = e.resets.difference(later[i + 1]);
                push(RegionStep::Discrete { edge: *k, dropped }, &mut state, i)?;
                for c in e.resets.iter() {
                    frac[c.0] = T::zero();
                }
            }
        }
    }
    Ok(out)
}

/// Concrete run realising `region_run` and ending at
/// `υ_final + final_fraction`, built backwards from the last state: every
/// zone along the run is exactly the image of its predecessor, so each point
/// has a preimage that the previous step can reach.
pub fn concretize_run<T: Scalar>(
    ta: &TimedAutomaton,
    region_run: &RegionRun,
    final_fraction: &[T],
) -> Result<ConcreteRun<T>, RegionError> {
    region_run.labels(ta)?;
    let first = &region_run.states[0];
    let n = ta.num_clocks();
    if first.zone != zone::BoundedZone::origin(n) || first.int_parts.values().iter().any(|&v| v != 0) {
        return Err(RegionError::NotFromZero);
    }
    let last = region_run.last();
    if !zone::zone_member(&last.zone, final_fraction) {
        return Err(RegionError::FractionOutsideZone);
    }
    let mut point: Vec<T> = final_fraction.to_vec();
    let mut rev_steps: Vec<ConcreteLabel<T>> = Vec::new();
    for j in (0..region_run.steps.len()).rev() {
        let prev = &region_run.states[j];
        match region_run.steps[j] {
            RegionStep::Delay => {
                let t = delay_preimage(&prev.zone, &point).ok_or(RegionError::IllegalStep(j))?;
                point = point.iter().map(|v| v.clone() - t.clone()).collect();
                if t.is_positive() {
                    rev_steps.push(ConcreteLabel::Delay(t));
                }
            }
            RegionStep::Wrap(x) => {
                point[x.0] = T::one();
            }
            RegionStep::Discrete { edge, .. } => {
                let e = &ta.edges()[edge];
                let restricted = zone::guard_restrict(
                    &prev.zone,
                    prev.int_parts.values(),
                    prev.int_parts.caps(),
                    &e.guard,
                )?
                .ok_or(RegionError::IllegalStep(j))?;
                let mut dbm = ExactDbm::<T>::from_zone(&restricted);
                for (c, v) in point.iter().enumerate() {
                    if !e.resets.contains(ClockId(c)) {
                        dbm.constrain_eq(c + 1, 0, v.clone());
                    }
                }
                point = dbm.pick_point().ok_or(RegionError::IllegalStep(j))?;
                rev_steps.push(ConcreteLabel::Edge(edge));
            }
        }
        debug_assert!(zone::zone_member(&prev.zone, &point));
    }
    let mut steps: Vec<ConcreteLabel<T>> = Vec::new();
    for s in rev_steps.into_iter().rev() {
        match (steps.last_mut(), s) {
            (Some(ConcreteLabel::Delay(acc)), ConcreteLabel::Delay(t)) => *acc = acc.clone() + t,
            (_, s) => steps.push(s),
        }
    }
    let run = ConcreteRun {
        start: Configuration::new(first.location, ClockValuation::zero(n)),
        steps,
    };
    run.replay(ta)?;
    Ok(run)
}

/// Some `t ≥ 0` with `point - t·1 ∈ zone`.
fn delay_preimage<T: Scalar>(zone: &zone::BoundedZone, point: &[T]) -> Option<T> {
    // lower end (value, strict) and upper end of the admissible t
    let mut lo: (T, bool) = (T::zero(), false);
    let mut hi: Option<(T, bool)> = None;
    for (i, p) in point.iter().enumerate() {
        let c = ClockId(i);
        let up = zone.upper(c);
        // p - t ≺ up  ⇔  t ≻ p - up
        let cand = (p.clone() - T::from_int(up.value as i64), up.strict);
        if cand.0 > lo.0 || (cand.0 == lo.0 && cand.1) {
            lo = cand;
        }
        let low = zone.neg_lower(c);
        // -(p - t) ≺ low  ⇔  t ≺ low + p
        let cand = (T::from_int(low.value as i64) + p.clone(), low.strict);
        if hi.as_ref().is_none_or(|h| cand.0 < h.0 || (cand.0 == h.0 && cand.1)) {
            hi = Some(cand);
        }
    }
    let t = match hi {
        None => {
            if lo.1 {
                lo.0 + T::one()
            } else {
                lo.0
            }
        }
        Some(h) => {
            if h.0 < lo.0 || (h.0 == lo.0 && (h.1 || lo.1)) {
                return None;
            }
            if !lo.1 {
                lo.0
            } else if !h.1 {
                h.0
            } else {
                (lo.0 + h.0).half()
            }
        }
    };
    let shifted: Vec<T> = point.iter().map(|v| v.clone() - t.clone()).collect();
    zone::zone_member(zone, &shifted).then_some(t)
}
