use std::cell::RefCell;

use indexmap::IndexSet;
use num_integer::Integer;

use super::ReachError;
use crate::model::{ClockId, ClockSet, ClockValuation, LocId, TimedAutomaton};
use crate::parikh::{CountSearch, Step, Tracking};
use crate::region::{caps_for, region_successors, resettable_from, CappedIntVector, RegionError, RegionState};
use crate::scalar::Scalar;
use crate::zone::{zone_member, BoundedZone};

/// Least common denominator of all values.
pub fn scale_factor<T: Scalar>(values: &[T]) -> u64 {
    values.iter().fold(1u64, |acc, v| acc.lcm(&v.denominator_u64()))
}

/// Exact decision of `⟨start, source⟩ →* ⟨target, goal⟩`.
///
/// Both valuations are scaled by their common denominator together with the
/// automaton, so the source becomes integral. From an integral valuation the
/// region automaton can start in the origin zone with the source's integer
/// parts, exactly as from zero. Wrap counts start at the source value for
/// clocks outside the prophecy and at 0 for the others; the goal is reached
/// when an accepting state's zone contains `goal - counts`.
pub fn check_pair<T: Scalar>(
    ta: &TimedAutomaton,
    start: LocId,
    target: LocId,
    source: &ClockValuation<T>,
    goal: &ClockValuation<T>,
) -> Result<bool, ReachError> {
    ta.check_location(start)?;
    ta.check_location(target)?;
    let n = ta.num_clocks();
    source.check_dimension(n)?;
    goal.check_dimension(n)?;
    let d = scale_factor(&[source.values(), goal.values()].concat());
    let fits = d <= u32::MAX as u64 && (ta.c_max() as u64) * d <= u32::MAX as u64 / 2;
    if !fits {
        return Err(ReachError::ScaleOverflow(d));
    }
    let scale = |v: &T| (v.clone() * T::from_int(d as i64)).floor_int();
    let src: Vec<i64> = source.values().iter().map(scale).collect();
    let dst: Vec<i64> = goal.values().iter().map(scale).collect();
    let ta = ta.scaled(d as u32);
    let caps = caps_for(&ta);
    let live = resettable_from(&ta);

    let states: RefCell<IndexSet<RegionState>> = RefCell::new(IndexSet::new());
    let mut memo: Vec<Option<Vec<Step>>> = Vec::new();
    let mut error: Option<RegionError> = None;
    let mut initial = Vec::new();
    let ints = CappedIntVector::new(src.iter().map(|&v| v as u32).collect(), caps.clone());
    for gamma in ClockSet::all(n).subsets() {
        if !gamma.is_subset(live[start.0]) {
            continue;
        }
        let state = RegionState {
            location: start,
            int_parts: ints.clone(),
            zone: BoundedZone::origin(n),
            prophecy: gamma,
        };
        let id = states.borrow_mut().insert_full(state).0 as u32;
        let counts = (0..n)
            .map(|i| if gamma.contains(ClockId(i)) { 0 } else { src[i] })
            .collect();
        initial.push((id, counts));
    }

    let search = CountSearch::new(dst.iter().map(|&max| Tracking::Exact { max }).collect());
    let found = search.run(
        &initial,
        |q| {
            let q = q as usize;
            if memo.len() <= q {
                memo.resize(q + 1, None);
            }
            if let Some(s) = &memo[q] {
                return s.clone();
            }
            let state = states.borrow()[q].clone();
            let mut out: Vec<Step> = Vec::new();
            match region_successors(&ta, &state) {
                Ok(succ) => {
                    let mut set = states.borrow_mut();
                    for (label, next, _) in succ {
                        if !next.prophecy.is_subset(live[next.location.0]) {
                            continue;
                        }
                        let to = set.insert_full(next).0 as u32;
                        let step = (label.map(|c| c.0 as u32), to);
                        if (to as usize != q || step.0.is_some()) && !out.contains(&step) {
                            out.push(step);
                        }
                    }
                }
                Err(e) => {
                    error.get_or_insert(e);
                }
            }
            memo[q] = Some(out.clone());
            out
        },
        |q, counts| {
            let set = states.borrow();
            let s = &set[q as usize];
            s.is_accepting_at(target) && {
                let point: Vec<T> = dst.iter().zip(counts).map(|(&v, &c)| T::from_int(v - c)).collect();
                zone_member(&s.zone, &point)
            }
        },
    );
    if let Some(e) = error {
        return Err(e.into());
    }
    Ok(found.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Edge, Guard, GuardAtom, GuardRel};
    use crate::Rational;

    fn val(v: &[(i64, i64)]) -> ClockValuation<Rational> {
        ClockValuation::from_fracs(v).unwrap()
    }

    fn worked_example() -> TimedAutomaton {
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

    #[test]
    fn delays_only_move_forward() {
        let ta = TimedAutomaton::new(vec!["l0".into()], vec!["x".into()], vec![]).unwrap();
        let l0 = LocId(0);
        assert!(check_pair(&ta, l0, l0, &val(&[(1, 2)]), &val(&[(3, 2)])).unwrap());
        assert!(!check_pair(&ta, l0, l0, &val(&[(3, 2)]), &val(&[(1, 2)])).unwrap());
        assert!(check_pair(&ta, l0, l0, &val(&[(4, 3)]), &val(&[(4, 3)])).unwrap());
    }

    #[test]
    fn worked_example_pairs() {
        let ta = worked_example();
        let (l0, l1) = (LocId(0), LocId(1));
        let zero = val(&[(0, 1), (0, 1)]);
        assert!(check_pair(&ta, l0, l1, &zero, &val(&[(5, 2), (7, 2)])).unwrap());
        assert!(!check_pair(&ta, l0, l1, &zero, &val(&[(5, 2), (3, 1)])).unwrap());
        // from x = 1/2 the edge fires half a time unit later
        assert!(check_pair(&ta, l0, l1, &val(&[(1, 2), (0, 1)]), &val(&[(0, 1), (1, 2)])).unwrap());
        assert!(!check_pair(&ta, l0, l1, &val(&[(3, 2), (0, 1)]), &val(&[(0, 1), (0, 1)])).unwrap());
    }

    #[test]
    fn dimension_is_checked() {
        let ta = worked_example();
        let r = check_pair(&ta, LocId(0), LocId(1), &val(&[(0, 1)]), &val(&[(0, 1), (0, 1)]));
        assert!(matches!(r, Err(ReachError::Model(_))));
    }
}
