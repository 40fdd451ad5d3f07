//! Dense-time semantics over exact clock values.

use std::fmt;

use num_traits::Zero;

use super::{ClockId, ClockSet, Guard, GuardRel, LocId, ModelError, TimedAutomaton};
use crate::scalar::Scalar;

/// Non-negative exact value per clock.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClockValuation<T> {
    values: Vec<T>,
}

impl<T: Scalar> ClockValuation<T> {
    pub fn zero(n: usize) -> Self {
        ClockValuation {
            values: vec![T::zero(); n],
        }
    }

    pub fn new(values: Vec<T>) -> Result<Self, ModelError> {
        if values.iter().any(|v| v.is_negative()) {
            return Err(ModelError::NegativeValue);
        }
        Ok(ClockValuation { values })
    }

    pub fn from_fracs(values: &[(i64, i64)]) -> Result<Self, ModelError> {
        Self::new(values.iter().map(|&(n, d)| T::from_frac(n, d)).collect())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, c: ClockId) -> &T {
        &self.values[c.0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_dimension(&self, n: usize) -> Result<(), ModelError> {
        if self.values.len() == n {
            Ok(())
        } else {
            Err(ModelError::DimensionMismatch {
                expected: n,
                found: self.values.len(),
            })
        }
    }
}

impl<T: Scalar> fmt::Display for ClockValuation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration<T> {
    pub location: LocId,
    pub valuation: ClockValuation<T>,
}

impl<T: Scalar> Configuration<T> {
    pub fn new(location: LocId, valuation: ClockValuation<T>) -> Self {
        Configuration {
            location,
            valuation,
        }
    }

    pub fn initial(location: LocId, clocks: usize) -> Self {
        Configuration::new(location, ClockValuation::zero(clocks))
    }
}

/// `valuation ⊨ guard`.
pub fn eval_guard<T: Scalar>(guard: &Guard, valuation: &ClockValuation<T>) -> bool {
    guard.atoms.iter().all(|a| {
        let v = valuation.get(a.clock);
        let k = T::from_int(a.constant as i64);
        match a.rel {
            GuardRel::Lt => *v < k,
            GuardRel::Eq => *v == k,
            GuardRel::Gt => *v > k,
        }
    })
}

/// `valuation + t`.
pub fn delay<T: Scalar>(valuation: &ClockValuation<T>, t: &T) -> Result<ClockValuation<T>, ModelError> {
    if t.is_negative() {
        return Err(ModelError::NegativeDelay);
    }
    Ok(ClockValuation {
        values: valuation.values.iter().map(|v| v.clone() + t.clone()).collect(),
    })
}

/// `valuation[resets ← 0]`.
pub fn apply_reset<T: Scalar>(
    valuation: &ClockValuation<T>,
    resets: ClockSet,
) -> Result<ClockValuation<T>, ModelError> {
    if let Some(c) = resets.iter().find(|c| c.0 >= valuation.len()) {
        return Err(ModelError::ClockOutOfRange(c.0));
    }
    Ok(ClockValuation {
        values: valuation
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if resets.contains(ClockId(i)) {
                    T::zero()
                } else {
                    v.clone()
                }
            })
            .collect(),
    })
}

/// A step of a concrete run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConcreteLabel<T> {
    Delay(T),
    Edge(usize),
}

/// Discrete successors of `config`, followed by delay successors sampled on
/// the grid `k / granularity` for `0 ≤ k ≤ delay_bound · granularity`.
///
/// Sampling under-approximates dense time; it only serves to generate
/// positive witness runs.
pub fn concrete_successors<T: Scalar>(
    ta: &TimedAutomaton,
    config: &Configuration<T>,
    delay_bound: &T,
    granularity: u32,
) -> Vec<(ConcreteLabel<T>, Configuration<T>)> {
    let mut out = Vec::new();
    for (i, e) in ta.edges().iter().enumerate() {
        if e.source == config.location && eval_guard(&e.guard, &config.valuation) {
            let v = apply_reset(&config.valuation, e.resets).expect("edge resets are valid clocks");
            out.push((ConcreteLabel::Edge(i), Configuration::new(e.target, v)));
        }
    }
    let g = granularity.max(1) as i64;
    let mut k = 0i64;
    loop {
        let t = T::from_frac(k, g);
        if t > *delay_bound {
            break;
        }
        let v = delay(&config.valuation, &t).expect("non-negative delay");
        out.push((ConcreteLabel::Delay(t), Configuration::new(config.location, v)));
        k += 1;
    }
    out
}

impl<T: Scalar> Configuration<T> {
    pub fn is_zero(&self) -> bool {
        self.valuation.values.iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Edge, GuardAtom};
    use num_rational::Ratio;
    use proptest::prelude::*;

    type R = Ratio<i64>;

    fn val(v: &[(i64, i64)]) -> ClockValuation<R> {
        ClockValuation::from_fracs(v).unwrap()
    }

    fn atom(c: usize, rel: GuardRel, k: u32) -> GuardAtom {
        GuardAtom::new(ClockId(c), rel, k)
    }

    #[test]
    fn guard_examples() {
        let eq1 = Guard::new(vec![atom(0, GuardRel::Eq, 1)]);
        assert!(eval_guard(&eq1, &val(&[(1, 1)])));
        let lt1 = Guard::new(vec![atom(0, GuardRel::Lt, 1)]);
        assert!(!eval_guard(&lt1, &val(&[(1, 1)])));
        let conj = Guard::new(vec![atom(0, GuardRel::Gt, 1), atom(1, GuardRel::Lt, 2)]);
        assert!(eval_guard(&conj, &val(&[(3, 2), (1, 2)])));
        assert!(eval_guard(&Guard::tt(), &val(&[(7, 3)])));
    }

    #[test]
    fn delay_examples() {
        assert_eq!(delay(&val(&[(0, 1), (0, 1)]), &R::new(1, 2)).unwrap(), val(&[(1, 2), (1, 2)]));
        assert_eq!(delay(&val(&[(1, 1), (2, 1)]), &R::from_int(0)).unwrap(), val(&[(1, 1), (2, 1)]));
        assert_eq!(delay(&val(&[(1, 3)]), &R::new(2, 3)).unwrap(), val(&[(1, 1)]));
        assert_eq!(delay(&val(&[(1, 3)]), &R::new(-1, 3)), Err(ModelError::NegativeDelay));
    }

    #[test]
    fn reset_examples() {
        let v = val(&[(2, 1), (3, 1)]);
        assert_eq!(apply_reset(&v, ClockSet(0b01)).unwrap(), val(&[(0, 1), (3, 1)]));
        assert_eq!(apply_reset(&v, ClockSet::EMPTY).unwrap(), v);
        assert_eq!(apply_reset(&v, ClockSet(0b11)).unwrap(), ClockValuation::zero(2));
        assert_eq!(apply_reset(&v, ClockSet(0b100)), Err(ModelError::ClockOutOfRange(2)));
    }

    fn single_edge(k: u32) -> TimedAutomaton {
        TimedAutomaton::new(
            vec!["l0".into(), "l1".into()],
            vec!["x".into()],
            vec![Edge {
                source: LocId(0),
                guard: Guard::new(vec![atom(0, GuardRel::Eq, k)]),
                resets: ClockSet(1),
                target: LocId(1),
            }],
        )
        .unwrap()
    }

    #[test]
    fn successors_without_edges_are_grid_delays() {
        let ta = TimedAutomaton::new(vec!["l0".into()], vec!["x".into()], vec![]).unwrap();
        let c = Configuration::initial(LocId(0), 1);
        let succ = concrete_successors(&ta, &c, &R::from_int(1), 2);
        let delays: Vec<R> = succ
            .iter()
            .map(|(l, _)| match l {
                ConcreteLabel::Delay(t) => *t,
                ConcreteLabel::Edge(_) => panic!("no edges"),
            })
            .collect();
        assert_eq!(delays, vec![R::from_int(0), R::new(1, 2), R::from_int(1)]);
    }

    #[test]
    fn successors_fire_enabled_edges_only() {
        let ta = single_edge(1);
        let c = Configuration::new(LocId(0), val(&[(1, 1)]));
        let succ = concrete_successors(&ta, &c, &R::from_int(1), 1);
        assert!(succ.contains(&(
            ConcreteLabel::Edge(0),
            Configuration::new(LocId(1), ClockValuation::zero(1))
        )));
        let c = Configuration::new(LocId(0), val(&[(1, 2)]));
        let succ = concrete_successors(&ta, &c, &R::from_int(1), 1);
        assert!(succ.iter().all(|(l, _)| matches!(l, ConcreteLabel::Delay(_))));
    }

    fn small_rational() -> impl Strategy<Value = R> {
        (0i64..13, 1i64..5).prop_map(|(n, d)| R::new(n, d))
    }

    proptest! {
        #[test]
        fn conjunction_is_homomorphic(
            k1 in 0u32..4, k2 in 0u32..4, r1 in 0usize..3, r2 in 0usize..3,
            x in small_rational(), y in small_rational(),
        ) {
            let rels = [GuardRel::Lt, GuardRel::Eq, GuardRel::Gt];
            let g1 = Guard::new(vec![atom(0, rels[r1], k1)]);
            let g2 = Guard::new(vec![atom(1, rels[r2], k2)]);
            let v = ClockValuation::new(vec![x, y]).unwrap();
            prop_assert_eq!(eval_guard(&g1, &v) && eval_guard(&g2, &v), eval_guard(&g1.and(&g2), &v));
        }

        #[test]
        fn delays_compose_and_resets_are_idempotent(
            x in small_rational(), y in small_rational(), s in small_rational(), t in small_rational(),
            mask in 0u64..4,
        ) {
            let v = ClockValuation::new(vec![x, y]).unwrap();
            let two = delay(&delay(&v, &s).unwrap(), &t).unwrap();
            prop_assert_eq!(two, delay(&v, &(s + t)).unwrap());
            let once = apply_reset(&v, ClockSet(mask)).unwrap();
            prop_assert_eq!(apply_reset(&once, ClockSet(mask)).unwrap(), once);
        }
    }
}
