//! Ground truth for reachability queries from the classic region graph:
//! integer parts up to a bound and the order of fractional parts.

mod fuzz;

use std::collections::{HashSet, VecDeque};

use num_integer::Integer;
use thiserror::Error;

pub use fuzz::{
    automaton_seed, differential_test, random_automaton, FuzzConfig, FuzzConfigError, FuzzReport, Mismatch,
    MismatchKind, Query, Summary,
};

use crate::model::{ClockId, Configuration, Guard, GuardRel, LocId, ModelError, TimedAutomaton};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("common denominator {0} of the query is too large")]
    ScaleOverflow(u64),
}

/// Region of an integral-constant automaton with region bound `bound`.
///
/// A clock is either above the bound, or has an integer part `≤ bound` and a
/// fractional part that is zero or belongs to one of the ordered groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassicRegion {
    ints: Vec<u32>,
    /// Clocks above the bound.
    big: u64,
    /// Clocks with zero fractional part.
    zero: u64,
    /// Clocks with positive fractional part, grouped by equal fraction in
    /// increasing order.
    groups: Vec<u64>,
}

fn bit(c: usize) -> u64 {
    1 << c
}

impl ClassicRegion {
    /// Region of an integral valuation.
    pub fn of_integers(values: &[u64], bound: u32) -> Self {
        let mut r = ClassicRegion {
            ints: vec![0; values.len()],
            big: 0,
            zero: 0,
            groups: Vec::new(),
        };
        for (c, &v) in values.iter().enumerate() {
            if v > bound as u64 {
                r.big |= bit(c);
            } else {
                r.ints[c] = v as u32;
                r.zero |= bit(c);
            }
        }
        r
    }

    pub fn is_big(&self, c: usize) -> bool {
        self.big & bit(c) != 0
    }

    pub fn int_part(&self, c: usize) -> u32 {
        self.ints[c]
    }

    pub fn fraction_is_zero(&self, c: usize) -> bool {
        self.zero & bit(c) != 0
    }

    /// Both clocks below the bound with equal fractional parts.
    pub fn same_fraction(&self, a: usize, b: usize) -> bool {
        if self.is_big(a) || self.is_big(b) {
            return false;
        }
        let m = bit(a) | bit(b);
        self.zero & m == m || self.groups.iter().any(|g| g & m == m)
    }

    /// The valuation is exactly `values` (all integral).
    pub fn is_point(&self, values: &[u64]) -> bool {
        self.big == 0
            && self.groups.is_empty()
            && self.ints.iter().zip(values).all(|(&i, &v)| i as u64 == v)
    }

    /// Next region reached by letting time pass, if any.
    pub fn successor(&self, bound: u32) -> Option<ClassicRegion> {
        let mut r = self.clone();
        if self.zero != 0 {
            let mut moving = 0;
            for c in 0..self.ints.len() {
                if self.zero & bit(c) == 0 {
                    continue;
                }
                if self.ints[c] == bound {
                    r.big |= bit(c);
                    r.ints[c] = 0;
                } else {
                    moving |= bit(c);
                }
            }
            r.zero = 0;
            if moving != 0 {
                r.groups.insert(0, moving);
            }
            return Some(r);
        }
        let last = r.groups.pop()?;
        for c in 0..self.ints.len() {
            if last & bit(c) != 0 {
                r.ints[c] += 1;
            }
        }
        r.zero = last;
        Some(r)
    }

    fn satisfies_atom(&self, c: usize, rel: GuardRel, k: u32) -> bool {
        if self.is_big(c) {
            return rel == GuardRel::Gt;
        }
        let i = self.ints[c];
        if self.fraction_is_zero(c) {
            match rel {
                GuardRel::Lt => i < k,
                GuardRel::Eq => i == k,
                GuardRel::Gt => i > k,
            }
        } else {
            match rel {
                GuardRel::Lt => i < k,
                GuardRel::Eq => false,
                GuardRel::Gt => i >= k,
            }
        }
    }

    pub fn satisfies(&self, guard: &Guard) -> bool {
        guard
            .atoms
            .iter()
            .all(|a| self.satisfies_atom(a.clock.0, a.rel, a.constant))
    }

    pub fn reset(&self, clocks: impl IntoIterator<Item = ClockId>) -> ClassicRegion {
        let mut r = self.clone();
        for c in clocks {
            let m = bit(c.0);
            r.ints[c.0] = 0;
            r.big &= !m;
            r.zero |= m;
            for g in &mut r.groups {
                *g &= !m;
            }
        }
        r.groups.retain(|&g| g != 0);
        r
    }
}

/// Breadth-first search of the region graph of `ta` (whose constants must
/// not exceed `bound`) from `⟨start, from⟩` until `goal` holds.
pub fn search_regions(
    ta: &TimedAutomaton,
    bound: u32,
    start: LocId,
    from: ClassicRegion,
    mut goal: impl FnMut(LocId, &ClassicRegion) -> bool,
) -> bool {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((start, from.clone()));
    queue.push_back((start, from));
    while let Some((l, r)) = queue.pop_front() {
        if goal(l, &r) {
            return true;
        }
        let mut next = Vec::new();
        if let Some(s) = r.successor(bound) {
            next.push((l, s));
        }
        for e in ta.edges() {
            if e.source == l && r.satisfies(&e.guard) {
                next.push((e.target, r.reset(e.resets.iter())));
            }
        }
        for s in next {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    false
}

/// Common denominator of `values` and the scaled integral values, or an
/// error when scaling would overflow the automaton's constants.
pub fn scale_integral<T: Scalar>(ta: &TimedAutomaton, values: &[T]) -> Result<(u64, Vec<u64>), OracleError> {
    let d = values.iter().fold(1u64, |acc, v| acc.lcm(&v.denominator_u64()));
    if d > u32::MAX as u64 || (ta.c_max() as u64) * d > u32::MAX as u64 / 2 {
        return Err(OracleError::ScaleOverflow(d));
    }
    let scaled = values
        .iter()
        .map(|v| {
            if v.is_negative() {
                return Err(OracleError::Model(ModelError::NegativeValue));
            }
            Ok((v.clone() * T::from_int(d as i64)).floor_int() as u64)
        })
        .collect::<Result<_, _>>()?;
    Ok((d, scaled))
}

/// Exact decision of `source →* target` on the classic region graph of the
/// automaton scaled to integral query values.
pub fn oracle_reachable<T: Scalar>(
    ta: &TimedAutomaton,
    source: &Configuration<T>,
    target: &Configuration<T>,
) -> Result<bool, OracleError> {
    let n = ta.num_clocks();
    ta.check_location(source.location)?;
    ta.check_location(target.location)?;
    source.valuation.check_dimension(n)?;
    target.valuation.check_dimension(n)?;
    let all: Vec<T> = source
        .valuation
        .values()
        .iter()
        .chain(target.valuation.values())
        .cloned()
        .collect();
    let (d, scaled) = scale_integral(ta, &all)?;
    let (src, dst) = scaled.split_at(n);
    let ta = ta.scaled(d as u32);
    let bound = src.iter().chain(dst).copied().max().unwrap_or(0).max(ta.c_max() as u64) + 1;
    let bound = u32::try_from(bound).map_err(|_| OracleError::ScaleOverflow(d))?;
    let from = ClassicRegion::of_integers(src, bound);
    Ok(search_regions(&ta, bound, source.location, from, |l, r| {
        l == target.location && r.is_point(dst)
    }))
}

/// Decides whether the memorised automaton reaches `⟨target, ν'⟩` from its
/// fresh location with all clocks zero, for some `ν'` with `ν'(x) = goal(x)`
/// and `ν'(x') - ν'(z) = source(x)` for every original clock `x`, and
/// `ν'(z) ≤ horizon`. The clocks of `b` are the original ones, their copies,
/// then the reference clock.
pub fn memorised_reachable<T: Scalar>(
    b: &TimedAutomaton,
    b_start: LocId,
    target: LocId,
    source: &[T],
    goal: &[T],
    horizon: u32,
) -> Result<bool, OracleError> {
    let n = source.len();
    if b.num_clocks() != 2 * n + 1 || goal.len() != n {
        return Err(OracleError::Model(ModelError::DimensionMismatch {
            expected: 2 * n + 1,
            found: b.num_clocks(),
        }));
    }
    b.check_location(b_start)?;
    b.check_location(target)?;
    let all: Vec<T> = source.iter().chain(goal).cloned().collect();
    let (d, scaled) = scale_integral(b, &all)?;
    let (src, dst) = scaled.split_at(n);
    let b = b.scaled(d as u32);
    let reach = src.iter().max().copied().unwrap_or(0) + horizon as u64 * d;
    let bound = dst.iter().copied().max().unwrap_or(0).max(reach).max(b.c_max() as u64) + 1;
    let bound = u32::try_from(bound).map_err(|_| OracleError::ScaleOverflow(d))?;
    let z = 2 * n;
    let from = ClassicRegion::of_integers(&vec![0; 2 * n + 1], bound);
    Ok(search_regions(&b, bound, b_start, from, |l, r| {
        l == target
            && !r.is_big(z)
            && r.int_part(z) as u64 <= horizon as u64 * d
            && (0..n).all(|i| {
                !r.is_big(i)
                    && r.fraction_is_zero(i)
                    && r.int_part(i) as u64 == dst[i]
                    && r.same_fraction(n + i, z)
                    && r.int_part(n + i) as u64 == r.int_part(z) as u64 + src[i]
            })
    }))
}
