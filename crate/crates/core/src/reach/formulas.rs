use std::collections::HashMap;

use super::ReachError;
use crate::formula::{decide_integer, Atom, Binding, Matrix, MixedFormula, Rel, SolveError, Sort};
use crate::model::{LocId, TimedAutomaton};
use crate::parikh::{CountSearch, FlowEncoding, Tracking, Witness};
use crate::region::{memorise, Memorised, RegionGraph, RegionNfa};
use crate::scalar::Scalar;
use crate::zone::{zone_member, BoundedZone, ExactDbm};
use crate::Rational;

/// Formula describing the valuations reached at the target location of a
/// trimmed quotient automaton, together with the automaton it encodes.
///
/// Clock `i` is read through `clock_vars[i]`; the integer part it gained by
/// wrapping is `u{i+1}`, and the rest must lie in the zone of the accepting
/// state selected by the flow.
#[derive(Debug, Clone)]
pub struct ReachEncoding {
    pub formula: MixedFormula,
    pub nfa: RegionNfa,
    pub flow: FlowEncoding,
    pub clock_vars: Vec<String>,
}

fn atom(terms: Vec<(String, i64)>, constant: i64, rel: Rel) -> Matrix {
    Matrix::Atom(Atom::new(terms, constant, rel))
}

/// `(v_i - u_i) - (v_j - u_j) ≺ b` for every entry of the matrix of `zone`.
fn zone_atoms(zone: &BoundedZone, clocks: &[String], letters: &[String]) -> Vec<Matrix> {
    let n = zone.dim();
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            if i == j {
                continue;
            }
            let b = zone.entry(i, j);
            let mut terms = Vec::new();
            if i > 0 {
                terms.push((clocks[i - 1].clone(), 1));
                terms.push((letters[i - 1].clone(), -1));
            }
            if j > 0 {
                terms.push((clocks[j - 1].clone(), -1));
                terms.push((letters[j - 1].clone(), 1));
            }
            let rel = if b.strict { Rel::Lt } else { Rel::Le };
            out.push(atom(terms, -(b.value as i64), rel));
        }
    }
    out
}

impl ReachEncoding {
    fn new(nfa: RegionNfa, clock_vars: Vec<String>, free: Vec<String>) -> Self {
        let k = nfa.nfa.alphabet;
        let letters: Vec<String> = (1..=k).map(|i| format!("u{i}")).collect();
        let sinks: Vec<u32> = nfa.accepting_states().collect();
        let flow = FlowEncoding::new(&nfa.nfa, &nfa.nfa.initial, &sinks, &letters);
        if sinks.is_empty() || nfa.nfa.initial.is_empty() {
            return ReachEncoding {
                formula: MixedFormula {
                    free,
                    exists: Vec::new(),
                    matrix: Matrix::ff(),
                },
                nfa,
                flow,
                clock_vars,
            };
        }
        let mut exists: Vec<Binding> = letters
            .iter()
            .map(|u| Binding {
                var: u.clone(),
                sort: Sort::Int,
            })
            .collect();
        exists.extend(flow.bindings.iter().cloned());

        let mut parts = Vec::new();
        for v in &clock_vars {
            parts.push(atom(vec![(v.clone(), -1)], 0, Rel::Le));
        }
        for u in &letters {
            parts.push(atom(vec![(u.clone(), -1)], 0, Rel::Le));
        }
        parts.extend(flow.constraints.iter().cloned());
        let mut zones: Vec<(&BoundedZone, Vec<(String, i64)>)> = Vec::new();
        for (j, &q) in sinks.iter().enumerate() {
            let z = &nfa.states[q as usize].zone;
            let sel = (flow.names.sink[j].clone(), 1);
            match zones.iter_mut().find(|(w, _)| *w == z) {
                Some((_, sel_terms)) => sel_terms.push(sel),
                None => zones.push((z, vec![sel])),
            }
        }
        let alternatives = zones
            .into_iter()
            .map(|(z, sel)| {
                let mut conj = vec![atom(sel, -1, Rel::Eq)];
                conj.extend(zone_atoms(z, &clock_vars, &letters));
                Matrix::And(conj)
            })
            .collect();
        parts.push(Matrix::Or(alternatives));
        ReachEncoding {
            formula: MixedFormula {
                free,
                exists,
                matrix: Matrix::And(parts),
            },
            nfa,
            flow,
            clock_vars,
        }
    }

    fn successors(&self) -> Vec<Vec<(Option<u32>, u32)>> {
        let nfa = &self.nfa.nfa;
        nfa.out_lists()
            .into_iter()
            .map(|ts| ts.iter().map(|&t| (nfa.transitions[t].label, nfa.transitions[t].to)).collect())
            .collect()
    }

    fn run<A: FnMut(u32, &[i64]) -> bool>(&self, tracking: Vec<Tracking>, accept: A) -> Option<Witness> {
        let succ = self.successors();
        let zeros = vec![0; self.nfa.nfa.alphabet];
        let initial: Vec<(u32, Vec<i64>)> = self.nfa.nfa.initial.iter().map(|&q| (q, zeros.clone())).collect();
        CountSearch::new(tracking).run(&initial, |q| succ[q as usize].clone(), accept)
    }

    /// Accepted path whose wrap counts `c` leave `values - c` in the zone of
    /// its last state.
    pub fn witness<T: Scalar>(&self, values: &[T]) -> Option<Witness> {
        if values.len() != self.clock_vars.len() || values.iter().any(|v| v.is_negative()) {
            return None;
        }
        let tracking = values.iter().map(|v| Tracking::Exact { max: v.floor_int() }).collect();
        self.run(tracking, |q, c| {
            self.nfa.nfa.accepting[q as usize] && zone_member(&self.nfa.states[q as usize].zone, &fraction(values, c))
        })
    }

    /// Whether the encoded formula holds at `values`, decided on the automaton.
    pub fn holds<T: Scalar>(&self, values: &[T]) -> bool {
        self.witness(values).is_some()
    }

    /// Values for every variable of the formula, built from a witness path.
    pub fn assignment<T: Scalar>(&self, values: &[T], w: &Witness) -> Option<HashMap<String, T>> {
        let mut a: HashMap<String, T> = self
            .flow
            .assignment(&self.nfa.nfa, w)?
            .into_iter()
            .map(|(k, v)| (k, T::from_int(v)))
            .collect();
        for (v, x) in self.clock_vars.iter().zip(values) {
            a.insert(v.clone(), x.clone());
        }
        Some(a)
    }

    /// Decides the formula at `values` with the bounded integer solver,
    /// without looking at the automaton. Every bound variable must be an
    /// integer and every free variable a clock.
    pub fn decide(&self, values: &[Rational]) -> Result<bool, SolveError> {
        let fixed: HashMap<String, Rational> = self.clock_vars.iter().cloned().zip(values.iter().copied()).collect();
        let mut total = 0u64;
        let mut domains = HashMap::new();
        for (i, v) in values.iter().enumerate() {
            let hi = v.floor().to_integer();
            let lo = (v.ceil().to_integer() - 1).max(0);
            total += hi.max(0) as u64;
            domains.insert(format!("u{}", i + 1), (lo, hi));
        }
        domains.extend(self.flow.domains(&self.nfa.nfa, total));
        Ok(decide_integer(&self.formula, &fixed, &domains)?.is_some())
    }
}

fn fraction<T: Scalar>(values: &[T], counts: &[i64]) -> Vec<T> {
    values
        .iter()
        .zip(counts)
        .map(|(v, &c)| v.clone() - T::from_int(c))
        .collect()
}

/// Trimmed quotient of `ta` from `start`, accepting at `target`.
fn quotient(ta: &TimedAutomaton, start: LocId, target: LocId) -> Result<RegionNfa, ReachError> {
    Ok(RegionGraph::explore(ta, start)?.nfa_for(target)?.trimmed())
}

/// ψ with its automaton: `x1..xn` are the clocks reached at `target` from
/// `⟨start, 0⟩`.
pub fn psi_encoding(ta: &TimedAutomaton, start: LocId, target: LocId) -> Result<ReachEncoding, ReachError> {
    let xs: Vec<String> = (1..=ta.num_clocks()).map(|i| format!("x{i}")).collect();
    Ok(ReachEncoding::new(quotient(ta, start, target)?, xs.clone(), xs))
}

/// Existential formula over `x1..xn` satisfied exactly by the valuations `ν`
/// with `⟨start, 0⟩ →* ⟨target, ν⟩`.
pub fn build_psi(ta: &TimedAutomaton, start: LocId, target: LocId) -> Result<MixedFormula, ReachError> {
    Ok(psi_encoding(ta, start, target)?.formula)
}

/// φ together with the memorised automaton and its encoding. The clocks of
/// the memorised automaton are read as `y1..yn` (the original clocks),
/// `p1..pn` (their copies) and `z`.
#[derive(Debug, Clone)]
pub struct PhiEncoding {
    pub formula: MixedFormula,
    pub memorised: Memorised,
    pub inner: ReachEncoding,
}

pub fn phi_encoding(ta: &TimedAutomaton, start: LocId, target: LocId) -> Result<PhiEncoding, ReachError> {
    ta.check_location(target)?;
    let n = ta.num_clocks();
    let memorised = memorise(ta, start)?;
    let xs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let ps: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    let mut clock_vars = ys.clone();
    clock_vars.extend(ps.iter().cloned());
    clock_vars.push("z".into());
    let free: Vec<String> = xs.iter().chain(&ys).cloned().collect();
    let nfa = quotient(&memorised.automaton, memorised.start, target)?;
    let inner = ReachEncoding::new(nfa, clock_vars, free.clone());
    let formula = if inner.formula.exists.is_empty() {
        inner.formula.clone()
    } else {
        let mut exists: Vec<Binding> = ps
            .iter()
            .chain(std::iter::once(&"z".to_string()))
            .map(|v| Binding {
                var: v.clone(),
                sort: Sort::Real,
            })
            .collect();
        exists.extend(inner.formula.exists.iter().cloned());
        let mut parts: Vec<Matrix> = (0..n)
            .map(|i| {
                atom(
                    vec![(xs[i].clone(), 1), (ps[i].clone(), -1), ("z".into(), 1)],
                    0,
                    Rel::Eq,
                )
            })
            .collect();
        parts.push(inner.formula.matrix.clone());
        MixedFormula {
            free,
            exists,
            matrix: Matrix::And(parts),
        }
    };
    Ok(PhiEncoding {
        formula,
        memorised,
        inner,
    })
}

/// Existential formula over `x1..xn, y1..yn` satisfied exactly by the pairs
/// with `⟨start, x⟩ →* ⟨target, y⟩`.
pub fn build_phi(ta: &TimedAutomaton, start: LocId, target: LocId) -> Result<MixedFormula, ReachError> {
    Ok(phi_encoding(ta, start, target)?.formula)
}

impl PhiEncoding {
    fn dbm_at<T: Scalar>(&self, zone: &BoundedZone, source: &[T], target: &[T], counts: &[i64]) -> ExactDbm<T> {
        let n = source.len();
        let mut dbm = ExactDbm::from_zone(zone);
        for i in 0..n {
            dbm.constrain_eq(i + 1, 0, target[i].clone() - T::from_int(counts[i]));
            dbm.constrain_eq(n + i + 1, 2 * n + 1, source[i].clone() - T::from_int(counts[n + i]));
        }
        dbm
    }

    /// Accepted path of the memorised automaton matching the pair; the
    /// values of the copies are tracked relative to the reference clock.
    pub fn witness<T: Scalar>(&self, source: &[T], target: &[T]) -> Option<Witness> {
        let n = self.memorised.original.len();
        if source.len() != n || target.len() != n || source.iter().chain(target).any(|v| v.is_negative()) {
            return None;
        }
        let mut tracking: Vec<Tracking> = target.iter().map(|v| Tracking::Exact { max: v.floor_int() }).collect();
        for v in source {
            tracking.push(Tracking::Relative {
                reference: 2 * n,
                lo: -1,
                hi: v.floor_int() + 1,
            });
        }
        tracking.push(Tracking::Free);
        let inner = &self.inner;
        inner.run(tracking, |q, c| {
            inner.nfa.nfa.accepting[q as usize]
                && self.dbm_at(&inner.nfa.states[q as usize].zone, source, target, c).is_satisfiable()
        })
    }

    pub fn holds<T: Scalar>(&self, source: &[T], target: &[T]) -> bool {
        self.witness(source, target).is_some()
    }

    /// Values for every variable of φ, built from a witness path.
    pub fn assignment<T: Scalar>(&self, source: &[T], target: &[T], w: &Witness) -> Option<HashMap<String, T>> {
        let n = source.len();
        let zone = &self.inner.nfa.states[w.end() as usize].zone;
        let f = self.dbm_at(zone, source, target, &w.values).pick_point()?;
        let counts = w.letter_counts(2 * n + 1);
        let clocks: Vec<T> = (0..=2 * n).map(|i| T::from_int(counts[i] as i64) + f[i].clone()).collect();
        let mut a = self.inner.assignment(&clocks, w)?;
        for (i, v) in source.iter().enumerate() {
            a.insert(format!("x{}", i + 1), v.clone());
        }
        Some(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Edge, Guard, GuardAtom, GuardRel, ClockId, ClockSet};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn no_edges(clocks: usize) -> TimedAutomaton {
        let names = ["x", "y"][..clocks].iter().map(|s| s.to_string()).collect();
        TimedAutomaton::new(vec!["l0".into()], names, vec![]).unwrap()
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
    fn psi_without_edges_is_nonnegativity() {
        let e = psi_encoding(&no_edges(1), LocId(0), LocId(0)).unwrap();
        e.formula.check_shape().unwrap();
        for v in [r(0, 1), r(1, 2), r(1, 1), r(7, 3)] {
            assert!(e.holds(&[v]));
            assert!(e.decide(&[v]).unwrap());
            let w = e.witness(&[v]).unwrap();
            let a = e.assignment(&[v], &w).unwrap();
            assert!(e.formula.eval(&a).unwrap());
        }
    }

    #[test]
    fn psi_of_the_worked_example() {
        let e = psi_encoding(&worked_example(), LocId(0), LocId(1)).unwrap();
        e.formula.check_shape().unwrap();
        for (x, y) in [(r(0, 1), r(1, 1)), (r(1, 2), r(3, 2)), (r(2, 1), r(3, 1)), (r(1, 2), r(1, 2)), (r(1, 1), r(1, 1))] {
            let want = y == x + 1;
            assert_eq!(e.holds(&[x, y]), want, "({x}, {y})");
            if let Some(w) = e.witness(&[x, y]) {
                let a = e.assignment(&[x, y], &w).unwrap();
                assert!(e.formula.eval(&a).unwrap());
            }
        }
    }

    #[test]
    fn unreachable_target_is_false() {
        let ta = TimedAutomaton::new(vec!["a".into(), "b".into()], vec!["x".into()], vec![]).unwrap();
        let f = build_psi(&ta, LocId(0), LocId(1)).unwrap();
        assert_eq!(f.matrix, Matrix::ff());
        assert!(f.exists.is_empty());
    }

    #[test]
    fn phi_without_edges_is_forward_delay() {
        let e = phi_encoding(&no_edges(1), LocId(0), LocId(0)).unwrap();
        e.formula.check_shape().unwrap();
        let vals = [r(0, 1), r(1, 2), r(1, 1), r(3, 2), r(2, 1)];
        for &a in &vals {
            for &b in &vals {
                assert_eq!(e.holds(&[a], &[b]), b >= a, "{a} -> {b}");
                if let Some(w) = e.witness(&[a], &[b]) {
                    let asg = e.assignment(&[a], &[b], &w).unwrap();
                    assert!(e.formula.eval(&asg).unwrap());
                }
            }
        }
    }
}
