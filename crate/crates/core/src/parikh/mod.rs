//! Parikh images of finite automata: exact membership by counting search and
//! an existential flow encoding.

mod search;

use std::collections::{HashMap, VecDeque};

pub use search::{CountSearch, Step, Tracking, Witness};

use crate::formula::{decide_integer, Atom, Binding, Matrix, MixedFormula, Rel, SolveError, Sort};
use crate::nfa::Nfa;
use crate::Rational;

/// Whether some word accepted from `initial` has letter counts `counts`.
pub fn parikh_member(nfa: &Nfa, initial: u32, counts: &[u64]) -> bool {
    assert_eq!(counts.len(), nfa.alphabet, "one count per letter");
    let target: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
    let search = CountSearch::new(target.iter().map(|&max| Tracking::Exact { max }).collect());
    let out = nfa.out_lists();
    search
        .run(
            &[(initial, vec![0; nfa.alphabet])],
            |q| {
                out[q as usize]
                    .iter()
                    .map(|&t| (nfa.transitions[t].label, nfa.transitions[t].to))
                    .collect()
            },
            |q, v| nfa.accepting[q as usize] && v == target.as_slice(),
        )
        .is_some()
}

/// Variable names of a flow encoding.
#[derive(Debug, Clone)]
pub struct FlowNames {
    /// Per transition.
    pub flow: Vec<String>,
    /// Per source state.
    pub source: Vec<String>,
    /// Per sink state.
    pub sink: Vec<String>,
    /// Per automaton state.
    pub depth: Vec<String>,
}

/// Flow encoding of the accepted paths of `nfa` that start in one of
/// `sources` and end in one of `sinks`: exactly one source and one sink are
/// selected, flow is conserved, and every state carrying flow is connected to
/// the selected source by a chain of used transitions with increasing depth.
/// `letters[k]` is the name of the count of letter `k`.
#[derive(Debug, Clone)]
pub struct FlowEncoding {
    pub sources: Vec<u32>,
    pub sinks: Vec<u32>,
    pub names: FlowNames,
    pub letters: Vec<String>,
    pub bindings: Vec<Binding>,
    pub constraints: Vec<Matrix>,
}

fn le(terms: Vec<(String, i64)>, constant: i64) -> Matrix {
    Matrix::Atom(Atom::new(terms, constant, Rel::Le))
}

fn eq(terms: Vec<(String, i64)>, constant: i64) -> Matrix {
    Matrix::Atom(Atom::new(terms, constant, Rel::Eq))
}

impl FlowEncoding {
    pub fn new(nfa: &Nfa, sources: &[u32], sinks: &[u32], letters: &[String]) -> Self {
        assert_eq!(letters.len(), nfa.alphabet, "one name per letter");
        let n = nfa.num_states;
        let names = FlowNames {
            flow: (1..=nfa.transitions.len()).map(|i| format!("f{i}")).collect(),
            source: (1..=sources.len()).map(|i| format!("s{i}")).collect(),
            sink: (1..=sinks.len()).map(|i| format!("a{i}")).collect(),
            depth: (1..=n).map(|i| format!("d{i}")).collect(),
        };
        let mut bindings = Vec::new();
        for v in names.flow.iter().chain(&names.source).chain(&names.sink).chain(&names.depth) {
            bindings.push(Binding {
                var: v.clone(),
                sort: Sort::Int,
            });
        }
        let mut c = Vec::new();
        for f in &names.flow {
            c.push(le(vec![(f.clone(), -1)], 0));
        }
        for group in [&names.source, &names.sink] {
            for v in group.iter() {
                c.push(le(vec![(v.clone(), -1)], 0));
                c.push(le(vec![(v.clone(), 1)], -1));
            }
            c.push(eq(group.iter().map(|v| (v.clone(), 1)).collect(), -1));
        }
        for d in &names.depth {
            c.push(le(vec![(d.clone(), -1)], 0));
            c.push(le(vec![(d.clone(), 1)], -(n as i64)));
        }
        let inc = nfa.in_lists();
        let out = nfa.out_lists();
        for q in 0..n {
            let mut terms = Vec::new();
            let mut inflow = Vec::new();
            for &t in &inc[q] {
                terms.push((names.flow[t].clone(), 1));
                inflow.push((names.flow[t].clone(), 1));
            }
            for &t in &out[q] {
                terms.push((names.flow[t].clone(), -1));
            }
            for (i, &s) in sources.iter().enumerate() {
                if s as usize == q {
                    terms.push((names.source[i].clone(), 1));
                    inflow.push((names.source[i].clone(), 1));
                }
            }
            for (j, &s) in sinks.iter().enumerate() {
                if s as usize == q {
                    terms.push((names.sink[j].clone(), -1));
                }
            }
            if terms.is_empty() {
                continue;
            }
            c.push(eq(terms, 0));
            if inflow.is_empty() {
                continue;
            }
            let d_q = &names.depth[q];
            let mut alts = vec![le(inflow, 0)];
            for (i, &s) in sources.iter().enumerate() {
                if s as usize == q {
                    alts.push(Matrix::And(vec![
                        eq(vec![(names.source[i].clone(), 1)], -1),
                        eq(vec![(d_q.clone(), 1)], 0),
                    ]));
                }
            }
            for &t in &inc[q] {
                let p = nfa.transitions[t].from as usize;
                if p == q {
                    continue;
                }
                alts.push(Matrix::And(vec![
                    le(vec![(names.flow[t].clone(), -1)], 1),
                    eq(vec![(d_q.clone(), 1), (names.depth[p].clone(), -1)], -1),
                ]));
            }
            c.push(Matrix::Or(alts));
        }
        for (k, u) in letters.iter().enumerate() {
            let mut terms = vec![(u.clone(), 1)];
            for (t, tr) in nfa.transitions.iter().enumerate() {
                if tr.label == Some(k as u32) {
                    terms.push((names.flow[t].clone(), -1));
                }
            }
            c.push(eq(terms, 0));
        }
        FlowEncoding {
            sources: sources.to_vec(),
            sinks: sinks.to_vec(),
            names,
            letters: letters.to_vec(),
            bindings,
            constraints: c,
        }
    }

    /// Values of the encoding's variables describing the path `w`.
    /// `w.start` must be a source and its end a sink.
    pub fn assignment(&self, nfa: &Nfa, w: &Witness) -> Option<HashMap<String, i64>> {
        let si = self.sources.iter().position(|&s| s == w.start)?;
        let ai = self.sinks.iter().position(|&s| s == w.end())?;
        let mut flow = vec![0i64; nfa.transitions.len()];
        let out = nfa.out_lists();
        let mut cur = w.start;
        for &(label, to) in &w.steps {
            let t = out[cur as usize]
                .iter()
                .copied()
                .find(|&t| nfa.transitions[t].label == label && nfa.transitions[t].to == to)?;
            flow[t] += 1;
            cur = to;
        }
        let mut depth = vec![0i64; nfa.num_states];
        let mut seen = vec![false; nfa.num_states];
        seen[w.start as usize] = true;
        let mut queue = VecDeque::from([w.start]);
        while let Some(q) = queue.pop_front() {
            for &t in &out[q as usize] {
                let to = nfa.transitions[t].to as usize;
                if flow[t] > 0 && !seen[to] {
                    seen[to] = true;
                    depth[to] = depth[q as usize] + 1;
                    queue.push_back(to as u32);
                }
            }
        }
        let mut a = HashMap::new();
        for (t, f) in flow.iter().enumerate() {
            a.insert(self.names.flow[t].clone(), *f);
        }
        for (i, s) in self.names.source.iter().enumerate() {
            a.insert(s.clone(), (i == si) as i64);
        }
        for (j, s) in self.names.sink.iter().enumerate() {
            a.insert(s.clone(), (j == ai) as i64);
        }
        for (q, d) in self.names.depth.iter().enumerate() {
            a.insert(d.clone(), depth[q]);
        }
        for (k, u) in self.letters.iter().enumerate() {
            let count = nfa
                .transitions
                .iter()
                .enumerate()
                .filter(|(_, tr)| tr.label == Some(k as u32))
                .map(|(t, _)| flow[t])
                .sum();
            a.insert(u.clone(), count);
        }
        Some(a)
    }

    /// Domains implied by the encoding once the letter counts sum to at most
    /// `letters`: some accepted path reads every letter at most that often
    /// and never repeats a state between two letters.
    pub fn domains(&self, nfa: &Nfa, letters: u64) -> HashMap<String, (i64, i64)> {
        let n = nfa.num_states as i64;
        let max_flow = n.saturating_mul(letters as i64 + 1);
        let mut b = HashMap::new();
        for f in &self.names.flow {
            b.insert(f.clone(), (0, max_flow));
        }
        for v in self.names.source.iter().chain(&self.names.sink) {
            b.insert(v.clone(), (0, 1));
        }
        for d in &self.names.depth {
            b.insert(d.clone(), (0, n));
        }
        b
    }
}

/// Existential formula over letter counts `c1..ck` (free) describing the
/// Parikh image of the words accepted from one state.
#[derive(Debug, Clone)]
pub struct SemilinearEncoding {
    pub formula: MixedFormula,
    pub flow: FlowEncoding,
    pub nfa: Nfa,
    pub initial: u32,
}

/// Flow encoding of `{π(w) : w accepted from initial}`.
pub fn parikh_encoding(nfa: &Nfa, initial: u32) -> SemilinearEncoding {
    let letters: Vec<String> = (1..=nfa.alphabet).map(|k| format!("c{k}")).collect();
    let sinks: Vec<u32> = (0..nfa.num_states as u32).filter(|&q| nfa.accepting[q as usize]).collect();
    let flow = FlowEncoding::new(nfa, &[initial], &sinks, &letters);
    let formula = MixedFormula {
        free: letters,
        exists: flow.bindings.clone(),
        matrix: Matrix::And(flow.constraints.clone()),
    };
    SemilinearEncoding {
        formula,
        flow,
        nfa: nfa.clone(),
        initial,
    }
}

impl SemilinearEncoding {
    /// Whether the encoding holds for `counts`, decided by the bounded solver.
    pub fn satisfiable(&self, counts: &[u64]) -> Result<bool, SolveError> {
        let fixed: HashMap<String, Rational> = self
            .flow
            .letters
            .iter()
            .zip(counts)
            .map(|(v, &c)| (v.clone(), Rational::from_integer(c as i64)))
            .collect();
        let domains = self.flow.domains(&self.nfa, counts.iter().sum());
        Ok(decide_integer(&self.formula, &fixed, &domains)?.is_some())
    }

    /// Membership by counting search on the underlying automaton.
    pub fn member(&self, counts: &[u64]) -> bool {
        parikh_member(&self.nfa, self.initial, counts)
    }
}
