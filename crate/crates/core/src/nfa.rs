//! Plain finite automata over a letter alphabet `0..alphabet`, with optional
//! silent transitions.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: u32,
    /// `None` is a silent transition.
    pub label: Option<u32>,
    pub to: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    pub num_states: usize,
    pub alphabet: usize,
    pub transitions: Vec<Transition>,
    pub initial: Vec<u32>,
    pub accepting: Vec<bool>,
}

impl Nfa {
    pub fn new(num_states: usize, alphabet: usize) -> Self {
        Nfa {
            num_states,
            alphabet,
            transitions: Vec::new(),
            initial: Vec::new(),
            accepting: vec![false; num_states],
        }
    }

    pub fn add(&mut self, from: u32, label: Option<u32>, to: u32) {
        self.transitions.push(Transition { from, label, to });
    }

    pub fn is_epsilon_free(&self) -> bool {
        self.transitions.iter().all(|t| t.label.is_some())
    }

    /// Outgoing transition indices per state.
    pub fn out_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_states];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.from as usize].push(i);
        }
        out
    }

    pub fn in_lists(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_states];
        for (i, t) in self.transitions.iter().enumerate() {
            inc[t.to as usize].push(i);
        }
        inc
    }

    /// States reachable from `from` by silent transitions, `from` included.
    pub fn epsilon_closure(&self, out: &[Vec<usize>], from: u32) -> Vec<u32> {
        let mut seen = vec![false; self.num_states];
        let mut stack = vec![from];
        seen[from as usize] = true;
        let mut res = Vec::new();
        while let Some(q) = stack.pop() {
            res.push(q);
            for &ti in &out[q as usize] {
                let t = self.transitions[ti];
                if t.label.is_none() && !seen[t.to as usize] {
                    seen[t.to as usize] = true;
                    stack.push(t.to);
                }
            }
        }
        res.sort_unstable();
        res
    }

    /// Language-equivalent automaton without silent transitions on the same
    /// state set: `p -a-> r` whenever `p ~ε~> q -a-> r`, and `p` accepts when
    /// its closure contains an accepting state.
    pub fn eliminate_epsilon(&self) -> Nfa {
        let out = self.out_lists();
        let mut res = Nfa::new(self.num_states, self.alphabet);
        res.initial = self.initial.clone();
        let mut seen = std::collections::HashSet::new();
        for p in 0..self.num_states as u32 {
            for q in self.epsilon_closure(&out, p) {
                if self.accepting[q as usize] {
                    res.accepting[p as usize] = true;
                }
                for &ti in &out[q as usize] {
                    let t = self.transitions[ti];
                    if let Some(a) = t.label {
                        if seen.insert((p, a, t.to)) {
                            res.add(p, Some(a), t.to);
                        }
                    }
                }
            }
        }
        res
    }

    fn forward_reachable(&self) -> Vec<bool> {
        let out = self.out_lists();
        let mut seen = vec![false; self.num_states];
        let mut queue: VecDeque<u32> = VecDeque::new();
        for &i in &self.initial {
            if !seen[i as usize] {
                seen[i as usize] = true;
                queue.push_back(i);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &ti in &out[q as usize] {
                let to = self.transitions[ti].to;
                if !seen[to as usize] {
                    seen[to as usize] = true;
                    queue.push_back(to);
                }
            }
        }
        seen
    }

    fn backward_reachable(&self) -> Vec<bool> {
        let inc = self.in_lists();
        let mut seen = self.accepting.clone();
        let mut queue: VecDeque<u32> = (0..self.num_states as u32)
            .filter(|&q| self.accepting[q as usize])
            .collect();
        while let Some(q) = queue.pop_front() {
            for &ti in &inc[q as usize] {
                let from = self.transitions[ti].from;
                if !seen[from as usize] {
                    seen[from as usize] = true;
                    queue.push_back(from);
                }
            }
        }
        seen
    }

    /// Restriction to states that are both reachable and co-reachable.
    /// Returns the trimmed automaton and, per new state, its old index.
    pub fn trim(&self) -> (Nfa, Vec<u32>) {
        let fwd = self.forward_reachable();
        let bwd = self.backward_reachable();
        let mut map = vec![u32::MAX; self.num_states];
        let mut old = Vec::new();
        for q in 0..self.num_states {
            if fwd[q] && bwd[q] {
                map[q] = old.len() as u32;
                old.push(q as u32);
            }
        }
        let mut res = Nfa::new(old.len(), self.alphabet);
        for (new, &o) in old.iter().enumerate() {
            res.accepting[new] = self.accepting[o as usize];
        }
        res.initial = self
            .initial
            .iter()
            .filter_map(|&i| (map[i as usize] != u32::MAX).then_some(map[i as usize]))
            .collect();
        for t in &self.transitions {
            let (f, to) = (map[t.from as usize], map[t.to as usize]);
            if f != u32::MAX && to != u32::MAX {
                res.add(f, t.label, to);
            }
        }
        (res, old)
    }

    /// Whether some run from `from` reads `word` and ends in an accepting state.
    pub fn accepts_from(&self, from: u32, word: &[u32]) -> bool {
        let out = self.out_lists();
        let close = |set: &mut Vec<bool>| {
            let mut stack: Vec<u32> = (0..self.num_states as u32).filter(|&q| set[q as usize]).collect();
            while let Some(q) = stack.pop() {
                for &ti in &out[q as usize] {
                    let t = self.transitions[ti];
                    if t.label.is_none() && !set[t.to as usize] {
                        set[t.to as usize] = true;
                        stack.push(t.to);
                    }
                }
            }
        };
        let mut cur = vec![false; self.num_states];
        cur[from as usize] = true;
        close(&mut cur);
        for &a in word {
            let mut next = vec![false; self.num_states];
            for t in &self.transitions {
                if cur[t.from as usize] && t.label == Some(a) {
                    next[t.to as usize] = true;
                }
            }
            close(&mut next);
            cur = next;
        }
        (0..self.num_states).any(|q| cur[q] && self.accepting[q])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_silent_path_accepts_empty_word() {
        let mut n = Nfa::new(3, 1);
        n.initial = vec![0];
        n.add(0, None, 1);
        n.add(1, None, 2);
        n.accepting[2] = true;
        let e = n.eliminate_epsilon();
        assert!(e.is_epsilon_free());
        assert!(e.accepting[0]);
        assert!(e.accepts_from(0, &[]));
        assert!(!e.accepts_from(0, &[0]));
    }

    #[test]
    fn loop_behind_silent_step_is_lifted() {
        let mut n = Nfa::new(2, 1);
        n.initial = vec![0];
        n.add(0, None, 1);
        n.add(1, Some(0), 1);
        n.accepting[1] = true;
        let e = n.eliminate_epsilon();
        assert!(e.transitions.contains(&Transition { from: 0, label: Some(0), to: 1 }));
        for k in 0..5 {
            assert!(e.accepts_from(0, &vec![0; k]));
        }
    }

    #[test]
    fn trim_drops_dead_states() {
        let mut n = Nfa::new(4, 1);
        n.initial = vec![0];
        n.add(0, Some(0), 1);
        n.add(0, Some(0), 2);
        n.add(3, Some(0), 1);
        n.accepting[1] = true;
        let (t, old) = n.trim();
        assert_eq!(old, vec![0, 1]);
        assert_eq!(t.transitions.len(), 1);
        assert_eq!(t.initial, vec![0]);
    }
}
