use std::collections::{HashMap, VecDeque};

/// How a letter's occurrences are followed during a counting search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tracking {
    /// Exact count, pruned above `max`.
    Exact { max: i64 },
    /// Not tracked.
    Free,
    /// Count minus the count of letter `reference`, pruned outside
    /// `[lo, hi]`. The reference letter must be `Free`.
    Relative { reference: usize, lo: i64, hi: i64 },
}

/// One step of a witness path: `(label, state reached)`.
pub type Step = (Option<u32>, u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub start: u32,
    pub steps: Vec<Step>,
    /// Tracked values at the end (0 for free letters).
    pub values: Vec<i64>,
}

impl Witness {
    pub fn end(&self) -> u32 {
        self.steps.last().map_or(self.start, |s| s.1)
    }

    /// Occurrences of every letter along the path.
    pub fn letter_counts(&self, alphabet: usize) -> Vec<u64> {
        let mut c = vec![0; alphabet];
        for &(l, _) in &self.steps {
            if let Some(a) = l {
                c[a as usize] += 1;
            }
        }
        c
    }
}

type Key = (u32, Box<[i64]>);
/// A search node and its parent with the label leading to it.
type Node = (Key, Option<(usize, Option<u32>)>);

/// Breadth-first search over `(state, tracked values)` pairs.
///
/// Silent steps leave the values unchanged and pruning only discards pairs
/// whose values can no longer end inside the bounds, so the search is exact
/// whenever every prefix of a wanted path stays inside them.
pub struct CountSearch {
    tracking: Vec<Tracking>,
    /// Letters whose relative value moves when the key letter occurs.
    dependents: Vec<Vec<usize>>,
}

impl CountSearch {
    pub fn new(tracking: Vec<Tracking>) -> Self {
        let mut dependents = vec![Vec::new(); tracking.len()];
        for (k, t) in tracking.iter().enumerate() {
            if let Tracking::Relative { reference, .. } = *t {
                assert!(
                    matches!(tracking[reference], Tracking::Free),
                    "reference letters must be free"
                );
                dependents[reference].push(k);
            }
        }
        CountSearch { tracking, dependents }
    }

    fn within(&self, values: &[i64]) -> bool {
        self.tracking.iter().zip(values).all(|(t, &v)| match *t {
            Tracking::Exact { max } => v <= max,
            Tracking::Free => true,
            Tracking::Relative { lo, hi, .. } => lo <= v && v <= hi,
        })
    }

    fn apply(&self, values: &[i64], letter: Option<u32>) -> Vec<i64> {
        let mut v = values.to_vec();
        if let Some(a) = letter {
            let a = a as usize;
            match self.tracking[a] {
                Tracking::Free => {
                    for &k in &self.dependents[a] {
                        v[k] -= 1;
                    }
                }
                _ => v[a] += 1,
            }
        }
        v
    }

    /// Runs the search from `initial` pairs; `successors` may build states
    /// lazily. Returns the first path whose end satisfies `accept`.
    pub fn run<F, A>(&self, initial: &[(u32, Vec<i64>)], mut successors: F, mut accept: A) -> Option<Witness>
    where
        F: FnMut(u32) -> Vec<Step>,
        A: FnMut(u32, &[i64]) -> bool,
    {
        let mut nodes: Vec<Node> = Vec::new();
        let mut index: HashMap<Key, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for (q, v) in initial {
            let key: Key = (*q, v.clone().into_boxed_slice());
            if !self.within(v) || index.contains_key(&key) {
                continue;
            }
            index.insert(key.clone(), nodes.len());
            queue.push_back(nodes.len());
            nodes.push((key, None));
        }
        while let Some(i) = queue.pop_front() {
            let (q, values) = {
                let k = &nodes[i].0;
                (k.0, k.1.clone())
            };
            if accept(q, &values) {
                return Some(Self::path(&nodes, i));
            }
            for (label, to) in successors(q) {
                let next = self.apply(&values, label);
                if !self.within(&next) {
                    continue;
                }
                let key: Key = (to, next.into_boxed_slice());
                if index.contains_key(&key) {
                    continue;
                }
                index.insert(key.clone(), nodes.len());
                queue.push_back(nodes.len());
                nodes.push((key, Some((i, label))));
            }
        }
        None
    }

    fn path(nodes: &[Node], end: usize) -> Witness {
        let mut steps = Vec::new();
        let mut i = end;
        while let Some((parent, label)) = nodes[i].1 {
            steps.push((label, nodes[i].0 .0));
            i = parent;
        }
        steps.reverse();
        Witness {
            start: nodes[i].0 .0,
            steps,
            values: nodes[end].0 .1.to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_values_follow_the_reference() {
        // letters: 0 exact, 1 free reference, 2 relative to 1
        let s = CountSearch::new(vec![
            Tracking::Exact { max: 1 },
            Tracking::Free,
            Tracking::Relative { reference: 1, lo: -1, hi: 1 },
        ]);
        assert_eq!(s.apply(&[0, 0, 0], Some(1)), vec![0, 0, -1]);
        assert_eq!(s.apply(&[0, 0, 0], Some(2)), vec![0, 0, 1]);
        assert_eq!(s.apply(&[0, 0, 0], None), vec![0, 0, 0]);
        assert!(!s.within(&[2, 0, 0]));
        assert!(!s.within(&[0, 0, -2]));
    }

    #[test]
    fn finds_shortest_witness() {
        // 0 -a-> 1 -a-> 2, 0 -eps-> 2
        let succ = |q: u32| match q {
            0 => vec![(Some(0), 1), (None, 2)],
            1 => vec![(Some(0), 2)],
            _ => vec![],
        };
        let s = CountSearch::new(vec![Tracking::Exact { max: 3 }]);
        let w = s.run(&[(0, vec![0])], succ, |q, v| q == 2 && v[0] == 2).unwrap();
        assert_eq!(w.steps, vec![(Some(0), 1), (Some(0), 2)]);
        assert_eq!(w.letter_counts(1), vec![2]);
        let w = s.run(&[(0, vec![0])], succ, |q, v| q == 2 && v[0] == 0).unwrap();
        assert_eq!(w.steps, vec![(None, 2)]);
        assert!(s.run(&[(0, vec![0])], succ, |q, v| q == 2 && v[0] == 1).is_none());
    }
}
