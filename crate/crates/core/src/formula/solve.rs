//! Exact satisfiability for formulas whose bound variables are all integers,
//! once the free variables are fixed: bounds propagation over linear atoms,
//! unit propagation through disjunctions, then branching.

use std::collections::HashMap;

use num_integer::Integer;
use thiserror::Error;

use super::{Matrix, MixedFormula, Rel, Sort};
use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("bound variable {0} is not integer sorted")]
    RealVariable(String),
    #[error("free variable {0} has no value")]
    MissingValue(String),
    #[error("variable {0} needs a finite domain to branch on")]
    Unbounded(String),
    #[error("arithmetic overflow")]
    Overflow,
}

const NEG_INF: i64 = i64::MIN;
const POS_INF: i64 = i64::MAX;

/// `Σ terms + constant ≤ 0`.
#[derive(Debug, Clone)]
struct Lin {
    terms: Vec<(usize, i64)>,
    constant: i64,
}

#[derive(Debug, Clone)]
enum Node {
    Lin(Lin),
    And(Vec<Node>),
    Or(Vec<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    True,
    False,
    Unknown,
}

type Domains = Vec<(i64, i64)>;

fn mul_bound(a: i64, v: i64) -> Option<i64> {
    if v == NEG_INF || v == POS_INF {
        return None;
    }
    a.checked_mul(v)
}

impl Lin {
    /// Smallest and largest value of the left-hand side, `None` if unbounded.
    fn range(&self, d: &Domains) -> (Option<i64>, Option<i64>) {
        let mut lo = Some(self.constant);
        let mut hi = Some(self.constant);
        for &(v, a) in &self.terms {
            let (l, h) = d[v];
            let (min, max) = if a > 0 { (l, h) } else { (h, l) };
            lo = lo.and_then(|s| mul_bound(a, min).and_then(|t| s.checked_add(t)));
            hi = hi.and_then(|s| mul_bound(a, max).and_then(|t| s.checked_add(t)));
        }
        (lo, hi)
    }

    fn status(&self, d: &Domains) -> Status {
        match self.range(d) {
            (Some(lo), _) if lo > 0 => Status::False,
            (_, Some(hi)) if hi <= 0 => Status::True,
            _ => Status::Unknown,
        }
    }

    /// Tightens domains; `false` when a domain becomes empty.
    fn propagate(&self, d: &mut Domains, changed: &mut bool) -> bool {
        for (i, &(v, a)) in self.terms.iter().enumerate() {
            // a·x ≤ -(constant + Σ_{others} min)
            let mut rest = Some(self.constant);
            for (j, &(w, b)) in self.terms.iter().enumerate() {
                if i != j {
                    let (l, h) = d[w];
                    let min = if b > 0 { l } else { h };
                    rest = rest.and_then(|s| mul_bound(b, min).and_then(|t| s.checked_add(t)));
                }
            }
            let Some(rest) = rest else { continue };
            let rhs = -rest;
            let (l, h) = d[v];
            if a > 0 {
                let ub = Integer::div_floor(&rhs, &a);
                if ub < h {
                    d[v].1 = ub;
                    *changed = true;
                }
            } else {
                let lb = Integer::div_ceil(&-rhs, &-a);
                if lb > l {
                    d[v].0 = lb;
                    *changed = true;
                }
            }
            if d[v].0 > d[v].1 {
                return false;
            }
        }
        true
    }
}

fn status(n: &Node, d: &Domains) -> Status {
    match n {
        Node::Lin(l) => l.status(d),
        Node::And(v) => {
            let mut all = true;
            for c in v {
                match status(c, d) {
                    Status::False => return Status::False,
                    Status::Unknown => all = false,
                    Status::True => {}
                }
            }
            if all {
                Status::True
            } else {
                Status::Unknown
            }
        }
        Node::Or(v) => {
            let mut none = true;
            for c in v {
                match status(c, d) {
                    Status::True => return Status::True,
                    Status::Unknown => none = false,
                    Status::False => {}
                }
            }
            if none {
                Status::False
            } else {
                Status::Unknown
            }
        }
    }
}

/// Rounds of bound tightening before falling back to branching; long chains
/// of tightening by one step are left to the search.
const TIGHTEN_ROUNDS: usize = 64;

/// Propagates to a fixpoint. Returns the remaining linear constraints and
/// undecided disjunctions, or `None` on conflict.
fn propagate(mut work: Vec<Node>, d: &mut Domains) -> Option<(Vec<Lin>, Vec<Vec<Node>>)> {
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut lins = Vec::new();
        let mut ors: Vec<Vec<Node>> = Vec::new();
        let mut stack = std::mem::take(&mut work);
        while let Some(n) = stack.pop() {
            match n {
                Node::Lin(l) => lins.push(l),
                Node::And(v) => stack.extend(v),
                Node::Or(v) => ors.push(v),
            }
        }
        let mut tightened = false;
        for l in &lins {
            if !l.propagate(d, &mut tightened) {
                return None;
            }
        }
        let mut structural = false;
        let mut open = Vec::new();
        for alts in ors {
            let mut alive = Vec::new();
            let mut done = false;
            for c in alts {
                match status(&c, d) {
                    Status::True => {
                        done = true;
                        break;
                    }
                    Status::False => {}
                    Status::Unknown => alive.push(c),
                }
            }
            if done {
                continue;
            }
            match alive.len() {
                0 => return None,
                1 => {
                    work.push(alive.pop().expect("one alternative"));
                    structural = true;
                }
                _ => open.push(alive),
            }
        }
        lins.retain(|l| l.status(d) != Status::True);
        if !structural && (!tightened || rounds > TIGHTEN_ROUNDS) {
            return Some((lins, open));
        }
        work.extend(lins.into_iter().map(Node::Lin));
        work.extend(open.into_iter().map(Node::Or));
    }
}

fn search(work: Vec<Node>, mut d: Domains, names: &[String]) -> Result<Option<Domains>, SolveError> {
    let Some((lins, mut ors)) = propagate(work, &mut d) else {
        return Ok(None);
    };
    if !ors.is_empty() {
        let pick = (0..ors.len()).min_by_key(|&i| ors[i].len()).expect("non-empty");
        let alts = ors.swap_remove(pick);
        let base: Vec<Node> = lins
            .iter()
            .cloned()
            .map(Node::Lin)
            .chain(ors.into_iter().map(Node::Or))
            .collect();
        for alt in alts {
            let mut w = base.clone();
            w.push(alt);
            if let Some(sol) = search(w, d.clone(), names)? {
                return Ok(Some(sol));
            }
        }
        return Ok(None);
    }
    // only linear constraints left: branch on the smallest open domain
    let mut used = vec![false; d.len()];
    for l in &lins {
        for &(v, _) in &l.terms {
            used[v] = true;
        }
    }
    let open = (0..d.len())
        .filter(|&v| used[v] && d[v].0 != d[v].1)
        .min_by_key(|&v| (d[v].1 as i128) - (d[v].0 as i128));
    let Some(v) = open else {
        return Ok(lins.iter().all(|l| l.status(&d) == Status::True).then_some(d));
    };
    let (lo, hi) = d[v];
    if lo == NEG_INF || hi == POS_INF {
        return Err(SolveError::Unbounded(names[v].clone()));
    }
    let mid = lo + (hi - lo) / 2;
    for half in [(lo, mid), (mid + 1, hi)] {
        let mut d2 = d.clone();
        d2[v] = half;
        let w = lins.iter().cloned().map(Node::Lin).collect();
        if let Some(sol) = search(w, d2, names)? {
            return Ok(Some(sol));
        }
    }
    Ok(None)
}

struct Builder<'a> {
    fixed: &'a HashMap<String, Rational>,
    index: HashMap<String, usize>,
}

impl Builder<'_> {
    fn node(&self, m: &Matrix) -> Result<Node, SolveError> {
        Ok(match m {
            Matrix::And(v) => Node::And(v.iter().map(|c| self.node(c)).collect::<Result<_, _>>()?),
            Matrix::Or(v) => Node::Or(v.iter().map(|c| self.node(c)).collect::<Result<_, _>>()?),
            Matrix::Atom(a) => {
                let mut constant = Rational::from_integer(a.constant);
                let mut terms = Vec::new();
                for (v, &c) in &a.coeffs {
                    if let Some(&i) = self.index.get(v) {
                        terms.push((i, c));
                    } else {
                        let x = self.fixed.get(v).ok_or_else(|| SolveError::MissingValue(v.clone()))?;
                        constant += Rational::from_integer(c) * x;
                    }
                }
                let den = *constant.denom();
                let scaled: Vec<(usize, i64)> = terms
                    .iter()
                    .map(|&(i, c)| c.checked_mul(den).map(|k| (i, k)))
                    .collect::<Option<_>>()
                    .ok_or(SolveError::Overflow)?;
                let num = *constant.numer();
                let le = |k: i64| Lin {
                    terms: scaled.clone(),
                    constant: k,
                };
                let neg = |k: i64| Lin {
                    terms: scaled.iter().map(|&(i, c)| (i, -c)).collect(),
                    constant: -k,
                };
                match a.rel {
                    Rel::Le => Node::Lin(le(num)),
                    Rel::Lt => Node::Lin(le(num.checked_add(1).ok_or(SolveError::Overflow)?)),
                    Rel::Eq => Node::And(vec![Node::Lin(le(num)), Node::Lin(neg(num))]),
                }
            }
        })
    }
}

/// Decides `formula` with free variables fixed to `fixed`. Bound variables
/// must be integers; `bounds` adds domains `[lo, hi]` for some of them, and
/// every variable the search has to branch on needs a finite domain after
/// propagation. Returns a model of the bound variables if satisfiable.
pub fn decide_integer(
    formula: &MixedFormula,
    fixed: &HashMap<String, Rational>,
    bounds: &HashMap<String, (i64, i64)>,
) -> Result<Option<HashMap<String, i64>>, SolveError> {
    let mut index = HashMap::new();
    let mut names = Vec::new();
    for b in &formula.exists {
        if b.sort != Sort::Int {
            return Err(SolveError::RealVariable(b.var.clone()));
        }
        index.insert(b.var.clone(), names.len());
        names.push(b.var.clone());
    }
    let builder = Builder { fixed, index };
    let root = builder.node(&formula.matrix)?;
    let mut d: Domains = vec![(NEG_INF, POS_INF); names.len()];
    for (v, &(lo, hi)) in bounds {
        if let Some(&i) = builder.index.get(v) {
            d[i] = (d[i].0.max(lo), d[i].1.min(hi));
        }
    }
    Ok(search(vec![root], d, &names)?.map(|d| {
        names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let (lo, hi) = d[i];
                let v = if lo != NEG_INF {
                    lo
                } else if hi != POS_INF {
                    hi.min(0)
                } else {
                    0
                };
                (n.clone(), v)
            })
            .collect()
    }))
}
