//! Existential formulas of mixed linear arithmetic: real variables, integer
//! sorted variables, linear atoms and positive boolean structure.

mod smt;
mod solve;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use smt::{emit_smtlib, parse_smtlib};
pub use solve::{decide_integer, SolveError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("variable {0} has no value")]
    Unassigned(String),
    #[error("integer variable {0} has non-integral value")]
    NotIntegral(String),
    #[error("invalid JSON formula: {0}")]
    Json(String),
    #[error("SMT-LIB syntax error at byte {offset}: {message}")]
    SmtSyntax { offset: usize, message: String },
    #[error("unsupported SMT-LIB construct: {0}")]
    SmtUnsupported(String),
    #[error("variable {0} is bound twice")]
    DuplicateBinding(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    Int,
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rel {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
        }
    }

    fn holds<T: Scalar>(self, v: &T) -> bool {
        match self {
            Rel::Lt => v.is_negative(),
            Rel::Le => !v.is_positive(),
            Rel::Eq => v.is_zero(),
        }
    }
}

/// `Σ coeffs[v]·v + const ∼ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub coeffs: BTreeMap<String, i64>,
    #[serde(rename = "const")]
    pub constant: i64,
    pub rel: Rel,
}

impl Atom {
    /// Builds an atom, merging repeated variables and dropping zero terms.
    pub fn new<S: Into<String>>(terms: impl IntoIterator<Item = (S, i64)>, constant: i64, rel: Rel) -> Self {
        let mut coeffs = BTreeMap::new();
        for (v, c) in terms {
            *coeffs.entry(v.into()).or_insert(0) += c;
        }
        coeffs.retain(|_, c| *c != 0);
        Atom { coeffs, constant, rel }
    }

    pub fn eval<T: Scalar>(&self, value: &impl Fn(&str) -> Option<T>) -> Result<bool, FormulaError> {
        let mut sum = T::from_int(self.constant);
        for (v, &c) in &self.coeffs {
            let x = value(v).ok_or_else(|| FormulaError::Unassigned(v.clone()))?;
            sum = sum + T::from_int(c) * x;
        }
        Ok(self.rel.holds(&sum))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in &self.coeffs {
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{v}")?;
            } else {
                write!(f, "{sign}{mag}*{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if self.constant != 0 {
            write!(f, "{}{}", if self.constant < 0 { "-" } else { "+" }, self.constant.abs())?;
        }
        write!(f, " {} 0", self.rel.symbol())
    }
}

/// Quantifier-free positive boolean combination of atoms. `And([])` is true
/// and `Or([])` is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Matrix {
    Atom(Atom),
    And(Vec<Matrix>),
    Or(Vec<Matrix>),
}

impl Matrix {
    pub fn tt() -> Matrix {
        Matrix::And(Vec::new())
    }

    pub fn ff() -> Matrix {
        Matrix::Or(Vec::new())
    }

    pub fn atom(a: Atom) -> Matrix {
        Matrix::Atom(a)
    }

    pub fn eval<T: Scalar>(&self, value: &impl Fn(&str) -> Option<T>) -> Result<bool, FormulaError> {
        match self {
            Matrix::Atom(a) => a.eval(value),
            Matrix::And(v) => {
                for m in v {
                    if !m.eval(value)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Matrix::Or(v) => {
                for m in v {
                    if m.eval(value)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Matrix::Atom(_) => 1,
            Matrix::And(v) | Matrix::Or(v) => v.iter().map(Matrix::atom_count).sum(),
        }
    }

    pub fn variables(&self, out: &mut HashSet<String>) {
        match self {
            Matrix::Atom(a) => out.extend(a.coeffs.keys().cloned()),
            Matrix::And(v) | Matrix::Or(v) => v.iter().for_each(|m| m.variables(out)),
        }
    }

    /// Flattens nested connectives of the same kind and unwraps singletons.
    pub fn normalized(&self) -> Matrix {
        match self {
            Matrix::Atom(a) => Matrix::Atom(a.clone()),
            Matrix::And(v) | Matrix::Or(v) => {
                let is_and = matches!(self, Matrix::And(_));
                let mut out = Vec::new();
                for m in v {
                    match m.normalized() {
                        Matrix::And(inner) if is_and => out.extend(inner),
                        Matrix::Or(inner) if !is_and => out.extend(inner),
                        other => out.push(other),
                    }
                }
                if out.len() == 1 {
                    out.pop().expect("one element")
                } else if is_and {
                    Matrix::And(out)
                } else {
                    Matrix::Or(out)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Binding {
    pub var: String,
    pub sort: Sort,
}

/// `∃ prefix . matrix`, with real-valued free variables `free`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedFormula {
    pub free: Vec<String>,
    pub exists: Vec<Binding>,
    pub matrix: Matrix,
}

impl MixedFormula {
    /// Truth under an assignment of every free and bound variable; integer
    /// sorted variables must receive integral values.
    pub fn eval<T: Scalar>(&self, assignment: &HashMap<String, T>) -> Result<bool, FormulaError> {
        for b in &self.exists {
            if b.sort == Sort::Int {
                let v = assignment
                    .get(&b.var)
                    .ok_or_else(|| FormulaError::Unassigned(b.var.clone()))?;
                if !v.is_integral() {
                    return Err(FormulaError::NotIntegral(b.var.clone()));
                }
            }
        }
        self.matrix.eval(&|v: &str| assignment.get(v).cloned())
    }

    pub fn atom_count(&self) -> usize {
        self.matrix.atom_count()
    }

    pub fn sort_of(&self, var: &str) -> Option<Sort> {
        if self.free.iter().any(|f| f == var) {
            return Some(Sort::Real);
        }
        self.exists.iter().find(|b| b.var == var).map(|b| b.sort)
    }

    /// Checks the single-block shape: distinct names, and every variable of
    /// the matrix is free or bound.
    pub fn check_shape(&self) -> Result<(), FormulaError> {
        let mut seen: HashSet<&str> = HashSet::new();
        for v in self.free.iter().chain(self.exists.iter().map(|b| &b.var)) {
            if !seen.insert(v) {
                return Err(FormulaError::DuplicateBinding(v.clone()));
            }
        }
        let mut used = HashSet::new();
        self.matrix.variables(&mut used);
        match used.into_iter().find(|v| !seen.contains(v.as_str())) {
            Some(v) => Err(FormulaError::Unassigned(v)),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("formulas always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, FormulaError> {
        serde_json::from_str(text).map_err(|e| FormulaError::Json(e.to_string()))
    }

    pub fn normalized(&self) -> MixedFormula {
        MixedFormula {
            matrix: self.matrix.normalized(),
            ..self.clone()
        }
    }
}

/// JSON document of `formula`.
pub fn emit_json(formula: &MixedFormula) -> String {
    formula.to_json()
}
