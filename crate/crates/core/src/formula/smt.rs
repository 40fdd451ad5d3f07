use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Atom, Binding, FormulaError, Matrix, MixedFormula, Rel, Sort};

/// SMT-LIB2 script asserting `formula`: free variables become real
/// constants and integer variables are coerced with `to_real` where used.
pub fn emit_smtlib(formula: &MixedFormula) -> String {
    let mut out = String::from("(set-logic LIRA)\n");
    for v in &formula.free {
        let _ = writeln!(out, "(declare-const {v} Real)");
    }
    let ints: std::collections::HashSet<&str> = formula
        .exists
        .iter()
        .filter(|b| b.sort == Sort::Int)
        .map(|b| b.var.as_str())
        .collect();
    let mut body = String::new();
    write_matrix(&mut body, &formula.matrix, &ints);
    if formula.exists.is_empty() {
        let _ = writeln!(out, "(assert {body})");
    } else {
        let binds: Vec<String> = formula
            .exists
            .iter()
            .map(|b| format!("({} {})", b.var, if b.sort == Sort::Int { "Int" } else { "Real" }))
            .collect();
        let _ = writeln!(out, "(assert (exists ({}) {body}))", binds.join(" "));
    }
    out.push_str("(check-sat)\n");
    out
}

fn write_matrix(out: &mut String, m: &Matrix, ints: &std::collections::HashSet<&str>) {
    match m {
        Matrix::Atom(a) => write_atom(out, a, ints),
        Matrix::And(v) if v.is_empty() => out.push_str("true"),
        Matrix::Or(v) if v.is_empty() => out.push_str("false"),
        Matrix::And(v) | Matrix::Or(v) => {
            out.push_str(if matches!(m, Matrix::And(_)) { "(and" } else { "(or" });
            for c in v {
                out.push(' ');
                write_matrix(out, c, ints);
            }
            out.push(')');
        }
    }
}

fn term(var: &str, coeff: i64, ints: &std::collections::HashSet<&str>) -> String {
    let v = if ints.contains(var) {
        format!("(to_real {var})")
    } else {
        var.to_string()
    };
    if coeff == 1 {
        v
    } else {
        format!("(* {coeff} {v})")
    }
}

fn side(terms: Vec<String>, constant: i64) -> String {
    let mut parts = terms;
    if constant != 0 {
        parts.push(constant.to_string());
    }
    match parts.len() {
        0 => "0".into(),
        1 => parts.pop().expect("one part"),
        _ => format!("(+ {})", parts.join(" ")),
    }
}

fn write_atom(out: &mut String, a: &Atom, ints: &std::collections::HashSet<&str>) {
    let left: Vec<String> = a
        .coeffs
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(v, &c)| term(v, c, ints))
        .collect();
    let right: Vec<String> = a
        .coeffs
        .iter()
        .filter(|(_, &c)| c < 0)
        .map(|(v, &c)| term(v, -c, ints))
        .collect();
    let flip = left.is_empty() && !right.is_empty();
    let (lc, rc) = if a.constant > 0 { (a.constant, 0) } else { (0, -a.constant) };
    let l = side(left, lc);
    let r = side(right, rc);
    let (op, l, r) = if flip {
        let op = match a.rel {
            Rel::Lt => ">",
            Rel::Le => ">=",
            Rel::Eq => "=",
        };
        (op, r, l)
    } else {
        (a.rel.symbol(), l, r)
    };
    let _ = write!(out, "({op} {l} {r})");
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Sym(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn offset(&self) -> usize {
        match self {
            Sexp::Sym(_, o) | Sexp::List(_, o) => *o,
        }
    }
}

fn syntax(offset: usize, message: &str) -> FormulaError {
    FormulaError::SmtSyntax {
        offset,
        message: message.to_string(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Sexp>, FormulaError> {
    let bytes = text.as_bytes();
    let mut stack: Vec<(Vec<Sexp>, usize)> = vec![(Vec::new(), 0)];
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                stack.push((Vec::new(), i));
                i += 1;
            }
            b')' => {
                let (items, start) = stack.pop().ok_or_else(|| syntax(i, "unbalanced ')'"))?;
                let parent = stack.last_mut().ok_or_else(|| syntax(i, "unbalanced ')'"))?;
                parent.0.push(Sexp::List(items, start));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'(' && bytes[i] != b')' {
                    i += 1;
                }
                stack
                    .last_mut()
                    .expect("stack has a root")
                    .0
                    .push(Sexp::Sym(text[start..i].to_string(), start));
            }
        }
        if stack.is_empty() {
            return Err(syntax(i, "unbalanced ')'"));
        }
    }
    if stack.len() != 1 {
        return Err(syntax(text.len(), "unclosed '('"));
    }
    Ok(stack.pop().expect("root").0)
}

/// Linear term: coefficients and constant.
type Linear = (BTreeMap<String, i64>, i64);

fn linear(e: &Sexp) -> Result<Linear, FormulaError> {
    match e {
        Sexp::Sym(s, o) => {
            if let Ok(n) = s.parse::<i64>() {
                Ok((BTreeMap::new(), n))
            } else if s.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                Err(syntax(*o, "expected an integer numeral"))
            } else {
                Ok((BTreeMap::from([(s.clone(), 1)]), 0))
            }
        }
        Sexp::List(items, o) => {
            let head = match items.first() {
                Some(Sexp::Sym(h, _)) => h.as_str(),
                _ => return Err(syntax(*o, "expected an operator")),
            };
            match (head, items.len()) {
                ("to_real", 2) => linear(&items[1]),
                ("+", _) => {
                    let mut acc: Linear = (BTreeMap::new(), 0);
                    for it in &items[1..] {
                        let (c, k) = linear(it)?;
                        for (v, a) in c {
                            *acc.0.entry(v).or_insert(0) += a;
                        }
                        acc.1 += k;
                    }
                    Ok(acc)
                }
                ("-", 2) => {
                    let (c, k) = linear(&items[1])?;
                    Ok((c.into_iter().map(|(v, a)| (v, -a)).collect(), -k))
                }
                ("*", 3) => {
                    let (c1, k1) = linear(&items[1])?;
                    let (c2, k2) = linear(&items[2])?;
                    if c1.is_empty() {
                        Ok((c2.into_iter().map(|(v, a)| (v, a * k1)).collect(), k1 * k2))
                    } else if c2.is_empty() {
                        Ok((c1.into_iter().map(|(v, a)| (v, a * k2)).collect(), k1 * k2))
                    } else {
                        Err(FormulaError::SmtUnsupported("non-linear product".into()))
                    }
                }
                _ => Err(FormulaError::SmtUnsupported(format!("term ({head} ...)"))),
            }
        }
    }
}

fn matrix(e: &Sexp) -> Result<Matrix, FormulaError> {
    match e {
        Sexp::Sym(s, _) if s == "true" => Ok(Matrix::tt()),
        Sexp::Sym(s, _) if s == "false" => Ok(Matrix::ff()),
        Sexp::Sym(s, o) => Err(syntax(*o, &format!("unexpected symbol {s}"))),
        Sexp::List(items, o) => {
            let head = match items.first() {
                Some(Sexp::Sym(h, _)) => h.as_str(),
                _ => return Err(syntax(*o, "expected an operator")),
            };
            match head {
                "and" | "or" => {
                    let parts = items[1..].iter().map(matrix).collect::<Result<Vec<_>, _>>()?;
                    Ok(if head == "and" { Matrix::And(parts) } else { Matrix::Or(parts) })
                }
                "<" | "<=" | "=" | ">" | ">=" => {
                    if items.len() != 3 {
                        return Err(syntax(*o, "comparison needs two arguments"));
                    }
                    let l = linear(&items[1])?;
                    let r = linear(&items[2])?;
                    let (pos, neg) = if head.starts_with('>') { (r, l) } else { (l, r) };
                    let rel = match head {
                        "<" | ">" => Rel::Lt,
                        "<=" | ">=" => Rel::Le,
                        _ => Rel::Eq,
                    };
                    let terms = pos.0.into_iter().chain(neg.0.into_iter().map(|(v, a)| (v, -a)));
                    Ok(Matrix::Atom(Atom::new(terms, pos.1 - neg.1, rel)))
                }
                _ => Err(FormulaError::SmtUnsupported(format!("formula ({head} ...)"))),
            }
        }
    }
}

fn bindings(e: &Sexp) -> Result<Vec<Binding>, FormulaError> {
    let Sexp::List(items, o) = e else {
        return Err(syntax(e.offset(), "expected a binding list"));
    };
    items
        .iter()
        .map(|b| match b {
            Sexp::List(pair, _) => match pair.as_slice() {
                [Sexp::Sym(v, _), Sexp::Sym(s, so)] => Ok(Binding {
                    var: v.clone(),
                    sort: match s.as_str() {
                        "Int" => Sort::Int,
                        "Real" => Sort::Real,
                        _ => return Err(syntax(*so, "unknown sort")),
                    },
                }),
                _ => Err(syntax(*o, "malformed binding")),
            },
            _ => Err(syntax(*o, "malformed binding")),
        })
        .collect()
}

/// Reads back a script in the shape written by [`emit_smtlib`]: real
/// constant declarations and one assertion, optionally existential.
pub fn parse_smtlib(text: &str) -> Result<MixedFormula, FormulaError> {
    let mut free = Vec::new();
    let mut result = None;
    for cmd in tokenize(text)? {
        let Sexp::List(items, o) = &cmd else {
            return Err(syntax(cmd.offset(), "expected a command"));
        };
        let head = match items.first() {
            Some(Sexp::Sym(h, _)) => h.as_str(),
            _ => return Err(syntax(*o, "expected a command name")),
        };
        match head {
            "set-logic" | "check-sat" | "exit" | "set-info" | "set-option" | "get-model" => {}
            "declare-const" => match items.as_slice() {
                [_, Sexp::Sym(v, _), Sexp::Sym(s, _)] if s == "Real" => free.push(v.clone()),
                _ => return Err(FormulaError::SmtUnsupported("declaration other than a Real constant".into())),
            },
            "assert" => {
                if result.is_some() {
                    return Err(FormulaError::SmtUnsupported("more than one assertion".into()));
                }
                let body = items.get(1).ok_or_else(|| syntax(*o, "empty assertion"))?;
                result = Some(match body {
                    Sexp::List(inner, _) if matches!(inner.first(), Some(Sexp::Sym(h, _)) if h == "exists") => {
                        if inner.len() != 3 {
                            return Err(syntax(body.offset(), "malformed exists"));
                        }
                        (bindings(&inner[1])?, matrix(&inner[2])?)
                    }
                    _ => (Vec::new(), matrix(body)?),
                });
            }
            _ => return Err(FormulaError::SmtUnsupported(format!("command {head}"))),
        }
    }
    let (exists, matrix) = result.ok_or_else(|| syntax(text.len(), "no assertion"))?;
    Ok(MixedFormula { free, exists, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(matrix: Matrix, exists: Vec<Binding>) -> MixedFormula {
        MixedFormula {
            free: vec!["x1".into()],
            exists,
            matrix,
        }
    }

    #[test]
    fn nonnegativity_renders_as_geq() {
        let m = Matrix::Atom(Atom::new([("x1", -1)], 0, Rel::Le));
        let s = emit_smtlib(&f(m, vec![]));
        assert!(s.starts_with("(set-logic"));
        assert!(s.contains("(declare-const x1 Real)"));
        assert!(s.contains("(assert (>= x1 0))"));
    }

    #[test]
    fn false_renders_as_false() {
        assert!(emit_smtlib(&f(Matrix::ff(), vec![])).contains("(assert false)"));
    }

    #[test]
    fn integers_are_coerced() {
        let m = Matrix::Atom(Atom::new([("x1", 1), ("u1", -2)], 1, Rel::Lt));
        let b = vec![Binding {
            var: "u1".into(),
            sort: Sort::Int,
        }];
        let s = emit_smtlib(&f(m.clone(), b.clone()));
        assert!(s.contains("(assert (exists ((u1 Int)) (< (+ x1 1) (* 2 (to_real u1)))))"), "{s}");
        assert_eq!(parse_smtlib(&s).unwrap(), f(m, b));
    }

    #[test]
    fn reader_rejects_garbage() {
        assert!(parse_smtlib("(assert (and x1").is_err());
        assert!(parse_smtlib("(assert (* x1 x1))").is_err());
        assert!(parse_smtlib("(declare-fun g (Real) Real)").is_err());
    }
}
