//! JSON input format.
//!
//! ```json
//! {"clocks": ["x"], "locations": ["l0", "l1"],
//!  "edges": [{"source": "l0", "guard": [{"clock": "x", "op": "=", "const": 1}],
//!             "resets": ["x"], "target": "l1"}]}
//! ```

use serde::{Deserialize, Serialize};

use num_traits::Signed;

use super::{ClockSet, ClockValuation, Edge, Guard, GuardAtom, GuardRel, ModelError, TimedAutomaton};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonDoc {
    clocks: Vec<String>,
    locations: Vec<String>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    source: String,
    #[serde(default)]
    guard: Vec<AtomDoc>,
    #[serde(default)]
    resets: Vec<String>,
    target: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomDoc {
    clock: String,
    op: String,
    #[serde(rename = "const")]
    constant: i64,
}

pub fn parse_automaton(text: &str) -> Result<TimedAutomaton, ModelError> {
    let doc: AutomatonDoc = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut ta = TimedAutomaton::new(doc.locations, doc.clocks, Vec::new())?;
    for e in doc.edges {
        let source = ta.location(&e.source)?;
        let target = ta.location(&e.target)?;
        let mut atoms = Vec::with_capacity(e.guard.len());
        for a in e.guard {
            let clock = ta.clock(&a.clock)?;
            let rel = match a.op.as_str() {
                "<" => GuardRel::Lt,
                "=" | "==" => GuardRel::Eq,
                ">" => GuardRel::Gt,
                other => return Err(ModelError::UnknownOperator(other.to_string())),
            };
            if a.constant < 0 {
                return Err(ModelError::NegativeConstant(a.constant));
            }
            let constant =
                u32::try_from(a.constant).map_err(|_| ModelError::ConstantTooLarge(a.constant))?;
            if constant > 1 << 20 {
                return Err(ModelError::ConstantTooLarge(a.constant));
            }
            atoms.push(GuardAtom::new(clock, rel, constant));
        }
        let resets = e
            .resets
            .iter()
            .map(|r| ta.clock(r))
            .collect::<Result<ClockSet, _>>()?;
        ta.add_edge(Edge {
            source,
            guard: Guard::new(atoms),
            resets,
            target,
        })?;
    }
    Ok(ta)
}

/// Serializes an automaton in the input format.
pub fn to_json(ta: &TimedAutomaton) -> String {
    let doc = AutomatonDoc {
        clocks: ta.clocks().to_vec(),
        locations: ta.locations().to_vec(),
        edges: ta
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                source: ta.location_name(e.source).to_string(),
                guard: e
                    .guard
                    .atoms
                    .iter()
                    .map(|a| AtomDoc {
                        clock: ta.clock_name(a.clock).to_string(),
                        op: a.rel.symbol().to_string(),
                        constant: a.constant as i64,
                    })
                    .collect(),
                resets: e.resets.iter().map(|c| ta.clock_name(c).to_string()).collect(),
                target: ta.location_name(e.target).to_string(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("automaton serializes")
}

fn parse_value(text: &str) -> Result<Rational, ModelError> {
    let bad = || ModelError::InvalidValue(text.to_string());
    let t = text.trim();
    if t.starts_with('-') {
        return Err(ModelError::NegativeValue);
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || int.starts_with('+') {
            return Err(bad());
        }
        let den = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: i64 = frac.parse().map_err(|_| bad())?;
        let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
        return Ok(Rational::new(num, den));
    }
    let v: Rational = t.parse().map_err(|_| bad())?;
    if v.is_negative() {
        return Err(ModelError::NegativeValue);
    }
    Ok(v)
}

/// Parses `name=value,...` where a value is an integer, a decimal or `p/q`.
/// Returns the valuation and the clocks that were not mentioned (left at 0).
pub fn parse_valuation(ta: &TimedAutomaton, text: &str) -> Result<(ClockValuation<Rational>, Vec<String>), ModelError> {
    let n = ta.num_clocks();
    let mut values: Vec<Option<Rational>> = vec![None; n];
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| ModelError::InvalidValue(part.to_string()))?;
        let c = ta.clock(name.trim())?;
        if values[c.0].is_some() {
            return Err(ModelError::DuplicateAssignment(name.trim().to_string()));
        }
        values[c.0] = Some(parse_value(value)?);
    }
    let missing = (0..n)
        .filter(|&i| values[i].is_none())
        .map(|i| ta.clocks()[i].clone())
        .collect();
    let v = ClockValuation::new(values.into_iter().map(Option::unwrap_or_default).collect())?;
    Ok((v, missing))
}

/// `name=value,...` in clock order, values as integers or `p/q`.
pub fn format_valuation<T: Scalar>(ta: &TimedAutomaton, v: &ClockValuation<T>) -> String {
    ta.clocks()
        .iter()
        .zip(v.values())
        .map(|(c, x)| format!("{c}={x}"))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_document() {
        let ta = parse_automaton(r#"{"clocks":["x"],"locations":["l0"],"edges":[]}"#).unwrap();
        assert_eq!(ta.c_max(), 0);
        assert_eq!(ta.num_clocks(), 1);
        assert!(ta.edges().is_empty());
    }

    #[test]
    fn single_equality_guard() {
        let ta = parse_automaton(
            r#"{"clocks":["x"],"locations":["l0","l1"],"edges":[
                {"source":"l0","guard":[{"clock":"x","op":"=","const":1}],"resets":["x"],"target":"l1"}]}"#,
        )
        .unwrap();
        assert_eq!(ta.c_max(), 1);
        assert_eq!(ta.edges()[0].resets, ClockSet(1));
    }

    #[test]
    fn undeclared_clock_is_named() {
        let err = parse_automaton(
            r#"{"clocks":["x"],"locations":["l0"],"edges":[
                {"source":"l0","guard":[{"clock":"w","op":"<","const":1}],"resets":[],"target":"l0"}]}"#,
        )
        .unwrap_err();
        assert_eq!(err, ModelError::UnknownClock("w".into()));
        assert!(err.to_string().contains("\"w\""));
    }

    #[test]
    fn negative_constant_and_syntax_errors() {
        let err = parse_automaton(
            r#"{"clocks":["x"],"locations":["l0"],"edges":[
                {"source":"l0","guard":[{"clock":"x","op":">","const":-2}],"resets":[],"target":"l0"}]}"#,
        )
        .unwrap_err();
        assert_eq!(err, ModelError::NegativeConstant(-2));

        let err = parse_automaton("{\"clocks\": [\"x\"],\n \"locations\": [").unwrap_err();
        match err {
            ModelError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        let err = parse_automaton(r#"{"clocks":["x","x"],"locations":["l0"]}"#).unwrap_err();
        assert_eq!(err, ModelError::DuplicateClock("x".into()));
        let err = parse_automaton(
            r#"{"clocks":[],"locations":["l0"],"edges":[{"source":"l0","target":"l9"}]}"#,
        )
        .unwrap_err();
        assert_eq!(err, ModelError::UnknownLocation("l9".into()));
    }

    #[test]
    fn valuation_syntax() {
        let ta = parse_automaton(r#"{"clocks":["x","y"],"locations":["l0"],"edges":[]}"#).unwrap();
        let (v, missing) = parse_valuation(&ta, "x=1/2, y=1.25").unwrap();
        assert_eq!(v.values(), &[Rational::new(1, 2), Rational::new(5, 4)]);
        assert!(missing.is_empty());
        assert_eq!(format_valuation(&ta, &v), "x=1/2,y=5/4");
        let (v, missing) = parse_valuation(&ta, "y=3").unwrap();
        assert_eq!(v.values(), &[Rational::from_integer(0), Rational::from_integer(3)]);
        assert_eq!(missing, vec!["x".to_string()]);
        assert_eq!(parse_valuation(&ta, "x=-1").unwrap_err(), ModelError::NegativeValue);
        assert_eq!(parse_valuation(&ta, "x=-1/2").unwrap_err(), ModelError::NegativeValue);
        assert!(matches!(parse_valuation(&ta, "x=abc"), Err(ModelError::InvalidValue(_))));
        assert!(matches!(parse_valuation(&ta, "x=1/0"), Err(ModelError::InvalidValue(_))));
        assert!(matches!(parse_valuation(&ta, "x=1,x=2"), Err(ModelError::DuplicateAssignment(_))));
        assert_eq!(parse_valuation(&ta, "w=1").unwrap_err(), ModelError::UnknownClock("w".into()));
    }
}
