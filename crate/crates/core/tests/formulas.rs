use std::collections::HashMap;

use proptest::prelude::*;

use tareach::formula::{decide_integer, emit_smtlib, parse_smtlib, Atom, Binding, Matrix, MixedFormula, Rel, Sort};
use tareach::Rational;

const VARS: [&str; 4] = ["x1", "x2", "u1", "u2"];

fn atom() -> impl Strategy<Value = Atom> {
    (
        prop::collection::vec((0..4usize, -3i64..=3), 0..=3),
        -5i64..=5,
        prop_oneof![Just(Rel::Lt), Just(Rel::Le), Just(Rel::Eq)],
    )
        .prop_map(|(terms, c, rel)| Atom::new(terms.into_iter().map(|(v, k)| (VARS[v], k)), c, rel))
}

fn matrix() -> impl Strategy<Value = Matrix> {
    atom().prop_map(Matrix::Atom).prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Matrix::And),
            prop::collection::vec(inner, 0..4).prop_map(Matrix::Or),
        ]
    })
}

fn formula() -> impl Strategy<Value = MixedFormula> {
    (matrix(), any::<bool>()).prop_map(|(matrix, real_u2)| MixedFormula {
        free: vec!["x1".into(), "x2".into()],
        exists: vec![
            Binding { var: "u1".into(), sort: Sort::Int },
            Binding {
                var: "u2".into(),
                sort: if real_u2 { Sort::Real } else { Sort::Int },
            },
        ],
        matrix,
    })
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-6i64..=6, 1i64..=3), 4).prop_map(|v| v.into_iter().map(|(n, d)| Rational::new(n, d)).collect())
}

fn assignment(f: &MixedFormula, p: &[Rational]) -> HashMap<String, Rational> {
    VARS.iter()
        .zip(p)
        .map(|(v, x)| {
            let x = if f.sort_of(v) == Some(Sort::Int) { x.floor() } else { *x };
            (v.to_string(), x)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn json_round_trip_is_identity(f in formula()) {
        let back = MixedFormula::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn smtlib_round_trip_preserves_structure_and_truth(f in formula(), p in point()) {
        let text = emit_smtlib(&f);
        let back = parse_smtlib(&text).unwrap();
        prop_assert_eq!(&back.free, &f.free);
        prop_assert_eq!(&back.exists, &f.exists);
        let a = assignment(&f, &p);
        prop_assert_eq!(back.eval(&a), f.eval(&a));
        prop_assert_eq!(parse_smtlib(&emit_smtlib(&back)).unwrap(), back);
    }
}

fn integer_formula() -> impl Strategy<Value = MixedFormula> {
    matrix().prop_map(|matrix| MixedFormula {
        free: vec!["x1".into(), "x2".into()],
        exists: vec![
            Binding { var: "u1".into(), sort: Sort::Int },
            Binding { var: "u2".into(), sort: Sort::Int },
        ],
        matrix,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_agrees_with_enumeration(f in integer_formula(), p in point()) {
        let fixed: HashMap<String, Rational> =
            [("x1".to_string(), p[0]), ("x2".to_string(), p[1])].into_iter().collect();
        let bounds: HashMap<String, (i64, i64)> =
            [("u1".to_string(), (-3, 3)), ("u2".to_string(), (-3, 3))].into_iter().collect();
        let model = decide_integer(&f, &fixed, &bounds).unwrap();
        let mut expected = false;
        for u1 in -3..=3i64 {
            for u2 in -3..=3i64 {
                let mut a = fixed.clone();
                a.insert("u1".into(), Rational::from_integer(u1));
                a.insert("u2".into(), Rational::from_integer(u2));
                expected |= f.eval(&a).unwrap();
            }
        }
        prop_assert_eq!(model.is_some(), expected);
        if let Some(m) = model {
            let mut a = fixed.clone();
            for (k, v) in m {
                a.insert(k, Rational::from_integer(v));
            }
            prop_assert!(f.eval(&a).unwrap());
        }
    }
}
