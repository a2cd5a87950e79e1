use super::*;
use crate::concept::{parse_concept, Concept};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn f(text: &str) -> PropFormula {
    parse_formula(text).unwrap()
}

fn prop_kb(texts: &[&str]) -> ClassicalKb {
    ClassicalKb::new(Dialect::Prop, texts.iter().map(|t| f(t).into()).collect()).unwrap()
}

/// Enumerates every assignment of the atoms involved.
fn truth_table_entails(kb: &[PropFormula], q: &PropFormula) -> bool {
    let mut atoms = BTreeSet::new();
    for g in kb.iter().chain(std::iter::once(q)) {
        g.collect_atoms(&mut atoms);
    }
    let atoms: Vec<String> = atoms.into_iter().collect();
    (0u32..1 << atoms.len()).all(|bits| {
        let val = |a: &str| {
            let i = atoms.iter().position(|x| x == a).unwrap();
            bits & (1 << i) != 0
        };
        !kb.iter().all(|g| g.eval(&val)) || q.eval(&val)
    })
}

#[test]
fn propositional_examples() {
    let o = PropositionalOracle;
    let kb = prop_kb(&["(implies p q)", "p"]);
    assert!(o.is_consistent(&kb).unwrap());
    assert!(o.entails(&kb, &f("q").into()).unwrap());
    assert!(!o.entails(&kb, &f("r").into()).unwrap());
    let bad = prop_kb(&["p", "(not p)"]);
    assert!(!o.is_consistent(&bad).unwrap());
    assert!(o.entails(&bad, &f("r").into()).unwrap());
    let empty = ClassicalKb::empty(Dialect::Prop);
    assert!(o.is_consistent(&empty).unwrap());
    assert!(o.entails(&empty, &f("(or p (not p))").into()).unwrap());
}

#[test]
fn terminological_examples() {
    let o = Oracle::default();
    let ax = |l: &str, r: &str| -> ClassicalStatement {
        Axiom { lhs: parse_concept(l).unwrap(), rhs: parse_concept(r).unwrap() }.into()
    };
    let kb = ClassicalKb::new(
        Dialect::Dl,
        vec![ax("Man", "Human"), Assertion::member("john", Concept::prim("Man")).into()],
    )
    .unwrap();
    assert!(o.is_consistent(&kb).unwrap());
    assert!(o.entails(&kb, &Assertion::member("john", Concept::prim("Human")).into()).unwrap());
    assert!(o.entails(&kb, &ax("(and Man Tall)", "Human")).unwrap());
    assert!(!o.entails(&kb, &ax("Human", "Man")).unwrap());
}

#[test]
fn dialect_mixing_is_rejected() {
    let mixed = ClassicalKb::new(
        Dialect::Prop,
        vec![f("p").into(), Assertion::member("a", Concept::prim("A")).into()],
    );
    assert!(matches!(mixed, Err(OracleError::DialectMismatch { .. })));
    let kb = prop_kb(&["p"]);
    let q: ClassicalStatement = Assertion::member("a", Concept::prim("A")).into();
    assert!(matches!(Oracle::default().entails(&kb, &q), Err(OracleError::DialectMismatch { .. })));
    assert!(TerminologicalOracle::default().is_consistent(&kb).is_err());
}

fn arb_formula() -> impl Strategy<Value = PropFormula> {
    let leaf = prop_oneof![
        8 => proptest::sample::select(vec!["p", "q", "r", "s"]).prop_map(PropFormula::atom),
        1 => Just(PropFormula::True),
        1 => Just(PropFormula::False),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(PropFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PropFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PropFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PropFormula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| PropFormula::iff(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn dpll_agrees_with_truth_tables(
        kb in proptest::collection::vec(arb_formula(), 0..5),
        q in arb_formula(),
    ) {
        let ckb = ClassicalKb::new(Dialect::Prop, kb.iter().cloned().map(Into::into).collect()).unwrap();
        let o = PropositionalOracle;
        prop_assert_eq!(o.entails(&ckb, &q.clone().into()).unwrap(), truth_table_entails(&kb, &q));
        prop_assert_eq!(
            o.is_consistent(&ckb).unwrap(),
            !truth_table_entails(&kb, &PropFormula::False)
        );
    }

    #[test]
    fn entailment_is_monotone(
        kb in proptest::collection::vec(arb_formula(), 0..4),
        extra in arb_formula(),
        q in arb_formula(),
    ) {
        let o = PropositionalOracle;
        let small = ClassicalKb::new(Dialect::Prop, kb.iter().cloned().map(Into::into).collect()).unwrap();
        let mut big = small.clone();
        big.push(extra.into()).unwrap();
        if o.entails(&small, &q.clone().into()).unwrap() {
            prop_assert!(o.entails(&big, &q.into()).unwrap());
        }
    }

    #[test]
    fn inconsistent_kbs_entail_everything(
        kb in proptest::collection::vec(arb_formula(), 0..4),
        q in arb_formula(),
    ) {
        let o = PropositionalOracle;
        let ckb = ClassicalKb::new(Dialect::Prop, kb.into_iter().map(Into::into).collect()).unwrap();
        if !o.is_consistent(&ckb).unwrap() {
            prop_assert!(o.entails(&ckb, &q.into()).unwrap());
        }
    }
}
