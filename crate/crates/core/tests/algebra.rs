mod common;

use proptest::prelude::*;
use quantum_effects::algebra::{
    corpus, horizontal_sum, standard_algebra, validate_axioms, Axiom, EffectAlgebra, ElementId, StandardKind,
};

#[test]
fn corpus_satisfies_axioms() {
    let all = corpus();
    assert_eq!(all.len(), 64 + 4 + 1 + 3);
    for alg in &all {
        let report = validate_axioms(alg);
        assert!(report.is_valid(), "{}: {:?}", alg.name(), report.violations.first());
    }
}

#[test]
fn mutations_fail_with_genuine_witnesses() {
    for m in common::mutated_corpus() {
        let report = validate_axioms(&m.algebra);
        assert!(!report.is_valid(), "{} passed", m.name);
        assert!(report.violations_of(m.expected).next().is_some(), "{}: no {} violation", m.name, m.expected);
        for v in &report.violations {
            assert!(common::witness_breaks_axiom(&m.algebra, v), "{}: spurious witness {v:?}", m.name);
        }
        assert!(m.algebra.clone().validate().is_err());
    }
}

#[test]
fn derived_order_matches_definition() {
    for alg in corpus().into_iter().filter(|a| a.len() <= 20) {
        let v = alg.clone().validate().unwrap();
        for a in alg.elements() {
            for b in alg.elements() {
                assert_eq!(v.leq(a, b), common::leq(&alg, a, b), "{} {a:?} {b:?}", alg.name());
            }
            let ortho: Vec<ElementId> = alg.elements().filter(|&b| alg.sum(a, b) == Some(alg.one())).collect();
            assert_eq!(ortho, vec![v.ortho(a)]);
        }
    }
}

#[test]
fn hasse_edges_are_covers() {
    for alg in corpus().into_iter().filter(|a| a.len() <= 16) {
        let v = alg.clone().validate().unwrap();
        let mut expected = Vec::new();
        for a in alg.elements() {
            for b in alg.elements() {
                let lt = |x, y| x != y && common::leq(&alg, x, y);
                if lt(a, b) && !alg.elements().any(|c| lt(a, c) && lt(c, b)) {
                    expected.push((a, b));
                }
            }
        }
        let mut got = v.hasse_diagram();
        got.sort();
        expected.sort();
        assert_eq!(got, expected, "{}", alg.name());
    }
}

#[test]
fn sharp_elements() {
    // every element of a Boolean algebra is sharp; in a chain only 0 and 1
    let b = standard_algebra(&StandardKind::Boolean(3)).unwrap().validate().unwrap();
    assert!(b.elements().all(|x| b.is_sharp(x)));
    let c = standard_algebra(&StandardKind::Chain(4)).unwrap().validate().unwrap();
    let sharp: Vec<&str> = c.elements().filter(|&x| c.is_sharp(x)).map(|x| c.label(x)).collect();
    assert_eq!(sharp, ["0", "1"]);
}

fn small_kind() -> impl Strategy<Value = StandardKind> {
    prop_oneof![
        (1usize..12).prop_map(StandardKind::Chain),
        (1usize..4).prop_map(StandardKind::Boolean),
        Just(StandardKind::Diamond),
    ]
}

proptest! {
    #[test]
    fn horizontal_sums_are_effect_algebras(parts in proptest::collection::vec(small_kind(), 1..4)) {
        let algebras: Vec<EffectAlgebra> = parts.iter().map(|k| standard_algebra(k).unwrap()).collect();
        let h = horizontal_sum("h", &algebras).unwrap();
        prop_assert!(validate_axioms(&h).is_valid());
        let expected: usize = 2 + algebras.iter().map(|a| a.len() - 2).sum::<usize>();
        prop_assert_eq!(h.len(), expected);
    }

    #[test]
    fn derived_order_invariants(kind in small_kind()) {
        let alg = standard_algebra(&kind).unwrap();
        let v = alg.clone().validate().unwrap();
        prop_assert!(v.order().check_invariants(&alg).is_empty());
        for a in alg.elements() {
            prop_assert!(v.leq(alg.zero(), a) && v.leq(a, alg.one()));
            prop_assert_eq!(v.ortho(v.ortho(a)), a);
            for b in alg.elements() {
                // a <= b iff b' <= a'
                prop_assert_eq!(v.leq(a, b), v.leq(v.ortho(b), v.ortho(a)));
            }
        }
    }

    #[test]
    fn deleting_a_defined_sum_reports_genuine_witnesses(kind in small_kind(), pick in any::<prop::sample::Index>()) {
        let alg = standard_algebra(&kind).unwrap();
        let sums: Vec<(ElementId, ElementId, ElementId)> = alg.defined_sums().collect();
        let (a, b, _) = sums[pick.index(sums.len())];
        let broken = alg.with_entry(a, b, None);
        let report = validate_axioms(&broken);
        // removing a diagonal entry can leave a valid algebra: chain3 without 1/3 + 1/3 is boolean2
        for v in &report.violations {
            prop_assert!(common::witness_breaks_axiom(&broken, v));
        }
        if a != b {
            prop_assert!(report.violations_of(Axiom::Commutativity).next().is_some());
        }
    }
}
