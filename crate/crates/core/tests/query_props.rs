//! Rewriting-based answers against a fuzzy chase, plus algebraic properties
//! of thresholds and unions.

use fakb_core::dllite::{check_kb_consistency, BasicConcept, Inclusion, Role, Tbox};
use fakb_core::fabox::{FABox, Fact, FuzzyAssertion, IndividualName};
use fakb_core::query::{
    fans, fcert, oracle_fcert_small, parse_query, perfect_ref, QueryError, Threshold, ThresholdedQuery,
};
use proptest::prelude::*;

const CONCEPTS: [&str; 3] = ["A", "B", "C"];
const ROLES: [&str; 2] = ["r", "s"];
const DEGREES: [f64; 5] = [0.2, 0.35, 0.5, 0.8, 1.0];
const TERMS: [&str; 4] = ["?x", "?y", "?z", "i0"];

fn role(i: usize) -> Role {
    let name = ROLES[i / 2];
    if i.is_multiple_of(2) {
        Role::new(name)
    } else {
        Role::inverse_of(name)
    }
}

fn basic(i: usize) -> BasicConcept {
    if i < CONCEPTS.len() {
        BasicConcept::atomic(CONCEPTS[i])
    } else {
        BasicConcept::exists(role(i - CONCEPTS.len()))
    }
}

fn ind(i: usize) -> IndividualName {
    IndividualName::plain(format!("i{i}")).unwrap()
}

#[derive(Debug, Clone)]
enum Ax {
    C(usize, usize, bool),
    R(usize, usize, bool),
}

fn tbox_strategy(negatives: bool) -> impl Strategy<Value = Tbox> {
    let ax = prop_oneof![
        3 => (0..7usize, 0..7usize, prop::bool::weighted(0.2)).prop_map(|(l, r, n)| Ax::C(l, r, n)),
        1 => (0..4usize, 0..4usize, prop::bool::weighted(0.2)).prop_map(|(l, r, n)| Ax::R(l, r, n)),
    ];
    prop::collection::vec(ax, 0..6).prop_map(move |axs| {
        axs.into_iter()
            .filter_map(|a| match a {
                Ax::C(l, r, n) if l != r => Some(if n && negatives {
                    Inclusion::concept_disjoint(basic(l), basic(r))
                } else {
                    Inclusion::concept(basic(l), basic(r))
                }),
                Ax::R(l, r, n) if l / 2 != r / 2 => Some(if n && negatives {
                    Inclusion::role_disjoint(role(l), role(r))
                } else {
                    Inclusion::role(role(l), role(r))
                }),
                _ => None,
            })
            .collect()
    })
}

fn abox_strategy() -> impl Strategy<Value = FABox> {
    let concept = (0..3usize, 0..3usize, 0..DEGREES.len())
        .prop_map(|(c, i, d)| FuzzyAssertion::graded(Fact::concept(CONCEPTS[c], ind(i)).unwrap(), DEGREES[d]).unwrap());
    let role = (0..2usize, 0..3usize, 0..3usize, 0..DEGREES.len()).prop_map(|(r, s, o, d)| {
        FuzzyAssertion::graded(Fact::role(ROLES[r], ind(s), ind(o)).unwrap(), DEGREES[d]).unwrap()
    });
    prop::collection::vec(prop_oneof![concept, role], 0..7).prop_map(|v| v.into_iter().collect())
}

fn atom_text(a: &(usize, usize, usize)) -> String {
    let (p, t1, t2) = *a;
    if p < CONCEPTS.len() {
        format!("{}({})", CONCEPTS[p], TERMS[t1])
    } else {
        format!("{}({},{})", ROLES[p - CONCEPTS.len()], TERMS[t1], TERMS[t2])
    }
}

fn query_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec((0..5usize, 0..4usize, 0..4usize), 1..4).prop_map(|atoms| {
        let body: Vec<String> = atoms.iter().map(atom_text).collect();
        let body = body.join(", ");
        if body.contains("?x") {
            format!("q(?x) := {body}")
        } else {
            format!("q() := {body}")
        }
    })
}

fn insert_all(f: &mut FABox, v: Vec<FuzzyAssertion>) {
    for a in v {
        f.insert(a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn rewriting_matches_chase(t in tbox_strategy(true), f in abox_strategy(), q in query_strategy()) {
        let q = parse_query(&q).unwrap();
        let consistent = check_kb_consistency(&t, &f).is_ok();
        match (fcert(&q, &t, &f), oracle_fcert_small(&q, &t, &f, 2000)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b, "{}\n{}", q, t),
            (Err(QueryError::Inconsistent(_)), Err(QueryError::OracleInconsistent(_))) => prop_assert!(!consistent),
            (a, b) => prop_assert!(false, "{} / {}\n{}: {:?} vs {:?}", q, consistent, t, a, b),
        }
    }

    #[test]
    fn thresholds_only_filter(t in tbox_strategy(false), f in abox_strategy(), q in query_strategy(), k in 0..DEGREES.len()) {
        let base = parse_query(&q).unwrap();
        let all = fcert(&base, &t, &f).unwrap();
        let k = DEGREES[k];
        for th in [Threshold::at_least(k).unwrap(), Threshold::Above(k - 0.1)] {
            let tq = ThresholdedQuery::new(base.query.clone(), th);
            let got = fcert(&tq, &t, &f).unwrap();
            prop_assert_eq!(&got, &all.filtered(th));
            prop_assert!(got.iter().all(|(_, d)| th.admits(d)));
        }
        let strict = fcert(&ThresholdedQuery::new(base.query.clone(), Threshold::Above(k.min(0.99))), &t, &f).unwrap();
        let loose = fcert(&ThresholdedQuery::new(base.query.clone(), Threshold::at_least(k).unwrap()), &t, &f).unwrap();
        prop_assert!(strict.iter().all(|(tuple, d)| loose.get(tuple) == Some(d)));
    }

    #[test]
    fn union_with_itself_changes_nothing(t in tbox_strategy(false), f in abox_strategy(), q in query_strategy()) {
        let (head, body) = q.split_once(" := ").unwrap();
        let doubled = parse_query(&format!("{head} := [{body}] | [{body}]")).unwrap();
        let single = parse_query(&q).unwrap();
        prop_assert_eq!(fcert(&doubled, &t, &f).unwrap(), fcert(&single, &t, &f).unwrap());
        prop_assert_eq!(perfect_ref(&doubled.query, &t).disjuncts().len(), perfect_ref(&single.query, &t).disjuncts().len());
    }

    #[test]
    fn degrees_come_from_the_abox(t in tbox_strategy(false), f in abox_strategy(), q in query_strategy()) {
        let q = parse_query(&q).unwrap();
        let degrees: Vec<f64> = f.iter().map(|a| a.degree()).collect();
        for (_, d) in fcert(&q, &t, &f).unwrap().iter() {
            prop_assert!(d > 0.0 && d <= 1.0);
            prop_assert!(degrees.contains(&d));
        }
    }

    #[test]
    fn more_facts_never_lose_answers(t in tbox_strategy(false), f in abox_strategy(), extra in abox_strategy(), q in query_strategy()) {
        let q = parse_query(&q).unwrap();
        let small = fcert(&q, &t, &f).unwrap();
        let mut g = f.clone();
        insert_all(&mut g, extra.iter().cloned().collect());
        let big = fcert(&q, &t, &g).unwrap();
        for (tuple, d) in small.iter() {
            prop_assert!(big.get(tuple).is_some_and(|e| e >= d));
        }
    }

    #[test]
    fn empty_tbox_is_plain_evaluation(f in abox_strategy(), q in query_strategy()) {
        let q = parse_query(&q).unwrap();
        prop_assert_eq!(fcert(&q, &Tbox::new(), &f).unwrap(), fans(&q.query, &f));
    }
}
