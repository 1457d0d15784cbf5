//! Closure-based consistency against a crisp chase.

use std::collections::{BTreeMap, BTreeSet};

use fakb_core::dllite::{check_kb_consistency, ni_closure, BasicConcept, Inclusion, Role, Tbox};
use fakb_core::fabox::{FABox, Fact, FuzzyAssertion, IndividualName};
use proptest::prelude::*;

const CONCEPTS: [&str; 3] = ["A", "B", "C"];
const ROLES: [&str; 2] = ["r", "s"];

fn basic_roles() -> Vec<Role> {
    ROLES
        .iter()
        .flat_map(|r| [Role::new(*r), Role::inverse_of(*r)])
        .collect()
}

fn basic_concepts() -> Vec<BasicConcept> {
    let mut out: Vec<BasicConcept> = CONCEPTS.iter().map(|c| BasicConcept::atomic(*c)).collect();
    out.extend(basic_roles().into_iter().map(BasicConcept::Exists));
    out
}

/// A tree-shaped chase. Anonymous elements generated through the same role
/// have the same type, so only the first of them gets successors.
struct Chase {
    atoms: Vec<BTreeSet<String>>,
    generator: Vec<Option<Role>>,
    // (u, v) -> roles holding from u to v, kept closed under inverses.
    edges: BTreeMap<(usize, usize), BTreeSet<Role>>,
}

impl Chase {
    fn add_edge(&mut self, u: usize, v: usize, q: &Role) -> bool {
        let a = self.edges.entry((u, v)).or_default().insert(q.clone());
        let b = self.edges.entry((v, u)).or_default().insert(q.inverted());
        a || b
    }

    fn holds(&self, u: usize, b: &BasicConcept) -> bool {
        match b {
            BasicConcept::Atomic(a) => self.atoms[u].contains(a),
            BasicConcept::Exists(q) => self.edges.range((u, 0)..(u + 1, 0)).any(|(_, l)| l.contains(q)),
        }
    }

    fn run(tbox: &Tbox, concept_facts: &[(usize, &str)], role_facts: &[(usize, usize, Role)], named: usize) -> Chase {
        let mut c = Chase {
            atoms: vec![BTreeSet::new(); named],
            generator: vec![None; named],
            edges: BTreeMap::new(),
        };
        for (u, a) in concept_facts {
            c.atoms[*u].insert(a.to_string());
        }
        for (u, v, q) in role_facts {
            c.add_edge(*u, *v, q);
        }
        let cis: Vec<(BasicConcept, BasicConcept)> =
            tbox.concept_inclusions().map(|(l, r)| (l.clone(), r.clone())).collect();
        let ris = tbox.role_inclusions();
        let mut fired: BTreeSet<(usize, Role)> = BTreeSet::new();
        loop {
            let mut changed = false;
            let pairs: Vec<((usize, usize), BTreeSet<Role>)> = c.edges.iter().map(|(k, v)| (*k, v.clone())).collect();
            for ((u, v), labels) in pairs {
                for (q1, q2) in &ris {
                    if labels.contains(q1) {
                        changed |= c.add_edge(u, v, q2);
                    }
                }
            }
            for u in 0..c.atoms.len() {
                let blocked = match &c.generator[u] {
                    Some(g) => c.generator[..u].iter().any(|h| h.as_ref() == Some(g)),
                    None => false,
                };
                for (lhs, rhs) in &cis {
                    if !c.holds(u, lhs) {
                        continue;
                    }
                    match rhs {
                        BasicConcept::Atomic(a) => changed |= c.atoms[u].insert(a.clone()),
                        BasicConcept::Exists(q) => {
                            if blocked || fired.contains(&(u, q.clone())) {
                                continue;
                            }
                            fired.insert((u, q.clone()));
                            let w = c.atoms.len();
                            c.atoms.push(BTreeSet::new());
                            c.generator.push(Some(q.clone()));
                            c.add_edge(u, w, q);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return c;
            }
        }
    }

    fn violates(&self, tbox: &Tbox) -> bool {
        tbox.iter().any(|i| match i {
            Inclusion::Concept {
                lhs,
                rhs,
                negated: true,
            } => (0..self.atoms.len()).any(|u| self.holds(u, lhs) && self.holds(u, rhs)),
            Inclusion::Role {
                lhs,
                rhs,
                negated: true,
            } => self.edges.values().any(|l| l.contains(lhs) && l.contains(rhs)),
            _ => false,
        })
    }
}

fn ind(i: usize) -> IndividualName {
    IndividualName::plain(format!("i{i}")).unwrap()
}

fn to_fabox(concept_facts: &[(usize, &str)], role_facts: &[(usize, usize, Role)]) -> FABox {
    let mut f = FABox::new();
    for (u, a) in concept_facts {
        f.insert(FuzzyAssertion::crisp(Fact::concept(*a, ind(*u)).unwrap()));
    }
    for (u, v, q) in role_facts {
        let (s, o) = if q.inverse { (*v, *u) } else { (*u, *v) };
        f.insert(FuzzyAssertion::crisp(
            Fact::role(q.name.clone(), ind(s), ind(o)).unwrap(),
        ));
    }
    f
}

fn agree(tbox: &Tbox, concept_facts: &[(usize, &str)], role_facts: &[(usize, usize, Role)], named: usize) {
    let chase = Chase::run(tbox, concept_facts, role_facts, named);
    let expected = !chase.violates(tbox);
    let actual = check_kb_consistency(tbox, &to_fabox(concept_facts, role_facts)).is_ok();
    assert_eq!(
        actual, expected,
        "tbox:\n{tbox}concepts {concept_facts:?}\nroles {role_facts:?}"
    );
}

fn arb_concept() -> impl Strategy<Value = BasicConcept> {
    prop::sample::select(basic_concepts())
}

fn arb_role() -> impl Strategy<Value = Role> {
    prop::sample::select(basic_roles())
}

fn arb_inclusion() -> impl Strategy<Value = Inclusion> {
    prop_oneof![
        4 => (arb_concept(), arb_concept()).prop_map(|(l, r)| Inclusion::concept(l, r)),
        2 => (arb_concept(), arb_concept()).prop_map(|(l, r)| Inclusion::concept_disjoint(l, r)),
        2 => (arb_role(), arb_role()).prop_map(|(l, r)| Inclusion::role(l, r)),
        1 => (arb_role(), arb_role()).prop_map(|(l, r)| Inclusion::role_disjoint(l, r)),
    ]
}

fn arb_tbox() -> impl Strategy<Value = Tbox> {
    prop::collection::vec(arb_inclusion(), 1..8).prop_map(|v| v.into_iter().collect())
}

type Abox = (Vec<(usize, &'static str)>, Vec<(usize, usize, Role)>);

fn arb_abox() -> impl Strategy<Value = Abox> {
    (
        prop::collection::vec((0..3usize, prop::sample::select(CONCEPTS.to_vec())), 0..4),
        prop::collection::vec((0..3usize, 0..3usize, arb_role()), 0..4),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn agrees_with_chase_on_random_aboxes(tbox in arb_tbox(), (cs, rs) in arb_abox()) {
        agree(&tbox, &cs, &rs, 3);
    }

    #[test]
    fn agrees_with_chase_on_all_pairs(tbox in arb_tbox()) {
        let bcs = basic_concepts();
        // X(c), Y(c) for every pair of basic concepts; existentials get fresh fillers.
        for x in &bcs {
            for y in &bcs {
                let mut cs = Vec::new();
                let mut rs = Vec::new();
                for (k, b) in [x, y].into_iter().enumerate() {
                    match b {
                        BasicConcept::Atomic(a) => cs.push((0, CONCEPTS.iter().find(|c| **c == a).copied().unwrap())),
                        BasicConcept::Exists(q) => rs.push((0, k + 1, q.clone())),
                    }
                }
                agree(&tbox, &cs, &rs, 3);
            }
        }
        for q1 in basic_roles() {
            for q2 in basic_roles() {
                agree(&tbox, &[], &[(0, 1, q1.clone()), (0, 1, q2)], 2);
            }
        }
    }

    #[test]
    fn closure_is_a_monotone_fixpoint(tbox in arb_tbox(), extra in arb_tbox()) {
        let closed = ni_closure(&tbox);
        let with_closure: Tbox = tbox.iter().cloned().chain(closed.iter().map(|n| n.to_inclusion())).collect();
        prop_assert_eq!(&ni_closure(&with_closure), &closed);
        let bigger: Tbox = tbox.iter().chain(extra.iter()).cloned().collect();
        prop_assert!(closed.is_subset(&ni_closure(&bigger)));
    }

    #[test]
    fn inconsistency_survives_more_assertions(tbox in arb_tbox(), (cs, rs) in arb_abox(), (cs2, rs2) in arb_abox()) {
        let small = to_fabox(&cs, &rs);
        let mut big = small.clone();
        big.extend(to_fabox(&cs2, &rs2).iter().cloned());
        if !check_kb_consistency(&tbox, &small).is_ok() {
            prop_assert!(!check_kb_consistency(&tbox, &big).is_ok());
        }
    }

    #[test]
    fn inconsistency_survives_higher_degrees(
        degrees in prop::collection::vec(0.0f64..=1.0, 6),
        bumps in prop::collection::vec(0.0f64..=1.0, 6),
    ) {
        let tbox: Tbox = [
            Inclusion::concept_disjoint(BasicConcept::Exists(Role::new("att")), BasicConcept::Exists(Role::new("sup"))),
            Inclusion::concept_disjoint(BasicConcept::atomic("Arg"), BasicConcept::Exists(Role::inverse_of("att"))),
            Inclusion::role_disjoint(Role::new("att"), Role::inverse_of("sup")),
        ].into_iter().collect();
        let a = |i: u32| IndividualName::argument(i).unwrap();
        let build = |d: &[f64]| -> FABox {
            let facts = [
                Fact::concept("Arg", a(1)).unwrap(),
                Fact::concept("Arg", a(2)).unwrap(),
                Fact::role("att", a(1), a(2)).unwrap(),
                Fact::role("att", a(2), a(1)).unwrap(),
                Fact::role("sup", a(1), a(3)).unwrap(),
                Fact::role("sup", a(2), a(1)).unwrap(),
            ];
            facts.into_iter().zip(d).map(|(f, d)| FuzzyAssertion::new(f, *d).unwrap()).collect()
        };
        let raised: Vec<f64> = degrees.iter().zip(&bumps).map(|(d, b)| d + (1.0 - d) * b).collect();
        if !check_kb_consistency(&tbox, &build(&degrees)).is_ok() {
            prop_assert!(!check_kb_consistency(&tbox, &build(&raised)).is_ok());
        }
    }
}
