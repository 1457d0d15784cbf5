use std::collections::BTreeSet;
use std::fmt;

use super::{BasicConcept, Inclusion, Role, Tbox};

/// A disjointness constraint `X ⊑ ¬Y`, either between basic concepts or
/// between basic roles.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NegativeInclusion {
    Concepts(BasicConcept, BasicConcept),
    Roles(Role, Role),
}

impl NegativeInclusion {
    /// All equivalent forms: swapped sides, and for roles the inverted pair.
    pub fn variants(&self) -> Vec<NegativeInclusion> {
        match self {
            NegativeInclusion::Concepts(x, y) => vec![
                NegativeInclusion::Concepts(x.clone(), y.clone()),
                NegativeInclusion::Concepts(y.clone(), x.clone()),
            ],
            NegativeInclusion::Roles(x, y) => vec![
                NegativeInclusion::Roles(x.clone(), y.clone()),
                NegativeInclusion::Roles(y.clone(), x.clone()),
                NegativeInclusion::Roles(x.inverted(), y.inverted()),
                NegativeInclusion::Roles(y.inverted(), x.inverted()),
            ],
        }
    }

    /// Smallest of [`variants`](Self::variants); equivalent constraints share it.
    pub fn canonical(&self) -> NegativeInclusion {
        self.variants().into_iter().min().expect("at least one variant")
    }

    pub fn to_inclusion(&self) -> Inclusion {
        match self {
            NegativeInclusion::Concepts(x, y) => Inclusion::concept_disjoint(x.clone(), y.clone()),
            NegativeInclusion::Roles(x, y) => Inclusion::role_disjoint(x.clone(), y.clone()),
        }
    }

    pub fn from_inclusion(inclusion: &Inclusion) -> Option<NegativeInclusion> {
        match inclusion {
            Inclusion::Concept {
                lhs,
                rhs,
                negated: true,
            } => Some(NegativeInclusion::Concepts(lhs.clone(), rhs.clone())),
            Inclusion::Role {
                lhs,
                rhs,
                negated: true,
            } => Some(NegativeInclusion::Roles(lhs.clone(), rhs.clone())),
            _ => None,
        }
    }
}

impl fmt::Display for NegativeInclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_inclusion().fmt(f)
    }
}

/// Closure of the negative inclusions of `tbox` under its positive
/// inclusions. Every constraint is stored in all of its equivalent forms.
///
/// Besides propagating disjointness backwards along concept and role
/// inclusions, an unsatisfiable role is recognised in any of its three
/// shapes (`∃Q ⊑ ¬∃Q`, `∃Q⁻ ⊑ ¬∃Q⁻`, `Q ⊑ ¬Q`) and recorded in all of them.
pub fn ni_closure(tbox: &Tbox) -> BTreeSet<NegativeInclusion> {
    let concept_incs: Vec<(&BasicConcept, &BasicConcept)> = tbox.concept_inclusions().collect();
    let role_incs = tbox.role_inclusions();

    let mut closed = BTreeSet::new();
    let mut queue = Vec::new();
    let add = |ni: NegativeInclusion, closed: &mut BTreeSet<NegativeInclusion>, queue: &mut Vec<NegativeInclusion>| {
        for v in ni.variants() {
            if closed.insert(v.clone()) {
                queue.push(v);
            }
        }
    };

    for ni in tbox.iter().filter_map(NegativeInclusion::from_inclusion) {
        add(ni, &mut closed, &mut queue);
    }

    while let Some(ni) = queue.pop() {
        let mut derived = Vec::new();
        match &ni {
            NegativeInclusion::Concepts(b2, b3) => {
                for (b1, rhs) in &concept_incs {
                    if *rhs == b2 {
                        derived.push(NegativeInclusion::Concepts((*b1).clone(), b3.clone()));
                    }
                }
                if let BasicConcept::Exists(q2) = b2 {
                    for (q1, rhs) in &role_incs {
                        if rhs == q2 {
                            derived.push(NegativeInclusion::Concepts(
                                BasicConcept::Exists(q1.clone()),
                                b3.clone(),
                            ));
                        }
                    }
                    if b2 == b3 {
                        derived.push(NegativeInclusion::Roles(q2.clone(), q2.clone()));
                        let inv = BasicConcept::Exists(q2.inverted());
                        derived.push(NegativeInclusion::Concepts(inv.clone(), inv));
                    }
                }
            }
            NegativeInclusion::Roles(q2, q3) => {
                for (q1, rhs) in &role_incs {
                    if rhs == q2 {
                        derived.push(NegativeInclusion::Roles(q1.clone(), q3.clone()));
                    }
                }
                if q2 == q3 {
                    for q in [q2.clone(), q2.inverted()] {
                        let e = BasicConcept::Exists(q);
                        derived.push(NegativeInclusion::Concepts(e.clone(), e));
                    }
                }
            }
        }
        for d in derived {
            add(d, &mut closed, &mut queue);
        }
    }
    closed
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::debate_tbox;
    use super::super::parse_tbox;
    use super::*;

    fn atomic(s: &str) -> BasicConcept {
        BasicConcept::atomic(s)
    }

    fn has(closure: &BTreeSet<NegativeInclusion>, line: &str) -> bool {
        let t = parse_tbox(line).unwrap();
        let ni = NegativeInclusion::from_inclusion(t.iter().next().unwrap()).unwrap();
        closure.contains(&ni)
    }

    #[test]
    fn debate_closure() {
        let c = ni_closure(&debate_tbox());
        assert!(has(&c, "Left <= not Right"));
        assert!(has(&c, "Right <= not Left"));
        assert_eq!(c.len(), 2);
        assert!(c.contains(&NegativeInclusion::Concepts(atomic("Left"), atomic("Right"))));
    }

    #[test]
    fn propagation_rules() {
        let t = parse_tbox("A <= B\nB <= not C\nr <= s\nexists s <= not D\ns- <= not p\n").unwrap();
        let c = ni_closure(&t);
        assert!(has(&c, "A <= not C"));
        assert!(has(&c, "C <= not A"));
        assert!(has(&c, "exists r <= not D"));
        assert!(has(&c, "D <= not exists r"));
        assert!(has(&c, "r- <= not p"));
        assert!(has(&c, "r <= not p-"));
        assert!(has(&c, "p <= not r-"));
        assert!(!has(&c, "exists r- <= not D"));
    }

    #[test]
    fn inverse_existential_propagation() {
        let t = parse_tbox("r <= s\nexists s- <= not D").unwrap();
        let c = ni_closure(&t);
        assert!(has(&c, "exists r- <= not D"));
        assert!(!has(&c, "exists r <= not D"));
    }

    #[test]
    fn unsatisfiable_role_reaches_generators() {
        let t = parse_tbox("A <= exists r\nexists r- <= B\nexists r- <= C\nB <= not C").unwrap();
        let c = ni_closure(&t);
        assert!(has(&c, "exists r- <= not exists r-"));
        assert!(has(&c, "r <= not r"));
        assert!(has(&c, "exists r <= not exists r"));
        assert!(has(&c, "A <= not A"));
    }

    #[test]
    fn canonical_is_shared() {
        let a = NegativeInclusion::Roles(Role::new("r"), Role::inverse_of("s"));
        let b = NegativeInclusion::Roles(Role::new("s"), Role::inverse_of("r"));
        assert_eq!(a.canonical(), b.canonical());
    }
}
