use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{ni_closure, BasicConcept, NegativeInclusion, Role, Tbox};
use crate::fabox::{FABox, Fact, IndividualName};

/// One place where a negative inclusion is violated.
#[derive(Debug, Clone, PartialEq)]
pub struct NiWitness {
    /// One individual for a concept constraint, the ordered pair for a role
    /// constraint.
    pub individuals: Vec<IndividualName>,
    pub lhs_degree: f64,
    pub rhs_degree: f64,
}

impl NiWitness {
    /// By how much the two degrees exceed 1 together.
    pub fn excess(&self) -> f64 {
        self.lhs_degree + self.rhs_degree - 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NiViolation {
    pub constraint: NegativeInclusion,
    pub witnesses: Vec<NiWitness>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KbReport {
    pub violations: Vec<NiViolation>,
}

impl KbReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for KbReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return writeln!(f, "consistent");
        }
        for v in &self.violations {
            writeln!(f, "violated: {}", v.constraint)?;
            for w in &v.witnesses {
                let names: Vec<String> = w.individuals.iter().map(|i| i.to_string()).collect();
                writeln!(f, "  ({}): {} + {} > 1", names.join(","), w.lhs_degree, w.rhs_degree)?;
            }
        }
        Ok(())
    }
}

struct Degrees<'a> {
    concepts: HashMap<&'a str, HashMap<&'a IndividualName, f64>>,
    roles: HashMap<&'a str, HashMap<(&'a IndividualName, &'a IndividualName), f64>>,
}

fn raise<K: Eq + std::hash::Hash>(map: &mut HashMap<K, f64>, key: K, degree: f64) {
    let slot = map.entry(key).or_insert(0.0);
    if degree > *slot {
        *slot = degree;
    }
}

impl<'a> Degrees<'a> {
    fn new(fabox: &'a FABox) -> Self {
        let mut concepts: HashMap<&str, HashMap<&IndividualName, f64>> = HashMap::new();
        let mut roles: HashMap<&str, HashMap<(&IndividualName, &IndividualName), f64>> = HashMap::new();
        for a in fabox.iter() {
            match a.fact() {
                Fact::Concept { predicate, individual } => {
                    raise(concepts.entry(predicate).or_default(), individual, a.degree())
                }
                Fact::Role {
                    predicate,
                    subject,
                    object,
                } => raise(roles.entry(predicate).or_default(), (subject, object), a.degree()),
            }
        }
        Self { concepts, roles }
    }

    /// Degrees of a basic concept over the individuals where it is positive.
    fn concept_extension(&self, b: &BasicConcept) -> HashMap<&'a IndividualName, f64> {
        match b {
            BasicConcept::Atomic(name) => self.concepts.get(name.as_str()).cloned().unwrap_or_default(),
            BasicConcept::Exists(role) => {
                let mut out = HashMap::new();
                if let Some(pairs) = self.roles.get(role.name.as_str()) {
                    for (&(s, o), &d) in pairs {
                        raise(&mut out, if role.inverse { o } else { s }, d);
                    }
                }
                out
            }
        }
    }

    fn role_extension(&self, q: &Role) -> HashMap<(&'a IndividualName, &'a IndividualName), f64> {
        let mut out = HashMap::new();
        if let Some(pairs) = self.roles.get(q.name.as_str()) {
            for (&(s, o), &d) in pairs {
                out.insert(if q.inverse { (o, s) } else { (s, o) }, d);
            }
        }
        out
    }
}

// Written as a sum so that the test does not depend on which side is X.
pub(crate) fn fires(lhs: f64, rhs: f64) -> bool {
    lhs + rhs > 1.0
}

/// Checks the closed negative inclusions of `tbox` against `fabox`. A
/// constraint `X ⊑ ¬Y` is violated wherever `d_X + d_Y > 1`; the degree of
/// `∃Q` at an individual is the largest degree of its `Q`-successors.
///
/// Violations are ordered by their largest excess, witnesses by excess and
/// then by individual names.
pub fn check_kb_consistency(tbox: &Tbox, fabox: &FABox) -> KbReport {
    let degrees = Degrees::new(fabox);
    let constraints: BTreeSet<NegativeInclusion> = ni_closure(tbox).iter().map(|ni| ni.canonical()).collect();
    let mut violations = Vec::new();
    for constraint in constraints {
        let mut witnesses = Vec::new();
        match &constraint {
            NegativeInclusion::Concepts(x, y) => {
                let dx = degrees.concept_extension(x);
                let dy = degrees.concept_extension(y);
                for (ind, &l) in &dx {
                    let r = dy.get(ind).copied().unwrap_or(0.0);
                    if fires(l, r) {
                        witnesses.push(NiWitness {
                            individuals: vec![(*ind).clone()],
                            lhs_degree: l,
                            rhs_degree: r,
                        });
                    }
                }
            }
            NegativeInclusion::Roles(x, y) => {
                let dx = degrees.role_extension(x);
                let dy = degrees.role_extension(y);
                for (&(s, o), &l) in &dx {
                    let r = dy.get(&(s, o)).copied().unwrap_or(0.0);
                    if fires(l, r) {
                        witnesses.push(NiWitness {
                            individuals: vec![s.clone(), o.clone()],
                            lhs_degree: l,
                            rhs_degree: r,
                        });
                    }
                }
            }
        }
        if !witnesses.is_empty() {
            witnesses.sort_by(|a, b| {
                b.excess()
                    .total_cmp(&a.excess())
                    .then_with(|| a.individuals.cmp(&b.individuals))
            });
            violations.push(NiViolation { constraint, witnesses });
        }
    }
    violations.sort_by(|a, b| {
        b.witnesses[0]
            .excess()
            .total_cmp(&a.witnesses[0].excess())
            .then_with(|| a.constraint.cmp(&b.constraint))
    });
    KbReport { violations }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::debate_tbox;
    use super::super::parse_tbox;
    use super::*;
    use crate::fabox::fixtures::{arg, concept, plain, role, source};
    use crate::fabox::FuzzyAssertion;

    #[test]
    fn debate_kb_is_consistent() {
        assert!(check_kb_consistency(&debate_tbox(), &source()).is_ok());
        let mut f = source();
        f.insert(concept("Right", plain("g"), 1.0));
        let r = check_kb_consistency(&debate_tbox(), &f);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].witnesses[0].individuals, vec![plain("g")]);
    }

    #[test]
    fn fuzzy_boundary() {
        let t = parse_tbox("exists att <= not exists sup").unwrap();
        let mut f = FABox::new();
        f.insert(role("att", arg(2), arg(1), 0.4));
        f.insert(role("sup", arg(2), arg(3), 0.6));
        assert!(check_kb_consistency(&t, &f).is_ok());

        f.insert(role("att", arg(4), arg(1), 0.4));
        f.insert(role("sup", arg(4), arg(3), 0.7));
        let report = check_kb_consistency(&t, &f);
        assert_eq!(report.violations.len(), 1);
        let w = &report.violations[0].witnesses;
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].individuals, vec![arg(4)]);
        assert!((w[0].excess() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn graded_plain_concepts() {
        let t = parse_tbox("A <= not B").unwrap();
        let graded = |p: &str, d: f64| FuzzyAssertion::graded(Fact::concept(p, plain("x")).unwrap(), d).unwrap();
        let mut f = FABox::new();
        f.insert(graded("A", 0.4));
        f.insert(graded("B", 0.5));
        assert!(check_kb_consistency(&t, &f).is_ok());
        f.remove(&graded("B", 0.5));
        f.insert(graded("B", 0.7));
        assert!(!check_kb_consistency(&t, &f).is_ok());
    }

    #[test]
    fn existential_uses_max_filler() {
        let t = parse_tbox("exists att- <= not Retracted").unwrap();
        let mut f = FABox::new();
        f.insert(role("att", arg(2), arg(1), 0.3));
        f.insert(role("att", arg(3), arg(1), 0.8));
        f.insert(concept("Retracted", arg(1), 1.0));
        let report = check_kb_consistency(&t, &f);
        assert_eq!(report.violations.len(), 1);
        let w = &report.violations[0].witnesses[0];
        assert_eq!(w.individuals, vec![arg(1)]);
        let mut ds = [w.lhs_degree, w.rhs_degree];
        ds.sort_by(f64::total_cmp);
        assert_eq!(ds, [0.8, 1.0]);

        let t = parse_tbox("exists att- <= not exists sup-").unwrap();
        f.insert(role("sup", arg(4), arg(1), 0.15));
        assert!(check_kb_consistency(&t, &f).is_ok());
        f.insert(role("sup", arg(5), arg(1), 0.3));
        assert!(!check_kb_consistency(&t, &f).is_ok());
    }

    #[test]
    fn role_disjointness_with_inverse() {
        let t = parse_tbox("att <= not sup-").unwrap();
        let mut f = FABox::new();
        f.insert(role("att", arg(1), arg(2), 0.9));
        f.insert(role("sup", arg(2), arg(1), 0.2));
        let r = check_kb_consistency(&t, &f);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].witnesses[0].individuals.len(), 2);
        f.remove(&role("sup", arg(2), arg(1), 0.2));
        f.insert(role("sup", arg(2), arg(1), 0.05));
        assert!(check_kb_consistency(&t, &f).is_ok());
    }

    #[test]
    fn derived_constraint_fires() {
        let t = parse_tbox("A <= exists r\nexists r- <= B\nexists r- <= C\nB <= not C").unwrap();
        let mut f = FABox::new();
        f.insert(concept("D", plain("a"), 1.0));
        assert!(check_kb_consistency(&t, &f).is_ok());
        f.insert(concept("A", plain("b"), 1.0));
        assert!(!check_kb_consistency(&t, &f).is_ok());
    }

    #[test]
    fn ordering_by_excess() {
        let t = parse_tbox("Arg <= not Noise\nexists att <= not exists sup").unwrap();
        let mut f = FABox::new();
        f.insert(concept("Arg", arg(1), 0.3));
        f.insert(concept("Noise", arg(1), 1.0));
        f.insert(concept("Arg", arg(2), 0.1));
        f.insert(concept("Noise", arg(2), 1.0));
        f.insert(role("att", arg(3), arg(1), 0.9));
        f.insert(role("sup", arg(3), arg(2), 0.9));
        let r = check_kb_consistency(&t, &f);
        assert_eq!(r.violations.len(), 2);
        assert_eq!(r.violations[0].constraint.to_string(), "exists att <= not exists sup");
        assert_eq!(r.violations[1].constraint.to_string(), "Arg <= not Noise");
        let ws: Vec<_> = r.violations[1]
            .witnesses
            .iter()
            .map(|w| w.individuals[0].clone())
            .collect();
        assert_eq!(ws, vec![arg(1), arg(2)]);
    }
}
