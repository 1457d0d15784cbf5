use std::collections::HashMap;

use super::{perfect_ref, FuzzyAnswerSet, FuzzyQuery, QueryError, Term, ThresholdedQuery, UnionQuery};
use crate::dllite::{check_kb_consistency, Tbox};
use crate::fabox::{FABox, Fact, IndividualName};

#[derive(Debug, Default)]
pub(crate) struct RoleTable {
    degrees: HashMap<(u32, u32), f64>,
    outgoing: HashMap<u32, Vec<u32>>,
    incoming: HashMap<u32, Vec<u32>>,
}

impl RoleTable {
    pub fn pairs(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.degrees.iter().map(|(k, d)| (*k, *d))
    }
}

/// Graded facts over interned individuals; anonymous individuals have no
/// name. Only positive degrees are stored, and each fact keeps its largest
/// degree.
#[derive(Debug, Default)]
pub(crate) struct FactStore {
    names: Vec<Option<IndividualName>>,
    ids: HashMap<IndividualName, u32>,
    concepts: HashMap<String, HashMap<u32, f64>>,
    roles: HashMap<String, RoleTable>,
}

fn raise(slot: &mut f64, degree: f64) -> bool {
    if degree > *slot {
        *slot = degree;
        true
    } else {
        false
    }
}

impl FactStore {
    pub fn from_abox(abox: &FABox) -> Self {
        let mut store = Self::default();
        for a in abox.iter() {
            match a.fact() {
                Fact::Concept { predicate, individual } => {
                    let x = store.named(individual);
                    store.raise_concept(predicate, x, a.degree());
                }
                Fact::Role {
                    predicate,
                    subject,
                    object,
                } => {
                    let s = store.named(subject);
                    let o = store.named(object);
                    store.raise_role(predicate, s, o, a.degree());
                }
            }
        }
        store
    }

    pub fn named(&mut self, name: &IndividualName) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(Some(name.clone()));
        self.ids.insert(name.clone(), id);
        id
    }

    pub fn anonymous(&mut self) -> u32 {
        self.names.push(None);
        (self.names.len() - 1) as u32
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, id: u32) -> Option<&IndividualName> {
        self.names[id as usize].as_ref()
    }

    /// Returns whether the degree went up.
    pub fn raise_concept(&mut self, predicate: &str, x: u32, degree: f64) -> bool {
        if degree <= 0.0 {
            return false;
        }
        let table = self.concepts.entry(predicate.to_string()).or_default();
        raise(table.entry(x).or_insert(0.0), degree)
    }

    pub fn raise_role(&mut self, predicate: &str, s: u32, o: u32, degree: f64) -> bool {
        if degree <= 0.0 {
            return false;
        }
        let table = self.roles.entry(predicate.to_string()).or_default();
        if !table.degrees.contains_key(&(s, o)) {
            table.outgoing.entry(s).or_default().push(o);
            table.incoming.entry(o).or_default().push(s);
        }
        raise(table.degrees.entry((s, o)).or_insert(0.0), degree)
    }

    pub fn concept_table(&self, predicate: &str) -> Option<&HashMap<u32, f64>> {
        self.concepts.get(predicate)
    }

    pub fn role_table(&self, predicate: &str) -> Option<&RoleTable> {
        self.roles.get(predicate)
    }

    /// Matches of `q` by head tuple, each with the best degree over all
    /// homomorphisms.
    pub fn evaluate(&self, q: &FuzzyQuery, out: &mut HashMap<Vec<u32>, f64>) {
        let mut vars: HashMap<String, usize> = HashMap::new();
        let mut compile = |t: &Term| -> Option<Slot> {
            match t {
                Term::Var(v) => {
                    let n = vars.len();
                    Some(Slot::Var(*vars.entry(v.clone()).or_insert(n)))
                }
                Term::Const(c) => self.ids.get(c).map(|&id| Slot::Const(id)),
            }
        };
        let mut atoms = Vec::new();
        for a in q.atoms() {
            let Some(args) = a.args().iter().map(&mut compile).collect::<Option<Vec<_>>>() else {
                return;
            };
            atoms.push(Compiled {
                predicate: a.predicate(),
                args,
            });
        }
        let Some(head) = q.head().iter().map(&mut compile).collect::<Option<Vec<_>>>() else {
            return;
        };
        let mut search = Search {
            store: self,
            atoms: &atoms,
            head: &head,
            done: vec![false; atoms.len()],
            binding: vec![None; vars.len()],
            out,
        };
        search.run(1.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    Var(usize),
    Const(u32),
}

struct Compiled<'a> {
    predicate: &'a str,
    args: Vec<Slot>,
}

struct Search<'a, 'o> {
    store: &'a FactStore,
    atoms: &'a [Compiled<'a>],
    head: &'a [Slot],
    done: Vec<bool>,
    binding: Vec<Option<u32>>,
    out: &'o mut HashMap<Vec<u32>, f64>,
}

impl Search<'_, '_> {
    fn value(&self, s: Slot) -> Option<u32> {
        match s {
            Slot::Const(c) => Some(c),
            Slot::Var(v) => self.binding[v],
        }
    }

    /// Rough number of candidate facts for an atom under the current binding.
    fn estimate(&self, atom: &Compiled) -> usize {
        match atom.args.as_slice() {
            [x] => match self.store.concept_table(atom.predicate) {
                None => 0,
                Some(t) => match self.value(*x) {
                    Some(_) => 1,
                    None => t.len(),
                },
            },
            [s, o] => match self.store.role_table(atom.predicate) {
                None => 0,
                Some(t) => match (self.value(*s), self.value(*o)) {
                    (Some(_), Some(_)) => 1,
                    (Some(x), None) => t.outgoing.get(&x).map_or(0, Vec::len),
                    (None, Some(y)) => t.incoming.get(&y).map_or(0, Vec::len),
                    (None, None) => t.degrees.len(),
                },
            },
            _ => 0,
        }
    }

    fn run(&mut self, degree: f64) {
        let next = (0..self.atoms.len())
            .filter(|&i| !self.done[i])
            .min_by_key(|&i| self.estimate(&self.atoms[i]));
        let Some(i) = next else {
            let tuple = self
                .head
                .iter()
                .map(|s| self.value(*s).expect("head variables occur in the body"))
                .collect();
            let slot = self.out.entry(tuple).or_insert(0.0);
            raise(slot, degree);
            return;
        };
        let atoms = self.atoms;
        let atom = &atoms[i];
        let mut candidates: Vec<(Vec<u32>, f64)> = Vec::new();
        match atom.args.as_slice() {
            [x] => {
                let Some(t) = self.store.concept_table(atom.predicate) else {
                    return;
                };
                match self.value(*x) {
                    Some(v) => {
                        if let Some(&d) = t.get(&v) {
                            candidates.push((vec![v], d));
                        }
                    }
                    None => candidates.extend(t.iter().map(|(&v, &d)| (vec![v], d))),
                }
            }
            [s, o] => {
                let Some(t) = self.store.role_table(atom.predicate) else {
                    return;
                };
                let pair = |a: u32, b: u32| t.degrees.get(&(a, b)).map(|&d| (vec![a, b], d));
                match (self.value(*s), self.value(*o)) {
                    (Some(a), Some(b)) => candidates.extend(pair(a, b)),
                    (Some(a), None) => {
                        for &b in t.outgoing.get(&a).into_iter().flatten() {
                            candidates.extend(pair(a, b));
                        }
                    }
                    (None, Some(b)) => {
                        for &a in t.incoming.get(&b).into_iter().flatten() {
                            candidates.extend(pair(a, b));
                        }
                    }
                    (None, None) => candidates.extend(t.degrees.iter().map(|(&(a, b), &d)| (vec![a, b], d))),
                }
            }
            _ => return,
        }

        self.done[i] = true;
        'next: for (values, d) in candidates {
            let mut bound = Vec::new();
            for (slot, v) in atom.args.iter().zip(values) {
                if let Slot::Var(var) = *slot {
                    match self.binding[var] {
                        Some(existing) if existing != v => {
                            for b in bound {
                                self.binding[b] = None;
                            }
                            continue 'next;
                        }
                        Some(_) => {}
                        None => {
                            self.binding[var] = Some(v);
                            bound.push(var);
                        }
                    }
                }
            }
            self.run(degree.min(d));
            for b in bound {
                self.binding[b] = None;
            }
        }
        self.done[i] = false;
    }
}

/// Answers over named individuals only.
pub(crate) fn answers_on_store(q: &UnionQuery, store: &FactStore) -> FuzzyAnswerSet {
    let mut raw = HashMap::new();
    for d in q.disjuncts() {
        store.evaluate(d, &mut raw);
    }
    let mut answers = FuzzyAnswerSet::new(q.arity());
    for (tuple, degree) in raw {
        let names: Option<Vec<IndividualName>> = tuple.iter().map(|&id| store.name(id).cloned()).collect();
        if let Some(names) = names {
            answers.insert(names, degree);
        }
    }
    answers
}

/// Evaluates `q` directly over the ABox: conjunction is min, existential
/// quantification and union are max.
pub fn fans(q: &UnionQuery, abox: &FABox) -> FuzzyAnswerSet {
    answers_on_store(q, &FactStore::from_abox(abox))
}

/// Certain answers of `q` over the knowledge base, filtered by the query's
/// threshold. An inconsistent knowledge base is refused.
pub fn fcert(q: &ThresholdedQuery, tbox: &Tbox, abox: &FABox) -> Result<FuzzyAnswerSet, QueryError> {
    let report = check_kb_consistency(tbox, abox);
    if !report.is_ok() {
        return Err(QueryError::Inconsistent(report));
    }
    let rewritten = perfect_ref(&q.query, tbox);
    Ok(fans(&rewritten, abox).filtered(q.threshold))
}
