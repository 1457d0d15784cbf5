use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::{FuzzyQuery, QueryAtom, Term, UnionQuery};
use crate::dllite::{BasicConcept, Role, Tbox};
use crate::fabox::builtin;

/// Above this many candidate renamings, canonicalization settles for the
/// signature order alone.
const MAX_RENAMINGS: usize = 5040;

struct Axioms {
    concepts: Vec<(BasicConcept, BasicConcept)>,
    roles: Vec<(Role, Role)>,
}

fn occurrences(q: &FuzzyQuery, var: &str) -> usize {
    q.atoms()
        .iter()
        .flat_map(|a| a.args())
        .filter(|t| t.as_var() == Some(var))
        .count()
}

/// An existential variable occurring exactly once.
fn is_unbound(q: &FuzzyQuery, term: &Term) -> bool {
    match term {
        Term::Var(v) => !q.is_free(v) && occurrences(q, v) == 1,
        Term::Const(_) => false,
    }
}

fn fresh_var(q: &FuzzyQuery) -> Term {
    let used: BTreeSet<&str> = q
        .atoms()
        .iter()
        .flat_map(|a| a.args())
        .chain(q.head())
        .filter_map(Term::as_var)
        .collect();
    (0..)
        .map(|k| format!("_{k}"))
        .find(|name| !used.contains(name.as_str()))
        .map(Term::Var)
        .expect("unbounded supply of names")
}

fn role_atom(role: &Role, subject: Term, object: Term) -> QueryAtom {
    if role.inverse {
        QueryAtom::raw(&role.name, vec![object, subject])
    } else {
        QueryAtom::raw(&role.name, vec![subject, object])
    }
}

/// The atom for `lhs(t)`, with a fresh variable as filler for `∃Q`.
fn lhs_atom(q: &FuzzyQuery, lhs: &BasicConcept, t: &Term) -> QueryAtom {
    match lhs {
        BasicConcept::Atomic(a) => QueryAtom::raw(a, vec![t.clone()]),
        BasicConcept::Exists(r) => role_atom(r, t.clone(), fresh_var(q)),
    }
}

/// Atoms obtained by applying one positive inclusion right-to-left.
fn rewrite_atom(q: &FuzzyQuery, atom: &QueryAtom, axioms: &Axioms) -> Vec<QueryAtom> {
    let mut out = Vec::new();
    if builtin::is_builtin(atom.predicate()) {
        return out;
    }
    match atom.args() {
        [t] => {
            for (lhs, rhs) in &axioms.concepts {
                if matches!(rhs, BasicConcept::Atomic(a) if a == atom.predicate()) {
                    out.push(lhs_atom(q, lhs, t));
                }
            }
        }
        [t1, t2] => {
            for (lhs, rhs) in &axioms.concepts {
                let BasicConcept::Exists(r) = rhs else { continue };
                if r.name != atom.predicate() {
                    continue;
                }
                if !r.inverse && is_unbound(q, t2) {
                    out.push(lhs_atom(q, lhs, t1));
                }
                if r.inverse && is_unbound(q, t1) {
                    out.push(lhs_atom(q, lhs, t2));
                }
            }
            let target = Role::new(atom.predicate());
            for (sub, sup) in &axioms.roles {
                if *sup == target {
                    out.push(role_atom(sub, t1.clone(), t2.clone()));
                }
            }
        }
        _ => {}
    }
    out
}

fn replace_atom(q: &FuzzyQuery, index: usize, atom: QueryAtom) -> FuzzyQuery {
    let mut atoms = q.atoms().to_vec();
    atoms[index] = atom;
    FuzzyQuery::from_parts(q.head().to_vec(), dedup(atoms))
}

fn dedup(atoms: Vec<QueryAtom>) -> Vec<QueryAtom> {
    let mut seen = HashSet::new();
    atoms.into_iter().filter(|a| seen.insert(a.clone())).collect()
}

type Substitution = BTreeMap<String, Term>;

fn resolve(s: &Substitution, t: &Term) -> Term {
    let mut t = t.clone();
    while let Term::Var(v) = &t {
        match s.get(v) {
            Some(next) => t = next.clone(),
            None => break,
        }
    }
    t
}

/// Most general unifier of two atoms. Free variables survive over
/// existential ones, earlier head positions over later ones.
fn mgu(q: &FuzzyQuery, a: &QueryAtom, b: &QueryAtom) -> Option<Substitution> {
    if a.predicate() != b.predicate() || a.args().len() != b.args().len() {
        return None;
    }
    let rank = |v: &str| {
        q.head()
            .iter()
            .position(|t| t.as_var() == Some(v))
            .unwrap_or(usize::MAX)
    };
    let mut s = Substitution::new();
    for (x, y) in a.args().iter().zip(b.args()) {
        let (x, y) = (resolve(&s, x), resolve(&s, y));
        if x == y {
            continue;
        }
        match (&x, &y) {
            (Term::Var(vx), Term::Var(vy)) => {
                if rank(vx) <= rank(vy) {
                    s.insert(vy.clone(), x.clone());
                } else {
                    s.insert(vx.clone(), y.clone());
                }
            }
            (Term::Var(v), Term::Const(_)) => {
                s.insert(v.clone(), y.clone());
            }
            (Term::Const(_), Term::Var(v)) => {
                s.insert(v.clone(), x.clone());
            }
            (Term::Const(_), Term::Const(_)) => return None,
        }
    }
    Some(s)
}

fn apply(q: &FuzzyQuery, s: &Substitution) -> FuzzyQuery {
    let head = q.head().iter().map(|t| resolve(s, t)).collect();
    let atoms = q
        .atoms()
        .iter()
        .map(|a| a.with_args(a.args().iter().map(|t| resolve(s, t)).collect()))
        .collect();
    FuzzyQuery::from_parts(head, dedup(atoms))
}

fn successors(q: &FuzzyQuery, axioms: &Axioms) -> Vec<FuzzyQuery> {
    let mut out = Vec::new();
    for (i, atom) in q.atoms().iter().enumerate() {
        for new in rewrite_atom(q, atom, axioms) {
            out.push(replace_atom(q, i, new));
        }
    }
    for i in 0..q.atoms().len() {
        for j in i + 1..q.atoms().len() {
            if let Some(s) = mgu(q, &q.atoms()[i], &q.atoms()[j]) {
                out.push(apply(q, &s));
            }
        }
    }
    out
}

type Signature = Vec<(String, usize, Vec<String>)>;

fn signature(q: &FuzzyQuery, var: &str) -> Signature {
    let mut sig = Vec::new();
    for atom in q.atoms() {
        for (pos, t) in atom.args().iter().enumerate() {
            if t.as_var() != Some(var) {
                continue;
            }
            let others = atom
                .args()
                .iter()
                .map(|o| match o {
                    Term::Const(c) => format!("c:{c}"),
                    Term::Var(v) if v == var => "self".to_string(),
                    Term::Var(v) if q.is_free(v) => format!("h:{v}"),
                    Term::Var(_) => "e".to_string(),
                })
                .collect();
            sig.push((atom.predicate().to_string(), pos, others));
        }
    }
    sig.sort();
    sig
}

fn permutations(items: &[String]) -> Vec<Vec<String>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first.clone());
            out.push(p);
        }
    }
    out
}

/// Renames existential variables to `_0`, `_1`, ... and sorts the atoms so
/// that disjuncts equal up to renaming get the same form.
pub(crate) fn canonical(q: &FuzzyQuery) -> FuzzyQuery {
    let head_vars: BTreeSet<&str> = q.head().iter().filter_map(Term::as_var).collect();
    let mut vars: Vec<(Signature, String)> = q
        .existential_variables()
        .into_iter()
        .map(|v| (signature(q, v), v.to_string()))
        .collect();
    vars.sort();

    let names: Vec<String> = (0..)
        .map(|k| format!("_{k}"))
        .filter(|n| !head_vars.contains(n.as_str()))
        .take(vars.len())
        .collect();

    let mut groups: Vec<Vec<String>> = Vec::new();
    for (i, (sig, v)) in vars.iter().enumerate() {
        if i > 0 && vars[i - 1].0 == *sig {
            groups.last_mut().expect("group started").push(v.clone());
        } else {
            groups.push(vec![v.clone()]);
        }
    }
    let total = groups
        .iter()
        .try_fold(1usize, |acc, g| (1..=g.len()).try_fold(acc, |a, k| a.checked_mul(k)))
        .unwrap_or(usize::MAX);
    let orders: Vec<Vec<Vec<String>>> = if total <= MAX_RENAMINGS {
        groups.iter().map(|g| permutations(g)).collect()
    } else {
        groups.iter().map(|g| vec![g.clone()]).collect()
    };

    let mut best: Option<Vec<QueryAtom>> = None;
    let mut choice = vec![0usize; orders.len()];
    loop {
        let order: Vec<&String> = choice.iter().zip(&orders).flat_map(|(&c, o)| o[c].iter()).collect();
        let s: BTreeMap<&str, Term> = order
            .iter()
            .zip(&names)
            .map(|(v, n)| (v.as_str(), Term::Var(n.clone())))
            .collect();
        let mut atoms: Vec<QueryAtom> = q
            .atoms()
            .iter()
            .map(|a| {
                a.with_args(
                    a.args()
                        .iter()
                        .map(|t| match t {
                            Term::Var(v) => s.get(v.as_str()).cloned().unwrap_or_else(|| t.clone()),
                            Term::Const(_) => t.clone(),
                        })
                        .collect(),
                )
            })
            .collect();
        atoms.sort();
        atoms.dedup();
        if best.as_ref().is_none_or(|b| atoms < *b) {
            best = Some(atoms);
        }
        // next combination, odometer style
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < orders[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            break;
        }
    }
    FuzzyQuery::from_parts(q.head().to_vec(), best.expect("at least one renaming"))
}

/// Rewrites `q` against the positive inclusions of `tbox` so that plain
/// evaluation over an ABox yields the certain answers.
///
/// The input disjuncts come first, as given; generated disjuncts follow in
/// canonical form, ordered by size and then text. The result depends only on
/// `q` and `tbox`.
pub fn perfect_ref(q: &UnionQuery, tbox: &Tbox) -> UnionQuery {
    let axioms = Axioms {
        concepts: tbox.concept_inclusions().map(|(l, r)| (l.clone(), r.clone())).collect(),
        roles: tbox.role_inclusions(),
    };
    let mut seen: HashSet<FuzzyQuery> = HashSet::new();
    let mut originals = Vec::new();
    let mut generated = Vec::new();
    let mut queue = VecDeque::new();
    for d in q.disjuncts() {
        if seen.insert(canonical(d)) {
            originals.push(d.clone());
            queue.push_back(d.clone());
        }
    }
    while let Some(d) = queue.pop_front() {
        for next in successors(&d, &axioms) {
            let c = canonical(&next);
            if seen.insert(c.clone()) {
                generated.push(c.clone());
                queue.push_back(c);
            }
        }
    }
    let mut keyed: Vec<(usize, String, FuzzyQuery)> = generated
        .into_iter()
        .map(|g| (g.atoms().len(), g.to_string(), g))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    originals.extend(keyed.into_iter().map(|(_, _, g)| g));
    UnionQuery::new(originals).expect("rewriting keeps the head arity")
}
