use std::collections::{BTreeSet, HashMap};

use super::eval::{answers_on_store, FactStore};
use super::{FuzzyAnswerSet, QueryError, ThresholdedQuery};
use crate::dllite::consistency::fires;
use crate::dllite::{BasicConcept, Inclusion, Role, Tbox};
use crate::fabox::FABox;

fn role_pairs(store: &FactStore, role: &Role) -> Vec<(u32, u32, f64)> {
    let Some(table) = store.role_table(&role.name) else {
        return Vec::new();
    };
    table
        .pairs()
        .map(|((s, o), d)| if role.inverse { (o, s, d) } else { (s, o, d) })
        .collect()
}

fn raise_role(store: &mut FactStore, role: &Role, a: u32, b: u32, degree: f64) -> bool {
    if role.inverse {
        store.raise_role(&role.name, b, a, degree)
    } else {
        store.raise_role(&role.name, a, b, degree)
    }
}

fn extension(store: &FactStore, b: &BasicConcept) -> HashMap<u32, f64> {
    match b {
        BasicConcept::Atomic(a) => store.concept_table(a).cloned().unwrap_or_default(),
        BasicConcept::Exists(r) => {
            let mut out: HashMap<u32, f64> = HashMap::new();
            for (s, _, d) in role_pairs(store, r) {
                let slot = out.entry(s).or_insert(0.0);
                *slot = slot.max(d);
            }
            out
        }
    }
}

fn violation(store: &FactStore, inclusion: &Inclusion) -> bool {
    match inclusion {
        Inclusion::Concept {
            lhs,
            rhs,
            negated: true,
        } => {
            let r = extension(store, rhs);
            extension(store, lhs)
                .iter()
                .any(|(e, &d)| fires(d, r.get(e).copied().unwrap_or(0.0)))
        }
        Inclusion::Role {
            lhs,
            rhs,
            negated: true,
        } => {
            let r: HashMap<(u32, u32), f64> = role_pairs(store, rhs)
                .into_iter()
                .map(|(a, b, d)| ((a, b), d))
                .collect();
            role_pairs(store, lhs)
                .into_iter()
                .any(|(a, b, d)| fires(d, r.get(&(a, b)).copied().unwrap_or(0.0)))
        }
        _ => false,
    }
}

/// Certain answers computed model-theoretically, for testing the rewriting.
///
/// Chases the positive inclusions over the ABox into a minimal fuzzy model:
/// each derived fact gets exactly the degree of the fact it came from, and
/// each individual gets at most one anonymous witness per basic role. The
/// anonymous part is cut at a depth beyond which it only repeats itself, so
/// the result is exact whenever fewer than `max_witnesses` anonymous
/// individuals are needed.
pub fn oracle_fcert_small(
    q: &ThresholdedQuery,
    tbox: &Tbox,
    abox: &FABox,
    max_witnesses: usize,
) -> Result<FuzzyAnswerSet, QueryError> {
    let mut store = FactStore::from_abox(abox);
    let mut depth = vec![0usize; store.len()];

    let concept_incs: Vec<(BasicConcept, BasicConcept)> =
        tbox.concept_inclusions().map(|(l, r)| (l.clone(), r.clone())).collect();
    let role_incs = tbox.role_inclusions();
    let role_names: BTreeSet<&str> = tbox
        .iter()
        .flat_map(|i| match i {
            Inclusion::Concept { lhs, rhs, .. } => [lhs, rhs]
                .into_iter()
                .filter_map(|b| match b {
                    BasicConcept::Exists(r) => Some(r.name.as_str()),
                    BasicConcept::Atomic(_) => None,
                })
                .collect::<Vec<_>>(),
            Inclusion::Role { lhs, rhs, .. } => vec![lhs.name.as_str(), rhs.name.as_str()],
        })
        .collect();
    let longest = q.query.disjuncts().iter().map(|d| d.atoms().len()).max().unwrap_or(0);
    let depth_limit = longest + 2 * role_names.len() + 1;

    let mut witnesses: HashMap<(u32, Role), u32> = HashMap::new();
    loop {
        let mut changed = false;
        for (sub, sup) in &role_incs {
            for (a, b, d) in role_pairs(&store, sub) {
                changed |= raise_role(&mut store, sup, a, b, d);
            }
        }
        for (lhs, rhs) in &concept_incs {
            let mut ext: Vec<(u32, f64)> = extension(&store, lhs).into_iter().collect();
            ext.sort_by_key(|(e, _)| *e);
            for (e, d) in ext {
                match rhs {
                    BasicConcept::Atomic(a) => changed |= store.raise_concept(a, e, d),
                    BasicConcept::Exists(r) => {
                        if depth[e as usize] + 1 > depth_limit {
                            continue;
                        }
                        let w = match witnesses.get(&(e, r.clone())) {
                            Some(&w) => w,
                            None => {
                                if witnesses.len() == max_witnesses {
                                    return Err(QueryError::OracleIncomplete(max_witnesses));
                                }
                                let w = store.anonymous();
                                depth.push(depth[e as usize] + 1);
                                witnesses.insert((e, r.clone()), w);
                                changed = true;
                                w
                            }
                        };
                        changed |= raise_role(&mut store, r, e, w, d);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    if let Some(bad) = tbox.iter().find(|i| violation(&store, i)) {
        return Err(QueryError::OracleInconsistent(bad.to_string()));
    }
    Ok(answers_on_store(&q.query, &store).filtered(q.threshold))
}
