//! Node/edge JSON view of a FABox, for drawing it elsewhere.

use std::collections::{BTreeMap, BTreeSet};

use fakb_core::fabox::{builtin, FABox, Fact, IndividualName, Sort};
use fakb_core::qbaf::ArgumentId;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Graph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Serialize)]
pub struct Node {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub label: String,
    pub weight: f64,
}

fn id(name: &IndividualName) -> String {
    name.to_string()
}

fn concept_id(name: &str) -> String {
    format!("concept:{name}")
}

/// `initial` holds the strengths before the update, when known; the `Arg`
/// degrees of `fabox` are reported as the strengths.
pub fn build(fabox: &FABox, initial: &BTreeMap<ArgumentId, f64>) -> Graph {
    let mut individuals: BTreeSet<&IndividualName> = BTreeSet::new();
    let mut strengths: BTreeMap<&IndividualName, f64> = BTreeMap::new();
    let mut concepts: BTreeSet<&str> = BTreeSet::new();
    let mut edges = Vec::new();
    for a in fabox {
        match a.fact() {
            Fact::Concept { predicate, individual } => {
                individuals.insert(individual);
                if predicate == builtin::ARG {
                    strengths.insert(individual, a.degree());
                } else if predicate != builtin::TARG {
                    concepts.insert(predicate);
                    edges.push(Edge {
                        source: id(individual),
                        target: concept_id(predicate),
                        kind: "instance",
                        label: predicate.clone(),
                        weight: a.degree(),
                    });
                }
            }
            Fact::Role {
                predicate,
                subject,
                object,
            } => {
                individuals.insert(subject);
                individuals.insert(object);
                let kind = match predicate.as_str() {
                    builtin::ATT => "att",
                    builtin::SUP => "sup",
                    _ => "role",
                };
                edges.push(Edge {
                    source: id(subject),
                    target: id(object),
                    kind,
                    label: predicate.clone(),
                    weight: a.degree(),
                });
            }
        }
    }
    let mut nodes: Vec<Node> = individuals
        .into_iter()
        .map(|i| Node {
            id: id(i),
            kind: match i.sort() {
                Sort::Argument => "argument",
                Sort::Text => "text",
                Sort::Plain => "entity",
            },
            label: i.label(),
            initial: i.as_argument().and_then(|a| initial.get(&a).copied()),
            strength: strengths.get(i).copied(),
        })
        .collect();
    nodes.extend(concepts.into_iter().map(|c| Node {
        id: concept_id(c),
        kind: "concept",
        label: c.to_string(),
        initial: None,
        strength: None,
    }));
    Graph { nodes, edges }
}
