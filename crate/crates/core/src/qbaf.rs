//! Weighted quantitative bipolar argumentation frameworks and modular gradual
//! semantics.
//!
//! A [`WeightedQbaf`] holds arguments with initial strengths plus weighted
//! attack and support edges. Final strengths are computed by a
//! [`ModularSemantics`]: an aggregation of the incoming edge contributions
//! followed by an influence function that combines the aggregate with the
//! argument's initial strength. [`QuadraticEnergy`] is the shipped semantics.
//!
//! Acyclic graphs are evaluated in one pass along a topological order
//! ([`evaluate_acyclic`]). Cyclic graphs go through a synchronous fixpoint
//! iteration ([`evaluate_iterative`]) that reports non-convergence instead of
//! failing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Default convergence threshold for [`evaluate_iterative`].
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Default round limit for [`evaluate_iterative`].
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QbafError {
    #[error("argument index must be positive")]
    ZeroIndex,
    #[error("invalid argument name `{0}` (expected a<k> with k >= 1)")]
    BadArgumentName(String),
    #[error("{what} of {subject} is {value}, outside [0,1]")]
    OutOfRange {
        what: &'static str,
        subject: String,
        value: f64,
    },
    #[error("unknown argument {0}")]
    UnknownArgument(ArgumentId),
    #[error("pair ({0},{1}) already carries the opposite relation")]
    RelationClash(ArgumentId, ArgumentId),
    #[error("the attack/support graph has a cycle through {0}; use evaluate_iterative")]
    Cyclic(ArgumentId),
    #[error("order is not a topological order of the QBAF: {0}")]
    BadOrder(String),
}

/// Identifier of an argument, `a<k>` with `k >= 1`.
///
/// Ordering follows the index, so `a2 < a10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgumentId(u32);

impl ArgumentId {
    pub fn new(index: u32) -> Result<Self, QbafError> {
        if index == 0 {
            return Err(QbafError::ZeroIndex);
        }
        Ok(Self(index))
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl FromStr for ArgumentId {
    type Err = QbafError;

    /// Parses the canonical form only: no leading zeros, no sign.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QbafError::BadArgumentName(s.to_string());
        let digits = s.strip_prefix('a').ok_or_else(bad)?;
        if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index: u32 = digits.parse().map_err(|_| bad())?;
        Self::new(index)
    }
}

/// Polarity of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Attack,
    Support,
}

fn check_unit(what: &'static str, subject: impl fmt::Display, value: f64) -> Result<(), QbafError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(QbafError::OutOfRange {
            what,
            subject: subject.to_string(),
            value,
        })
    }
}

/// A QBAF with initial strengths on arguments and weights on edges.
///
/// Unweighted frameworks are modelled with every weight equal to 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedQbaf {
    arguments: BTreeMap<ArgumentId, f64>,
    attacks: BTreeMap<(ArgumentId, ArgumentId), f64>,
    supports: BTreeMap<(ArgumentId, ArgumentId), f64>,
}

impl WeightedQbaf {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an argument or overwrites its initial strength.
    pub fn add_argument(&mut self, id: ArgumentId, tau: f64) -> Result<(), QbafError> {
        check_unit("initial strength", id, tau)?;
        self.arguments.insert(id, tau);
        Ok(())
    }

    pub fn add_attack(&mut self, source: ArgumentId, target: ArgumentId, weight: f64) -> Result<(), QbafError> {
        self.add_edge(Relation::Attack, source, target, weight)
    }

    pub fn add_support(&mut self, source: ArgumentId, target: ArgumentId, weight: f64) -> Result<(), QbafError> {
        self.add_edge(Relation::Support, source, target, weight)
    }

    pub fn add_edge(
        &mut self,
        relation: Relation,
        source: ArgumentId,
        target: ArgumentId,
        weight: f64,
    ) -> Result<(), QbafError> {
        for end in [source, target] {
            if !self.arguments.contains_key(&end) {
                return Err(QbafError::UnknownArgument(end));
            }
        }
        check_unit("weight", format!("({source},{target})"), weight)?;
        let (mine, other) = match relation {
            Relation::Attack => (&mut self.attacks, &self.supports),
            Relation::Support => (&mut self.supports, &self.attacks),
        };
        if other.contains_key(&(source, target)) {
            return Err(QbafError::RelationClash(source, target));
        }
        mine.insert((source, target), weight);
        Ok(())
    }

    pub fn arguments(&self) -> &BTreeMap<ArgumentId, f64> {
        &self.arguments
    }

    pub fn attacks(&self) -> &BTreeMap<(ArgumentId, ArgumentId), f64> {
        &self.attacks
    }

    pub fn supports(&self) -> &BTreeMap<(ArgumentId, ArgumentId), f64> {
        &self.supports
    }

    pub fn initial_strength(&self, id: ArgumentId) -> Option<f64> {
        self.arguments.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    /// All edges as `(source, target, relation, weight)`, attacks first.
    pub fn edges(&self) -> impl Iterator<Item = (ArgumentId, ArgumentId, Relation, f64)> + '_ {
        let att = self.attacks.iter().map(|(&(s, t), &w)| (s, t, Relation::Attack, w));
        let sup = self.supports.iter().map(|(&(s, t), &w)| (s, t, Relation::Support, w));
        att.chain(sup)
    }

    /// Same graph with the edges dropped.
    pub fn without_edges(&self) -> Self {
        Self {
            arguments: self.arguments.clone(),
            ..Self::default()
        }
    }

    fn incoming_index(&self) -> BTreeMap<ArgumentId, Vec<(ArgumentId, Relation, f64)>> {
        let mut incoming: BTreeMap<ArgumentId, Vec<_>> = BTreeMap::new();
        for (source, target, relation, weight) in self.edges() {
            incoming.entry(target).or_default().push((source, relation, weight));
        }
        incoming
    }
}

/// Final strengths plus the evaluator's convergence bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthAssignment {
    pub values: BTreeMap<ArgumentId, f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl StrengthAssignment {
    pub fn get(&self, id: ArgumentId) -> Option<f64> {
        self.values.get(&id).copied()
    }

    /// The assignment `ρ = τ`, the starting point of the iterative scheme.
    pub fn initial(qbaf: &WeightedQbaf) -> Self {
        Self {
            values: qbaf.arguments.clone(),
            converged: true,
            iterations: 0,
        }
    }
}

/// One incoming edge seen from its target: the source's current strength and
/// the edge weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contribution {
    pub relation: Relation,
    pub strength: f64,
    pub weight: f64,
}

/// A modular gradual semantics: aggregation followed by influence.
///
/// `influence` must map every real aggregate and every `tau` in `[0,1]` into
/// `[0,1]`.
pub trait ModularSemantics: Send + Sync {
    fn name(&self) -> &str;
    fn aggregate(&self, contributions: &[Contribution]) -> f64;
    fn influence(&self, alpha: f64, tau: f64) -> f64;
}

/// Sum-based weighted aggregation: supporters add `strength * weight`,
/// attackers subtract it.
pub fn sum_aggregation(contributions: &[Contribution]) -> f64 {
    contributions
        .iter()
        .map(|c| match c.relation {
            Relation::Support => c.strength * c.weight,
            Relation::Attack => -(c.strength * c.weight),
        })
        .sum()
}

/// Quadratic Energy influence with `E = α²/(1+α²)`.
///
/// Non-positive aggregates pull the strength towards 0, positive ones towards 1.
pub fn quadratic_energy_influence(alpha: f64, tau: f64) -> f64 {
    let sq = alpha * alpha;
    // α² overflows to inf for |α| > ~1e154; E is then 1.
    let energy = if sq.is_finite() { sq / (1.0 + sq) } else { 1.0 };
    let value = if alpha <= 0.0 {
        (1.0 - energy) * tau
    } else {
        energy + (1.0 - energy) * tau
    };
    value.clamp(0.0, 1.0)
}

/// Quadratic Energy: sum aggregation plus [`quadratic_energy_influence`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuadraticEnergy;

impl QuadraticEnergy {
    pub const NAME: &'static str = "quadratic-energy";
}

impl ModularSemantics for QuadraticEnergy {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn aggregate(&self, contributions: &[Contribution]) -> f64 {
        sum_aggregation(contributions)
    }

    fn influence(&self, alpha: f64, tau: f64) -> f64 {
        quadratic_energy_influence(alpha, tau)
    }
}

/// Names accepted by [`semantics_by_name`].
pub const SEMANTICS_NAMES: &[&str] = &[QuadraticEnergy::NAME];

pub fn semantics_by_name(name: &str) -> Option<Box<dyn ModularSemantics>> {
    match name {
        QuadraticEnergy::NAME => Some(Box::new(QuadraticEnergy)),
        _ => None,
    }
}

fn contributions_for(
    incoming: &[(ArgumentId, Relation, f64)],
    current: &BTreeMap<ArgumentId, f64>,
) -> Result<Vec<Contribution>, QbafError> {
    incoming
        .iter()
        .map(|&(source, relation, weight)| {
            let strength = *current.get(&source).ok_or(QbafError::UnknownArgument(source))?;
            Ok(Contribution {
                relation,
                strength,
                weight,
            })
        })
        .collect()
}

/// Weighted sum-based aggregate of `target` under the strengths in `current`.
pub fn aggregate(qbaf: &WeightedQbaf, current: &StrengthAssignment, target: ArgumentId) -> Result<f64, QbafError> {
    if !qbaf.arguments.contains_key(&target) {
        return Err(QbafError::UnknownArgument(target));
    }
    let incoming: Vec<_> = qbaf
        .edges()
        .filter(|&(_, t, _, _)| t == target)
        .map(|(s, _, r, w)| (s, r, w))
        .collect();
    Ok(sum_aggregation(&contributions_for(&incoming, &current.values)?))
}

/// Kahn's algorithm; `pick_last` selects the largest ready argument instead of
/// the smallest, which yields a different valid order on most DAGs.
fn topological_order(qbaf: &WeightedQbaf, pick_last: bool) -> Result<Vec<ArgumentId>, QbafError> {
    let mut indegree: BTreeMap<ArgumentId, usize> = qbaf.arguments.keys().map(|&a| (a, 0)).collect();
    let mut outgoing: BTreeMap<ArgumentId, Vec<ArgumentId>> = BTreeMap::new();
    for (source, target, _, _) in qbaf.edges() {
        *indegree.get_mut(&target).expect("edge endpoints are arguments") += 1;
        outgoing.entry(source).or_default().push(target);
    }
    let mut ready: BTreeSet<ArgumentId> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&a, _)| a).collect();
    let mut order = Vec::with_capacity(qbaf.len());
    loop {
        let next = if pick_last { ready.pop_last() } else { ready.pop_first() };
        let Some(node) = next else { break };
        order.push(node);
        for &succ in outgoing.get(&node).map(Vec::as_slice).unwrap_or_default() {
            let d = indegree.get_mut(&succ).expect("known");
            *d -= 1;
            if *d == 0 {
                ready.insert(succ);
            }
        }
    }
    if order.len() < qbaf.len() {
        let stuck = indegree
            .iter()
            .find(|(a, &d)| d > 0 && !order.contains(a))
            .map(|(&a, _)| a)
            .expect("a node with remaining in-degree exists");
        return Err(QbafError::Cyclic(stuck));
    }
    Ok(order)
}

/// A topological order of the QBAF, smallest ready index first (or largest,
/// with `reverse_ties`).
pub fn topological_sort(qbaf: &WeightedQbaf, reverse_ties: bool) -> Result<Vec<ArgumentId>, QbafError> {
    topological_order(qbaf, reverse_ties)
}

/// Single-pass evaluation along a caller-chosen topological `order`.
pub fn evaluate_in_order(
    qbaf: &WeightedQbaf,
    sem: &dyn ModularSemantics,
    order: &[ArgumentId],
) -> Result<StrengthAssignment, QbafError> {
    let incoming = qbaf.incoming_index();
    let mut values: BTreeMap<ArgumentId, f64> = BTreeMap::new();
    for &arg in order {
        let tau = qbaf.initial_strength(arg).ok_or(QbafError::UnknownArgument(arg))?;
        let edges = incoming.get(&arg).map(Vec::as_slice).unwrap_or_default();
        let contributions = contributions_for(edges, &values).map_err(|e| match e {
            QbafError::UnknownArgument(src) => QbafError::BadOrder(format!("{src} must precede {arg}")),
            other => other,
        })?;
        let rho = if contributions.is_empty() {
            tau
        } else {
            sem.influence(sem.aggregate(&contributions), tau)
        };
        if values.insert(arg, rho).is_some() {
            return Err(QbafError::BadOrder(format!("{arg} appears twice")));
        }
    }
    if values.len() != qbaf.len() {
        return Err(QbafError::BadOrder("order does not cover every argument".into()));
    }
    Ok(StrengthAssignment {
        values,
        converged: true,
        iterations: 1,
    })
}

/// Linear-time evaluation of an acyclic QBAF. Self-edges count as cycles.
pub fn evaluate_acyclic(qbaf: &WeightedQbaf, sem: &dyn ModularSemantics) -> Result<StrengthAssignment, QbafError> {
    let order = topological_order(qbaf, false)?;
    evaluate_in_order(qbaf, sem, &order)
}

/// Synchronous (Jacobi) fixpoint iteration from `ρ⁰ = τ`.
///
/// Stops once the largest per-argument change of a round drops below
/// `epsilon`, or after `max_iter` rounds with `converged = false`.
pub fn evaluate_iterative(
    qbaf: &WeightedQbaf,
    sem: &dyn ModularSemantics,
    epsilon: f64,
    max_iter: usize,
) -> StrengthAssignment {
    let incoming = qbaf.incoming_index();
    let mut current = qbaf.arguments.clone();
    if current.is_empty() {
        return StrengthAssignment {
            values: current,
            converged: true,
            iterations: 0,
        };
    }
    for round in 1..=max_iter {
        let next = update_round(qbaf, sem, &incoming, &current);
        let delta = current
            .values()
            .zip(next.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        current = next;
        if delta < epsilon {
            return StrengthAssignment {
                values: current,
                converged: true,
                iterations: round,
            };
        }
    }
    StrengthAssignment {
        values: current,
        converged: false,
        iterations: max_iter,
    }
}

fn update_round(
    qbaf: &WeightedQbaf,
    sem: &dyn ModularSemantics,
    incoming: &BTreeMap<ArgumentId, Vec<(ArgumentId, Relation, f64)>>,
    current: &BTreeMap<ArgumentId, f64>,
) -> BTreeMap<ArgumentId, f64> {
    qbaf.arguments
        .iter()
        .map(|(&arg, &tau)| {
            let edges = incoming.get(&arg).map(Vec::as_slice).unwrap_or_default();
            if edges.is_empty() {
                return (arg, tau);
            }
            let contributions = contributions_for(edges, current).expect("edge endpoints are arguments");
            (arg, sem.influence(sem.aggregate(&contributions), tau))
        })
        .collect()
}

/// One synchronous update applied to `current`; used to check fixpoint
/// residuals.
pub fn apply_update(
    qbaf: &WeightedQbaf,
    sem: &dyn ModularSemantics,
    current: &StrengthAssignment,
) -> StrengthAssignment {
    let incoming = qbaf.incoming_index();
    StrengthAssignment {
        values: update_round(qbaf, sem, &incoming, &current.values),
        converged: current.converged,
        iterations: current.iterations + 1,
    }
}

/// Settings for [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Acyclic evaluation when possible, the fixpoint scheme otherwise.
pub fn evaluate(qbaf: &WeightedQbaf, sem: &dyn ModularSemantics, options: IterationOptions) -> StrengthAssignment {
    match evaluate_acyclic(qbaf, sem) {
        Ok(assignment) => assignment,
        Err(_) => evaluate_iterative(qbaf, sem, options.epsilon, options.max_iter),
    }
}
