//! Fuzzy argumentative ABoxes.
//!
//! An FABox is a finite set of graded concept and role assertions over three
//! sorts of individuals: plain entities, argument identifiers (`a1`, `a2`, ...)
//! and argument texts. Only `Arg`, `att` and `sup` assertions may carry a
//! degree other than 1.

mod consistency;
pub mod io;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::qbaf::{self, ArgumentId, IterationOptions, ModularSemantics, QbafError, StrengthAssignment, WeightedQbaf};

pub use consistency::{check_fabox_consistency, FaboxReport, FaboxViolation, FaboxWarning};

/// Built-in concept and role names.
pub mod builtin {
    pub const ARG: &str = "Arg";
    pub const TARG: &str = "TArg";
    pub const ATT: &str = "att";
    pub const SUP: &str = "sup";
    pub const TEXT_OF: &str = "textOf";

    pub const CONCEPTS: [&str; 2] = [ARG, TARG];
    pub const ROLES: [&str; 3] = [ATT, SUP, TEXT_OF];

    pub fn is_builtin(name: &str) -> bool {
        CONCEPTS.contains(&name) || ROLES.contains(&name)
    }

    /// Predicates whose assertions may be graded.
    pub fn is_graded(name: &str) -> bool {
        matches!(name, ARG | ATT | SUP)
    }

    /// Fixed arity of a built-in, if `name` is one.
    pub fn arity(name: &str) -> Option<usize> {
        if CONCEPTS.contains(&name) {
            Some(1)
        } else if ROLES.contains(&name) {
            Some(2)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FaboxError {
    #[error("invalid individual name `{0}`")]
    BadIndividual(String),
    #[error("invalid predicate name `{0}`")]
    BadPredicate(String),
    #[error("degree {degree} of {fact} is outside [0,1]")]
    DegreeOutOfRange { fact: String, degree: f64 },
    #[error("{fact} must have degree 1 (only Arg, att and sup are graded), got {degree}")]
    NotCrisp { fact: String, degree: f64 },
    #[error("{predicate} expects {expected}")]
    SortMismatch { predicate: String, expected: &'static str },
    #[error("{predicate} is a {expected}, not a {found}")]
    KindMismatch {
        predicate: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("FABox is inconsistent:\n{0}")]
    Inconsistent(FaboxReport),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid JSON FABox: {0}")]
    Json(String),
    #[error(transparent)]
    Qbaf(#[from] QbafError),
}

/// Sort of an individual name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Plain,
    Argument,
    Text,
}

impl Sort {
    pub fn as_str(self) -> &'static str {
        match self {
            Sort::Plain => "plain",
            Sort::Argument => "argument",
            Sort::Text => "text",
        }
    }
}

/// An individual from one of the three sorts.
///
/// Plain names may not look like argument names (`a` followed by digits).
/// Texts are stored NFC-normalized, so equality is on the normalized form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndividualName {
    Plain(String),
    Argument(ArgumentId),
    Text(String),
}

fn looks_like_argument(name: &str) -> bool {
    name.strip_prefix('a')
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

pub(crate) fn is_valid_plain(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

pub(crate) fn is_valid_predicate(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl IndividualName {
    pub fn plain(name: impl Into<String>) -> Result<Self, FaboxError> {
        let name = name.into();
        if !is_valid_plain(&name) || looks_like_argument(&name) {
            return Err(FaboxError::BadIndividual(name));
        }
        Ok(Self::Plain(name))
    }

    pub fn argument(index: u32) -> Result<Self, FaboxError> {
        Ok(Self::Argument(ArgumentId::new(index)?))
    }

    pub fn text(text: &str) -> Self {
        Self::Text(text.nfc().collect())
    }

    /// Reads a bare token: `a<k>` is an argument, anything else a plain name.
    pub fn from_bare(token: &str) -> Result<Self, FaboxError> {
        if looks_like_argument(token) {
            Ok(Self::Argument(token.parse()?))
        } else {
            Self::plain(token)
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            IndividualName::Plain(_) => Sort::Plain,
            IndividualName::Argument(_) => Sort::Argument,
            IndividualName::Text(_) => Sort::Text,
        }
    }

    /// The name without quoting: the label for plain names and texts, `a<k>`
    /// for arguments.
    pub fn label(&self) -> String {
        match self {
            IndividualName::Plain(s) | IndividualName::Text(s) => s.clone(),
            IndividualName::Argument(a) => a.to_string(),
        }
    }

    pub fn as_argument(&self) -> Option<ArgumentId> {
        match self {
            IndividualName::Argument(a) => Some(*a),
            _ => None,
        }
    }
}

/// Writes `s` as a double-quoted literal with backslash escapes.
pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl fmt::Display for IndividualName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndividualName::Plain(s) => f.write_str(s),
            IndividualName::Argument(a) => write!(f, "{a}"),
            IndividualName::Text(s) => write_quoted(f, s),
        }
    }
}

/// The crisp part of an assertion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fact {
    Concept {
        predicate: String,
        individual: IndividualName,
    },
    Role {
        predicate: String,
        subject: IndividualName,
        object: IndividualName,
    },
}

impl Fact {
    pub fn concept(predicate: impl Into<String>, individual: IndividualName) -> Result<Self, FaboxError> {
        let predicate = predicate.into();
        if !is_valid_predicate(&predicate) {
            return Err(FaboxError::BadPredicate(predicate));
        }
        if builtin::arity(&predicate) == Some(2) {
            return Err(FaboxError::KindMismatch {
                predicate,
                expected: "role",
                found: "concept",
            });
        }
        let expected = match predicate.as_str() {
            builtin::ARG => Some((Sort::Argument, "an argument individual")),
            builtin::TARG => Some((Sort::Text, "a text individual")),
            _ => None,
        };
        if let Some((sort, expected)) = expected {
            if individual.sort() != sort {
                return Err(FaboxError::SortMismatch { predicate, expected });
            }
        }
        Ok(Fact::Concept { predicate, individual })
    }

    pub fn role(
        predicate: impl Into<String>,
        subject: IndividualName,
        object: IndividualName,
    ) -> Result<Self, FaboxError> {
        let predicate = predicate.into();
        if !is_valid_predicate(&predicate) {
            return Err(FaboxError::BadPredicate(predicate));
        }
        if builtin::arity(&predicate) == Some(1) {
            return Err(FaboxError::KindMismatch {
                predicate,
                expected: "concept",
                found: "role",
            });
        }
        let expected = match predicate.as_str() {
            builtin::ATT | builtin::SUP => Some((Sort::Argument, Sort::Argument, "two argument individuals")),
            builtin::TEXT_OF => Some((Sort::Argument, Sort::Text, "an argument and a text individual")),
            _ => None,
        };
        if let Some((s, o, expected)) = expected {
            if subject.sort() != s || object.sort() != o {
                return Err(FaboxError::SortMismatch { predicate, expected });
            }
        }
        Ok(Fact::Role {
            predicate,
            subject,
            object,
        })
    }

    pub fn predicate(&self) -> &str {
        match self {
            Fact::Concept { predicate, .. } | Fact::Role { predicate, .. } => predicate,
        }
    }

    pub fn is_concept(&self) -> bool {
        matches!(self, Fact::Concept { .. })
    }

    pub fn individuals(&self) -> Vec<&IndividualName> {
        match self {
            Fact::Concept { individual, .. } => vec![individual],
            Fact::Role { subject, object, .. } => vec![subject, object],
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Concept { predicate, individual } => write!(f, "{predicate}({individual})"),
            Fact::Role {
                predicate,
                subject,
                object,
            } => write!(f, "{predicate}({subject},{object})"),
        }
    }
}

/// A fact with its degree.
#[derive(Debug, Clone)]
pub struct FuzzyAssertion {
    fact: Fact,
    degree: f64,
}

impl FuzzyAssertion {
    pub fn new(fact: Fact, degree: f64) -> Result<Self, FaboxError> {
        if !(0.0..=1.0).contains(&degree) {
            return Err(FaboxError::DegreeOutOfRange {
                fact: fact.to_string(),
                degree,
            });
        }
        if degree != 1.0 && !builtin::is_graded(fact.predicate()) {
            return Err(FaboxError::NotCrisp {
                fact: fact.to_string(),
                degree,
            });
        }
        Ok(Self { fact, degree })
    }

    /// An assertion of a general fuzzy ABox: any predicate may be graded.
    /// Such assertions are accepted by the reasoning services but make a
    /// FABox inconsistent when the predicate is not `Arg`, `att` or `sup`.
    pub fn graded(fact: Fact, degree: f64) -> Result<Self, FaboxError> {
        if !(0.0..=1.0).contains(&degree) {
            return Err(FaboxError::DegreeOutOfRange {
                fact: fact.to_string(),
                degree,
            });
        }
        Ok(Self { fact, degree })
    }

    pub fn crisp(fact: Fact) -> Self {
        Self { fact, degree: 1.0 }
    }

    pub fn fact(&self) -> &Fact {
        &self.fact
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn predicate(&self) -> &str {
        self.fact.predicate()
    }
}

impl PartialEq for FuzzyAssertion {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FuzzyAssertion {}

impl PartialOrd for FuzzyAssertion {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FuzzyAssertion {
    fn cmp(&self, other: &Self) -> Ordering {
        self.fact
            .cmp(&other.fact)
            .then_with(|| self.degree.total_cmp(&other.degree))
    }
}

impl fmt::Display for FuzzyAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.fact, self.degree)
    }
}

/// A set of fuzzy assertions in canonical order.
///
/// Identical assertions collapse; the same fact with two different degrees is
/// kept and reported by [`check_fabox_consistency`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FABox {
    assertions: BTreeSet<FuzzyAssertion>,
}

impl FABox {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` when the identical assertion was already present.
    pub fn insert(&mut self, assertion: FuzzyAssertion) -> bool {
        self.assertions.insert(assertion)
    }

    pub fn remove(&mut self, assertion: &FuzzyAssertion) -> bool {
        self.assertions.remove(assertion)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FuzzyAssertion> {
        self.assertions.iter()
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    pub fn with_predicate<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a FuzzyAssertion> + 'a {
        self.assertions.iter().filter(move |a| a.predicate() == predicate)
    }

    /// Degree of `Arg(id)`, the largest one if several are present.
    pub fn argument_degree(&self, id: ArgumentId) -> Option<f64> {
        self.with_predicate(builtin::ARG)
            .filter(|a| matches!(a.fact(), Fact::Concept { individual: IndividualName::Argument(x), .. } if *x == id))
            .map(FuzzyAssertion::degree)
            .reduce(f64::max)
    }

    /// Every individual mentioned, in canonical order.
    pub fn individuals(&self) -> BTreeSet<&IndividualName> {
        self.assertions.iter().flat_map(|a| a.fact().individuals()).collect()
    }
}

impl FromIterator<FuzzyAssertion> for FABox {
    fn from_iter<I: IntoIterator<Item = FuzzyAssertion>>(iter: I) -> Self {
        Self {
            assertions: iter.into_iter().collect(),
        }
    }
}

impl Extend<FuzzyAssertion> for FABox {
    fn extend<I: IntoIterator<Item = FuzzyAssertion>>(&mut self, iter: I) {
        self.assertions.extend(iter)
    }
}

impl<'a> IntoIterator for &'a FABox {
    type Item = &'a FuzzyAssertion;
    type IntoIter = std::collections::btree_set::Iter<'a, FuzzyAssertion>;

    fn into_iter(self) -> Self::IntoIter {
        self.assertions.iter()
    }
}

/// The QBAF read off a consistent FABox: `Arg` degrees become initial
/// strengths, `att`/`sup` degrees become edge weights.
pub fn underlying_qbaf(fabox: &FABox) -> Result<WeightedQbaf, FaboxError> {
    let report = check_fabox_consistency(fabox);
    if !report.is_ok() {
        return Err(FaboxError::Inconsistent(report));
    }
    let mut qbaf = WeightedQbaf::new();
    let mut edges = Vec::new();
    for assertion in fabox {
        match (assertion.fact(), assertion.predicate()) {
            (
                Fact::Concept {
                    individual: IndividualName::Argument(id),
                    ..
                },
                builtin::ARG,
            ) => qbaf.add_argument(*id, assertion.degree())?,
            (
                Fact::Role {
                    subject: IndividualName::Argument(s),
                    object: IndividualName::Argument(t),
                    ..
                },
                p @ (builtin::ATT | builtin::SUP),
            ) => {
                let relation = if p == builtin::ATT {
                    qbaf::Relation::Attack
                } else {
                    qbaf::Relation::Support
                };
                edges.push((relation, *s, *t, assertion.degree()));
            }
            _ => {}
        }
    }
    for (relation, s, t, w) in edges {
        qbaf.add_edge(relation, s, t, w)?;
    }
    Ok(qbaf)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UpdateError {
    #[error("cannot update an inconsistent FABox:\n{0}")]
    Inconsistent(FaboxReport),
    #[error("strength evaluation did not converge after {} rounds", partial.iterations)]
    NotConverged { partial: StrengthAssignment },
}

/// Replaces every `<Arg(a), τ>` by `<Arg(a), ρ(a)>`, with `ρ` computed on the
/// underlying QBAF. Relations and crisp facts are left as they are.
///
/// Not idempotent: a second application moves the degrees again.
pub fn apply_strength_update(
    fabox: &FABox,
    sem: &dyn ModularSemantics,
    options: IterationOptions,
) -> Result<FABox, UpdateError> {
    let qbaf = underlying_qbaf(fabox).map_err(|e| match e {
        FaboxError::Inconsistent(report) => UpdateError::Inconsistent(report),
        other => unreachable!("consistent FABoxes project to valid QBAFs: {other}"),
    })?;
    let strengths = qbaf::evaluate(&qbaf, sem, options);
    if !strengths.converged {
        return Err(UpdateError::NotConverged { partial: strengths });
    }
    Ok(with_argument_degrees(fabox, &strengths.values))
}

/// Copy of `fabox` with the `Arg` degrees taken from `degrees`.
pub fn with_argument_degrees(fabox: &FABox, degrees: &BTreeMap<ArgumentId, f64>) -> FABox {
    fabox
        .iter()
        .map(|assertion| match assertion.fact() {
            Fact::Concept {
                predicate,
                individual: IndividualName::Argument(id),
            } if predicate == builtin::ARG => match degrees.get(id) {
                Some(&rho) => FuzzyAssertion {
                    fact: assertion.fact().clone(),
                    degree: rho,
                },
                None => assertion.clone(),
            },
            _ => assertion.clone(),
        })
        .collect()
}
