//! Fuzzy conjunctive queries and their unions.
//!
//! Text syntax:
//!
//! ```text
//! q(?x) := topic(?y,climate), textOf(?y,?x), Left(?z) >= 0.5
//! q(?x) := [Left(?x)] | [Right(?x)]
//! Arg(?x) > 0.75
//! ```
//!
//! Without a head, the free variables are those not starting with `_`, in
//! order of first appearance. Constants are bare names, `a<k>` for
//! arguments, or double-quoted texts. A missing threshold means `> 0`.

mod answers;
mod eval;
mod oracle;
mod parse;
mod rewrite;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::dllite::KbReport;
use crate::fabox::{builtin, IndividualName};

pub use answers::{FuzzyAnswerSet, JsonAnswer};
pub use eval::{fans, fcert};
pub use oracle::oracle_fcert_small;
pub use parse::parse_query;
pub use rewrite::perfect_ref;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error("column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("`{predicate}` used with {found} arguments, expected {expected}")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("predicate `{0}` must take one or two arguments")]
    BadArity(String),
    #[error("invalid predicate name `{0}`")]
    BadPredicate(String),
    #[error("a query needs at least one atom")]
    Empty,
    #[error("free variable ?{0} does not occur in the body")]
    UnusedFreeVariable(String),
    #[error("disjuncts have different numbers of free variables")]
    HeadMismatch,
    #[error("threshold {comparator} {k} is out of range")]
    Threshold { comparator: &'static str, k: f64 },
    #[error("the knowledge base is inconsistent:\n{0}")]
    Inconsistent(KbReport),
    #[error("chase exceeded its budget of {0} anonymous individuals")]
    OracleIncomplete(usize),
    #[error("the chased model violates `{0}`")]
    OracleInconsistent(String),
}

/// A variable (stored without `?`) or a constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(IndividualName),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QueryAtom {
    predicate: String,
    args: Vec<Term>,
}

impl QueryAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Result<Self, QueryError> {
        let predicate = predicate.into();
        if !crate::fabox::is_valid_predicate(&predicate) {
            return Err(QueryError::BadPredicate(predicate));
        }
        if !(1..=2).contains(&args.len()) {
            return Err(QueryError::BadArity(predicate));
        }
        if let Some(expected) = builtin::arity(&predicate) {
            if expected != args.len() {
                return Err(QueryError::Arity {
                    predicate,
                    expected,
                    found: args.len(),
                });
            }
        }
        Ok(Self { predicate, args })
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn is_concept(&self) -> bool {
        self.args.len() == 1
    }

    pub(crate) fn with_args(&self, args: Vec<Term>) -> Self {
        Self {
            predicate: self.predicate.clone(),
            args,
        }
    }

    pub(crate) fn raw(predicate: &str, args: Vec<Term>) -> Self {
        Self {
            predicate: predicate.to_string(),
            args,
        }
    }
}

impl fmt::Display for QueryAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// `q(head) := atoms`. Variables not in the head are existential. The head
/// may hold constants after rewriting has unified a free variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuzzyQuery {
    head: Vec<Term>,
    atoms: Vec<QueryAtom>,
}

impl FuzzyQuery {
    pub fn new(head: Vec<Term>, atoms: Vec<QueryAtom>) -> Result<Self, QueryError> {
        if atoms.is_empty() {
            return Err(QueryError::Empty);
        }
        let q = Self { head, atoms };
        let vars = q.body_variables();
        for t in &q.head {
            if let Term::Var(v) = t {
                if !vars.contains(v.as_str()) {
                    return Err(QueryError::UnusedFreeVariable(v.clone()));
                }
            }
        }
        Ok(q)
    }

    pub fn head(&self) -> &[Term] {
        &self.head
    }

    pub fn atoms(&self) -> &[QueryAtom] {
        &self.atoms
    }

    pub fn arity(&self) -> usize {
        self.head.len()
    }

    fn body_variables(&self) -> BTreeSet<&str> {
        self.atoms
            .iter()
            .flat_map(|a| a.args.iter())
            .filter_map(Term::as_var)
            .collect()
    }

    pub fn is_free(&self, var: &str) -> bool {
        self.head.iter().any(|t| t.as_var() == Some(var))
    }

    /// Body variables that are not free.
    pub fn existential_variables(&self) -> BTreeSet<&str> {
        self.body_variables().into_iter().filter(|v| !self.is_free(v)).collect()
    }

    pub(crate) fn from_parts(head: Vec<Term>, atoms: Vec<QueryAtom>) -> Self {
        Self { head, atoms }
    }
}

impl fmt::Display for FuzzyQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("q(")?;
        for (i, t) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(") := ")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// A non-empty union of queries with the same number of free variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnionQuery {
    disjuncts: Vec<FuzzyQuery>,
}

impl UnionQuery {
    pub fn new(disjuncts: Vec<FuzzyQuery>) -> Result<Self, QueryError> {
        let first = disjuncts.first().ok_or(QueryError::Empty)?;
        if disjuncts.iter().any(|d| d.arity() != first.arity()) {
            return Err(QueryError::HeadMismatch);
        }
        Ok(Self { disjuncts })
    }

    pub fn single(query: FuzzyQuery) -> Self {
        Self { disjuncts: vec![query] }
    }

    pub fn disjuncts(&self) -> &[FuzzyQuery] {
        &self.disjuncts
    }

    pub fn arity(&self) -> usize {
        self.disjuncts[0].arity()
    }
}

impl fmt::Display for UnionQuery {
    /// One disjunct per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.disjuncts {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// `>= k`, k in (0,1]
    AtLeast(f64),
    /// `> k`, k in [0,1)
    Above(f64),
}

impl Threshold {
    pub fn at_least(k: f64) -> Result<Self, QueryError> {
        if k > 0.0 && k <= 1.0 {
            Ok(Threshold::AtLeast(k))
        } else {
            Err(QueryError::Threshold { comparator: ">=", k })
        }
    }

    pub fn above(k: f64) -> Result<Self, QueryError> {
        if (0.0..1.0).contains(&k) {
            Ok(Threshold::Above(k))
        } else {
            Err(QueryError::Threshold { comparator: ">", k })
        }
    }

    pub fn admits(self, degree: f64) -> bool {
        match self {
            Threshold::AtLeast(k) => degree >= k,
            Threshold::Above(k) => degree > k,
        }
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::Above(0.0)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::AtLeast(k) => write!(f, ">= {k}"),
            Threshold::Above(k) => write!(f, "> {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdedQuery {
    pub query: UnionQuery,
    pub threshold: Threshold,
}

impl ThresholdedQuery {
    pub fn new(query: UnionQuery, threshold: Threshold) -> Self {
        Self { query, threshold }
    }
}

impl fmt::Display for ThresholdedQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ds = self.query.disjuncts();
        if let [d] = ds {
            write!(f, "{d}")?;
        } else {
            f.write_str("q(")?;
            for (i, t) in ds[0].head().iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(") := ")?;
            for (i, d) in ds.iter().enumerate() {
                if i > 0 {
                    f.write_str(" | ")?;
                }
                f.write_str("[")?;
                for (j, a) in d.atoms().iter().enumerate() {
                    if j > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("]")?;
            }
        }
        if self.threshold != Threshold::default() {
            write!(f, " {}", self.threshold)?;
        }
        Ok(())
    }
}
