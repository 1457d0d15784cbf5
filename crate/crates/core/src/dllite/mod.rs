//! DL-Lite_R TBoxes for fuzzy argumentative knowledge bases.
//!
//! Concept inclusions relate basic concepts (`A`, `∃Q`), role inclusions
//! relate basic roles (`r`, `r⁻`); negation is allowed only on the right-hand
//! side. Built-in names must not occur in a positive right-hand side.
//!
//! Text syntax, one inclusion per line, `#` starts a comment:
//!
//! ```text
//! exists saidBy <= exists topic
//! Left <= Party
//! exists saidBy- <= Party
//! Left <= not Right
//! r <= s
//! r- <= not s
//! ```
//!
//! A bare name starting with a lowercase letter, or carrying the `-` inverse
//! suffix, is a role; any other bare name is a concept.

mod closure;
pub(crate) mod consistency;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::fabox::{builtin, is_valid_predicate};
use crate::lexer::{tokenize, Cursor, LexError, Token};

pub use closure::{ni_closure, NegativeInclusion};
pub use consistency::{check_kb_consistency, KbReport, NiViolation, NiWitness};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TboxError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A role name, possibly inverted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role {
    pub name: String,
    pub inverse: bool,
}

impl Role {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            inverse: false,
        }
    }

    pub fn inverse_of(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            inverse: true,
        }
    }

    pub fn inverted(&self) -> Self {
        Self {
            name: self.name.clone(),
            inverse: !self.inverse,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.inverse {
            f.write_str("-")?;
        }
        Ok(())
    }
}

/// `A` or `∃Q`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicConcept {
    Atomic(String),
    Exists(Role),
}

impl BasicConcept {
    pub fn atomic(name: impl Into<String>) -> Self {
        Self::Atomic(name.into())
    }

    pub fn exists(role: Role) -> Self {
        Self::Exists(role)
    }

    /// The concept or role name underneath.
    pub fn name(&self) -> &str {
        match self {
            BasicConcept::Atomic(n) => n,
            BasicConcept::Exists(r) => &r.name,
        }
    }
}

impl fmt::Display for BasicConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicConcept::Atomic(n) => f.write_str(n),
            BasicConcept::Exists(r) => write!(f, "exists {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Inclusion {
    Concept {
        lhs: BasicConcept,
        rhs: BasicConcept,
        negated: bool,
    },
    Role {
        lhs: Role,
        rhs: Role,
        negated: bool,
    },
}

impl Inclusion {
    pub fn concept(lhs: BasicConcept, rhs: BasicConcept) -> Self {
        Self::Concept {
            lhs,
            rhs,
            negated: false,
        }
    }

    pub fn concept_disjoint(lhs: BasicConcept, rhs: BasicConcept) -> Self {
        Self::Concept {
            lhs,
            rhs,
            negated: true,
        }
    }

    pub fn role(lhs: Role, rhs: Role) -> Self {
        Self::Role {
            lhs,
            rhs,
            negated: false,
        }
    }

    pub fn role_disjoint(lhs: Role, rhs: Role) -> Self {
        Self::Role {
            lhs,
            rhs,
            negated: true,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Inclusion::Concept { negated, .. } | Inclusion::Role { negated, .. } => *negated,
        }
    }

    /// Name on the right-hand side.
    pub fn rhs_name(&self) -> &str {
        match self {
            Inclusion::Concept { rhs, .. } => rhs.name(),
            Inclusion::Role { rhs, .. } => &rhs.name,
        }
    }

    /// Every predicate name mentioned on either side.
    pub fn names(&self) -> [&str; 2] {
        match self {
            Inclusion::Concept { lhs, rhs, .. } => [lhs.name(), rhs.name()],
            Inclusion::Role { lhs, rhs, .. } => [&lhs.name, &rhs.name],
        }
    }
}

impl fmt::Display for Inclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lhs, rhs, negated) = match self {
            Inclusion::Concept { lhs, rhs, negated } => (lhs.to_string(), rhs.to_string(), *negated),
            Inclusion::Role { lhs, rhs, negated } => (lhs.to_string(), rhs.to_string(), *negated),
        };
        let not = if negated { "not " } else { "" };
        write!(f, "{lhs} <= {not}{rhs}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tbox {
    inclusions: BTreeSet<Inclusion>,
}

impl Tbox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, inclusion: Inclusion) -> bool {
        self.inclusions.insert(inclusion)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Inclusion> {
        self.inclusions.iter()
    }

    pub fn len(&self) -> usize {
        self.inclusions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inclusions.is_empty()
    }

    pub fn contains(&self, inclusion: &Inclusion) -> bool {
        self.inclusions.contains(inclusion)
    }

    /// Positive concept inclusions as `(lhs, rhs)`.
    pub fn concept_inclusions(&self) -> impl Iterator<Item = (&BasicConcept, &BasicConcept)> {
        self.inclusions.iter().filter_map(|i| match i {
            Inclusion::Concept {
                lhs,
                rhs,
                negated: false,
            } => Some((lhs, rhs)),
            _ => None,
        })
    }

    /// Positive role inclusions together with their inverse forms: `Q1 ⊑ Q2`
    /// also yields `Q1⁻ ⊑ Q2⁻`.
    pub fn role_inclusions(&self) -> Vec<(Role, Role)> {
        let mut out = BTreeSet::new();
        for i in &self.inclusions {
            if let Inclusion::Role {
                lhs,
                rhs,
                negated: false,
            } = i
            {
                out.insert((lhs.clone(), rhs.clone()));
                out.insert((lhs.inverted(), rhs.inverted()));
            }
        }
        out.into_iter().collect()
    }
}

impl FromIterator<Inclusion> for Tbox {
    fn from_iter<I: IntoIterator<Item = Inclusion>>(iter: I) -> Self {
        Self {
            inclusions: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Tbox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.inclusions {
            writeln!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Inclusions whose positive right-hand side mentions a built-in name. An
/// empty result means the TBox is admissible for an FAKB.
pub fn validate_fakb_tbox(tbox: &Tbox) -> Vec<Inclusion> {
    tbox.iter()
        .filter(|i| !i.is_negative() && builtin::is_builtin(i.rhs_name()))
        .cloned()
        .collect()
}

enum Side {
    Concept(BasicConcept),
    Role(Role),
}

fn is_role_name(name: &str) -> bool {
    name.ends_with('-') || name.chars().next().is_some_and(|c| c.is_lowercase())
}

fn parse_role_name(token: &str, column: usize) -> Result<Role, LexError> {
    let (name, inverse) = match token.strip_suffix('-') {
        Some(n) => (n, true),
        None => (token, false),
    };
    if !is_valid_predicate(name) {
        return Err(LexError {
            column,
            message: format!("invalid role name `{token}`"),
        });
    }
    Ok(Role {
        name: name.to_string(),
        inverse,
    })
}

fn parse_side(cursor: &mut Cursor) -> Result<Side, LexError> {
    let column = cursor.column();
    let name = match cursor.next() {
        Some(Token::Ident(n)) => n,
        _ => {
            return Err(LexError {
                column,
                message: "expected a concept or role".into(),
            })
        }
    };
    if name == "exists" {
        let column = cursor.column();
        return match cursor.next() {
            Some(Token::Ident(r)) => Ok(Side::Concept(BasicConcept::Exists(parse_role_name(&r, column)?))),
            _ => Err(LexError {
                column,
                message: "expected a role after `exists`".into(),
            }),
        };
    }
    if is_role_name(&name) {
        return Ok(Side::Role(parse_role_name(&name, column)?));
    }
    if !is_valid_predicate(&name) {
        return Err(LexError {
            column,
            message: format!("invalid concept name `{name}`"),
        });
    }
    Ok(Side::Concept(BasicConcept::Atomic(name)))
}

fn parse_inclusion(line: &str) -> Result<Inclusion, LexError> {
    let mut cursor = Cursor::new(tokenize(line)?, line.chars().count());
    let lhs = parse_side(&mut cursor)?;
    cursor.expect(&Token::Subsumed)?;
    let negated = matches!(cursor.peek(), Some(Token::Ident(n)) if n == "not");
    if negated {
        cursor.next();
    }
    let rhs_column = cursor.column();
    let rhs = parse_side(&mut cursor)?;
    if !cursor.at_end() {
        return Err(cursor.unexpected("end of line"));
    }
    match (lhs, rhs) {
        (Side::Concept(lhs), Side::Concept(rhs)) => Ok(Inclusion::Concept { lhs, rhs, negated }),
        (Side::Role(lhs), Side::Role(rhs)) => Ok(Inclusion::Role { lhs, rhs, negated }),
        _ => Err(LexError {
            column: rhs_column,
            message: "cannot mix a concept and a role in one inclusion".into(),
        }),
    }
}

pub fn parse_tbox(input: &str) -> Result<Tbox, TboxError> {
    let mut tbox = Tbox::new();
    for (n, raw) in input.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default();
        if line.trim().is_empty() {
            continue;
        }
        let inclusion = parse_inclusion(line).map_err(|e| TboxError::Parse {
            line: n + 1,
            column: e.column,
            message: e.message,
        })?;
        tbox.insert(inclusion);
    }
    Ok(tbox)
}
