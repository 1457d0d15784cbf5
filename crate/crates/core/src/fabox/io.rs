//! FABox files.
//!
//! The text format has one assertion per line:
//!
//! ```text
//! # comment
//! concept Arg(a1) : 0.7
//! concept TArg("Introducing a carbon tax reduces CO2 emissions")
//! role textOf(a1, "Introducing a carbon tax reduces CO2 emissions")
//! role att(a2,a1) : 0.5
//! ```
//!
//! `a<k>` names arguments, double-quoted strings name texts, other bare names
//! are plain individuals. A missing degree means 1. [`write_text`] emits the
//! canonical form: sorted, no spaces inside the parentheses, degree omitted
//! when it is 1 and otherwise printed as the shortest decimal that reads back
//! to the same float.
//!
//! The JSON mirror is an array of `{kind, predicate, args, degree}` objects
//! where each arg is `{sort, label}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{FABox, FaboxError, Fact, FuzzyAssertion, IndividualName, Sort};
use crate::lexer::{tokenize, Cursor, LexError, Token};

fn at_line(line: usize) -> impl Fn(LexError) -> FaboxError {
    move |e| FaboxError::Parse {
        line,
        column: e.column,
        message: e.message,
    }
}

fn parse_individual(cursor: &mut Cursor) -> Result<IndividualName, LexError> {
    let column = cursor.column();
    match cursor.next() {
        Some(Token::Str(s)) => Ok(IndividualName::text(&s)),
        Some(Token::Ident(s)) => IndividualName::from_bare(&s).map_err(|e| LexError {
            column,
            message: e.to_string(),
        }),
        _ => Err(LexError {
            column,
            message: "expected an individual".into(),
        }),
    }
}

fn parse_line(text: &str) -> Result<FuzzyAssertion, LexError> {
    let mut cursor = Cursor::new(tokenize(text)?, text.chars().count());
    let kind_column = cursor.column();
    let concept = match cursor.next() {
        Some(Token::Ident(k)) if k == "concept" => true,
        Some(Token::Ident(k)) if k == "role" => false,
        _ => {
            return Err(LexError {
                column: kind_column,
                message: "expected `concept` or `role`".into(),
            })
        }
    };
    let pred_column = cursor.column();
    let predicate = match cursor.next() {
        Some(Token::Ident(p)) => p,
        _ => {
            return Err(LexError {
                column: pred_column,
                message: "expected a predicate name".into(),
            })
        }
    };
    cursor.expect(&Token::LParen)?;
    let first = parse_individual(&mut cursor)?;
    let second = if concept {
        None
    } else {
        cursor.expect(&Token::Comma)?;
        Some(parse_individual(&mut cursor)?)
    };
    cursor.expect(&Token::RParen)?;
    let degree_column = cursor.column();
    let degree = if cursor.eat(&Token::Colon) {
        match cursor.next() {
            Some(Token::Number(d)) => d,
            _ => return Err(cursor.unexpected("a degree")),
        }
    } else {
        1.0
    };
    if !cursor.at_end() {
        return Err(cursor.unexpected("end of line"));
    }
    let semantic = |e: FaboxError| LexError {
        column: pred_column,
        message: e.to_string(),
    };
    let fact = match second {
        None => Fact::concept(predicate, first),
        Some(second) => Fact::role(predicate, first, second),
    }
    .map_err(semantic)?;
    FuzzyAssertion::new(fact, degree).map_err(|e| LexError {
        column: degree_column,
        message: e.to_string(),
    })
}

/// Parses the line-oriented text format.
pub fn parse_text(input: &str) -> Result<FABox, FaboxError> {
    let mut fabox = FABox::new();
    for (n, line) in input.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        fabox.insert(parse_line(line).map_err(at_line(n + 1))?);
    }
    Ok(fabox)
}

/// Canonical text form of one assertion, without a trailing newline.
pub fn format_assertion(assertion: &FuzzyAssertion) -> String {
    let mut out = String::new();
    let kind = if assertion.fact().is_concept() {
        "concept"
    } else {
        "role"
    };
    write!(out, "{kind} {}", assertion.fact()).expect("writing to a String");
    if assertion.degree() != 1.0 {
        write!(out, " : {}", assertion.degree()).expect("writing to a String");
    }
    out
}

/// Canonical text form: one line per assertion in set order.
pub fn write_text(fabox: &FABox) -> String {
    let mut out = String::new();
    for assertion in fabox {
        out.push_str(&format_assertion(assertion));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JsonKind {
    Concept,
    Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonIndividual {
    pub sort: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonAssertion {
    pub kind: JsonKind,
    pub predicate: String,
    pub args: Vec<JsonIndividual>,
    #[serde(default = "one")]
    pub degree: f64,
}

fn one() -> f64 {
    1.0
}

impl From<&IndividualName> for JsonIndividual {
    fn from(name: &IndividualName) -> Self {
        Self {
            sort: name.sort().as_str().to_string(),
            label: name.label(),
        }
    }
}

impl TryFrom<&JsonIndividual> for IndividualName {
    type Error = FaboxError;

    fn try_from(j: &JsonIndividual) -> Result<Self, FaboxError> {
        match j.sort.as_str() {
            "plain" => IndividualName::plain(j.label.as_str()),
            "argument" => Ok(IndividualName::Argument(j.label.parse()?)),
            "text" => Ok(IndividualName::text(&j.label)),
            other => Err(FaboxError::Json(format!(
                "unknown sort `{other}` (expected {}, {} or {})",
                Sort::Plain.as_str(),
                Sort::Argument.as_str(),
                Sort::Text.as_str()
            ))),
        }
    }
}

impl From<&FuzzyAssertion> for JsonAssertion {
    fn from(a: &FuzzyAssertion) -> Self {
        let (kind, args) = match a.fact() {
            Fact::Concept { individual, .. } => (JsonKind::Concept, vec![individual.into()]),
            Fact::Role { subject, object, .. } => (JsonKind::Role, vec![subject.into(), object.into()]),
        };
        Self {
            kind,
            predicate: a.predicate().to_string(),
            args,
            degree: a.degree(),
        }
    }
}

impl TryFrom<&JsonAssertion> for FuzzyAssertion {
    type Error = FaboxError;

    fn try_from(j: &JsonAssertion) -> Result<Self, FaboxError> {
        let args = j
            .args
            .iter()
            .map(IndividualName::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        let fact = match (&j.kind, args.as_slice()) {
            (JsonKind::Concept, [x]) => Fact::concept(j.predicate.as_str(), x.clone())?,
            (JsonKind::Role, [x, y]) => Fact::role(j.predicate.as_str(), x.clone(), y.clone())?,
            (kind, _) => {
                return Err(FaboxError::Json(format!(
                    "{kind:?} assertion on `{}` has {} args",
                    j.predicate,
                    args.len()
                )))
            }
        };
        FuzzyAssertion::new(fact, j.degree)
    }
}

pub fn to_json_assertions(fabox: &FABox) -> Vec<JsonAssertion> {
    fabox.iter().map(JsonAssertion::from).collect()
}

pub fn from_json_assertions(items: &[JsonAssertion]) -> Result<FABox, FaboxError> {
    items
        .iter()
        .enumerate()
        .map(|(i, j)| {
            FuzzyAssertion::try_from(j).map_err(|e| match e {
                FaboxError::Json(m) => FaboxError::Json(format!("[{i}]: {m}")),
                other => FaboxError::Json(format!("[{i}]: {other}")),
            })
        })
        .collect()
}

pub fn write_json(fabox: &FABox) -> String {
    let mut s = serde_json::to_string_pretty(&to_json_assertions(fabox)).expect("assertions serialize");
    s.push('\n');
    s
}

pub fn parse_json(input: &str) -> Result<FABox, FaboxError> {
    let items: Vec<JsonAssertion> = serde_json::from_str(input).map_err(|e| FaboxError::Json(e.to_string()))?;
    from_json_assertions(&items)
}

/// Parses either format: JSON when the first non-blank character is `[`.
pub fn parse_any(input: &str) -> Result<FABox, FaboxError> {
    if input.trim_start().starts_with('[') {
        parse_json(input)
    } else {
        parse_text(input)
    }
}
