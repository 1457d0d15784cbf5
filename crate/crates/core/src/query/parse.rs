use std::collections::BTreeMap;

use super::{FuzzyQuery, QueryAtom, QueryError, Term, Threshold, ThresholdedQuery, UnionQuery};
use crate::fabox::IndividualName;
use crate::lexer::{tokenize, Cursor, LexError, Token};

fn lex_err(e: LexError) -> QueryError {
    QueryError::Parse {
        column: e.column,
        message: e.message,
    }
}

fn at(column: usize, message: impl Into<String>) -> QueryError {
    QueryError::Parse {
        column,
        message: message.into(),
    }
}

fn parse_term(cursor: &mut Cursor) -> Result<Term, QueryError> {
    let column = cursor.column();
    match cursor.next() {
        Some(Token::Var(v)) => Ok(Term::Var(v)),
        Some(Token::Ident(name)) => IndividualName::from_bare(&name)
            .map(Term::Const)
            .map_err(|e| at(column, e.to_string())),
        Some(Token::Str(text)) => Ok(Term::Const(IndividualName::text(&text))),
        _ => Err(at(column, "expected a variable or a constant")),
    }
}

fn parse_atom(cursor: &mut Cursor) -> Result<(QueryAtom, usize), QueryError> {
    let column = cursor.column();
    let predicate = match cursor.next() {
        Some(Token::Ident(p)) => p,
        _ => return Err(at(column, "expected an atom")),
    };
    cursor.expect(&Token::LParen).map_err(lex_err)?;
    let mut args = vec![parse_term(cursor)?];
    while cursor.eat(&Token::Comma) {
        args.push(parse_term(cursor)?);
    }
    cursor.expect(&Token::RParen).map_err(lex_err)?;
    let atom = QueryAtom::new(predicate, args).map_err(|e| at(column, e.to_string()))?;
    Ok((atom, column))
}

fn parse_conjunction(cursor: &mut Cursor) -> Result<Vec<(QueryAtom, usize)>, QueryError> {
    let mut atoms = vec![parse_atom(cursor)?];
    while cursor.eat(&Token::Comma) {
        atoms.push(parse_atom(cursor)?);
    }
    Ok(atoms)
}

fn parse_head(cursor: &mut Cursor) -> Result<Vec<Term>, QueryError> {
    let column = cursor.column();
    if !matches!(cursor.next(), Some(Token::Ident(_))) {
        return Err(at(column, "expected a query head such as `q(?x)`"));
    }
    cursor.expect(&Token::LParen).map_err(lex_err)?;
    let mut head = Vec::new();
    if !cursor.eat(&Token::RParen) {
        loop {
            let column = cursor.column();
            match cursor.next() {
                Some(Token::Var(v)) => head.push(Term::Var(v)),
                _ => return Err(at(column, "expected a variable in the head")),
            }
            if cursor.eat(&Token::RParen) {
                break;
            }
            cursor.expect(&Token::Comma).map_err(lex_err)?;
        }
    }
    cursor.expect(&Token::Define).map_err(lex_err)?;
    Ok(head)
}

fn default_head(atoms: &[(QueryAtom, usize)]) -> Vec<Term> {
    let mut head: Vec<Term> = Vec::new();
    for (atom, _) in atoms {
        for t in atom.args() {
            if let Term::Var(v) = t {
                if !v.starts_with('_') && !head.contains(t) {
                    head.push(t.clone());
                }
            }
        }
    }
    head
}

/// Parses a query in the text syntax; errors carry a 1-based column.
pub fn parse_query(input: &str) -> Result<ThresholdedQuery, QueryError> {
    let tokens = tokenize(input).map_err(lex_err)?;
    let has_head = tokens.iter().any(|t| t.token == Token::Define);
    let mut cursor = Cursor::new(tokens, input.chars().count());
    let head = if has_head { Some(parse_head(&mut cursor)?) } else { None };

    let body_column = cursor.column();
    let mut bodies = Vec::new();
    if cursor.peek() == Some(&Token::LBracket) {
        loop {
            cursor.expect(&Token::LBracket).map_err(lex_err)?;
            bodies.push(parse_conjunction(&mut cursor)?);
            cursor.expect(&Token::RBracket).map_err(lex_err)?;
            if !cursor.eat(&Token::Pipe) {
                break;
            }
        }
    } else {
        bodies.push(parse_conjunction(&mut cursor)?);
    }

    let threshold = match cursor.peek() {
        Some(Token::Ge) | Some(Token::Gt) => {
            let strict = cursor.next() == Some(Token::Gt);
            let column = cursor.column();
            let k = match cursor.next() {
                Some(Token::Number(k)) => k,
                _ => return Err(at(column, "expected a number after the comparator")),
            };
            let t = if strict {
                Threshold::above(k)
            } else {
                Threshold::at_least(k)
            };
            t.map_err(|e| at(column, e.to_string()))?
        }
        _ => Threshold::default(),
    };
    if !cursor.at_end() {
        return Err(lex_err(cursor.unexpected("`,`, a comparator or end of input")));
    }

    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    for (atom, column) in bodies.iter().flatten() {
        let expected = *arities.entry(atom.predicate().to_string()).or_insert(atom.args().len());
        if expected != atom.args().len() {
            let e = QueryError::Arity {
                predicate: atom.predicate().to_string(),
                expected,
                found: atom.args().len(),
            };
            return Err(at(*column, e.to_string()));
        }
    }

    let head = head.unwrap_or_else(|| default_head(&bodies[0]));
    let disjuncts = bodies
        .into_iter()
        .map(|atoms| {
            FuzzyQuery::new(head.clone(), atoms.into_iter().map(|(a, _)| a).collect())
                .map_err(|e| at(body_column, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ThresholdedQuery::new(UnionQuery::new(disjuncts)?, threshold))
}
