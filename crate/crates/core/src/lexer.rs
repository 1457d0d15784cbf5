//! Tokenizer shared by the FABox, TBox and query text formats.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Token {
    /// Letters, digits, `_`, `-`, `.`; starts with a letter or `_`.
    Ident(String),
    /// `?name`, stored without the `?`.
    Var(String),
    /// Double-quoted string, escapes resolved.
    Str(String),
    Number(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Pipe,
    /// `:=`
    Define,
    /// `<=`
    Subsumed,
    Ge,
    Gt,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Var(s) => write!(f, "`?{s}`"),
            Token::Str(_) => f.write_str("string literal"),
            Token::Number(n) => write!(f, "`{n}`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::LBracket => f.write_str("`[`"),
            Token::RBracket => f.write_str("`]`"),
            Token::Comma => f.write_str("`,`"),
            Token::Colon => f.write_str("`:`"),
            Token::Pipe => f.write_str("`|`"),
            Token::Define => f.write_str("`:=`"),
            Token::Subsumed => f.write_str("`<=`"),
            Token::Ge => f.write_str("`>=`"),
            Token::Gt => f.write_str("`>`"),
        }
    }
}

/// A token and the 1-based column (in characters) where it starts.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Spanned {
    pub token: Token,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LexError {
    pub column: usize,
    pub message: String,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

pub(crate) fn tokenize(input: &str) -> Result<Vec<Spanned>, LexError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let err = |message: String| LexError { column, message };
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (token, len) = match c {
            '(' => (Token::LParen, 1),
            ')' => (Token::RParen, 1),
            '[' => (Token::LBracket, 1),
            ']' => (Token::RBracket, 1),
            ',' => (Token::Comma, 1),
            '|' => (Token::Pipe, 1),
            ':' if chars.get(i + 1) == Some(&'=') => (Token::Define, 2),
            ':' => (Token::Colon, 1),
            '<' if chars.get(i + 1) == Some(&'=') => (Token::Subsumed, 2),
            '>' if chars.get(i + 1) == Some(&'=') => (Token::Ge, 2),
            '>' => (Token::Gt, 1),
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None => return Err(err("unterminated string literal".into())),
                        Some('"') => break,
                        Some('\\') => {
                            let escaped = match chars.get(j + 1) {
                                Some('\\') => '\\',
                                Some('"') => '"',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('r') => '\r',
                                Some(other) => {
                                    return Err(LexError {
                                        column: j + 1,
                                        message: format!("unknown escape `\\{other}`"),
                                    })
                                }
                                None => return Err(err("unterminated string literal".into())),
                            };
                            s.push(escaped);
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                (Token::Str(s), j + 1 - i)
            }
            '?' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err("`?` must be followed by a variable name".into()));
                }
                (Token::Var(chars[i + 1..j].iter().collect()), j - i)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                if j < chars.len() && matches!(chars[j], 'e' | 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && matches!(chars[k], '+' | '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        j = k;
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let text: String = chars[i..j].iter().collect();
                let value = text
                    .parse::<f64>()
                    .map_err(|_| err(format!("malformed number `{text}`")))?;
                (Token::Number(value), j - i)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                (Token::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { token, column });
        i += len;
    }
    Ok(out)
}

/// Cursor over a token list that reports the column of the failing token.
pub(crate) struct Cursor {
    tokens: Vec<Spanned>,
    pos: usize,
    end_column: usize,
}

impl Cursor {
    pub fn new(tokens: Vec<Spanned>, input_len: usize) -> Self {
        Self {
            tokens,
            pos: 0,
            end_column: input_len + 1,
        }
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    pub fn column(&self) -> usize {
        self.tokens.get(self.pos).map(|s| s.column).unwrap_or(self.end_column)
    }

    pub fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|s| s.token.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, token: &Token) -> Result<(), LexError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.unexpected(&token.to_string()))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> LexError {
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".to_string(),
        };
        LexError {
            column: self.column(),
            message: format!("expected {wanted}, found {found}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Token> {
        tokenize(s).unwrap().into_iter().map(|t| t.token).collect()
    }

    #[test]
    fn mixed_input() {
        assert_eq!(
            toks(r#"q(?x) := Arg(?x), textOf(a1,"say \"hi\"") >= 0.5"#),
            vec![
                Token::Ident("q".into()),
                Token::LParen,
                Token::Var("x".into()),
                Token::RParen,
                Token::Define,
                Token::Ident("Arg".into()),
                Token::LParen,
                Token::Var("x".into()),
                Token::RParen,
                Token::Comma,
                Token::Ident("textOf".into()),
                Token::LParen,
                Token::Ident("a1".into()),
                Token::Comma,
                Token::Str("say \"hi\"".into()),
                Token::RParen,
                Token::Ge,
                Token::Number(0.5),
            ]
        );
        assert_eq!(
            toks("exists r- <= not B"),
            vec![
                Token::Ident("exists".into()),
                Token::Ident("r-".into()),
                Token::Subsumed,
                Token::Ident("not".into()),
                Token::Ident("B".into()),
            ]
        );
        assert_eq!(toks("1e-3"), vec![Token::Number(1e-3)]);
    }

    #[test]
    fn errors_carry_columns() {
        let e = tokenize("Arg(?x) $").unwrap_err();
        assert_eq!(e.column, 9);
        let e = tokenize("\"open").unwrap_err();
        assert_eq!(e.column, 1);
        let e = tokenize("A(? )").unwrap_err();
        assert_eq!(e.column, 3);
    }
}
