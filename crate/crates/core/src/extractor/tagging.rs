use std::fmt;

use super::ExtractError;

/// Word offsets of one tagged argument, 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub argument: usize,
    pub begin: usize,
    pub end: usize,
}

impl Span {
    pub fn word_count(&self) -> usize {
        self.end + 1 - self.begin
    }
}

/// A document split into words, with the argument spans marked by
/// `<AC_i>`…`</AC_i>` tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedDocument {
    words: Vec<String>,
    spans: Vec<Span>,
}

enum Piece<'a> {
    Word(&'a str),
    Open(usize),
    Close(usize),
}

fn tag_at(s: &str) -> Option<(bool, usize, usize)> {
    let (close, rest) = match s.strip_prefix("</AC_") {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix("<AC_")?),
    };
    let digits = rest.bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 || rest.as_bytes().get(digits) != Some(&b'>') {
        return None;
    }
    let index = rest[..digits].parse().ok()?;
    let consumed = s.len() - rest.len() + digits + 1;
    Some((close, index, consumed))
}

fn pieces(text: &str) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    let mut word_start: Option<usize> = None;
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().expect("non-empty rest");
        let tag = if c == '<' { tag_at(rest) } else { None };
        if tag.is_some() || c.is_whitespace() {
            if let Some(start) = word_start.take() {
                out.push(Piece::Word(&text[start..i]));
            }
        }
        match tag {
            Some((close, index, consumed)) => {
                out.push(if close { Piece::Close(index) } else { Piece::Open(index) });
                i += consumed;
            }
            None => {
                if !c.is_whitespace() && word_start.is_none() {
                    word_start = Some(i);
                }
                i += c.len_utf8();
            }
        }
    }
    if let Some(start) = word_start {
        out.push(Piece::Word(&text[start..]));
    }
    out
}

impl TaggedDocument {
    /// Checks that spans are numbered 1..=k in order, disjoint, non-empty and
    /// inside the document.
    pub fn new(words: Vec<String>, spans: Vec<Span>) -> Result<Self, ExtractError> {
        let bad = |m: String| Err(ExtractError::Tagging(m));
        let mut previous_end = 0;
        for (n, s) in spans.iter().enumerate() {
            if s.argument != n + 1 {
                return bad(format!("span {} is numbered {}", n + 1, s.argument));
            }
            if s.begin == 0 || s.begin > s.end || s.end > words.len() {
                return bad(format!(
                    "span {} covers words {}..{} of {}",
                    s.argument,
                    s.begin,
                    s.end,
                    words.len()
                ));
            }
            if s.begin <= previous_end {
                return bad(format!("span {} overlaps the one before", s.argument));
            }
            previous_end = s.end;
        }
        Ok(Self { words, spans })
    }

    pub fn parse(text: &str) -> Result<Self, ExtractError> {
        let bad = |m: String| Err(ExtractError::Tagging(m));
        let mut words = Vec::new();
        let mut spans = Vec::new();
        let mut open: Option<(usize, usize)> = None;
        for piece in pieces(text) {
            match piece {
                Piece::Word(w) => words.push(w.to_string()),
                Piece::Open(i) => {
                    if let Some((j, _)) = open {
                        return bad(format!("<AC_{i}> opened inside <AC_{j}>"));
                    }
                    open = Some((i, words.len() + 1));
                }
                Piece::Close(i) => match open.take() {
                    Some((j, begin)) if i == j => {
                        if begin > words.len() {
                            return bad(format!("<AC_{i}> encloses no words"));
                        }
                        spans.push(Span {
                            argument: i,
                            begin,
                            end: words.len(),
                        });
                    }
                    Some((j, _)) => return bad(format!("</AC_{i}> closes <AC_{j}>")),
                    None => return bad(format!("</AC_{i}> without a matching <AC_{i}>")),
                },
            }
        }
        if let Some((i, _)) = open {
            return bad(format!("<AC_{i}> is never closed"));
        }
        Self::new(words, spans)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn argument_count(&self) -> usize {
        self.spans.len()
    }

    /// Span of argument `i` (1-based).
    pub fn span(&self, i: usize) -> Option<Span> {
        i.checked_sub(1).and_then(|k| self.spans.get(k)).copied()
    }

    /// The words of argument `i` joined by single spaces.
    pub fn argument_text(&self, i: usize) -> Option<String> {
        let s = self.span(i)?;
        Some(self.words[s.begin - 1..s.end].join(" "))
    }

    /// The untagged document, words joined by single spaces.
    pub fn plain_text(&self) -> String {
        self.words.join(" ")
    }

    /// Tagged text up to and including argument `i`.
    pub fn context_through(&self, i: usize) -> String {
        let end = self.span(i).map_or(self.words.len(), |s| s.end);
        let mut out = String::new();
        self.render(&mut out, end).expect("writing to a String");
        out
    }

    fn render(&self, out: &mut impl fmt::Write, upto: usize) -> fmt::Result {
        for (n, w) in self.words[..upto].iter().enumerate() {
            let pos = n + 1;
            if n > 0 {
                out.write_str(" ")?;
            }
            if let Some(s) = self.spans.iter().find(|s| s.begin == pos) {
                write!(out, "<AC_{}>", s.argument)?;
            }
            out.write_str(w)?;
            if let Some(s) = self.spans.iter().find(|s| s.end == pos) {
                write!(out, "</AC_{}>", s.argument)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for TaggedDocument {
    /// Words separated by single spaces, tags attached to their words.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(f, self.words.len())
    }
}
