use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ExtractionBackend, RelationQuery, Span, TaggedDocument};
use crate::fabox::io::JsonAssertion;
use crate::fabox::{builtin, FuzzyAssertion};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {message}")]
pub struct FixtureError {
    /// Dotted field path into the fixture, `.` for the whole document.
    pub path: String,
    pub message: String,
}

fn at(path: impl Into<String>, message: impl Into<String>) -> FixtureError {
    FixtureError {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRelation {
    pub source: usize,
    pub target: usize,
    /// Attack, support, unrelated.
    pub logprobs: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanSpec {
    pub argument: usize,
    pub begin: usize,
    pub end: usize,
}

/// On-disk form of a mock extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockFixture {
    pub tagged_text: String,
    pub spans: Vec<SpanSpec>,
    pub logprobs: Vec<Vec<f64>>,
    pub prompted_strengths: Vec<f64>,
    #[serde(default)]
    pub entities: Vec<JsonAssertion>,
    #[serde(default)]
    pub relations_raw: Vec<RawRelation>,
}

/// Replays a fixture. Pairs missing from `relations_raw` get equal
/// log-probabilities, which classify as unrelated.
#[derive(Debug)]
pub struct MockBackend {
    document: TaggedDocument,
    logprobs: Vec<Vec<f64>>,
    prompted: Vec<f64>,
    entities: Vec<FuzzyAssertion>,
    relations: HashMap<(usize, usize), [f64; 3]>,
    relation_calls: AtomicUsize,
}

impl MockBackend {
    pub fn from_json(input: &str) -> Result<Self, FixtureError> {
        let de = &mut serde_json::Deserializer::from_str(input);
        let fixture: MockFixture = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            at(path, e.into_inner().to_string())
        })?;
        Self::from_fixture(fixture)
    }

    pub fn from_fixture(f: MockFixture) -> Result<Self, FixtureError> {
        let document = TaggedDocument::parse(&f.tagged_text).map_err(|e| at("tagged_text", e.to_string()))?;
        let k = document.argument_count();

        if f.spans.len() != k {
            return Err(at("spans", format!("{} spans for {k} tagged arguments", f.spans.len())));
        }
        for (n, (given, s)) in f.spans.iter().zip(document.spans()).enumerate() {
            let found = SpanSpec {
                argument: s.argument,
                begin: s.begin,
                end: s.end,
            };
            if *given != found {
                return Err(at(
                    format!("spans[{n}]"),
                    format!("tags give words {}..{} of argument {}", s.begin, s.end, s.argument),
                ));
            }
        }

        if f.logprobs.len() != k {
            return Err(at("logprobs", format!("{} rows for {k} arguments", f.logprobs.len())));
        }
        for (n, (row, s)) in f.logprobs.iter().zip(document.spans()).enumerate() {
            if row.len() != Span::word_count(s) {
                return Err(at(
                    format!("logprobs[{n}]"),
                    format!("{} values for {} words", row.len(), s.word_count()),
                ));
            }
            if let Some(m) = row.iter().position(|v| !(v.is_finite() && *v <= 0.0)) {
                return Err(at(
                    format!("logprobs[{n}][{m}]"),
                    format!("{} is not a finite value <= 0", row[m]),
                ));
            }
        }

        if f.prompted_strengths.len() != k {
            return Err(at(
                "prompted_strengths",
                format!("{} values for {k} arguments", f.prompted_strengths.len()),
            ));
        }
        if let Some(n) = f.prompted_strengths.iter().position(|t| !(0.0..=1.0).contains(t)) {
            return Err(at(
                format!("prompted_strengths[{n}]"),
                format!("{} is outside [0, 1]", f.prompted_strengths[n]),
            ));
        }

        let mut entities = Vec::with_capacity(f.entities.len());
        for (n, j) in f.entities.iter().enumerate() {
            let path = format!("entities[{n}]");
            let a = FuzzyAssertion::try_from(j).map_err(|e| at(&path, e.to_string()))?;
            if builtin::is_builtin(a.predicate()) {
                return Err(at(path, format!("`{}` is a built-in predicate", a.predicate())));
            }
            if a.degree() != 1.0 {
                return Err(at(path, "entity assertions are crisp"));
            }
            entities.push(a);
        }

        let mut relations = HashMap::new();
        for (n, r) in f.relations_raw.iter().enumerate() {
            let path = format!("relations_raw[{n}]");
            if !(r.target >= 1 && r.target < r.source && r.source <= k) {
                return Err(at(
                    path,
                    format!("pair ({}, {}) needs 1 <= target < source <= {k}", r.source, r.target),
                ));
            }
            if r.logprobs.iter().any(|v| !v.is_finite()) {
                return Err(at(format!("{path}.logprobs"), "values must be finite"));
            }
            if relations.insert((r.source, r.target), r.logprobs).is_some() {
                return Err(at(path, format!("pair ({}, {}) given twice", r.source, r.target)));
            }
        }

        Ok(Self {
            document,
            logprobs: f.logprobs,
            prompted: f.prompted_strengths,
            entities,
            relations,
            relation_calls: AtomicUsize::new(0),
        })
    }

    /// The untagged document, the input [`ExtractionBackend::tag`] expects.
    pub fn raw_document(&self) -> String {
        self.document.plain_text()
    }

    pub fn relation_calls(&self) -> usize {
        self.relation_calls.load(Ordering::Relaxed)
    }

    fn row<T: Clone>(&self, values: &[T], argument: usize) -> Result<T, String> {
        argument
            .checked_sub(1)
            .and_then(|k| values.get(k))
            .cloned()
            .ok_or_else(|| format!("no argument a{argument} in the fixture"))
    }
}

impl ExtractionBackend for MockBackend {
    /// Accepts any text with the fixture's words, tagged or not.
    fn tag(&self, document: &str) -> Result<TaggedDocument, String> {
        let given = TaggedDocument::parse(document).map_err(|e| e.to_string())?;
        if given.words() != self.document.words() {
            return Err("document does not match the fixture".into());
        }
        Ok(self.document.clone())
    }

    fn entities(&self, _: &TaggedDocument) -> Result<Vec<FuzzyAssertion>, String> {
        Ok(self.entities.clone())
    }

    fn prompted_strength(&self, _: &TaggedDocument, argument: usize) -> Result<f64, String> {
        self.row(&self.prompted, argument)
    }

    fn argument_logprobs(&self, _: &TaggedDocument, argument: usize) -> Result<Vec<f64>, String> {
        self.row(&self.logprobs, argument)
    }

    fn relation_logprobs(&self, q: &RelationQuery<'_>) -> Result<[f64; 3], String> {
        self.relation_calls.fetch_add(1, Ordering::Relaxed);
        Ok(self.relations.get(&(q.source, q.target)).copied().unwrap_or([0.0; 3]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "tagged_text": "x <AC_1>a b</AC_1> y <AC_2>c</AC_2>",
        "spans": [{"argument": 1, "begin": 2, "end": 3}, {"argument": 2, "begin": 5, "end": 5}],
        "logprobs": [[-1, -2], [-0.5]],
        "prompted_strengths": [0.5, 0.9]
    }"#;

    fn err(json: &str) -> FixtureError {
        MockBackend::from_json(json).unwrap_err()
    }

    fn patched(from: &str, to: &str) -> String {
        assert!(MINIMAL.contains(from), "{from}");
        MINIMAL.replacen(from, to, 1)
    }

    #[test]
    fn loads_minimal() {
        let m = MockBackend::from_json(MINIMAL).unwrap();
        assert_eq!(m.raw_document(), "x a b y c");
        let d = m.tag("x  a b\ny c").unwrap();
        assert_eq!(d.argument_text(1).unwrap(), "a b");
        assert!(m.tag("x a b y").is_err());
        assert_eq!(m.prompted_strength(&d, 2), Ok(0.9));
        assert!(m.prompted_strength(&d, 3).is_err());
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(err(&patched("[-1, -2]", "[-1, \"x\"]")).path, "logprobs[0][1]");
        assert_eq!(err(&patched("[-1, -2]", "[-1]")).path, "logprobs[0]");
        assert_eq!(err(&patched("[-1, -2]", "[-1, 0.5]")).path, "logprobs[0][1]");
        assert_eq!(err(&patched("\"end\": 3", "\"end\": 4")).path, "spans[0]");
        assert_eq!(err(&patched("0.9", "1.9")).path, "prompted_strengths[1]");
        assert_eq!(err(&patched("</AC_2>", "")).path, "tagged_text");
        assert_eq!(err(&patched("\"logprobs\"", "\"logprob\"")).path, "logprob");
        let with = |extra: &str| patched("\"prompted_strengths\"", &format!("{extra}, \"prompted_strengths\""));
        assert_eq!(
            err(&with(
                r#""relations_raw": [{"source": 1, "target": 2, "logprobs": [0, 0, 0]}]"#
            ))
            .path,
            "relations_raw[0]"
        );
        assert_eq!(
            err(&with(
                r#""relations_raw": [{"source": 2, "target": 1, "logprobs": [0, 0]}]"#
            ))
            .path,
            "relations_raw[0].logprobs"
        );
        let entity = |e: &str| with(&format!(r#""entities": [{e}]"#));
        let ok = r#"{"kind": "concept", "predicate": "Left", "args": [{"sort": "plain", "label": "g"}]}"#;
        assert!(MockBackend::from_json(&entity(ok)).is_ok());
        assert_eq!(err(&entity(&ok.replace("Left", "Arg"))).path, "entities[0]");
        assert_eq!(err(&entity(&ok.replace("plain", "argument"))).path, "entities[0]");
        assert_eq!(
            err(&entity(&ok.replace("\"kind\"", "\"degree\": 0.5, \"kind\""))).path,
            "entities[0]"
        );
        assert_eq!(
            err(&entity(&ok.replace("\"sort\"", "\"sorts\""))).path,
            "entities[0].args[0].sorts"
        );
    }
}
