//! From a tagged debate to a FABox.
//!
//! Argument strengths start from a prompted value and are nudged by how
//! plausible the model finds the argument's words; relations are read off
//! three log-probabilities over attack, support and unrelated. The model
//! itself sits behind [`ExtractionBackend`]; [`MockBackend`] replays a
//! fixture file.

mod mock;
mod tagging;

use thiserror::Error;

use crate::fabox::{
    apply_strength_update, builtin, check_fabox_consistency, FABox, FaboxReport, Fact, FuzzyAssertion, IndividualName,
    UpdateError,
};
use crate::qbaf::{IterationOptions, ModularSemantics};

pub use mock::{FixtureError, MockBackend, MockFixture, RawRelation};
pub use tagging::{Span, TaggedDocument};

/// Backend task that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Tagging,
    Entities,
    PromptedStrength(usize),
    ArgumentLogprobs(usize),
    RelationLogprobs(usize, usize),
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::Tagging => f.write_str("argument tagging"),
            Task::Entities => f.write_str("entity extraction"),
            Task::PromptedStrength(i) => write!(f, "prompted strength of a{i}"),
            Task::ArgumentLogprobs(i) => write!(f, "log-probabilities of a{i}"),
            Task::RelationLogprobs(i, j) => write!(f, "relation between a{i} and a{j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error("tagging: {0}")]
    Tagging(String),
    #[error("argument a{0} has no log-probabilities")]
    EmptySpan(usize),
    #[error("log-probability {value} is not a finite value <= 0")]
    BadLogprob { value: f64 },
    #[error("relation log-probabilities must be finite, got {0:?}")]
    NonFinite([f64; 3]),
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("{task} failed: {message}")]
    Backend { task: Task, message: String },
    #[error("assembled FABox is inconsistent:\n{0}")]
    Assembly(FaboxReport),
    #[error(transparent)]
    Update(#[from] UpdateError),
}

fn unit(name: &'static str, value: f64) -> Result<f64, ExtractError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ExtractError::OutOfRange { name, value })
    }
}

/// Per-argument token log-probabilities, argument `i` in row `i - 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlausibilityInputs {
    rows: Vec<Vec<f64>>,
}

impl PlausibilityInputs {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ExtractError> {
        if let Some(&value) = rows.iter().flatten().find(|v| !(v.is_finite() && **v <= 0.0)) {
            return Err(ExtractError::BadLogprob { value });
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// Mean log-probability of argument `i`'s words.
pub fn plausibility_mu(inputs: &PlausibilityInputs, i: usize) -> Result<f64, ExtractError> {
    match i.checked_sub(1).and_then(|k| inputs.rows.get(k)) {
        Some(row) if !row.is_empty() => Ok(row.iter().sum::<f64>() / row.len() as f64),
        _ => Err(ExtractError::EmptySpan(i)),
    }
}

/// Min-max normalisation. All-equal input (a single argument included) maps
/// to 0.5 everywhere.
pub fn normalize_mu(mu: &[f64]) -> Vec<f64> {
    let min = mu.iter().copied().fold(f64::INFINITY, f64::min);
    let max = mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![0.5; mu.len()];
    }
    mu.iter().map(|m| (m - min) / (max - min)).collect()
}

/// `τ^p · (1 + μ̄_i − μ̄_avg)`, clamped to `[0, 1]`. Evaluated as
/// `τ^p + τ^p · (μ̄_i − μ̄_avg)` so that equal plausibilities give back
/// `τ^p` bit for bit.
pub fn initial_strength(tau_p: f64, mu_bar_i: f64, mu_bar_avg: f64) -> f64 {
    (tau_p + tau_p * (mu_bar_i - mu_bar_avg)).clamp(0.0, 1.0)
}

/// Initial strengths of all arguments from prompted values and log-probs.
pub fn initial_strengths(tau_p: &[f64], inputs: &PlausibilityInputs) -> Result<Vec<f64>, ExtractError> {
    let mu = (1..=tau_p.len())
        .map(|i| plausibility_mu(inputs, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mu_bar = normalize_mu(&mu);
    let avg = mu_bar.iter().sum::<f64>() / mu_bar.len().max(1) as f64;
    tau_p
        .iter()
        .zip(&mu_bar)
        .map(|(&t, &m)| Ok(initial_strength(unit("prompted strength", t)?, m, avg)))
        .collect()
}

/// Order is attack, support, unrelated throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationLabel {
    Attack,
    Support,
    Unrelated,
}

impl RelationLabel {
    pub const ALL: [RelationLabel; 3] = [RelationLabel::Attack, RelationLabel::Support, RelationLabel::Unrelated];

    /// The FABox role for an emitted relation.
    pub fn predicate(self) -> Option<&'static str> {
        match self {
            RelationLabel::Attack => Some(builtin::ATT),
            RelationLabel::Support => Some(builtin::SUP),
            RelationLabel::Unrelated => None,
        }
    }
}

pub fn softmax(raw: [f64; 3]) -> [f64; 3] {
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e = raw.map(|r| (r - max).exp());
    let sum = e[0] + e[1] + e[2];
    e.map(|x| x / sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub label: RelationLabel,
    pub probabilities: [f64; 3],
    /// `p_label` minus the other two.
    pub margin: f64,
    /// The margin, for attack and support only.
    pub strength: Option<f64>,
}

fn margin(p: [f64; 3], k: usize) -> f64 {
    let others: f64 = (0..3).filter(|&j| j != k).map(|j| p[j]).sum();
    p[k] - others
}

/// Labels the relation whose margin strictly exceeds `theta`, or Unrelated.
pub fn classify_relation(raw: [f64; 3], theta: f64) -> Result<Classification, ExtractError> {
    if raw.iter().any(|r| !r.is_finite()) {
        return Err(ExtractError::NonFinite(raw));
    }
    let theta = unit("theta", theta)?;
    let p = softmax(raw);
    for k in 0..2 {
        let m = margin(p, k);
        if m > theta {
            return Ok(Classification {
                label: RelationLabel::ALL[k],
                probabilities: p,
                margin: m,
                strength: Some(m),
            });
        }
    }
    Ok(Classification {
        label: RelationLabel::Unrelated,
        probabilities: p,
        margin: margin(p, 2),
        strength: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationJudgement {
    pub source: usize,
    pub target: usize,
    pub classification: Classification,
}

/// Who said an argument, as far as the entity extractor knows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Author {
    Known(IndividualName),
    Unknown,
}

/// Everything the relation classifier sees for the pair `(source, target)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationQuery<'a> {
    /// Tagged text up to the end of the source argument.
    pub context: &'a str,
    pub source: usize,
    pub source_author: &'a Author,
    pub source_text: &'a str,
    pub target: usize,
    pub target_author: &'a Author,
    pub target_text: &'a str,
}

/// The language-model side of extraction. Errors are plain messages; the
/// pipeline attaches the task.
pub trait ExtractionBackend {
    fn tag(&self, document: &str) -> Result<TaggedDocument, String>;
    /// Crisp concept and role assertions about the debate's entities.
    fn entities(&self, document: &TaggedDocument) -> Result<Vec<FuzzyAssertion>, String>;
    fn prompted_strength(&self, document: &TaggedDocument, argument: usize) -> Result<f64, String>;
    /// One log-probability per word of the argument.
    fn argument_logprobs(&self, document: &TaggedDocument, argument: usize) -> Result<Vec<f64>, String>;
    /// Raw log-probabilities of attack, support and unrelated.
    fn relation_logprobs(&self, query: &RelationQuery<'_>) -> Result<[f64; 3], String>;
}

/// Role linking an argument to its author. `saidBy` is read when there is
/// no `author` assertion for the argument.
pub const AUTHOR_ROLES: [&str; 2] = ["author", "saidBy"];

fn author_of(entities: &[FuzzyAssertion], argument: &IndividualName) -> Author {
    for role in AUTHOR_ROLES {
        let found = entities.iter().find_map(|a| match a.fact() {
            Fact::Role {
                predicate,
                subject,
                object,
            } if predicate == role && subject == argument => Some(object.clone()),
            _ => None,
        });
        if let Some(who) = found {
            return Author::Known(who);
        }
    }
    Author::Unknown
}

fn backend<T>(task: Task, r: Result<T, String>) -> Result<T, ExtractError> {
    r.map_err(|message| ExtractError::Backend { task, message })
}

/// The source FABox of `document`: arguments with their initial strengths,
/// their texts, the relations between every later and earlier argument, and
/// the backend's entity facts.
pub fn extract_source_fabox(document: &str, be: &dyn ExtractionBackend, theta: f64) -> Result<FABox, ExtractError> {
    let theta = unit("theta", theta)?;
    let doc = backend(Task::Tagging, be.tag(document))?;
    let entities = backend(Task::Entities, be.entities(&doc))?;
    if let Some(bad) = entities
        .iter()
        .find(|a| a.degree() != 1.0 || builtin::is_builtin(a.predicate()))
    {
        return Err(ExtractError::Backend {
            task: Task::Entities,
            message: format!("`{}` must be crisp and not a built-in predicate", bad.fact()),
        });
    }

    let k = doc.argument_count();
    let mut tau_p = Vec::with_capacity(k);
    let mut rows = Vec::with_capacity(k);
    for i in 1..=k {
        tau_p.push(backend(Task::PromptedStrength(i), be.prompted_strength(&doc, i))?);
        let row = backend(Task::ArgumentLogprobs(i), be.argument_logprobs(&doc, i))?;
        let words = doc.span(i).expect("argument in range").word_count();
        if row.len() != words {
            return Err(ExtractError::Backend {
                task: Task::ArgumentLogprobs(i),
                message: format!("{} values for {words} words", row.len()),
            });
        }
        rows.push(row);
    }
    let tau = initial_strengths(&tau_p, &PlausibilityInputs::new(rows)?)?;

    let args: Vec<IndividualName> = (1..=k)
        .map(|i| IndividualName::argument(i as u32).expect("argument index"))
        .collect();
    let texts: Vec<String> = (1..=k)
        .map(|i| doc.argument_text(i).expect("argument in range"))
        .collect();
    let authors: Vec<Author> = args.iter().map(|a| author_of(&entities, a)).collect();

    let mut fabox = FABox::new();
    let crisp = |f: Result<Fact, _>| FuzzyAssertion::crisp(f.expect("well-sorted built-in fact"));
    for (n, a) in args.iter().enumerate() {
        let text = IndividualName::text(&texts[n]);
        fabox.insert(
            FuzzyAssertion::new(Fact::concept(builtin::ARG, a.clone()).expect("argument sort"), tau[n])
                .expect("strength in range"),
        );
        fabox.insert(crisp(Fact::concept(builtin::TARG, text.clone())));
        fabox.insert(crisp(Fact::role(builtin::TEXT_OF, a.clone(), text)));
    }
    for i in 2..=k {
        let context = doc.context_through(i);
        for j in 1..i {
            let query = RelationQuery {
                context: &context,
                source: i,
                source_author: &authors[i - 1],
                source_text: &texts[i - 1],
                target: j,
                target_author: &authors[j - 1],
                target_text: &texts[j - 1],
            };
            let raw = backend(Task::RelationLogprobs(i, j), be.relation_logprobs(&query))?;
            let c = classify_relation(raw, theta)?;
            if let (Some(pred), Some(phi)) = (c.label.predicate(), c.strength) {
                let fact = Fact::role(pred, args[i - 1].clone(), args[j - 1].clone()).expect("argument sorts");
                fabox.insert(FuzzyAssertion::new(fact, phi).expect("margin in range"));
            }
        }
    }
    for e in entities {
        fabox.insert(e);
    }

    let report = check_fabox_consistency(&fabox);
    if !report.is_ok() {
        return Err(ExtractError::Assembly(report));
    }
    Ok(fabox)
}

/// [`extract_source_fabox`] followed by the strength update.
pub fn extract_updated_fabox(
    document: &str,
    be: &dyn ExtractionBackend,
    theta: f64,
    sem: &dyn ModularSemantics,
    options: IterationOptions,
) -> Result<FABox, ExtractError> {
    let source = extract_source_fabox(document, be, theta)?;
    Ok(apply_strength_update(&source, sem, options)?)
}
