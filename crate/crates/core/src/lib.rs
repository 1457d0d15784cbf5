//! Reasoning over fuzzy argumentative knowledge bases extracted from debates.
//!
//! - [`qbaf`]: weighted bipolar argumentation frameworks and gradual semantics.
//! - [`fabox`]: the fuzzy argumentative ABox, its consistency conditions and
//!   the strength-update step.
//! - [`dllite`]: DL-Lite_R TBoxes, negative-inclusion closure and KB
//!   consistency.
//! - [`query`]: fuzzy conjunctive queries, rewriting and Zadeh evaluation.
//! - [`extractor`]: initial strengths and relation weights from model
//!   log-probabilities, behind an abstract backend.

pub mod extractor;
mod lexer;

pub mod dllite;
pub mod fabox;
pub mod qbaf;
pub mod query;

/// Six decimal places, ties to even.
pub fn format_degree(degree: f64) -> String {
    format!("{degree:.6}")
}
