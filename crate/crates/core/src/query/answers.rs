use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Threshold;
use crate::fabox::io::JsonIndividual;
use crate::fabox::IndividualName;
use crate::format_degree;

/// Tuples with their degrees. Each tuple appears once, with the largest
/// degree it was reached with; zero degrees are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FuzzyAnswerSet {
    arity: usize,
    rows: BTreeMap<Vec<IndividualName>, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonAnswer {
    pub tuple: Vec<JsonIndividual>,
    pub degree: f64,
}

impl FuzzyAnswerSet {
    pub fn new(arity: usize) -> Self {
        Self {
            arity,
            rows: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Keeps the larger degree when the tuple is already present.
    pub fn insert(&mut self, tuple: Vec<IndividualName>, degree: f64) {
        assert_eq!(tuple.len(), self.arity, "tuple arity");
        if degree <= 0.0 {
            return;
        }
        let slot = self.rows.entry(tuple).or_insert(degree);
        if degree > *slot {
            *slot = degree;
        }
    }

    pub fn get(&self, tuple: &[IndividualName]) -> Option<f64> {
        self.rows.get(tuple).copied()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows in tuple order.
    pub fn iter(&self) -> impl Iterator<Item = (&[IndividualName], f64)> {
        self.rows.iter().map(|(t, d)| (t.as_slice(), *d))
    }

    pub fn filtered(&self, threshold: Threshold) -> Self {
        Self {
            arity: self.arity,
            rows: self
                .rows
                .iter()
                .filter(|(_, d)| threshold.admits(**d))
                .map(|(t, d)| (t.clone(), *d))
                .collect(),
        }
    }

    /// Rows by degree, highest first, ties in tuple order.
    pub fn sorted(&self) -> Vec<(&[IndividualName], f64)> {
        let mut rows: Vec<_> = self.iter().collect();
        rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        rows
    }

    /// One line per row: the tuple's individuals, then the degree, separated
    /// by tabs.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (tuple, degree) in self.sorted() {
            for ind in tuple {
                out.push_str(&ind.to_string());
                out.push('\t');
            }
            out.push_str(&format_degree(degree));
            out.push('\n');
        }
        out
    }

    pub fn to_json_rows(&self) -> Vec<JsonAnswer> {
        self.sorted()
            .into_iter()
            .map(|(tuple, degree)| JsonAnswer {
                tuple: tuple.iter().map(JsonIndividual::from).collect(),
                degree,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_rows()).expect("answers serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IndividualName {
        IndividualName::from_bare(s).unwrap()
    }

    #[test]
    fn keeps_max_and_drops_zero() {
        let mut a = FuzzyAnswerSet::new(1);
        a.insert(vec![p("a1")], 0.3);
        a.insert(vec![p("a1")], 0.7);
        a.insert(vec![p("a1")], 0.5);
        a.insert(vec![p("a2")], 0.0);
        assert_eq!(a.len(), 1);
        assert_eq!(a.get(&[p("a1")]), Some(0.7));
    }

    #[test]
    fn output_order_and_format() {
        let mut a = FuzzyAnswerSet::new(1);
        a.insert(vec![p("a2")], 0.6);
        a.insert(vec![p("a3")], 0.8);
        a.insert(vec![p("a1")], 0.6);
        a.insert(vec![IndividualName::text("x y")], 0.1234564);
        assert_eq!(
            a.to_tsv(),
            "a3\t0.800000\na1\t0.600000\na2\t0.600000\n\"x y\"\t0.123456\n"
        );
        let rows: Vec<JsonAnswer> = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(rows[0].tuple[0].label, "a3");
        assert_eq!(rows[3].tuple[0].sort, "text");
        assert_eq!(rows[0].degree, 0.8);
    }

    #[test]
    fn thresholds() {
        let mut a = FuzzyAnswerSet::new(1);
        a.insert(vec![p("a1")], 0.75);
        a.insert(vec![p("a3")], 0.8);
        assert_eq!(a.filtered(Threshold::Above(0.75)).len(), 1);
        assert_eq!(a.filtered(Threshold::AtLeast(0.75)).len(), 2);
        assert_eq!(a.filtered(Threshold::Above(0.0)), a);
    }

    #[test]
    fn boolean_rows() {
        let mut a = FuzzyAnswerSet::new(0);
        a.insert(vec![], 0.5);
        assert_eq!(a.to_tsv(), "0.500000\n");
    }
}
