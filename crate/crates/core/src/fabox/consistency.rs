//! Structural consistency of an FABox: functional degrees, at most one relation
//! per argument pair, and the `textOf` bijection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{builtin, FABox, Fact, FuzzyAssertion, IndividualName};
use crate::qbaf::ArgumentId;

#[derive(Debug, Clone, PartialEq)]
pub enum FaboxViolation {
    /// A degree below 1 on a predicate other than `Arg`, `att`, `sup`.
    GradedNonArgumentative {
        assertion: FuzzyAssertion,
    },
    /// The same fact with different degrees.
    ConflictingDegrees {
        assertions: Vec<FuzzyAssertion>,
    },
    /// Both `att` and `sup` between the same ordered pair.
    ConflictingRelations {
        assertions: Vec<FuzzyAssertion>,
    },
    /// A relation endpoint without an `Arg` assertion.
    RelationEndpointNotArgument {
        assertion: FuzzyAssertion,
        missing: ArgumentId,
    },
    /// `textOf(a, t)` without `Arg(a)`.
    TextOfWithoutArgument {
        assertion: FuzzyAssertion,
    },
    /// `textOf(a, t)` without `TArg(t)`.
    TextOfWithoutText {
        assertion: FuzzyAssertion,
    },
    ArgumentWithoutText {
        argument: ArgumentId,
    },
    ArgumentWithSeveralTexts {
        argument: ArgumentId,
        assertions: Vec<FuzzyAssertion>,
    },
    TextWithoutArgument {
        text: IndividualName,
    },
    TextWithSeveralArguments {
        text: IndividualName,
        assertions: Vec<FuzzyAssertion>,
    },
}

fn list(f: &mut fmt::Formatter<'_>, assertions: &[FuzzyAssertion]) -> fmt::Result {
    for (i, a) in assertions.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for FaboxViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GradedNonArgumentative { assertion } => {
                write!(f, "{assertion}: only Arg, att and sup may carry a degree below 1")
            }
            Self::ConflictingDegrees { assertions } => {
                f.write_str("conflicting degrees: ")?;
                list(f, assertions)
            }
            Self::ConflictingRelations { assertions } => {
                f.write_str("attack and support on the same pair: ")?;
                list(f, assertions)
            }
            Self::RelationEndpointNotArgument { assertion, missing } => {
                write!(f, "{assertion}: endpoint {missing} has no Arg assertion")
            }
            Self::TextOfWithoutArgument { assertion } => {
                write!(f, "{assertion}: argument has no Arg assertion")
            }
            Self::TextOfWithoutText { assertion } => write!(f, "{assertion}: text has no TArg assertion"),
            Self::ArgumentWithoutText { argument } => write!(f, "argument {argument} has no textOf assertion"),
            Self::ArgumentWithSeveralTexts { argument, assertions } => {
                write!(f, "argument {argument} has several texts: ")?;
                list(f, assertions)
            }
            Self::TextWithoutArgument { text } => write!(f, "text {text} is not the text of any argument"),
            Self::TextWithSeveralArguments { text, assertions } => {
                write!(f, "text {text} belongs to several arguments: ")?;
                list(f, assertions)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FaboxWarning {
    SelfRelation { assertion: FuzzyAssertion },
}

impl fmt::Display for FaboxWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SelfRelation { assertion } => write!(f, "{assertion} relates an argument to itself"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FaboxReport {
    pub violations: Vec<FaboxViolation>,
    pub warnings: Vec<FaboxWarning>,
}

impl FaboxReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FaboxReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            writeln!(f, "FABox consistent")?;
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Checks every structural condition in one pass over the assertions plus
/// map lookups. Violations are returned as data.
pub fn check_fabox_consistency(fabox: &FABox) -> FaboxReport {
    let mut report = FaboxReport::default();

    let mut by_fact: BTreeMap<&Fact, Vec<&FuzzyAssertion>> = BTreeMap::new();
    let mut arguments: BTreeSet<ArgumentId> = BTreeSet::new();
    let mut texts: BTreeSet<&IndividualName> = BTreeSet::new();
    let mut relations: BTreeMap<(ArgumentId, ArgumentId), Vec<&FuzzyAssertion>> = BTreeMap::new();
    let mut text_of: Vec<(&FuzzyAssertion, ArgumentId, &IndividualName)> = Vec::new();

    for assertion in fabox {
        by_fact.entry(assertion.fact()).or_default().push(assertion);
        if assertion.degree() != 1.0 && !builtin::is_graded(assertion.predicate()) {
            report.violations.push(FaboxViolation::GradedNonArgumentative {
                assertion: assertion.clone(),
            });
        }
        match assertion.fact() {
            Fact::Concept { predicate, individual } => match (predicate.as_str(), individual) {
                (builtin::ARG, IndividualName::Argument(id)) => {
                    arguments.insert(*id);
                }
                (builtin::TARG, text) => {
                    texts.insert(text);
                }
                _ => {}
            },
            Fact::Role {
                predicate,
                subject,
                object,
            } => match (predicate.as_str(), subject, object) {
                (builtin::ATT | builtin::SUP, IndividualName::Argument(s), IndividualName::Argument(t)) => {
                    relations.entry((*s, *t)).or_default().push(assertion);
                    if s == t {
                        report.warnings.push(FaboxWarning::SelfRelation {
                            assertion: assertion.clone(),
                        });
                    }
                }
                (builtin::TEXT_OF, IndividualName::Argument(a), text) => text_of.push((assertion, *a, text)),
                _ => {}
            },
        }
    }

    for group in by_fact.values().filter(|g| g.len() > 1) {
        report.violations.push(FaboxViolation::ConflictingDegrees {
            assertions: group.iter().map(|a| (*a).clone()).collect(),
        });
    }

    for (&(s, t), group) in &relations {
        let kinds: BTreeSet<&str> = group.iter().map(|a| a.predicate()).collect();
        if kinds.len() > 1 {
            report.violations.push(FaboxViolation::ConflictingRelations {
                assertions: group.iter().map(|a| (*a).clone()).collect(),
            });
        }
        for end in [s, t] {
            if !arguments.contains(&end) {
                for assertion in group {
                    report.violations.push(FaboxViolation::RelationEndpointNotArgument {
                        assertion: (*assertion).clone(),
                        missing: end,
                    });
                }
            }
            if s == t {
                break;
            }
        }
    }

    let mut texts_of_arg: BTreeMap<ArgumentId, Vec<&FuzzyAssertion>> = BTreeMap::new();
    let mut args_of_text: BTreeMap<&IndividualName, Vec<&FuzzyAssertion>> = BTreeMap::new();
    for &(assertion, argument, text) in &text_of {
        if !arguments.contains(&argument) {
            report.violations.push(FaboxViolation::TextOfWithoutArgument {
                assertion: assertion.clone(),
            });
        }
        if !texts.contains(text) {
            report.violations.push(FaboxViolation::TextOfWithoutText {
                assertion: assertion.clone(),
            });
        }
        texts_of_arg.entry(argument).or_default().push(assertion);
        args_of_text.entry(text).or_default().push(assertion);
    }
    for &argument in &arguments {
        match texts_of_arg.get(&argument) {
            None => report.violations.push(FaboxViolation::ArgumentWithoutText { argument }),
            Some(group) if distinct_facts(group) > 1 => {
                report.violations.push(FaboxViolation::ArgumentWithSeveralTexts {
                    argument,
                    assertions: group.iter().map(|a| (*a).clone()).collect(),
                })
            }
            Some(_) => {}
        }
    }
    for &text in &texts {
        match args_of_text.get(text) {
            None => report
                .violations
                .push(FaboxViolation::TextWithoutArgument { text: text.clone() }),
            Some(group) if distinct_facts(group) > 1 => {
                report.violations.push(FaboxViolation::TextWithSeveralArguments {
                    text: text.clone(),
                    assertions: group.iter().map(|a| (*a).clone()).collect(),
                })
            }
            Some(_) => {}
        }
    }

    report
}

fn distinct_facts(group: &[&FuzzyAssertion]) -> usize {
    group.iter().map(|a| a.fact()).collect::<BTreeSet<_>>().len()
}
