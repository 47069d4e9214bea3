use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::logic::{entails_skeptical, is_consistent, Atom, Formula, KbEntry, KnowledgeBase};

/// Hypothesis sets above this size are not searched.
pub const ABDUCIBLE_CAP: usize = 20;

#[derive(Clone, Debug)]
pub struct AbductionProblem {
    kb: KnowledgeBase,
    query: Formula,
    hypotheses: BTreeSet<Atom>,
}

impl AbductionProblem {
    /// Hypotheses must be atoms of the knowledge base.
    pub fn new(
        kb: KnowledgeBase,
        query: Formula,
        hypotheses: impl IntoIterator<Item = Atom>,
    ) -> Result<Self> {
        let hypotheses: BTreeSet<Atom> = hypotheses.into_iter().collect();
        if let Some(h) = hypotheses.iter().find(|h| !kb.signature().contains(h)) {
            return Err(Error::UndeclaredAtom {
                atom: h.to_string(),
            });
        }
        Ok(AbductionProblem {
            kb,
            query,
            hypotheses,
        })
    }

    /// Every atom of the knowledge base as a hypothesis.
    pub fn with_all_atoms(kb: KnowledgeBase, query: Formula) -> Self {
        let hypotheses = kb.signature().iter().cloned().collect();
        AbductionProblem {
            kb,
            query,
            hypotheses,
        }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn query(&self) -> &Formula {
        &self.query
    }

    pub fn hypotheses(&self) -> &BTreeSet<Atom> {
        &self.hypotheses
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbductionFailure {
    InconsistentKb,
    /// No rule connects the usable hypotheses to the query.
    NoExplanation,
}

impl fmt::Display for AbductionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbductionFailure::InconsistentKb => "inconsistent-kb",
            AbductionFailure::NoExplanation => "no-explanation",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbductionResult {
    /// Subset-minimal conjunctions of hypotheses, smallest first.
    pub explanations: Vec<Formula>,
    /// The hypotheses actually searched.
    pub abducibles: Vec<Atom>,
    pub failure: Option<AbductionFailure>,
}

/// All subset-minimal conjunctions `α` of positive hypotheses with
/// `kb ∪ {α}` consistent and skeptically entailing the query.
///
/// Atoms of the query itself are not used as hypotheses: assuming the query
/// would explain it trivially.
pub fn abduce(problem: &AbductionProblem) -> Result<AbductionResult> {
    let query_atoms = problem.query.atoms();
    let abducibles: Vec<Atom> = problem
        .hypotheses
        .iter()
        .filter(|h| !query_atoms.contains(*h))
        .cloned()
        .collect();
    if abducibles.len() > ABDUCIBLE_CAP {
        return Err(Error::SubsetCap {
            what: "hypothesis set",
            size: abducibles.len(),
            cap: ABDUCIBLE_CAP,
        });
    }
    if !is_consistent(&problem.kb) {
        return Ok(AbductionResult {
            explanations: Vec::new(),
            abducibles,
            failure: Some(AbductionFailure::InconsistentKb),
        });
    }
    let mut found: Vec<Vec<&Atom>> = Vec::new();
    for subset in abducibles.iter().powerset() {
        if found.iter().any(|m| m.iter().all(|a| subset.contains(a))) {
            continue;
        }
        let alpha = Formula::and(subset.iter().map(|a| Formula::Atom((*a).clone())));
        let mut kb = problem.kb.clone();
        kb.push(KbEntry::new(fresh_label(&kb), alpha))
            .expect("fresh label");
        if is_consistent(&kb) && entails_skeptical(&kb, &problem.query) {
            found.push(subset);
        }
    }
    let explanations: Vec<Formula> = found
        .iter()
        .map(|s| Formula::and(s.iter().map(|a| Formula::Atom((*a).clone()))))
        .collect();
    let failure = explanations
        .is_empty()
        .then_some(AbductionFailure::NoExplanation);
    Ok(AbductionResult {
        explanations,
        abducibles,
        failure,
    })
}

fn fresh_label(kb: &KnowledgeBase) -> String {
    let mut label = "hypothesis".to_string();
    while kb.get(&label).is_some() {
        label.push('\'');
    }
    label
}
