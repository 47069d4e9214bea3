use itertools::Itertools;

use super::{Budget, SearchOptions};
use crate::error::{Error, Result};
use crate::logic::{is_satisfiable, Formula, KbEntry, KnowledgeBase, Model};

/// How the formulas to retract are chosen when `KB ∪ ε` is inconsistent.
#[derive(Clone, Debug)]
pub enum GammaPolicy {
    /// Retract nothing; an inconsistent union is an error.
    None,
    /// Retract a minimum-cardinality set, ties broken by label order.
    MinCard,
    /// Retract what the trace model falsifies, substituting the agent's
    /// formulas that carry the same labels.
    Trace { trace: Model, kb_a: KnowledgeBase },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateResult {
    pub updated: KnowledgeBase,
    pub added: Vec<KbEntry>,
    pub removed: Vec<KbEntry>,
}

fn label_free(kb: &[KbEntry], label: &str) -> bool {
    kb.iter().all(|e| e.label != label)
}

/// `kb ∖ removed ∪ added`, with formula-level set semantics. An added entry
/// whose label is still taken gets primes appended.
pub(crate) fn merge(kb: &KnowledgeBase, removed: &[usize], added: &[KbEntry]) -> KnowledgeBase {
    let mut entries: Vec<KbEntry> = kb
        .entries()
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, e)| e.clone())
        .collect();
    for e in added {
        if entries.iter().any(|k| k.formula == e.formula) {
            continue;
        }
        let mut label = e.label.clone();
        while !label_free(&entries, &label) {
            label.push('\'');
        }
        entries.push(KbEntry::new(label, e.formula.clone()));
    }
    let mut signature = kb.signature().clone();
    for e in added {
        signature.extend(e.formula.atoms());
    }
    KnowledgeBase::new(signature, entries).expect("merged entries have unique labels")
}

fn consistent(kb: &KnowledgeBase) -> bool {
    is_satisfiable(kb.signature(), kb.formulas())
}

fn in_epsilon(epsilon: &[KbEntry], f: &Formula) -> bool {
    epsilon.iter().any(|e| &e.formula == f)
}

/// `KB ∪ ε ∖ γ` with `γ ⊆ KB ∖ ε` chosen by `policy` so the result is consistent.
pub fn update_kb(
    kb: &KnowledgeBase,
    epsilon: &[KbEntry],
    policy: &GammaPolicy,
    opts: &SearchOptions,
) -> Result<UpdateResult> {
    update_with_budget(kb, epsilon, policy, &mut Budget::new(opts.max_steps))
}

pub(crate) fn update_with_budget(
    kb: &KnowledgeBase,
    epsilon: &[KbEntry],
    policy: &GammaPolicy,
    budget: &mut Budget,
) -> Result<UpdateResult> {
    let mut eps_sig = kb.signature().clone();
    for e in epsilon {
        eps_sig.extend(e.formula.atoms());
    }
    if !is_satisfiable(&eps_sig, epsilon.iter().map(|e| &e.formula)) {
        return Err(Error::Inconsistent(
            "the explanation itself is inconsistent".into(),
        ));
    }
    match policy {
        GammaPolicy::None => {
            budget.tick()?;
            let updated = merge(kb, &[], epsilon);
            if !consistent(&updated) {
                return Err(Error::Inconsistent(
                    "KB ∪ ε is inconsistent and the policy removes nothing".into(),
                ));
            }
            Ok(UpdateResult {
                updated,
                added: epsilon.to_vec(),
                removed: Vec::new(),
            })
        }
        GammaPolicy::MinCard => {
            let mut candidates: Vec<usize> = (0..kb.len())
                .filter(|&i| !in_epsilon(epsilon, &kb.entries()[i].formula))
                .collect();
            candidates.sort_by(|&a, &b| kb.entries()[a].label.cmp(&kb.entries()[b].label));
            for size in 0..=candidates.len() {
                for gamma in candidates.iter().copied().combinations(size) {
                    budget.tick()?;
                    let updated = merge(kb, &gamma, epsilon);
                    if consistent(&updated) {
                        return Ok(UpdateResult {
                            updated,
                            added: epsilon.to_vec(),
                            removed: gamma.iter().map(|&i| kb.entries()[i].clone()).collect(),
                        });
                    }
                }
            }
            unreachable!("removing all of KB ∖ ε leaves the consistent ε")
        }
        GammaPolicy::Trace { trace, kb_a } => {
            budget.tick()?;
            restore_consistency_by_trace(kb, epsilon, trace, kb_a)
        }
    }
}

/// Retracts every formula of `kb_h ∖ ε` that the trace model falsifies and
/// adds `ε` plus the agent's same-labelled replacements.
///
/// Atoms outside the trace's signature are read as false.
pub fn restore_consistency_by_trace(
    kb_h: &KnowledgeBase,
    epsilon: &[KbEntry],
    trace: &Model,
    kb_a: &KnowledgeBase,
) -> Result<UpdateResult> {
    if let Some(e) = kb_a.entries().iter().find(|e| !trace.satisfies(&e.formula)) {
        return Err(Error::Precondition(format!(
            "trace model falsifies agent formula `{}` ({})",
            e.label, e.formula
        )));
    }
    let gamma: Vec<usize> = kb_h
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, e)| !in_epsilon(epsilon, &e.formula) && !trace.satisfies(&e.formula))
        .map(|(i, _)| i)
        .collect();
    let mut added = epsilon.to_vec();
    for &i in &gamma {
        if let Some(replacement) = kb_a.get(&kb_h.entries()[i].label) {
            if !added.iter().any(|e| e.formula == replacement.formula) {
                added.push(replacement.clone());
            }
        }
    }
    let updated = merge(kb_h, &gamma, &added);
    if !consistent(&updated) {
        return Err(Error::Inconsistent(
            "trace-based restoration left the knowledge base inconsistent".into(),
        ));
    }
    Ok(UpdateResult {
        updated,
        added,
        removed: gamma.iter().map(|&i| kb_h.entries()[i].clone()).collect(),
    })
}
