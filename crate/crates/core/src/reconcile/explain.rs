use itertools::Itertools;

use super::update::{update_with_budget, GammaPolicy, UpdateResult};
use super::{check_plan_optimality, is_support, Budget, CostModel, SearchOptions};
use crate::encoder::BoundedEncoding;
use crate::error::{Error, Result};
use crate::logic::{entails, Formula, KbEntry, KnowledgeBase, Mode};
use crate::planning::Plan;

/// Weighted costs are not monotone in `|ε|`, so every subset is ranked up
/// front; this bounds the agent knowledge base size for that search.
pub const EXHAUSTIVE_WEIGHTED_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    /// Formulas transferred from the agent's knowledge base.
    pub epsilon: Vec<KbEntry>,
    /// Formulas retracted from the human's knowledge base.
    pub gamma: Vec<KbEntry>,
    pub cost: u64,
    pub mode: Mode,
    pub update: UpdateResult,
    pub notes: Vec<String>,
}

impl Explanation {
    pub fn updated(&self) -> &KnowledgeBase {
        &self.update.updated
    }
}

fn sorted_labels(kb: &KnowledgeBase, subset: &[usize]) -> Vec<String> {
    subset
        .iter()
        .map(|&i| kb.entries()[i].label.clone())
        .sorted()
        .collect()
}

/// Subsets of `kb` in search order: by cost, then size, then labels.
fn candidates<'a>(
    kb: &'a KnowledgeBase,
    cost: &'a CostModel,
) -> Result<Box<dyn Iterator<Item = Vec<usize>> + 'a>> {
    let mut order: Vec<usize> = (0..kb.len()).collect();
    order.sort_by(|&a, &b| kb.entries()[a].label.cmp(&kb.entries()[b].label));
    match cost {
        CostModel::Cardinality => {
            Ok(Box::new((0..=order.len()).flat_map(move |k| {
                order.clone().into_iter().combinations(k)
            })))
        }
        CostModel::Weighted(_) => {
            if kb.len() > EXHAUSTIVE_WEIGHTED_CAP {
                return Err(Error::SubsetCap {
                    what: "agent knowledge base",
                    size: kb.len(),
                    cap: EXHAUSTIVE_WEIGHTED_CAP,
                });
            }
            let mut all: Vec<Vec<usize>> = order.iter().copied().powerset().collect();
            all.sort_by_cached_key(|s| {
                let labels = sorted_labels(kb, s);
                (
                    cost.cost(labels.iter().map(String::as_str)),
                    s.len(),
                    labels,
                )
            });
            Ok(Box::new(all.into_iter()))
        }
    }
}

/// First candidate `ε ⊆ kb_a` whose update of `kb_h` passes `accept`.
fn search(
    kb_a: &KnowledgeBase,
    kb_h: &KnowledgeBase,
    policy: &GammaPolicy,
    opts: &SearchOptions,
    accept: impl Fn(&[KbEntry], &KnowledgeBase) -> Result<bool>,
) -> Result<Option<(Vec<KbEntry>, UpdateResult, u64)>> {
    let mut budget = Budget::new(opts.max_steps);
    for subset in candidates(kb_a, &opts.cost)? {
        let epsilon: Vec<KbEntry> = subset.iter().map(|&i| kb_a.entries()[i].clone()).collect();
        let result = match update_with_budget(kb_h, &epsilon, policy, &mut budget) {
            Ok(r) => r,
            Err(Error::Inconsistent(_)) => continue,
            Err(e) => return Err(e),
        };
        if accept(&epsilon, &result.updated)? {
            let cost = opts.cost.cost(epsilon.iter().map(|e| e.label.as_str()));
            return Ok(Some((epsilon, result, cost)));
        }
    }
    Ok(None)
}

/// A cost-minimal `ε ⊆ kb_a` such that updating `kb_h` with it under
/// `policy` yields a consistent knowledge base entailing `phi` in `mode`.
///
/// With `opts.require_support`, `ε` must also entail `phi` by itself. In
/// credulous mode that condition is vacuous for satisfiable `phi`, since the
/// empty theory has every model.
pub fn find_explanation(
    kb_a: &KnowledgeBase,
    kb_h: &KnowledgeBase,
    phi: &Formula,
    mode: Mode,
    policy: &GammaPolicy,
    opts: &SearchOptions,
) -> Result<Option<Explanation>> {
    if !entails(kb_a, phi, mode) {
        return Err(Error::Precondition(format!(
            "the agent knowledge base does not {mode}ly entail `{phi}`"
        )));
    }
    let found = search(kb_a, kb_h, policy, opts, |epsilon, updated| {
        if opts.require_support && !is_support(epsilon, phi, mode) {
            return Ok(false);
        }
        Ok(entails(updated, phi, mode))
    })?;
    let mut notes = Vec::new();
    if mode == Mode::Credulous && opts.require_support {
        notes.push(
            "credulous support is trivial: the empty set supports any satisfiable query".into(),
        );
    }
    if entails(kb_h, phi, mode) {
        notes.push(format!(
            "the human knowledge base already {mode}ly entails the query"
        ));
    }
    Ok(found.map(|(epsilon, update, cost)| Explanation {
        gamma: update.removed.clone(),
        epsilon,
        cost,
        mode,
        update,
        notes,
    }))
}

/// A cost-minimal explanation after which `plan` is valid and optimal in
/// the updated human knowledge base, as it is in `kb_a`.
pub fn explain_plan(
    kb_a: &KnowledgeBase,
    kb_h: &KnowledgeBase,
    enc: &BoundedEncoding,
    plan: &Plan,
    policy: &GammaPolicy,
    opts: &SearchOptions,
) -> Result<Option<Explanation>> {
    if !check_plan_optimality(kb_a, enc, plan)? {
        return Err(Error::Precondition(
            "the plan is not valid and optimal in the agent knowledge base".into(),
        ));
    }
    let found = search(kb_a, kb_h, policy, opts, |_, updated| {
        check_plan_optimality(updated, enc, plan)
    })?;
    Ok(found.map(|(epsilon, update, cost)| Explanation {
        gamma: update.removed.clone(),
        epsilon,
        cost,
        mode: Mode::Skeptical,
        update,
        notes: Vec::new(),
    }))
}
