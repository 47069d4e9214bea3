//! Explanations between an agent's and a human's knowledge base: supports,
//! knowledge-base update with consistency restoration, and plan
//! validity/optimality checks.

mod explain;
mod support;
mod update;

use std::collections::BTreeMap;

pub use explain::{explain_plan, find_explanation, Explanation, EXHAUSTIVE_WEIGHTED_CAP};
pub use support::{general_supports, is_support, minimal_supports, EXHAUSTIVE_SUPPORT_CAP};
pub use update::{restore_consistency_by_trace, update_kb, GammaPolicy, UpdateResult};

use crate::encoder::{optimality_query, validity_query, BoundedEncoding};
use crate::error::{Error, Result};
use crate::logic::{entails_credulous, entails_skeptical, KnowledgeBase, Limits, Mode};
use crate::planning::Plan;

/// Cost of an explanation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum CostModel {
    /// `|ε|`.
    #[default]
    Cardinality,
    /// Sum of per-label weights; labels not in the map weigh 1.
    Weighted(BTreeMap<String, u64>),
}

impl CostModel {
    pub fn weight(&self, label: &str) -> u64 {
        match self {
            CostModel::Cardinality => 1,
            CostModel::Weighted(w) => w.get(label).copied().unwrap_or(1),
        }
    }

    pub fn cost<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> u64 {
        labels.into_iter().map(|l| self.weight(l)).sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Upper bound on candidate subsets examined; `None` is unbounded.
    pub max_steps: Option<u64>,
    pub cost: CostModel,
    /// Also demand that `ε` entails the query on its own.
    pub require_support: bool,
    pub limits: Limits,
}

/// Step counter for interruptible subset searches.
#[derive(Clone, Debug)]
pub(crate) struct Budget {
    used: u64,
    max: Option<u64>,
}

impl Budget {
    pub(crate) fn new(max: Option<u64>) -> Self {
        Budget { used: 0, max }
    }

    pub(crate) fn tick(&mut self) -> Result<()> {
        self.used += 1;
        match self.max {
            Some(max) if self.used > max => Err(Error::BudgetExhausted(max)),
            _ => Ok(()),
        }
    }
}

/// `kb_h` with the encoding's goal-marker definitions added for any marker
/// it does not mention.
fn with_goal_definitions(kb_h: &KnowledgeBase, enc: &BoundedEncoding) -> Result<KnowledgeBase> {
    let shares = enc
        .kb()
        .signature()
        .iter()
        .filter(|a| !enc.goal_atoms().contains(a))
        .any(|a| kb_h.signature().contains(a));
    if !kb_h.signature().is_empty() && !shares {
        return Err(Error::SignatureMismatch(
            "the knowledge base mentions none of the encoding's fluent or action atoms".into(),
        ));
    }
    let missing: Vec<_> = enc
        .goal_definitions()
        .into_iter()
        .filter(|e| {
            e.formula
                .atoms()
                .iter()
                .any(|a| enc.goal_atoms().contains(a) && !kb_h.signature().contains(a))
        })
        .collect();
    Ok(update::merge(kb_h, &[], &missing))
}

/// Validity of `plan` in `kb_h`: `kb_h ⊨ π ∧ goal_n` in `mode`. The
/// definition uses credulous entailment; see [`check_plan_validity`].
pub fn check_plan_validity_in(
    kb_h: &KnowledgeBase,
    enc: &BoundedEncoding,
    plan: &Plan,
    mode: Mode,
) -> Result<bool> {
    let kb = with_goal_definitions(kb_h, enc)?;
    let query = validity_query(enc, plan)?;
    Ok(match mode {
        Mode::Credulous => entails_credulous(&kb, &query),
        Mode::Skeptical => entails_skeptical(&kb, &query),
    })
}

/// `kb_h ⊨c π ∧ goal_n`.
pub fn check_plan_validity(
    kb_h: &KnowledgeBase,
    enc: &BoundedEncoding,
    plan: &Plan,
) -> Result<bool> {
    check_plan_validity_in(kb_h, enc, plan, Mode::Credulous)
}

/// Valid, and `kb_h ⊨s ⋀_{t<n} ¬goal_t`.
pub fn check_plan_optimality(
    kb_h: &KnowledgeBase,
    enc: &BoundedEncoding,
    plan: &Plan,
) -> Result<bool> {
    if !check_plan_validity(kb_h, enc, plan)? {
        return Ok(false);
    }
    let kb = with_goal_definitions(kb_h, enc)?;
    Ok(entails_skeptical(&kb, &optimality_query(enc)))
}
