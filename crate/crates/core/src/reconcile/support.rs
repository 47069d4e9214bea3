//! Supports: sub-theories that entail a formula on their own.

use std::collections::BTreeSet;

use itertools::Itertools;

use super::{Budget, SearchOptions};
use crate::error::{Error, Result};
use crate::logic::{entails, models_of, Atom, Formula, KbEntry, KnowledgeBase, Mode, Signature};

/// Up to this many entries, supports are enumerated exhaustively.
pub const EXHAUSTIVE_SUPPORT_CAP: usize = 16;

fn theory(signature: &Signature, entries: Vec<KbEntry>) -> KnowledgeBase {
    let mut sig = signature.clone();
    for e in &entries {
        sig.extend(e.formula.atoms());
    }
    // Labels may repeat when entries come from different sources; entailment
    // only looks at formulas.
    let relabelled = entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| KbEntry::new(format!("{i}"), e.formula))
        .collect();
    KnowledgeBase::new(sig, relabelled).expect("fresh labels are unique")
}

/// Whether `epsilon` alone entails `phi` in `mode`.
pub fn is_support(epsilon: &[KbEntry], phi: &Formula, mode: Mode) -> bool {
    entails(
        &theory(&phi.atoms().into_iter().collect(), epsilon.to_vec()),
        phi,
        mode,
    )
}

/// Entry indices sorted by label, then all subsets in increasing size and
/// lexicographic label order.
fn label_order(kb: &KnowledgeBase) -> Vec<usize> {
    let mut order: Vec<usize> = (0..kb.len()).collect();
    order.sort_by(|&a, &b| kb.entries()[a].label.cmp(&kb.entries()[b].label));
    order
}

fn subsets_by_size(order: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..=order.len()).flat_map(move |k| order.iter().copied().combinations(k))
}

fn entries_of(kb: &KnowledgeBase, indices: &[usize]) -> Vec<KbEntry> {
    indices.iter().map(|&i| kb.entries()[i].clone()).collect()
}

fn sort_supports(kb: &KnowledgeBase, supports: &mut [Vec<usize>]) {
    let key = |s: &Vec<usize>| {
        let mut labels: Vec<&str> = s.iter().map(|&i| kb.entries()[i].label.as_str()).collect();
        labels.sort();
        (
            s.len(),
            labels.into_iter().map(str::to_string).collect::<Vec<_>>(),
        )
    };
    supports.sort_by_key(key);
}

fn check_entailed(kb: &KnowledgeBase, phi: &Formula, mode: Mode) -> Result<()> {
    if !entails(kb, phi, mode) {
        return Err(Error::Precondition(format!(
            "the knowledge base does not {mode}ly entail `{phi}`"
        )));
    }
    Ok(())
}

/// All ⊆-minimal supports of `phi` within `kb`, smallest first.
///
/// Exhaustive for up to [`EXHAUSTIVE_SUPPORT_CAP`] entries. Beyond that, one
/// deletion-minimised support is returned per rotation of the entry order.
pub fn minimal_supports(
    kb: &KnowledgeBase,
    phi: &Formula,
    mode: Mode,
    opts: &SearchOptions,
) -> Result<Vec<Vec<KbEntry>>> {
    check_entailed(kb, phi, mode)?;
    let mut budget = Budget::new(opts.max_steps);
    let sig = kb.signature().union(&phi.atoms().into_iter().collect());
    let holds = |indices: &[usize]| entails(&theory(&sig, entries_of(kb, indices)), phi, mode);

    let mut found: Vec<Vec<usize>> = Vec::new();
    if kb.len() <= EXHAUSTIVE_SUPPORT_CAP {
        let order = label_order(kb);
        for subset in subsets_by_size(&order) {
            let set: BTreeSet<usize> = subset.iter().copied().collect();
            if found.iter().any(|m| m.iter().all(|i| set.contains(i))) {
                continue;
            }
            budget.tick()?;
            if holds(&subset) {
                found.push(subset);
            }
        }
    } else {
        let order = label_order(kb);
        for start in 0..order.len() {
            let mut current: Vec<usize> = order[start..]
                .iter()
                .chain(&order[..start])
                .copied()
                .collect();
            let mut i = 0;
            while i < current.len() {
                let mut trial = current.clone();
                trial.remove(i);
                budget.tick()?;
                if holds(&trial) {
                    current = trial;
                } else {
                    i += 1;
                }
            }
            current.sort_unstable();
            if !found.contains(&current) {
                found.push(current);
            }
        }
    }
    sort_supports(kb, &mut found);
    Ok(found.iter().map(|s| entries_of(kb, s)).collect())
}

/// Supports whose model set is not strictly contained in another support's.
pub fn general_supports(
    kb: &KnowledgeBase,
    phi: &Formula,
    mode: Mode,
    opts: &SearchOptions,
) -> Result<Vec<Vec<KbEntry>>> {
    if kb.len() > EXHAUSTIVE_SUPPORT_CAP {
        return Err(Error::SubsetCap {
            what: "knowledge base",
            size: kb.len(),
            cap: EXHAUSTIVE_SUPPORT_CAP,
        });
    }
    check_entailed(kb, phi, mode)?;
    let mut budget = Budget::new(opts.max_steps);
    let sig = kb.signature().union(&phi.atoms().into_iter().collect());
    opts.limits.check(&sig)?;

    let order = label_order(kb);
    let mut supports: Vec<(Vec<usize>, BTreeSet<BTreeSet<Atom>>)> = Vec::new();
    for subset in subsets_by_size(&order) {
        budget.tick()?;
        let t = theory(&sig, entries_of(kb, &subset));
        if !entails(&t, phi, mode) {
            continue;
        }
        let models = models_of(&sig, t.formulas(), &opts.limits)?
            .into_iter()
            .map(|m| m.true_atoms().clone())
            .collect();
        supports.push((subset, models));
    }
    let distinct: Vec<&BTreeSet<BTreeSet<Atom>>> =
        supports.iter().map(|(_, m)| m).unique().collect();
    let mut general: Vec<Vec<usize>> = supports
        .iter()
        .filter(|(_, models)| {
            !distinct
                .iter()
                .any(|other| models.len() < other.len() && models.is_subset(other))
        })
        .map(|(s, _)| s.clone())
        .collect();
    sort_supports(kb, &mut general);
    Ok(general.iter().map(|s| entries_of(kb, s)).collect())
}
