use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::logic::{is_satisfiable, Atom, Formula, KbEntry, KnowledgeBase, Signature};
use crate::reconcile::UpdateResult;

/// Component sets above this size are not searched.
pub const COMPONENT_CAP: usize = 20;

#[derive(Clone, Debug)]
pub struct DiagnosisProblem {
    kb: KnowledgeBase,
    observations: Vec<Formula>,
    /// Component name to its abnormality atom, ordered by name.
    ab_atoms: BTreeMap<String, Atom>,
}

impl DiagnosisProblem {
    /// Abnormality atoms must be distinct and must not occur in the
    /// observations.
    pub fn new(
        kb: KnowledgeBase,
        observations: Vec<Formula>,
        ab_atoms: impl IntoIterator<Item = (String, Atom)>,
    ) -> Result<Self> {
        let ab_atoms: BTreeMap<String, Atom> = ab_atoms.into_iter().collect();
        let mut seen = BTreeSet::new();
        for atom in ab_atoms.values() {
            if !seen.insert(atom) {
                return Err(Error::NameCollision(atom.to_string()));
            }
        }
        for o in &observations {
            if let Some(a) = o.atoms().iter().find(|a| seen.contains(a)) {
                return Err(Error::NameCollision(a.to_string()));
            }
        }
        if ab_atoms.len() > COMPONENT_CAP {
            return Err(Error::SubsetCap {
                what: "component set",
                size: ab_atoms.len(),
                cap: COMPONENT_CAP,
            });
        }
        Ok(DiagnosisProblem {
            kb,
            observations,
            ab_atoms,
        })
    }

    pub fn components(&self) -> impl Iterator<Item = &str> + '_ {
        self.ab_atoms.keys().map(String::as_str)
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn observations(&self) -> &[Formula] {
        &self.observations
    }

    fn signature(&self) -> Signature {
        let mut sig = self.kb.signature().clone();
        for o in &self.observations {
            sig.extend(o.atoms());
        }
        sig.extend(self.ab_atoms.values().cloned());
        sig
    }

    /// `O ∪ {ab(c) : c ∈ faulty} ∪ {¬ab(c) : c ∉ faulty}`, labelled.
    fn assumptions(&self, faulty: &BTreeSet<&str>) -> Vec<KbEntry> {
        let obs = self
            .observations
            .iter()
            .enumerate()
            .map(|(i, o)| KbEntry::new(format!("obs:{i}"), o.clone()));
        let ab = self.ab_atoms.iter().map(|(c, atom)| {
            KbEntry::new(
                format!("ab:{c}"),
                Formula::lit(atom.clone(), faulty.contains(c.as_str())),
            )
        });
        obs.chain(ab).collect()
    }

    fn consistent_with(&self, faulty: &BTreeSet<&str>) -> bool {
        let assumptions = self.assumptions(faulty);
        is_satisfiable(
            &self.signature(),
            self.kb
                .formulas()
                .chain(assumptions.iter().map(|e| &e.formula)),
        )
    }
}

/// All ⊆-minimal sets of faulty components consistent with the
/// observations, by increasing size. `[∅]` when assuming every component
/// healthy is already consistent; `[]` when nothing helps.
pub fn diagnose(problem: &DiagnosisProblem) -> Vec<BTreeSet<String>> {
    let components: Vec<&str> = problem.components().collect();
    let mut found: Vec<BTreeSet<&str>> = Vec::new();
    for subset in components.iter().copied().powerset() {
        let set: BTreeSet<&str> = subset.into_iter().collect();
        if found.iter().any(|m| m.is_subset(&set)) {
            continue;
        }
        if problem.consistent_with(&set) {
            found.push(set);
        }
    }
    found
        .into_iter()
        .map(|s| s.into_iter().map(str::to_string).collect())
        .collect()
}

/// The knowledge base with the diagnosis' assumptions added. A diagnosis
/// only adds knowledge, so `removed` is always empty.
pub fn apply_diagnosis(problem: &DiagnosisProblem, faulty: &BTreeSet<String>) -> UpdateResult {
    let faulty: BTreeSet<&str> = faulty.iter().map(String::as_str).collect();
    let added = problem.assumptions(&faulty);
    let mut updated = problem.kb.clone().with_signature(&problem.signature());
    for e in &added {
        let mut label = e.label.clone();
        while updated.get(&label).is_some() {
            label.push('\'');
        }
        updated
            .push(KbEntry::new(label, e.formula.clone()))
            .expect("label chosen to be fresh");
    }
    UpdateResult {
        updated,
        added,
        removed: Vec::new(),
    }
}
