//! Classical belief change for comparison: expansion, Dalal revision,
//! possible-models (pma) update, abduction and consistency-based diagnosis.
//!
//! Revision and update are computed on model sets and materialised as one
//! disjunction of full model descriptions over the joint signature.

mod abduction;
mod diagnosis;

use std::collections::BTreeSet;
use std::fmt;

pub use abduction::{abduce, AbductionFailure, AbductionProblem, AbductionResult};
pub use diagnosis::{apply_diagnosis, diagnose, DiagnosisProblem};

use crate::error::{Error, Result};
use crate::logic::{
    is_satisfiable, models_of, Atom, Formula, KbEntry, KnowledgeBase, Limits, Model, Signature,
};

/// Atoms on which two models disagree.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiffSet {
    pub atoms: BTreeSet<Atom>,
}

impl DiffSet {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_proper_subset(&self, other: &DiffSet) -> bool {
        self.len() < other.len() && self.atoms.is_subset(&other.atoms)
    }
}

impl fmt::Display for DiffSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.atoms.iter().map(Atom::name).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// Symmetric difference of the true atoms. Both models must range over the
/// same atoms.
pub fn diff(m1: &Model, m2: &Model) -> Result<DiffSet> {
    if !(m1.signature().is_subset(m2.signature()) && m2.signature().is_subset(m1.signature())) {
        return Err(Error::SignatureMismatch(
            "models are over different signatures".into(),
        ));
    }
    Ok(DiffSet {
        atoms: m1
            .true_atoms()
            .symmetric_difference(m2.true_atoms())
            .cloned()
            .collect(),
    })
}

/// Outcome of a model-based change operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChangeResult {
    /// One entry: the disjunction of the selected model descriptions.
    pub kb: KnowledgeBase,
    /// Selected models, sorted.
    pub models: Vec<Model>,
}

/// `kb` with `phi` appended; no repair is attempted.
pub fn expand(kb: &KnowledgeBase, phi: &Formula) -> KnowledgeBase {
    let mut out = kb.clone();
    let mut label = "expansion".to_string();
    while out.get(&label).is_some() {
        label.push('\'');
    }
    out.push(KbEntry::new(label, phi.clone()))
        .expect("label chosen to be fresh");
    out
}

fn joint_signature(kb: &KnowledgeBase, phi: &Formula) -> Signature {
    let mut sig = kb.signature().clone();
    sig.extend(phi.atoms());
    sig
}

/// Models of `kb` and of `phi` over their joint signature, after the
/// operators' shared preconditions.
fn operands(
    kb: &KnowledgeBase,
    phi: &Formula,
    limits: &Limits,
) -> Result<(Vec<Model>, Vec<Model>)> {
    let sig = joint_signature(kb, phi);
    limits.check(&sig)?;
    if !is_satisfiable(&sig, kb.formulas()) {
        return Err(Error::Inconsistent(
            "the knowledge base has no models; it cannot be revised or updated".into(),
        ));
    }
    if !is_satisfiable(&sig, [phi]) {
        return Err(Error::Unsatisfiable(format!("`{phi}` has no models")));
    }
    Ok((
        models_of(&sig, kb.formulas(), limits)?,
        models_of(&sig, [phi], limits)?,
    ))
}

fn materialise(sig: Signature, models: Vec<Model>, label: &str) -> ChangeResult {
    let formula = Formula::or(models.iter().map(Model::to_formula));
    let kb = KnowledgeBase::new(sig, vec![KbEntry::new(label, formula)])
        .expect("model descriptions stay inside the signature");
    ChangeResult { kb, models }
}

/// Dalal revision: the models of `phi` at minimum Hamming distance from the
/// models of `kb`.
pub fn revise(kb: &KnowledgeBase, phi: &Formula, limits: &Limits) -> Result<ChangeResult> {
    let (kb_models, phi_models) = operands(kb, phi, limits)?;
    let distance = |j: &Model| {
        kb_models
            .iter()
            .map(|i| i.true_atoms().symmetric_difference(j.true_atoms()).count())
            .min()
            .expect("kb has models")
    };
    let best = phi_models
        .iter()
        .map(distance)
        .min()
        .expect("phi has models");
    let selected: Vec<Model> = phi_models
        .iter()
        .filter(|j| distance(j) == best)
        .cloned()
        .collect();
    Ok(materialise(joint_signature(kb, phi), selected, "revision"))
}

/// For a model `i`, the models of `phi` whose difference from `i` is
/// ⊆-minimal.
pub fn closest_models(i: &Model, phi_models: &[Model]) -> Result<Vec<Model>> {
    let diffs = phi_models
        .iter()
        .map(|j| diff(i, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(phi_models
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| !diffs.iter().any(|other| other.is_proper_subset(d)))
        .map(|(j, _)| j.clone())
        .collect())
}

/// Winslett's possible-models update: the union over each model of `kb` of
/// its closest models of `phi`.
pub fn update_pma(kb: &KnowledgeBase, phi: &Formula, limits: &Limits) -> Result<ChangeResult> {
    let (kb_models, phi_models) = operands(kb, phi, limits)?;
    let mut selected = BTreeSet::new();
    for i in &kb_models {
        selected.extend(closest_models(i, &phi_models)?);
    }
    Ok(materialise(
        joint_signature(kb, phi),
        selected.into_iter().collect(),
        "update",
    ))
}
