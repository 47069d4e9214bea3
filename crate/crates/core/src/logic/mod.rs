//! Propositional logic: formulas, knowledge bases, a DPLL engine, and the
//! entailment relations built on it.
//!
//! Entailment follows the acceptable-belief-set reading: a knowledge base with
//! no models entails nothing, skeptically or credulously.

mod cnf;
mod dpll;
mod formula;
mod kb;
mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use cnf::{to_cnf, ClauseSet, Literal};
pub(crate) use cnf::{Cnf, CnfBuilder};
pub(crate) use formula::is_identifier;
pub use formula::Atom;
pub use formula::Formula;
pub use kb::{KbEntry, KbFile, KbFileEntry, KnowledgeBase, Model, Signature};
pub use parse::{parse_formula, ParseError};

use crate::error::{Error, Result};

pub const DEFAULT_ATOM_CAP: usize = 24;

/// Bounds on exponential work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest signature for which models are enumerated.
    pub atom_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

impl Limits {
    pub fn with_atom_cap(atom_cap: usize) -> Self {
        Limits { atom_cap }
    }

    pub(crate) fn check(&self, signature: &Signature) -> Result<()> {
        if signature.len() > self.atom_cap {
            return Err(Error::AtomCap {
                atoms: signature.len(),
                cap: self.atom_cap,
            });
        }
        Ok(())
    }
}

/// Skeptical (every model) or credulous (some model) entailment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Skeptical,
    Credulous,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Skeptical => "skeptical",
            Mode::Credulous => "credulous",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skeptical" => Ok(Mode::Skeptical),
            "credulous" => Ok(Mode::Credulous),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn model(self) -> Option<Model> {
        match self {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat => None,
        }
    }
}

fn model_from_bits(signature: &Signature, bits: &[bool]) -> Model {
    let true_atoms: BTreeSet<Atom> = signature
        .iter()
        .zip(bits)
        .filter(|(_, &b)| b)
        .map(|(a, _)| a.clone())
        .collect();
    Model::from_parts(signature.clone(), true_atoms)
}

/// Runs DPLL on a clause set; the model is projected onto `signature`, whose
/// order fixes the branching order.
pub fn dpll_sat(cs: &ClauseSet, signature: &Signature) -> SatResult {
    let cnf = cs.to_cnf(signature);
    match dpll::solve(&cnf) {
        Some(bits) => SatResult::Sat(model_from_bits(signature, &bits[..cnf.projected])),
        None => SatResult::Unsat,
    }
}

pub(crate) fn build_cnf<'a>(
    signature: &Signature,
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> Cnf {
    let mut builder = CnfBuilder::new(signature);
    for f in formulas {
        builder.add(f);
    }
    builder.finish()
}

/// A model over `signature` of the conjunction of `formulas`, if any.
pub fn satisfy<'a>(
    signature: &Signature,
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> Option<Model> {
    let cnf = build_cnf(signature, formulas);
    dpll::solve(&cnf).map(|bits| model_from_bits(signature, &bits[..cnf.projected]))
}

pub fn is_satisfiable<'a>(
    signature: &Signature,
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> bool {
    satisfy(signature, formulas).is_some()
}

/// All models over `signature` of the conjunction of `formulas`, sorted.
pub fn models_of<'a>(
    signature: &Signature,
    formulas: impl IntoIterator<Item = &'a Formula>,
    limits: &Limits,
) -> Result<Vec<Model>> {
    limits.check(signature)?;
    let cnf = build_cnf(signature, formulas);
    let bits = dpll::enumerate_projected(&cnf, None).expect("unbounded enumeration");
    let mut models: Vec<Model> = bits.iter().map(|b| model_from_bits(signature, b)).collect();
    models.sort();
    Ok(models)
}

/// Models of the knowledge base over its own signature. Empty iff inconsistent.
pub fn enumerate_models(kb: &KnowledgeBase, limits: &Limits) -> Result<Vec<Model>> {
    models_of(kb.signature(), kb.formulas(), limits)
}

/// Number of models of `formulas` over `signature`, counting no further than
/// `stop_after + 1`. Does not apply the atom cap.
pub fn count_models_up_to<'a>(
    signature: &Signature,
    formulas: impl IntoIterator<Item = &'a Formula>,
    stop_after: usize,
) -> usize {
    let cnf = build_cnf(signature, formulas);
    match dpll::enumerate_projected(&cnf, Some(stop_after)) {
        Some(models) => models.len(),
        None => stop_after + 1,
    }
}

pub fn is_consistent(kb: &KnowledgeBase) -> bool {
    is_satisfiable(kb.signature(), kb.formulas())
}

fn query_signature(kb: &KnowledgeBase, phi: &Formula) -> Signature {
    let mut sig = kb.signature().clone();
    sig.extend(phi.atoms());
    sig
}

/// `phi` holds in every model of `kb`, and `kb` has at least one model.
pub fn entails_skeptical(kb: &KnowledgeBase, phi: &Formula) -> bool {
    let sig = query_signature(kb, phi);
    if !is_satisfiable(&sig, kb.formulas()) {
        return false;
    }
    let negated = Formula::not(phi.clone());
    !is_satisfiable(&sig, kb.formulas().chain(std::iter::once(&negated)))
}

/// `phi` holds in some model of `kb`.
pub fn entails_credulous(kb: &KnowledgeBase, phi: &Formula) -> bool {
    let sig = query_signature(kb, phi);
    is_satisfiable(&sig, kb.formulas().chain(std::iter::once(phi)))
}

pub fn entails(kb: &KnowledgeBase, phi: &Formula, mode: Mode) -> bool {
    match mode {
        Mode::Skeptical => entails_skeptical(kb, phi),
        Mode::Credulous => entails_credulous(kb, phi),
    }
}

/// `models(kb1)` is a strict subset of `models(kb2)` over the joint signature.
pub fn subsumes(kb1: &KnowledgeBase, kb2: &KnowledgeBase) -> bool {
    let sig = kb1.signature().union(kb2.signature());
    let c1 = kb1.conjunction();
    let c2 = kb2.conjunction();
    let not_c1 = Formula::not(c1.clone());
    let not_c2 = Formula::not(c2.clone());
    let included = !is_satisfiable(&sig, [&c1, &not_c2]);
    included && is_satisfiable(&sig, [&c2, &not_c1])
}

/// Same model set over the joint signature.
pub fn equivalent(kb1: &KnowledgeBase, kb2: &KnowledgeBase) -> bool {
    let sig = kb1.signature().union(kb2.signature());
    let c1 = kb1.conjunction();
    let c2 = kb2.conjunction();
    let diff = Formula::not(Formula::iff(c1, c2));
    !is_satisfiable(&sig, [&diff])
}
