use std::collections::{BTreeSet, HashSet};
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use super::formula::{Atom, Formula};
use super::parse::parse_formula;
use crate::error::{Error, Result};

/// An ordered atom universe. Order fixes the solver's branching order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    atoms: IndexSet<Atom>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn index_of(&self, atom: &Atom) -> Option<usize> {
        self.atoms.get_index_of(atom)
    }

    pub fn get(&self, index: usize) -> Option<&Atom> {
        self.atoms.get_index(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.atoms.iter()
    }

    /// Returns `true` if the atom was not yet present.
    pub fn insert(&mut self, atom: Atom) -> bool {
        self.atoms.insert(atom)
    }

    pub fn extend<I: IntoIterator<Item = Atom>>(&mut self, atoms: I) {
        self.atoms.extend(atoms);
    }

    /// `self` followed by the atoms of `other` not already present.
    pub fn union(&self, other: &Signature) -> Signature {
        let mut out = self.clone();
        out.extend(other.iter().cloned());
        out
    }

    pub fn is_subset(&self, other: &Signature) -> bool {
        self.atoms.iter().all(|a| other.contains(a))
    }
}

impl FromIterator<Atom> for Signature {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        Signature {
            atoms: iter.into_iter().collect(),
        }
    }
}

/// A total truth assignment over a signature, stored as its true atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    true_atoms: BTreeSet<Atom>,
    signature: Signature,
}

impl Model {
    pub fn new(signature: Signature, true_atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let true_atoms: BTreeSet<Atom> = true_atoms.into_iter().collect();
        if let Some(extra) = true_atoms.iter().find(|a| !signature.contains(a)) {
            return Err(Error::UndeclaredAtom {
                atom: extra.to_string(),
            });
        }
        Ok(Model {
            true_atoms,
            signature,
        })
    }

    pub(crate) fn from_parts(signature: Signature, true_atoms: BTreeSet<Atom>) -> Self {
        debug_assert!(true_atoms.iter().all(|a| signature.contains(a)));
        Model {
            true_atoms,
            signature,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn true_atoms(&self) -> &BTreeSet<Atom> {
        &self.true_atoms
    }

    /// Atoms outside the signature read as false.
    pub fn value(&self, atom: &Atom) -> bool {
        self.true_atoms.contains(atom)
    }

    pub fn satisfies(&self, f: &Formula) -> bool {
        f.eval(&|a| self.value(a))
    }

    /// True-atom names in lexicographic order.
    pub fn sorted_names(&self) -> Vec<String> {
        self.true_atoms.iter().map(|a| a.to_string()).collect()
    }

    /// The same assignment restricted to (or padded with false over) `signature`.
    pub fn project(&self, signature: &Signature) -> Model {
        let true_atoms = self
            .true_atoms
            .iter()
            .filter(|a| signature.contains(a))
            .cloned()
            .collect();
        Model::from_parts(signature.clone(), true_atoms)
    }

    /// Conjunction of one literal per signature atom, in signature order.
    pub fn to_formula(&self) -> Formula {
        Formula::and(
            self.signature
                .iter()
                .map(|a| Formula::lit(a.clone(), self.value(a))),
        )
    }
}

impl PartialOrd for Model {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Model {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.true_atoms.cmp(&other.true_atoms)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.sorted_names().join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KbEntry {
    pub label: String,
    pub formula: Formula,
}

impl KbEntry {
    pub fn new(label: impl Into<String>, formula: Formula) -> Self {
        KbEntry {
            label: label.into(),
            formula,
        }
    }
}

/// Labeled formulas over an explicit signature.
///
/// Reasoning treats the entries as a set; their order only matters for
/// deterministic output and tie-breaking.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    entries: Vec<KbEntry>,
    signature: Signature,
}

impl KnowledgeBase {
    pub fn new(signature: Signature, entries: Vec<KbEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.label.as_str()) {
                return Err(Error::DuplicateLabel(e.label.clone()));
            }
            if let Some(a) = e
                .formula
                .atoms()
                .into_iter()
                .find(|a| !signature.contains(a))
            {
                return Err(Error::UndeclaredAtom {
                    atom: a.to_string(),
                });
            }
        }
        Ok(KnowledgeBase { entries, signature })
    }

    /// Signature inferred from the formulas in order of first occurrence.
    pub fn from_entries(entries: Vec<KbEntry>) -> Result<Self> {
        let mut signature = Signature::new();
        for e in &entries {
            signature.extend(e.formula.atoms());
        }
        KnowledgeBase::new(signature, entries)
    }

    pub fn empty(signature: Signature) -> Self {
        KnowledgeBase {
            entries: Vec::new(),
            signature,
        }
    }

    /// Parses `(label, text)` pairs; the signature is inferred.
    pub fn parse<'a>(items: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let entries = items
            .into_iter()
            .map(|(label, text)| Ok(KbEntry::new(label, parse_formula(text)?)))
            .collect::<Result<Vec<_>>>()?;
        KnowledgeBase::from_entries(entries)
    }

    pub fn entries(&self) -> &[KbEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> + '_ {
        self.entries.iter().map(|e| &e.formula)
    }

    pub fn get(&self, label: &str) -> Option<&KbEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn contains_formula(&self, f: &Formula) -> bool {
        self.entries.iter().any(|e| &e.formula == f)
    }

    /// Appends an entry, widening the signature with any new atoms.
    pub fn push(&mut self, entry: KbEntry) -> Result<()> {
        if self.get(&entry.label).is_some() {
            return Err(Error::DuplicateLabel(entry.label));
        }
        self.signature.extend(entry.formula.atoms());
        self.entries.push(entry);
        Ok(())
    }

    /// Adds unconstrained atoms to the signature.
    pub fn with_atoms(mut self, atoms: impl IntoIterator<Item = Atom>) -> Self {
        self.signature.extend(atoms);
        self
    }

    pub fn with_signature(mut self, signature: &Signature) -> Self {
        self.signature = signature.union(&self.signature);
        self
    }

    pub fn conjunction(&self) -> Formula {
        Formula::and(self.entries.iter().map(|e| e.formula.clone()))
    }

    /// A sub-theory made of the entries at `indices`, over the same signature.
    pub fn subset(&self, indices: &[usize]) -> KnowledgeBase {
        KnowledgeBase {
            entries: indices.iter().map(|&i| self.entries[i].clone()).collect(),
            signature: self.signature.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: KbFile = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::schema(e.path().to_string(), e.inner().to_string()))?;
        file.into_kb()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(KbFile::from_kb(self)).expect("kb serializes")
    }
}

/// On-disk layout: `{ "signature": [..], "formulas": [{"label", "text"}] }`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KbFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<Vec<String>>,
    pub formulas: Vec<KbFileEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KbFileEntry {
    pub label: String,
    pub text: String,
}

impl KbFile {
    pub fn from_kb(kb: &KnowledgeBase) -> Self {
        KbFile {
            signature: Some(kb.signature.iter().map(|a| a.to_string()).collect()),
            formulas: kb
                .entries
                .iter()
                .map(|e| KbFileEntry {
                    label: e.label.clone(),
                    text: e.formula.to_string(),
                })
                .collect(),
        }
    }

    pub fn into_kb(self) -> Result<KnowledgeBase> {
        let mut entries = Vec::with_capacity(self.formulas.len());
        for (i, item) in self.formulas.into_iter().enumerate() {
            let formula = parse_formula(&item.text)
                .map_err(|e| Error::schema(format!("formulas[{i}].text"), e.to_string()))?;
            entries.push(KbEntry::new(item.label, formula));
        }
        match self.signature {
            None => KnowledgeBase::from_entries(entries),
            Some(names) => {
                let mut signature = Signature::new();
                for (i, name) in names.iter().enumerate() {
                    let atom = Atom::new(name)
                        .map_err(|e| Error::schema(format!("signature[{i}]"), e.to_string()))?;
                    if !signature.insert(atom) {
                        return Err(Error::schema(
                            format!("signature[{i}]"),
                            format!("duplicate atom `{name}`"),
                        ));
                    }
                }
                KnowledgeBase::new(signature, entries)
            }
        }
    }
}
