use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A propositional letter.
///
/// User-facing atoms follow `[A-Za-z][A-Za-z0-9]*(_[0-9]+)?`, where the
/// optional numeric suffix is a timestep index. Auxiliary atoms introduced by
/// CNF conversion use a leading underscore and can never be parsed, so they
/// cannot collide with declared atoms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: impl AsRef<str>) -> Result<Self, Error> {
        let name = name.as_ref();
        if is_valid_atom_name(name) {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(Error::InvalidAtom(name.to_string()))
        }
    }

    /// `<base>_<t>`; `base` must be a bare identifier.
    pub fn timed(base: &str, t: usize) -> Result<Self, Error> {
        Atom::new(format!("{base}_{t}"))
    }

    pub(crate) fn aux(index: usize) -> Self {
        Atom(Arc::from(format!("_aux{index}")))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_aux(&self) -> bool {
        self.0.starts_with('_')
    }

    /// The timestep suffix, if the atom carries one.
    pub fn timestep(&self) -> Option<usize> {
        let (_, t) = self.0.rsplit_once('_')?;
        t.parse().ok()
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Atom {
    type Error = Error;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Atom::new(value)
    }
}

impl From<Atom> for String {
    fn from(value: Atom) -> Self {
        value.0.to_string()
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
        && name != "true"
        && name != "false"
}

pub(crate) fn is_valid_atom_name(name: &str) -> bool {
    match name.split_once('_') {
        None => is_identifier(name),
        Some((base, digits)) => {
            is_identifier(base) && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        }
    }
}

/// Propositional formula AST.
///
/// `And`/`Or` lists are expected to be non-empty; the smart constructors
/// [`Formula::and`] and [`Formula::or`] fold empty lists to constants and
/// unwrap singletons.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(atom: Atom) -> Self {
        Formula::Atom(atom)
    }

    pub fn lit(atom: Atom, positive: bool) -> Self {
        if positive {
            Formula::Atom(atom)
        } else {
            Formula::Not(Box::new(Formula::Atom(atom)))
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.len() {
            0 => Formula::Const(true),
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.len() {
            0 => Formula::Const(false),
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// Atoms in order of first occurrence.
    pub fn atoms(&self) -> IndexSet<Atom> {
        let mut out = IndexSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut IndexSet<Atom>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
            Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Evaluates under a total assignment given as a predicate on atoms.
    pub fn eval(&self, value: &impl Fn(&Atom) -> bool) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Atom(a) => value(a),
            Formula::Not(f) => !f.eval(value),
            Formula::And(fs) => fs.iter().all(|f| f.eval(value)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(value)),
            Formula::Implies(l, r) => !l.eval(value) || r.eval(value),
            Formula::Iff(l, r) => l.eval(value) == r.eval(value),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(_) => 3,
            Formula::And(_) => 4,
            Formula::Not(_) => 5,
            Formula::Const(_) | Formula::Atom(_) => 6,
        }
    }

    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_bare(f)?;
            f.write_str(")")
        } else {
            self.fmt_bare(f)
        }
    }

    // Children that would re-associate on parsing are parenthesized, which
    // keeps `parse(format(f)) == f` for n-ary nodes and right-assoc arrows.
    fn fmt_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(b) => write!(f, "{b}"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(inner) => {
                f.write_str("!")?;
                inner.fmt_at(5, f)
            }
            Formula::And(fs) => join(fs, " & ", 5, f),
            Formula::Or(fs) => join(fs, " | ", 4, f),
            Formula::Implies(l, r) => {
                l.fmt_at(3, f)?;
                f.write_str(" -> ")?;
                r.fmt_at(2, f)
            }
            Formula::Iff(l, r) => {
                l.fmt_at(2, f)?;
                f.write_str(" <-> ")?;
                r.fmt_at(1, f)
            }
        }
    }
}

fn join(fs: &[Formula], sep: &str, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, part) in fs.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        part.fmt_at(min, f)?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_bare(f)
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(super::parse_formula(s)?)
    }
}

impl From<Atom> for Formula {
    fn from(value: Atom) -> Self {
        Formula::Atom(value)
    }
}
