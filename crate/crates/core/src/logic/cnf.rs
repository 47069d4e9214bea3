//! Definitional (Tseitin) clause conversion.

use std::collections::BTreeSet;

use indexmap::IndexSet;

use super::formula::{Atom, Formula};
use super::kb::Signature;

/// Packed literal: variable index in the high bits, sign in bit 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Lit(u32);

impl Lit {
    pub(crate) fn new(var: usize, positive: bool) -> Self {
        Lit(((var as u32) << 1) | (!positive) as u32)
    }

    pub(crate) fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub(crate) fn positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub(crate) fn negate(self) -> Self {
        Lit(self.0 ^ 1)
    }
}

/// Clause database over numbered variables. Variables `0..projected` are the
/// signature atoms; the rest are auxiliary.
#[derive(Clone, Debug)]
pub(crate) struct Cnf {
    pub(crate) vars: IndexSet<Atom>,
    pub(crate) projected: usize,
    pub(crate) clauses: Vec<Vec<Lit>>,
}

pub(crate) struct CnfBuilder {
    vars: IndexSet<Atom>,
    projected: usize,
    clauses: Vec<Vec<Lit>>,
    next_aux: usize,
    true_lit: Option<Lit>,
}

impl CnfBuilder {
    pub(crate) fn new(signature: &Signature) -> Self {
        CnfBuilder {
            vars: signature.iter().cloned().collect(),
            projected: signature.len(),
            clauses: Vec::new(),
            next_aux: 0,
            true_lit: None,
        }
    }

    fn var_of(&mut self, atom: &Atom) -> usize {
        match self.vars.get_index_of(atom) {
            Some(i) => i,
            None => self.vars.insert_full(atom.clone()).0,
        }
    }

    fn fresh(&mut self) -> Lit {
        loop {
            let atom = Atom::aux(self.next_aux);
            self.next_aux += 1;
            let (index, inserted) = self.vars.insert_full(atom);
            if inserted {
                return Lit::new(index, true);
            }
        }
    }

    pub(crate) fn push_clause(&mut self, mut clause: Vec<Lit>) {
        clause.sort_unstable();
        clause.dedup();
        if clause.windows(2).any(|w| w[0].var() == w[1].var()) {
            return; // tautology
        }
        self.clauses.push(clause);
    }

    /// Asserts `f` at the top level.
    pub(crate) fn add(&mut self, f: &Formula) {
        match f {
            Formula::Const(true) => {}
            Formula::And(fs) => fs.iter().for_each(|g| self.add(g)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Not(g) => self.add(g),
                Formula::Or(fs) => {
                    for g in fs {
                        self.add(&Formula::not(g.clone()));
                    }
                }
                Formula::Implies(l, r) => {
                    self.add(l);
                    self.add(&Formula::not(r.as_ref().clone()));
                }
                _ => self.add_clause_of(f),
            },
            _ => self.add_clause_of(f),
        }
    }

    fn add_clause_of(&mut self, f: &Formula) {
        let mut clause = Vec::new();
        if !self.disjuncts(f, true, &mut clause) {
            self.push_clause(clause);
        }
    }

    /// Flattens `f` (negated when `positive` is false) into clause literals.
    /// Returns `true` if the disjunction is trivially satisfied.
    fn disjuncts(&mut self, f: &Formula, positive: bool, out: &mut Vec<Lit>) -> bool {
        match (f, positive) {
            (Formula::Const(b), _) => *b == positive,
            (Formula::Not(g), _) => self.disjuncts(g, !positive, out),
            (Formula::Or(fs), true) | (Formula::And(fs), false) => {
                fs.iter().any(|g| self.disjuncts(g, positive, out))
            }
            (Formula::Implies(l, r), true) => {
                self.disjuncts(l, false, out) || self.disjuncts(r, true, out)
            }
            _ => {
                let lit = self.encode(f);
                out.push(if positive { lit } else { lit.negate() });
                false
            }
        }
    }

    /// A literal equivalent to `f` under the definitional clauses.
    fn encode(&mut self, f: &Formula) -> Lit {
        match f {
            Formula::Atom(a) => Lit::new(self.var_of(a), true),
            Formula::Not(g) => self.encode(g).negate(),
            Formula::Const(b) => {
                let t = match self.true_lit {
                    Some(t) => t,
                    None => {
                        let t = self.fresh();
                        self.clauses.push(vec![t]);
                        self.true_lit = Some(t);
                        t
                    }
                };
                if *b {
                    t
                } else {
                    t.negate()
                }
            }
            Formula::And(fs) => {
                let lits: Vec<Lit> = fs.iter().map(|g| self.encode(g)).collect();
                let x = self.fresh();
                let mut long = vec![x];
                for &l in &lits {
                    self.push_clause(vec![x.negate(), l]);
                    long.push(l.negate());
                }
                self.push_clause(long);
                x
            }
            Formula::Or(fs) => {
                let lits: Vec<Lit> = fs.iter().map(|g| self.encode(g)).collect();
                let x = self.fresh();
                let mut long = vec![x.negate()];
                for &l in &lits {
                    self.push_clause(vec![x, l.negate()]);
                    long.push(l);
                }
                self.push_clause(long);
                x
            }
            Formula::Implies(l, r) => {
                let a = self.encode(l);
                let b = self.encode(r);
                let x = self.fresh();
                self.push_clause(vec![x.negate(), a.negate(), b]);
                self.push_clause(vec![x, a]);
                self.push_clause(vec![x, b.negate()]);
                x
            }
            Formula::Iff(l, r) => {
                let a = self.encode(l);
                let b = self.encode(r);
                let x = self.fresh();
                self.push_clause(vec![x.negate(), a.negate(), b]);
                self.push_clause(vec![x.negate(), a, b.negate()]);
                self.push_clause(vec![x, a, b]);
                self.push_clause(vec![x, a.negate(), b.negate()]);
                x
            }
        }
    }

    pub(crate) fn finish(self) -> Cnf {
        Cnf {
            vars: self.vars,
            projected: self.projected,
            clauses: self.clauses,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

/// Clauses over named atoms plus the auxiliary atoms the conversion introduced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClauseSet {
    pub clauses: Vec<Vec<Literal>>,
    pub aux_atoms: BTreeSet<Atom>,
}

impl ClauseSet {
    /// Non-auxiliary atoms in order of first occurrence.
    pub fn source_atoms(&self) -> Signature {
        self.clauses
            .iter()
            .flatten()
            .filter(|l| !self.aux_atoms.contains(&l.atom))
            .map(|l| l.atom.clone())
            .collect()
    }

    pub(crate) fn to_cnf(&self, signature: &Signature) -> Cnf {
        let mut vars: IndexSet<Atom> = signature.iter().cloned().collect();
        let projected = vars.len();
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|l| Lit::new(vars.insert_full(l.atom.clone()).0, l.positive))
                    .collect()
            })
            .collect();
        Cnf {
            vars,
            projected,
            clauses,
        }
    }
}

/// Equisatisfiable clause form of `f`. Top-level conjunctions and clause-shaped
/// subformulas are emitted directly; other subformulas get a definitional atom.
pub fn to_cnf(f: &Formula) -> ClauseSet {
    let signature: Signature = f.atoms().into_iter().collect();
    let mut builder = CnfBuilder::new(&signature);
    builder.add(f);
    let cnf = builder.finish();
    let atom = |l: &Lit| Literal {
        atom: cnf.vars[l.var()].clone(),
        positive: l.positive(),
    };
    ClauseSet {
        clauses: cnf
            .clauses
            .iter()
            .map(|c| c.iter().map(atom).collect())
            .collect(),
        aux_atoms: cnf.vars.iter().skip(cnf.projected).cloned().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    #[test]
    fn constants() {
        let t = to_cnf(&Formula::Const(true));
        assert!(t.clauses.is_empty() && t.aux_atoms.is_empty());
        let f = to_cnf(&Formula::Const(false));
        assert_eq!(f.clauses, vec![Vec::<Literal>::new()]);
    }

    #[test]
    fn single_atom_has_no_aux() {
        let cs = to_cnf(&parse_formula("p").unwrap());
        assert!(cs.aux_atoms.is_empty());
        assert_eq!(
            cs.clauses,
            vec![vec![Literal {
                atom: Atom::new("p").unwrap(),
                positive: true
            }]]
        );
    }

    #[test]
    fn clause_shaped_formulas_are_direct() {
        let cs = to_cnf(&parse_formula("!E_0 & E_1 -> A_0").unwrap());
        assert!(cs.aux_atoms.is_empty());
        assert_eq!(cs.clauses.len(), 1);
        assert_eq!(cs.clauses[0].len(), 3);
    }

    #[test]
    fn aux_atoms_disjoint_from_source() {
        let cs = to_cnf(&parse_formula("(a & !b) | (!a & b)").unwrap());
        assert!(!cs.aux_atoms.is_empty());
        assert!(cs.aux_atoms.iter().all(|a| a.is_aux()));
        let src = cs.source_atoms();
        assert!(src.iter().all(|a| !a.is_aux()));
        assert_eq!(src.len(), 2);
    }
}
