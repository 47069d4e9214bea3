//! Plain DPLL: unit propagation, pure-literal elimination, and chronological
//! branching on the lowest-numbered open variable, trying `true` first.

use super::cnf::{Cnf, Lit};

type Assignment = Vec<Option<bool>>;

struct Search<'a> {
    clauses: &'a [Vec<Lit>],
    num_vars: usize,
}

impl Search<'_> {
    /// Simplifies `assign` to a fixpoint. `None` signals a conflict; otherwise
    /// returns the lowest open variable occurring in an unsatisfied clause.
    fn propagate(&self, assign: &mut Assignment) -> Option<Option<usize>> {
        let mut pos = vec![false; self.num_vars];
        let mut neg = vec![false; self.num_vars];
        loop {
            pos.iter_mut().for_each(|x| *x = false);
            neg.iter_mut().for_each(|x| *x = false);
            let mut changed = false;
            let mut open_clauses = false;
            for clause in self.clauses {
                let mut satisfied = false;
                let mut open = 0;
                let mut last = None;
                for &l in clause {
                    match assign[l.var()] {
                        Some(v) if v == l.positive() => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            open += 1;
                            last = Some(l);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match (open, last) {
                    (0, _) => return None,
                    (1, Some(l)) => {
                        assign[l.var()] = Some(l.positive());
                        changed = true;
                    }
                    _ => {
                        open_clauses = true;
                        for &l in clause {
                            if assign[l.var()].is_none() {
                                if l.positive() {
                                    pos[l.var()] = true;
                                } else {
                                    neg[l.var()] = true;
                                }
                            }
                        }
                    }
                }
            }
            if changed {
                continue;
            }
            if !open_clauses {
                return Some(None);
            }
            for v in 0..self.num_vars {
                if assign[v].is_none() && pos[v] != neg[v] {
                    assign[v] = Some(pos[v]);
                    changed = true;
                }
            }
            if !changed {
                return Some((0..self.num_vars).find(|&v| assign[v].is_none() && pos[v]));
            }
        }
    }

    fn run(&self, assign: &mut Assignment) -> bool {
        let branch = match self.propagate(assign) {
            None => return false,
            Some(None) => return true,
            Some(Some(v)) => v,
        };
        for value in [true, false] {
            let mut next = assign.clone();
            next[branch] = Some(value);
            if self.run(&mut next) {
                *assign = next;
                return true;
            }
        }
        false
    }
}

/// A total assignment satisfying `clauses`, or `None` if unsatisfiable.
/// Variables left open by the search are set to false.
pub(crate) fn solve_clauses(num_vars: usize, clauses: &[Vec<Lit>]) -> Option<Vec<bool>> {
    let search = Search { clauses, num_vars };
    let mut assign = vec![None; num_vars];
    search
        .run(&mut assign)
        .then(|| assign.into_iter().map(|v| v.unwrap_or(false)).collect())
}

pub(crate) fn solve(cnf: &Cnf) -> Option<Vec<bool>> {
    solve_clauses(cnf.vars.len(), &cnf.clauses)
}

/// All assignments to the projected variables that extend to a full model,
/// each reported once. Stops early and returns `None` once `limit` models
/// have been exceeded.
pub(crate) fn enumerate_projected(cnf: &Cnf, limit: Option<usize>) -> Option<Vec<Vec<bool>>> {
    let search = Search {
        clauses: &cnf.clauses,
        num_vars: cnf.vars.len(),
    };
    let mut out = Vec::new();
    let mut prefix = vec![None; cnf.vars.len()];
    search
        .split(&mut prefix, 0, cnf.projected, limit, &mut out)
        .then_some(out)
}

impl Search<'_> {
    /// Depth-first over the projected variables, pruning prefixes with no
    /// extension. `false` once the limit is exceeded.
    fn split(
        &self,
        prefix: &mut Assignment,
        var: usize,
        projected: usize,
        limit: Option<usize>,
        out: &mut Vec<Vec<bool>>,
    ) -> bool {
        if !self.run(&mut prefix.clone()) {
            return true;
        }
        if var == projected {
            out.push(
                prefix[..projected]
                    .iter()
                    .map(|v| v.unwrap_or(false))
                    .collect(),
            );
            return !limit.is_some_and(|l| out.len() > l);
        }
        for value in [false, true] {
            prefix[var] = Some(value);
            if !self.split(prefix, var + 1, projected, limit, out) {
                return false;
            }
        }
        prefix[var] = None;
        true
    }
}
