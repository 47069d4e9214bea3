//! Bounded planning as propositional satisfiability.
//!
//! For horizon `n` the encoding has one atom `f_t` per fluent and step
//! `t ∈ 0..=n`, one atom `a_t` per action and step `t ∈ 0..n`, and a goal
//! marker `goal_t` defined as the conjunction of the goal fluents at `t`.
//! Every knowledge-base entry is labelled with its axiom family:
//!
//! | label              | axiom                                   |
//! |--------------------|-----------------------------------------|
//! | `init:f`           | `f_0` or `!f_0`                         |
//! | `goal:f`           | `f_n` (only with the goal clause)       |
//! | `pre:a:t`          | `a_t -> ⋀ pre_t`                        |
//! | `addEff:a:t`       | `a_t -> ⋀ add_{t+1}`                    |
//! | `delEff:a:t`       | `a_t -> ⋀ !del_{t+1}`                   |
//! | `frameAdd:f:t`     | `!f_t & f_{t+1} -> ⋁ adders_t`          |
//! | `frameDel:f:t`     | `f_t & !f_{t+1} -> ⋁ deleters_t`        |
//! | `exclusion:a:b:t`  | `!a_t | !b_t`                           |
//! | `goalDef:t`        | `goal_t <-> ⋀ goal fluents at t`        |
//!
//! Action-free steps are allowed; the frame axioms turn them into no-ops.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::logic::{is_satisfiable, Atom, Formula, KbEntry, KnowledgeBase, Model, Signature};
use crate::planning::{Plan, PlanningProblem};

pub const GOAL_MARKER: &str = "goal";

/// `<name>_<t>`.
pub fn timed_atom(name: &str, t: usize) -> Result<Atom> {
    Atom::timed(name, t)
}

pub fn goal_atom(t: usize) -> Atom {
    Atom::timed(GOAL_MARKER, t).expect("goal marker is a valid atom")
}

fn check_names(problem: &PlanningProblem) -> Result<()> {
    for f in problem.fluents() {
        if f == GOAL_MARKER {
            return Err(Error::ReservedName(f.to_string()));
        }
    }
    for a in problem.actions() {
        if a.name == GOAL_MARKER {
            return Err(Error::ReservedName(a.name.clone()));
        }
        if problem.fluents().any(|f| f == a.name) {
            return Err(Error::NameCollision(a.name.clone()));
        }
    }
    Ok(())
}

/// The atom universe of the horizon-`n` encoding: fluents and actions
/// interleaved by step, then the goal markers.
pub fn encoding_signature(problem: &PlanningProblem, horizon: usize) -> Result<Signature> {
    check_names(problem)?;
    let mut sig = Signature::new();
    for t in 0..=horizon {
        for f in problem.fluents() {
            sig.insert(timed_atom(f, t)?);
        }
        if t < horizon {
            for a in problem.actions() {
                sig.insert(timed_atom(&a.name, t)?);
            }
        }
    }
    for t in 0..=horizon {
        sig.insert(goal_atom(t));
    }
    Ok(sig)
}

#[derive(Clone, Debug)]
pub struct BoundedEncoding {
    kb: KnowledgeBase,
    horizon: usize,
    actions: Vec<String>,
    action_atoms: BTreeMap<(String, usize), Atom>,
    fluent_atoms: BTreeMap<(String, usize), Atom>,
    goal_atoms: Vec<Atom>,
    includes_goal_clause: bool,
}

impl BoundedEncoding {
    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn includes_goal_clause(&self) -> bool {
        self.includes_goal_clause
    }

    /// Action names in declaration order.
    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_atom(&self, action: &str, t: usize) -> Option<&Atom> {
        self.action_atoms.get(&(action.to_string(), t))
    }

    pub fn fluent_atom(&self, fluent: &str, t: usize) -> Option<&Atom> {
        self.fluent_atoms.get(&(fluent.to_string(), t))
    }

    pub fn goal_atoms(&self) -> &[Atom] {
        &self.goal_atoms
    }

    /// The `goalDef:t` entries.
    pub fn goal_definitions(&self) -> Vec<KbEntry> {
        self.kb
            .entries()
            .iter()
            .filter(|e| e.label.starts_with("goalDef:"))
            .cloned()
            .collect()
    }

    pub fn is_satisfiable(&self) -> bool {
        is_satisfiable(self.kb.signature(), self.kb.formulas())
    }
}

/// Compiles `(problem, horizon)` into a labelled knowledge base.
pub fn encode_bounded(
    problem: &PlanningProblem,
    horizon: usize,
    with_goal_clause: bool,
) -> Result<BoundedEncoding> {
    let signature = encoding_signature(problem, horizon)?;
    let mut fluent_atoms = BTreeMap::new();
    for f in problem.fluents() {
        for t in 0..=horizon {
            fluent_atoms.insert((f.to_string(), t), timed_atom(f, t)?);
        }
    }
    let mut action_atoms = BTreeMap::new();
    for a in problem.actions() {
        for t in 0..horizon {
            action_atoms.insert((a.name.clone(), t), timed_atom(&a.name, t)?);
        }
    }
    let goal_atoms: Vec<Atom> = (0..=horizon).map(goal_atom).collect();

    let fl = |f: &str, t: usize| Formula::Atom(fluent_atoms[&(f.to_string(), t)].clone());
    let act = |a: &str, t: usize| Formula::Atom(action_atoms[&(a.to_string(), t)].clone());
    let mut entries = Vec::new();

    for f in problem.fluents() {
        let value = problem.init().contains(f);
        entries.push(KbEntry::new(
            format!("init:{f}"),
            Formula::lit(fluent_atoms[&(f.to_string(), 0)].clone(), value),
        ));
    }
    if with_goal_clause {
        for f in problem.fluents().filter(|f| problem.goal().contains(*f)) {
            entries.push(KbEntry::new(format!("goal:{f}"), fl(f, horizon)));
        }
    }
    for t in 0..horizon {
        for a in problem.actions() {
            let name = &a.name;
            if !a.pre.is_empty() {
                entries.push(KbEntry::new(
                    format!("pre:{name}:{t}"),
                    Formula::implies(act(name, t), Formula::and(a.pre.iter().map(|f| fl(f, t)))),
                ));
            }
            if !a.add.is_empty() {
                entries.push(KbEntry::new(
                    format!("addEff:{name}:{t}"),
                    Formula::implies(
                        act(name, t),
                        Formula::and(a.add.iter().map(|f| fl(f, t + 1))),
                    ),
                ));
            }
            if !a.del.is_empty() {
                entries.push(KbEntry::new(
                    format!("delEff:{name}:{t}"),
                    Formula::implies(
                        act(name, t),
                        Formula::and(a.del.iter().map(|f| Formula::not(fl(f, t + 1)))),
                    ),
                ));
            }
        }
        for f in problem.fluents() {
            let adders = problem
                .actions()
                .iter()
                .filter(|a| a.add.contains(f))
                .map(|a| act(&a.name, t));
            entries.push(KbEntry::new(
                format!("frameAdd:{f}:{t}"),
                Formula::implies(
                    Formula::And(vec![Formula::not(fl(f, t)), fl(f, t + 1)]),
                    Formula::or(adders),
                ),
            ));
            let deleters = problem
                .actions()
                .iter()
                .filter(|a| a.del.contains(f))
                .map(|a| act(&a.name, t));
            entries.push(KbEntry::new(
                format!("frameDel:{f}:{t}"),
                Formula::implies(
                    Formula::And(vec![fl(f, t), Formula::not(fl(f, t + 1))]),
                    Formula::or(deleters),
                ),
            ));
        }
        let actions = problem.actions();
        for (i, a) in actions.iter().enumerate() {
            for b in &actions[i + 1..] {
                entries.push(KbEntry::new(
                    format!("exclusion:{}:{}:{t}", a.name, b.name),
                    Formula::Or(vec![
                        Formula::not(act(&a.name, t)),
                        Formula::not(act(&b.name, t)),
                    ]),
                ));
            }
        }
    }
    for (t, marker) in goal_atoms.iter().enumerate() {
        let fluents = problem
            .fluents()
            .filter(|f| problem.goal().contains(*f))
            .map(|f| fl(f, t));
        entries.push(KbEntry::new(
            format!("goalDef:{t}"),
            Formula::iff(Formula::Atom(marker.clone()), Formula::and(fluents)),
        ));
    }

    Ok(BoundedEncoding {
        kb: KnowledgeBase::new(signature, entries)?,
        horizon,
        actions: problem.actions().iter().map(|a| a.name.clone()).collect(),
        action_atoms,
        fluent_atoms,
        goal_atoms,
        includes_goal_clause: with_goal_clause,
    })
}

/// Reads the plan off a model of the encoding, skipping action-free steps.
pub fn extract_plan(enc: &BoundedEncoding, model: &Model) -> Result<Plan> {
    if let Some(e) = enc
        .kb
        .entries()
        .iter()
        .find(|e| !model.satisfies(&e.formula))
    {
        return Err(Error::ModelMismatch(e.label.clone()));
    }
    let mut steps = Vec::new();
    for t in 0..enc.horizon {
        let mut chosen = enc
            .actions
            .iter()
            .filter(|a| model.value(&enc.action_atoms[&((*a).clone(), t)]));
        if let Some(a) = chosen.next() {
            steps.push(a.clone());
        }
    }
    Ok(Plan(steps))
}

/// `⋀ π[t]_t ∧ ⋀_{|π| ≤ t < n} ⋀_a ¬a_t ∧ goal_n`: the plan itself, idle
/// trailing steps, and the goal at the horizon.
pub fn validity_query(enc: &BoundedEncoding, plan: &Plan) -> Result<Formula> {
    if plan.len() > enc.horizon {
        return Err(Error::InvalidPlan(format!(
            "plan of length {} exceeds horizon {}",
            plan.len(),
            enc.horizon
        )));
    }
    let mut parts = Vec::new();
    for (t, name) in plan.steps().iter().enumerate() {
        let atom = enc
            .action_atom(name, t)
            .ok_or_else(|| Error::UnknownAction(name.clone()))?;
        parts.push(Formula::Atom(atom.clone()));
    }
    for t in plan.len()..enc.horizon {
        for a in &enc.actions {
            parts.push(Formula::not(Formula::Atom(
                enc.action_atoms[&(a.clone(), t)].clone(),
            )));
        }
    }
    parts.push(Formula::Atom(enc.goal_atoms[enc.horizon].clone()));
    Ok(Formula::and(parts))
}

/// `⋀_{t<n} ¬goal_t`; the empty conjunction `true` at horizon 0.
pub fn optimality_query(enc: &BoundedEncoding) -> Formula {
    Formula::and(
        enc.goal_atoms[..enc.horizon]
            .iter()
            .map(|g| Formula::not(Formula::Atom(g.clone()))),
    )
}

/// Iterative deepening over the horizon; the first satisfiable encoding
/// yields a plan of minimal length.
pub fn solve_with_deepening(
    problem: &PlanningProblem,
    max_horizon: usize,
) -> Result<Option<(Plan, usize)>> {
    for n in 0..=max_horizon {
        let enc = encode_bounded(problem, n, true)?;
        if let Some(model) = crate::logic::satisfy(enc.kb.signature(), enc.kb.formulas()) {
            return Ok(Some((extract_plan(&enc, &model)?, n)));
        }
    }
    Ok(None)
}
