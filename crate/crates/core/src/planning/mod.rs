//! STRIPS planning problems, plan execution, and a breadth-first oracle.

mod search;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::encoder;
use crate::error::{Error, Result};
use crate::logic::{is_identifier, Model};

pub use search::bfs_optimal_plan;

pub type State = BTreeSet<String>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Action {
    pub name: String,
    #[serde(default)]
    pub pre: BTreeSet<String>,
    #[serde(default)]
    pub add: BTreeSet<String>,
    #[serde(default)]
    pub del: BTreeSet<String>,
}

impl Action {
    pub fn new<'a>(
        name: &str,
        pre: impl IntoIterator<Item = &'a str>,
        add: impl IntoIterator<Item = &'a str>,
        del: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        Action {
            name: name.to_string(),
            pre: pre.into_iter().map(str::to_string).collect(),
            add: add.into_iter().map(str::to_string).collect(),
            del: del.into_iter().map(str::to_string).collect(),
        }
    }

    pub fn is_applicable(&self, state: &State) -> bool {
        self.pre.is_subset(state)
    }
}

/// Why an action could not be applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inapplicable {
    pub action: String,
    pub missing: BTreeSet<String>,
}

impl fmt::Display for Inapplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let missing: Vec<_> = self.missing.iter().map(String::as_str).collect();
        write!(
            f,
            "precondition of `{}` unmet: missing {{{}}}",
            self.action,
            missing.join(", ")
        )
    }
}

/// Successor state `s ∪ add \ del`, or the unmet preconditions.
pub fn apply_action(state: &State, action: &Action) -> Result<State, Inapplicable> {
    if !action.is_applicable(state) {
        return Err(Inapplicable {
            action: action.name.clone(),
            missing: action.pre.difference(state).cloned().collect(),
        });
    }
    let mut next = state.clone();
    next.extend(action.add.iter().cloned());
    next.retain(|f| !action.del.contains(f));
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanningProblem {
    fluents: IndexSet<String>,
    actions: Vec<Action>,
    init: State,
    goal: State,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    fluents: Vec<String>,
    #[serde(default)]
    actions: Vec<Action>,
    init: Vec<String>,
    goal: Vec<String>,
}

impl PlanningProblem {
    pub fn new(
        fluents: impl IntoIterator<Item = impl Into<String>>,
        actions: Vec<Action>,
        init: impl IntoIterator<Item = impl Into<String>>,
        goal: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        let file = ProblemFile {
            fluents: fluents.into_iter().map(Into::into).collect(),
            actions,
            init: init.into_iter().map(Into::into).collect(),
            goal: goal.into_iter().map(Into::into).collect(),
        };
        Self::from_file(file)
    }

    fn from_file(file: ProblemFile) -> Result<Self> {
        let mut fluents = IndexSet::new();
        for (i, f) in file.fluents.iter().enumerate() {
            if !is_identifier(f) {
                return Err(Error::schema(
                    format!("fluents[{i}]"),
                    format!("`{f}` is not a bare identifier"),
                ));
            }
            if !fluents.insert(f.clone()) {
                return Err(Error::schema(
                    format!("fluents[{i}]"),
                    format!("duplicate fluent `{f}`"),
                ));
            }
        }
        let check = |path: String, names: &mut dyn Iterator<Item = &String>| -> Result<()> {
            for (j, name) in names.enumerate() {
                if !fluents.contains(name) {
                    return Err(Error::schema(
                        format!("{path}[{j}]"),
                        format!("unknown fluent `{name}`"),
                    ));
                }
            }
            Ok(())
        };
        check("init".into(), &mut file.init.iter())?;
        check("goal".into(), &mut file.goal.iter())?;
        let mut names = HashSet::new();
        for (i, a) in file.actions.iter().enumerate() {
            if !is_identifier(&a.name) {
                return Err(Error::schema(
                    format!("actions[{i}].name"),
                    format!("`{}` is not a bare identifier", a.name),
                ));
            }
            if !names.insert(a.name.as_str()) {
                return Err(Error::schema(
                    format!("actions[{i}].name"),
                    format!("duplicate action `{}`", a.name),
                ));
            }
            check(format!("actions[{i}].pre"), &mut a.pre.iter())?;
            check(format!("actions[{i}].add"), &mut a.add.iter())?;
            check(format!("actions[{i}].del"), &mut a.del.iter())?;
            if let Some(f) = a.add.intersection(&a.del).next() {
                return Err(Error::schema(
                    format!("actions[{i}]"),
                    format!("`{f}` is both added and deleted"),
                ));
            }
        }
        Ok(PlanningProblem {
            fluents,
            actions: file.actions,
            init: file.init.into_iter().collect(),
            goal: file.goal.into_iter().collect(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ProblemFile = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::schema(e.path().to_string(), e.inner().to_string()))?;
        Self::from_file(file)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ProblemFile {
            fluents: self.fluents.iter().cloned().collect(),
            actions: self.actions.clone(),
            init: self.init.iter().cloned().collect(),
            goal: self.goal.iter().cloned().collect(),
        })
        .expect("problem serializes")
    }

    /// Fluents in declaration order.
    pub fn fluents(&self) -> impl Iterator<Item = &str> + '_ {
        self.fluents.iter().map(String::as_str)
    }

    pub fn num_fluents(&self) -> usize {
        self.fluents.len()
    }

    /// Actions in declaration order.
    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, name: &str) -> Option<&Action> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn init(&self) -> &State {
        &self.init
    }

    pub fn goal(&self) -> &State {
        &self.goal
    }

    pub fn is_goal(&self, state: &State) -> bool {
        self.goal.is_subset(state)
    }
}

/// A sequence of action names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Plan(pub Vec<String>);

impl Plan {
    pub fn new<S: Into<String>>(steps: impl IntoIterator<Item = S>) -> Self {
        Plan(steps.into_iter().map(Into::into).collect())
    }

    pub fn steps(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::schema(e.path().to_string(), e.inner().to_string()))
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(", "))
    }
}

/// States visited by a plan, starting with the initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<State>,
}

impl Trace {
    pub fn last(&self) -> &State {
        self.states.last().expect("trace holds the initial state")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureReason {
    UnknownAction(String),
    Inapplicable(Inapplicable),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionFailure {
    pub step: usize,
    pub reason: FailureReason,
}

impl fmt::Display for ExecutionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            FailureReason::UnknownAction(name) => {
                write!(f, "step {}: unknown action `{name}`", self.step)
            }
            FailureReason::Inapplicable(why) => write!(f, "step {}: {why}", self.step),
        }
    }
}

pub fn execute_plan(problem: &PlanningProblem, plan: &Plan) -> Result<Trace, ExecutionFailure> {
    let mut states = vec![problem.init.clone()];
    for (step, name) in plan.steps().iter().enumerate() {
        let action = problem.action(name).ok_or_else(|| ExecutionFailure {
            step,
            reason: FailureReason::UnknownAction(name.clone()),
        })?;
        let next = apply_action(states.last().unwrap(), action).map_err(|e| ExecutionFailure {
            step,
            reason: FailureReason::Inapplicable(e),
        })?;
        states.push(next);
    }
    Ok(Trace { states })
}

pub fn is_valid_plan(problem: &PlanningProblem, plan: &Plan) -> bool {
    execute_plan(problem, plan).is_ok_and(|trace| problem.is_goal(trace.last()))
}

/// The total assignment over the horizon-`horizon` encoding signature that
/// executes `plan` and then idles: action atoms follow the plan, fluent atoms
/// follow the trace (held constant after the last step), and goal markers
/// record whether the goal holds at each step.
pub fn plan_trace_model(problem: &PlanningProblem, plan: &Plan, horizon: usize) -> Result<Model> {
    if plan.len() > horizon {
        return Err(Error::InvalidPlan(format!(
            "plan of length {} exceeds horizon {horizon}",
            plan.len()
        )));
    }
    let trace = execute_plan(problem, plan).map_err(|e| Error::InvalidPlan(e.to_string()))?;
    if !problem.is_goal(trace.last()) {
        return Err(Error::InvalidPlan("goal not reached".into()));
    }
    let signature = encoder::encoding_signature(problem, horizon)?;
    let mut true_atoms = BTreeSet::new();
    for t in 0..=horizon {
        let state = &trace.states[t.min(plan.len())];
        for f in state {
            true_atoms.insert(encoder::timed_atom(f, t)?);
        }
        if problem.is_goal(state) {
            true_atoms.insert(encoder::goal_atom(t));
        }
    }
    for (t, name) in plan.steps().iter().enumerate() {
        true_atoms.insert(encoder::timed_atom(name, t)?);
    }
    Model::new(signature, true_atoms)
}
