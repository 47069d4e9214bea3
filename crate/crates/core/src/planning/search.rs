use std::collections::{HashMap, VecDeque};

use super::{apply_action, Plan, PlanningProblem, State};

/// Shortest plan by breadth-first search over fluent-set states.
///
/// Successors are generated in lexicographic action-name order, so among
/// equally short plans the lexicographically smallest one is returned.
pub fn bfs_optimal_plan(problem: &PlanningProblem) -> Option<Plan> {
    let mut actions: Vec<_> = problem.actions().iter().collect();
    actions.sort_by(|a, b| a.name.cmp(&b.name));

    let start = problem.init().clone();
    if problem.is_goal(&start) {
        return Some(Plan::default());
    }
    // state -> (parent state, action name)
    let mut parents: HashMap<State, Option<(State, String)>> = HashMap::new();
    parents.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);

    while let Some(state) = queue.pop_front() {
        for action in &actions {
            let Ok(next) = apply_action(&state, action) else {
                continue;
            };
            if parents.contains_key(&next) {
                continue;
            }
            parents.insert(next.clone(), Some((state.clone(), action.name.clone())));
            if problem.is_goal(&next) {
                let mut steps = Vec::new();
                let mut cursor = next;
                while let Some(Some((prev, name))) = parents.get(&cursor) {
                    steps.push(name.clone());
                    cursor = prev.clone();
                }
                steps.reverse();
                return Some(Plan(steps));
            }
            queue.push_back(next);
        }
    }
    None
}
