use super::{model_prediction, Agent, Plan, PlanRequest};
use crate::simulator::{apply_action, enumerate_invocations, ActionInvocation, Episode, PropertyChange};
use crate::worldmodel::{structural_delta, NormWeights, WorldModel};
use std::collections::{HashSet, VecDeque};

/// World-norm between `goal` and `state`, ignoring action schemas: a goal
/// constrains what the world looks like, not how it works.
pub fn goal_norm(goal: &WorldModel, state: &WorldModel, weights: &NormWeights) -> f64 {
    let mut d = structural_delta(goal, state);
    d.delta_a = 0.0;
    d.norm(weights)
}

/// Successors of `state` that actually change something, in canonical
/// invocation order.
fn successors(state: &WorldModel, max_depth: usize) -> impl Iterator<Item = (ActionInvocation, WorldModel)> + '_ {
    enumerate_invocations(state).into_iter().filter_map(move |inv| match apply_action(state, &inv, max_depth) {
        Ok(t) if !t.preconditions_failed => Some((inv, t.after)),
        _ => None,
    })
}

/// Breadth-first search over `model` up to `horizon` steps.
///
/// Returns the plan whose end state is closest to `goal`. Among equally good
/// plans the shortest wins, then the lexicographically smallest; this falls
/// out of FIFO expansion in canonical order plus a strict improvement test.
pub fn bfs_search(
    model: &WorldModel,
    goal: &WorldModel,
    horizon: usize,
    weights: &NormWeights,
    max_depth: usize,
) -> Plan {
    let mut best_score = goal_norm(goal, model, weights);
    if horizon == 0 || best_score == 1.0 {
        return Plan::new(Vec::new(), 1);
    }
    let mut best: Vec<ActionInvocation> = Vec::new();
    let mut visited = HashSet::from([model.state_key()]);
    let mut queue = VecDeque::from([(model.clone(), Vec::<ActionInvocation>::new())]);
    let mut expanded = 0u64;
    while let Some((state, path)) = queue.pop_front() {
        if path.len() >= horizon {
            continue;
        }
        expanded += 1;
        for (inv, next) in successors(&state, max_depth) {
            if !visited.insert(next.state_key()) {
                continue;
            }
            let mut steps = path.clone();
            steps.push(inv);
            let score = goal_norm(goal, &next, weights);
            if score > best_score {
                best_score = score;
                best = steps.clone();
                if score == 1.0 {
                    return Plan::new(best, expanded);
                }
            }
            queue.push_back((next, steps));
        }
    }
    Plan::new(best, expanded)
}

/// Hill climbing: repeatedly take the first invocation with the best strict
/// one-step improvement; stop at a local maximum or the horizon.
pub fn greedy_search(
    model: &WorldModel,
    goal: &WorldModel,
    horizon: usize,
    weights: &NormWeights,
    max_depth: usize,
) -> Plan {
    let mut current = model.clone();
    let mut score = goal_norm(goal, &current, weights);
    let mut steps = Vec::new();
    let mut expanded = 0u64;
    while steps.len() < horizon && score < 1.0 {
        expanded += 1;
        let mut best: Option<(f64, ActionInvocation, WorldModel)> = None;
        for (inv, next) in successors(&current, max_depth) {
            let s = goal_norm(goal, &next, weights);
            if best.as_ref().map_or(s > score, |(b, _, _)| s > *b) {
                best = Some((s, inv, next));
            }
        }
        let Some((s, inv, next)) = best else { break };
        score = s;
        steps.push(inv);
        current = next;
    }
    Plan::new(steps, expanded)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Search {
    Bfs,
    Greedy,
}

/// A planner over a fixed internal model handed to it at construction.
#[derive(Debug, Clone)]
struct ModelPlanner {
    search: Search,
    model: WorldModel,
    horizon: usize,
    weights: NormWeights,
    max_depth: usize,
}

impl ModelPlanner {
    fn plan(&self, request: &PlanRequest) -> Plan {
        let internal = self.model.synced_with(&request.state);
        let f = match self.search {
            Search::Bfs => bfs_search,
            Search::Greedy => greedy_search,
        };
        f(&internal, &request.goal, self.horizon, &self.weights, self.max_depth)
    }
}

macro_rules! planner_agent {
    ($name:ident, $search:expr, $kind:literal) => {
        #[derive(Debug, Clone)]
        pub struct $name(ModelPlanner);

        impl $name {
            pub fn new(model: WorldModel, horizon: usize, weights: NormWeights, max_depth: usize) -> Self {
                Self(ModelPlanner { search: $search, model, horizon, weights, max_depth })
            }
        }

        impl Agent for $name {
            fn kind(&self) -> &str {
                $kind
            }

            fn observe(&mut self, _episode: &Episode) {}

            fn plan_for(&mut self, request: &PlanRequest) -> Plan {
                self.0.plan(request)
            }

            fn predict(&mut self, state: &WorldModel, invocation: &ActionInvocation) -> Vec<PropertyChange> {
                model_prediction(&self.0.model, state, invocation, self.0.max_depth)
            }

            fn describe(&self) -> WorldModel {
                self.0.model.clone()
            }
        }
    };
}

planner_agent!(BfsPlanner, Search::Bfs, "bfs");
planner_agent!(GreedyPlanner, Search::Greedy, "greedy");
