//! Enumerable single-step tasks: every state reachable from the ground truth
//! is an input, every well-typed invocation in that state is a candidate
//! output, and outputs are ranked by how close their outcome gets to the goal.

use crate::simulator::{apply_action, enumerate_invocations, ActionInvocation, GroundTruthWorld};
use crate::worldmodel::{structural_delta, NormWeights, WorldModel};
use std::collections::{HashSet, VecDeque};

pub const DEFAULT_MAX_STATES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TaskError {
    #[error("state space exceeds the bound of {bound} states")]
    BoundExceeded { bound: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedOutput {
    pub invocation: ActionInvocation,
    pub goal_norm: f64,
}

#[derive(Debug, Clone)]
pub struct EnumerableTask {
    /// Full goal world (ground-truth schemas with goal object values).
    pub goal: WorldModel,
    /// Full ground-truth worlds, one per input state, in discovery order.
    pub inputs: Vec<WorldModel>,
    pub weights: NormWeights,
    pub max_trigger_depth: usize,
}

impl EnumerableTask {
    /// Breadth-first closure of the ground-truth state under all invocations.
    pub fn reachable(
        truth: &GroundTruthWorld,
        goal: WorldModel,
        weights: NormWeights,
        max_states: usize,
    ) -> Result<Self, TaskError> {
        let mut seen = HashSet::new();
        let mut inputs = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(truth.world.state_key());
        queue.push_back(truth.world.clone());
        while let Some(state) = queue.pop_front() {
            for inv in enumerate_invocations(&state) {
                let Ok(t) = apply_action(&state, &inv, truth.max_trigger_depth) else { continue };
                if seen.insert(t.after.state_key()) {
                    if seen.len() > max_states {
                        return Err(TaskError::BoundExceeded { bound: max_states });
                    }
                    queue.push_back(t.after);
                }
            }
            inputs.push(state);
        }
        Ok(Self { goal, inputs, weights, max_trigger_depth: truth.max_trigger_depth })
    }

    /// A task over an explicit list of input states.
    pub fn from_inputs(inputs: Vec<WorldModel>, goal: WorldModel, weights: NormWeights, max_trigger_depth: usize) -> Self {
        Self { goal, inputs, weights, max_trigger_depth }
    }

    /// All outputs for `input`, best first; equal norms keep canonical
    /// invocation order. Divergent outputs rank last with norm 0.
    pub fn ranked_outputs(&self, input: &WorldModel) -> Vec<RankedOutput> {
        let mut ranked: Vec<RankedOutput> = enumerate_invocations(input)
            .into_iter()
            .map(|inv| {
                let goal_norm = match apply_action(input, &inv, self.max_trigger_depth) {
                    Ok(t) => structural_delta(&self.goal, &t.after).norm(&self.weights),
                    Err(_) => 0.0,
                };
                RankedOutput { invocation: inv, goal_norm }
            })
            .collect();
        // stable sort keeps enumeration (canonical) order among ties
        ranked.sort_by(|a, b| b.goal_norm.total_cmp(&a.goal_norm));
        ranked
    }
}
