//! The black-box agent contract and the reference agents.

mod learner;
mod lookup;
mod planner;
mod random;

pub use learner::LearningAgent;
pub use lookup::LookupAgent;
pub use planner::{bfs_search, goal_norm, greedy_search, BfsPlanner, GreedyPlanner};
pub use random::RandomAgent;

use crate::protocol::{answer_from_model, ProbeAnswer, ProbeQuestion};
use crate::simulator::{apply_action, ActionInvocation, Episode, PropertyChange};
use crate::worldmodel::WorldModel;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<ActionInvocation>,
    /// Deterministic planner work: candidate states expanded, at least 1.
    pub cost_units: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl Plan {
    pub fn new(steps: Vec<ActionInvocation>, cost_units: u64) -> Self {
        Self { steps, cost_units: cost_units.max(1), flags: Vec::new() }
    }
}

/// What an agent is told when asked to plan: the visible state, the goal
/// state (both without action schemas) and the invocations it may use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub state: WorldModel,
    pub goal: WorldModel,
    #[serde(default)]
    pub options: Vec<ActionInvocation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBudget")]
pub struct CapacityBudget {
    pub max_rules: usize,
}

#[derive(Deserialize)]
struct RawBudget {
    max_rules: usize,
}

impl TryFrom<RawBudget> for CapacityBudget {
    type Error = String;
    fn try_from(b: RawBudget) -> Result<Self, String> {
        CapacityBudget::new(b.max_rules)
    }
}

impl CapacityBudget {
    pub fn new(max_rules: usize) -> Result<Self, String> {
        if max_rules == 0 {
            return Err("max_rules must be at least 1".to_string());
        }
        Ok(Self { max_rules })
    }

    pub fn unbounded() -> Self {
        Self { max_rules: usize::MAX }
    }
}

/// An evaluated agent. Agents only ever see observations, plan requests,
/// prediction requests and probe questions.
pub trait Agent: Send {
    fn kind(&self) -> &str;

    fn observe(&mut self, episode: &Episode);

    fn plan_for(&mut self, request: &PlanRequest) -> Plan;

    /// Property values the agent expects to change when `invocation` is
    /// applied in `state`.
    fn predict(&mut self, state: &WorldModel, invocation: &ActionInvocation) -> Vec<PropertyChange>;

    /// The agent's current internal world model.
    fn describe(&self) -> WorldModel;

    fn answer(&mut self, question: &ProbeQuestion) -> ProbeAnswer {
        let model = self.describe();
        answer_from_model(&model, question, |state, inv| self.predict(state, inv))
    }
}

/// Prediction by simulating `invocation` on `model` synced to `state`.
pub fn model_prediction(
    model: &WorldModel,
    state: &WorldModel,
    invocation: &ActionInvocation,
    max_depth: usize,
) -> Vec<PropertyChange> {
    match apply_action(&model.synced_with(state), invocation, max_depth) {
        Ok(t) => t.changes(),
        Err(_) => Vec::new(),
    }
}
