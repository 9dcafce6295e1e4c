use super::{planning_score, PlanScore, PlanningMode, ScoreComponents};
use crate::agents::{Plan, PlanRequest};
use crate::protocol::{elicit_world_model, AgentSession, Elicitation, ProbePlan, SessionError};
use crate::simulator::{enumerate_invocations, Episode, GroundTruthWorld};
use crate::worldmodel::{structural_delta, NormWeights, WorldModel};

pub const TRUNCATED_FLAG: &str = "truncated";

#[derive(Debug, Clone, PartialEq)]
pub struct DataBatch {
    episodes: Vec<Episode>,
}

impl DataBatch {
    pub fn new(episodes: Vec<Episode>) -> Result<Self, String> {
        if episodes.is_empty() {
            return Err("a data batch needs at least one episode".to_string());
        }
        Ok(Self { episodes })
    }

    pub fn episodes(&self) -> &[Episode] {
        &self.episodes
    }

    pub fn size(&self) -> usize {
        self.episodes.len()
    }
}

/// Fixed evaluation conditions, held out from any training data.
#[derive(Debug, Clone)]
pub struct Scenario<'a> {
    pub truth: &'a GroundTruthWorld,
    /// Full goal world: ground-truth schemas with goal object values.
    pub goal: WorldModel,
    pub horizon: usize,
    pub probes: ProbePlan,
    pub weights: NormWeights,
}

/// Everything measured about an agent at one point in time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub knowledge: f64,
    pub elicitation: Elicitation,
    pub plan: Plan,
    pub internal: PlanScore,
    pub grounded: PlanScore,
}

impl Snapshot {
    pub fn planning(&self, mode: PlanningMode) -> &PlanScore {
        match mode {
            PlanningMode::Internal => &self.internal,
            PlanningMode::Grounded => &self.grounded,
        }
    }
}

/// Elicits the agent's model, then asks for a plan from the ground-truth
/// state to the goal and scores it in both planning modes.
pub fn evaluate_snapshot(session: &mut dyn AgentSession, scenario: &Scenario) -> Result<Snapshot, SessionError> {
    let truth = scenario.truth;
    let elicitation = elicit_world_model(session, &scenario.probes)?;
    // both worlds are valid here: the truth by construction, the elicited
    // model because elicitation prunes it
    let knowledge = structural_delta(&elicitation.world, &truth.world).norm(&scenario.weights);
    let state = truth.world.state_view();
    let request = PlanRequest {
        state: state.clone(),
        goal: scenario.goal.state_view(),
        options: enumerate_invocations(&truth.world),
    };
    let mut plan = session.plan(&request)?;
    if plan.steps.len() > scenario.horizon {
        plan.steps.truncate(scenario.horizon);
        plan.flags.push(TRUNCATED_FLAG.to_string());
    }
    let depth = truth.max_trigger_depth;
    let internal_world = elicitation.world.synced_with(&state);
    let internal = planning_score(&plan, &internal_world, &scenario.goal, &scenario.weights, depth);
    let grounded = planning_score(&plan, &truth.world, &scenario.goal, &scenario.weights, depth);
    Ok(Snapshot { knowledge, elicitation, plan, internal, grounded })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningReport {
    pub before: Snapshot,
    pub after: Snapshot,
    pub batch_size: usize,
}

impl LearningReport {
    /// `(d_knowledge, d_planning, d_cost)`: forward differences per episode.
    pub fn derivatives(&self, mode: PlanningMode) -> (f64, f64, f64) {
        let n = self.batch_size as f64;
        let (b, a) = (self.before.planning(mode), self.after.planning(mode));
        (
            (self.after.knowledge - self.before.knowledge) / n,
            (a.plan_quality - b.plan_quality) / n,
            (a.plan_cost as f64 - b.plan_cost as f64) / n,
        )
    }

    /// Components of the post-exposure snapshot with the derivatives.
    pub fn components(&self, mode: PlanningMode) -> ScoreComponents {
        let (d_knowledge, d_planning, d_cost) = self.derivatives(mode);
        let p = self.after.planning(mode);
        ScoreComponents {
            knowledge: self.after.knowledge,
            plan_quality: p.plan_quality,
            plan_cost: p.plan_cost,
            d_knowledge,
            d_planning,
            d_cost,
        }
    }
}

/// Snapshot, feed the batch through `observe`, snapshot again.
pub fn measure_learning(
    session: &mut dyn AgentSession,
    batch: &DataBatch,
    scenario: &Scenario,
) -> Result<LearningReport, SessionError> {
    let before = evaluate_snapshot(session, scenario)?;
    for ep in batch.episodes() {
        session.observe(ep)?;
    }
    let after = evaluate_snapshot(session, scenario)?;
    Ok(LearningReport { before, after, batch_size: batch.size() })
}
