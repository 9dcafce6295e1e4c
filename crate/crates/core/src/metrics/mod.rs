//! Score components, the weighted intelligence score, and the skill, causal
//! and learning measurements.

mod learning;

pub use learning::{evaluate_snapshot, measure_learning, DataBatch, LearningReport, Scenario, Snapshot};

use crate::agents::{goal_norm, Plan, PlanRequest};
use crate::protocol::{AgentSession, SessionError};
use crate::simulator::{apply_action, apply_plan, enumerate_invocations, ActionInvocation, GroundTruthWorld, StepOutcome};
use crate::task::EnumerableTask;
use crate::worldmodel::{world_norm, NormWeights, WorldError, WorldModel};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Weights of the intelligence score, plus the world-norm weights used by
/// every norm inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct MetricParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub zeta: f64,
    pub norm_weights: NormWeights,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    epsilon: f64,
    zeta: f64,
    #[serde(default)]
    norm_weights: NormWeights,
}

impl TryFrom<RawParams> for MetricParams {
    type Error = String;
    fn try_from(p: RawParams) -> Result<Self, String> {
        MetricParams::new([p.alpha, p.beta, p.gamma, p.delta, p.epsilon, p.zeta], p.norm_weights)
    }
}

impl MetricParams {
    /// `[alpha, beta, gamma, delta, epsilon, zeta]`; all finite and
    /// non-negative, gamma strictly positive.
    pub fn new(w: [f64; 6], norm_weights: NormWeights) -> Result<Self, String> {
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err("score weights must be finite and non-negative".to_string());
        }
        if w[2] == 0.0 {
            return Err("gamma must be positive".to_string());
        }
        let [alpha, beta, gamma, delta, epsilon, zeta] = w;
        Ok(Self { alpha, beta, gamma, delta, epsilon, zeta, norm_weights })
    }
}

impl Default for MetricParams {
    fn default() -> Self {
        Self::new([1.0; 6], NormWeights::default()).expect("unit weights are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreComponents {
    pub knowledge: f64,
    pub plan_quality: f64,
    pub plan_cost: u64,
    pub d_knowledge: f64,
    pub d_planning: f64,
    pub d_cost: f64,
}

/// `α·K + β·Q / (γ·cost) + δ·dK + ε·dQ − ζ·dC`, with cost floored at 1.
pub fn intelligence_score(c: &ScoreComponents, p: &MetricParams) -> f64 {
    let cost = c.plan_cost.max(1) as f64;
    p.alpha * c.knowledge + (p.beta * c.plan_quality) / (p.gamma * cost) + p.delta * c.d_knowledge
        + p.epsilon * c.d_planning
        - p.zeta * c.d_cost
}

pub fn knowledge_score(elicited: &WorldModel, truth: &GroundTruthWorld, w: &NormWeights) -> Result<f64, WorldError> {
    world_norm(elicited, &truth.world, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanningMode {
    /// The plan runs on the agent's own elicited model.
    Internal,
    /// The plan runs on the ground truth.
    Grounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanScore {
    pub plan_quality: f64,
    pub plan_cost: u64,
    /// Step at which a divergent cascade stopped evaluation; quality is
    /// then measured on the last valid state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diverged_at: Option<usize>,
    pub steps: Vec<StepOutcome>,
}

/// Runs `plan` on `world` and measures how close the end state is to `goal`.
/// Action schemas are not part of the comparison.
pub fn planning_score(plan: &Plan, world: &WorldModel, goal: &WorldModel, w: &NormWeights, max_depth: usize) -> PlanScore {
    let (end, steps, diverged_at) = match apply_plan(world, &plan.steps, max_depth) {
        Ok(o) => (o.world, o.steps, None),
        Err(e) => (*e.last_valid, e.steps, Some(e.step)),
    };
    PlanScore { plan_quality: goal_norm(goal, &end, w), plan_cost: plan.cost_units.max(1), diverged_at, steps }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkillReport {
    pub score: f64,
    pub hits: usize,
    pub inputs: usize,
}

/// Fraction of task inputs on which the first step of the agent's plan is
/// among the `top_k` best-ranked outputs. Inputs without outputs are skipped.
pub fn skill_score(session: &mut dyn AgentSession, task: &EnumerableTask, top_k: usize) -> Result<SkillReport, SessionError> {
    let goal = task.goal.state_view();
    let mut hits = 0;
    let mut inputs = 0;
    for input in &task.inputs {
        let ranked = task.ranked_outputs(input);
        if ranked.is_empty() {
            continue;
        }
        inputs += 1;
        let options = ranked.iter().map(|r| r.invocation.clone()).collect::<Vec<_>>();
        let mut sorted = options.clone();
        sorted.sort();
        let request = PlanRequest { state: input.state_view(), goal: goal.clone(), options: sorted };
        let plan = session.plan(&request)?;
        if let Some(first) = plan.steps.first() {
            if options.iter().take(top_k).any(|o| o == first) {
                hits += 1;
            }
        }
    }
    let score = if inputs == 0 { 0.0 } else { hits as f64 / inputs as f64 };
    Ok(SkillReport { score, hits, inputs })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalProbe {
    pub state: WorldModel,
    pub invocation: ActionInvocation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalReport {
    pub score: i64,
    pub correct: u64,
    pub incorrect: u64,
    pub true_changes: u64,
}

/// Correct predicted property changes minus predicted changes that do not
/// happen. Real changes the agent did not predict count zero.
pub fn causal_reasoning_score(
    session: &mut dyn AgentSession,
    truth: &GroundTruthWorld,
    probes: &[CausalProbe],
) -> Result<CausalReport, SessionError> {
    let mut r = CausalReport { score: 0, correct: 0, incorrect: 0, true_changes: 0 };
    for probe in probes {
        let actual = match apply_action(&truth.world.synced_with(&probe.state), &probe.invocation, truth.max_trigger_depth) {
            Ok(t) => t.changes(),
            Err(_) => Vec::new(),
        };
        r.true_changes += actual.len() as u64;
        let mut seen = std::collections::BTreeSet::new();
        for c in session.predict(&probe.state, &probe.invocation)? {
            if !seen.insert((c.object.clone(), c.property.clone())) {
                continue;
            }
            if actual.contains(&c) {
                r.correct += 1;
            } else {
                r.incorrect += 1;
            }
        }
    }
    r.score = r.correct as i64 - r.incorrect as i64;
    Ok(r)
}

/// A random walk from the ground-truth state; each step contributes the
/// state it was taken in and the invocation.
pub fn sample_causal_probes<R: Rng + ?Sized>(truth: &GroundTruthWorld, count: usize, rng: &mut R) -> Vec<CausalProbe> {
    let mut state = truth.world.clone();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let options = enumerate_invocations(&state);
        if options.is_empty() {
            break;
        }
        let inv = options[rng.gen_range(0..options.len())].clone();
        out.push(CausalProbe { state: state.state_view(), invocation: inv.clone() });
        if let Ok(t) = apply_action(&state, &inv, truth.max_trigger_depth) {
            state = t.after;
        }
    }
    out
}
