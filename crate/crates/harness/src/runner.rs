use crate::config::{AgentKind, AgentSpec, LoadedConfig, TransportKind};
use crate::report::{round_sig, AgentReport, Diagnostics, EvaluationReport, ModePair, OBSERVER_ASSUMPTION, REPORT_FORMAT_VERSION};
use anyhow::{anyhow, Context as _};
use rayon::prelude::*;
use std::time::Duration;
use wmeval_core::agents::{
    Agent, BfsPlanner, CapacityBudget, GreedyPlanner, LearningAgent, LookupAgent, RandomAgent,
};
use wmeval_core::metrics::{
    causal_reasoning_score, intelligence_score, measure_learning, sample_causal_probes, skill_score, CausalProbe,
    DataBatch, MetricParams, PlanningMode, Scenario, ScoreComponents,
};
use wmeval_core::protocol::{
    AgentSession, InProcessSession, LoopbackTransport, ProbePlan, ProtocolClient, SessionError, StreamTransport,
};
use wmeval_core::rng::{agent_seed, stream, STREAM_BATCH, STREAM_CAUSAL};
use wmeval_core::simulator::{sample_batch, GroundTruthWorld};
use wmeval_core::task::EnumerableTask;
use wmeval_core::worldmodel::load_world_file;
use wmeval_core::{NormWeights, WorldModel};

/// Everything shared by all agents of one run. Built once, read-only.
pub struct Context {
    pub truth: GroundTruthWorld,
    pub goal: WorldModel,
    pub task: EnumerableTask,
    pub batch: DataBatch,
    pub probes: Vec<CausalProbe>,
    pub params: MetricParams,
    pub horizon: usize,
    pub probe_budget: usize,
    pub top_k: usize,
    pub probe_timeout: Duration,
}

impl Context {
    pub fn new(cfg: &LoadedConfig) -> anyhow::Result<Self> {
        let c = &cfg.config;
        let s = &c.scenario;
        let path = cfg.resolve(&c.world);
        let world = load_world_file(&path).with_context(|| format!("loading world {}", path.display()))?;
        let truth = GroundTruthWorld::with_depth(world, c.seed, s.max_trigger_depth)?;
        let goal = truth.world.with_overrides(&s.goal).context("scenario goal")?;
        let weights = c.params.norm_weights;
        let task = EnumerableTask::reachable(&truth, goal.clone(), weights, s.max_task_states)?;
        let episodes = sample_batch(&truth, s.episodes, s.episode_length, &mut stream(c.seed, STREAM_BATCH));
        let batch = DataBatch::new(episodes).map_err(|e| anyhow!(e))?;
        let probes = sample_causal_probes(&truth, s.causal_probes, &mut stream(c.seed, STREAM_CAUSAL));
        Ok(Self {
            truth,
            goal,
            task,
            batch,
            probes,
            params: c.params,
            horizon: s.horizon,
            probe_budget: s.probe_budget,
            top_k: s.skill_top_k,
            probe_timeout: Duration::from_millis(s.probe_timeout_ms),
        })
    }

    pub fn scenario(&self) -> Scenario<'_> {
        Scenario {
            truth: &self.truth,
            goal: self.goal.clone(),
            horizon: self.horizon,
            probes: ProbePlan { budget: self.probe_budget, predictions: Vec::new() },
            weights: self.params.norm_weights,
        }
    }
}

/// Parameters for building a reference agent outside of a full run.
pub struct AgentRecipe<'a> {
    pub kind: AgentKind,
    pub seed: u64,
    pub horizon: usize,
    pub weights: NormWeights,
    pub max_depth: usize,
    pub model: Option<WorldModel>,
    pub budget: Option<usize>,
    pub task: Option<&'a EnumerableTask>,
}

pub fn build_agent(r: AgentRecipe) -> anyhow::Result<Box<dyn Agent>> {
    let model = || r.model.clone().ok_or_else(|| anyhow!("planner agents need a model world"));
    Ok(match r.kind {
        AgentKind::Random => Box::new(RandomAgent::new(r.seed, r.horizon)),
        AgentKind::Lookup => Box::new(LookupAgent::new(r.task.ok_or_else(|| anyhow!("lookup agents need a task"))?)),
        AgentKind::Bfs => Box::new(BfsPlanner::new(model()?, r.horizon, r.weights, r.max_depth)),
        AgentKind::Greedy => Box::new(GreedyPlanner::new(model()?, r.horizon, r.weights, r.max_depth)),
        AgentKind::Learning => {
            let budget = match r.budget {
                Some(n) => CapacityBudget::new(n).map_err(|e| anyhow!(e))?,
                None => CapacityBudget::unbounded(),
            };
            Box::new(LearningAgent::new(budget, r.horizon, r.weights, r.max_depth))
        }
        AgentKind::Remote | AgentKind::Tcp => return Err(anyhow!("not a reference agent")),
    })
}

fn open_session(cfg: &LoadedConfig, ctx: &Context, spec: &AgentSpec, index: usize) -> anyhow::Result<Box<dyn AgentSession>> {
    let session_id = format!("{}-{}", spec.name, index);
    let timeout = Some(ctx.probe_timeout);
    match spec.kind {
        AgentKind::Remote => {
            let t = StreamTransport::spawn(&spec.command)?;
            return Ok(Box::new(ProtocolClient::connect(t, session_id, timeout)?));
        }
        AgentKind::Tcp => {
            let t = StreamTransport::connect(spec.address.as_deref().unwrap_or_default())?;
            return Ok(Box::new(ProtocolClient::connect(t, session_id, timeout)?));
        }
        _ => {}
    }
    let model = match &spec.model {
        Some(p) => {
            let path = cfg.resolve(p);
            Some(load_world_file(&path).with_context(|| format!("loading model {}", path.display()))?)
        }
        None => None,
    };
    let agent = build_agent(AgentRecipe {
        kind: spec.kind,
        seed: spec.seed.unwrap_or_else(|| agent_seed(cfg.config.seed, index)),
        horizon: spec.horizon.unwrap_or(ctx.horizon),
        weights: ctx.params.norm_weights,
        max_depth: ctx.truth.max_trigger_depth,
        model,
        budget: spec.budget,
        task: Some(&ctx.task),
    })?;
    Ok(match spec.transport {
        TransportKind::InProcess => Box::new(InProcessSession::new(agent)),
        TransportKind::Loopback => Box::new(ProtocolClient::connect(LoopbackTransport::new(agent), session_id, timeout)?),
    })
}

fn rounded(c: ScoreComponents) -> ScoreComponents {
    ScoreComponents {
        knowledge: round_sig(c.knowledge),
        plan_quality: round_sig(c.plan_quality),
        plan_cost: c.plan_cost,
        d_knowledge: round_sig(c.d_knowledge),
        d_planning: round_sig(c.d_planning),
        d_cost: round_sig(c.d_cost),
    }
}

/// Runs every phase for one agent: learning (which includes elicitation and
/// planning before and after the batch), skill, then causal reasoning.
pub fn evaluate_agent(cfg: &LoadedConfig, ctx: &Context, spec: &AgentSpec, index: usize) -> AgentReport {
    let mut report = AgentReport::new(spec);
    let mut session = match open_session(cfg, ctx, spec, index) {
        Ok(s) => s,
        Err(e) => return report.failed(format!("{e:#}")),
    };
    let result = (|| -> Result<(), SessionError> {
        let learning = measure_learning(session.as_mut(), &ctx.batch, &ctx.scenario())?;
        let skill = skill_score(session.as_mut(), &ctx.task, ctx.top_k)?;
        let causal = causal_reasoning_score(session.as_mut(), &ctx.truth, &ctx.probes)?;
        let internal = rounded(learning.components(PlanningMode::Internal));
        let grounded = rounded(learning.components(PlanningMode::Grounded));
        report.intelligence = Some(ModePair {
            internal: round_sig(intelligence_score(&internal, &ctx.params)),
            grounded: round_sig(intelligence_score(&grounded, &ctx.params)),
        });
        report.components = Some(ModePair { internal, grounded });
        report.skill = Some(skill);
        report.causal = Some(causal);
        report.diagnostics = Some(Diagnostics::from_learning(&learning));
        Ok(())
    })();
    let closed = session.shutdown();
    match result.and(closed) {
        Ok(()) => report,
        Err(e) => report.failed(e.to_string()),
    }
}

pub fn run_experiment(cfg: &LoadedConfig) -> anyhow::Result<EvaluationReport> {
    let ctx = Context::new(cfg)?;
    let c = &cfg.config;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = c.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    let agents: Vec<AgentReport> = pool.install(|| {
        c.agents
            .par_iter()
            .enumerate()
            .map(|(i, spec)| {
                log::info!("evaluating agent `{}`", spec.name);
                evaluate_agent(cfg, &ctx, spec, i)
            })
            .collect()
    });
    Ok(EvaluationReport {
        format_version: REPORT_FORMAT_VERSION,
        observer: OBSERVER_ASSUMPTION.to_string(),
        config_digest: cfg.digest.clone(),
        seed: c.seed,
        world: c.world.display().to_string(),
        params: c.params,
        task_inputs: ctx.task.inputs.len(),
        batch_episodes: ctx.batch.size(),
        agents,
    })
}
