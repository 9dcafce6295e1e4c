use crate::config::{AgentKind, AgentSpec, TransportKind};
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;
use std::path::Path;
use wmeval_core::metrics::{CausalReport, LearningReport, MetricParams, PlanningMode, ScoreComponents, SkillReport};
use wmeval_core::simulator::StepOutcome;

pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const OBSERVER_ASSUMPTION: &str =
    "omniscient observer: knowledge and planning are scored against the full ground-truth world";

/// Rounds to 12 significant digits so reports do not depend on the last
/// bits of platform float formatting.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePair<T> {
    pub internal: T,
    pub grounded: T,
}

impl<T> ModePair<T> {
    pub fn get(&self, mode: PlanningMode) -> &T {
        match mode {
            PlanningMode::Internal => &self.internal,
            PlanningMode::Grounded => &self.grounded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub knowledge_before: f64,
    pub probes_issued: usize,
    pub probes_unanswered: usize,
    pub dropped_entries: Vec<String>,
    pub plan: Vec<String>,
    pub plan_flags: Vec<String>,
    pub steps_internal: Vec<StepOutcome>,
    pub steps_grounded: Vec<StepOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diverged_internal: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diverged_grounded: Option<usize>,
}

impl Diagnostics {
    pub fn from_learning(l: &LearningReport) -> Self {
        let a = &l.after;
        Self {
            knowledge_before: round_sig(l.before.knowledge),
            probes_issued: a.elicitation.issued,
            probes_unanswered: a.elicitation.unanswered,
            dropped_entries: a.elicitation.dropped.iter().map(|v| v.to_string()).collect(),
            plan: a.plan.steps.iter().map(|s| s.to_string()).collect(),
            plan_flags: a.plan.flags.clone(),
            steps_internal: a.internal.steps.clone(),
            steps_grounded: a.grounded.steps.clone(),
            diverged_internal: a.internal.diverged_at,
            diverged_grounded: a.grounded.diverged_at,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentReport {
    pub name: String,
    pub kind: String,
    pub transport: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<ModePair<ScoreComponents>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intelligence: Option<ModePair<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skill: Option<SkillReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub causal: Option<CausalReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

impl AgentReport {
    pub fn new(spec: &AgentSpec) -> Self {
        let kind = match spec.kind {
            AgentKind::Random => "random",
            AgentKind::Lookup => "lookup",
            AgentKind::Bfs => "bfs",
            AgentKind::Greedy => "greedy",
            AgentKind::Learning => "learning",
            AgentKind::Remote => "remote",
            AgentKind::Tcp => "tcp",
        };
        let transport = match (spec.kind, spec.transport) {
            (AgentKind::Remote, _) => "stdio",
            (AgentKind::Tcp, _) => "tcp",
            (_, TransportKind::InProcess) => "in_process",
            (_, TransportKind::Loopback) => "loopback",
        };
        Self {
            name: spec.name.clone(),
            kind: kind.to_string(),
            transport: transport.to_string(),
            status: Status::Ok,
            error: None,
            components: None,
            intelligence: None,
            skill: None,
            causal: None,
            diagnostics: None,
        }
    }

    /// Drops any partial results: a failed session has no scores.
    pub fn failed(self, error: String) -> Self {
        Self {
            status: Status::Failed,
            error: Some(error),
            components: None,
            intelligence: None,
            skill: None,
            causal: None,
            diagnostics: None,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub format_version: u32,
    pub observer: String,
    pub config_digest: String,
    pub seed: u64,
    pub world: String,
    pub params: MetricParams,
    pub task_inputs: usize,
    pub batch_episodes: usize,
    pub agents: Vec<AgentReport>,
}

fn round_json(v: &mut Json) {
    match v {
        Json::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map(Json::Number).unwrap_or(Json::Null);
        }
        Json::Array(items) => items.iter_mut().for_each(round_json),
        Json::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

impl EvaluationReport {
    pub fn any_failed(&self) -> bool {
        self.agents.iter().any(|a| a.status == Status::Failed)
    }

    /// Pretty JSON with sorted keys and every float rounded to 12
    /// significant digits.
    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        round_json(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "agent", "kind", "transport", "status", "mode", "knowledge", "plan_quality", "plan_cost", "d_knowledge",
            "d_planning", "d_cost", "intelligence", "skill", "causal",
        ])?;
        for a in &self.agents {
            let (Some(c), Some(i)) = (&a.components, &a.intelligence) else {
                w.write_record([a.name.as_str(), &a.kind, &a.transport, "failed", "", "", "", "", "", "", "", "", "", ""])?;
                continue;
            };
            for (mode, label) in [(PlanningMode::Internal, "internal"), (PlanningMode::Grounded, "grounded")] {
                let c = c.get(mode);
                let num = |x: f64| format!("{}", round_sig(x));
                w.write_record([
                    a.name.clone(),
                    a.kind.clone(),
                    a.transport.clone(),
                    "ok".to_string(),
                    label.to_string(),
                    num(c.knowledge),
                    num(c.plan_quality),
                    c.plan_cost.to_string(),
                    num(c.d_knowledge),
                    num(c.d_planning),
                    num(c.d_cost),
                    num(*i.get(mode)),
                    a.skill.map(|s| num(s.score)).unwrap_or_default(),
                    a.causal.map(|s| s.score.to_string()).unwrap_or_default(),
                ])?;
            }
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        std::fs::write(dir.join("scores.csv"), self.to_csv()?)?;
        Ok(())
    }
}
