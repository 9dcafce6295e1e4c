use serde::Deserialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use wmeval_core::metrics::MetricParams;
use wmeval_core::simulator::DEFAULT_MAX_TRIGGER_DEPTH;
use wmeval_core::task::DEFAULT_MAX_STATES;
use wmeval_core::Value;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub world: PathBuf,
    pub seed: u64,
    /// Worker threads; defaults to the number of logical CPUs.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub params: MetricParams,
    pub scenario: ScenarioSpec,
    pub agents: Vec<AgentSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    /// object id → property → goal value; everything else keeps its
    /// ground-truth value.
    #[serde(default)]
    pub goal: BTreeMap<String, BTreeMap<String, Value>>,
    pub horizon: usize,
    #[serde(default = "defaults::probe_budget")]
    pub probe_budget: usize,
    #[serde(default = "defaults::episodes")]
    pub episodes: usize,
    #[serde(default = "defaults::episode_length")]
    pub episode_length: usize,
    #[serde(default = "defaults::causal_probes")]
    pub causal_probes: usize,
    #[serde(default = "defaults::skill_top_k")]
    pub skill_top_k: usize,
    #[serde(default = "defaults::max_task_states")]
    pub max_task_states: usize,
    #[serde(default = "defaults::max_trigger_depth")]
    pub max_trigger_depth: usize,
    #[serde(default = "defaults::probe_timeout_ms")]
    pub probe_timeout_ms: u64,
}

mod defaults {
    pub fn probe_budget() -> usize {
        256
    }
    pub fn episodes() -> usize {
        50
    }
    pub fn episode_length() -> usize {
        8
    }
    pub fn causal_probes() -> usize {
        20
    }
    pub fn skill_top_k() -> usize {
        1
    }
    pub fn max_task_states() -> usize {
        super::DEFAULT_MAX_STATES
    }
    pub fn max_trigger_depth() -> usize {
        super::DEFAULT_MAX_TRIGGER_DEPTH
    }
    pub fn probe_timeout_ms() -> u64 {
        5000
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Random,
    Lookup,
    Bfs,
    Greedy,
    Learning,
    /// An external process speaking the protocol on stdin/stdout.
    Remote,
    /// An agent already listening on a TCP address.
    Tcp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportKind {
    #[default]
    InProcess,
    Loopback,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub name: String,
    pub kind: AgentKind,
    #[serde(default)]
    pub transport: TransportKind,
    /// Internal model for planner agents.
    #[serde(default)]
    pub model: Option<PathBuf>,
    /// Rule budget for the learning agent; unbounded when absent.
    #[serde(default)]
    pub budget: Option<usize>,
    /// Overrides the scenario horizon for this agent's own planning.
    #[serde(default)]
    pub horizon: Option<usize>,
    /// Fixed RNG seed for a random agent; derived from the run seed and the
    /// agent's position when absent.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub command: Vec<String>,
    #[serde(default)]
    pub address: Option<String>,
}

/// A parsed config with paths resolved against its own directory.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub digest: String,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let bytes = std::fs::read(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| ConfigError::Parse { path: path.to_path_buf(), message: "not UTF-8".into() })?;
    let config: ExperimentConfig =
        toml::from_str(&text).map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let loaded = LoadedConfig { config, digest: hex::encode(Sha256::digest(&bytes)), base_dir };
    loaded.check()?;
    Ok(loaded)
}

impl LoadedConfig {
    fn check(&self) -> Result<(), ConfigError> {
        let c = &self.config;
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !self.resolve(&c.world).is_file() {
            return bad(format!("world file {} does not exist", c.world.display()));
        }
        let s = &c.scenario;
        if s.horizon == 0 {
            return bad("scenario.horizon must be at least 1".into());
        }
        if s.probe_budget == 0 || s.episodes == 0 || s.skill_top_k == 0 || s.max_trigger_depth == 0 {
            return bad("probe_budget, episodes, skill_top_k and max_trigger_depth must be at least 1".into());
        }
        if c.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if c.agents.is_empty() {
            return bad("no agents configured".into());
        }
        let mut names = std::collections::BTreeSet::new();
        for a in &c.agents {
            if !names.insert(&a.name) {
                return bad(format!("duplicate agent name `{}`", a.name));
            }
            match a.kind {
                AgentKind::Bfs | AgentKind::Greedy => match &a.model {
                    None => return bad(format!("agent `{}`: planners need a `model` world file", a.name)),
                    Some(m) if !self.resolve(m).is_file() => {
                        return bad(format!("agent `{}`: model {} does not exist", a.name, m.display()))
                    }
                    Some(_) => {}
                },
                AgentKind::Remote if a.command.is_empty() => {
                    return bad(format!("agent `{}`: remote agents need a `command`", a.name))
                }
                AgentKind::Tcp if a.address.is_none() => {
                    return bad(format!("agent `{}`: tcp agents need an `address`", a.name))
                }
                _ => {}
            }
            if a.budget == Some(0) {
                return bad(format!("agent `{}`: budget must be at least 1", a.name));
            }
            if a.horizon == Some(0) {
                return bad(format!("agent `{}`: horizon must be at least 1", a.name));
            }
        }
        Ok(())
    }
}
