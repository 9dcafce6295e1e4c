//! Re-weighting stored components without re-running any agent.

use crate::report::{round_sig, EvaluationReport, ModePair};
use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use std::path::Path;
use wmeval_core::metrics::{intelligence_score, MetricParams, ScoreComponents};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OfflineScore {
    pub name: String,
    pub intelligence: ModePair<f64>,
}

/// Stored components: a full report, one components object, or a list of
/// them.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ComponentSource {
    Report(Box<EvaluationReport>),
    Pair(ModePair<ScoreComponents>),
    Single(ScoreComponents),
    List(Vec<ScoreComponents>),
}

pub fn score_offline(source: &ComponentSource, params: &MetricParams) -> anyhow::Result<Vec<OfflineScore>> {
    let score = |c: &ScoreComponents| round_sig(intelligence_score(c, params));
    let single = |name: String, c: &ScoreComponents| OfflineScore {
        name,
        intelligence: ModePair { internal: score(c), grounded: score(c) },
    };
    Ok(match source {
        ComponentSource::Report(r) => {
            if r.params.norm_weights != params.norm_weights {
                bail!("norm weights differ from the ones the components were measured with; re-run instead");
            }
            r.agents
                .iter()
                .filter_map(|a| {
                    let c = a.components.as_ref()?;
                    Some(OfflineScore {
                        name: a.name.clone(),
                        intelligence: ModePair { internal: score(&c.internal), grounded: score(&c.grounded) },
                    })
                })
                .collect()
        }
        ComponentSource::Pair(p) => vec![OfflineScore {
            name: "components".into(),
            intelligence: ModePair { internal: score(&p.internal), grounded: score(&p.grounded) },
        }],
        ComponentSource::Single(c) => vec![single("components".into(), c)],
        ComponentSource::List(cs) => cs.iter().enumerate().map(|(i, c)| single(format!("components[{i}]"), c)).collect(),
    })
}

pub fn load_components(path: &Path) -> anyhow::Result<ComponentSource> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{}: not a report or components file: {e}", path.display()))
}

/// Params from TOML (top level or under `[params]`) or JSON by extension.
pub fn load_params(path: &Path) -> anyhow::Result<MetricParams> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
    }
    #[derive(Deserialize)]
    struct Wrapped {
        params: MetricParams,
    }
    match toml::from_str::<Wrapped>(&text) {
        Ok(w) => Ok(w.params),
        Err(_) => toml::from_str(&text).with_context(|| format!("parsing {}", path.display())),
    }
}
