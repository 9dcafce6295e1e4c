use super::probe::{ProbeAnswer, ProbeQuestion};
use super::session::{AgentSession, SessionError};
use crate::simulator::{ActionInvocation, PropertyChange};
use crate::worldmodel::{Violation, WorldModel};
use serde::{Deserialize, Serialize};

/// How many probes to spend, plus effect predictions to ask for after the
/// structural probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbePlan {
    pub budget: usize,
    #[serde(default)]
    pub predictions: Vec<(String, ActionInvocation)>,
}

impl ProbePlan {
    pub fn new(budget: usize) -> Result<Self, String> {
        if budget == 0 {
            return Err("probe budget must be at least 1".to_string());
        }
        Ok(Self { budget, predictions: Vec::new() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elicitation {
    pub world: WorldModel,
    pub issued: usize,
    pub unanswered: usize,
    /// Answered entries removed because they made the world invalid.
    pub dropped: Vec<Violation>,
    /// One entry per requested prediction that fit in the budget.
    pub predictions: Vec<Option<Vec<PropertyChange>>>,
}

/// Questions and assembles the agent's world model.
///
/// Probes go in a fixed order (models, actions, objects, each listed
/// object's properties, relationships, then predictions) and stop when the
/// budget runs out, so a larger budget only ever adds answers.
pub fn elicit_world_model(session: &mut dyn AgentSession, plan: &ProbePlan) -> Result<Elicitation, SessionError> {
    let mut out = Elicitation {
        world: WorldModel::new(),
        issued: 0,
        unanswered: 0,
        dropped: Vec::new(),
        predictions: Vec::new(),
    };
    let mut ask = |q: &ProbeQuestion, out: &mut Elicitation| -> Result<Option<ProbeAnswer>, SessionError> {
        if out.issued >= plan.budget {
            return Ok(None);
        }
        out.issued += 1;
        let a = session.probe(q)?;
        if a == ProbeAnswer::Unknown {
            out.unanswered += 1;
        }
        Ok(Some(a))
    };

    if let Some(ProbeAnswer::Models { models }) = ask(&ProbeQuestion::ListModels, &mut out)? {
        for m in models {
            out.world.add_model(m);
        }
    }
    if let Some(ProbeAnswer::Actions { actions }) = ask(&ProbeQuestion::ListActions, &mut out)? {
        for a in actions {
            out.world.add_action(a);
        }
    }
    let mut ids = Vec::new();
    if let Some(ProbeAnswer::Objects { objects }) = ask(&ProbeQuestion::ListObjects, &mut out)? {
        ids = objects.into_iter().map(|o| o.id).collect();
        ids.sort();
        ids.dedup();
    }
    for id in ids {
        let q = ProbeQuestion::GetProperties { object: id.clone() };
        if let Some(ProbeAnswer::Properties { object }) = ask(&q, &mut out)? {
            if object.id == id {
                out.world.add_object(object);
            }
        }
    }
    if let Some(ProbeAnswer::Relationships { relationships }) = ask(&ProbeQuestion::ListRelationships, &mut out)? {
        for r in relationships {
            out.world.add_relationship(r);
        }
    }
    for (digest, inv) in &plan.predictions {
        let q = ProbeQuestion::PredictEffect { state_digest: digest.clone(), invocation: inv.clone() };
        match ask(&q, &mut out)? {
            None => break,
            Some(ProbeAnswer::Effect { changes }) => out.predictions.push(Some(changes)),
            Some(_) => out.predictions.push(None),
        }
    }

    let mut world = std::mem::take(&mut out.world);
    world.canonicalize();
    let (world, dropped) = world.prune_invalid();
    out.world = world;
    out.dropped = dropped;
    Ok(out)
}
