use crate::simulator::{ActionInvocation, PropertyChange};
use crate::worldmodel::{ActionSchema, ModelSchema, ObjectInstance, Relationship, WorldModel};
use serde::{Deserialize, Serialize};

/// A question about the agent's internal world model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeQuestion {
    ListModels,
    ListActions,
    ListObjects,
    GetProperties { object: String },
    ListRelationships,
    /// Predicted changes of `invocation` in the agent's current state, which
    /// must have the given digest.
    PredictEffect { state_digest: String, invocation: ActionInvocation },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectRef {
    pub id: String,
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeAnswer {
    Models { models: Vec<ModelSchema> },
    Actions { actions: Vec<ActionSchema> },
    Objects { objects: Vec<ObjectRef> },
    Properties { object: ObjectInstance },
    Relationships { relationships: Vec<Relationship> },
    Effect { changes: Vec<PropertyChange> },
    /// The agent does not know or declines to answer.
    Unknown,
}

impl ProbeAnswer {
    /// Whether this answer is an acceptable reply to `question`.
    pub fn answers(&self, question: &ProbeQuestion) -> bool {
        matches!(
            (question, self),
            (_, ProbeAnswer::Unknown)
                | (ProbeQuestion::ListModels, ProbeAnswer::Models { .. })
                | (ProbeQuestion::ListActions, ProbeAnswer::Actions { .. })
                | (ProbeQuestion::ListObjects, ProbeAnswer::Objects { .. })
                | (ProbeQuestion::GetProperties { .. }, ProbeAnswer::Properties { .. })
                | (ProbeQuestion::ListRelationships, ProbeAnswer::Relationships { .. })
                | (ProbeQuestion::PredictEffect { .. }, ProbeAnswer::Effect { .. })
        )
    }
}

/// Answers a probe truthfully from `model`. Effect predictions are delegated
/// to `predict` and only given when the digest matches the model's state.
pub fn answer_from_model(
    model: &WorldModel,
    question: &ProbeQuestion,
    predict: impl FnOnce(&WorldModel, &ActionInvocation) -> Vec<PropertyChange>,
) -> ProbeAnswer {
    match question {
        ProbeQuestion::ListModels => ProbeAnswer::Models { models: model.models.values().cloned().collect() },
        ProbeQuestion::ListActions => ProbeAnswer::Actions { actions: model.actions.values().cloned().collect() },
        ProbeQuestion::ListObjects => ProbeAnswer::Objects {
            objects: model.objects.values().map(|o| ObjectRef { id: o.id.clone(), model: o.model.clone() }).collect(),
        },
        ProbeQuestion::GetProperties { object } => match model.objects.get(object) {
            Some(o) => ProbeAnswer::Properties { object: o.clone() },
            None => ProbeAnswer::Unknown,
        },
        ProbeQuestion::ListRelationships => {
            ProbeAnswer::Relationships { relationships: model.relationships.iter().cloned().collect() }
        }
        ProbeQuestion::PredictEffect { state_digest, invocation } => {
            if *state_digest == model.state_digest() {
                ProbeAnswer::Effect { changes: predict(&model.state_view(), invocation) }
            } else {
                ProbeAnswer::Unknown
            }
        }
    }
}
