use super::error::{Entity, Violation, WorldError};
use super::schema::{ActionSchema, EffectOp, ModelSchema, ObjectInstance, Operand, Relationship};
use super::value::Value;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};

pub const FORMAT_VERSION: u32 = 1;

/// The `{M, A, O, R}` tuple. Maps are keyed by name/id so iteration order is
/// canonical.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "WorldDocument", try_from = "WorldDocument")]
pub struct WorldModel {
    pub models: BTreeMap<String, ModelSchema>,
    pub actions: BTreeMap<String, ActionSchema>,
    pub objects: BTreeMap<String, ObjectInstance>,
    pub relationships: BTreeSet<Relationship>,
}

/// On-disk / on-wire shape of a world.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldDocument {
    #[serde(default = "default_version")]
    pub format_version: u32,
    #[serde(default)]
    pub models: Vec<ModelSchema>,
    #[serde(default)]
    pub actions: Vec<ActionSchema>,
    #[serde(default)]
    pub objects: Vec<ObjectInstance>,
    #[serde(default)]
    pub relationships: Vec<Relationship>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

impl From<WorldModel> for WorldDocument {
    fn from(w: WorldModel) -> Self {
        WorldDocument {
            format_version: FORMAT_VERSION,
            models: w.models.into_values().collect(),
            actions: w.actions.into_values().collect(),
            objects: w.objects.into_values().collect(),
            relationships: w.relationships.into_iter().collect(),
        }
    }
}

impl TryFrom<WorldDocument> for WorldModel {
    type Error = WorldError;

    fn try_from(doc: WorldDocument) -> Result<Self, Self::Error> {
        if doc.format_version != FORMAT_VERSION {
            return Err(WorldError::UnsupportedVersion(doc.format_version));
        }
        let mut dups = Vec::new();
        let mut w = WorldModel::default();
        for m in doc.models {
            if w.models.contains_key(&m.name) {
                dups.push(Violation::new(Entity::Model(m.name.clone()), "duplicate model name"));
            }
            w.models.insert(m.name.clone(), m);
        }
        for a in doc.actions {
            if w.actions.contains_key(&a.name) {
                dups.push(Violation::new(Entity::Action(a.name.clone()), "duplicate action name"));
            }
            w.actions.insert(a.name.clone(), a);
        }
        for o in doc.objects {
            if w.objects.contains_key(&o.id) {
                dups.push(Violation::new(Entity::Object(o.id.clone()), "duplicate object id"));
            }
            w.objects.insert(o.id.clone(), o);
        }
        w.relationships.extend(doc.relationships);
        if !dups.is_empty() {
            return Err(WorldError::Invalid(dups));
        }
        w.canonicalize();
        Ok(w)
    }
}

impl WorldModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
            && self.actions.is_empty()
            && self.objects.is_empty()
            && self.relationships.is_empty()
    }

    pub fn add_model(&mut self, model: ModelSchema) -> &mut Self {
        self.models.insert(model.name.clone(), model);
        self
    }

    pub fn add_action(&mut self, mut action: ActionSchema) -> &mut Self {
        action.canonicalize();
        self.actions.insert(action.name.clone(), action);
        self
    }

    pub fn add_object(&mut self, object: ObjectInstance) -> &mut Self {
        self.objects.insert(object.id.clone(), object);
        self
    }

    pub fn add_relationship(&mut self, rel: Relationship) -> &mut Self {
        self.relationships.insert(rel);
        self
    }

    /// Sorts nested lists and coerces integer literals into real-valued
    /// properties.
    pub fn canonicalize(&mut self) {
        for m in self.models.values_mut() {
            m.canonicalize();
        }
        let models = &self.models;
        for o in self.objects.values_mut() {
            if let Some(schema) = models.get(&o.model) {
                for (name, v) in o.values.iter_mut() {
                    if let Some(p) = schema.property(name) {
                        *v = p.domain.coerce(v.clone());
                    }
                }
            }
        }
        for a in self.actions.values_mut() {
            let slot_domain = |slot: &str, prop: &str| {
                a.parameters
                    .iter()
                    .find(|s| s.name == slot)
                    .and_then(|s| models.get(&s.model))
                    .and_then(|m| m.property(prop))
                    .map(|p| p.domain.clone())
            };
            let mut effects = a.effects.clone();
            for e in effects.iter_mut() {
                if let Some(d) = slot_domain(&e.slot, &e.property) {
                    match &mut e.op {
                        EffectOp::Set { value } => *value = d.coerce(value.clone()),
                        EffectOp::Add { amount } => *amount = d.coerce(amount.clone()),
                        _ => {}
                    }
                }
            }
            let mut preconditions = a.preconditions.clone();
            for p in preconditions.iter_mut() {
                if let (Some(d), Operand::Value { value }) =
                    (slot_domain(&p.slot, &p.property), &mut p.operand)
                {
                    *value = d.coerce(value.clone());
                }
            }
            let mut triggers = a.triggers.clone();
            for t in triggers.iter_mut() {
                if let (Some(d), Some(c)) = (slot_domain(&t.watch.slot, &t.watch.property), &mut t.when) {
                    c.value = d.coerce(c.value.clone());
                }
            }
            a.effects = effects;
            a.preconditions = preconditions;
            a.triggers = triggers;
            a.canonicalize();
        }
    }

    /// The observable part of the world: everything except action schemas.
    pub fn state_view(&self) -> WorldModel {
        WorldModel {
            models: self.models.clone(),
            actions: BTreeMap::new(),
            objects: self.objects.clone(),
            relationships: self.relationships.clone(),
        }
    }

    /// Overwrites object values with those in `view` wherever the object id,
    /// model and property agree and the value is in domain. Everything else
    /// in `self` is kept.
    pub fn synced_with(&self, view: &WorldModel) -> WorldModel {
        let mut out = self.clone();
        for (id, obj) in out.objects.iter_mut() {
            let Some(seen) = view.objects.get(id) else { continue };
            if seen.model != obj.model {
                continue;
            }
            let schema = self.models.get(&obj.model);
            for (prop, value) in obj.values.iter_mut() {
                let Some(new) = seen.values.get(prop) else { continue };
                let ok = schema
                    .and_then(|m| m.property(prop))
                    .is_some_and(|p| p.domain.contains(new));
                if ok {
                    *value = new.clone();
                }
            }
        }
        out
    }

    /// Applies `object -> property -> value` overrides, checking each one.
    pub fn with_overrides(
        &self,
        overrides: &BTreeMap<String, BTreeMap<String, Value>>,
    ) -> Result<WorldModel, WorldError> {
        let mut out = self.clone();
        let mut violations = Vec::new();
        for (id, props) in overrides {
            let Some(obj) = out.objects.get_mut(id) else {
                violations.push(Violation::new(Entity::Object(id.clone()), "unknown object"));
                continue;
            };
            let schema = self.models.get(&obj.model);
            for (prop, value) in props {
                match schema.and_then(|m| m.property(prop)) {
                    Some(p) => {
                        let v = p.domain.coerce(value.clone());
                        if p.domain.contains(&v) {
                            obj.values.insert(prop.clone(), v);
                        } else {
                            violations.push(Violation::new(
                                Entity::Object(id.clone()),
                                format!("value {value} out of domain for `{prop}`"),
                            ));
                        }
                    }
                    None => violations.push(Violation::new(
                        Entity::Object(id.clone()),
                        format!("unknown property `{prop}`"),
                    )),
                }
            }
        }
        if violations.is_empty() {
            Ok(out)
        } else {
            Err(WorldError::Invalid(violations))
        }
    }

    /// Stable digest of the object state (ids, models and values).
    pub fn state_digest(&self) -> String {
        let bytes = serde_json::to_vec(&self.objects).expect("objects serialize");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Key identifying the object state, for search deduplication.
    pub fn state_key(&self) -> String {
        serde_json::to_string(&self.objects).expect("objects serialize")
    }

    pub fn value(&self, object: &str, property: &str) -> Option<&Value> {
        self.objects.get(object).and_then(|o| o.values.get(property))
    }
}
