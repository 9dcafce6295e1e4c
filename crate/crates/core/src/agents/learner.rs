use super::planner::greedy_search;
use super::{model_prediction, Agent, CapacityBudget, Plan, PlanRequest};
use crate::simulator::{effect_value, ActionInvocation, Episode, Observation, PropertyChange};
use crate::worldmodel::{
    ActionSchema, Domain, Effect, EffectOp, ModelSchema, NormWeights, ObjectInstance, PropertyRef, Relationship, Slot,
    Value, WorldModel,
};
use std::collections::{BTreeMap, BTreeSet};

/// (action, slot, property)
type RuleKey = (String, String, String);

/// Effect candidates still consistent with every observation since the rule
/// was (re)created, most preferred first.
#[derive(Debug, Clone)]
struct Rule {
    candidates: Vec<EffectOp>,
    confirmed: u64,
}

/// Induces effect rules from before/after diffs, keeping at most
/// `budget.max_rules` of them. Preconditions and triggers are never induced.
#[derive(Debug, Clone)]
pub struct LearningAgent {
    budget: CapacityBudget,
    horizon: usize,
    weights: NormWeights,
    max_depth: usize,
    models: BTreeMap<String, ModelSchema>,
    objects: BTreeMap<String, ObjectInstance>,
    relationships: BTreeSet<Relationship>,
    signatures: BTreeMap<String, Vec<Slot>>,
    rules: BTreeMap<RuleKey, Rule>,
    tick: u64,
}

impl LearningAgent {
    pub fn new(budget: CapacityBudget, horizon: usize, weights: NormWeights, max_depth: usize) -> Self {
        Self {
            budget,
            horizon,
            weights,
            max_depth,
            models: BTreeMap::new(),
            objects: BTreeMap::new(),
            relationships: BTreeSet::new(),
            signatures: BTreeMap::new(),
            rules: BTreeMap::new(),
            tick: 0,
        }
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    fn learn(&mut self, obs: &Observation) {
        for m in obs.before.models.values().chain(obs.after.models.values()) {
            self.models.insert(m.name.clone(), m.clone());
        }
        for o in obs.after.objects.values() {
            self.objects.entry(o.id.clone()).or_insert_with(|| o.clone());
        }
        self.relationships.extend(obs.after.relationships.iter().cloned());
        self.tick += 1;

        let inv = &obs.invocation;
        let mut slots = Vec::new();
        for (slot, id) in &inv.bindings {
            let Some(obj) = obs.before.objects.get(id) else { return };
            slots.push(Slot::new(slot.clone(), obj.model.clone()));
        }
        self.signatures.insert(inv.action.clone(), slots.clone());
        if obs.refused {
            return;
        }

        for slot in &slots {
            let id = &inv.bindings[&slot.name];
            let Some(schema) = obs.before.models.get(&slot.model) else { continue };
            for p in &schema.properties {
                let (Some(b), Some(a)) = (obs.before.value(id, &p.name), obs.after.value(id, &p.name)) else {
                    continue;
                };
                let key = (inv.action.clone(), slot.name.clone(), p.name.clone());
                let target = PropertyRef::new(slot.name.clone(), p.name.clone());
                let changed = a != b;
                match self.rules.get_mut(&key) {
                    Some(rule) => {
                        rule.candidates.retain(|op| consistent(op, &p.domain, b, a, copy_source(op, obs)));
                        if !rule.candidates.is_empty() {
                            rule.confirmed = self.tick;
                        } else if changed {
                            rule.candidates = candidates(obs, &target, &p.domain, b, a);
                            rule.confirmed = self.tick;
                        } else {
                            self.rules.remove(&key);
                        }
                    }
                    None if changed => {
                        let candidates = candidates(obs, &target, &p.domain, b, a);
                        if !candidates.is_empty() {
                            self.rules.insert(key, Rule { candidates, confirmed: self.tick });
                        }
                    }
                    None => {}
                }
            }
        }
        self.evict();
    }

    fn evict(&mut self) {
        while self.rules.len() > self.budget.max_rules {
            let oldest = self
                .rules
                .iter()
                .min_by(|(ka, ra), (kb, rb)| ra.confirmed.cmp(&rb.confirmed).then_with(|| ka.cmp(kb)))
                .map(|(k, _)| k.clone())
                .expect("nonempty");
            self.rules.remove(&oldest);
        }
    }
}

fn copy_source<'o>(op: &EffectOp, obs: &'o Observation) -> Option<&'o Value> {
    let EffectOp::Copy { from } = op else { return None };
    let id = obs.invocation.bindings.get(&from.slot)?;
    obs.before.value(id, &from.property)
}

/// Does `op` turn `before` into `after` under `domain`'s clipping?
fn consistent(op: &EffectOp, domain: &Domain, before: &Value, after: &Value, source: Option<&Value>) -> bool {
    let Some(v) = effect_value(op, before, source) else { return false };
    let v = domain.coerce(v);
    domain.accepts_type(&v) && domain.clip(v).0 == *after
}

/// Every effect that explains this one observation, in preference order:
/// toggle, add, copy from another bound property, set.
fn candidates(obs: &Observation, target: &PropertyRef, domain: &Domain, before: &Value, after: &Value) -> Vec<EffectOp> {
    let mut out = vec![EffectOp::Toggle];
    match (before, after) {
        (Value::Int(b), Value::Int(a)) => {
            if let Some(d) = a.checked_sub(*b) {
                out.push(EffectOp::Add { amount: Value::Int(d) });
            }
        }
        (Value::Real(b), Value::Real(a)) => out.push(EffectOp::Add { amount: Value::Real(a - b) }),
        _ => {}
    }
    for (slot, id) in &obs.invocation.bindings {
        let Some(schema) = obs.before.objects.get(id).and_then(|o| obs.before.models.get(&o.model)) else {
            continue;
        };
        for p in &schema.properties {
            if *slot == target.slot && p.name == target.property {
                continue;
            }
            if p.domain.copy_compatible(domain) {
                out.push(EffectOp::Copy { from: PropertyRef::new(slot.clone(), p.name.clone()) });
            }
        }
    }
    out.push(EffectOp::Set { value: after.clone() });
    out.retain(|op| consistent(op, domain, before, after, copy_source(op, obs)));
    out
}

impl Agent for LearningAgent {
    fn kind(&self) -> &str {
        "learning"
    }

    /// Object values and relationships are remembered as found at the start
    /// of the latest episode.
    fn observe(&mut self, episode: &Episode) {
        if let Some(first) = episode.observations.first() {
            self.objects = first.before.objects.clone();
            self.relationships = first.before.relationships.clone();
        }
        for obs in &episode.observations {
            self.learn(obs);
        }
    }

    fn plan_for(&mut self, request: &PlanRequest) -> Plan {
        let internal = self.describe().synced_with(&request.state);
        greedy_search(&internal, &request.goal, self.horizon, &self.weights, self.max_depth)
    }

    fn predict(&mut self, state: &WorldModel, invocation: &ActionInvocation) -> Vec<PropertyChange> {
        model_prediction(&self.describe(), state, invocation, self.max_depth)
    }

    fn describe(&self) -> WorldModel {
        let mut w = WorldModel {
            models: self.models.clone(),
            actions: BTreeMap::new(),
            objects: self.objects.clone(),
            relationships: self.relationships.clone(),
        };
        let mut effects: BTreeMap<&str, Vec<Effect>> = BTreeMap::new();
        for ((action, slot, prop), rule) in &self.rules {
            effects
                .entry(action)
                .or_default()
                .push(Effect::new(slot.clone(), prop.clone(), rule.candidates[0].clone()));
        }
        for (action, effects) in effects {
            let Some(params) = self.signatures.get(action) else { continue };
            let mut schema = ActionSchema::new(action, params.clone());
            schema.effects = effects;
            w.add_action(schema);
        }
        w.canonicalize();
        w.prune_invalid().0
    }
}
