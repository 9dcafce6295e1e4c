//! Ground-truth simulation: action application with causal trigger
//! propagation, plan folding, and invocation enumeration.

mod episode;

pub use episode::{sample_batch, sample_episode, Episode, Observation};

use crate::worldmodel::{
    ActionSchema, Binding, EffectOp, Operand, Value, WorldError, WorldModel,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

pub const DEFAULT_MAX_TRIGGER_DEPTH: usize = 100;

/// The simulator-owned real world.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthWorld {
    pub world: WorldModel,
    pub seed: u64,
    pub max_trigger_depth: usize,
}

impl GroundTruthWorld {
    pub fn new(world: WorldModel, seed: u64) -> Result<Self, WorldError> {
        Self::with_depth(world, seed, DEFAULT_MAX_TRIGGER_DEPTH)
    }

    pub fn with_depth(world: WorldModel, seed: u64, max_trigger_depth: usize) -> Result<Self, WorldError> {
        world.validate()?;
        if max_trigger_depth == 0 {
            return Err(WorldError::Config("max_trigger_depth must be at least 1".to_string()));
        }
        Ok(Self { world, seed, max_trigger_depth })
    }

    pub fn apply(&self, inv: &ActionInvocation) -> Result<Transition, SimError> {
        apply_action(&self.world, inv, self.max_trigger_depth)
    }
}

/// An action name plus slot → object bindings. Ordering is by action name,
/// then by the sorted binding list, which is the canonical order used for
/// tie-breaking everywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionInvocation {
    pub action: String,
    #[serde(default)]
    pub bindings: BTreeMap<String, String>,
}

impl ActionInvocation {
    pub fn new<I, K, V>(action: impl Into<String>, bindings: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        Self {
            action: action.into(),
            bindings: bindings.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }
}

impl fmt::Display for ActionInvocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.bindings.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({})", self.action, args.join(", "))
    }
}

/// An asserted or observed new value of one object property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyChange {
    pub object: String,
    pub property: String,
    pub value: Value,
}

impl PropertyChange {
    pub fn new(object: impl Into<String>, property: impl Into<String>, value: impl Into<Value>) -> Self {
        Self { object: object.into(), property: property.into(), value: value.into() }
    }
}

/// An effect value that fell outside its domain and was clamped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipEvent {
    pub object: String,
    pub property: String,
    pub requested: Value,
    pub applied: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub before: WorldModel,
    pub invocation: ActionInvocation,
    pub after: WorldModel,
    pub fired_triggers: Vec<ActionInvocation>,
    pub preconditions_failed: bool,
    pub clipped: Vec<ClipEvent>,
}

impl Transition {
    /// Net property changes between `before` and `after`, sorted by object
    /// id then property name.
    pub fn changes(&self) -> Vec<PropertyChange> {
        state_changes(&self.before, &self.after)
    }
}

/// Properties whose value differs between two states of the same world.
pub fn state_changes(before: &WorldModel, after: &WorldModel) -> Vec<PropertyChange> {
    let mut out = Vec::new();
    for (id, obj) in &after.objects {
        let prev = before.objects.get(id);
        for (prop, v) in &obj.values {
            if prev.and_then(|p| p.values.get(prop)) != Some(v) {
                out.push(PropertyChange::new(id.clone(), prop.clone(), v.clone()));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("ill-typed invocation {invocation}: {reason}")]
    IllTyped { invocation: String, reason: String },
    #[error("divergent trigger cascade from {invocation}: exceeded depth {max_depth}")]
    DivergentCascade { invocation: String, max_depth: usize },
}

/// Checks that an invocation names a known action and binds each slot to an
/// existing object of the slot's model.
pub fn check_invocation(world: &WorldModel, inv: &ActionInvocation) -> Result<(), SimError> {
    let fail = |reason: String| SimError::IllTyped { invocation: inv.to_string(), reason };
    let action = world
        .actions
        .get(&inv.action)
        .ok_or_else(|| fail(format!("unknown action `{}`", inv.action)))?;
    if action.parameters.len() != inv.bindings.len() {
        return Err(fail("bindings do not match slots".to_string()));
    }
    for slot in &action.parameters {
        let id = inv
            .bindings
            .get(&slot.name)
            .ok_or_else(|| fail(format!("slot `{}` unbound", slot.name)))?;
        let obj = world.objects.get(id).ok_or_else(|| fail(format!("unknown object `{id}`")))?;
        if obj.model != slot.model {
            return Err(fail(format!("object `{id}` is a `{}`, slot wants `{}`", obj.model, slot.model)));
        }
    }
    Ok(())
}

fn slot_value<'w>(world: &'w WorldModel, inv: &ActionInvocation, slot: &str, prop: &str) -> Option<&'w Value> {
    inv.bindings.get(slot).and_then(|id| world.value(id, prop))
}

fn preconditions_hold(world: &WorldModel, action: &ActionSchema, inv: &ActionInvocation) -> bool {
    action.preconditions.iter().all(|p| {
        let Some(lhs) = slot_value(world, inv, &p.slot, &p.property) else { return false };
        let rhs = match &p.operand {
            Operand::Value { value } => Some(value),
            Operand::Ref { reference } => slot_value(world, inv, &reference.slot, &reference.property),
        };
        rhs.is_some_and(|rhs| p.cmp.holds(lhs, rhs))
    })
}

/// New value of an effect target, computed from the pre-action `snapshot`.
/// Returns `None` when the op does not apply to the current value's type.
pub fn effect_value(op: &EffectOp, current: &Value, source: Option<&Value>) -> Option<Value> {
    match (op, current) {
        (EffectOp::Set { value }, _) => Some(value.clone()),
        (EffectOp::Toggle, Value::Bool(b)) => Some(Value::Bool(!b)),
        (EffectOp::Add { amount: Value::Int(d) }, Value::Int(x)) => Some(Value::Int(x.saturating_add(*d))),
        (EffectOp::Add { amount }, Value::Real(x)) => amount.as_f64().map(|d| Value::Real(x + d)),
        (EffectOp::Copy { .. }, _) => source.cloned(),
        _ => None,
    }
}

/// Applies one action's effects in place. Returns the changed
/// `(object, property)` pairs; clip events are appended to `clipped`.
fn apply_effects(
    state: &mut WorldModel,
    action: &ActionSchema,
    inv: &ActionInvocation,
    clipped: &mut Vec<ClipEvent>,
) -> Vec<(String, String)> {
    let snapshot = state.clone();
    let mut changed = Vec::new();
    for eff in &action.effects {
        let Some(id) = inv.bindings.get(&eff.slot) else { continue };
        let Some(current) = snapshot.value(id, &eff.property) else { continue };
        let source = match &eff.op {
            EffectOp::Copy { from } => slot_value(&snapshot, inv, &from.slot, &from.property),
            _ => None,
        };
        let Some(requested) = effect_value(&eff.op, current, source) else { continue };
        let domain = snapshot
            .objects
            .get(id)
            .and_then(|o| snapshot.models.get(&o.model))
            .and_then(|m| m.property(&eff.property))
            .map(|p| p.domain.clone());
        let Some(domain) = domain else { continue };
        let requested = domain.coerce(requested);
        if !domain.accepts_type(&requested) {
            continue;
        }
        let (applied, was_clipped) = domain.clip(requested.clone());
        if !domain.contains(&applied) {
            continue;
        }
        if was_clipped {
            clipped.push(ClipEvent {
                object: id.clone(),
                property: eff.property.clone(),
                requested,
                applied: applied.clone(),
            });
        }
        if &applied != current {
            let obj = state.objects.get_mut(id).expect("bound object exists");
            obj.values.insert(eff.property.clone(), applied);
            changed.push((id.clone(), eff.property.clone()));
        }
    }
    changed
}

/// Invocations activated by the given changes, in canonical order: changes
/// sorted by object id then property, actions by name, triggers in their
/// canonical order, and related objects by id. Duplicates are dropped.
fn triggered(state: &WorldModel, changed: &BTreeSet<(String, String)>) -> Vec<ActionInvocation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (obj_id, prop) in changed {
        let Some(obj) = state.objects.get(obj_id) else { continue };
        for action in state.actions.values() {
            for trig in &action.triggers {
                if trig.watch.property != *prop {
                    continue;
                }
                let Some(watch_slot) = action.slot(&trig.watch.slot) else { continue };
                if watch_slot.model != obj.model {
                    continue;
                }
                if let Some(cond) = &trig.when {
                    let Some(v) = obj.values.get(prop) else { continue };
                    if !cond.cmp.holds(v, &cond.value) {
                        continue;
                    }
                }
                let mut partial: Vec<BTreeMap<String, String>> =
                    vec![BTreeMap::from([(watch_slot.name.clone(), obj_id.clone())])];
                for (slot_name, binding) in &trig.bind {
                    let Some(slot) = action.slot(slot_name) else { continue };
                    let candidates: Vec<String> = match binding {
                        Binding::Object { id } => vec![id.clone()],
                        Binding::Related { kind, reverse, .. } => {
                            let mut ids: Vec<String> = state
                                .relationships
                                .iter()
                                .filter(|r| &r.kind == kind)
                                .filter_map(|r| {
                                    if *reverse {
                                        (r.object == *obj_id).then(|| r.subject.clone())
                                    } else {
                                        (r.subject == *obj_id).then(|| r.object.clone())
                                    }
                                })
                                .filter(|id| state.objects.get(id).is_some_and(|o| o.model == slot.model))
                                .collect();
                            ids.sort();
                            ids.dedup();
                            ids
                        }
                    };
                    partial = partial
                        .into_iter()
                        .flat_map(|b| {
                            candidates.iter().map(move |c| {
                                let mut b = b.clone();
                                b.insert(slot_name.clone(), c.clone());
                                b
                            })
                        })
                        .collect();
                }
                for bindings in partial {
                    let inv = ActionInvocation { action: action.name.clone(), bindings };
                    if seen.insert(inv.clone()) {
                        out.push(inv);
                    }
                }
            }
        }
    }
    out
}

/// Applies `inv` to `world`, then propagates trigger cascades wave by wave.
///
/// Wave `k` consists of the invocations activated by the changes made in
/// wave `k - 1` (wave 0 is `inv` itself). Triggered invocations whose
/// preconditions fail are skipped and not reported as fired. A cascade that
/// still has work after `max_depth` waves is an error.
pub fn apply_action(world: &WorldModel, inv: &ActionInvocation, max_depth: usize) -> Result<Transition, SimError> {
    check_invocation(world, inv)?;
    let action = &world.actions[&inv.action];
    let mut transition = Transition {
        before: world.clone(),
        invocation: inv.clone(),
        after: world.clone(),
        fired_triggers: Vec::new(),
        preconditions_failed: false,
        clipped: Vec::new(),
    };
    if !preconditions_hold(world, action, inv) {
        transition.preconditions_failed = true;
        return Ok(transition);
    }
    let state = &mut transition.after;
    let mut changed: BTreeSet<(String, String)> =
        apply_effects(state, action, inv, &mut transition.clipped).into_iter().collect();
    let mut depth = 0;
    while !changed.is_empty() {
        let wave = triggered(state, &changed);
        if wave.is_empty() {
            break;
        }
        depth += 1;
        if depth > max_depth {
            return Err(SimError::DivergentCascade { invocation: inv.to_string(), max_depth });
        }
        let mut next = BTreeSet::new();
        for t in wave {
            let schema = &world.actions[&t.action];
            if check_invocation(state, &t).is_err() || !preconditions_hold(state, schema, &t) {
                continue;
            }
            next.extend(apply_effects(state, schema, &t, &mut transition.clipped));
            transition.fired_triggers.push(t);
        }
        changed = next;
    }
    Ok(transition)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StepOutcome {
    Applied { fired: usize, clipped: usize },
    PreconditionsFailed,
    Rejected { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub world: WorldModel,
    pub steps: Vec<StepOutcome>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("step {step}: {source}")]
pub struct PlanError {
    pub step: usize,
    pub source: SimError,
    /// State reached before the failing step.
    pub last_valid: Box<WorldModel>,
    pub steps: Vec<StepOutcome>,
}

/// Folds [`apply_action`] over `steps`. Precondition failures and ill-typed
/// steps are recorded no-ops; a divergent cascade aborts the fold.
pub fn apply_plan(world: &WorldModel, steps: &[ActionInvocation], max_depth: usize) -> Result<PlanOutcome, PlanError> {
    let mut state = world.clone();
    let mut outcomes = Vec::with_capacity(steps.len());
    for (i, inv) in steps.iter().enumerate() {
        match apply_action(&state, inv, max_depth) {
            Ok(t) if t.preconditions_failed => outcomes.push(StepOutcome::PreconditionsFailed),
            Ok(t) => {
                outcomes.push(StepOutcome::Applied { fired: t.fired_triggers.len(), clipped: t.clipped.len() });
                state = t.after;
            }
            Err(SimError::IllTyped { reason, .. }) => outcomes.push(StepOutcome::Rejected { reason }),
            Err(source) => {
                return Err(PlanError { step: i, source, last_valid: Box::new(state), steps: outcomes });
            }
        }
    }
    Ok(PlanOutcome { world: state, steps: outcomes })
}

/// Every well-typed invocation of every action: actions by name, then the
/// cartesian product of eligible objects over slots sorted by slot name.
pub fn enumerate_invocations(world: &WorldModel) -> Vec<ActionInvocation> {
    let mut out = Vec::new();
    for action in world.actions.values() {
        let mut slots: Vec<_> = action.parameters.iter().collect();
        slots.sort_by(|a, b| a.name.cmp(&b.name));
        let mut partial: Vec<BTreeMap<String, String>> = vec![BTreeMap::new()];
        for slot in slots {
            let eligible: Vec<&String> = world
                .objects
                .values()
                .filter(|o| o.model == slot.model)
                .map(|o| &o.id)
                .collect();
            partial = partial
                .into_iter()
                .flat_map(|b| {
                    eligible.iter().map(move |id| {
                        let mut b = b.clone();
                        b.insert(slot.name.clone(), (*id).clone());
                        b
                    })
                })
                .collect();
        }
        out.extend(partial.into_iter().map(|bindings| ActionInvocation { action: action.name.clone(), bindings }));
    }
    out
}
