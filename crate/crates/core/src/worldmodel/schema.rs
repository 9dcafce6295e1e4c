use super::value::{Domain, Value};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySchema {
    pub name: String,
    #[serde(flatten)]
    pub domain: Domain,
}

impl PropertySchema {
    pub fn new(name: impl Into<String>, domain: Domain) -> Self {
        Self { name: name.into(), domain }
    }
}

/// A class of objects and the properties its instances carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSchema {
    pub name: String,
    #[serde(default)]
    pub properties: Vec<PropertySchema>,
}

impl ModelSchema {
    pub fn new(name: impl Into<String>, properties: Vec<PropertySchema>) -> Self {
        let mut m = Self { name: name.into(), properties };
        m.canonicalize();
        m
    }

    pub fn property(&self, name: &str) -> Option<&PropertySchema> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub(crate) fn canonicalize(&mut self) {
        self.properties.sort_by(|a, b| a.name.cmp(&b.name));
        for p in &mut self.properties {
            if let Domain::Enum { values } = &mut p.domain {
                values.sort();
            }
        }
    }
}

/// A typed parameter of an action.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot {
    pub name: String,
    pub model: String,
}

impl Slot {
    pub fn new(name: impl Into<String>, model: impl Into<String>) -> Self {
        Self { name: name.into(), model: model.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PropertyRef {
    pub slot: String,
    pub property: String,
}

impl PropertyRef {
    pub fn new(slot: impl Into<String>, property: impl Into<String>) -> Self {
        Self { slot: slot.into(), property: property.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparison {
    pub fn is_ordering(self) -> bool {
        !matches!(self, Comparison::Eq | Comparison::Ne)
    }

    /// Evaluates `lhs <cmp> rhs`. Mismatched kinds compare unequal.
    pub fn holds(self, lhs: &Value, rhs: &Value) -> bool {
        let ordering = match (lhs.as_f64(), rhs.as_f64()) {
            (Some(a), Some(b)) => a.partial_cmp(&b),
            _ => None,
        };
        match self {
            Comparison::Eq => match ordering {
                Some(o) => o.is_eq(),
                None => lhs == rhs,
            },
            Comparison::Ne => match ordering {
                Some(o) => o.is_ne(),
                None => lhs != rhs,
            },
            Comparison::Lt => ordering.is_some_and(|o| o.is_lt()),
            Comparison::Le => ordering.is_some_and(|o| o.is_le()),
            Comparison::Gt => ordering.is_some_and(|o| o.is_gt()),
            Comparison::Ge => ordering.is_some_and(|o| o.is_ge()),
        }
    }
}

/// Right-hand side of a precondition: a literal or another slot's property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Operand {
    Value { value: Value },
    Ref {
        #[serde(rename = "ref")]
        reference: PropertyRef,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub slot: String,
    pub property: String,
    pub cmp: Comparison,
    #[serde(flatten)]
    pub operand: Operand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum EffectOp {
    Set { value: Value },
    Add { amount: Value },
    Toggle,
    Copy { from: PropertyRef },
}

/// Assignment to one property of one slot. Effects of an action are applied
/// simultaneously, reading the state before the action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub slot: String,
    pub property: String,
    #[serde(flatten)]
    pub op: EffectOp,
}

impl Effect {
    pub fn new(slot: impl Into<String>, property: impl Into<String>, op: EffectOp) -> Self {
        Self { slot: slot.into(), property: property.into(), op }
    }

    pub fn target(&self) -> PropertyRef {
        PropertyRef::new(self.slot.clone(), self.property.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub cmp: Comparison,
    pub value: Value,
}

/// How a trigger fills a slot other than the watched one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binding {
    /// A fixed object.
    Object { id: String },
    /// Every object `o` with a relationship `(kind, watched, o)`, or
    /// `(kind, o, watched)` when `reverse` is set.
    Related {
        kind: String,
        from: String,
        #[serde(default, skip_serializing_if = "is_false")]
        reverse: bool,
    },
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Activation rule of the owning action: whenever `watch.property` changes on
/// an object of the watched slot's model (and `when` holds for the new value),
/// the owning action is invoked with the watched slot bound to that object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trigger {
    pub watch: PropertyRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub when: Option<Condition>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bind: BTreeMap<String, Binding>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: String,
    #[serde(default)]
    pub parameters: Vec<Slot>,
    #[serde(default)]
    pub preconditions: Vec<Predicate>,
    #[serde(default)]
    pub effects: Vec<Effect>,
    #[serde(default)]
    pub triggers: Vec<Trigger>,
}

impl ActionSchema {
    pub fn new(name: impl Into<String>, parameters: Vec<Slot>) -> Self {
        Self {
            name: name.into(),
            parameters,
            preconditions: Vec::new(),
            effects: Vec::new(),
            triggers: Vec::new(),
        }
    }

    pub fn slot(&self, name: &str) -> Option<&Slot> {
        self.parameters.iter().find(|s| s.name == name)
    }

    /// Parameters by slot name; effects by target; the rest by serialized form.
    pub(crate) fn canonicalize(&mut self) {
        self.parameters.sort();
        self.effects
            .sort_by(|a, b| (&a.slot, &a.property).cmp(&(&b.slot, &b.property)));
        sort_by_json(&mut self.preconditions);
        sort_by_json(&mut self.triggers);
    }
}

fn sort_by_json<T: Serialize>(items: &mut [T]) {
    items.sort_by_cached_key(|item| serde_json::to_string(item).unwrap_or_default());
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub id: String,
    pub model: String,
    #[serde(default)]
    pub values: BTreeMap<String, Value>,
}

impl ObjectInstance {
    pub fn new(id: impl Into<String>, model: impl Into<String>) -> Self {
        Self { id: id.into(), model: model.into(), values: BTreeMap::new() }
    }

    pub fn with(mut self, property: impl Into<String>, value: impl Into<Value>) -> Self {
        self.values.insert(property.into(), value.into());
        self
    }
}

/// A `(kind, subject, object)` triple between models and/or objects.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Relationship {
    pub kind: String,
    pub subject: String,
    pub object: String,
}

impl Relationship {
    pub fn new(kind: impl Into<String>, subject: impl Into<String>, object: impl Into<String>) -> Self {
        Self { kind: kind.into(), subject: subject.into(), object: object.into() }
    }
}
