use super::error::{Entity, Violation, WorldError};
use super::schema::{ActionSchema, Binding, EffectOp, ModelSchema, Operand, PropertyRef};
use super::value::{Domain, Kind, Value};
use super::world::WorldModel;
use std::collections::BTreeSet;

impl WorldModel {
    /// Lists every invariant violation, in canonical order.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (key, m) in &self.models {
            check_model(key, m, &mut out);
        }
        for (key, a) in &self.actions {
            check_action(self, key, a, &mut out);
        }
        for (key, o) in &self.objects {
            let e = || Entity::Object(key.clone());
            if &o.id != key {
                out.push(Violation::new(e(), format!("keyed under `{key}` but id is `{}`", o.id)));
            }
            let Some(model) = self.models.get(&o.model) else {
                out.push(Violation::new(e(), format!("unknown model `{}`", o.model)));
                continue;
            };
            for p in &model.properties {
                match o.values.get(&p.name) {
                    None => out.push(Violation::new(e(), format!("missing value for `{}`", p.name))),
                    Some(v) if !p.domain.accepts_type(v) => out.push(Violation::new(
                        e(),
                        format!("`{}` expects {:?}, got {}", p.name, p.domain.kind(), v.type_name()),
                    )),
                    Some(v) if !p.domain.contains(v) => out.push(Violation::new(
                        e(),
                        format!("value {v} of `{}` out of domain", p.name),
                    )),
                    Some(_) => {}
                }
            }
            for name in o.values.keys() {
                if model.property(name).is_none() {
                    out.push(Violation::new(e(), format!("undeclared property `{name}`")));
                }
            }
        }
        for r in &self.relationships {
            for end in [&r.subject, &r.object] {
                if !self.models.contains_key(end) && !self.objects.contains_key(end) {
                    out.push(Violation::new(
                        Entity::Relationship(r.clone()),
                        format!("unresolved endpoint `{end}`"),
                    ));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(WorldError::Invalid(v))
        }
    }

    /// Removes offending elements until the world is valid, returning what
    /// was dropped. Dropping a model can invalidate its objects, so this
    /// iterates to a fixpoint.
    pub fn prune_invalid(mut self) -> (WorldModel, Vec<Violation>) {
        let mut dropped = Vec::new();
        loop {
            let v = self.violations();
            if v.is_empty() {
                return (self, dropped);
            }
            let entities: BTreeSet<Entity> = v.iter().map(|x| x.entity.clone()).collect();
            for e in entities {
                match e {
                    Entity::Model(n) => {
                        self.models.remove(&n);
                    }
                    Entity::Action(n) => {
                        self.actions.remove(&n);
                    }
                    Entity::Object(n) => {
                        self.objects.remove(&n);
                    }
                    Entity::Relationship(r) => {
                        self.relationships.remove(&r);
                    }
                }
            }
            dropped.extend(v);
        }
    }
}

fn check_model(key: &str, m: &ModelSchema, out: &mut Vec<Violation>) {
    let e = || Entity::Model(key.to_string());
    if m.name != key {
        out.push(Violation::new(e(), format!("keyed under `{key}` but named `{}`", m.name)));
    }
    let mut seen = BTreeSet::new();
    for p in &m.properties {
        if !seen.insert(&p.name) {
            out.push(Violation::new(e(), format!("duplicate property `{}`", p.name)));
        }
        if let Err(msg) = p.domain.check() {
            out.push(Violation::new(e(), format!("property `{}`: {msg}", p.name)));
        }
    }
}

fn slot_domain<'w>(w: &'w WorldModel, a: &ActionSchema, r: &PropertyRef) -> Result<&'w Domain, String> {
    let slot = a.slot(&r.slot).ok_or_else(|| format!("unknown slot `{}`", r.slot))?;
    let model = w
        .models
        .get(&slot.model)
        .ok_or_else(|| format!("slot `{}` has unknown model `{}`", slot.name, slot.model))?;
    model
        .property(&r.property)
        .map(|p| &p.domain)
        .ok_or_else(|| format!("model `{}` has no property `{}`", model.name, r.property))
}

fn check_literal(d: &Domain, v: &Value, what: &str) -> Option<String> {
    if !d.accepts_type(v) {
        Some(format!("{what}: expected {:?}, got {}", d.kind(), v.type_name()))
    } else if d.kind() == Kind::Enum && !d.contains(v) {
        Some(format!("{what}: {v} not in enum domain"))
    } else {
        None
    }
}

fn check_action(w: &WorldModel, key: &str, a: &ActionSchema, out: &mut Vec<Violation>) {
    let e = || Entity::Action(key.to_string());
    let mut push = |msg: String| out.push(Violation::new(e(), msg));
    if a.name != key {
        push(format!("keyed under `{key}` but named `{}`", a.name));
    }
    let mut slots = BTreeSet::new();
    for s in &a.parameters {
        if !slots.insert(&s.name) {
            push(format!("duplicate slot `{}`", s.name));
        }
        if !w.models.contains_key(&s.model) {
            push(format!("slot `{}`: unknown model `{}`", s.name, s.model));
        }
    }
    for p in &a.preconditions {
        let target = PropertyRef::new(p.slot.clone(), p.property.clone());
        let d = match slot_domain(w, a, &target) {
            Ok(d) => d,
            Err(msg) => {
                push(format!("precondition: {msg}"));
                continue;
            }
        };
        if p.cmp.is_ordering() && !d.is_numeric() {
            push(format!("precondition on `{}.{}`: ordering on non-numeric property", p.slot, p.property));
        }
        match &p.operand {
            Operand::Value { value } => {
                if let Some(msg) = check_literal(d, value, "precondition") {
                    push(msg);
                }
            }
            Operand::Ref { reference } => match slot_domain(w, a, reference) {
                Ok(rd) if rd.kind() != d.kind() && !(rd.is_numeric() && d.is_numeric()) => {
                    push(format!("precondition on `{}.{}`: incomparable reference", p.slot, p.property))
                }
                Ok(_) => {}
                Err(msg) => push(format!("precondition reference: {msg}")),
            },
        }
    }
    let mut targets = BTreeSet::new();
    for eff in &a.effects {
        if !targets.insert((&eff.slot, &eff.property)) {
            push(format!("multiple effects on `{}.{}`", eff.slot, eff.property));
        }
        let d = match slot_domain(w, a, &eff.target()) {
            Ok(d) => d,
            Err(msg) => {
                push(format!("effect: {msg}"));
                continue;
            }
        };
        let what = format!("effect on `{}.{}`", eff.slot, eff.property);
        match &eff.op {
            EffectOp::Set { value } => {
                if let Some(msg) = check_literal(d, value, &what) {
                    push(msg);
                }
            }
            EffectOp::Add { amount } => {
                if !d.is_numeric() || !d.accepts_type(amount) {
                    push(format!("{what}: add needs a numeric amount of the property's kind"));
                }
            }
            EffectOp::Toggle => {
                if d.kind() != Kind::Boolean {
                    push(format!("{what}: toggle on non-boolean property"));
                }
            }
            EffectOp::Copy { from } => match slot_domain(w, a, from) {
                Ok(src) if !src.copy_compatible(d) => push(format!("{what}: incompatible copy source")),
                Ok(_) => {}
                Err(msg) => push(format!("{what}: copy source: {msg}")),
            },
        }
    }
    for t in &a.triggers {
        let d = match slot_domain(w, a, &t.watch) {
            Ok(d) => d,
            Err(msg) => {
                push(format!("trigger: {msg}"));
                continue;
            }
        };
        if let Some(c) = &t.when {
            if c.cmp.is_ordering() && !d.is_numeric() {
                push("trigger condition: ordering on non-numeric property".to_string());
            }
            if let Some(msg) = check_literal(d, &c.value, "trigger condition") {
                push(msg);
            }
        }
        for s in &a.parameters {
            let bound = t.bind.contains_key(&s.name);
            if s.name == t.watch.slot && bound {
                push(format!("trigger binds its watched slot `{}`", s.name));
            } else if s.name != t.watch.slot && !bound {
                push(format!("trigger leaves slot `{}` unbound", s.name));
            }
        }
        for (slot_name, b) in &t.bind {
            let Some(slot) = a.slot(slot_name) else {
                push(format!("trigger binds unknown slot `{slot_name}`"));
                continue;
            };
            match b {
                Binding::Object { id } => match w.objects.get(id) {
                    None => push(format!("trigger binding: unknown object `{id}`")),
                    Some(o) if o.model != slot.model => {
                        push(format!("trigger binding: object `{id}` is not a `{}`", slot.model))
                    }
                    Some(_) => {}
                },
                Binding::Related { from, .. } => {
                    if from != &t.watch.slot {
                        push(format!("trigger binding: related lookup must start at watched slot, not `{from}`"));
                    }
                }
            }
        }
    }
}
