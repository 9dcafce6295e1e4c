#![allow(dead_code)]

use rand::Rng;
use std::collections::BTreeMap;
use std::path::PathBuf;
use wmeval_core::simulator::GroundTruthWorld;
use wmeval_core::worldmodel::{
    load_world_file, ActionSchema, Domain, Effect, EffectOp, ModelSchema, ObjectInstance, PropertySchema,
    Relationship, Slot, Value, WorldModel,
};

pub fn worlds_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../worlds")
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn shipped(name: &str) -> WorldModel {
    load_world_file(worlds_dir().join(name)).unwrap()
}

pub fn truth(name: &str) -> GroundTruthWorld {
    GroundTruthWorld::new(shipped(name), 0).unwrap()
}

fn overrides(items: &[(&str, &str, Value)]) -> BTreeMap<String, BTreeMap<String, Value>> {
    let mut out: BTreeMap<String, BTreeMap<String, Value>> = BTreeMap::new();
    for (obj, prop, v) in items {
        out.entry(obj.to_string()).or_default().insert(prop.to_string(), v.clone());
    }
    out
}

/// Each shipped world with its goal and planning horizon (mirrors the
/// fixture configs).
pub fn shipped_scenarios() -> Vec<(&'static str, WorldModel, WorldModel, usize)> {
    let goals: Vec<(&str, Vec<(&str, &str, Value)>, usize)> = vec![
        (
            "switches.world",
            vec![
                ("switch_1", "on", true.into()),
                ("switch_2", "on", true.into()),
                ("lamp_1", "lit", true.into()),
                ("lamp_2", "lit", true.into()),
            ],
            4,
        ),
        (
            "grid_transport.world",
            vec![("truck_1", "x", 4i64.into()), ("package_1", "x", 4i64.into()), ("package_1", "in_truck", false.into())],
            6,
        ),
        ("battery.world", vec![("robot_1", "charge", 4i64.into()), ("robot_1", "jobs_done", 5i64.into())], 5),
        ("two_rules.world", vec![("lever_1", "up", true.into()), ("bulb_1", "lit", true.into())], 2),
    ];
    goals
        .into_iter()
        .map(|(name, g, h)| {
            let w = shipped(name);
            let goal = w.with_overrides(&overrides(&g)).unwrap();
            (name, w, goal, h)
        })
        .collect()
}

/// Small random valid worlds drawn from a fixed vocabulary, so that two
/// independent draws share many names and hit every matching case.
pub fn random_world<R: Rng>(rng: &mut R) -> WorldModel {
    let mut w = WorldModel::new();
    let pool: Vec<(&str, Vec<PropertySchema>)> = vec![
        ("switch", vec![PropertySchema::new("on", Domain::Boolean)]),
        ("dial", vec![PropertySchema::new("level", Domain::Real { min: 0.0, max: 1.0 })]),
        (
            "counter",
            vec![
                PropertySchema::new("n", Domain::Integer { min: 0, max: 10 }),
                PropertySchema::new("ok", Domain::Boolean),
            ],
        ),
        (
            "mode",
            vec![PropertySchema::new("state", Domain::Enum { values: vec!["a".into(), "b".into(), "c".into()] })],
        ),
    ];
    for (name, mut props) in pool {
        if !rng.gen_bool(0.75) {
            continue;
        }
        if rng.gen_bool(0.15) {
            props.push(PropertySchema::new("extra", Domain::Boolean));
        }
        w.add_model(ModelSchema::new(name, props));
    }
    let models: Vec<ModelSchema> = w.models.values().cloned().collect();
    if models.is_empty() {
        return w;
    }
    for i in 0..5 {
        if !rng.gen_bool(0.6) {
            continue;
        }
        let m = &models[rng.gen_range(0..models.len())];
        let mut o = ObjectInstance::new(format!("o{i}"), m.name.clone());
        for p in &m.properties {
            o.values.insert(p.name.clone(), random_value(&p.domain, rng));
        }
        w.add_object(o);
    }
    for m in &models {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let p = &m.properties[0];
        let op = match &p.domain {
            Domain::Boolean => EffectOp::Toggle,
            Domain::Integer { .. } => EffectOp::Add { amount: Value::Int(rng.gen_range(1..3)) },
            Domain::Real { .. } => EffectOp::Set { value: Value::Real(0.5) },
            Domain::Enum { values } => EffectOp::Set { value: Value::Symbol(values[rng.gen_range(0..values.len())].clone()) },
        };
        let mut a = ActionSchema::new(format!("poke_{}", m.name), vec![Slot::new("x", m.name.clone())]);
        a.effects.push(Effect::new("x", p.name.clone(), op));
        w.add_action(a);
    }
    let ids: Vec<String> = w.objects.keys().cloned().collect();
    if !ids.is_empty() {
        for _ in 0..rng.gen_range(0..4) {
            let kind = ["near", "owns"][rng.gen_range(0..2)];
            let s = &ids[rng.gen_range(0..ids.len())];
            let o = &ids[rng.gen_range(0..ids.len())];
            w.add_relationship(Relationship::new(kind, s.clone(), o.clone()));
        }
    }
    w.validate().expect("generator builds valid worlds");
    w
}

pub fn random_value<R: Rng>(d: &Domain, rng: &mut R) -> Value {
    match d {
        Domain::Boolean => Value::Bool(rng.gen_bool(0.5)),
        Domain::Integer { min, max } => Value::Int(rng.gen_range(*min..=*max)),
        // a coarse grid keeps exact equality reasonably likely
        Domain::Real { min, max } => Value::Real(min + (max - min) * f64::from(rng.gen_range(0..=4u8)) / 4.0),
        Domain::Enum { values } => Value::Symbol(values[rng.gen_range(0..values.len())].clone()),
    }
}
