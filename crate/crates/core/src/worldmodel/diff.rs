//! Structural difference between two worlds and the world-norm built on it.
//!
//! Elements are matched canonically: models and actions by name, objects by
//! id, relationships as whole triples. Each component of [`WorldDelta`] is a
//! symmetric-difference count, plus (for objects only) a bounded per-object
//! distance for id-matched pairs.

use super::error::WorldError;
use super::schema::{ModelSchema, ObjectInstance};
use super::value::{Domain, Value};
use super::world::WorldModel;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Importance weights `(m, a, o, r)` of the four world components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights")]
pub struct NormWeights {
    pub m: f64,
    pub a: f64,
    pub o: f64,
    pub r: f64,
}

#[derive(Deserialize)]
struct RawWeights {
    m: f64,
    a: f64,
    o: f64,
    r: f64,
}

impl TryFrom<RawWeights> for NormWeights {
    type Error = String;
    fn try_from(w: RawWeights) -> Result<Self, String> {
        NormWeights::new(w.m, w.a, w.o, w.r)
    }
}

impl NormWeights {
    pub fn new(m: f64, a: f64, o: f64, r: f64) -> Result<Self, String> {
        let all = [m, a, o, r];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err("norm weights must be finite and non-negative".to_string());
        }
        if all.iter().all(|w| *w == 0.0) {
            return Err("norm weights must not all be zero".to_string());
        }
        Ok(Self { m, a, o, r })
    }
}

impl Default for NormWeights {
    fn default() -> Self {
        Self { m: 1.0, a: 1.0, o: 1.0, r: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WorldDelta {
    pub delta_m: f64,
    pub delta_a: f64,
    pub delta_o: f64,
    pub delta_r: f64,
}

impl WorldDelta {
    pub fn is_zero(&self) -> bool {
        self.delta_m == 0.0 && self.delta_a == 0.0 && self.delta_o == 0.0 && self.delta_r == 0.0
    }

    /// `1 / (1 + sqrt(m·Δm² + a·Δa² + o·Δo² + r·Δr²))`.
    ///
    /// When the weighted sum is positive but too small to move the result
    /// off 1.0 in floating point, the largest value below 1.0 is returned, so
    /// the norm is exactly 1.0 only for weighted-identical worlds.
    pub fn norm(&self, w: &NormWeights) -> f64 {
        let sum = w.m * self.delta_m * self.delta_m
            + w.a * self.delta_a * self.delta_a
            + w.o * self.delta_o * self.delta_o
            + w.r * self.delta_r * self.delta_r;
        let n = 1.0 / (1.0 + sum.sqrt());
        if sum > 0.0 && n >= 1.0 {
            ONE_MINUS_ULP
        } else {
            n
        }
    }
}

const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

/// Validates both worlds, then computes their structural difference.
pub fn diff_worlds(x: &WorldModel, y: &WorldModel) -> Result<WorldDelta, WorldError> {
    x.validate()?;
    y.validate()?;
    Ok(structural_delta(x, y))
}

/// World-norm of `x - y`, in `(0, 1]`; 1 means structurally identical.
pub fn world_norm(x: &WorldModel, y: &WorldModel, w: &NormWeights) -> Result<f64, WorldError> {
    Ok(diff_worlds(x, y)?.norm(w))
}

/// [`diff_worlds`] without validation, for hot loops over worlds already
/// known to be valid.
pub fn structural_delta(x: &WorldModel, y: &WorldModel) -> WorldDelta {
    WorldDelta {
        delta_m: keyed_delta(&x.models, &y.models),
        delta_a: keyed_delta(&x.actions, &y.actions),
        delta_o: object_delta(x, y),
        delta_r: x.relationships.symmetric_difference(&y.relationships).count() as f64,
    }
}

/// Unmatched keys count 1 each; a matched key whose value differs counts 1.
fn keyed_delta<T: PartialEq>(x: &BTreeMap<String, T>, y: &BTreeMap<String, T>) -> f64 {
    let keys: BTreeSet<&String> = x.keys().chain(y.keys()).collect();
    keys.into_iter()
        .filter(|k| match (x.get(*k), y.get(*k)) {
            (Some(a), Some(b)) => a != b,
            _ => true,
        })
        .count() as f64
}

fn object_delta(x: &WorldModel, y: &WorldModel) -> f64 {
    let ids: BTreeSet<&String> = x.objects.keys().chain(y.objects.keys()).collect();
    let mut total = 0.0;
    for id in ids {
        total += match (x.objects.get(id), y.objects.get(id)) {
            (Some(a), Some(b)) => object_distance(a, x.models.get(&a.model), b, y.models.get(&b.model)),
            _ => 1.0,
        };
    }
    total
}

/// Fraction of properties that disagree, in `[0, 1]`. Numeric disagreement
/// is scaled by the wider of the two declared domain widths.
fn object_distance(
    a: &ObjectInstance,
    ma: Option<&ModelSchema>,
    b: &ObjectInstance,
    mb: Option<&ModelSchema>,
) -> f64 {
    if a.model != b.model {
        return 1.0;
    }
    let names: BTreeSet<&String> = a.values.keys().chain(b.values.keys()).collect();
    if names.is_empty() {
        return 0.0;
    }
    let count = names.len() as f64;
    let mut mismatch = 0.0;
    for name in names {
        let da = ma.and_then(|m| m.property(name)).map(|p| &p.domain);
        let db = mb.and_then(|m| m.property(name)).map(|p| &p.domain);
        mismatch += match (a.values.get(name), b.values.get(name)) {
            (Some(va), Some(vb)) => value_distance(va, vb, da, db),
            _ => 1.0,
        };
    }
    mismatch / count
}

fn value_distance(a: &Value, b: &Value, da: Option<&Domain>, db: Option<&Domain>) -> f64 {
    if a == b {
        return 0.0;
    }
    let width = match (da.and_then(Domain::width), db.and_then(Domain::width)) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (w, None) | (None, w) => w,
    };
    let diff = match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some((*x as i128 - *y as i128).unsigned_abs() as f64),
        (Value::Real(x), Value::Real(y)) => Some((x - y).abs()),
        _ => None,
    };
    match (diff, width) {
        (Some(d), Some(w)) if w > 0.0 => (d / w).clamp(0.0, 1.0),
        _ => 1.0,
    }
}
