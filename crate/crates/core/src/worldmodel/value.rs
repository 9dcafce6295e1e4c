use serde::{Deserialize, Serialize};
use std::fmt;

/// A property value. Serialized as a bare JSON scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Real(f64),
    Symbol(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "boolean",
            Value::Int(_) => "integer",
            Value::Real(_) => "real",
            Value::Symbol(_) => "symbol",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{r}"),
            Value::Symbol(s) => write!(f, "{s:?}"),
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<f64> for Value {
    fn from(r: f64) -> Self {
        Value::Real(r)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Symbol(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Boolean,
    Integer,
    Real,
    Enum,
}

/// Declared domain of a property; the `kind` tag doubles as the property kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Boolean,
    Integer { min: i64, max: i64 },
    Real { min: f64, max: f64 },
    Enum { values: Vec<String> },
}

impl Domain {
    pub fn kind(&self) -> Kind {
        match self {
            Domain::Boolean => Kind::Boolean,
            Domain::Integer { .. } => Kind::Integer,
            Domain::Real { .. } => Kind::Real,
            Domain::Enum { .. } => Kind::Enum,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Domain::Integer { .. } | Domain::Real { .. })
    }

    /// Whether `value` has the representation this domain expects.
    pub fn accepts_type(&self, value: &Value) -> bool {
        matches!(
            (self, value),
            (Domain::Boolean, Value::Bool(_))
                | (Domain::Integer { .. }, Value::Int(_))
                | (Domain::Real { .. }, Value::Real(_))
                | (Domain::Enum { .. }, Value::Symbol(_))
        )
    }

    pub fn contains(&self, value: &Value) -> bool {
        match (self, value) {
            (Domain::Boolean, Value::Bool(_)) => true,
            (Domain::Integer { min, max }, Value::Int(i)) => min <= i && i <= max,
            (Domain::Real { min, max }, Value::Real(r)) => r.is_finite() && *min <= *r && *r <= *max,
            (Domain::Enum { values }, Value::Symbol(s)) => values.iter().any(|v| v == s),
            _ => false,
        }
    }

    /// Width of a numeric domain; `None` for boolean and enum domains.
    pub fn width(&self) -> Option<f64> {
        match self {
            Domain::Integer { min, max } => Some((*max as i128 - *min as i128) as f64),
            Domain::Real { min, max } => Some(max - min),
            _ => None,
        }
    }

    /// Integer literals are accepted where a real is expected.
    pub fn coerce(&self, value: Value) -> Value {
        match (self, value) {
            (Domain::Real { .. }, Value::Int(i)) => Value::Real(i as f64),
            (_, v) => v,
        }
    }

    /// Clamps a numeric value into the domain. Returns the clamped value and
    /// whether clamping happened. Non-numeric values pass through.
    pub fn clip(&self, value: Value) -> (Value, bool) {
        match (self, value) {
            (Domain::Integer { min, max }, Value::Int(i)) => {
                let c = i.clamp(*min, *max);
                (Value::Int(c), c != i)
            }
            (Domain::Real { min, max }, Value::Real(r)) => {
                let c = if r.is_nan() { *min } else { r.clamp(*min, *max) };
                (Value::Real(c), c != r)
            }
            (_, v) => (v, false),
        }
    }

    /// Checks the domain itself is well formed.
    pub fn check(&self) -> Result<(), String> {
        match self {
            Domain::Boolean => Ok(()),
            Domain::Integer { min, max } if min > max => {
                Err(format!("empty integer domain [{min}, {max}]"))
            }
            Domain::Real { min, max } if !(min.is_finite() && max.is_finite()) => {
                Err("real domain bounds must be finite".to_string())
            }
            Domain::Real { min, max } if min > max => Err(format!("empty real domain [{min}, {max}]")),
            Domain::Enum { values } if values.is_empty() => Err("empty enum domain".to_string()),
            Domain::Enum { values } => {
                let mut sorted = values.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != values.len() {
                    Err("duplicate enum value".to_string())
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Values from `self` can be stored in `target` (used by copy effects).
    pub fn copy_compatible(&self, target: &Domain) -> bool {
        match (self, target) {
            (Domain::Boolean, Domain::Boolean) => true,
            (Domain::Integer { .. }, Domain::Integer { .. }) => true,
            (Domain::Real { .. }, Domain::Real { .. }) => true,
            (Domain::Enum { values: src }, Domain::Enum { values: dst }) => {
                src.iter().all(|v| dst.contains(v))
            }
            _ => false,
        }
    }
}
