use super::schema::Relationship;
use std::fmt;

/// The world element a violation is attributed to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Entity {
    Model(String),
    Action(String),
    Object(String),
    Relationship(Relationship),
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Model(n) => write!(f, "model `{n}`"),
            Entity::Action(n) => write!(f, "action `{n}`"),
            Entity::Object(n) => write!(f, "object `{n}`"),
            Entity::Relationship(r) => {
                write!(f, "relationship ({}, {}, {})", r.kind, r.subject, r.object)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub entity: Entity,
    pub message: String,
}

impl Violation {
    pub fn new(entity: Entity, message: impl Into<String>) -> Self {
        Self { entity, message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum WorldError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported world format version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid world: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl WorldError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            WorldError::Invalid(v) => v,
            _ => &[],
        }
    }
}
