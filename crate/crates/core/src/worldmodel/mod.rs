//! World-model representation: model and action schemas, object instances,
//! relationships, the world-file format, and structural comparison.

mod diff;
mod error;
mod io;
mod schema;
mod validate;
mod value;
mod world;

pub use diff::{diff_worlds, structural_delta, world_norm, NormWeights, WorldDelta};
pub use error::{Entity, Violation, WorldError};
pub use io::{load_world, load_world_file, save_world};
pub use schema::{
    ActionSchema, Binding, Comparison, Condition, Effect, EffectOp, ModelSchema, ObjectInstance,
    Operand, Predicate, PropertyRef, PropertySchema, Relationship, Slot, Trigger,
};
pub use value::{Domain, Kind, Value};
pub use world::{WorldDocument, WorldModel, FORMAT_VERSION};
