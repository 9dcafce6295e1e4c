use super::error::WorldError;
use super::world::{WorldDocument, WorldModel};
use std::path::Path;

/// Parses and validates a world document.
pub fn load_world(bytes: &[u8]) -> Result<WorldModel, WorldError> {
    let doc: WorldDocument = serde_json::from_slice(bytes).map_err(|e| WorldError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let world = WorldModel::try_from(doc)?;
    world.validate()?;
    Ok(world)
}

pub fn load_world_file(path: impl AsRef<Path>) -> Result<WorldModel, WorldError> {
    load_world(&std::fs::read(path)?)
}

/// Canonical form: sets ordered by name/id, object keys sorted, two-space
/// indentation, trailing newline.
pub fn save_world(world: &WorldModel) -> Vec<u8> {
    // serde_json::Value keeps object keys sorted
    let value = serde_json::to_value(world).expect("world serializes");
    let mut out = serde_json::to_vec_pretty(&value).expect("value serializes");
    out.push(b'\n');
    out
}
