use super::{apply_action, enumerate_invocations, ActionInvocation, GroundTruthWorld};
use crate::worldmodel::WorldModel;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// One observed step. States are views: action schemas are never included,
/// and fired triggers are not reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub before: WorldModel,
    pub invocation: ActionInvocation,
    pub after: WorldModel,
    /// The action was refused (failed preconditions or a divergent
    /// cascade); `after` equals `before`.
    #[serde(default)]
    pub refused: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Episode {
    pub observations: Vec<Observation>,
}

/// A random walk of `length` uniformly drawn invocations starting from the
/// ground-truth state.
pub fn sample_episode<R: Rng + ?Sized>(truth: &GroundTruthWorld, length: usize, rng: &mut R) -> Episode {
    let mut state = truth.world.clone();
    let mut observations = Vec::with_capacity(length);
    for _ in 0..length {
        let options = enumerate_invocations(&state);
        if options.is_empty() {
            break;
        }
        let inv = options[rng.gen_range(0..options.len())].clone();
        let before = state.state_view();
        let (next, refused) = match apply_action(&state, &inv, truth.max_trigger_depth) {
            Ok(t) if !t.preconditions_failed => (t.after, false),
            _ => (state.clone(), true),
        };
        observations.push(Observation { before, invocation: inv, after: next.state_view(), refused });
        state = next;
    }
    Episode { observations }
}

pub fn sample_batch<R: Rng + ?Sized>(
    truth: &GroundTruthWorld,
    episodes: usize,
    length: usize,
    rng: &mut R,
) -> Vec<Episode> {
    (0..episodes).map(|_| sample_episode(truth, length, rng)).collect()
}
