use super::{Agent, Plan, PlanRequest};
use crate::simulator::{ActionInvocation, Episode, PropertyChange};
use crate::worldmodel::WorldModel;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Chance baseline: uniform draws from the offered invocations.
#[derive(Debug, Clone)]
pub struct RandomAgent {
    rng: ChaCha8Rng,
    horizon: usize,
}

impl RandomAgent {
    pub fn new(seed: u64, horizon: usize) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), horizon }
    }
}

impl Agent for RandomAgent {
    fn kind(&self) -> &str {
        "random"
    }

    fn observe(&mut self, _episode: &Episode) {}

    fn plan_for(&mut self, request: &PlanRequest) -> Plan {
        let steps = if request.options.is_empty() {
            Vec::new()
        } else {
            (0..self.horizon)
                .map(|_| request.options[self.rng.gen_range(0..request.options.len())].clone())
                .collect()
        };
        Plan::new(steps, 1)
    }

    fn predict(&mut self, _state: &WorldModel, _invocation: &ActionInvocation) -> Vec<PropertyChange> {
        Vec::new()
    }

    fn describe(&self) -> WorldModel {
        WorldModel::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_each_of_four_options_about_equally() {
        let options: Vec<_> = (0..4).map(|i| ActionInvocation::new(format!("a{i}"), [("x", "y")])).collect();
        let req = PlanRequest { state: WorldModel::new(), goal: WorldModel::new(), options: options.clone() };
        let mut agent = RandomAgent::new(7, 1);
        let trials = 10_000;
        let hits = (0..trials).filter(|_| agent.plan_for(&req).steps[0] == options[0]).count();
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.25).abs() < 0.02, "{freq}");
    }

    #[test]
    fn no_options_means_empty_plan() {
        let mut agent = RandomAgent::new(0, 3);
        let req = PlanRequest { state: WorldModel::new(), goal: WorldModel::new(), options: vec![] };
        assert_eq!(agent.plan_for(&req), Plan::new(vec![], 1));
        assert!(agent.describe().is_empty());
    }
}
