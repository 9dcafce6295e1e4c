use super::{Agent, Plan, PlanRequest};
use crate::simulator::{ActionInvocation, Episode, PropertyChange};
use crate::task::EnumerableTask;
use crate::worldmodel::WorldModel;
use std::collections::HashMap;

pub const FALLBACK_FLAG: &str = "fallback";

/// A precomputed input → best output table. It answers every input of its
/// task optimally and never learns anything.
#[derive(Debug, Clone, Default)]
pub struct LookupAgent {
    table: HashMap<String, ActionInvocation>,
}

impl LookupAgent {
    pub fn new(task: &EnumerableTask) -> Self {
        let table = task
            .inputs
            .iter()
            .filter_map(|input| {
                let best = task.ranked_outputs(input).into_iter().next()?;
                Some((input.state_digest(), best.invocation))
            })
            .collect();
        Self { table }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Agent for LookupAgent {
    fn kind(&self) -> &str {
        "lookup"
    }

    fn observe(&mut self, _episode: &Episode) {}

    fn plan_for(&mut self, request: &PlanRequest) -> Plan {
        match self.table.get(&request.state.state_digest()) {
            Some(inv) => Plan::new(vec![inv.clone()], 1),
            None => {
                let mut plan = Plan::new(request.options.first().cloned().into_iter().collect(), 1);
                plan.flags.push(FALLBACK_FLAG.to_string());
                plan
            }
        }
    }

    fn predict(&mut self, _state: &WorldModel, _invocation: &ActionInvocation) -> Vec<PropertyChange> {
        Vec::new()
    }

    fn describe(&self) -> WorldModel {
        WorldModel::new()
    }
}
