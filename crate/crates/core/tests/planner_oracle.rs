mod common;

use wmeval_core::agents::{bfs_search, goal_norm, greedy_search};
use wmeval_core::simulator::{apply_action, apply_plan, enumerate_invocations, DEFAULT_MAX_TRIGGER_DEPTH};
use wmeval_core::worldmodel::WorldModel;
use wmeval_core::NormWeights;

/// Best goal score reachable within `depth` steps and the fewest steps that
/// reach it, by trying every invocation sequence.
fn exhaustive(state: &WorldModel, goal: &WorldModel, depth: usize, w: &NormWeights) -> (f64, usize) {
    let here = goal_norm(goal, state, w);
    let mut best = (here, 0);
    if depth == 0 {
        return best;
    }
    for inv in enumerate_invocations(state) {
        let Ok(t) = apply_action(state, &inv, DEFAULT_MAX_TRIGGER_DEPTH) else { continue };
        if t.preconditions_failed {
            continue;
        }
        let (s, n) = exhaustive(&t.after, goal, depth - 1, w);
        if s > best.0 || (s == best.0 && n + 1 < best.1) {
            best = (s, n + 1);
        }
    }
    best
}

#[test]
fn bfs_matches_exhaustive_search_on_every_shipped_world() {
    let w = NormWeights::default();
    for (name, world, goal, horizon) in common::shipped_scenarios() {
        let (best, len) = exhaustive(&world, &goal, horizon, &w);
        let plan = bfs_search(&world, &goal, horizon, &w, DEFAULT_MAX_TRIGGER_DEPTH);
        let end = apply_plan(&world, &plan.steps, DEFAULT_MAX_TRIGGER_DEPTH).unwrap().world;
        assert_eq!(goal_norm(&goal, &end, &w), best, "{name}: quality");
        assert_eq!(plan.steps.len(), len, "{name}: plan length");
        assert!(plan.steps.len() <= horizon);
    }
}

#[test]
fn bfs_never_loses_to_greedy_and_never_costs_less() {
    let w = NormWeights::default();
    for (name, world, goal, horizon) in common::shipped_scenarios() {
        let b = bfs_search(&world, &goal, horizon, &w, DEFAULT_MAX_TRIGGER_DEPTH);
        let g = greedy_search(&world, &goal, horizon, &w, DEFAULT_MAX_TRIGGER_DEPTH);
        let q = |steps| goal_norm(&goal, &apply_plan(&world, steps, DEFAULT_MAX_TRIGGER_DEPTH).unwrap().world, &w);
        assert!(q(&b.steps) >= q(&g.steps), "{name}");
        assert!(b.cost_units >= g.cost_units, "{name}");
    }
}

#[test]
fn switches_are_solved_in_two_toggles() {
    let (_, world, goal, horizon) = common::shipped_scenarios().remove(0);
    let plan = bfs_search(&world, &goal, horizon, &NormWeights::default(), DEFAULT_MAX_TRIGGER_DEPTH);
    let names: Vec<String> = plan.steps.iter().map(|s| s.to_string()).collect();
    assert_eq!(names, ["toggle(switch=switch_1)", "toggle(switch=switch_2)"]);
}

#[test]
fn horizon_zero_is_an_empty_plan_of_unit_cost() {
    let (_, world, goal, _) = common::shipped_scenarios().remove(1);
    for f in [bfs_search, greedy_search] {
        let p = f(&world, &goal, 0, &NormWeights::default(), DEFAULT_MAX_TRIGGER_DEPTH);
        assert!(p.steps.is_empty());
        assert_eq!(p.cost_units, 1);
    }
}
