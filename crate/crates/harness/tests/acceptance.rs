//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::process::Command;
use wmeval_core::agents::{bfs_search, goal_norm, greedy_search, Agent, CapacityBudget, LearningAgent, LookupAgent};
use wmeval_core::metrics::{
    intelligence_score, knowledge_score, measure_learning, skill_score, DataBatch, MetricParams, PlanningMode,
    Scenario, ScoreComponents,
};
use wmeval_core::protocol::{elicit_world_model, InProcessSession, ProbePlan};
use wmeval_core::rng::{stream, STREAM_BATCH};
use wmeval_core::simulator::{
    apply_action, apply_plan, enumerate_invocations, sample_batch, GroundTruthWorld, DEFAULT_MAX_TRIGGER_DEPTH,
};
use wmeval_core::task::{EnumerableTask, DEFAULT_MAX_STATES};
use wmeval_core::worldmodel::{
    diff_worlds, world_norm, ActionSchema, ModelSchema, ObjectInstance, Relationship, WorldDelta, WorldModel,
};
use wmeval_core::NormWeights;
use wmeval_harness::{load_config, run_experiment};

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const DEPTH: usize = DEFAULT_MAX_TRIGGER_DEPTH;
const TOL: f64 = 1e-12;

fn norm_axioms() -> Check {
    let w = NormWeights::default();
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = common::random_world(&mut rng);
        let y = if seed % 4 == 0 { x.clone() } else { common::random_world(&mut rng) };
        let n = world_norm(&x, &y, &w).map_err(|e| e.to_string())?;
        let back = world_norm(&y, &x, &w).map_err(|e| e.to_string())?;
        ensure(n > 0.0 && n <= 1.0, || format!("seed {seed}: norm {n} outside (0, 1]"))?;
        ensure(n.to_bits() == back.to_bits(), || format!("seed {seed}: asymmetric {n} vs {back}"))?;
        let zero = diff_worlds(&x, &y).map_err(|e| e.to_string())?.is_zero();
        ensure((n == 1.0) == zero, || format!("seed {seed}: norm {n} but zero diff is {zero}"))?;

        let mut grown = y.clone();
        grown.add_model(ModelSchema::new("zz_model", vec![]));
        let after_model = world_norm(&x, &grown, &w).unwrap();
        grown.add_action(ActionSchema::new("zz_action", vec![]));
        let after_action = world_norm(&x, &grown, &w).unwrap();
        grown.add_object(ObjectInstance::new("zz_obj", "zz_model"));
        let after_object = world_norm(&x, &grown, &w).unwrap();
        grown.add_relationship(Relationship::new("zz_kind", "zz_obj", "zz_obj"));
        let after_rel = world_norm(&x, &grown, &w).unwrap();
        let chain = [n, after_model, after_action, after_object, after_rel];
        ensure(chain.windows(2).all(|p| p[1] < p[0]), || format!("seed {seed}: not strictly decreasing {chain:?}"))?;
    }
    Ok(())
}

fn norm_spot_values() -> Check {
    let w = NormWeights::default();
    let a = WorldDelta { delta_m: 1.0, ..Default::default() }.norm(&w);
    let b = WorldDelta { delta_m: 3.0, delta_a: 4.0, ..Default::default() }.norm(&w);
    ensure((a - 0.5).abs() < TOL, || format!("(1,0,0,0) gave {a}"))?;
    ensure((b - 1.0 / 6.0).abs() < TOL, || format!("(3,4,0,0) gave {b}"))
}

fn comps(k: f64, q: f64, c: u64, dk: f64, dq: f64, dc: f64) -> ScoreComponents {
    ScoreComponents { knowledge: k, plan_quality: q, plan_cost: c, d_knowledge: dk, d_planning: dq, d_cost: dc }
}

fn params(w: [f64; 6]) -> MetricParams {
    MetricParams::new(w, NormWeights::default()).unwrap()
}

fn score_spot_values() -> Check {
    let a = intelligence_score(&comps(1.0, 1.0, 1, 0.0, 0.0, 0.0), &params([1.0; 6]));
    let b = intelligence_score(&comps(0.0, 0.0, 1, 0.0, 0.0, 2.0), &params([0.0, 0.0, 1.0, 0.0, 0.0, 1.0]));
    ensure((a - 2.0).abs() < TOL, || format!("all-ones gave {a}"))?;
    ensure((b + 2.0).abs() < TOL, || format!("zeta-only gave {b}"))
}

fn component_isolation() -> Check {
    let samples = [
        comps(0.8, 0.3, 9, 0.1, -0.2, 0.3),
        comps(0.15894454156, 1.0, 1, 0.0068, 0.016, 0.06),
        comps(1.0, 0.0, 0, -1.5, 2.5, -0.25),
    ];
    for c in samples {
        let raw = [
            c.knowledge,
            c.plan_quality / c.plan_cost.max(1) as f64,
            c.d_knowledge,
            c.d_planning,
            -c.d_cost,
        ];
        for (slot, expected) in [0usize, 1, 3, 4, 5].into_iter().zip(raw) {
            let mut w = [0.0; 6];
            w[2] = 1.0;
            w[slot] = 1.0;
            let got = intelligence_score(&c, &params(w));
            ensure(got == expected, || format!("weight {slot} on {c:?}: {got} != {expected}"))?;
        }
    }
    Ok(())
}

fn switches_setup() -> (GroundTruthWorld, WorldModel, usize) {
    let (_, world, goal, horizon) = common::shipped_scenarios().remove(0);
    (GroundTruthWorld::new(world, 42).unwrap(), goal, horizon)
}

fn skill_without_intelligence() -> Check {
    let (truth, goal, horizon) = switches_setup();
    let w = NormWeights::default();
    let task = EnumerableTask::reachable(&truth, goal.clone(), w, DEFAULT_MAX_STATES).map_err(|e| e.to_string())?;
    let mut s = InProcessSession::new(Box::new(LookupAgent::new(&task)));
    let skill = skill_score(&mut s, &task, 1).map_err(|e| e.to_string())?;
    ensure(skill.score == 1.0, || format!("lookup skill {}", skill.score))?;
    let batch = DataBatch::new(sample_batch(&truth, 50, 8, &mut stream(42, STREAM_BATCH)))?;
    let scenario = Scenario { truth: &truth, goal, horizon, probes: ProbePlan::new(64)?, weights: w };
    let r = measure_learning(&mut s, &batch, &scenario).map_err(|e| e.to_string())?;
    for mode in [PlanningMode::Internal, PlanningMode::Grounded] {
        let d = r.derivatives(mode);
        ensure(d == (0.0, 0.0, 0.0), || format!("{mode:?} learning terms {d:?}"))?;
    }
    Ok(())
}

fn knowledge_after(truth: &GroundTruthWorld, budget: CapacityBudget, seed: u64, checkpoints: &[usize]) -> Vec<f64> {
    let last = *checkpoints.iter().max().unwrap();
    let batch = sample_batch(truth, last, 8, &mut stream(seed, STREAM_BATCH));
    let w = NormWeights::default();
    let mut agent = LearningAgent::new(budget, 4, w, DEPTH);
    let mut seen = 0;
    checkpoints
        .iter()
        .map(|&n| {
            for ep in &batch[seen..n] {
                agent.observe(ep);
            }
            seen = n;
            let mut s = InProcessSession::new(Box::new(agent.clone()));
            let e = elicit_world_model(&mut s, &ProbePlan::new(64).unwrap()).unwrap();
            knowledge_score(&e.world, truth, &w).unwrap()
        })
        .collect()
}

fn learning_curve() -> Check {
    let truth = common::truth("switches.world");
    let k = knowledge_after(&truth, CapacityBudget::unbounded(), 42, &[0, 200]);
    ensure(k[1] > k[0], || format!("0 episodes {} vs 200 episodes {}", k[0], k[1]))?;
    let text = std::fs::read_to_string(common::fixtures_dir().join("learning_curve.json")).map_err(|e| e.to_string())?;
    let fixture: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let points = fixture["points"].as_array().ok_or("fixture has no points")?;
    let pinned = |n: u64| {
        points.iter().find(|p| p[0].as_u64() == Some(n)).and_then(|p| p[1].as_f64()).ok_or(format!("no point {n}"))
    };
    let (p0, p200) = (pinned(0)?, pinned(200)?);
    ensure((k[0] - p0).abs() < TOL && (k[1] - p200).abs() < TOL, || {
        format!("measured ({}, {}) vs pinned ({p0}, {p200})", k[0], k[1])
    })
}

fn capacity_ordering() -> Check {
    for name in ["switches.world", "grid_transport.world", "battery.world", "two_rules.world"] {
        let truth = common::truth(name);
        let big = knowledge_after(&truth, CapacityBudget::unbounded(), 11, &[50])[0];
        let small = knowledge_after(&truth, CapacityBudget::new(1)?, 11, &[50])[0];
        ensure(big >= small, || format!("{name}: unbounded {big} < budget-1 {small}"))?;
        if name == "two_rules.world" {
            ensure(big > small, || format!("{name}: unbounded {big} not above budget-1 {small}"))?;
        }
    }
    Ok(())
}

fn exhaustive(state: &WorldModel, goal: &WorldModel, depth: usize, w: &NormWeights) -> f64 {
    let mut best = goal_norm(goal, state, w);
    if depth > 0 {
        for inv in enumerate_invocations(state) {
            if let Ok(t) = apply_action(state, &inv, DEPTH) {
                if !t.preconditions_failed {
                    best = best.max(exhaustive(&t.after, goal, depth - 1, w));
                }
            }
        }
    }
    best
}

fn planner_oracle() -> Check {
    let w = NormWeights::default();
    for (name, world, goal, horizon) in common::shipped_scenarios() {
        let quality = |steps: &[_]| goal_norm(&goal, &apply_plan(&world, steps, DEPTH).unwrap().world, &w);
        let best = exhaustive(&world, &goal, horizon, &w);
        let bfs = quality(&bfs_search(&world, &goal, horizon, &w, DEPTH).steps);
        let greedy = quality(&greedy_search(&world, &goal, horizon, &w, DEPTH).steps);
        ensure(bfs == best, || format!("{name}: bfs {bfs} vs exhaustive {best}"))?;
        ensure(bfs >= greedy, || format!("{name}: bfs {bfs} < greedy {greedy}"))?;
    }
    Ok(())
}

fn speed_accuracy() -> Check {
    let text = std::fs::read_to_string(common::fixtures_dir().join("speed_accuracy.json")).map_err(|e| e.to_string())?;
    let pair: Vec<ScoreComponents> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let [fast, slow] = pair.as_slice() else { return Err("fixture needs two entries".into()) };
    let at = |gamma: f64| {
        let p = params([1.0, 1.0, gamma, 0.0, 0.0, 0.0]);
        (intelligence_score(fast, &p), intelligence_score(slow, &p))
    };
    let (f, s) = at(0.5);
    ensure(f > s, || format!("gamma 0.5: fast {f} <= slow {s}"))?;
    let (f, s) = at(2.0);
    ensure(s > f, || format!("gamma 2: slow {s} <= fast {f}"))
}

fn full_config() -> std::path::PathBuf {
    common::fixtures_dir().join("full.cfg")
}

fn loopback_transparency() -> Check {
    let cfg = load_config(&full_config()).map_err(|e| e.to_string())?;
    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for twin in report.agents.iter().filter(|a| a.transport == "loopback") {
        let base = twin.name.trim_end_matches("_loopback");
        let direct = report.agents.iter().find(|a| a.name == base).ok_or(format!("no in-process twin for {base}"))?;
        ensure(direct.transport == "in_process", || format!("{base} is not in-process"))?;
        let same = direct.components == twin.components
            && direct.intelligence.map(|i| (i.internal.to_bits(), i.grounded.to_bits()))
                == twin.intelligence.map(|i| (i.internal.to_bits(), i.grounded.to_bits()))
            && direct.skill == twin.skill
            && direct.causal == twin.causal
            && direct.diagnostics == twin.diagnostics;
        ensure(same && direct.components.is_some(), || format!("{base} differs over loopback"))?;
        pairs += 1;
    }
    ensure(pairs >= 4, || format!("only {pairs} loopback pairs"))
}

fn run_cli(out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_wmeval"))
        .args(["run", "--config"])
        .arg(full_config())
        .arg("--out")
        .arg(out)
        .args(["--seed", "42"])
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("run exited with {status}"))?;
    std::fs::read(out.join("report.json")).map_err(|e| e.to_string())
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = run_cli(&tmp.path().join("a"))?;
    let b = run_cli(&tmp.path().join("b"))?;
    ensure(a == b, || "reports differ".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("norm axioms", norm_axioms),
        ("norm spot values", norm_spot_values),
        ("score spot values", score_spot_values),
        ("component isolation", component_isolation),
        ("skill without intelligence", skill_without_intelligence),
        ("learning curve", learning_curve),
        ("capacity ordering", capacity_ordering),
        ("planner oracle", planner_oracle),
        ("speed/accuracy tradeoff", speed_accuracy),
        ("loopback transparency", loopback_transparency),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
