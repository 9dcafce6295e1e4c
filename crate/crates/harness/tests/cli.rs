use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use wmeval_harness::report::{EvaluationReport, Status};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn wmeval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmeval")).args(args).current_dir(root()).output().unwrap()
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    wmeval(&args)
}

fn report(dir: &Path) -> EvaluationReport {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn identical_runs_write_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let cfg = root().join("fixtures/full.cfg");
    assert!(run(&cfg, &a, &["--seed", "42", "--workers", "4"]).status.success());
    assert!(run(&cfg, &b, &["--seed", "42", "--workers", "1"]).status.success());
    for f in ["report.json", "scores.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let r = report(&a);
    assert_eq!(r.agents.len(), 10);
    assert!(r.agents.iter().all(|a| a.status == Status::Ok));
}

#[test]
fn learning_agent_learns_more_than_lookup() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run(&root().join("fixtures/full.cfg"), tmp.path(), &[]).status.success());
    let r = report(tmp.path());
    let dk = |name: &str| r.agents.iter().find(|a| a.name == name).unwrap().components.unwrap().internal.d_knowledge;
    assert_eq!(dk("lookup"), 0.0);
    assert!(dk("learning") > dk("lookup"));
}

#[test]
fn report_digest_matches_the_config_bytes() {
    use sha2::{Digest, Sha256};
    let tmp = tempfile::tempdir().unwrap();
    let cfg = root().join("fixtures/capacity.cfg");
    assert!(run(&cfg, tmp.path(), &[]).status.success());
    let expected = hex::encode(Sha256::digest(std::fs::read(&cfg).unwrap()));
    assert_eq!(report(tmp.path()).config_digest, expected);
}

#[test]
fn missing_world_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(
        &cfg,
        "world = \"nowhere.world\"\nseed = 1\n[scenario]\nhorizon = 2\n[[agents]]\nname = \"r\"\nkind = \"random\"\n",
    )
    .unwrap();
    let o = run(&cfg, &tmp.path().join("out"), &[]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not exist"));
    assert!(!tmp.path().join("out/report.json").exists());
}

#[test]
fn shipped_worlds_validate_cleanly() {
    for name in ["switches", "grid_transport", "battery", "two_rules"] {
        let o = wmeval(&["validate", &format!("worlds/{name}.world")]);
        assert!(o.status.success(), "{name}");
        assert!(stdout(&o).contains(": ok ("));
    }
}

#[test]
fn validate_lists_every_violation() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("broken.world");
    std::fs::write(
        &p,
        r#"{"models": [{"name": "m", "properties": [{"name": "x", "kind": "integer", "min": 0, "max": 3}]}],
            "objects": [{"id": "a", "model": "m", "values": {"x": 9}}, {"id": "b", "model": "ghost"}]}"#,
    )
    .unwrap();
    let o = wmeval(&["validate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("object `a`: value 9 of `x` out of domain"), "{out}");
    assert!(out.contains("object `b`: unknown model `ghost`"), "{out}");
}

#[test]
fn fmt_is_the_identity_on_canonical_files() {
    let o = wmeval(&["fmt", "worlds/battery.world"]);
    assert!(o.status.success());
    assert_eq!(o.stdout, std::fs::read(root().join("worlds/battery.world")).unwrap());
}

#[test]
fn offline_scoring_of_the_unit_fixture() {
    let o = wmeval(&["score", "--components", "fixtures/unit_components.json", "--params", "fixtures/unit_params.toml"]);
    assert!(o.status.success());
    let line: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(line["intelligence"]["internal"], 2.0);
}

#[test]
fn alpha_only_offline_score_is_the_stored_knowledge() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run(&root().join("fixtures/grid.cfg"), tmp.path(), &[]).status.success());
    let r = report(tmp.path());
    let path = tmp.path().join("report.json");
    let o = wmeval(&["score", "--components", path.to_str().unwrap(), "--params", "fixtures/alpha_params.toml"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), r.agents.len());
    for (line, agent) in lines.iter().zip(&r.agents) {
        let c = agent.components.unwrap();
        assert_eq!(line["name"], agent.name.as_str());
        assert_eq!(line["intelligence"]["internal"].as_f64().unwrap(), c.internal.knowledge);
        assert_eq!(line["intelligence"]["grounded"].as_f64().unwrap(), c.grounded.knowledge);
    }
}

fn write_cfg(dir: &Path, agents: &str) -> PathBuf {
    let root = root();
    let text = format!(
        "world = \"{}\"\nseed = 42\n[scenario]\nhorizon = 4\nprobe_budget = 64\nepisodes = 20\n\
         [scenario.goal]\nswitch_1 = {{ on = true }}\nswitch_2 = {{ on = true }}\n{agents}",
        root.join("worlds/switches.world").display()
    );
    let p = dir.join("exp.cfg");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn remote_stdio_agent_scores_like_the_in_process_one() {
    let tmp = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_wmeval");
    let world = root().join("worlds/switches.world");
    let agents = format!(
        "[[agents]]\nname = \"local\"\nkind = \"bfs\"\nmodel = \"{w}\"\n\
         [[agents]]\nname = \"remote\"\nkind = \"remote\"\n\
         command = [\"{bin}\", \"serve-agent\", \"--kind\", \"bfs\", \"--world\", \"{w}\", \"--horizon\", \"4\"]\n\
         [[agents]]\nname = \"remote_learner\"\nkind = \"remote\"\n\
         command = [\"{bin}\", \"serve-agent\", \"--kind\", \"learning\", \"--horizon\", \"4\"]\n\
         [[agents]]\nname = \"local_learner\"\nkind = \"learning\"\n",
        w = world.display()
    );
    let cfg = write_cfg(tmp.path(), &agents);
    let o = run(&cfg, &tmp.path().join("out"), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&tmp.path().join("out"));
    let get = |n: &str| r.agents.iter().find(|a| a.name == n).unwrap();
    for (local, remote) in [("local", "remote"), ("local_learner", "remote_learner")] {
        let (l, m) = (get(local), get(remote));
        assert_eq!(m.transport, "stdio");
        assert_eq!(l.components, m.components);
        assert_eq!(l.skill, m.skill);
        assert_eq!(l.causal, m.causal);
    }
}

#[test]
fn a_failing_remote_agent_does_not_affect_the_others() {
    let tmp = tempfile::tempdir().unwrap();
    let agents = "[[agents]]\nname = \"broken\"\nkind = \"remote\"\ncommand = [\"/nonexistent/agent\"]\n\
                  [[agents]]\nname = \"quits\"\nkind = \"remote\"\ncommand = [\"true\"]\n\
                  [[agents]]\nname = \"fine\"\nkind = \"learning\"\n";
    let cfg = write_cfg(tmp.path(), agents);
    let o = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&tmp.path().join("out"));
    assert_eq!(r.agents[0].status, Status::Failed);
    assert_eq!(r.agents[1].status, Status::Failed);
    assert!(r.agents[0].components.is_none());
    assert_eq!(r.agents[2].status, Status::Ok);

    let alone = write_cfg(tmp.path(), "[[agents]]\nname = \"fine\"\nkind = \"learning\"\n");
    assert!(run(&alone, &tmp.path().join("alone"), &[]).status.success());
    assert_eq!(report(&tmp.path().join("alone")).agents[0].components, r.agents[2].components);
}

#[test]
fn serve_agent_speaks_the_protocol_on_stdio() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_wmeval"))
        .args(["serve-agent", "--kind", "random"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    writeln!(stdin, r#"{{"type":"hello","session":"s","payload":{{"version":"1"}}}}"#).unwrap();
    writeln!(stdin, r#"{{"type":"probe","session":"s","payload":{{"kind":"list_models"}}}}"#).unwrap();
    writeln!(stdin, r#"{{"type":"shutdown","session":"s"}}"#).unwrap();
    drop(stdin);
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines,
        [
            r#"{"type":"hello","session":"s","payload":{"agent":"random","version":"1"}}"#,
            r#"{"type":"probe_response","session":"s","payload":{"kind":"models","models":[]}}"#,
        ]
    );
}
