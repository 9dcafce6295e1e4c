use anyhow::{anyhow, Context as _};
use clap::{Parser, Subcommand, ValueEnum};
use std::io::{BufReader, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;
use wmeval_core::protocol::serve_session;
use wmeval_core::simulator::{GroundTruthWorld, DEFAULT_MAX_TRIGGER_DEPTH};
use wmeval_core::task::{EnumerableTask, DEFAULT_MAX_STATES};
use wmeval_core::worldmodel::{load_world, save_world, WorldError};
use wmeval_core::NormWeights;
use wmeval_harness::config::{load_config, AgentKind};
use wmeval_harness::offline::{load_components, load_params, score_offline};
use wmeval_harness::run_experiment;
use wmeval_harness::runner::{build_agent, AgentRecipe};

#[derive(Parser)]
#[command(name = "wmeval", version, about = "Evaluate agents against a symbolic ground-truth world")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured agent and write report.json and scores.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check a world file and list every problem found.
    Validate { world: PathBuf },
    /// Print a world file in canonical form.
    Fmt {
        world: PathBuf,
        /// Rewrite the file in place.
        #[arg(long)]
        write: bool,
    },
    /// Recompute intelligence scores from stored components.
    Score {
        #[arg(long)]
        components: PathBuf,
        #[arg(long)]
        params: PathBuf,
    },
    /// Expose a reference agent over the protocol on stdin/stdout or TCP.
    ServeAgent {
        #[arg(long, value_enum)]
        kind: ServeKind,
        /// Experiment config supplying world, goal, horizon and weights.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Internal model for planners (defaults to the config's world).
        #[arg(long)]
        world: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Listen on this address and serve one connection.
        #[arg(long)]
        tcp: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ServeKind {
    Random,
    Lookup,
    Bfs,
    Greedy,
    Learning,
}

impl From<ServeKind> for AgentKind {
    fn from(k: ServeKind) -> Self {
        match k {
            ServeKind::Random => AgentKind::Random,
            ServeKind::Lookup => AgentKind::Lookup,
            ServeKind::Bfs => AgentKind::Bfs,
            ServeKind::Greedy => AgentKind::Greedy,
            ServeKind::Learning => AgentKind::Learning,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Run { config, out, seed, workers } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.config.seed = s;
            }
            if workers.is_some() {
                cfg.config.workers = workers;
            }
            let report = run_experiment(&cfg)?;
            report.write(&out)?;
            for a in report.agents.iter().filter(|a| a.error.is_some()) {
                eprintln!("agent `{}` failed: {}", a.name, a.error.as_deref().unwrap_or_default());
            }
            Ok(if report.any_failed() { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Command::Validate { world } => {
            let bytes = std::fs::read(&world).with_context(|| format!("reading {}", world.display()))?;
            match load_world(&bytes) {
                Ok(w) => {
                    println!(
                        "{}: ok ({} models, {} actions, {} objects, {} relationships)",
                        world.display(),
                        w.models.len(),
                        w.actions.len(),
                        w.objects.len(),
                        w.relationships.len()
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(WorldError::Invalid(violations)) => {
                    for v in violations {
                        println!("{}: {v}", world.display());
                    }
                    Ok(ExitCode::FAILURE)
                }
                Err(e) => {
                    println!("{}: {e}", world.display());
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Fmt { world, write } => {
            let bytes = std::fs::read(&world).with_context(|| format!("reading {}", world.display()))?;
            let canonical = save_world(&load_world(&bytes).with_context(|| world.display().to_string())?);
            if write {
                std::fs::write(&world, canonical)?;
            } else {
                std::io::stdout().write_all(&canonical)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Score { components, params } => {
            let source = load_components(&components)?;
            let params = load_params(&params)?;
            for s in score_offline(&source, &params)? {
                println!("{}", serde_json::to_string(&s)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ServeAgent { kind, config, world, horizon, budget, seed, tcp } => {
            serve(kind.into(), config, world, horizon, budget, seed, tcp)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn serve(
    kind: AgentKind,
    config: Option<PathBuf>,
    world: Option<PathBuf>,
    horizon: Option<usize>,
    budget: Option<usize>,
    seed: u64,
    tcp: Option<String>,
) -> anyhow::Result<()> {
    let cfg = config.as_deref().map(load_config).transpose()?;
    let weights = cfg.as_ref().map(|c| c.config.params.norm_weights).unwrap_or_default();
    let depth = cfg.as_ref().map_or(DEFAULT_MAX_TRIGGER_DEPTH, |c| c.config.scenario.max_trigger_depth);
    let horizon = horizon.or(cfg.as_ref().map(|c| c.config.scenario.horizon)).unwrap_or(1);
    let world_path = world.or_else(|| cfg.as_ref().map(|c| c.resolve(&c.config.world)));
    let model = world_path
        .as_ref()
        .map(|p| wmeval_core::worldmodel::load_world_file(p).with_context(|| p.display().to_string()))
        .transpose()?;
    let task = match (kind, &cfg) {
        (AgentKind::Lookup, Some(c)) => Some(lookup_task(c, weights)?),
        (AgentKind::Lookup, None) => return Err(anyhow!("a lookup agent needs --config to build its table")),
        _ => None,
    };
    let make = || build_agent(AgentRecipe { kind, seed, horizon, weights, max_depth: depth, model: model.clone(), budget, task: task.as_ref() });
    match tcp {
        None => {
            let stdin = std::io::stdin().lock();
            serve_session(make()?, stdin, std::io::stdout().lock())?;
        }
        Some(addr) => {
            let listener = TcpListener::bind(&addr).with_context(|| format!("binding {addr}"))?;
            eprintln!("listening on {}", listener.local_addr()?);
            let (stream, _) = listener.accept()?;
            let reader = BufReader::new(stream.try_clone()?);
            serve_session(make()?, reader, stream)?;
        }
    }
    Ok(())
}

fn lookup_task(cfg: &wmeval_harness::LoadedConfig, weights: NormWeights) -> anyhow::Result<EnumerableTask> {
    let c = &cfg.config;
    let world = wmeval_core::worldmodel::load_world_file(cfg.resolve(&c.world))?;
    let truth = GroundTruthWorld::with_depth(world, c.seed, c.scenario.max_trigger_depth)?;
    let goal = truth.world.with_overrides(&c.scenario.goal)?;
    let bound = c.scenario.max_task_states.min(DEFAULT_MAX_STATES);
    Ok(EnumerableTask::reachable(&truth, goal, weights, bound)?)
}
