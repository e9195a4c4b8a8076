//! `aquadrl` command-line interface.

use std::path::{Path, PathBuf};

use aquadrl_core::agents::Algo;
use aquadrl_core::env::RewardProfile;
use aquadrl_core::harness::{train, EvalGrid, TrainConfig, TrainEvent};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::checkpoint::Checkpoint;
use crate::config::RunConfig;
use crate::eval::{evaluate_parallel, ControllerSpec};
use crate::io::write_atomic;
use crate::plot::{plot, PlotKind};
use crate::records::{aggregate_rows, reward_rows, to_csv, AggregateRow, EpisodeRow, RewardRow};
use crate::{Error, Result};

/// Environment variable naming the root for auto-named run directories.
pub const OUT_ENV: &str = "AQUADRL_OUT";

#[derive(Debug, Parser)]
#[command(name = "aquadrl", version, about = "Underwater-vehicle pose regulation: simulation, deep RL training and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train an agent and write its checkpoint, reward curve and manifest.
    Train(TrainArgs),
    /// Evaluate a policy checkpoint or the PID baseline on a start grid.
    Eval(EvalArgs),
    /// Train several algorithms under identical settings and emit aligned reward curves.
    Compare(CompareArgs),
    /// Render a figure from a previously written CSV.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Learning algorithm: tqc, sac or td3.
    #[arg(long)]
    pub algo: Option<Algo>,
    /// Reward profile: hp (high precision) or ea (energy aware).
    #[arg(long)]
    pub profile: Option<RewardProfile>,
    /// Environment steps to train for.
    #[arg(long)]
    pub steps: Option<u64>,
    /// Seed for network initialisation, start poses, exploration and sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Environment steps between periodic checkpoints (0 disables them).
    #[arg(long)]
    pub checkpoint_every: Option<u64>,
    /// Output directory; defaults to an auto-named directory under $AQUADRL_OUT or ./runs.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("controller_source").required(true).args(["policy", "controller"])))]
pub struct EvalArgs {
    /// Policy checkpoint to evaluate.
    #[arg(long)]
    pub policy: Option<PathBuf>,
    /// Built-in controller to evaluate.
    #[arg(long, value_parser = ["pid"])]
    pub controller: Option<String>,
    /// Start grid: full (729 starts), positions (27) or smoke (3).
    #[arg(long)]
    pub grid: Option<EvalGrid>,
    /// Run configuration; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Parallel evaluation workers.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also write per-step trajectories.csv.
    #[arg(long)]
    pub trajectories: bool,
    /// Output directory; defaults to an auto-named directory under $AQUADRL_OUT or ./runs.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_value = "tqc,sac,td3")]
    pub algos: Vec<Algo>,
    /// Environment steps per algorithm.
    #[arg(long)]
    pub steps: Option<u64>,
    /// Seed shared by every algorithm.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reward profile: hp or ea.
    #[arg(long)]
    pub profile: Option<RewardProfile>,
    /// Run configuration; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; defaults to an auto-named directory under $AQUADRL_OUT or ./runs.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Input CSV; repeat to combine files.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Figure: reward (rewards.csv), pose or traj3d (trajectories.csv), power (aggregate.csv).
    #[arg(long)]
    pub kind: PlotKind,
    /// Output SVG; defaults to the first input with an .svg extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl clap::ValueEnum for PlotKind {
    fn value_variants<'a>() -> &'a [Self] {
        &[PlotKind::Reward, PlotKind::Pose, PlotKind::Traj3d, PlotKind::Power]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            PlotKind::Reward => "reward",
            PlotKind::Pose => "pose",
            PlotKind::Traj3d => "traj3d",
            PlotKind::Power => "power",
        }))
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    status: &'a str,
    seed: u64,
    outputs: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<String>,
    /// Fully resolved configuration, loadable with `--config`.
    config: String,
}

fn write_manifest(dir: &Path, command: &str, status: &str, cfg: &RunConfig, outputs: &[&str], errors: Vec<String>) -> Result<()> {
    let m = Manifest {
        tool: "aquadrl",
        version: env!("CARGO_PKG_VERSION"),
        command,
        status,
        seed: cfg.run.seed,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        errors,
        config: cfg.to_toml()?,
    };
    let text = serde_json::to_string_pretty(&m).map_err(|e| Error::Config(e.to_string()))?;
    write_atomic(&dir.join("manifest.json"), text.as_bytes())?;
    // The resolved config alone, for `--config` reuse.
    write_atomic(&dir.join("config.toml"), m.config.as_bytes())
}

fn out_dir(explicit: Option<PathBuf>, name: &str) -> PathBuf {
    explicit.unwrap_or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("runs")).join(name))
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

pub fn cmd_train(a: TrainArgs) -> Result<()> {
    let mut cfg = RunConfig::load(&a.config)?;
    if let Some(v) = a.algo {
        cfg.run.algo = v;
    }
    if let Some(v) = a.profile {
        cfg.run.profile = v;
    }
    if let Some(v) = a.steps {
        cfg.run.steps = v;
    }
    if let Some(v) = a.seed {
        cfg.run.seed = v;
    }
    if let Some(v) = a.checkpoint_every {
        cfg.run.checkpoint_every = (v > 0).then_some(v);
    }
    cfg.validate()?;
    let r = cfg.run.clone();
    let dir = out_dir(a.out, &format!("train-{}-{}-s{}", r.algo, r.profile.name(), r.seed));

    let mut env = cfg.make_env()?;
    let agent_cfg = cfg.agent_config(r.algo);
    let snapshot = |step: u64, policy: &aquadrl_core::agents::Policy| {
        Checkpoint::new(r.algo, r.profile, r.seed, step, cfg.observation, policy.clone())
    };
    let tc = TrainConfig { steps: r.steps, seed: r.seed, checkpoint_every: r.checkpoint_every };
    let mut observer = |ev: TrainEvent<'_>| -> aquadrl_core::Result<()> {
        match ev {
            TrainEvent::EpisodeEnd { episode, step, reward, .. } => {
                if episode % 10 == 0 {
                    eprintln!("episode {episode:>5}  step {step:>9}  reward {reward:>12.2}");
                }
            }
            TrainEvent::Checkpoint { step, policy } => {
                let path = dir.join("checkpoints").join(format!("step-{step:09}.json"));
                snapshot(step, policy).save(&path).map_err(|e| aquadrl_core::Error::InvalidInput(e.to_string()))?;
            }
        }
        Ok(())
    };
    let label = r.algo.name();
    match train(&mut env, &agent_cfg, &tc, &mut observer) {
        Ok(outcome) => {
            snapshot(r.steps, &outcome.policy).save(&dir.join("checkpoint.json"))?;
            write_atomic(&dir.join("rewards.csv"), &to_csv(&reward_rows(label, &outcome.curve))?)?;
            write_manifest(&dir, "train", "ok", &cfg, &["checkpoint.json", "rewards.csv"], Vec::new())?;
            println!("wrote {} ({} episodes, {} updates)", dir.display(), outcome.curve.len(), outcome.updates);
            Ok(())
        }
        Err(f) => {
            snapshot(f.at_step, &f.last_good).save(&dir.join("checkpoint.json"))?;
            write_atomic(&dir.join("rewards.csv"), &to_csv(&reward_rows(label, &f.curve))?)?;
            write_manifest(&dir, "train", "failed", &cfg, &["checkpoint.json", "rewards.csv"], vec![f.to_string()])?;
            Err(Error::Training(format!("{f}; last good checkpoint kept in {}", dir.display())))
        }
    }
}

fn print_summary(label: &str, grid: EvalGrid, ok: usize, failed: usize, rows: &[AggregateRow]) {
    println!("controller {label}  grid {}  episodes {ok} ok / {failed} failed", grid.name());
    println!("{:<14} {:>14} {:>14}", "metric", "mean", "std");
    for r in rows {
        println!("{:<14} {:>14.4} {:>14.4}", r.metric, r.mean, r.std);
    }
}

pub fn cmd_eval(a: EvalArgs) -> Result<()> {
    let mut cfg = load_config(a.config.as_deref())?;
    if let Some(g) = a.grid {
        cfg.run.grid = g;
    }
    if let Some(w) = a.workers {
        cfg.run.workers = w;
    }
    // Everything that can fail on input is checked before any output exists.
    let spec = match (&a.policy, &a.controller) {
        (Some(p), _) => {
            let ck = Checkpoint::load(p)?;
            cfg.observation = ck.observation;
            cfg.run.profile = ck.profile;
            cfg.run.algo = ck.algo;
            ControllerSpec::Policy { label: format!("{}-{}", ck.algo, ck.profile.name()), policy: ck.policy }
        }
        (None, Some(_)) => ControllerSpec::Pid(Box::new(cfg.pid.clone())),
        (None, None) => return Err(Error::Config("either --policy or --controller is required".into())),
    };
    cfg.validate()?;
    let label = spec.label();
    let dir = out_dir(a.out, &format!("eval-{label}-{}", cfg.run.grid.name()));

    let starts = cfg.run.grid.starts();
    let ev = evaluate_parallel(&cfg, &spec, &starts, cfg.run.workers, a.trajectories)?;
    let rows: Vec<EpisodeRow> = ev.outcomes.iter().map(EpisodeRow::from_outcome).collect();
    let agg = aggregate_rows(&label, &ev.outcomes)?;
    let failed = ev.outcomes.iter().filter(|o| o.result.is_err()).count();

    write_atomic(&dir.join("episodes.csv"), &to_csv(&rows)?)?;
    write_atomic(&dir.join("aggregate.csv"), &to_csv(&agg)?)?;
    let mut outputs = vec!["episodes.csv", "aggregate.csv"];
    if a.trajectories {
        write_atomic(&dir.join("trajectories.csv"), &to_csv(&ev.trajectories)?)?;
        outputs.push("trajectories.csv");
    }
    let errors: Vec<String> = ev.outcomes.iter().filter_map(|o| o.result.as_ref().err().map(|e| format!("start {}: {e}", o.start.index))).collect();
    write_manifest(&dir, "eval", "ok", &cfg, &outputs, errors)?;
    print_summary(&label, cfg.run.grid, rows.len() - failed, failed, &agg);
    Ok(())
}

pub fn cmd_compare(a: CompareArgs) -> Result<()> {
    let mut cfg = load_config(a.config.as_deref())?;
    if let Some(v) = a.steps {
        cfg.run.steps = v;
    }
    if let Some(v) = a.seed {
        cfg.run.seed = v;
    }
    if let Some(v) = a.profile {
        cfg.run.profile = v;
    }
    cfg.validate()?;
    if a.algos.is_empty() {
        return Err(Error::Config("--algos needs at least one algorithm".into()));
    }
    let names: Vec<&str> = a.algos.iter().map(|x| x.name()).collect();
    let dir = out_dir(a.out, &format!("compare-{}-{}-s{}", names.join("-"), cfg.run.profile.name(), cfg.run.seed));

    let tc = TrainConfig { steps: cfg.run.steps, seed: cfg.run.seed, checkpoint_every: None };
    let mut rows: Vec<RewardRow> = Vec::new();
    let mut errors = Vec::new();
    for algo in &a.algos {
        let mut env = cfg.make_env()?;
        eprintln!("training {algo}");
        let curve = match train(&mut env, &cfg.agent_config(*algo), &tc, &mut |_| Ok(())) {
            Ok(o) => o.curve,
            Err(f) => {
                errors.push(format!("{algo}: {f}"));
                f.curve
            }
        };
        rows.extend(reward_rows(algo.name(), &curve));
    }
    write_atomic(&dir.join("rewards.csv"), &to_csv(&rows)?)?;
    let status = if errors.is_empty() { "ok" } else { "failed" };
    write_manifest(&dir, "compare", status, &cfg, &["rewards.csv"], errors.clone())?;
    println!("wrote {}", dir.display());
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Training(errors.join("; ")))
    }
}

pub fn cmd_plot(a: PlotArgs) -> Result<()> {
    let out = a.out.unwrap_or_else(|| a.input[0].with_extension("svg"));
    plot(a.kind, &a.input, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
