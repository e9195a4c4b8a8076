//! Grid evaluation fanned out over worker threads.

use aquadrl_core::agents::{PidGains, Policy};
use aquadrl_core::harness::{run_episode, Controller, EvalOutcome, GridStart, PidAgent, PolicyController, SettlingBand};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::records::TrajectoryRow;
use crate::{Error, Result};

/// What to evaluate. Each worker builds its own controller instance.
#[derive(Debug, Clone)]
pub enum ControllerSpec {
    Pid(Box<PidGains>),
    Policy { policy: Policy, label: String },
}

impl ControllerSpec {
    pub fn label(&self) -> String {
        match self {
            ControllerSpec::Pid(_) => "pid".into(),
            ControllerSpec::Policy { label, .. } => label.clone(),
        }
    }

    fn instantiate(&self) -> Result<Box<dyn Controller + Send>> {
        Ok(match self {
            ControllerSpec::Pid(g) => Box::new(PidAgent::new((**g).clone())?),
            ControllerSpec::Policy { policy, label } => Box::new(PolicyController::new(policy.clone(), label.clone())),
        })
    }
}

pub struct Evaluation {
    /// Sorted by grid index.
    pub outcomes: Vec<EvalOutcome>,
    /// Empty unless trajectories were requested.
    pub trajectories: Vec<TrajectoryRow>,
}

/// One episode outcome with its trajectory rows.
type Run = (EvalOutcome, Vec<TrajectoryRow>);

/// Runs every start on `workers` threads. Results do not depend on the
/// worker count.
pub fn evaluate_parallel(cfg: &RunConfig, spec: &ControllerSpec, starts: &[GridStart], workers: usize, record: bool) -> Result<Evaluation> {
    // Fail early on configuration problems instead of once per episode.
    cfg.make_env()?;
    spec.instantiate()?;
    let band: SettlingBand = cfg.settling;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().map_err(|e| Error::Config(e.to_string()))?;
    let mut results: Vec<Run> = pool.install(|| {
        starts
            .par_iter()
            .map_init(
                || (cfg.make_env().expect("validated above"), spec.instantiate().expect("validated above")),
                |(env, ctl), s| {
                    let rec = run_episode(env, ctl.as_mut(), &s.pose(), &band, record);
                    let traj = match &rec {
                        Ok(r) => r.trajectory.iter().map(|p| TrajectoryRow::new(s.index, p)).collect(),
                        Err(_) => Vec::new(),
                    };
                    (EvalOutcome { start: *s, result: rec.map(|r| r.metrics) }, traj)
                },
            )
            .collect()
    });
    results.sort_by_key(|(o, _)| o.start.index);
    let mut outcomes = Vec::with_capacity(results.len());
    let mut trajectories = Vec::new();
    for (o, t) in results {
        outcomes.push(o);
        trajectories.extend(t);
    }
    Ok(Evaluation { outcomes, trajectories })
}
