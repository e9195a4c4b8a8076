//! Training loop, evaluation grid and episode metrics.

mod episode;
mod grid;
mod metrics;
mod train;

pub use episode::{evaluate, run_episode, Controller, EpisodeRecord, EvalOutcome, PidAgent, PolicyController, TrajectoryPoint};
pub use grid::{EvalGrid, GridStart, GRID_ANGLES, GRID_XY, GRID_Z};
pub use metrics::{aggregate, rmse, settling_time, summarize, EpisodeMetrics, SettlingBand, Summary};
pub use train::{compare, train, RewardCurve, TrainConfig, TrainEvent, TrainFailure, TrainOutcome};
