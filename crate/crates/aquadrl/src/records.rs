//! CSV schemas for evaluation, training and trajectory outputs.
//!
//! | file               | columns |
//! |--------------------|---------|
//! | `episodes.csv`     | `index,x,y,z,roll,pitch,heading,status,rmse_x,rmse_y,rmse_z,rmse_theta,settling_time,mean_power,energy,final_x,final_y,final_z,final_theta,total_reward,error` |
//! | `aggregate.csv`    | `controller,metric,mean,std,n` |
//! | `rewards.csv`      | `algo,episode,reward,moving_average` |
//! | `trajectories.csv` | `episode,t,x,y,z,roll,pitch,heading,u,v,w,p,q,r,cmd_0..cmd_7,e_x,e_y,e_z,theta,r_position,r_attitude,r_smoothness,r_usage,power,reward` |
//!
//! Episode numbers in `rewards.csv` start at 1; `moving_average` is empty
//! until a full window is available. Failed evaluation episodes have
//! `status = failed`, empty metric columns and a message in `error`.
//! Trajectory sample 0 of each episode is the start state with zero twist,
//! commands, reward terms and power.

use std::path::Path;

use aquadrl_core::harness::{aggregate, EpisodeMetrics, EvalOutcome, RewardCurve, TrajectoryPoint};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub roll: f64,
    pub pitch: f64,
    pub heading: f64,
    pub status: String,
    pub rmse_x: Option<f64>,
    pub rmse_y: Option<f64>,
    pub rmse_z: Option<f64>,
    pub rmse_theta: Option<f64>,
    pub settling_time: Option<f64>,
    pub mean_power: Option<f64>,
    pub energy: Option<f64>,
    pub final_x: Option<f64>,
    pub final_y: Option<f64>,
    pub final_z: Option<f64>,
    pub final_theta: Option<f64>,
    pub total_reward: Option<f64>,
    pub error: String,
}

impl EpisodeRow {
    pub fn from_outcome(o: &EvalOutcome) -> Self {
        let [x, y, z, roll, pitch, heading] = o.start.xyzrph;
        let (status, m, error) = match &o.result {
            Ok(m) => ("ok", Some(m.values()), String::new()),
            Err(e) => ("failed", None, e.to_string()),
        };
        let v = |k: usize| m.map(|a| a[k]);
        Self {
            index: o.start.index,
            x,
            y,
            z,
            roll,
            pitch,
            heading,
            status: status.into(),
            rmse_x: v(0),
            rmse_y: v(1),
            rmse_z: v(2),
            rmse_theta: v(3),
            settling_time: v(4),
            mean_power: v(5),
            energy: v(6),
            final_x: v(7),
            final_y: v(8),
            final_z: v(9),
            final_theta: v(10),
            total_reward: v(11),
            error,
        }
    }

    /// Metrics of a successful episode.
    pub fn metrics(&self) -> Option<EpisodeMetrics> {
        Some(EpisodeMetrics {
            rmse_x: self.rmse_x?,
            rmse_y: self.rmse_y?,
            rmse_z: self.rmse_z?,
            rmse_theta: self.rmse_theta?,
            settling_time: self.settling_time?,
            mean_power: self.mean_power?,
            energy: self.energy?,
            final_x: self.final_x?,
            final_y: self.final_y?,
            final_z: self.final_z?,
            final_theta: self.final_theta?,
            total_reward: self.total_reward?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub controller: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Mean and population standard deviation of each metric over the
/// successful episodes. Empty when no episode succeeded.
pub fn aggregate_rows(controller: &str, outcomes: &[EvalOutcome]) -> Result<Vec<AggregateRow>> {
    let ok: Vec<EpisodeMetrics> = outcomes.iter().filter_map(|o| o.result.as_ref().ok().copied()).collect();
    if ok.is_empty() {
        return Ok(Vec::new());
    }
    Ok(aggregate(&ok)?
        .into_iter()
        .map(|(name, s)| AggregateRow { controller: controller.into(), metric: name.into(), mean: s.mean, std: s.std, n: s.n })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardRow {
    pub algo: String,
    pub episode: usize,
    pub reward: f64,
    pub moving_average: Option<f64>,
}

pub fn reward_rows(algo: &str, curve: &RewardCurve) -> Vec<RewardRow> {
    let w = RewardCurve::WINDOW;
    let ma = curve.moving_average(w);
    curve
        .rewards
        .iter()
        .enumerate()
        .map(|(i, &reward)| RewardRow {
            algo: algo.into(),
            episode: i + 1,
            reward,
            moving_average: (i + 1 >= w).then(|| ma[i + 1 - w]),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub episode: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub roll: f64,
    pub pitch: f64,
    pub heading: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub cmd_0: f64,
    pub cmd_1: f64,
    pub cmd_2: f64,
    pub cmd_3: f64,
    pub cmd_4: f64,
    pub cmd_5: f64,
    pub cmd_6: f64,
    pub cmd_7: f64,
    pub e_x: f64,
    pub e_y: f64,
    pub e_z: f64,
    pub theta: f64,
    pub r_position: f64,
    pub r_attitude: f64,
    pub r_smoothness: f64,
    pub r_usage: f64,
    pub power: f64,
    pub reward: f64,
}

impl TrajectoryRow {
    pub fn new(episode: usize, pt: &TrajectoryPoint) -> Self {
        let [x, y, z, roll, pitch, heading] = pt.pose;
        let [u, v, w, p, q, r] = pt.twist;
        let [cmd_0, cmd_1, cmd_2, cmd_3, cmd_4, cmd_5, cmd_6, cmd_7] = pt.action;
        let [e_x, e_y, e_z, theta] = pt.error;
        let [r_position, r_attitude, r_smoothness, r_usage] = pt.components;
        Self {
            episode,
            t: pt.t,
            x,
            y,
            z,
            roll,
            pitch,
            heading,
            u,
            v,
            w,
            p,
            q,
            r,
            cmd_0,
            cmd_1,
            cmd_2,
            cmd_3,
            cmd_4,
            cmd_5,
            cmd_6,
            cmd_7,
            e_x,
            e_y,
            e_z,
            theta,
            r_position,
            r_attitude,
            r_smoothness,
            r_usage,
            power: pt.power,
            reward: pt.reward,
        }
    }
}

/// Serialises rows with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::csv(Path::new("<memory>"), e))?;
    }
    w.into_inner().map_err(|e| Error::csv(Path::new("<memory>"), e))
}

/// Reads every row of `path`, rejecting missing columns and bad values.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::csv(path, format!("{other:?}")),
    })?;
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec.map_err(|e| Error::csv(path, e))?);
    }
    Ok(rows)
}
