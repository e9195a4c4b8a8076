use alloc::vec::Vec;

use crate::{invalid, Error, Result};

/// Root mean square of a series.
pub fn rmse(series: &[f64]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(libm::sqrt(series.iter().map(|e| e * e).sum::<f64>() / series.len() as f64))
}

/// Tolerance band defining a settled pose.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SettlingBand {
    /// Per-axis position tolerance, m.
    pub position: f64,
    /// Attitude error magnitude tolerance, rad.
    pub attitude: f64,
}

impl Default for SettlingBand {
    fn default() -> Self {
        Self { position: 0.2, attitude: 0.1 }
    }
}

impl SettlingBand {
    pub fn validate(&self) -> Result<()> {
        if !(self.position > 0.0 && self.attitude > 0.0) {
            return Err(invalid("settling band tolerances must be positive"));
        }
        Ok(())
    }

    /// `e = [e_x, e_y, e_z, theta]`.
    pub fn contains(&self, e: &[f64; 4]) -> bool {
        e[..3].iter().all(|v| v.abs() <= self.position) && e[3] <= self.attitude
    }
}

/// Time after which every remaining sample stays inside `band`.
///
/// Sample `k` is taken at `k * dt`; sample 0 is the initial state. A series
/// whose last sample is outside the band returns `(len - 1) * dt`, the
/// episode duration.
pub fn settling_time(errors: &[[f64; 4]], dt: f64, band: &SettlingBand) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptySeries);
    }
    let last = errors.len() - 1;
    let mut first = errors.len();
    while first > 0 && band.contains(&errors[first - 1]) {
        first -= 1;
    }
    Ok(first.min(last) as f64 * dt)
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(Summary { mean, std: libm::sqrt(var), n: values.len() })
}

/// Per-episode evaluation record.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodeMetrics {
    pub rmse_x: f64,
    pub rmse_y: f64,
    pub rmse_z: f64,
    pub rmse_theta: f64,
    pub settling_time: f64,
    pub mean_power: f64,
    pub energy: f64,
    pub final_x: f64,
    pub final_y: f64,
    pub final_z: f64,
    pub final_theta: f64,
    pub total_reward: f64,
}

impl EpisodeMetrics {
    /// Metric names in [`EpisodeMetrics::values`] order.
    pub const NAMES: [&'static str; 12] = [
        "rmse_x",
        "rmse_y",
        "rmse_z",
        "rmse_theta",
        "settling_time",
        "mean_power",
        "energy",
        "final_x",
        "final_y",
        "final_z",
        "final_theta",
        "total_reward",
    ];

    pub fn values(&self) -> [f64; 12] {
        [
            self.rmse_x,
            self.rmse_y,
            self.rmse_z,
            self.rmse_theta,
            self.settling_time,
            self.mean_power,
            self.energy,
            self.final_x,
            self.final_y,
            self.final_z,
            self.final_theta,
            self.total_reward,
        ]
    }
}

/// Mean and standard deviation of every metric over successful episodes.
pub fn aggregate(metrics: &[EpisodeMetrics]) -> Result<Vec<(&'static str, Summary)>> {
    let mut out = Vec::with_capacity(EpisodeMetrics::NAMES.len());
    for (k, name) in EpisodeMetrics::NAMES.iter().enumerate() {
        let column: Vec<f64> = metrics.iter().map(|m| m.values()[k]).collect();
        out.push((*name, summarize(&column)?));
    }
    Ok(out)
}
