use core::f64::consts::PI;
use core::ops::Index;

use crate::geometry::{attitude_error, position_error, Pose};
use crate::vehicle::{VehicleState, N_THRUSTERS};
use crate::Result;

pub const OBS_DIM: usize = 20;
pub const ACTION_DIM: usize = N_THRUSTERS;

/// Normalised thruster commands, one per thruster, each in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Action(pub [f64; ACTION_DIM]);

impl Action {
    pub const ZERO: Action = Action([0.0; ACTION_DIM]);

    /// Clamps every component into `[-1, 1]`; NaN becomes 0. Returns whether
    /// anything changed.
    pub fn clamped(self) -> (Action, bool) {
        let mut changed = false;
        let out = self.0.map(|u| {
            let c = if u.is_nan() { 0.0 } else { u.clamp(-1.0, 1.0) };
            changed |= c != u || u.is_nan();
            c
        });
        (Action(out), changed)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn in_bounds(&self) -> bool {
        self.0.iter().all(|u| (-1.0..=1.0).contains(u))
    }
}

impl Index<usize> for Action {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `[e(t) | v(t) | a(t-1)]`, every component in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation(pub [f64; OBS_DIM]);

impl Default for Observation {
    fn default() -> Self {
        Self([0.0; OBS_DIM])
    }
}

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Observation {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Divisors applied before clamping each observation block to `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObsScales {
    /// m
    pub position: f64,
    /// rad
    pub attitude: f64,
    /// m/s
    pub linear_velocity: f64,
    /// rad/s
    pub angular_velocity: f64,
}

impl Default for ObsScales {
    fn default() -> Self {
        Self { position: 6.0, attitude: PI, linear_velocity: 2.0, angular_velocity: 2.0 }
    }
}

/// Builds the normalised observation for `state` relative to `goal`.
pub fn observe(state: &VehicleState, goal: &Pose, prev: &Action, scales: &ObsScales) -> Result<Observation> {
    let ep = position_error(&state.pose.position, &goal.position);
    let ea = attitude_error(&state.pose.rotation, &goal.rotation)?;
    let mut o = [0.0; OBS_DIM];
    let norm = |v: f64, s: f64| (v / s).clamp(-1.0, 1.0);
    for k in 0..3 {
        o[k] = norm(ep[k], scales.position);
        o[3 + k] = norm(ea[k], scales.attitude);
        o[6 + k] = norm(state.twist[k], scales.linear_velocity);
        o[9 + k] = norm(state.twist[3 + k], scales.angular_velocity);
    }
    for k in 0..ACTION_DIM {
        o[12 + k] = prev.0[k].clamp(-1.0, 1.0);
    }
    Ok(Observation(o))
}
