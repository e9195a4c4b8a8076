use crate::env::Action;
use crate::geometry::{attitude_error, Pose};
use crate::vehicle::{ThrusterLayout, Vec6, VehicleState};
use crate::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxisGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl AxisGains {
    pub const fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self { kp, ki, kd }
    }
}

/// Gains and limits of the cascaded pose/velocity controller. Axis order is
/// surge, sway, heave, roll, pitch, yaw throughout.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PidGains {
    /// Pose error to desired body twist.
    pub position: [AxisGains; 6],
    /// Twist error to body wrench.
    pub velocity: [AxisGains; 6],
    pub position_integral_limit: [f64; 6],
    pub velocity_integral_limit: [f64; 6],
    /// Saturation of the desired twist, m/s and rad/s.
    pub max_twist: [f64; 6],
    /// Saturation of the commanded wrench, N and N m.
    pub max_wrench: [f64; 6],
}

impl Default for PidGains {
    fn default() -> Self {
        let lin = AxisGains::new(0.6, 0.0, 0.0);
        let ang = AxisGains::new(1.2, 0.0, 0.0);
        let vlin = AxisGains::new(120.0, 40.0, 0.0);
        let vang = AxisGains::new(25.0, 8.0, 0.0);
        Self {
            position: [lin, lin, lin, ang, ang, ang],
            velocity: [vlin, vlin, vlin, vang, vang, vang],
            position_integral_limit: [1.0; 6],
            velocity_integral_limit: [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            max_twist: [0.6, 0.6, 0.5, 0.8, 0.8, 0.8],
            max_wrench: [120.0, 120.0, 150.0, 25.0, 25.0, 25.0],
        }
    }
}

impl PidGains {
    pub fn validate(&self) -> Result<()> {
        let gains = self.position.iter().chain(&self.velocity);
        if !gains.flat_map(|g| [g.kp, g.ki, g.kd]).all(f64::is_finite) {
            return Err(invalid("PID gains must be finite"));
        }
        let limits = self.position_integral_limit.iter().chain(&self.velocity_integral_limit).chain(&self.max_twist).chain(&self.max_wrench);
        if !limits.copied().all(|l| l > 0.0 && l.is_finite()) {
            return Err(invalid("PID limits must be positive and finite"));
        }
        Ok(())
    }
}

/// Per-axis PID stage with a clamped integrator.
#[derive(Debug, Clone, Copy, Default)]
struct Loop {
    integral: [f64; 6],
    prev: Option<[f64; 6]>,
}

impl Loop {
    fn run(&mut self, error: &[f64; 6], gains: &[AxisGains; 6], i_limit: &[f64; 6], out_limit: &[f64; 6], dt: f64) -> [f64; 6] {
        let mut out = [0.0; 6];
        for k in 0..6 {
            self.integral[k] = (self.integral[k] + error[k] * dt).clamp(-i_limit[k], i_limit[k]);
            // No derivative kick on the first sample after a reset.
            let deriv = self.prev.map_or(0.0, |p| (error[k] - p[k]) / dt);
            let g = gains[k];
            out[k] = (g.kp * error[k] + g.ki * self.integral[k] + g.kd * deriv).clamp(-out_limit[k], out_limit[k]);
        }
        self.prev = Some(*error);
        out
    }
}

/// Double-loop PID: pose error in the body frame drives a desired twist,
/// twist error drives a wrench, and the wrench is allocated to thrusters.
#[derive(Debug, Clone)]
pub struct PidController {
    gains: PidGains,
    outer: Loop,
    inner: Loop,
}

impl PidController {
    pub fn new(gains: PidGains) -> Result<Self> {
        gains.validate()?;
        Ok(Self { gains, outer: Loop::default(), inner: Loop::default() })
    }

    pub fn gains(&self) -> &PidGains {
        &self.gains
    }

    /// Clears integrators and derivative memory.
    pub fn reset(&mut self) {
        self.outer = Loop::default();
        self.inner = Loop::default();
    }

    /// Body wrench requested for the current state.
    pub fn wrench(&mut self, state: &VehicleState, goal: &Pose, dt: f64) -> Result<Vec6> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("controller period must be positive"));
        }
        let r = &state.pose.rotation;
        let ep = r.transpose().transform(&(goal.position - state.pose.position));
        let ea = attitude_error(r, &goal.rotation)?;
        let pose_err = [ep.x, ep.y, ep.z, ea.x, ea.y, ea.z];
        let g = &self.gains;
        let twist_ref = self.outer.run(&pose_err, &g.position, &g.position_integral_limit, &g.max_twist, dt);
        let twist_err: [f64; 6] = core::array::from_fn(|k| twist_ref[k] - state.twist[k]);
        let w = self.inner.run(&twist_err, &g.velocity, &g.velocity_integral_limit, &g.max_wrench, dt);
        Ok(Vec6::from_column_slice(&w))
    }

    pub fn control(&mut self, state: &VehicleState, goal: &Pose, dt: f64, layout: &ThrusterLayout) -> Result<Action> {
        let w = self.wrench(state, goal, dt)?;
        Ok(Action(layout.allocate_wrench(&w)))
    }
}
