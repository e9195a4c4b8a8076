use alloc::format;

use nalgebra::{Vector3, Vector6};

use super::{ThrusterLayout, VehicleParams, N_THRUSTERS};
use crate::geometry::{so3_exp, Pose, Vec3};
use crate::{invalid, Error, Result};

pub type Vec6 = Vector6<f64>;

pub const GRAVITY: f64 = 9.81;

/// Full simulation state: pose, body twist `[u v w p q r]` and the actual
/// (lagged) thruster forces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleState {
    pub pose: Pose,
    pub twist: Vec6,
    pub thrust: [f64; N_THRUSTERS],
}

impl VehicleState {
    pub fn at_rest(pose: Pose) -> Self {
        Self { pose, twist: Vec6::zeros(), thrust: [0.0; N_THRUSTERS] }
    }

    pub fn linear_velocity(&self) -> Vec3 {
        Vec3::new(self.twist[0], self.twist[1], self.twist[2])
    }

    pub fn angular_velocity(&self) -> Vec3 {
        Vec3::new(self.twist[3], self.twist[4], self.twist[5])
    }
}

/// `1/2 nu^T M nu` with the total (rigid + added) diagonal mass.
pub fn kinetic_energy(twist: &Vec6, params: &VehicleParams) -> f64 {
    let m = params.total_mass();
    0.5 * (0..6).map(|k| m[k] * twist[k] * twist[k]).sum::<f64>()
}

/// Advances the vehicle by one physics substep with semi-implicit Euler.
///
/// Thruster forces first relax towards the commanded steady-state thrust
/// (exact first-order lag), then the body velocity is updated from
/// `M nu_dot = tau + g - C(nu) nu - D(nu) nu`, and the pose is integrated with
/// the new velocity (`R <- R exp(omega dt)`).
pub fn dynamics_step(
    state: &VehicleState,
    commands: &[f64; N_THRUSTERS],
    dt: f64,
    params: &VehicleParams,
    layout: &ThrusterLayout,
) -> Result<VehicleState> {
    if !(dt > 0.0 && dt <= 0.05) {
        return Err(invalid(format!("dt {dt} outside (0, 0.05]")));
    }
    if !commands.iter().all(|u| (-1.0..=1.0).contains(u)) {
        return Err(invalid("thruster commands must lie in [-1, 1]"));
    }

    let decay = libm::exp(-dt / layout.time_constant());
    let mut thrust = state.thrust;
    for (i, f) in thrust.iter_mut().enumerate() {
        let target = layout.thrust_from_command(i, commands[i]);
        *f = target + (*f - target) * decay;
    }
    let tau = layout.wrench(&thrust);
    let restoring = restoring_wrench(&state.pose, params);

    let nu = state.twist;
    let v = Vector3::new(nu[0], nu[1], nu[2]);
    let w = Vector3::new(nu[3], nu[4], nu[5]);
    let inertia = Vector3::from(params.inertia);
    let coriolis_lin = w.cross(&v) * params.mass;
    let coriolis_ang = w.cross(&inertia.component_mul(&w));

    let m_total = params.total_mass();
    let mut next_twist = Vec6::zeros();
    for k in 0..6 {
        let coriolis = if k < 3 { coriolis_lin[k] } else { coriolis_ang[k - 3] };
        let drag = (params.linear_drag[k] + params.quadratic_drag[k] * nu[k].abs()) * nu[k];
        let accel = (tau[k] + restoring[k] - coriolis - drag) / m_total[k];
        next_twist[k] = nu[k] + dt * accel;
    }

    let rotation = state.pose.rotation;
    let lin = Vec3::new(next_twist[0], next_twist[1], next_twist[2]);
    let ang = Vec3::new(next_twist[3], next_twist[4], next_twist[5]);
    let position = state.pose.position + rotation.transform(&lin) * dt;
    let rotation = rotation * so3_exp(&(ang * dt));

    let next = VehicleState { pose: Pose::new(position, rotation), twist: next_twist, thrust };
    check_finite(&next)?;
    Ok(next)
}

/// Hydrostatic wrench in the body frame from net buoyancy and the lever arm
/// between the centres of buoyancy and gravity.
fn restoring_wrench(pose: &Pose, params: &VehicleParams) -> Vec6 {
    let rt = pose.rotation.transpose();
    // NED: positive buoyancy pushes towards -z.
    let net = rt.transform(&Vec3::new(0.0, 0.0, -params.buoyancy_offset));
    let buoyancy = params.mass * GRAVITY + params.buoyancy_offset;
    let moment = Vec3::from(params.cob_offset).cross(&rt.transform(&Vec3::new(0.0, 0.0, -buoyancy)));
    Vec6::new(net.x, net.y, net.z, moment.x, moment.y, moment.z)
}

fn check_finite(state: &VehicleState) -> Result<()> {
    const TWIST: [&str; 6] = ["surge", "sway", "heave", "roll rate", "pitch rate", "yaw rate"];
    for (k, v) in state.twist.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::SimulationDiverged { component: format!("twist.{}", TWIST[k]) });
        }
    }
    for (k, v) in state.pose.position.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::SimulationDiverged { component: format!("position.{}", ["x", "y", "z"][k]) });
        }
    }
    if !state.pose.rotation.matrix().iter().all(|v| v.is_finite()) {
        return Err(Error::SimulationDiverged { component: "rotation".into() });
    }
    if let Some(i) = state.thrust.iter().position(|f| !f.is_finite()) {
        return Err(Error::SimulationDiverged { component: format!("thrust[{i}]") });
    }
    Ok(())
}
