//! Rigid-body model of the vehicle and its propulsion.

mod dynamics;
mod params;
mod power;
mod thrusters;

pub use dynamics::{dynamics_step, kinetic_energy, VehicleState, Vec6, GRAVITY};
pub use params::VehicleParams;
pub use power::{pwm_normalize, PowerModel, PWM_MAX_US, PWM_MIN_US, PWM_NEUTRAL_US};
pub use thrusters::{allocation_matrix, thrust_curve, Thruster, ThrusterLayout, N_THRUSTERS};
