//! Simulation, control and learning core for a holonomic 6-DOF underwater
//! vehicle driven directly through its eight thrusters.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! threads or the command line lives in the `aquadrl` companion crate.
//!
//! Layout:
//!
//! * [`geometry`] - SO(3) exponential/logarithm and the 6-DOF pose error.
//! * [`vehicle`] - rigid-body dynamics, thruster layout, allocation, power.
//! * [`env`] - the pose-regulation MDP (observation, reward, episodes).
//! * [`neural`] - small MLPs with exact gradients, Adam, quantile loss.
//! * [`agents`] - TQC, SAC, TD3, the replay buffer and the cascaded PID.
//! * [`harness`] - training loop, evaluation grid and episode metrics.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` style checks are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod agents;
pub mod env;
mod error;
pub mod geometry;
pub mod harness;
pub mod neural;
pub mod vehicle;

pub use error::{Error, Result};
pub(crate) use error::invalid;

/// Random number generator used everywhere a seed is accepted.
pub type SimRng = rand_chacha::ChaCha8Rng;
