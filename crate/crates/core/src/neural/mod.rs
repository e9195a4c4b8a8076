//! Minimal feed-forward network machinery with exact gradients.

mod gaussian;
mod loss;
mod mlp;
mod optim;

pub use gaussian::{squashed_backward, squashed_sample, SquashedSample, LOG_STD_MAX, LOG_STD_MIN};
pub use loss::{quantile_huber_loss, quantile_midpoints};
pub use mlp::{Activation, ForwardCache, Mlp};
pub use optim::{adam_step, polyak_blend, AdamState};
