//! Tanh-squashed diagonal Gaussian used as the stochastic policy head.

use core::f64::consts::PI;

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;
const SQUASH_EPS: f64 = 1e-6;

/// Reparameterised sample of one action dimension, kept for the backward pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquashedSample {
    pub action: f64,
    pub log_prob: f64,
    eps: f64,
    std: f64,
    clamped: bool,
}

/// `a = tanh(mean + exp(log_std) * eps)` and its log-density including the
/// tanh change of variables.
pub fn squashed_sample(mean: f64, log_std: f64, eps: f64) -> SquashedSample {
    let clamped = !(LOG_STD_MIN..=LOG_STD_MAX).contains(&log_std);
    let log_std = log_std.clamp(LOG_STD_MIN, LOG_STD_MAX);
    let std = libm::exp(log_std);
    let action = libm::tanh(mean + std * eps);
    let log_prob = -0.5 * eps * eps - log_std - 0.5 * libm::log(2.0 * PI) - libm::log(1.0 - action * action + SQUASH_EPS);
    SquashedSample { action, log_prob, eps, std, clamped }
}

/// Chain rule through [`squashed_sample`]: given `d L / d action` and
/// `d L / d log_prob`, returns `(d L / d mean, d L / d log_std)` with `eps`
/// held fixed.
pub fn squashed_backward(s: &SquashedSample, grad_action: f64, grad_log_prob: f64) -> (f64, f64) {
    let a = s.action;
    let one_minus = 1.0 - a * a;
    let dlogp_dx = 2.0 * a * one_minus / (one_minus + SQUASH_EPS);
    let grad_x = grad_action * one_minus + grad_log_prob * dlogp_dx;
    let grad_log_std = if s.clamped { 0.0 } else { grad_x * s.std * s.eps - grad_log_prob };
    (grad_x, grad_log_std)
}
