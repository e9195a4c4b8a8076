use alloc::vec::Vec;

use crate::{invalid, Error, Result};

/// Quantile midpoints `tau_m = (2m - 1) / (2M)` for `m = 1..=M`.
pub fn quantile_midpoints(m: usize) -> Vec<f64> {
    (1..=m).map(|k| (2 * k - 1) as f64 / (2 * m) as f64).collect()
}

/// Asymmetric Huber quantile-regression loss.
///
/// Averages `|tau_m - 1{u < 0}| * L_kappa(u) / kappa` over all `M x K` pairs
/// with `u = target_k - predicted_m`. Writes `d loss / d predicted` into
/// `grad` (overwriting it) and returns the loss.
pub fn quantile_huber_loss(predicted: &[f64], targets: &[f64], taus: &[f64], kappa: f64, grad: &mut [f64]) -> Result<f64> {
    let m = predicted.len();
    if m == 0 || targets.is_empty() {
        return Err(invalid("quantile loss needs at least one prediction and one target"));
    }
    if taus.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: taus.len() });
    }
    if grad.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: grad.len() });
    }
    if !(kappa > 0.0) {
        return Err(invalid("kappa must be positive"));
    }
    if taus.iter().any(|t| !(*t > 0.0 && *t < 1.0)) || taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("quantile levels must be strictly increasing in (0, 1)"));
    }

    let scale = 1.0 / (m * targets.len()) as f64;
    let mut loss = 0.0;
    for (i, (&theta, &tau)) in predicted.iter().zip(taus).enumerate() {
        let mut g = 0.0;
        for &y in targets {
            let u = y - theta;
            let weight = if u < 0.0 { 1.0 - tau } else { tau };
            let abs = u.abs();
            let (huber, slope) = if abs <= kappa { (0.5 * u * u, u) } else { (kappa * (abs - 0.5 * kappa), kappa * u.signum()) };
            loss += weight * huber / kappa;
            // d/dtheta = -d/du
            g -= weight * slope / kappa;
        }
        grad[i] = g * scale;
    }
    Ok(loss * scale)
}
