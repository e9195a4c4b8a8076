use alloc::format;

use crate::{invalid, Result};

pub const PWM_NEUTRAL_US: f64 = 1500.0;
pub const PWM_MIN_US: f64 = 1100.0;
pub const PWM_MAX_US: f64 = 1900.0;

/// Affine map from ESC pulse width to the normalised command: 1500 us is
/// stopped, 1900 us full forward, 1100 us full reverse.
pub fn pwm_normalize(pwm_us: f64) -> Result<f64> {
    if !(PWM_MIN_US..=PWM_MAX_US).contains(&pwm_us) {
        return Err(invalid(format!("pwm {pwm_us} us outside [1100, 1900]")));
    }
    Ok((pwm_us - PWM_NEUTRAL_US) / (PWM_MAX_US - PWM_NEUTRAL_US))
}

/// Quartic electrical power model of one thruster, per command branch.
///
/// `P(u) = max(0, c1|u| + c2|u|^2 + c3|u|^3 + c4|u|^4)` using the forward
/// coefficients for `u >= 0` and the reverse ones otherwise. Coefficients
/// come from a least-squares fit of tabulated power against PWM
/// (`scripts/fit_power_model.py`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerModel {
    pub forward: [f64; 4],
    pub reverse: [f64; 4],
}

impl Default for PowerModel {
    fn default() -> Self {
        Self {
            forward: [-8.232187495917826, 17.532060208724573, 474.35221574178814, -93.82556850159578],
            reverse: [-7.979360238672167, 17.59914140881338, 448.3734003751172, -88.14112836639354],
        }
    }
}

impl PowerModel {
    /// Checks non-negativity and monotonicity in `|u|` on a dense grid.
    pub fn new(forward: [f64; 4], reverse: [f64; 4]) -> Result<Self> {
        let model = Self { forward, reverse };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.forward.iter().chain(&self.reverse).all(|c| c.is_finite()) {
            return Err(invalid("power coefficients must be finite"));
        }
        for (name, sign) in [("forward", 1.0), ("reverse", -1.0)] {
            let mut last = 0.0;
            for k in 0..=1000 {
                let p = self.power(sign * k as f64 / 1000.0);
                if p < last - 1e-12 {
                    return Err(invalid(format!("{name} power branch is not monotone in |u|")));
                }
                last = p;
            }
        }
        Ok(())
    }

    /// Electrical power in W for normalised command `u` in `[-1, 1]`.
    pub fn power(&self, u: f64) -> f64 {
        let c = if u >= 0.0 { &self.forward } else { &self.reverse };
        let x = u.abs();
        let p = x * (c[0] + x * (c[1] + x * (c[2] + x * c[3])));
        p.max(0.0)
    }

    /// Total power of a command vector.
    pub fn total_power(&self, commands: &[f64]) -> f64 {
        commands.iter().map(|&u| self.power(u)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pwm_examples() {
        assert_eq!(pwm_normalize(1500.0).unwrap(), 0.0);
        assert_eq!(pwm_normalize(1900.0).unwrap(), 1.0);
        assert_eq!(pwm_normalize(1100.0).unwrap(), -1.0);
        assert_eq!(pwm_normalize(1300.0).unwrap(), -0.5);
        assert!(pwm_normalize(1099.0).is_err());
        assert!(pwm_normalize(2000.0).is_err());
    }

    #[test]
    fn neutral_draws_nothing() {
        let m = PowerModel::default();
        m.validate().unwrap();
        assert_eq!(m.power(0.0), 0.0);
        assert_eq!(m.total_power(&[0.0; 8]), 0.0);
    }

    #[test]
    fn full_scale_matches_fit() {
        let m = PowerModel::default();
        let full: f64 = m.forward.iter().sum();
        assert!((m.power(1.0) - full).abs() < 1e-12);
        assert!((full - 389.83).abs() < 0.01);
    }

    #[test]
    fn rejects_decreasing_model() {
        assert!(PowerModel::new([100.0, -200.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]).is_err());
    }
}
