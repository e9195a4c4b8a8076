use crate::{invalid, Error, Result};

use super::Action;

/// Reward weights `alpha_1..alpha_6`, all non-positive.
///
/// `alpha_1..alpha_3` weight `|e_x|, |e_y|, |e_z|`, `alpha_4` the attitude
/// angle, `alpha_5` command changes and `alpha_6` command magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RewardWeights(pub [f64; 6]);

impl RewardWeights {
    /// High-performance profile: no thrust-magnitude penalty.
    pub const HP: RewardWeights = RewardWeights([-4.0, -4.0, -3.0, -1.8, -1.0, 0.0]);
    /// Energy-aware profile.
    pub const EA: RewardWeights = RewardWeights([-4.0, -4.0, -3.0, -1.7, -0.8, -0.3]);

    pub fn new(alphas: [f64; 6]) -> Result<Self> {
        if alphas.iter().any(|a| !(a.is_finite() && *a <= 0.0)) {
            return Err(invalid("reward weights must be finite and <= 0"));
        }
        Ok(Self(alphas))
    }
}

/// Named reward profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum RewardProfile {
    Hp,
    Ea,
}

impl RewardProfile {
    pub fn weights(self) -> RewardWeights {
        match self {
            RewardProfile::Hp => RewardWeights::HP,
            RewardProfile::Ea => RewardWeights::EA,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RewardProfile::Hp => "hp",
            RewardProfile::Ea => "ea",
        }
    }
}

impl core::str::FromStr for RewardProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hp" => Ok(RewardProfile::Hp),
            "ea" => Ok(RewardProfile::Ea),
            other => Err(invalid(alloc::format!("unknown reward profile '{other}' (expected hp or ea)"))),
        }
    }
}

/// Position, attitude, smoothness and thrust-usage terms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RewardComponents {
    pub position: f64,
    pub attitude: f64,
    pub smoothness: f64,
    pub usage: f64,
}

impl RewardComponents {
    pub fn total(&self) -> f64 {
        self.position + self.attitude + self.smoothness + self.usage
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.position, self.attitude, self.smoothness, self.usage]
    }
}

/// Per-step reward. `errors` is `[e_x, e_y, e_z, theta_x, theta_y, theta_z]`;
/// only the position entries are used, the attitude term takes the scalar
/// angle `theta`.
pub fn reward(errors: &[f64; 6], theta: f64, action: &Action, prev: &Action, w: &RewardWeights) -> (f64, RewardComponents) {
    let a = &w.0;
    let position = a[0] * errors[0].abs() + a[1] * errors[1].abs() + a[2] * errors[2].abs();
    let attitude = a[3] * theta.abs();
    let smoothness = a[4] * action.0.iter().zip(&prev.0).map(|(t, p)| (t - p).abs()).sum::<f64>();
    let usage = a[5] * action.0.iter().map(|t| t.abs()).sum::<f64>();
    let c = RewardComponents { position, attitude, smoothness, usage };
    (c.total(), c)
}

/// Mean total power over the series and the energy `mean * n * dt`.
pub fn episode_energy(powers: &[f64], dt: f64) -> Result<(f64, f64)> {
    if powers.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mean = powers.iter().sum::<f64>() / powers.len() as f64;
    Ok((mean, mean * powers.len() as f64 * dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_examples() {
        let zero = Action::ZERO;
        let (r, c) = reward(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.0, &zero, &zero, &RewardWeights::HP);
        assert_eq!(r, -4.0);
        assert_eq!(c.position, -4.0);

        let ones = Action([1.0; 8]);
        let (r, c) = reward(&[0.0; 6], 0.0, &ones, &ones, &RewardWeights::EA);
        assert!((r - -2.4).abs() < 1e-15);
        assert_eq!(c.smoothness, 0.0);

        let half = Action([0.5; 8]);
        let (r, c) = reward(&[0.0; 6], 0.0, &half, &zero, &RewardWeights::HP);
        assert_eq!(r, -4.0);
        assert_eq!(c.usage, 0.0);
    }

    #[test]
    fn attitude_term_uses_scalar_angle() {
        let zero = Action::ZERO;
        let (_, c) = reward(&[0.0, 0.0, 0.0, 0.3, 0.4, 0.0], 0.5, &zero, &zero, &RewardWeights::HP);
        assert!((c.attitude - -0.9).abs() < 1e-15);
    }

    #[test]
    fn weights_must_be_non_positive() {
        assert!(RewardWeights::new([-1.0, 0.0, 0.0, 0.0, 0.0, 0.1]).is_err());
        assert!(RewardWeights::new([-1.0; 6]).is_ok());
    }

    #[test]
    fn energy_examples() {
        let (mean, e) = episode_energy(&[10.0; 800], 0.05).unwrap();
        assert_eq!(mean, 10.0);
        assert!((e - 400.0).abs() < 1e-9);
        assert_eq!(episode_energy(&[0.0; 5], 0.05).unwrap().0, 0.0);
        assert_eq!(episode_energy(&[10.0, 30.0], 0.05).unwrap().0, 20.0);
        assert_eq!(episode_energy(&[], 0.05), Err(Error::EmptySeries));
    }

    #[test]
    fn profile_parse() {
        assert_eq!("hp".parse::<RewardProfile>().unwrap(), RewardProfile::Hp);
        assert_eq!("ea".parse::<RewardProfile>().unwrap().weights(), RewardWeights::EA);
        assert!("xx".parse::<RewardProfile>().is_err());
    }
}
