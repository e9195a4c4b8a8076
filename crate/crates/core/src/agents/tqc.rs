use alloc::vec;
use alloc::vec::Vec;

use super::{
    accumulate_action_grad, critic_input, ensure_finite, sample_squashed, Agent, Algo, Batch, LearnerConfig, Policy, PolicyKind,
    ReplayBuffer, UpdateStats, CRITIC_INPUT_DIM,
};
use crate::env::{Action, Observation, ACTION_DIM, OBS_DIM};
use crate::neural::{adam_step, polyak_blend, quantile_huber_loss, quantile_midpoints, Activation, AdamState, Mlp};
use crate::{invalid, Error, Result, SimRng};

/// Entropy temperature handling.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "mode", rename_all = "lowercase"))]
pub enum EntropyCoef {
    /// Learned toward the entropy target, starting from `initial`.
    Auto { initial: f64, lr: f64 },
    Fixed { value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TqcConfig {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub learner: LearnerConfig,
    pub n_critics: usize,
    pub n_quantiles: usize,
    pub drop_per_critic: usize,
    pub kappa: f64,
    pub target_entropy: f64,
    pub entropy: EntropyCoef,
}

impl Default for TqcConfig {
    fn default() -> Self {
        Self {
            learner: LearnerConfig::default(),
            n_critics: 5,
            n_quantiles: 25,
            drop_per_critic: 2,
            kappa: 1.0,
            target_entropy: -(ACTION_DIM as f64),
            entropy: EntropyCoef::Auto { initial: 1.0, lr: 3e-4 },
        }
    }
}

impl TqcConfig {
    pub fn validate(&self) -> Result<()> {
        self.learner.validate()?;
        if self.n_critics == 0 || self.n_quantiles == 0 {
            return Err(invalid("TQC needs at least one critic and one quantile"));
        }
        if self.drop_per_critic >= self.n_quantiles {
            return Err(invalid("drop_per_critic must be smaller than n_quantiles"));
        }
        if !(self.kappa > 0.0) {
            return Err(invalid("kappa must be positive"));
        }
        if !self.target_entropy.is_finite() {
            return Err(invalid("entropy target must be finite"));
        }
        match self.entropy {
            EntropyCoef::Auto { initial, lr } if !(initial > 0.0 && lr > 0.0 && initial.is_finite() && lr.is_finite()) => {
                Err(invalid("automatic entropy coefficient needs positive initial value and learning rate"))
            }
            EntropyCoef::Fixed { value } if !(value >= 0.0 && value.is_finite()) => Err(invalid("fixed entropy coefficient must be non-negative")),
            _ => Ok(()),
        }
    }

    /// Number of pooled atoms kept after truncation.
    pub fn kept_atoms(&self) -> usize {
        self.n_critics * (self.n_quantiles - self.drop_per_critic)
    }
}

/// Pools `n` critics of `m` atoms each (row-major in `atoms`), sorts
/// ascending and keeps the smallest `n * (m - d)`.
pub fn truncate_pooled_quantiles(atoms: &[f64], n: usize, m: usize, d: usize) -> Result<Vec<f64>> {
    if n == 0 || m == 0 {
        return Err(invalid("quantile set needs at least one critic and one quantile"));
    }
    if atoms.len() != n * m {
        return Err(Error::DimensionMismatch { expected: n * m, got: atoms.len() });
    }
    if d >= m {
        return Err(invalid("drop per critic must be smaller than the number of quantiles"));
    }
    if !atoms.iter().all(|a| a.is_finite()) {
        return Err(invalid("quantile atoms must be finite"));
    }
    let mut pooled = atoms.to_vec();
    pooled.sort_unstable_by(f64::total_cmp);
    pooled.truncate(n * (m - d));
    Ok(pooled)
}

/// Truncated quantile critics learner.
#[derive(Debug, Clone)]
pub struct TqcAgent {
    cfg: TqcConfig,
    actor: Mlp,
    actor_opt: AdamState,
    critics: Vec<Mlp>,
    targets: Vec<Mlp>,
    critic_opts: Vec<AdamState>,
    log_alpha: f64,
    alpha_opt: Option<AdamState>,
    taus: Vec<f64>,
}

impl TqcAgent {
    pub fn new(cfg: TqcConfig, rng: &mut SimRng) -> Result<Self> {
        cfg.validate()?;
        let l = &cfg.learner;
        let actor = Mlp::new(&l.layer_sizes(OBS_DIM, 2 * ACTION_DIM), Activation::Relu, Activation::Identity, rng)?;
        let critics = (0..cfg.n_critics)
            .map(|_| Mlp::new(&l.layer_sizes(CRITIC_INPUT_DIM, cfg.n_quantiles), Activation::Relu, Activation::Identity, rng))
            .collect::<Result<Vec<_>>>()?;
        let (log_alpha, alpha_opt) = match cfg.entropy {
            EntropyCoef::Auto { initial, lr } => (libm::log(initial), Some(AdamState::new(1, lr))),
            EntropyCoef::Fixed { value } => (if value > 0.0 { libm::log(value) } else { f64::NEG_INFINITY }, None),
        };
        Ok(Self {
            actor_opt: AdamState::new(actor.param_count(), l.actor_lr),
            critic_opts: critics.iter().map(|c| AdamState::new(c.param_count(), l.critic_lr)).collect(),
            targets: critics.clone(),
            critics,
            actor,
            log_alpha,
            alpha_opt,
            taus: quantile_midpoints(cfg.n_quantiles),
            cfg,
        })
    }

    pub fn config(&self) -> &TqcConfig {
        &self.cfg
    }

    pub fn alpha(&self) -> f64 {
        match self.cfg.entropy {
            EntropyCoef::Fixed { value } => value,
            EntropyCoef::Auto { .. } => libm::exp(self.log_alpha),
        }
    }

    pub fn actor(&self) -> &Mlp {
        &self.actor
    }

    pub fn critics(&self) -> &[Mlp] {
        &self.critics
    }

    pub fn target_critics(&self) -> &[Mlp] {
        &self.targets
    }

    /// Online atoms `n_critics x n_quantiles` for one state-action pair.
    pub fn critic_atoms(&self, obs: &Observation, action: &Action) -> Result<Vec<f64>> {
        let x = critic_input(obs.as_slice(), action.as_slice(), 1);
        let mut out = Vec::with_capacity(self.cfg.n_critics * self.cfg.n_quantiles);
        for c in &self.critics {
            out.extend(c.forward(&x)?);
        }
        Ok(out)
    }

    /// Raw (untruncated) target-critic atoms at `(next_obs, next_actions)`:
    /// per row, `n_critics x n_quantiles` values.
    fn pooled_target_atoms(&self, next_obs: &[f64], next_actions: &[f64], batch: usize) -> Result<Vec<f64>> {
        let (n, m) = (self.cfg.n_critics, self.cfg.n_quantiles);
        let x = critic_input(next_obs, next_actions, batch);
        let mut pooled = vec![0.0; batch * n * m];
        for (k, t) in self.targets.iter().enumerate() {
            let cache = t.forward_batch(&x, batch)?;
            for (i, row) in cache.output().chunks_exact(m).enumerate() {
                pooled[i * n * m + k * m..i * n * m + (k + 1) * m].copy_from_slice(row);
            }
        }
        Ok(pooled)
    }

    /// Bootstrapped target atoms for `batch`, one row of
    /// [`TqcConfig::kept_atoms`] values per transition. Next actions are
    /// sampled from the current actor.
    pub fn target_atoms(&self, batch: &Batch, alpha: f64, rng: &mut SimRng) -> Result<Vec<f64>> {
        let b = batch.size;
        let (n, m, d) = (self.cfg.n_critics, self.cfg.n_quantiles, self.cfg.drop_per_critic);
        let gamma = self.cfg.learner.gamma;
        let head = self.actor.forward_batch(&batch.next_obs, b)?;
        let next = sample_squashed(head.output(), b, rng);
        let pooled = self.pooled_target_atoms(&batch.next_obs, &next.actions, b)?;
        let k = self.cfg.kept_atoms();
        let mut y = Vec::with_capacity(b * k);
        for i in 0..b {
            let kept = truncate_pooled_quantiles(&pooled[i * n * m..(i + 1) * n * m], n, m, d)?;
            let entropy = if alpha > 0.0 { alpha * next.log_probs[i] } else { 0.0 };
            let not_done = 1.0 - batch.dones[i];
            y.extend(kept.iter().map(|z| batch.rewards[i] + gamma * not_done * (z - entropy)));
        }
        Ok(y)
    }

    fn check_batch(&self, batch: &Batch) -> Result<()> {
        let b = batch.size;
        if b == 0 {
            return Err(invalid("empty minibatch"));
        }
        for (len, want) in [
            (batch.obs.len(), b * OBS_DIM),
            (batch.actions.len(), b * ACTION_DIM),
            (batch.rewards.len(), b),
            (batch.next_obs.len(), b * OBS_DIM),
            (batch.dones.len(), b),
        ] {
            if len != want {
                return Err(Error::DimensionMismatch { expected: want, got: len });
            }
        }
        Ok(())
    }
}

impl Agent for TqcAgent {
    fn algo(&self) -> Algo {
        Algo::Tqc
    }

    fn act(&self, obs: &Observation, deterministic: bool, rng: &mut SimRng) -> Result<Action> {
        self.policy().act(obs, deterministic, rng)
    }

    fn update(&mut self, buffer: &ReplayBuffer, rng: &mut SimRng) -> Result<UpdateStats> {
        let batch = buffer.sample(self.cfg.learner.batch_size, rng)?;
        self.update_batch(&batch, rng)
    }

    fn update_batch(&mut self, batch: &Batch, rng: &mut SimRng) -> Result<UpdateStats> {
        self.check_batch(batch)?;
        let b = batch.size;
        let (n, m) = (self.cfg.n_critics, self.cfg.n_quantiles);

        // Current policy at s, shared by the temperature and actor losses.
        let actor_cache = self.actor.forward_batch(&batch.obs, b)?;
        let pi = sample_squashed(actor_cache.output(), b, rng);

        let alpha = self.alpha();
        let mut alpha_loss = None;
        if let Some(opt) = self.alpha_opt.as_mut() {
            let mean_term = pi.log_probs.iter().map(|lp| lp + self.cfg.target_entropy).sum::<f64>() / b as f64;
            alpha_loss = Some(ensure_finite(-self.log_alpha * mean_term, "entropy coefficient loss")?);
            let mut la = [self.log_alpha];
            adam_step(&mut la, &[-mean_term], opt, "entropy coefficient")?;
            self.log_alpha = la[0];
        }

        let y = self.target_atoms(batch, alpha, rng)?;
        let k = self.cfg.kept_atoms();

        let x = critic_input(&batch.obs, &batch.actions, b);
        let scale = 1.0 / (b * n) as f64;
        let mut critic_loss = 0.0;
        let mut row_grad = vec![0.0; m];
        for c in 0..n {
            let cache = self.critics[c].forward_batch(&x, b)?;
            let mut upstream = vec![0.0; b * m];
            for i in 0..b {
                let pred = &cache.output()[i * m..(i + 1) * m];
                critic_loss += scale * quantile_huber_loss(pred, &y[i * k..(i + 1) * k], &self.taus, self.cfg.kappa, &mut row_grad)?;
                for (u, g) in upstream[i * m..(i + 1) * m].iter_mut().zip(&row_grad) {
                    *u = g * scale;
                }
            }
            let mut grads = self.critics[c].zero_grads();
            self.critics[c].backward(&cache, &upstream, &mut grads)?;
            adam_step(self.critics[c].params_mut(), &grads, &mut self.critic_opts[c], "critic")?;
        }
        ensure_finite(critic_loss, "critic loss")?;

        // Actor: minimise alpha * log pi - mean of all online atoms.
        let xa = critic_input(&batch.obs, &pi.actions, b);
        let atom_scale = 1.0 / (b * n * m) as f64;
        let mut q_mean = 0.0;
        let mut grad_actions = vec![0.0; b * ACTION_DIM];
        let upstream = vec![-atom_scale; b * m];
        for critic in &self.critics {
            let cache = critic.forward_batch(&xa, b)?;
            q_mean += cache.output().iter().sum::<f64>() * atom_scale;
            let dx = critic.input_gradient(&cache, &upstream)?;
            accumulate_action_grad(&dx, &mut grad_actions);
        }
        let mean_logp = pi.log_probs.iter().sum::<f64>() / b as f64;
        let actor_loss = ensure_finite(alpha * mean_logp - q_mean, "actor loss")?;
        let grad_logp = vec![alpha / b as f64; b];
        let head_grad = pi.head_gradient(&grad_actions, &grad_logp);
        let mut grads = self.actor.zero_grads();
        self.actor.backward(&actor_cache, &head_grad, &mut grads)?;
        adam_step(self.actor.params_mut(), &grads, &mut self.actor_opt, "actor")?;

        for (t, c) in self.targets.iter_mut().zip(&self.critics) {
            polyak_blend(t.params_mut(), c.params(), self.cfg.learner.tau)?;
        }

        Ok(UpdateStats { critic_loss, actor_loss: Some(actor_loss), alpha, alpha_loss })
    }

    fn policy(&self) -> Policy {
        Policy { kind: PolicyKind::SquashedGaussian, actor: self.actor.clone() }
    }

    fn batch_size(&self) -> usize {
        self.cfg.learner.batch_size
    }

    fn warmup_steps(&self) -> u64 {
        self.cfg.learner.warmup_steps
    }

    fn buffer_capacity(&self) -> usize {
        self.cfg.learner.buffer_capacity
    }
}
