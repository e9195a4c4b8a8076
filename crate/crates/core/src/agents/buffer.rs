use alloc::vec::Vec;

use rand::Rng;

use crate::env::{Action, Observation, ACTION_DIM, OBS_DIM};
use crate::{invalid, Result, SimRng};

/// One environment interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub obs: Observation,
    pub action: Action,
    pub reward: f64,
    pub next_obs: Observation,
    /// True only for genuine terminations; step-limit truncation keeps
    /// bootstrapping.
    pub done: bool,
}

/// Column-oriented minibatch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Batch {
    pub size: usize,
    /// `size x OBS_DIM`
    pub obs: Vec<f64>,
    /// `size x ACTION_DIM`
    pub actions: Vec<f64>,
    pub rewards: Vec<f64>,
    pub next_obs: Vec<f64>,
    pub dones: Vec<f64>,
}

impl Batch {
    pub fn from_transitions(ts: &[Transition]) -> Self {
        let mut b = Batch { size: ts.len(), ..Default::default() };
        for t in ts {
            b.obs.extend_from_slice(&t.obs.0);
            b.actions.extend_from_slice(&t.action.0);
            b.rewards.push(t.reward);
            b.next_obs.extend_from_slice(&t.next_obs.0);
            b.dones.push(if t.done { 1.0 } else { 0.0 });
        }
        b
    }
}

/// Fixed-capacity ring buffer that overwrites its oldest entries.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    cursor: usize,
    items: Vec<Transition>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(invalid("replay buffer capacity must be positive"));
        }
        Ok(Self { capacity, cursor: 0, items: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    /// Stored transitions, oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        let split = if self.items.len() < self.capacity { 0 } else { self.cursor };
        self.items[split..].iter().chain(&self.items[..split])
    }

    /// `n` indices drawn uniformly with replacement from the filled region.
    pub fn sample_indices(&self, n: usize, rng: &mut SimRng) -> Result<Vec<usize>> {
        if self.items.is_empty() {
            return Err(invalid("cannot sample from an empty replay buffer"));
        }
        if n == 0 {
            return Err(invalid("sample size must be positive"));
        }
        Ok((0..n).map(|_| rng.gen_range(0..self.items.len())).collect())
    }

    pub fn sample(&self, n: usize, rng: &mut SimRng) -> Result<Batch> {
        let idx = self.sample_indices(n, rng)?;
        let mut b = Batch {
            size: n,
            obs: Vec::with_capacity(n * OBS_DIM),
            actions: Vec::with_capacity(n * ACTION_DIM),
            rewards: Vec::with_capacity(n),
            next_obs: Vec::with_capacity(n * OBS_DIM),
            dones: Vec::with_capacity(n),
        };
        for i in idx {
            let t = &self.items[i];
            b.obs.extend_from_slice(&t.obs.0);
            b.actions.extend_from_slice(&t.action.0);
            b.rewards.push(t.reward);
            b.next_obs.extend_from_slice(&t.next_obs.0);
            b.dones.push(if t.done { 1.0 } else { 0.0 });
        }
        Ok(b)
    }
}
