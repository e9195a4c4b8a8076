//! Statistical checks of the random start distribution and replay sampling.

use core::f64::consts::PI;

use aquadrl_core::agents::{ReplayBuffer, Transition};
use aquadrl_core::env::{sample_start, uniform_rotation, Action, EpisodeConfig, Observation};
use aquadrl_core::geometry::so3_log;
use aquadrl_core::SimRng;
use rand::SeedableRng;

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + inner + f(b)) * h / 3.0
}

#[test]
fn haar_rotation_angle_matches_quadrature() {
    // The rotation angle of a Haar-uniform rotation has density (1 - cos t) / pi.
    let density = |t: f64| (1.0 - t.cos()) / PI;
    let mass = simpson(density, 0.0, PI, 10_000);
    let mean = simpson(|t| t * density(t), 0.0, PI, 10_000);
    let second = simpson(|t| t * t * density(t), 0.0, PI, 10_000);
    assert!((mass - 1.0).abs() < 1e-12);
    let sd = (second - mean * mean).sqrt();

    let n = 200_000;
    let mut rng = SimRng::seed_from_u64(21);
    let angles: Vec<f64> = (0..n).map(|_| so3_log(&uniform_rotation(&mut rng)).unwrap().norm()).collect();
    let sample_mean = angles.iter().sum::<f64>() / n as f64;
    let se = sd / (n as f64).sqrt();
    assert!((sample_mean - mean).abs() < 4.0 * se, "sample mean {sample_mean}, quadrature {mean}, se {se}");

    // Mass below a few cut points.
    for cut in [0.5, 1.0, 2.0, 2.8] {
        let p = simpson(density, 0.0, cut, 2_000);
        let frac = angles.iter().filter(|&&t| t < cut).count() as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((frac - p).abs() < 4.0 * se, "cut {cut}: {frac} vs {p}");
    }
}

#[test]
fn start_positions_lie_in_the_shell() {
    let cfg = EpisodeConfig::default();
    let mut rng = SimRng::seed_from_u64(22);
    let mut faces = [0usize; 6];
    for _ in 0..20_000 {
        let p = sample_start(&cfg, &mut rng);
        let off = p.position - cfg.goal.position;
        let inf = off.amax();
        assert!(inf > cfg.inner_box_half && inf <= cfg.outer_box_half, "{off}");
        assert!(p.rotation.deviation() < 1e-12);
        for k in 0..3 {
            if off[k].abs() > cfg.inner_box_half {
                faces[2 * k + usize::from(off[k] > 0.0)] += 1;
            }
        }
    }
    // Symmetric shell: every face region is hit with similar frequency.
    let mean = faces.iter().sum::<usize>() as f64 / 6.0;
    assert!(faces.iter().all(|&c| (c as f64 - mean).abs() < 0.05 * mean), "{faces:?}");
}

fn marked(k: usize) -> Transition {
    let mut obs = Observation::default();
    obs.0[0] = k as f64;
    Transition { obs, action: Action::ZERO, reward: k as f64, next_obs: obs, done: false }
}

#[test]
fn replay_sampling_is_uniform() {
    let capacity = 50;
    let mut buf = ReplayBuffer::new(capacity).unwrap();
    // Overfill so that the ring has wrapped; only the newest 50 remain.
    for k in 0..80 {
        buf.push(marked(k));
    }
    assert_eq!(buf.len(), capacity);
    let mut counts = vec![0usize; capacity];
    let mut rng = SimRng::seed_from_u64(23);
    let draws = 100_000;
    let batch = buf.sample(draws, &mut rng).unwrap();
    for r in &batch.rewards {
        let k = *r as usize;
        assert!((30..80).contains(&k), "evicted transition {k} sampled");
        counts[k - 30] += 1;
    }
    let expected = draws as f64 / capacity as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // Upper 0.1% point of chi-square with 49 degrees of freedom.
    assert!(chi2 < 85.35, "chi-square {chi2}");
}
