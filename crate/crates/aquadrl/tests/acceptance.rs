//! Acceptance criteria. Each test prints one `ACCEPT <criterion>: PASS|FAIL`
//! line with the measured quantities, written straight to the process stdout
//! so it shows up in captured runs as well.
//!
//! Tests share one lock: the runtime bounds are wall-clock limits and must
//! not be measured while another criterion competes for the CPU.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use aquadrl::config::RunConfig;
use aquadrl::core::agents::{truncate_pooled_quantiles, PidController};
use aquadrl::core::env::{reward, Action, RewardWeights};
use aquadrl::core::geometry::{attitude_error, rpy_to_rotation, so3_exp, so3_log, theta_norm, Pose, RotationMatrix, Vec3};
use aquadrl::core::harness::{run_episode, EvalGrid, PidAgent, SettlingBand};
use aquadrl::core::neural::{quantile_huber_loss, squashed_backward, squashed_sample, Activation, Mlp, LOG_STD_MAX, LOG_STD_MIN};
use aquadrl::core::vehicle::{dynamics_step, kinetic_energy, ThrusterLayout, VehicleParams, VehicleState, Vec6};
use aquadrl::core::SimRng;
use aquadrl::records::{read_csv, AggregateRow, EpisodeRow, RewardRow};
use rand::{Rng, SeedableRng};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|p| p.into_inner())
}

fn report(criterion: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "ACCEPT {criterion}: {verdict} ({detail})");
    let _ = out.flush();
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aquadrl"))
}

fn run_ok(cmd: &mut Command) {
    let out = cmd.output().expect("spawn aquadrl");
    assert!(out.status.success(), "aquadrl failed:\n{}", String::from_utf8_lossy(&out.stderr));
}

// ---------------------------------------------------------------- geometry

#[test]
fn geometry_suite() {
    let _g = serial();
    let t0 = Instant::now();
    let mut rng = SimRng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let axis = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if axis.norm() < 1e-3 {
            continue;
        }
        let angle = rng.gen_range(0.0..std::f64::consts::PI - 1e-6);
        let v = axis.normalize() * angle;
        let back = so3_log(&so3_exp(&v)).unwrap();
        worst = worst.max((back - v).amax());
    }
    let r = rpy_to_rotation(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, -std::f64::consts::FRAC_PI_2);
    let theta = theta_norm(&attitude_error(&r, &RotationMatrix::identity()).unwrap());
    let elapsed = t0.elapsed();
    let theta_err = (theta - std::f64::consts::FRAC_PI_2).abs();
    let pass = worst <= 1e-9 && theta_err <= 1e-6 && within(elapsed, 5.0);
    report("geometry", pass, &format!("max round-trip error {worst:.2e}, theta {theta:.9}, {:.2}s", elapsed.as_secs_f64()));
    assert!(pass);
}

// ---------------------------------------------------------------- reward

#[test]
fn reward_exactness() {
    let _g = serial();
    let t0 = Instant::now();
    let zero = Action([0.0; 8]);
    let (r1, _) = reward(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.0, &zero, &zero, &RewardWeights::HP);
    let ones = Action([1.0; 8]);
    let (r2, _) = reward(&[0.0; 6], 0.0, &ones, &ones, &RewardWeights::EA);
    let half = Action([0.5; 8]);
    let (r3, _) = reward(&[0.0; 6], 0.0, &half, &zero, &RewardWeights::HP);
    let exact = r1 == -4.0 && r2 == -2.4 && r3 == -4.0;

    let mut rng = SimRng::seed_from_u64(12);
    let mut max_reward = f64::NEG_INFINITY;
    for i in 0..100_000 {
        let w = if i % 2 == 0 { RewardWeights::HP } else { RewardWeights::EA };
        let e: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-10.0..10.0));
        let theta = rng.gen_range(0.0..std::f64::consts::PI);
        let a = Action(std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)));
        let p = Action(std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)));
        max_reward = max_reward.max(reward(&e, theta, &a, &p, &w).0);
    }
    let elapsed = t0.elapsed();
    let pass = exact && max_reward <= 0.0 && within(elapsed, 5.0);
    report("reward", pass, &format!("examples {r1}, {r2}, {r3}; max of 1e5 random rewards {max_reward:.3e}; {:.2}s", elapsed.as_secs_f64()));
    assert!(pass);
}

// ---------------------------------------------------------------- truncation

/// Pool-sort-drop by repeated removal of the current maximum, then selection
/// sort of what remains.
fn brute_truncate(atoms: &[f64], n: usize, d: usize) -> Vec<f64> {
    let mut pool = atoms.to_vec();
    for _ in 0..n * d {
        let mut k = 0;
        for i in 1..pool.len() {
            if pool[i] > pool[k] {
                k = i;
            }
        }
        pool.remove(k);
    }
    let mut out = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let mut k = 0;
        for i in 1..pool.len() {
            if pool[i] < pool[k] {
                k = i;
            }
        }
        out.push(pool.remove(k));
    }
    out
}

#[test]
fn truncation_oracle() {
    let _g = serial();
    let t0 = Instant::now();
    let mut rng = SimRng::seed_from_u64(13);
    let mut cases = 0;
    let mut mismatches = 0;
    for n in 1..=4 {
        for m in 1..=6 {
            for d in 0..m {
                // Continuous values and heavily tied small integers.
                for trial in 0..20 {
                    let atoms: Vec<f64> = (0..n * m)
                        .map(|_| if trial % 2 == 0 { rng.gen_range(-5.0..5.0) } else { f64::from(rng.gen_range(-2i32..=2)) })
                        .collect();
                    cases += 1;
                    if truncate_pooled_quantiles(&atoms, n, m, d).unwrap() != brute_truncate(&atoms, n, d) {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    for _ in 0..1000 {
        let n = rng.gen_range(2..=8);
        let m = rng.gen_range(10..=40);
        let d = rng.gen_range(0..m);
        let atoms: Vec<f64> = (0..n * m).map(|_| rng.gen_range(-100.0..100.0)).collect();
        cases += 1;
        if truncate_pooled_quantiles(&atoms, n, m, d).unwrap() != brute_truncate(&atoms, n, d) {
            mismatches += 1;
        }
    }
    let elapsed = t0.elapsed();
    let pass = mismatches == 0 && within(elapsed, 10.0);
    report("truncation", pass, &format!("{cases} cases, {mismatches} mismatches, {:.2}s", elapsed.as_secs_f64()));
    assert!(pass);
}

// ---------------------------------------------------------------- gradients

const FD_STEP: f64 = 1e-6;
const GRAD_TOL: f64 = 1e-4;

fn rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic.iter().zip(numeric).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let scale = analytic.iter().map(|a| a * a).sum::<f64>().sqrt().max(numeric.iter().map(|b| b * b).sum::<f64>().sqrt());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn central_difference(x: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut x = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = x[i];
            x[i] = orig + FD_STEP;
            let up = f(&x);
            x[i] = orig - FD_STEP;
            let down = f(&x);
            x[i] = orig;
            (up - down) / (2.0 * FD_STEP)
        })
        .collect()
}

/// Smallest |pre-activation| over every ReLU unit, computed with prefix
/// networks whose last layer is linear.
fn min_relu_margin(net: &Mlp, inputs: &[f64], batch: usize) -> f64 {
    let sizes = net.sizes();
    let mut margin = f64::INFINITY;
    let mut offset = 0;
    for l in 0..net.activations().len() {
        offset += (sizes[l] + 1) * sizes[l + 1];
        if net.activations()[l] != Activation::Relu {
            continue;
        }
        let mut acts = net.activations()[..=l].to_vec();
        acts[l] = Activation::Identity;
        let prefix = Mlp::from_params(sizes[..=l + 1].to_vec(), acts, net.params()[..offset].to_vec()).unwrap();
        let z = prefix.forward_batch(inputs, batch).unwrap();
        margin = margin.min(z.output().iter().fold(f64::INFINITY, |m, v| m.min(v.abs())));
    }
    margin
}

fn weighted_output(net: &Mlp, inputs: &[f64], batch: usize, upstream: &[f64]) -> f64 {
    net.forward_batch(inputs, batch).unwrap().output().iter().zip(upstream).map(|(o, u)| o * u).sum()
}

struct GradStats {
    instances: usize,
    worst: f64,
}

impl GradStats {
    fn new() -> Self {
        Self { instances: 0, worst: 0.0 }
    }

    fn add(&mut self, e: f64) {
        self.instances += 1;
        self.worst = self.worst.max(e);
    }
}

fn random_mlp(rng: &mut SimRng, hidden: Activation, output: Activation) -> Mlp {
    let depth = rng.gen_range(1..=3);
    let mut sizes = vec![rng.gen_range(1..=6)];
    for _ in 0..depth {
        sizes.push(rng.gen_range(1..=7));
    }
    let mut net = Mlp::new(&sizes, hidden, output, rng).unwrap();
    // Spread weights beyond the init range so saturating units are exercised.
    for p in net.params_mut() {
        *p *= 1.5;
    }
    net
}

fn mlp_gradient_check(rng: &mut SimRng, hidden: Activation, output: Activation, params: &mut GradStats, inputs: &mut GradStats) {
    let (net, x, batch, upstream) = loop {
        let net = random_mlp(rng, hidden, output);
        let batch = rng.gen_range(1..=4);
        let x: Vec<f64> = (0..batch * net.input_dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        // Finite differences are only meaningful away from ReLU kinks.
        if min_relu_margin(&net, &x, batch) > 1e-3 {
            let upstream: Vec<f64> = (0..batch * net.output_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            break (net, x, batch, upstream);
        }
    };
    let cache = net.forward_batch(&x, batch).unwrap();
    let mut g = net.zero_grads();
    let gx = net.backward(&cache, &upstream, &mut g).unwrap();
    let gx_only = net.input_gradient(&cache, &upstream).unwrap();
    assert_eq!(gx, gx_only, "input_gradient must agree with backward");

    let numeric_p = central_difference(net.params(), |p| {
        let n = Mlp::from_params(net.sizes().to_vec(), net.activations().to_vec(), p.to_vec()).unwrap();
        weighted_output(&n, &x, batch, &upstream)
    });
    params.add(rel_err(&g, &numeric_p));
    let numeric_x = central_difference(&x, |xs| weighted_output(&net, xs, batch, &upstream));
    inputs.add(rel_err(&gx, &numeric_x));
}

#[test]
fn gradient_checks() {
    let _g = serial();
    let t0 = Instant::now();
    let mut rng = SimRng::seed_from_u64(14);
    let mut lines = Vec::new();
    let mut all_pass = true;
    let mut check = |name: &str, s: &GradStats| {
        let ok = s.instances >= 100 && s.worst <= GRAD_TOL;
        all_pass &= ok;
        lines.push(format!("{name}: {} instances, worst {:.1e}", s.instances, s.worst));
    };

    for (hidden, output, label) in [
        (Activation::Tanh, Activation::Identity, "tanh/identity"),
        (Activation::Relu, Activation::Tanh, "relu/tanh"),
        (Activation::Relu, Activation::Identity, "relu/identity"),
    ] {
        let (mut p, mut x) = (GradStats::new(), GradStats::new());
        for _ in 0..100 {
            mlp_gradient_check(&mut rng, hidden, output, &mut p, &mut x);
        }
        check(&format!("mlp params {label}"), &p);
        check(&format!("mlp inputs {label}"), &x);
    }

    // Squashed Gaussian: L = ga * action + gl * log_prob as a function of
    // (mean, log_std) with the noise held fixed.
    let mut sq = GradStats::new();
    while sq.instances < 100 {
        let mean = rng.gen_range(-2.0..2.0);
        let log_std = rng.gen_range(LOG_STD_MIN + 0.1..LOG_STD_MAX - 0.1).max(-5.0);
        let eps: f64 = rng.gen_range(-2.5..2.5);
        let (ga, gl) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let s = squashed_sample(mean, log_std, eps);
        // Keep away from tanh saturation where 1 - a^2 is below resolution.
        if 1.0 - s.action * s.action < 1e-3 {
            continue;
        }
        let (dm, dl) = squashed_backward(&s, ga, gl);
        let numeric = central_difference(&[mean, log_std], |v| {
            let s = squashed_sample(v[0], v[1], eps);
            ga * s.action + gl * s.log_prob
        });
        sq.add(rel_err(&[dm, dl], &numeric));
    }
    check("squashed gaussian", &sq);

    // Quantile Huber loss with respect to the predicted atoms.
    let mut qh = GradStats::new();
    for _ in 0..100 {
        let m = rng.gen_range(1..=12);
        let k = rng.gen_range(1..=15);
        let kappa = rng.gen_range(0.2..2.0);
        let mut taus: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..0.99)).collect();
        taus.sort_by(f64::total_cmp);
        taus.dedup();
        let m = taus.len();
        let pred: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let targets: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mut g = vec![0.0; m];
        quantile_huber_loss(&pred, &targets, &taus, kappa, &mut g).unwrap();
        let numeric = central_difference(&pred, |p| quantile_huber_loss(p, &targets, &taus, kappa, &mut vec![0.0; m]).unwrap());
        qh.add(rel_err(&g, &numeric));
    }
    check("quantile huber", &qh);

    let elapsed = t0.elapsed();
    let pass = all_pass && within(elapsed, 60.0);
    report("gradients", pass, &format!("{}; {:.2}s", lines.join("; "), elapsed.as_secs_f64()));
    assert!(pass);
}

// ---------------------------------------------------------------- dynamics

/// No net buoyancy and coincident centres: zero restoring wrench.
fn neutral_params() -> VehicleParams {
    VehicleParams { buoyancy_offset: 0.0, cob_offset: [0.0; 3], ..VehicleParams::default() }
}

#[test]
fn dynamics_checks() {
    let _g = serial();
    let t0 = Instant::now();
    let layout = ThrusterLayout::default_layout();
    let dt = 0.01;

    // Pure surge with linear drag only: u(t) = u0 exp(-d t / m_total).
    let params = VehicleParams { quadratic_drag: [0.0; 6], ..neutral_params() };
    let u0 = 1.0;
    let mut s = VehicleState::at_rest(Pose::default());
    s.twist[0] = u0;
    let horizon = 5.0;
    let steps = (horizon / dt) as usize;
    for _ in 0..steps {
        s = dynamics_step(&s, &[0.0; 8], dt, &params, &layout).unwrap();
    }
    let m = params.total_mass()[0];
    let analytic = u0 * (-params.linear_drag[0] * horizon / m).exp();
    let decay_err = (s.twist[0] - analytic).abs() / analytic;

    // Passivity: no inputs, no restoring forces, kinetic energy never rises.
    let params = neutral_params();
    let mut rng = SimRng::seed_from_u64(15);
    let mut violations = 0;
    let mut worst_rise = 0.0f64;
    for _ in 0..1000 {
        let pose = Pose::from_xyz_rpy(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(1.0..7.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-3.0..3.0),
        );
        let mut s = VehicleState::at_rest(pose);
        for k in 0..6 {
            s.twist[k] = rng.gen_range(-2.0..2.0);
        }
        let mut ke = kinetic_energy(&s.twist, &params);
        for _ in 0..100 {
            s = dynamics_step(&s, &[0.0; 8], dt, &params, &layout).unwrap();
            let next = kinetic_energy(&s.twist, &params);
            if next > ke {
                violations += 1;
                worst_rise = worst_rise.max(next - ke);
            }
            ke = next;
        }
    }

    // Orientation drift: sustained rotation without drag for 1e5 substeps.
    let params = VehicleParams { linear_drag: [0.0; 6], quadratic_drag: [0.0; 6], ..neutral_params() };
    let mut s = VehicleState::at_rest(Pose::default());
    s.twist = Vec6::new(0.0, 0.0, 0.0, 0.7, -0.4, 1.1);
    for _ in 0..100_000 {
        s = dynamics_step(&s, &[0.0; 8], dt, &params, &layout).unwrap();
    }
    let drift = s.pose.rotation.deviation();

    let elapsed = t0.elapsed();
    let pass = decay_err < 0.02 && violations == 0 && drift < 1e-6 && within(elapsed, 60.0);
    report(
        "dynamics",
        pass,
        &format!(
            "drag decay error {:.3}%, energy rises {violations} (worst {worst_rise:.1e} J), orthogonality drift {drift:.1e}, {:.2}s",
            100.0 * decay_err,
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- PID

#[test]
fn pid_closed_loop() {
    let _g = serial();
    let t0 = Instant::now();
    let cfg = RunConfig::load(&repo_root().join("configs/default.toml")).unwrap();
    let mut env = cfg.make_env().unwrap();
    let goal = *env.goal();
    assert_eq!(goal, Pose::from_xyz_rpy(0.0, 0.0, 4.0, 0.0, 0.0, 0.0));
    let band = SettlingBand { position: 0.2, attitude: 0.1 };
    let mut pid = PidAgent::new(cfg.pid.clone()).unwrap();
    let start = Pose::from_xyz_rpy(-5.0, -5.0, 6.0, 0.0, 0.0, 0.0);
    let rec = run_episode(&mut env, &mut pid, &start, &band, false).unwrap();
    let settling = rec.metrics.settling_time;
    // An unsettled episode also reports the full duration; require the
    // final sample to be inside the band so the bound is not met vacuously.
    let m = &rec.metrics;
    let settled = band.contains(&[m.final_x, m.final_y, m.final_z, m.final_theta]);

    let mut ctl = PidController::new(cfg.pid.clone()).unwrap();
    let layout = cfg.layout().unwrap();
    let at_goal = VehicleState::at_rest(goal);
    let mut zero = true;
    for _ in 0..10 {
        let a = ctl.control(&at_goal, &goal, cfg.episode.dt, &layout).unwrap();
        zero &= a.0.iter().all(|&u| u == 0.0);
    }
    let elapsed = t0.elapsed();
    let pass = settled && settling <= 40.0 && zero && within(elapsed, 10.0);
    report(
        "pid",
        pass,
        &format!("settling time {settling:.2}s, settled {settled}, equilibrium action exactly zero: {zero}, {:.2}s", elapsed.as_secs_f64()),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- training

fn smoke_train(out: &Path) -> Vec<RewardRow> {
    run_ok(bin().args(["train", "--config"]).arg(repo_root().join("configs/smoke.toml")).arg("--out").arg(out));
    read_csv(&out.join("rewards.csv")).unwrap()
}

#[test]
fn smoke_training_regression() {
    let _g = serial();
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let a = smoke_train(&dir.path().join("a"));
    let b = smoke_train(&dir.path().join("b"));
    let rewards_identical = std::fs::read(dir.path().join("a/rewards.csv")).unwrap() == std::fs::read(dir.path().join("b/rewards.csv")).unwrap();
    let policy_identical =
        std::fs::read(dir.path().join("a/checkpoint.json")).unwrap() == std::fs::read(dir.path().join("b/checkpoint.json")).unwrap();
    assert_eq!(a.len(), b.len());
    let mean = |rs: &[RewardRow]| rs.iter().map(|r| r.reward).sum::<f64>() / rs.len() as f64;
    let head = mean(&a[..10]);
    let tail = mean(&a[a.len() - 10..]);
    let elapsed = t0.elapsed();
    let pass = a.len() >= 20 && tail > head && rewards_identical && policy_identical;
    report(
        "smoke-training",
        pass,
        &format!(
            "{} episodes, first-10 mean {head:.1}, last-10 mean {tail:.1}, repeat identical: rewards {rewards_identical}, policy {policy_identical}; two runs {:.0}s",
            a.len(),
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- evaluation

#[test]
fn evaluation_protocol() {
    let _g = serial();
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        bin()
            .args(["eval", "--controller", "pid", "--grid", "full", "--config"])
            .arg(repo_root().join("configs/default.toml"))
            .arg("--out")
            .arg(dir.path()),
    );
    let rows: Vec<EpisodeRow> = read_csv(&dir.path().join("episodes.csv")).unwrap();
    let agg: Vec<AggregateRow> = read_csv(&dir.path().join("aggregate.csv")).unwrap();
    let indices_ok = rows.iter().enumerate().all(|(i, r)| r.index == i);
    let starts_ok = rows.iter().zip(EvalGrid::Full.starts()).all(|(r, s)| [r.x, r.y, r.z, r.roll, r.pitch, r.heading] == s.xyzrph);

    // Recompute every aggregate from the raw per-episode columns.
    let ok: Vec<&EpisodeRow> = rows.iter().filter(|r| r.status == "ok").collect();
    let column = |name: &str| -> Vec<f64> {
        ok.iter()
            .map(|r| match name {
                "rmse_x" => r.rmse_x,
                "rmse_y" => r.rmse_y,
                "rmse_z" => r.rmse_z,
                "rmse_theta" => r.rmse_theta,
                "settling_time" => r.settling_time,
                "mean_power" => r.mean_power,
                "energy" => r.energy,
                "final_x" => r.final_x,
                "final_y" => r.final_y,
                "final_z" => r.final_z,
                "final_theta" => r.final_theta,
                "total_reward" => r.total_reward,
                other => panic!("unexpected metric {other}"),
            })
            .map(Option::unwrap)
            .collect()
    };
    let mut agg_err = 0.0f64;
    for a in &agg {
        let v = column(&a.metric);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
        agg_err = agg_err.max(rel(a.mean, mean)).max(rel(a.std, std));
        assert_eq!(a.n, ok.len());
    }
    let duration = cfg_duration();
    let energy_err = ok.iter().map(|r| (r.mean_power.unwrap() * duration - r.energy.unwrap()).abs()).fold(0.0, f64::max);

    let elapsed = t0.elapsed();
    let pass = rows.len() == 729 && indices_ok && starts_ok && agg.len() == 12 && agg_err < 1e-9 && energy_err <= 1e-9;
    report(
        "evaluation",
        pass,
        &format!(
            "{} rows ({} ok), aggregate max relative deviation {agg_err:.1e}, max |P*T - E| {energy_err:.1e} J, {:.1}s",
            rows.len(),
            ok.len(),
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

fn cfg_duration() -> f64 {
    let cfg = RunConfig::load(&repo_root().join("configs/default.toml")).unwrap();
    cfg.episode.max_steps as f64 * cfg.episode.dt
}

// ---------------------------------------------------------------- report-only

/// Energy-awareness trend. Several hours of single-core training; run with
/// `cargo test --release -p aquadrl --test acceptance -- --ignored energy_awareness_trend`.
#[test]
#[ignore = "report-only; trains two full-size agents for 3e5 steps each"]
fn energy_awareness_trend() {
    let _g = serial();
    let dir = tempfile::tempdir().unwrap();
    let config = repo_root().join("configs/default.toml");
    let mut power = Vec::new();
    for profile in ["hp", "ea"] {
        let run = dir.path().join(profile);
        run_ok(bin().args(["train", "--profile", profile, "--steps", "300000", "--config"]).arg(&config).arg("--out").arg(&run));
        let eval = dir.path().join(format!("{profile}-eval"));
        run_ok(
            bin()
                .args(["eval", "--grid", "positions", "--policy"])
                .arg(run.join("checkpoint.json"))
                .arg("--config")
                .arg(&config)
                .arg("--out")
                .arg(&eval),
        );
        let agg: Vec<AggregateRow> = read_csv(&eval.join("aggregate.csv")).unwrap();
        power.push(agg.iter().find(|a| a.metric == "mean_power").map(|a| a.mean).unwrap_or(f64::NAN));
    }
    let ratio = power[1] / power[0];
    report("energy-trend (report only)", ratio < 1.0, &format!("mean power HP {:.2} W, EA {:.2} W, EA/HP {ratio:.3}", power[0], power[1]));
}

/// Algorithm comparison curves. Several hours of single-core training.
#[test]
#[ignore = "report-only; trains TQC, SAC and TD3 for 1e5 steps each"]
fn algorithm_comparison() {
    let _g = serial();
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        bin()
            .args(["compare", "--algos", "tqc,sac,td3", "--steps", "100000", "--config"])
            .arg(repo_root().join("configs/default.toml"))
            .arg("--out")
            .arg(dir.path()),
    );
    let rows: Vec<RewardRow> = read_csv(&dir.path().join("rewards.csv")).unwrap();
    let mut summary = Vec::new();
    for algo in ["tqc", "sac", "td3"] {
        let rs: Vec<&RewardRow> = rows.iter().filter(|r| r.algo == algo).collect();
        let last_ma = rs.iter().rev().find_map(|r| r.moving_average);
        summary.push(format!("{algo}: {} episodes, final window-100 average {}", rs.len(), last_ma.map_or("n/a".into(), |v| format!("{v:.1}"))));
    }
    let counts: Vec<usize> = ["tqc", "sac", "td3"].iter().map(|a| rows.iter().filter(|r| r.algo == *a).count()).collect();
    report("algorithm-comparison (report only)", counts.windows(2).all(|w| w[0] == w[1]), &summary.join("; "));
}
