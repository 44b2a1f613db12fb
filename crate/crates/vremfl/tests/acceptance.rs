//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.
//!
//! Comparative criteria run at desk scale (150 vehicles, 15 scheduled per
//! round, 30 rounds, 60x60 cells of 10 m) on seeds 1..=10 with the
//! 250-sample estimated map unless stated otherwise.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vremfl::config::RemModeName;
use vremfl::runner::{build_environment, par_map};
use vremfl::Config;
use vremfl_core::fl::{closed_form_optimum, LsDataset, LsTask, ProxyConstants};
use vremfl_core::mobility::Trajectory;
use vremfl_core::rem::GridSpec;
use vremfl_core::scheduler::{
    central_optimize, optimize_transmission, refine_local_steps, ComputeMode, Policy, SlotAllocation,
};
use vremfl_core::sim::{run_experiment, Environment, ExperimentMetrics, FlData, RateMap, SimConfig};
use vremfl_core::Point;

const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;
const BENCHMARKS: [Policy; 3] = [Policy::Fairness, Policy::FedAvg, Policy::RoundRobin];
const ALL_BENCHMARKS: [Policy; 4] = [Policy::Fairness, Policy::FedAvg, Policy::RoundRobin, Policy::CentrSnr];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

#[derive(Debug, Clone, Copy)]
struct Totals {
    latency: f64,
    tx: f64,
    gd: f64,
    dist: f64,
    rate: f64,
}

impl From<&ExperimentMetrics> for Totals {
    fn from(m: &ExperimentMetrics) -> Self {
        Totals {
            latency: m.total_latency_s(),
            tx: m.total_tx_slots() as f64,
            gd: m.total_gd_steps() as f64,
            dist: m.final_dist_sq(),
            rate: m.tx_rate().unwrap_or(f64::NAN),
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn desk_config() -> Config {
    let mut c = Config::default();
    c.mobility.n_vehicles = 150;
    c.sim.max_scheduled = 15;
    c.sim.rounds = 30;
    c
}

/// Every run the comparative criteria need, for one seed.
struct SeedRuns {
    seed: u64,
    policy: BTreeMap<Policy, Totals>,
    min_steps: Totals,
    max_steps: Totals,
    w0: Totals,
    w1: Totals,
    /// Ground truth, 250, 150, 100 samples per sector.
    rem: [Totals; 4],
    /// Per regularization value, the policy runs.
    lambda: Vec<(f64, BTreeMap<Policy, Totals>)>,
}

fn run(env: &Environment, c: &Config, seed: u64, f: impl FnOnce(&mut SimConfig)) -> Totals {
    let mut s = c.sim_config(seed);
    f(&mut s);
    Totals::from(&run_experiment(env, &s).expect("valid config"))
}

fn policy_runs(env: &Environment, c: &Config, seed: u64) -> BTreeMap<Policy, Totals> {
    Policy::ALL.iter().map(|&p| (p, run(env, c, seed, |s| s.policy = p))).collect()
}

fn seed_runs(seed: u64) -> SeedRuns {
    let base = desk_config();
    let env = build_environment(&base, seed).expect("environment builds");
    let policy = policy_runs(&env, &base, seed);
    let min_steps = run(&env, &base, seed, |s| s.compute = ComputeMode::MinSteps);
    let max_steps = run(&env, &base, seed, |s| s.compute = ComputeMode::MaxSteps);
    let w0 = run(&env, &base, seed, |s| s.weights.w_tx = 0.0);
    let w1 = run(&env, &base, seed, |s| s.weights.w_tx = 1.0);

    let rem_run = |mode: RemModeName, k: usize| {
        let mut c = base.clone();
        c.rem.mode = mode;
        c.rem.samples_per_sector = k;
        let e = build_environment(&c, seed).expect("environment builds");
        run(&e, &c, seed, |_| {})
    };
    let rem = [
        rem_run(RemModeName::GroundTruth, 0),
        policy[&Policy::VremFl],
        rem_run(RemModeName::Estimated, 150),
        rem_run(RemModeName::Estimated, 100),
    ];

    let mut lambda = vec![(1e-4, policy.clone())];
    for l in [1e-3, 1e-5] {
        let mut c = base.clone();
        c.data.lambda = l;
        let e = build_environment(&c, seed).expect("environment builds");
        lambda.push((l, policy_runs(&e, &c, seed)));
    }
    lambda.sort_by(|a, b| b.0.total_cmp(&a.0));
    SeedRuns { seed, policy, min_steps, max_steps, w0, w1, rem, lambda }
}

/// Latency reduction of VREM-FL against the best benchmark, per seed.
fn latency_reductions(runs: impl Iterator<Item = (u64, BTreeMap<Policy, Totals>)>) -> Vec<(u64, f64)> {
    runs.map(|(seed, p)| {
        let best = BENCHMARKS.iter().map(|b| p[b].latency).fold(f64::INFINITY, f64::min);
        (seed, 1.0 - p[&Policy::VremFl].latency / best)
    })
    .collect()
}

fn latency_verdict(red: &[(u64, f64)]) -> (bool, String) {
    let worst = red.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let med = median(red.iter().map(|r| r.1).collect());
    let pass = worst >= 0.15 && med >= 0.25;
    (pass, format!("min reduction {} (need >= 15%), median {} (need >= 25%)", pct(worst), pct(med)))
}

fn criterion_1(runs: &[SeedRuns]) -> Verdict {
    let red = latency_reductions(runs.iter().map(|r| (r.seed, r.policy.clone())));
    for (seed, r) in &red {
        println!(
            "    seed {seed}: VREM-FL {:.0} s, reduction {}",
            runs.iter().find(|x| x.seed == *seed).unwrap().policy[&Policy::VremFl].latency,
            pct(*r)
        );
    }
    let (pass, d) = latency_verdict(&red);
    verdict(pass, d)
}

fn criterion_2(runs: &[SeedRuns]) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for r in runs {
        let v = r.policy[&Policy::VremFl].dist;
        for b in ALL_BENCHMARKS {
            let ratio = v / r.policy[&b].dist;
            let spread = ratio.max(1.0 / ratio);
            worst = worst.max(spread);
            pass &= spread <= 2.0;
        }
    }
    verdict(pass, format!("largest final-distance ratio to any benchmark {worst:.2} (limit 2)"))
}

fn criterion_3(runs: &[SeedRuns]) -> Verdict {
    let mut pass = true;
    let (mut lo, mut hi, mut acc): (f64, f64, f64) = (f64::INFINITY, 0.0, 0.0);
    let mut min_worse = true;
    for r in runs {
        let adj = r.policy[&Policy::VremFl];
        let gd = adj.gd / r.max_steps.gd;
        let a = adj.dist / r.max_steps.dist;
        lo = lo.min(gd);
        hi = hi.max(gd);
        acc = acc.max(a.max(1.0 / a));
        pass &= (0.5..=0.9).contains(&gd) && a.max(1.0 / a) <= 2.0;
        min_worse &= r.min_steps.dist > adj.dist && r.min_steps.dist > r.max_steps.dist;
    }
    verdict(
        pass && min_worse,
        format!(
            "adjusted/max GD steps in [{}, {}] (need [50%, 90%]), accuracy ratio <= {acc:.2} (limit 2), min-steps worse on every seed: {min_worse}",
            pct(lo),
            pct(hi)
        ),
    )
}

fn criterion_4(runs: &[SeedRuns]) -> Verdict {
    let med = |f: &dyn Fn(&SeedRuns) -> f64| median(runs.iter().map(f).collect());
    let tx = [med(&|r| r.w0.tx), med(&|r| r.policy[&Policy::VremFl].tx), med(&|r| r.w1.tx)];
    let wall = [med(&|r| r.w0.latency), med(&|r| r.policy[&Policy::VremFl].latency), med(&|r| r.w1.latency)];
    let ordered = tx[2] < tx[1] && tx[1] < tx[0];
    let opposite = wall[2] > wall[1] && wall[1] > wall[0];
    let reduction = 1.0 - tx[2] / tx[0];
    let per_seed = median(runs.iter().map(|r| 1.0 - r.w1.tx / r.w0.tx).collect());
    let in_band = (0.10..=0.35).contains(&reduction);
    verdict(
        ordered && opposite && in_band,
        format!(
            "median tx slots {:.0} > {:.0} > {:.0}: {ordered}; wall clock {:.0} < {:.0} < {:.0}: {opposite}; \
             reduction w_tx 0 -> 1 {} (need [10%, 35%]; median of per-seed reductions {})",
            tx[0],
            tx[1],
            tx[2],
            wall[0],
            wall[1],
            wall[2],
            pct(reduction),
            pct(per_seed)
        ),
    )
}

fn criterion_5(runs: &[SeedRuns]) -> Verdict {
    let m: Vec<f64> = (0..4).map(|i| median(runs.iter().map(|r| r.rem[i].latency).collect())).collect();
    let ordered = m[0] <= m[1] && m[1] <= m[2] && m[2] <= m[3];
    let slower = m[3] / m[0] - 1.0;
    verdict(
        ordered && slower >= 0.03,
        format!(
            "median total time truth {:.0} <= 250 {:.0} <= 150 {:.0} <= 100 {:.0}: {ordered}; 100-sample slowdown {} (need >= 3%)",
            m[0],
            m[1],
            m[2],
            m[3],
            pct(slower)
        ),
    )
}

fn criterion_6(runs: &[SeedRuns]) -> Verdict {
    let mut every = true;
    let mut lowest_bench: f64 = 1.0;
    for r in runs {
        let v = r.policy[&Policy::VremFl].rate;
        for b in ALL_BENCHMARKS {
            every &= v >= r.policy[&b].rate;
            lowest_bench = lowest_bench.min(r.policy[&b].rate);
        }
    }
    let med = median(runs.iter().map(|r| r.policy[&Policy::VremFl].rate).collect());
    verdict(
        every && med >= 0.97,
        format!("VREM-FL median tx_rate {med:.3} (need >= 0.97), >= every benchmark on every seed: {every}; lowest benchmark {lowest_bench:.3}"),
    )
}

fn criterion_11(runs: &[SeedRuns]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for i in 0..runs[0].lambda.len() {
        let l = runs[0].lambda[i].0;
        let red = latency_reductions(runs.iter().map(|r| (r.seed, r.lambda[i].1.clone())));
        let faster = red.iter().all(|r| r.1 > 0.0);
        let (ok, d) = latency_verdict(&red);
        pass &= ok && faster;
        let dist = median(runs.iter().map(|r| r.lambda[i].1[&Policy::VremFl].dist).collect());
        parts.push(format!("lambda {l:e}: {d}, median final dist_sq {dist:.3e}"));
    }
    verdict(pass, parts.join("; "))
}

/// Exhaustive search over every (start, length) window.
fn brute_transmission(t_cpu: u32, forecast: &[f64], b: f64, k_max: f64, tau: f64, w: f64) -> Option<SlotAllocation> {
    let ks = ((k_max / tau + 1e-9).floor() as usize).min(forecast.len());
    let mut best: Option<(f64, SlotAllocation)> = None;
    for start in (t_cpu as usize + 1)..=ks {
        for len in 1..=(ks + 1 - start) {
            let window = &forecast[start - 1..start - 1 + len];
            let bits: f64 = window.iter().fold(0.0, |acc, r| acc + r * tau);
            let before: f64 = window[..len - 1].iter().fold(0.0, |acc, r| acc + r * tau);
            if bits < b || before >= b {
                continue;
            }
            let latency = (start - 1 + len) as f64 * tau;
            let cost = (1.0 - w) * latency + w * len as f64;
            let a = SlotAllocation {
                t_cpu,
                idle_len: (start - 1) as u32 - t_cpu,
                tx_start: start as u32,
                t_tx: len as u32,
                latency,
            };
            let key = |c: f64, a: &SlotAllocation| (c, a.t_tx, a.tx_start);
            let better = match &best {
                None => true,
                Some((c, cur)) => {
                    let (n, o) = (key(cost, &a), key(*c, cur));
                    n.0 < o.0 || (n.0 == o.0 && (n.1, n.2) < (o.1, o.2))
                }
            };
            if better {
                best = Some((cost, a));
            }
        }
    }
    best.map(|(_, a)| a)
}

fn criterion_7a() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a);
    let mut mismatches = 0;
    let mut feasible = 0;
    for _ in 0..1000 {
        let tau = [0.5, 1.0, 2.0][rng.random_range(0..3)];
        let ks = rng.random_range(2..=120usize);
        let k_max = ks as f64 * tau + rng.random_range(0.0..0.9) * tau;
        let len = rng.random_range(ks / 2..=ks);
        let forecast: Vec<f64> = (0..len)
            .map(|_| if rng.random_bool(0.2) { 0.0 } else { (rng.random_range(-1.0..3.0f64)).exp() * 50.0 })
            .collect();
        let total: f64 = forecast.iter().sum::<f64>() * tau;
        let b = total * rng.random_range(0.01..0.6);
        let t_cpu = rng.random_range(1..ks as u32);
        let w = match rng.random_range(0..4) {
            0 => 0.0,
            1 => 1.0,
            2 => 0.5,
            _ => rng.random_range(0.0..1.0),
        };
        let got = optimize_transmission(t_cpu, &forecast, b, k_max, tau, w);
        let want = brute_transmission(t_cpu, &forecast, b, k_max, tau, w);
        feasible += want.is_some() as usize;
        if got != want {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("{mismatches} mismatches in 1000 instances ({feasible} feasible)"))
}

fn refine_objective(h: u32, g: f64, kappa: f64, h_star: f64, rho1: f64, rho2: f64) -> f64 {
    let k = if kappa > 1.0 { kappa } else { 1.0 + 1e-12 };
    if rho1 == 0.0 && rho2 == 0.0 {
        // Θ alone, compared in log space so that underflow cannot tie.
        return g.ln() + (h as f64 - 1.0) * (1.0 - 1.0 / k).ln();
    }
    let theta = g * (1.0 - 1.0 / k).powi(h as i32 - 1);
    theta + rho1 * h as f64 / g + rho2 * (h as f64 - h_star).powi(2)
}

fn criterion_7b() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7b);
    let mut mismatches = 0;
    let mut ties = 0;
    for _ in 0..1000 {
        let g = 10f64.powf(rng.random_range(-3.0..3.0));
        let kappa = if rng.random_bool(0.05) {
            rng.random_range(0.5..1.0)
        } else {
            1.0 + 10f64.powf(rng.random_range(-3.0..4.0))
        };
        let h_star = rng.random_range(1.0..200.0);
        let rho1 = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..0.01) };
        let rho2 = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..2.0) };
        let h_min = rng.random_range(1..=20u32);
        let h_max = rng.random_range(h_min..=200u32);
        let got = refine_local_steps(g, kappa, h_star, &ProxyConstants { c: 200.0, rho1, rho2 }, h_min, h_max);
        let vals: Vec<(u32, f64)> =
            (h_min..=h_max).map(|h| (h, refine_objective(h, g, kappa, h_star, rho1, rho2))).collect();
        let best = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let tol = 1e-12 * best.abs();
        let minimizers: Vec<u32> = vals.iter().filter(|v| v.1 - best <= tol).map(|v| v.0).collect();
        if minimizers.len() > 1 {
            ties += 1;
        }
        if got != minimizers[0] {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("{mismatches} mismatches in 1000 instances ({ties} with tied minimizers)"))
}

fn random_task(rng: &mut ChaCha8Rng, id: u32) -> LsTask {
    let n = rng.random_range(5..40usize);
    let d = rng.random_range(2..10usize);
    let scales: Vec<f64> = (0..d).map(|_| 10f64.powf(rng.random_range(-1.0..0.0))).collect();
    let x = DMatrix::from_fn(n, d, |_, j| rng.random_range(-1.0..1.0) * scales[j]);
    let y = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
    let lambda = 10f64.powf(rng.random_range(-6.0..-1.0));
    LsTask::new(LsDataset::new(id, x, y).unwrap(), lambda).unwrap()
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    let mut at_floor = 0;
    let mut tightest: f64 = 0.0;
    for t in 0..100 {
        let task = random_task(&mut rng, t);
        let x = task.dataset().features();
        let hess = (x.transpose() * x) * 2.0 + DMatrix::identity(x.ncols(), x.ncols()) * (2.0 * task.lambda());
        let eig = SymmetricEigen::new(hess).eigenvalues;
        let kappa = eig.max() / eig.min();
        let theta0 = DVector::from_fn(x.ncols(), |_, _| rng.random_range(-3.0..3.0));
        let g0 = task.grad_norm(&theta0);
        let gram_norm = 2.0 * (x.transpose() * x).norm() + 2.0 * task.lambda();
        let xty_norm = 2.0 * (x.transpose() * task.dataset().responses()).norm();
        for h in 1..=50u32 {
            let bound = g0 * (1.0 - 1.0 / kappa).powi(h as i32);
            let theta = task.local_gd(&theta0, h);
            // Forward error of evaluating the gradient in double precision.
            let floor = f64::EPSILON * x.nrows() as f64 * (gram_norm * theta.norm() + xty_norm);
            let g = task.grad_norm(&theta);
            if bound < floor {
                at_floor += 1;
            } else {
                tightest = tightest.max(g / bound);
            }
            if g > bound * (1.0 + 1e-9) + floor {
                violations += 1;
            }
        }
    }
    verdict(
        violations == 0,
        format!(
            "{violations} violations over 100 tasks x 50 step counts; largest ratio to bound {tightest:.4} \
             ({at_floor} checks with the bound below double-precision resolution)"
        ),
    )
}

fn criterion_9() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut misses = 0;
    for c in (10..=1000).step_by(10) {
        for m in 1..=100usize {
            let gamma = |h: f64| c as f64 / h + (1.0 + 1.0 / m as f64) * h;
            let brute = (1..=2000u32).min_by(|a, b| gamma(*a as f64).total_cmp(&gamma(*b as f64))).unwrap();
            let diff = (central_optimize(m, c as f64) - brute as f64).abs();
            worst = worst.max(diff);
            misses += (diff > 1.0) as usize;
        }
    }
    verdict(misses == 0, format!("{misses} of 10000 (C, M) pairs off by more than 1; largest gap {worst:.3}"))
}

fn criterion_10() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (n, d, samples, rounds) = (6usize, 5usize, 12usize, 20u32);
    let x = DMatrix::from_fn(samples, d, |_, _| rng.random_range(-1.0..1.0));
    let y = DVector::from_fn(samples, |_, _| rng.random_range(-1.0..1.0));
    let lambda = 1e-3;
    let datasets: Vec<LsDataset> = (0..n as u32).map(|id| LsDataset::new(id, x.clone(), y.clone()).unwrap()).collect();
    let tasks: Vec<LsTask> = datasets.iter().map(|ds| LsTask::new(ds.clone(), lambda).unwrap()).collect();
    let theta_opt = closed_form_optimum(&datasets, lambda).unwrap();
    let data = FlData { tasks, theta_opt: theta_opt.clone(), theta_star: theta_opt };

    let spec = GridSpec::new(Point::new(0.0, 0.0), 10.0, n, 1).unwrap();
    let cfg = SimConfig {
        k_max: 10.0,
        max_scheduled: n,
        rounds,
        b_bits: 100.0,
        compute: ComputeMode::MinSteps,
        ..SimConfig::default()
    };
    let slots = cfg.required_slots() as usize;
    let trajs: Vec<Trajectory> =
        (0..n).map(|i| Trajectory::new(i as u32, 0, vec![Point::new(10.0 * i as f64 + 5.0, 5.0); slots])).collect();
    let rates = RateMap::from_rates(spec, vec![1000.0; n]).unwrap();
    let env = Environment::new(rates.clone(), rates, trajs, data).unwrap();
    let metrics = run_experiment(&env, &cfg).unwrap();

    let hess = (x.transpose() * &x) * 2.0 + DMatrix::identity(d, d) * (2.0 * lambda);
    let eig = SymmetricEigen::new(hess.clone()).eigenvalues;
    let alpha = 2.0 / (eig.max() + eig.min());
    let xty = x.transpose() * &y * 2.0;
    let mut theta = DVector::zeros(d);
    let mut worst: f64 = 0.0;
    let mut full = true;
    for r in &metrics.records {
        theta = &theta - (&hess * &theta - &xty) * alpha;
        worst = worst.max((&r.theta - &theta).amax());
        full &= r.n_delivered() == n && r.gd_steps() == n as u64;
    }
    let pass = full && metrics.records.len() == rounds as usize && worst <= 1e-12;
    verdict(pass, format!("{rounds} rounds, all {n} vehicles one step each: {full}; largest deviation from centralized GD {worst:.2e}"))
}

fn tree(dir: &Path) -> Vec<(std::path::PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn criterion_12() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "[experiment]\nseeds = [21, 22]\n[mobility]\nn_vehicles = 60\n[sim]\nmax_scheduled = 6\nrounds = 8\n",
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_vremfl");
    let mut checked = Vec::new();
    for cmd in ["run", "compare", "generate-rem"] {
        let a = tmp.path().join(format!("{cmd}_a"));
        let b = tmp.path().join(format!("{cmd}_b"));
        let first = Command::new(bin)
            .args([cmd, "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()])
            .output()
            .unwrap();
        let manifest = a.join("manifest.toml");
        let again = Command::new(bin)
            .args([cmd, "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()])
            .output()
            .unwrap();
        if !first.status.success() || !again.status.success() {
            return verdict(false, format!("{cmd} failed: {}", String::from_utf8_lossy(&again.stderr)));
        }
        let (ta, tb) = (tree(&a), tree(&b));
        if ta != tb {
            return verdict(false, format!("{cmd}: rerun from manifest differs"));
        }
        checked.push(format!("{cmd} ({} files)", ta.len()));
    }

    let c = desk_config();
    let env = build_environment(&c, 3).unwrap();
    let same = run_experiment(&env, &c.sim_config(3)).unwrap()
        == run_experiment(&build_environment(&c, 3).unwrap(), &c.sim_config(3)).unwrap();
    verdict(
        same,
        format!("byte-identical reruns from manifest: {}; in-process rerun identical: {same}", checked.join(", ")),
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();

    let seeds: Vec<u64> = SEEDS.collect();
    println!("running comparative experiments on seeds {}..={}", seeds[0], seeds[seeds.len() - 1]);
    let runs = par_map(&seeds, |&s| seed_runs(s));
    for r in &runs {
        let p = &r.policy;
        println!(
            "  seed {:2}: latency vremfl {:.0} fairness {:.0} fedavg {:.0} round_robin {:.0} centr_snr {:.0} | tx w0 {:.0} w.5 {:.0} w1 {:.0} | gd min {:.0} adj {:.0} max {:.0}",
            r.seed,
            p[&Policy::VremFl].latency,
            p[&Policy::Fairness].latency,
            p[&Policy::FedAvg].latency,
            p[&Policy::RoundRobin].latency,
            p[&Policy::CentrSnr].latency,
            r.w0.tx,
            p[&Policy::VremFl].tx,
            r.w1.tx,
            r.min_steps.gd,
            p[&Policy::VremFl].gd,
            r.max_steps.gd,
        );
    }

    results.push((1, "latency advantage", criterion_1(&runs)));
    results.push((2, "final accuracy parity", criterion_2(&runs)));
    results.push((3, "computation ablation", criterion_3(&runs)));
    results.push((4, "transmission knob", criterion_4(&runs)));
    results.push((5, "map quality ordering", criterion_5(&runs)));
    results.push((6, "delivery rate", criterion_6(&runs)));
    results.push((7, "transmission oracle", criterion_7a()));
    results.push((7, "step refinement oracle", criterion_7b()));
    results.push((8, "gradient contraction bound", criterion_8()));
    results.push((9, "closed-form step count", criterion_9()));
    results.push((10, "centralized GD equivalence", criterion_10()));
    results.push((11, "regularization sweep", criterion_11(&runs)));
    results.push((12, "determinism", criterion_12()));

    println!();
    let mut failed = 0;
    for (n, name, v) in &results {
        println!("criterion {n:2} {name}: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += !v.pass as usize;
    }
    println!(
        "\n{} of {} checks passed in {:.0} s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
