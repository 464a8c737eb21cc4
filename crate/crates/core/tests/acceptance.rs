//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use robtrend::baselines::{l1_trend_filter, mixed_filter, tv_denoise};
use robtrend::harness::{BenchGrid, BenchResults, Metric, MethodKind};
use robtrend::losses::{huber, majorizer};
use robtrend::solver::{filter_slice, soft_threshold, tolerances};
use robtrend::streaming::{stream_all, StreamOptions};
use robtrend::synth::{generate, SyntheticSpec};
use robtrend::{HuberParams, SolverConfig, StackedOperator};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------------------
// 1. oracle optimality

fn huber_ref(x: f64, gamma: f64) -> f64 {
    if x.abs() <= gamma {
        0.5 * x * x
    } else {
        gamma * (x.abs() - 0.5 * gamma)
    }
}

/// Objective evaluated from scratch, independent of the library.
fn objective_ref(y: &[f64], tau: &[f64], gamma: f64, l1: f64, l2: f64) -> f64 {
    let loss: f64 = y.iter().zip(tau).map(|(a, b)| huber_ref(a - b, gamma)).sum();
    let d1: f64 = tau.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let d2: f64 = tau.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).abs()).sum();
    loss + l1 * d1 + l2 * d2
}

/// Primal-dual hybrid gradient on `huber(y - tau) + |K tau|_1` with
/// `K = [l1 D1; l2 D2]`.
fn pdhg_oracle(y: &[f64], gamma: f64, l1: f64, l2: f64, iters: usize) -> Vec<f64> {
    let n = y.len();
    // |K|_2 <= 2 l1 + 4 l2
    let norm = (2.0 * l1 + 4.0 * l2).max(1e-12);
    let step = 0.99 / norm;
    let (t, s) = (step, step);
    let mut tau = y.to_vec();
    let mut bar = tau.clone();
    let mut p1 = vec![0.0; n - 1];
    let mut p2 = vec![0.0; n - 2];
    let mut kt = vec![0.0; n];
    for _ in 0..iters {
        for i in 0..n - 1 {
            p1[i] = (p1[i] + s * l1 * (bar[i] - bar[i + 1])).clamp(-1.0, 1.0);
        }
        for i in 0..n - 2 {
            p2[i] = (p2[i] + s * l2 * (bar[i] - 2.0 * bar[i + 1] + bar[i + 2])).clamp(-1.0, 1.0);
        }
        kt.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n - 1 {
            kt[i] += l1 * p1[i];
            kt[i + 1] -= l1 * p1[i];
        }
        for i in 0..n - 2 {
            kt[i] += l2 * p2[i];
            kt[i + 1] -= 2.0 * l2 * p2[i];
            kt[i + 2] += l2 * p2[i];
        }
        for i in 0..n {
            let a = tau[i] - t * kt[i];
            // prox of t * huber(tau - y) at a
            let v = a - y[i];
            let pv = if v.abs() <= gamma * (1.0 + t) {
                v / (1.0 + t)
            } else {
                v - t * gamma * v.signum()
            };
            let next = y[i] + pv;
            bar[i] = 2.0 * next - tau[i];
            tau[i] = next;
        }
    }
    tau
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let noise = Normal::new(0.0, 0.3).unwrap();
    let mut level = 0.0;
    (0..n)
        .map(|_| {
            level += rng.random_range(-0.3..0.3);
            let mut v = level + noise.sample(rng);
            if rng.random_bool(0.1) {
                v += rng.random_range(-4.0..4.0);
            }
            v
        })
        .collect()
}

fn criterion_1() -> Outcome {
    const N: usize = 30;
    const INSTANCES: usize = 20;
    const ORACLE_ITERS: usize = 1_000_000;
    let pairs = [(1.0, 0.0), (0.0, 1.0), (2.0, 5.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for (l1, l2) in pairs.iter().flat_map(|&p| std::iter::repeat_n(p, INSTANCES)) {
        let y = random_instance(&mut rng, N);
        let cfg = SolverConfig::new(1.0, l1, l2)
            .unwrap()
            .with_max_iter(200_000)
            .with_tolerances(1e-10, 1e-10);
        let admm = match filter_slice(&y, &cfg) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("solver error: {e}")),
        };
        let oracle = pdhg_oracle(&y, 1.0, l1, l2, ORACLE_ITERS);
        let gap = objective_ref(&y, &admm.trend, 1.0, l1, l2) - objective_ref(&y, &oracle, 1.0, l1, l2);
        worst = worst.max(gap.abs());
        if gap.abs() > 1e-3 {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!(
            "{INSTANCES} instances per lambda pair, N={N}: max |objective gap| = {worst:.2e} (tol 1e-3), {failures} over"
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. degeneration

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_2() -> Outcome {
    let data = generate(&SyntheticSpec::default().with_outliers(0.05).with_seed(7)).unwrap();
    let y = data.values();
    let base = SolverConfig::new(1e9, 1.0, 1.0).unwrap();
    let run = |l1: f64, l2: f64| filter_slice(y, &base.with_weights(l1, l2)).unwrap().trend;

    let mixed = mixed_filter(y, 0.7, 0.05, &base).unwrap().trend;
    let d_mixed = max_abs_diff(&run(0.7, 0.05), &mixed);
    let l1 = l1_trend_filter(y, 0.9, &base).unwrap().trend;
    let l1_equal = run(0.0, 0.9) == l1;
    let tv = tv_denoise(y, 0.8, &base).unwrap().trend;
    let tv_equal = run(0.8, 0.0) == tv;

    outcome(
        d_mixed <= 1e-6 && l1_equal && tv_equal,
        format!(
            "gamma=1e9 vs mixed max|diff| = {d_mixed:.1e} (tol 1e-6); lambda1=0 == l1: {l1_equal}; lambda2=0 == tv: {tv_equal}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 3-5. benchmark directions

const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;

fn mean(res: &BenchResults, kind: MethodKind, metric: Metric, ratio: f64) -> f64 {
    res.summary(kind, metric, ratio)
        .map(|s| s.mean)
        .unwrap_or(f64::NAN)
}

fn criterion_3(res: &BenchResults, elapsed: Duration) -> Outcome {
    let rivals = [
        MethodKind::Hp,
        MethodKind::L1Trend,
        MethodKind::TvDenoise,
        MethodKind::Mixed,
    ];
    let mut pass = elapsed < Duration::from_secs(300);
    let mut parts = Vec::new();
    for ratio in [0.05, 0.10, 0.20] {
        let rt = mean(res, MethodKind::RobustTrend, Metric::Mse, ratio);
        let best = rivals
            .iter()
            .map(|&k| (k, mean(res, k, Metric::Mse, ratio)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        pass &= rt < 0.015 && rivals.iter().all(|&k| rt < mean(res, k, Metric::Mse, ratio));
        parts.push(format!(
            "{:.0}%: {rt:.5} vs best {} {:.5}",
            ratio * 100.0,
            best.0.name(),
            best.1
        ));
    }
    outcome(pass, format!("{} ({:.1?})", parts.join("; "), elapsed))
}

fn criterion_4(res: &BenchResults) -> Outcome {
    let m = |k| mean(res, k, Metric::Mse, 0.05);
    let rt = m(MethodKind::RobustTrend);
    let variants = [MethodKind::TvHuber, MethodKind::L1Huber, MethodKind::RobustTrendL2];
    let beats_variants = variants.iter().all(|&k| rt < m(k));
    let pairs = [
        (MethodKind::TvHuber, MethodKind::TvDenoise),
        (MethodKind::L1Huber, MethodKind::L1Trend),
        (MethodKind::RobustTrend, MethodKind::Mixed),
    ];
    let huber_wins = pairs.iter().all(|&(h, s)| m(h) < m(s));
    outcome(
        beats_variants && huber_wins,
        format!(
            "robusttrend {rt:.5}; tvhuber {:.5}, l1huber {:.5}, robusttrend-l2 {:.5}; tv {:.5}, l1 {:.5}, mixed {:.5}",
            m(MethodKind::TvHuber),
            m(MethodKind::L1Huber),
            m(MethodKind::RobustTrendL2),
            m(MethodKind::TvDenoise),
            m(MethodKind::L1Trend),
            m(MethodKind::Mixed),
        ),
    )
}

fn criterion_5(res: &BenchResults) -> Outcome {
    let m = |k| mean(res, k, Metric::CpMse, 0.05);
    let rt = m(MethodKind::RobustTrend);
    let rivals = [
        MethodKind::Hp,
        MethodKind::L1Trend,
        MethodKind::TvDenoise,
        MethodKind::Mixed,
        MethodKind::RepeatedMedian,
    ];
    let best = rivals
        .iter()
        .map(|&k| (k, m(k)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    outcome(
        rivals.iter().all(|&k| rt < m(k)),
        format!(
            "change-point MSE at 5%: robusttrend {rt:.4} vs best {} {:.4}",
            best.0.name(),
            best.1
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. solver mechanics

/// Minimizer of `kappa |z| + 1/2 (v - z)^2` by successively finer grids.
fn soft_threshold_grid(v: f64, kappa: f64) -> f64 {
    let f = |z: f64| kappa * z.abs() + 0.5 * (v - z) * (v - z);
    let (mut center, mut half) = (v, v.abs() + kappa + 1.0);
    while half > 1e-9 {
        let step = half / 100.0;
        let mut best = (center, f(center));
        for k in -100..=100 {
            let z = center + k as f64 * step;
            let fz = f(z);
            if fz < best.1 {
                best = (z, fz);
            }
        }
        center = best.0;
        half = 2.0 * step;
    }
    center
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // majorization on a 1e4-point grid of (x, anchor) pairs
    let p = HuberParams::new(0.7).unwrap();
    let mut worst_gap = f64::INFINITY;
    for i in 0..100 {
        for j in 0..100 {
            let x = -5.0 + 10.0 * i as f64 / 99.0;
            let a = -5.0 + 10.0 * j as f64 / 99.0;
            let gap = majorizer(x, a, p) - huber(x, p);
            worst_gap = worst_gap.min(gap);
        }
    }
    let major_ok = worst_gap >= -1e-12;
    pass &= major_ok;
    notes.push(format!("majorizer-huber min {worst_gap:.1e}"));

    // soft threshold against a grid oracle
    let mut st_err: f64 = 0.0;
    for &kappa in &[0.2, 1.0, 3.0] {
        let vs: Vec<f64> = (0..201).map(|k| -6.0 + 0.06 * k as f64).collect();
        let st = soft_threshold(&vs, kappa);
        for (v, z) in vs.iter().zip(&st) {
            st_err = st_err.max((z - soft_threshold_grid(*v, kappa)).abs());
        }
    }
    pass &= st_err <= 1e-6;
    notes.push(format!("soft-threshold err {st_err:.1e}"));

    // adjointness <D x, v> = <x, D^T v>
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut adj_err: f64 = 0.0;
    for &n in &[3usize, 10, 257, 1000] {
        let op = StackedOperator::new(rng.random_range(0.0..3.0), rng.random_range(0.0..3.0), n).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..op.rows()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lhs: f64 = op.apply(&x).unwrap().iter().zip(&v).map(|(a, b)| a * b).sum();
        let rhs: f64 = op.apply_transpose(&v).unwrap().iter().zip(&x).map(|(a, b)| a * b).sum();
        adj_err = adj_err.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300));
    }
    pass &= adj_err <= 1e-12;
    notes.push(format!("adjoint rel err {adj_err:.1e}"));

    // reconstruction: the residual is exactly y - trend, element by element
    let data = generate(&SyntheticSpec::default().with_outliers(0.1).with_seed(3)).unwrap();
    let r = filter_slice(data.values(), &SolverConfig::new(0.5, 0.7, 0.01).unwrap()).unwrap();
    let recon_ok = data
        .values()
        .iter()
        .zip(&r.trend)
        .zip(&r.residual)
        .all(|((y, t), res)| (y - t).to_bits() == res.to_bits());
    pass &= recon_ok;
    notes.push(format!("residual == y - trend bitwise: {recon_ok}"));

    // termination within max_iter
    let mut term_ok = true;
    for max_iter in [1usize, 2, 5, 17, 60] {
        let cfg = SolverConfig::new(0.5, 1.0, 0.5)
            .unwrap()
            .with_max_iter(max_iter)
            .with_tolerances(1e-300, 1e-300);
        let res = filter_slice(data.values(), &cfg).unwrap();
        term_ok &= res.iterations <= max_iter && !res.converged;
    }
    pass &= term_ok;
    notes.push(format!("termination: {term_ok}"));

    // tolerance arithmetic for N = 1000: sqrt(1997) * 1e-4 and sqrt(1000) * 1e-4
    let n = 1000;
    let cfg = SolverConfig::new(1.0, 1.0, 1.0).unwrap();
    let zeros = vec![0.0; 2 * n - 3];
    let (ep, ed) = tolerances(&zeros, &zeros, &zeros, &cfg, n).unwrap();
    let hand_pri = 1997f64.sqrt() * 1e-4;
    let hand_dual = 1000f64.sqrt() * 1e-4;
    let mut z = zeros.clone();
    z[0] = 3.0;
    let (ep2, _) = tolerances(&zeros, &z, &zeros, &cfg, n).unwrap();
    let tol_ok = (ep - hand_pri).abs() < 1e-15
        && (ed - hand_dual).abs() < 1e-15
        && (ep2 - (hand_pri + 3e-4)).abs() < 1e-15;
    pass &= tol_ok;
    notes.push(format!("eps_pri {ep:.7} (sqrt(1997)*1e-4 = {hand_pri:.7})"));

    outcome(pass, notes.join("; "))
}

// ---------------------------------------------------------------------------
// 7. streaming

fn criterion_7() -> Outcome {
    let data = generate(&SyntheticSpec {
        n: 500,
        ..SyntheticSpec::default().with_outliers(0.05).with_seed(5)
    })
    .unwrap();
    let y = data.values();
    let cfg = SolverConfig::new(0.5, 0.7, 0.01).unwrap();
    let window = 101;
    let cold_opts = StreamOptions {
        window,
        warm_start: false,
        ..StreamOptions::default()
    };
    let (points, _) = stream_all(y, cfg, cold_opts).unwrap();
    let mut worst: f64 = 0.0;
    for p in &points {
        let batch = filter_slice(&y[p.position + 1 - window..=p.position], &cfg).unwrap();
        worst = worst.max((batch.trend[window - 1] - p.value).abs());
    }
    let equiv = points.len() == y.len() - window + 1 && worst <= 1e-8;

    let ramp: Vec<f64> = (0..400).map(|i| 0.01 * i as f64).collect();
    let (_, cold) = stream_all(&ramp, cfg, cold_opts).unwrap();
    let (_, warm) = stream_all(
        &ramp,
        cfg,
        StreamOptions {
            window,
            warm_start: true,
            ..StreamOptions::default()
        },
    )
    .unwrap();
    let (ci, wi) = (cold.mean_iterations(), warm.mean_iterations());
    outcome(
        equiv && wi < ci,
        format!(
            "{} windows, max |stream - batch| = {worst:.1e} (tol 1e-8); ramp mean iterations warm {wi:.1} < cold {ci:.1}",
            points.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. performance

fn criterion_8() -> Outcome {
    let cfg = SolverConfig::new(0.5, 0.681, 0.01).unwrap();
    let data = generate(&SyntheticSpec::default().with_outliers(0.05).with_seed(1)).unwrap();
    let t = Instant::now();
    let r = filter_slice(data.values(), &cfg).unwrap();
    let elapsed = t.elapsed();
    let batch_ok = elapsed < Duration::from_secs(1) && r.iterations < 500 && r.converged;

    // fixed iteration count so only the per-iteration cost varies
    let fixed = cfg.with_max_iter(100).with_tolerances(1e-300, 1e-300);
    let per_iter = |n: usize| {
        let d = generate(&SyntheticSpec {
            n,
            ..SyntheticSpec::default().with_outliers(0.05).with_seed(2)
        })
        .unwrap();
        (0..5)
            .map(|_| {
                let t = Instant::now();
                let res = filter_slice(d.values(), &fixed).unwrap();
                t.elapsed().as_secs_f64() / res.iterations as f64
            })
            .fold(f64::INFINITY, f64::min)
    };
    let times: Vec<f64> = [1000, 4000, 16000].iter().map(|&n| per_iter(n)).collect();
    let ratios = [times[1] / times[0], times[2] / times[1]];
    let scaling_ok = ratios.iter().all(|&q| q < 5.0);
    outcome(
        batch_ok && scaling_ok,
        format!(
            "N=1000: {:.1?}, {} iterations, converged {}; per-iteration ratios 4k/1k {:.2}, 16k/4k {:.2} (limit 5)",
            elapsed, r.iterations, r.converged, ratios[0], ratios[1]
        ),
    )
}

fn main() -> ExitCode {
    let t = Instant::now();
    let grid = BenchGrid::new(MethodKind::IMPLEMENTED.to_vec(), vec![0.05, 0.10, 0.20], SEEDS.collect());
    let bench = grid.run();
    let bench_time = t.elapsed();

    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 oracle optimality", criterion_1()),
        ("2 degeneration equalities", criterion_2()),
    ];
    match &bench {
        Ok(res) => {
            results.push(("3 table 1 direction", criterion_3(res, bench_time)));
            results.push(("4 ablation ordering", criterion_4(res)));
            results.push(("5 change-point direction", criterion_5(res)));
        }
        Err(e) => {
            for name in ["3 table 1 direction", "4 ablation ordering", "5 change-point direction"] {
                results.push((name, outcome(false, format!("benchmark failed: {e}"))));
            }
        }
    }
    results.push(("6 solver mechanics", criterion_6()));
    results.push(("7 streaming equivalence", criterion_7()));
    results.push(("8 performance envelope", criterion_8()));

    let mut failed = 0;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
