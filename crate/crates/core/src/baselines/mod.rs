//! Reference filters built on the same operators and solver.
//!
//! Squared-loss filters (ℓ1 trend, TV, mixed) run the MM-ADMM solver with an
//! infinite Huber threshold, so every majorization weight is exactly one and
//! the tau-update is the exact subproblem minimizer. H-P and the
//! ℓ2-regularized Huber variant are direct (reweighted) banded solves.

mod median;

pub use median::{repeated_median_filter, repeated_median_filter_reference};

use std::fmt;

use crate::banded::BandedSpdSystem;
use crate::difference::StackedOperator;
use crate::error::{invalid, Error, Result};
use crate::losses::{huber_derivative, mm_weight, HuberParams};
use crate::series::validate_samples;
use crate::solver::{filter_slice, FilterResult, SolverConfig};

/// Cap on reweighting passes for the ℓ2-regularized Huber variant.
pub const L2_MAX_REWEIGHTS: usize = 100;
/// Fixed-point stop for the ℓ2-regularized Huber variant (max-abs change).
pub const L2_FIXED_POINT_TOL: f64 = 1e-8;

/// `argmin 1/2 |y - tau|^2 + lambda |D2 tau|_2^2`, i.e. the solution of
/// `(I + 2 lambda D2^T D2) tau = y`.
pub fn hp_filter(y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    validate_samples("series", y)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("hp lambda must be positive, got {lambda}")));
    }
    let op = StackedOperator::new(0.0, lambda.sqrt(), y.len())?;
    let sys = BandedSpdSystem::assemble(&op.gram(), &vec![1.0; y.len()], 2.0)?;
    sys.solve(y)
}

fn check_lambda(name: &str, lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} lambda must be positive, got {lambda}")))
    }
}

/// `1/2 |y - tau|^2 + lambda |D2 tau|_1`. Only the ADMM controls of `cfg`
/// are used.
pub fn l1_trend_filter(y: &[f64], lambda: f64, cfg: &SolverConfig) -> Result<FilterResult> {
    check_lambda("l1 trend", lambda)?;
    mixed_filter(y, 0.0, lambda, cfg)
}

/// `1/2 |y - tau|^2 + lambda |D1 tau|_1`.
pub fn tv_denoise(y: &[f64], lambda: f64, cfg: &SolverConfig) -> Result<FilterResult> {
    check_lambda("tv", lambda)?;
    mixed_filter(y, lambda, 0.0, cfg)
}

/// `1/2 |y - tau|^2 + lambda1 |D1 tau|_1 + lambda2 |D2 tau|_1`.
pub fn mixed_filter(
    y: &[f64],
    lambda1: f64,
    lambda2: f64,
    cfg: &SolverConfig,
) -> Result<FilterResult> {
    let c = cfg.with_weights(lambda1, lambda2).with_gamma(f64::INFINITY)?;
    filter_slice(y, &c)
}

/// Huber loss with first-difference ℓ1 regularization only.
pub fn tv_huber(y: &[f64], gamma: f64, lambda: f64, cfg: &SolverConfig) -> Result<FilterResult> {
    check_lambda("tv-huber", lambda)?;
    filter_slice(y, &cfg.with_weights(lambda, 0.0).with_gamma(gamma)?)
}

/// Huber loss with second-difference ℓ1 regularization only.
pub fn l1_huber(y: &[f64], gamma: f64, lambda: f64, cfg: &SolverConfig) -> Result<FilterResult> {
    check_lambda("l1-huber", lambda)?;
    filter_slice(y, &cfg.with_weights(0.0, lambda).with_gamma(gamma)?)
}

/// Outcome of the reweighted solve for [`robust_trend_l2`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReweightedResult {
    pub trend: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Huber loss with squared regularizers
/// `lambda1 |D1 tau|_2^2 + lambda2 |D2 tau|_2^2`, solved by iterating
/// `(A(tau) + 2 lambda1 D1^T D1 + 2 lambda2 D2^T D2) tau = A(tau) y`
/// to a fixed point, where `A` holds the Huber majorization weights.
pub fn robust_trend_l2(
    y: &[f64],
    gamma: f64,
    lambda1: f64,
    lambda2: f64,
    weight_floor: f64,
) -> Result<ReweightedResult> {
    validate_samples("series", y)?;
    let huber = HuberParams::new(gamma)?;
    let op = StackedOperator::new(lambda1.sqrt(), lambda2.sqrt(), y.len())?;
    if lambda1 + lambda2 <= 0.0 {
        return Err(invalid("lambda1 + lambda2 must be positive"));
    }
    let gram = op.gram();
    let mut tau = y.to_vec();
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=L2_MAX_REWEIGHTS {
        let weights: Vec<f64> = y
            .iter()
            .zip(&tau)
            .map(|(a, b)| mm_weight(a - b, huber, weight_floor))
            .collect();
        let rhs: Vec<f64> = weights.iter().zip(y).map(|(w, v)| w * v).collect();
        let next = BandedSpdSystem::assemble(&gram, &weights, 2.0)?.solve(&rhs)?;
        let step = next
            .iter()
            .zip(&tau)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        tau = next;
        iterations = k;
        if step < L2_FIXED_POINT_TOL {
            converged = true;
            break;
        }
    }
    Ok(ReweightedResult {
        trend: tau,
        iterations,
        converged,
    })
}

/// Gradient of the ℓ2-regularized Huber objective at `tau`.
pub fn robust_trend_l2_gradient(
    y: &[f64],
    tau: &[f64],
    gamma: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<Vec<f64>> {
    let huber = HuberParams::new(gamma)?;
    let op = StackedOperator::new(lambda1.sqrt(), lambda2.sqrt(), y.len())?;
    let q = op.gram().matvec(tau);
    Ok(y
        .iter()
        .zip(tau)
        .zip(q)
        .map(|((a, b), qi)| -huber_derivative(a - b, huber) + 2.0 * qi)
        .collect())
}

/// Third-party baselines that are named for reporting but not shipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExternalBaseline {
    Wavelet,
    Emd,
    Eemd,
    Robfilter,
}

impl ExternalBaseline {
    pub const ALL: [ExternalBaseline; 4] = [
        ExternalBaseline::Wavelet,
        ExternalBaseline::Emd,
        ExternalBaseline::Eemd,
        ExternalBaseline::Robfilter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExternalBaseline::Wavelet => "wavelet",
            ExternalBaseline::Emd => "emd",
            ExternalBaseline::Eemd => "eemd",
            ExternalBaseline::Robfilter => "robfilter",
        }
    }

    pub fn run(self) -> Result<Vec<f64>> {
        Err(Error::NotBundled(self.name().to_string()))
    }
}

/// A configured reference filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineSpec {
    Hp { lambda: f64 },
    L1Trend { lambda: f64 },
    TvDenoise { lambda: f64 },
    Mixed { lambda1: f64, lambda2: f64 },
    TvHuber { gamma: f64, lambda: f64 },
    L1Huber { gamma: f64, lambda: f64 },
    RobustTrendL2 { gamma: f64, lambda1: f64, lambda2: f64 },
    RepeatedMedian { window: usize },
    External(ExternalBaseline),
}

/// Trend produced by any filter, with solver diagnostics when available.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendEstimate {
    pub trend: Vec<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub primal_residual_norm: Option<f64>,
    pub dual_residual_norm: Option<f64>,
}

impl TrendEstimate {
    pub fn direct(trend: Vec<f64>) -> Self {
        Self {
            trend,
            iterations: None,
            converged: None,
            primal_residual_norm: None,
            dual_residual_norm: None,
        }
    }
}

impl From<FilterResult> for TrendEstimate {
    fn from(r: FilterResult) -> Self {
        Self {
            trend: r.trend,
            iterations: Some(r.iterations),
            converged: Some(r.converged),
            primal_residual_norm: Some(r.primal_residual_norm),
            dual_residual_norm: Some(r.dual_residual_norm),
        }
    }
}

impl BaselineSpec {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: f64| v >= 0.0 && v.is_finite();
        let ok = match *self {
            BaselineSpec::Hp { lambda }
            | BaselineSpec::L1Trend { lambda }
            | BaselineSpec::TvDenoise { lambda } => nonneg(lambda),
            BaselineSpec::Mixed { lambda1, lambda2 } => nonneg(lambda1) && nonneg(lambda2),
            BaselineSpec::TvHuber { gamma, lambda } | BaselineSpec::L1Huber { gamma, lambda } => {
                gamma > 0.0 && nonneg(lambda)
            }
            BaselineSpec::RobustTrendL2 {
                gamma,
                lambda1,
                lambda2,
            } => gamma > 0.0 && nonneg(lambda1) && nonneg(lambda2),
            BaselineSpec::RepeatedMedian { window } => window >= 3 && window % 2 == 1,
            BaselineSpec::External(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("invalid baseline parameters: {self}")))
        }
    }

    /// Runs the filter; `cfg` supplies ADMM controls and the weight floor.
    pub fn run(&self, y: &[f64], cfg: &SolverConfig) -> Result<TrendEstimate> {
        self.validate()?;
        Ok(match *self {
            BaselineSpec::Hp { lambda } => TrendEstimate::direct(hp_filter(y, lambda)?),
            BaselineSpec::L1Trend { lambda } => l1_trend_filter(y, lambda, cfg)?.into(),
            BaselineSpec::TvDenoise { lambda } => tv_denoise(y, lambda, cfg)?.into(),
            BaselineSpec::Mixed { lambda1, lambda2 } => {
                mixed_filter(y, lambda1, lambda2, cfg)?.into()
            }
            BaselineSpec::TvHuber { gamma, lambda } => tv_huber(y, gamma, lambda, cfg)?.into(),
            BaselineSpec::L1Huber { gamma, lambda } => l1_huber(y, gamma, lambda, cfg)?.into(),
            BaselineSpec::RobustTrendL2 {
                gamma,
                lambda1,
                lambda2,
            } => {
                let r = robust_trend_l2(y, gamma, lambda1, lambda2, cfg.weight_floor)?;
                TrendEstimate {
                    trend: r.trend,
                    iterations: Some(r.iterations),
                    converged: Some(r.converged),
                    primal_residual_norm: None,
                    dual_residual_norm: None,
                }
            }
            BaselineSpec::RepeatedMedian { window } => {
                TrendEstimate::direct(repeated_median_filter(y, window)?)
            }
            BaselineSpec::External(e) => TrendEstimate::direct(e.run()?),
        })
    }
}

impl fmt::Display for BaselineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineSpec::Hp { lambda } => write!(f, "hp(lambda={lambda})"),
            BaselineSpec::L1Trend { lambda } => write!(f, "l1(lambda={lambda})"),
            BaselineSpec::TvDenoise { lambda } => write!(f, "tv(lambda={lambda})"),
            BaselineSpec::Mixed { lambda1, lambda2 } => {
                write!(f, "mixed(lambda1={lambda1}, lambda2={lambda2})")
            }
            BaselineSpec::TvHuber { gamma, lambda } => {
                write!(f, "tvhuber(gamma={gamma}, lambda={lambda})")
            }
            BaselineSpec::L1Huber { gamma, lambda } => {
                write!(f, "l1huber(gamma={gamma}, lambda={lambda})")
            }
            BaselineSpec::RobustTrendL2 {
                gamma,
                lambda1,
                lambda2,
            } => write!(
                f,
                "robusttrend-l2(gamma={gamma}, lambda1={lambda1}, lambda2={lambda2})"
            ),
            BaselineSpec::RepeatedMedian { window } => write!(f, "rm(window={window})"),
            BaselineSpec::External(e) => write!(f, "{}", e.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::dense_solve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn admm() -> SolverConfig {
        SolverConfig::squared(1.0, 1.0)
            .unwrap()
            .with_tolerances(1e-9, 1e-9)
            .with_max_iter(20_000)
    }

    fn max_abs(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    fn least_squares_line(y: &[f64]) -> Vec<f64> {
        let n = y.len() as f64;
        let tm = (n - 1.0) / 2.0;
        let ym = y.iter().sum::<f64>() / n;
        let sxy: f64 = y.iter().enumerate().map(|(t, v)| (t as f64 - tm) * (v - ym)).sum();
        let sxx: f64 = (0..y.len()).map(|t| (t as f64 - tm).powi(2)).sum();
        let b = sxy / sxx;
        (0..y.len()).map(|t| ym + b * (t as f64 - tm)).collect()
    }

    #[test]
    fn hp_small_lambda_is_identity() {
        let y = [1.0, -2.0, 0.5, 3.0, 3.0];
        let t = hp_filter(&y, 1e-12).unwrap();
        assert!(max_abs(&t, &y) < 1e-9);
        assert!(hp_filter(&y, 0.0).is_err());
    }

    #[test]
    fn hp_large_lambda_is_least_squares_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y: Vec<f64> = (0..50).map(|t| 0.3 * t as f64 - 1.0 + rng.random_range(-0.2..0.2)).collect();
        let got = hp_filter(&y, 1e8).unwrap();
        assert!(max_abs(&got, &least_squares_line(&y)) < 1e-3);
    }

    #[test]
    fn hp_matches_dense_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10;
        let lambda = 3.7;
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut a = vec![vec![0.0; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for t in 0..n - 2 {
            let r = [(t, 1.0), (t + 1, -2.0), (t + 2, 1.0)];
            for &(i, ci) in &r {
                for &(j, cj) in &r {
                    a[i][j] += 2.0 * lambda * ci * cj;
                }
            }
        }
        let want = dense_solve(a, y.clone());
        assert!(max_abs(&hp_filter(&y, lambda).unwrap(), &want) < 1e-10);
    }

    #[test]
    fn hp_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let y1: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y2: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (a, b) = (2.5, -0.75);
        let mix: Vec<f64> = y1.iter().zip(&y2).map(|(p, q)| a * p + b * q).collect();
        let lhs = hp_filter(&mix, 40.0).unwrap();
        let h1 = hp_filter(&y1, 40.0).unwrap();
        let h2 = hp_filter(&y2, 40.0).unwrap();
        let rhs: Vec<f64> = h1.iter().zip(&h2).map(|(p, q)| a * p + b * q).collect();
        assert!(max_abs(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn l1_trend_small_lambda_and_large_lambda() {
        let y: Vec<f64> = (0..30).map(|t| if t < 15 { t as f64 } else { 30.0 - t as f64 }).collect();
        let r = l1_trend_filter(&y, 1e-6, &admm()).unwrap();
        assert!(max_abs(&r.trend, &y) < 1e-4);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let noisy: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = l1_trend_filter(&noisy, 1e4, &admm().with_rho(1e-3)).unwrap();
        assert!(max_abs(&r.trend, &least_squares_line(&noisy)) < 1e-3);
    }

    #[test]
    fn tv_keeps_steps_and_flattens_at_large_lambda() {
        let y: Vec<f64> = (0..30).map(|t| if t < 12 { 1.0 } else { 3.0 }).collect();
        let r = tv_denoise(&y, 1e-4, &admm()).unwrap();
        assert!(max_abs(&r.trend, &y) < 1e-3);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let noisy: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean = noisy.iter().sum::<f64>() / 30.0;
        let r = tv_denoise(&noisy, 1e3, &admm().with_rho(1e-2)).unwrap();
        assert!(r.trend.iter().all(|v| (v - mean).abs() < 1e-3));
    }

    #[test]
    fn mixed_degenerates_to_single_regularizer_filters() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let y: Vec<f64> = (0..60).map(|t| (t as f64 / 9.0).sin() + rng.random_range(-0.3..0.3)).collect();
        let cfg = SolverConfig::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(
            mixed_filter(&y, 0.0, 4.0, &cfg).unwrap(),
            l1_trend_filter(&y, 4.0, &cfg).unwrap()
        );
        assert_eq!(
            mixed_filter(&y, 2.0, 0.0, &cfg).unwrap(),
            tv_denoise(&y, 2.0, &cfg).unwrap()
        );
    }

    #[test]
    fn tv_huber_with_huge_gamma_is_tv() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let y: Vec<f64> = (0..60).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cfg = SolverConfig::new(1.0, 1.0, 1.0).unwrap();
        let a = tv_huber(&y, 1e9, 1.5, &cfg).unwrap();
        let b = tv_denoise(&y, 1.5, &cfg).unwrap();
        assert!(max_abs(&a.trend, &b.trend) < 1e-12);
    }

    #[test]
    fn robust_trend_l2_fixed_point_is_stationary() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut y: Vec<f64> = (0..80).map(|t| (t as f64 / 12.0).sin() + rng.random_range(-0.2..0.2)).collect();
        y[20] += 3.0;
        y[50] -= 3.0;
        let r = robust_trend_l2(&y, 0.3, 0.5, 2.0, 1e-8).unwrap();
        assert!(r.converged, "{} reweights", r.iterations);
        let g = robust_trend_l2_gradient(&y, &r.trend, 0.3, 0.5, 2.0).unwrap();
        let worst = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn external_baselines_are_not_bundled() {
        let cfg = SolverConfig::new(1.0, 1.0, 1.0).unwrap();
        for e in ExternalBaseline::ALL {
            let err = BaselineSpec::External(e).run(&[1.0; 5], &cfg).unwrap_err();
            assert!(err.to_string().contains("not bundled"));
        }
    }

    #[test]
    fn spec_validation() {
        assert!(BaselineSpec::RepeatedMedian { window: 4 }.validate().is_err());
        assert!(BaselineSpec::RepeatedMedian { window: 1 }.validate().is_err());
        assert!(BaselineSpec::Hp { lambda: -1.0 }.validate().is_err());
        assert!(BaselineSpec::TvHuber { gamma: 0.0, lambda: 1.0 }.validate().is_err());
    }
}
