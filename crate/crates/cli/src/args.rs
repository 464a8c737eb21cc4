//! Argument groups shared by several subcommands.

use clap::Args;
use robtrend::harness::{preset, Method, MethodKind};
use robtrend::{BaselineSpec, Error, SolverConfig};

use crate::config::Config;
use crate::error::CliResult;

/// ADMM controls.
#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    /// ADMM penalty parameter.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Iteration cap.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Absolute stopping tolerance.
    #[arg(long)]
    pub eps_abs: Option<f64>,
    /// Relative stopping tolerance.
    #[arg(long)]
    pub eps_rel: Option<f64>,
    /// Lower bound on the Huber majorization weights.
    #[arg(long)]
    pub weight_floor: Option<f64>,
}

impl SolverArgs {
    /// Overrides the ADMM controls of `base` from flags and config.
    pub fn apply(&self, cfg: &Config, base: SolverConfig) -> CliResult<SolverConfig> {
        let mut out = base
            .with_rho(cfg.resolve(self.rho, "rho", base.rho)?)
            .with_max_iter(cfg.resolve(self.max_iter, "max-iter", base.max_iter)?)
            .with_tolerances(
                cfg.resolve(self.eps_abs, "eps-abs", base.eps_abs)?,
                cfg.resolve(self.eps_rel, "eps-rel", base.eps_rel)?,
            );
        out.weight_floor = cfg.resolve(self.weight_floor, "weight-floor", base.weight_floor)?;
        out.validate()?;
        Ok(out)
    }

    pub fn describe(cfg: &SolverConfig) -> Vec<(&'static str, String)> {
        vec![
            ("rho", cfg.rho.to_string()),
            ("max-iter", cfg.max_iter.to_string()),
            ("eps-abs", cfg.eps_abs.to_string()),
            ("eps-rel", cfg.eps_rel.to_string()),
            ("weight-floor", cfg.weight_floor.to_string()),
        ]
    }
}

/// Model hyperparameters. Unset values fall back to the frozen benchmark
/// preset for the method at 5% outliers.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Huber threshold.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Regularization weight for single-penalty filters (hp, l1, tv, tvhuber, l1huber).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// First-difference weight.
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Second-difference weight.
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Repeated-median window (odd).
    #[arg(long)]
    pub window: Option<usize>,
}

pub const DEFAULT_PRESET_RATIO: f64 = 0.05;

impl ModelArgs {
    pub fn method(&self, kind: MethodKind, cfg: &Config) -> CliResult<Method> {
        let g = |d: f64| cfg.resolve(self.gamma, "gamma", d);
        let l = |d: f64| cfg.resolve(self.lambda, "lambda", d);
        let l1 = |d: f64| cfg.resolve(self.lambda1, "lambda1", d);
        let l2 = |d: f64| cfg.resolve(self.lambda2, "lambda2", d);
        let m = match preset(kind, DEFAULT_PRESET_RATIO) {
            Method::RobustTrend {
                gamma,
                lambda1,
                lambda2,
            } => Method::RobustTrend {
                gamma: g(gamma)?,
                lambda1: l1(lambda1)?,
                lambda2: l2(lambda2)?,
            },
            Method::Baseline(b) => Method::Baseline(match b {
                BaselineSpec::Hp { lambda } => BaselineSpec::Hp { lambda: l(lambda)? },
                BaselineSpec::L1Trend { lambda } => BaselineSpec::L1Trend { lambda: l(lambda)? },
                BaselineSpec::TvDenoise { lambda } => BaselineSpec::TvDenoise { lambda: l(lambda)? },
                BaselineSpec::Mixed { lambda1, lambda2 } => BaselineSpec::Mixed {
                    lambda1: l1(lambda1)?,
                    lambda2: l2(lambda2)?,
                },
                BaselineSpec::TvHuber { gamma, lambda } => BaselineSpec::TvHuber {
                    gamma: g(gamma)?,
                    lambda: l(lambda)?,
                },
                BaselineSpec::L1Huber { gamma, lambda } => BaselineSpec::L1Huber {
                    gamma: g(gamma)?,
                    lambda: l(lambda)?,
                },
                BaselineSpec::RobustTrendL2 {
                    gamma,
                    lambda1,
                    lambda2,
                } => BaselineSpec::RobustTrendL2 {
                    gamma: g(gamma)?,
                    lambda1: l1(lambda1)?,
                    lambda2: l2(lambda2)?,
                },
                BaselineSpec::RepeatedMedian { window } => BaselineSpec::RepeatedMedian {
                    window: cfg.resolve(self.window, "window", window)?,
                },
                BaselineSpec::External(e) => return Err(Error::NotBundled(e.name().into()).into()),
            }),
        };
        if let Method::Baseline(b) = &m {
            b.validate()?;
        }
        Ok(m)
    }
}

pub fn parse_list<T>(s: &str) -> Result<Vec<T>, String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    let items: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

/// `"1..10"` (inclusive), `"3"`, or a comma list such as `"1,4,7"`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let lo: u64 = a.trim().parse().map_err(|e| format!("'{a}': {e}"))?;
        let hi: u64 = b.trim().trim_start_matches('=').parse().map_err(|e| format!("'{b}': {e}"))?;
        if lo > hi {
            return Err(format!("empty seed range {s}"));
        }
        Ok((lo..=hi).collect())
    } else {
        parse_list(s)
    }
}
