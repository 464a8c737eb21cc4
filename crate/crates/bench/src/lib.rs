//! Shared fixtures for the criterion benches.

use robtrend::harness::{preset, Method, MethodKind};
use robtrend::synth::{generate, SyntheticSpec};
use robtrend::SolverConfig;

/// Default synthetic series of length `n` with 5% outliers.
pub fn series(n: usize, seed: u64) -> Vec<f64> {
    let spec = SyntheticSpec {
        n,
        ..SyntheticSpec::default().with_outliers(0.05).with_seed(seed)
    };
    generate(&spec).expect("valid benchmark spec").values().to_vec()
}

/// RobustTrend configuration from the frozen 5% preset.
pub fn robust_config() -> SolverConfig {
    match preset(MethodKind::RobustTrend, 0.05) {
        Method::RobustTrend {
            gamma,
            lambda1,
            lambda2,
        } => SolverConfig::new(gamma, lambda1, lambda2).expect("preset is valid"),
        Method::Baseline(_) => unreachable!("robusttrend preset"),
    }
}
