//! Frozen hyperparameters and the grids they were selected from.

use super::{Method, MethodKind};
use crate::baselines::{BaselineSpec, ExternalBaseline};

const GAMMAS: [f64; 5] = [0.2, 0.3, 0.5, 0.7, 1.0];

fn logspace(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let steps = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=steps)
        .map(|i| {
            let v = lo * 10f64.powf(i as f64 / per_decade as f64);
            // three significant digits keep the printed presets readable
            let mag = 10f64.powf(v.log10().floor() - 2.0);
            (v / mag).round() * mag
        })
        .collect()
}

pub(super) fn search_space(kind: MethodKind) -> Vec<Method> {
    use BaselineSpec as B;
    let b = Method::Baseline;
    let mut out = Vec::new();
    match kind {
        MethodKind::RobustTrend => {
            for &gamma in &GAMMAS {
                for &lambda1 in &logspace(0.1, 3.0, 6) {
                    for &lambda2 in &logspace(0.001, 1.0, 3) {
                        out.push(Method::RobustTrend { gamma, lambda1, lambda2 });
                    }
                }
            }
        }
        MethodKind::Mixed => {
            for &lambda1 in &logspace(0.1, 10.0, 4) {
                for &lambda2 in &logspace(0.001, 30.0, 3) {
                    out.push(b(B::Mixed { lambda1, lambda2 }));
                }
            }
        }
        MethodKind::Hp => {
            out.extend(logspace(1.0, 1e6, 4).into_iter().map(|lambda| b(B::Hp { lambda })));
        }
        MethodKind::L1Trend => {
            out.extend(logspace(0.1, 300.0, 4).into_iter().map(|lambda| b(B::L1Trend { lambda })));
        }
        MethodKind::TvDenoise => {
            out.extend(logspace(0.1, 30.0, 6).into_iter().map(|lambda| b(B::TvDenoise { lambda })));
        }
        MethodKind::TvHuber => {
            for &gamma in &GAMMAS {
                for &lambda in &logspace(0.1, 3.0, 6) {
                    out.push(b(B::TvHuber { gamma, lambda }));
                }
            }
        }
        MethodKind::L1Huber => {
            for &gamma in &GAMMAS {
                for &lambda in &logspace(0.1, 300.0, 4) {
                    out.push(b(B::L1Huber { gamma, lambda }));
                }
            }
        }
        MethodKind::RobustTrendL2 => {
            for &gamma in &GAMMAS {
                for &lambda1 in &logspace(0.01, 100.0, 2) {
                    for &lambda2 in &logspace(0.1, 1e5, 2) {
                        out.push(b(B::RobustTrendL2 { gamma, lambda1, lambda2 }));
                    }
                }
            }
        }
        MethodKind::RepeatedMedian => {
            out.extend(
                [5, 7, 9, 11, 15, 21, 25, 31, 41, 51, 61, 81, 101]
                    .into_iter()
                    .map(|window| b(B::RepeatedMedian { window })),
            );
        }
        MethodKind::Wavelet | MethodKind::Emd | MethodKind::Eemd | MethodKind::Robfilter => {}
    }
    out
}

/// Tuned values for outlier ratios 1%, 5%, 10%, 20% (index 0..4).
pub(super) fn table(kind: MethodKind, idx: usize) -> Method {
    use BaselineSpec as B;
    let b = Method::Baseline;
    let i = idx.min(3);
    match kind {
        MethodKind::RobustTrend => {
            let (gamma, lambda1, lambda2) = [
                (0.5, 0.681, 0.01),
                (0.5, 0.681, 0.01),
                (0.2, 0.464, 0.001),
                (0.3, 0.464, 0.00215),
            ][i];
            Method::RobustTrend { gamma, lambda1, lambda2 }
        }
        MethodKind::Hp => b(B::Hp { lambda: [17.8, 100.0, 100.0, 100.0][i] }),
        MethodKind::L1Trend => b(B::L1Trend { lambda: [1.78, 3.16, 5.62, 3.16][i] }),
        MethodKind::TvDenoise => b(B::TvDenoise { lambda: [1.0, 1.47, 1.47, 1.47][i] }),
        MethodKind::Mixed => {
            let (lambda1, lambda2) = [(1.0, 0.01), (1.78, 0.001), (1.78, 0.01), (1.78, 0.01)][i];
            b(B::Mixed { lambda1, lambda2 })
        }
        MethodKind::TvHuber => {
            let (gamma, lambda) = [(0.5, 0.681), (0.5, 0.681), (0.2, 0.464), (0.2, 0.464)][i];
            b(B::TvHuber { gamma, lambda })
        }
        MethodKind::L1Huber => {
            let (gamma, lambda) = [(0.3, 0.562), (0.3, 0.562), (0.5, 1.0), (0.3, 0.562)][i];
            b(B::L1Huber { gamma, lambda })
        }
        MethodKind::RobustTrendL2 => {
            let (gamma, lambda1, lambda2) = [
                (0.5, 1.0, 0.316),
                (0.3, 1.0, 1.0),
                (0.3, 1.0, 1.0),
                (0.3, 1.0, 3.16),
            ][i];
            b(B::RobustTrendL2 { gamma, lambda1, lambda2 })
        }
        MethodKind::RepeatedMedian => b(B::RepeatedMedian { window: [7, 7, 11, 11][i] }),
        MethodKind::Wavelet => b(B::External(ExternalBaseline::Wavelet)),
        MethodKind::Emd => b(B::External(ExternalBaseline::Emd)),
        MethodKind::Eemd => b(B::External(ExternalBaseline::Eemd)),
        MethodKind::Robfilter => b(B::External(ExternalBaseline::Robfilter)),
    }
}
