//! Synthetic benchmark series: a sine, triangle and square wave laid end to
//! end, plus seeded Gaussian noise and alternating spike/dip outliers.
//!
//! Layout for length `n`: three segments of `n / 3`, `n / 3` and the
//! remainder. The sine covers one period, the triangle 1.5 periods (three
//! slope kinks) and the square wave 2.5 periods at 50% duty (four interior
//! edges). Change points are the two segment junctions, the triangle kinks
//! and the square edges: nine for the default layout.
//!
//! Noise and outlier placement use ChaCha8 seeded with `seed`, so datasets
//! are reproducible across platforms.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::series::TimeSeries;

pub const TRIANGLE_PERIODS: f64 = 1.5;
pub const SQUARE_PERIODS: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub amplitude: f64,
    pub noise_sigma: f64,
    pub outlier_ratio: f64,
    pub outlier_amplitude: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 1000,
            amplitude: 1.0,
            noise_sigma: 0.2,
            outlier_ratio: 0.0,
            outlier_amplitude: 2.0,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn with_outliers(mut self, ratio: f64) -> Self {
        self.outlier_ratio = ratio;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn outlier_count(&self) -> usize {
        (self.outlier_ratio * self.n as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(invalid(format!("n must be at least 3, got {}", self.n)));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(invalid(format!("noise sigma must be nonnegative, got {}", self.noise_sigma)));
        }
        if !(0.0..=1.0).contains(&self.outlier_ratio) {
            return Err(invalid(format!(
                "outlier ratio must lie in [0, 1], got {}",
                self.outlier_ratio
            )));
        }
        if !self.amplitude.is_finite() || !self.outlier_amplitude.is_finite() {
            return Err(invalid("amplitudes must be finite"));
        }
        if self.outlier_count() > self.n {
            return Err(invalid("outlier count exceeds series length"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub series: TimeSeries,
    /// Sorted outlier indices.
    pub outlier_positions: Vec<usize>,
    /// Sorted change-point indices.
    pub change_points: Vec<usize>,
}

impl SyntheticDataset {
    pub fn values(&self) -> &[f64] {
        self.series.values()
    }

    pub fn truth(&self) -> &[f64] {
        self.series.truth().expect("synthetic series always carry truth")
    }
}

fn segment_bounds(n: usize) -> [usize; 4] {
    let third = n / 3;
    [0, third, 2 * third, n]
}

/// Triangle wave with unit amplitude that starts at 0 and rises.
fn triangle_unit(phase: f64) -> f64 {
    let p = phase - phase.floor();
    if p < 0.25 {
        4.0 * p
    } else if p < 0.75 {
        2.0 - 4.0 * p
    } else {
        4.0 * p - 4.0
    }
}

fn square_unit(phase: f64) -> f64 {
    let p = phase - phase.floor();
    if p < 0.5 {
        1.0
    } else {
        -1.0
    }
}

/// Clean trend; depends only on `n` and `amplitude`.
pub fn trend(n: usize, amplitude: f64) -> Vec<f64> {
    let b = segment_bounds(n);
    let mut out = Vec::with_capacity(n);
    for seg in 0..3 {
        let len = (b[seg + 1] - b[seg]) as f64;
        for s in 0..(b[seg + 1] - b[seg]) {
            let frac = s as f64 / len;
            let v = match seg {
                0 => (2.0 * PI * frac).sin(),
                1 => triangle_unit(TRIANGLE_PERIODS * frac),
                _ => square_unit(SQUARE_PERIODS * frac),
            };
            out.push(amplitude * v);
        }
    }
    out
}

/// Junctions, triangle kinks (first sample at or after each kink) and square
/// edges (first sample of each new level), restricted to `[1, n - 2]`.
pub fn change_points(n: usize) -> Vec<usize> {
    let b = segment_bounds(n);
    let mut cps = vec![b[1], b[2]];

    let tri_len = (b[2] - b[1]) as f64;
    let kinks = (TRIANGLE_PERIODS * 2.0).round() as usize;
    for k in 0..kinks {
        // kinks at phase 1/4, 3/4, 5/4, ...
        let phase = 0.25 + 0.5 * k as f64;
        let s = (phase / TRIANGLE_PERIODS * tri_len).ceil() as usize;
        cps.push(b[1] + s);
    }

    let sq_len = b[3] - b[2];
    for s in 1..sq_len {
        let prev = square_unit(SQUARE_PERIODS * (s - 1) as f64 / sq_len as f64);
        let cur = square_unit(SQUARE_PERIODS * s as f64 / sq_len as f64);
        if prev != cur {
            cps.push(b[2] + s);
        }
    }

    cps.sort_unstable();
    cps.dedup();
    cps.retain(|&c| c >= 1 && c + 2 <= n);
    cps
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let n = spec.n;
    let truth = trend(n, spec.amplitude);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut values = truth.clone();
    if spec.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, spec.noise_sigma).map_err(|e| invalid(e.to_string()))?;
        for v in values.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }

    let mut outlier_positions = sample(&mut rng, n, spec.outlier_count()).into_vec();
    outlier_positions.sort_unstable();
    for (k, &i) in outlier_positions.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        values[i] += sign * spec.outlier_amplitude;
    }

    Ok(SyntheticDataset {
        series: TimeSeries::with_truth(values, truth)?,
        outlier_positions,
        change_points: change_points(n),
    })
}
