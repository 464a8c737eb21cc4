//! Huber loss and its sharpest quadratic majorizer.

use crate::error::{invalid, Result};

/// Default lower clamp on majorization weights.
pub const DEFAULT_WEIGHT_FLOOR: f64 = 1e-8;

/// Transition point between the quadratic and linear regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuberParams {
    gamma: f64,
}

impl HuberParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && !gamma.is_nan() {
            Ok(Self { gamma })
        } else {
            Err(invalid(format!("huber gamma must be positive, got {gamma}")))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

pub fn huber(x: f64, p: HuberParams) -> f64 {
    let a = x.abs();
    if a <= p.gamma {
        0.5 * x * x
    } else {
        p.gamma * a - 0.5 * p.gamma * p.gamma
    }
}

pub fn huber_derivative(x: f64, p: HuberParams) -> f64 {
    if x.abs() <= p.gamma {
        x
    } else {
        p.gamma * x.signum()
    }
}

pub fn huber_sum(x: &[f64], p: HuberParams) -> f64 {
    x.iter().map(|&v| huber(v, p)).sum()
}

/// Curvature `g'(x) / x` of the quadratic that majorizes the Huber loss and
/// touches it at `x`; equals 1 on the quadratic branch (including `x = 0`)
/// and `gamma / |x|` beyond. Clamped below by `floor`.
pub fn mm_weight(x: f64, p: HuberParams, floor: f64) -> f64 {
    let a = x.abs();
    let w = if a <= p.gamma { 1.0 } else { p.gamma / a };
    w.max(floor)
}

/// Value at `x` of the majorizer anchored at `anchor`.
pub fn majorizer(x: f64, anchor: f64, p: HuberParams) -> f64 {
    let w = mm_weight(anchor, p, 0.0);
    0.5 * w * x * x + (huber(anchor, p) - 0.5 * w * anchor * anchor)
}
