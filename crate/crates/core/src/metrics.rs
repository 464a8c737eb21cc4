//! Trend accuracy against ground truth.

use crate::error::{check_len, invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScoreReport {
    pub mse: f64,
    pub mae: f64,
    pub cp_mse: f64,
    pub cp_mae: f64,
    pub n_scored: usize,
    pub n_cp_scored: usize,
}

/// `(mse, mae)` over all indices.
pub fn score(estimate: &[f64], truth: &[f64]) -> Result<(f64, f64)> {
    check_len("estimate", estimate.len(), truth.len())?;
    if truth.is_empty() {
        return Err(invalid("cannot score an empty series"));
    }
    Ok(score_indices(estimate, truth, 0..truth.len()))
}

fn score_indices(estimate: &[f64], truth: &[f64], idx: impl Iterator<Item = usize>) -> (f64, f64) {
    let (mut se, mut ae, mut k) = (0.0, 0.0, 0usize);
    for i in idx {
        let e = estimate[i] - truth[i];
        se += e * e;
        ae += e.abs();
        k += 1;
    }
    (se / k as f64, ae / k as f64)
}

/// Indices `{c - 1, c, c + 1}` around every change point, deduplicated.
pub fn changepoint_neighborhood(change_points: &[usize], n: usize) -> Result<Vec<usize>> {
    if change_points.is_empty() {
        return Err(invalid("no change points to score"));
    }
    let mut idx = Vec::with_capacity(3 * change_points.len());
    for &c in change_points {
        if c < 1 || c + 2 > n {
            return Err(invalid(format!(
                "change point {c} outside [1, {}]",
                n.saturating_sub(2)
            )));
        }
        idx.extend([c - 1, c, c + 1]);
    }
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

/// `(cp_mse, cp_mae, points_scored)` restricted to the change-point
/// neighborhoods.
pub fn score_changepoints(
    estimate: &[f64],
    truth: &[f64],
    change_points: &[usize],
) -> Result<(f64, f64, usize)> {
    check_len("estimate", estimate.len(), truth.len())?;
    let idx = changepoint_neighborhood(change_points, truth.len())?;
    let (m, a) = score_indices(estimate, truth, idx.iter().copied());
    Ok((m, a, idx.len()))
}

pub fn report(estimate: &[f64], truth: &[f64], change_points: &[usize]) -> Result<ScoreReport> {
    let (mse, mae) = score(estimate, truth)?;
    let (cp_mse, cp_mae, n_cp_scored) = score_changepoints(estimate, truth, change_points)?;
    Ok(ScoreReport {
        mse,
        mae,
        cp_mse,
        cp_mae,
        n_scored: truth.len(),
        n_cp_scored,
    })
}

impl ScoreReport {
    /// Flat `key=value` block, one metric per line.
    pub fn to_key_value(&self) -> String {
        format!(
            "mse={}\nmae={}\ncp_mse={}\ncp_mae={}\nn_scored={}\nn_cp_scored={}\n",
            self.mse, self.mae, self.cp_mse, self.cp_mae, self.n_scored, self.n_cp_scored
        )
    }
}
