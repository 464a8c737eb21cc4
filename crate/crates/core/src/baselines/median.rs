//! Sliding-window repeated median (Siegel) trend.
//!
//! At each center `t` the window `[t - h, t + h]` is truncated at the series
//! edges. The local slope is `med_i med_{j != i} (y_j - y_i) / (j - i)` and
//! the trend value is the level `med_i (y_i - slope * (i - t))`.

use crate::error::{invalid, Result};
use crate::series::validate_samples;

fn check_window(n: usize, window: usize) -> Result<()> {
    if window < 3 || window.is_multiple_of(2) || window > n {
        return Err(invalid(format!(
            "repeated median window must be odd with 3 <= window <= {n}, got {window}"
        )));
    }
    Ok(())
}

/// Median by selection; the mean of the two middle values for even counts.
/// Reorders `v`.
fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    debug_assert!(n > 0);
    let mid = n / 2;
    let (lower, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let m = *m;
    if n % 2 == 1 {
        m
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (below + m)
    }
}

pub fn repeated_median_filter(y: &[f64], window: usize) -> Result<Vec<f64>> {
    validate_samples("series", y)?;
    let n = y.len();
    check_window(n, window)?;
    let half = window / 2;

    let mut slopes = Vec::with_capacity(window);
    let mut inner = Vec::with_capacity(window);
    let mut levels = Vec::with_capacity(window);
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let lo = t.saturating_sub(half);
        let hi = (t + half).min(n - 1);

        inner.clear();
        for i in lo..=hi {
            slopes.clear();
            slopes.extend(
                (lo..=hi)
                    .filter(|&j| j != i)
                    .map(|j| (y[j] - y[i]) / (j as f64 - i as f64)),
            );
            inner.push(median_in_place(&mut slopes));
        }
        let beta = median_in_place(&mut inner);

        levels.clear();
        levels.extend((lo..=hi).map(|i| y[i] - beta * (i as f64 - t as f64)));
        out.push(median_in_place(&mut levels));
    }
    Ok(out)
}

/// Direct transcription of the double median with full sorts; O(w^2 log w)
/// per point. Used to cross-check [`repeated_median_filter`].
pub fn repeated_median_filter_reference(y: &[f64], window: usize) -> Result<Vec<f64>> {
    validate_samples("series", y)?;
    let n = y.len();
    check_window(n, window)?;
    let half = window / 2;
    let median_sorted = |mut v: Vec<f64>| -> f64 {
        v.sort_by(f64::total_cmp);
        let k = v.len();
        if k % 2 == 1 {
            v[k / 2]
        } else {
            0.5 * (v[k / 2 - 1] + v[k / 2])
        }
    };
    Ok((0..n)
        .map(|t| {
            let idx: Vec<usize> = (t.saturating_sub(half)..=(t + half).min(n - 1)).collect();
            let per_point: Vec<f64> = idx
                .iter()
                .map(|&i| {
                    median_sorted(
                        idx.iter()
                            .filter(|&&j| j != i)
                            .map(|&j| (y[j] - y[i]) / (j as f64 - i as f64))
                            .collect(),
                    )
                })
                .collect();
            let beta = median_sorted(per_point);
            median_sorted(idx.iter().map(|&i| y[i] - beta * (i as f64 - t as f64)).collect())
        })
        .collect())
}
