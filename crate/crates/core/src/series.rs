use crate::error::{invalid, Result};

/// Minimum series length; the second-order difference needs three samples.
pub const MIN_LEN: usize = 3;

/// An observed series `y = trend + residual`, optionally paired with the
/// ground-truth trend used for scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    truth: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_samples("values", &values)?;
        Ok(Self { values, truth: None })
    }

    pub fn with_truth(values: Vec<f64>, truth: Vec<f64>) -> Result<Self> {
        validate_samples("values", &values)?;
        if truth.len() != values.len() {
            return Err(invalid(format!(
                "truth has length {} but values have length {}",
                truth.len(),
                values.len()
            )));
        }
        if truth.iter().any(|v| !v.is_finite()) {
            return Err(invalid("truth contains a non-finite sample"));
        }
        Ok(Self {
            values,
            truth: Some(truth),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn truth(&self) -> Option<&[f64]> {
        self.truth.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

pub(crate) fn validate_samples(what: &str, x: &[f64]) -> Result<()> {
    if x.len() < MIN_LEN {
        return Err(invalid(format!(
            "{what}: series needs at least {MIN_LEN} samples, got {}",
            x.len()
        )));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(invalid(format!("{what}: sample {i} is not finite")));
    }
    Ok(())
}
