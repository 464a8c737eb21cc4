//! Symmetric positive-definite systems with lower bandwidth two.
//!
//! Storage is diagonal-major: `diag[k][i]` holds entry `(i, i + k)` for
//! `k = 0, 1, 2`. The factorization is a banded `L D L^T` in O(N).

use crate::difference::StackedOperator;
use crate::error::{check_len, invalid, Error, Result};

/// Half bandwidth of every system handled here.
pub const BANDWIDTH: usize = 2;

/// Relative pivot floor: a pivot below `PIVOT_FLOOR * max|diag|` is a failure.
pub const PIVOT_FLOOR: f64 = 1e-14;

/// A symmetric pentadiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBand {
    n: usize,
    diag: [Vec<f64>; BANDWIDTH + 1],
}

impl SymmetricBand {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            diag: [
                vec![0.0; n],
                vec![0.0; n.saturating_sub(1)],
                vec![0.0; n.saturating_sub(2)],
            ],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut band = Self::zeros(n);
        band.diag[0].iter_mut().for_each(|d| *d = 1.0);
        band
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Diagonal `k` (0 = main) as a slice.
    pub fn diagonal(&self, k: usize) -> &[f64] {
        &self.diag[k]
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > BANDWIDTH || hi >= self.n {
            0.0
        } else {
            self.diag[k][lo]
        }
    }

    /// Adds `v` to entries `(i, i + k)` and `(i + k, i)`.
    pub(crate) fn add(&mut self, i: usize, k: usize, v: f64) {
        self.diag[k][i] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[0][i] * x[i];
            for k in 1..=BANDWIDTH {
                if i + k < n {
                    s += self.diag[k][i] * x[i + k];
                }
                if i >= k {
                    s += self.diag[k][i - k] * x[i - k];
                }
            }
            y[i] = s;
        }
        y
    }

    /// `scale * self + diag(weights)`.
    pub fn scaled_plus_diagonal(&self, scale: f64, weights: &[f64]) -> SymmetricBand {
        let mut diag = self.diag.clone();
        for d in diag.iter_mut() {
            d.iter_mut().for_each(|v| *v *= scale);
        }
        for (d, w) in diag[0].iter_mut().zip(weights) {
            *d += w;
        }
        SymmetricBand { n: self.n, diag }
    }
}

/// The system `A + rho * D^T D` with `A = diag(weights)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSpdSystem {
    band: SymmetricBand,
}

impl BandedSpdSystem {
    /// Assembles from a precomputed Gram band so the `D^T D` part can be
    /// shared across iterations.
    pub fn assemble(gram: &SymmetricBand, weights: &[f64], rho: f64) -> Result<Self> {
        check_len("diagonal weights", weights.len(), gram.dim())?;
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid(format!("rho must be positive and finite, got {rho}")));
        }
        if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(invalid(format!(
                "diagonal weight {i} must be positive and finite, got {}",
                weights[i]
            )));
        }
        Ok(Self {
            band: gram.scaled_plus_diagonal(rho, weights),
        })
    }

    pub fn from_band(band: SymmetricBand) -> Self {
        Self { band }
    }

    pub fn band(&self) -> &SymmetricBand {
        &self.band
    }

    pub fn dim(&self) -> usize {
        self.band.n
    }

    pub fn factorize(&self) -> Result<BandedLdl> {
        BandedLdl::new(&self.band)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len("right-hand side", b.len(), self.dim())?;
        Ok(self.factorize()?.solve(b))
    }
}

/// Builds `diag(weights) + rho * D^T D` for the stacked operator.
pub fn build_banded_system(
    op: &StackedOperator,
    weights: &[f64],
    rho: f64,
) -> Result<BandedSpdSystem> {
    BandedSpdSystem::assemble(&op.gram(), weights, rho)
}

/// `L D L^T` factor of a [`SymmetricBand`]; `L` is unit lower triangular
/// with two sub-diagonals.
#[derive(Debug, Clone)]
pub struct BandedLdl {
    d: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl BandedLdl {
    pub fn new(a: &SymmetricBand) -> Result<Self> {
        let mut f = Self::with_dim(a.n);
        let [a0, a1, a2] = &a.diag;
        let max_diag = a0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        f.factor_from(|i| a0[i], |i| a1[i], |i| a2[i], max_diag)?;
        Ok(f)
    }

    /// Zero-filled factor storage for an `n x n` system.
    pub(crate) fn with_dim(n: usize) -> Self {
        Self {
            d: vec![0.0; n],
            l1: vec![0.0; n.saturating_sub(1)],
            l2: vec![0.0; n.saturating_sub(2)],
        }
    }

    /// Factors `scale * gram + diag(weights)` into the existing storage,
    /// without materializing the band. Used once per solver iteration.
    pub(crate) fn refactor_weighted(
        &mut self,
        gram: &SymmetricBand,
        scale: f64,
        weights: &[f64],
    ) -> Result<()> {
        debug_assert_eq!(gram.n, self.d.len());
        debug_assert_eq!(weights.len(), self.d.len());
        let [g0, g1, g2] = &gram.diag;
        let max_diag = g0
            .iter()
            .zip(weights)
            .fold(0.0_f64, |m, (g, w)| m.max((scale * g + w).abs()));
        self.factor_from(
            |i| scale * g0[i] + weights[i],
            |i| scale * g1[i],
            |i| scale * g2[i],
            max_diag,
        )
    }

    fn factor_from(
        &mut self,
        a0: impl Fn(usize) -> f64,
        a1: impl Fn(usize) -> f64,
        a2: impl Fn(usize) -> f64,
        max_diag: f64,
    ) -> Result<()> {
        let n = self.d.len();
        let floor = PIVOT_FLOOR * max_diag;
        // l1[i] = L(i+1, i), l2[i] = L(i+2, i)
        let (d, l1, l2) = (&mut self.d, &mut self.l1, &mut self.l2);
        for i in 0..n {
            let mut di = a0(i);
            if i >= 1 {
                di -= l1[i - 1] * l1[i - 1] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i - 2] * l2[i - 2] * d[i - 2];
            }
            if !di.is_finite() || di <= floor {
                return Err(Error::Factorization { index: i, pivot: di });
            }
            d[i] = di;
            if i + 1 < n {
                let mut v = a1(i);
                if i >= 1 {
                    v -= l2[i - 1] * l1[i - 1] * d[i - 1];
                }
                l1[i] = v / di;
            }
            if i + 2 < n {
                l2[i] = a2(i) / di;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            let mut v = x[i] - self.l1[i - 1] * x[i - 1];
            if i >= 2 {
                v -= self.l2[i - 2] * x[i - 2];
            }
            x[i] = v;
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v -= self.l1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= self.l2[i] * x[i + 2];
            }
            x[i] = v;
        }
    }
}
