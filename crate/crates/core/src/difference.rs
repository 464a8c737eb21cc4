//! Discrete difference operators.
//!
//! Row `t` of the first-order operator is `x[t] - x[t+1]`; row `t` of the
//! second-order operator is `x[t] - 2 x[t+1] + x[t+2]`. The stacked operator
//! scales the two blocks by `lambda1` and `lambda2` and places them one above
//! the other, giving `2N - 3` rows for a length-`N` series.

use crate::banded::SymmetricBand;
use crate::error::{check_len, invalid, Result};
use crate::series::MIN_LEN;

const FIRST: [f64; 2] = [1.0, -1.0];
const SECOND: [f64; 3] = [1.0, -2.0, 1.0];

/// Difference order supported by the operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn as_usize(self) -> usize {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }

    pub fn stencil(self) -> &'static [f64] {
        match self {
            Order::First => &FIRST,
            Order::Second => &SECOND,
        }
    }
}

/// `D^(1)` or `D^(2)` for a series of fixed length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DifferenceOperator {
    order: Order,
    cols: usize,
}

impl DifferenceOperator {
    pub fn new(order: Order, cols: usize) -> Result<Self> {
        if cols < MIN_LEN {
            return Err(invalid(format!(
                "difference operator needs at least {MIN_LEN} columns, got {cols}"
            )));
        }
        Ok(Self { order, cols })
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn rows(&self) -> usize {
        self.cols - self.order.as_usize()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("difference input", x.len(), self.cols)?;
        let mut out = vec![0.0; self.rows()];
        apply_stencil(self.order.stencil(), 1.0, x, &mut out);
        Ok(out)
    }
}

/// Writes `scale * stencil * x` row by row into `out`.
#[inline]
fn apply_stencil(stencil: &[f64], scale: f64, x: &[f64], out: &mut [f64]) {
    let k = stencil.len();
    for (o, w) in out.iter_mut().zip(x.windows(k)) {
        let s: f64 = stencil.iter().zip(w).map(|(c, v)| c * v).sum();
        *o = scale * s;
    }
}

/// Adds `scale * stencil^T * v` into `out`.
#[inline]
fn apply_stencil_transpose(stencil: &[f64], scale: f64, v: &[f64], out: &mut [f64]) {
    for (t, &vt) in v.iter().enumerate() {
        let sv = scale * vt;
        for (j, c) in stencil.iter().enumerate() {
            out[t + j] += c * sv;
        }
    }
}

/// The stacked operator `D = [lambda1 D^(1); lambda2 D^(2)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackedOperator {
    lambda1: f64,
    lambda2: f64,
    n: usize,
}

impl StackedOperator {
    pub fn new(lambda1: f64, lambda2: f64, n: usize) -> Result<Self> {
        if !(lambda1 >= 0.0 && lambda1.is_finite()) || !(lambda2 >= 0.0 && lambda2.is_finite()) {
            return Err(invalid(format!(
                "regularization weights must be finite and nonnegative, got ({lambda1}, {lambda2})"
            )));
        }
        if n < MIN_LEN {
            return Err(invalid(format!(
                "stacked operator needs at least {MIN_LEN} columns, got {n}"
            )));
        }
        Ok(Self {
            lambda1,
            lambda2,
            n,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Series length `N`.
    pub fn cols(&self) -> usize {
        self.n
    }

    /// `2N - 3`.
    pub fn rows(&self) -> usize {
        2 * self.n - 3
    }

    /// Length of the first (first-difference) block, `N - 1`.
    pub fn first_block_len(&self) -> usize {
        self.n - 1
    }

    pub fn d1(&self) -> DifferenceOperator {
        DifferenceOperator {
            order: Order::First,
            cols: self.n,
        }
    }

    pub fn d2(&self) -> DifferenceOperator {
        DifferenceOperator {
            order: Order::Second,
            cols: self.n,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("stacked operator input", x.len(), self.n)?;
        let mut out = vec![0.0; self.rows()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    /// Unchecked variant used on the solver hot path.
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let (a, b) = out.split_at_mut(self.n - 1);
        apply_stencil(&FIRST, self.lambda1, x, a);
        apply_stencil(&SECOND, self.lambda2, x, b);
    }

    pub fn apply_transpose(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("stacked operator transpose input", v.len(), self.rows())?;
        let mut out = vec![0.0; self.n];
        self.apply_transpose_into(v, &mut out);
        Ok(out)
    }

    pub(crate) fn apply_transpose_into(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let (a, b) = v.split_at(self.n - 1);
        apply_stencil_transpose(&FIRST, self.lambda1, a, out);
        apply_stencil_transpose(&SECOND, self.lambda2, b, out);
    }

    /// The pentadiagonal Gram matrix `D^T D`.
    pub fn gram(&self) -> SymmetricBand {
        let mut band = SymmetricBand::zeros(self.n);
        for (stencil, scale, rows) in [
            (&FIRST[..], self.lambda1, self.n - 1),
            (&SECOND[..], self.lambda2, self.n - 2),
        ] {
            let s2 = scale * scale;
            if s2 == 0.0 {
                continue;
            }
            for t in 0..rows {
                for (p, cp) in stencil.iter().enumerate() {
                    for (q, cq) in stencil.iter().enumerate().skip(p) {
                        band.add(t + p, q - p, s2 * cp * cq);
                    }
                }
            }
        }
        band
    }
}
