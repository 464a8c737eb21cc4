//! Online trend extraction over a sliding window.
//!
//! Every new sample after warm-up triggers one MM-ADMM solve on the last `W`
//! samples. The solver (and with it the `D^T D` band) is built once per
//! stream. With warm start enabled the previous window's `(tau, z, u)` seed
//! the next solve after dropping their first entry and repeating their last;
//! `z` and `u` are shifted block-wise so the first- and second-difference
//! parts stay aligned with their rows.

use std::collections::VecDeque;

use crate::error::{invalid, Error, Result};
use crate::solver::{RobustTrendSolver, SolverConfig, SolverState};

pub const DEFAULT_WINDOW: usize = 101;

/// Which point of each window is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Emit {
    /// Last sample of the window: a causal estimate.
    #[default]
    Last,
    /// Center sample, lagging the stream by `W / 2`.
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamOptions {
    pub window: usize,
    pub warm_start: bool,
    pub emit: Emit,
}

impl Default for StreamOptions {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            warm_start: true,
            emit: Emit::Last,
        }
    }
}

/// One emitted trend value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendPoint {
    /// Zero-based stream index the estimate refers to.
    pub position: usize,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct StreamState {
    opts: StreamOptions,
    solver: RobustTrendSolver,
    window: VecDeque<f64>,
    warm: Option<SolverState>,
    seen: usize,
    emitted: usize,
    total_iterations: usize,
    setups: usize,
}

impl StreamState {
    pub fn new(cfg: SolverConfig, opts: StreamOptions) -> Result<Self> {
        if opts.window < 3 {
            return Err(invalid(format!("window must be at least 3, got {}", opts.window)));
        }
        let solver = RobustTrendSolver::new(cfg, opts.window)?;
        Ok(Self {
            opts,
            solver,
            window: VecDeque::with_capacity(opts.window),
            warm: None,
            seen: 0,
            emitted: 0,
            total_iterations: 0,
            setups: 1,
        })
    }

    pub fn options(&self) -> &StreamOptions {
        &self.opts
    }

    /// Number of trend points produced since the last reset.
    pub fn emitted(&self) -> usize {
        self.emitted
    }

    /// Samples consumed since the last reset.
    pub fn seen(&self) -> usize {
        self.seen
    }

    /// Mean ADMM iterations per emitted point.
    pub fn mean_iterations(&self) -> f64 {
        if self.emitted == 0 {
            0.0
        } else {
            self.total_iterations as f64 / self.emitted as f64
        }
    }

    /// How many times the cached operator band has been built.
    pub fn setup_count(&self) -> usize {
        self.setups
    }

    pub fn window_values(&self) -> Vec<f64> {
        self.window.iter().copied().collect()
    }

    pub fn push(&mut self, sample: f64) -> Result<Option<TrendPoint>> {
        let position = self.seen;
        if !sample.is_finite() {
            return Err(Error::Stream {
                position,
                source: Box::new(invalid("sample is not finite")),
            });
        }
        let w = self.opts.window;
        if self.window.len() == w {
            self.window.pop_front();
        }
        self.window.push_back(sample);
        self.seen += 1;
        if self.window.len() < w {
            return Ok(None);
        }

        let y: Vec<f64> = self.window.iter().copied().collect();
        let start = match (self.opts.warm_start, self.warm.take()) {
            (true, Some(prev)) => Some(shift_state(prev, w)),
            _ => None,
        };
        let result = self
            .solver
            .solve(&y, start)
            .map_err(|e| Error::Stream {
                position,
                source: Box::new(e),
            })?;

        let (offset, pos) = match self.opts.emit {
            Emit::Last => (w - 1, position),
            Emit::Center => (w / 2, position - (w - 1 - w / 2)),
        };
        let point = TrendPoint {
            position: pos,
            value: result.trend[offset],
            iterations: result.iterations,
            converged: result.converged,
        };
        self.emitted += 1;
        self.total_iterations += result.iterations;
        if self.opts.warm_start {
            self.warm = Some(result.state);
        }
        Ok(Some(point))
    }

    /// Clears the buffer and warm-start state; the solver and its cached band
    /// are kept.
    pub fn reset(&mut self) {
        self.window.clear();
        self.warm = None;
        self.seen = 0;
        self.emitted = 0;
        self.total_iterations = 0;
    }
}

/// Drops the first entry and repeats the last one.
fn shift_block(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    v.copy_within(1.., 0);
}

/// Shifts a window state by one sample.
pub fn shift_state(mut s: SolverState, window: usize) -> SolverState {
    shift_block(&mut s.tau);
    let split = window - 1;
    let (z1, z2) = s.z.split_at_mut(split);
    shift_block(z1);
    shift_block(z2);
    let (u1, u2) = s.u.split_at_mut(split);
    shift_block(u1);
    shift_block(u2);
    s.iteration = 0;
    s
}

/// Runs a whole slice through a fresh stream.
pub fn stream_all(
    samples: &[f64],
    cfg: SolverConfig,
    opts: StreamOptions,
) -> Result<(Vec<TrendPoint>, StreamState)> {
    let mut st = StreamState::new(cfg, opts)?;
    let mut out = Vec::new();
    for &x in samples {
        if let Some(p) = st.push(x)? {
            out.push(p);
        }
    }
    Ok((out, st))
}
