use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use clap::Args;
use robtrend::harness::{preset, Method, MethodKind};
use robtrend::streaming::{stream_all, DEFAULT_WINDOW};
use robtrend::{Emit, SolverConfig, StreamOptions, StreamState};

use crate::args::{SolverArgs, DEFAULT_PRESET_RATIO};
use crate::config::Config;
use crate::error::{io_err, CliError, CliResult};

#[derive(Debug, Clone, Args)]
pub struct StreamArgs {
    /// Sliding-window length.
    #[arg(long)]
    pub window: Option<usize>,
    /// Report the window center instead of its last sample.
    #[arg(long)]
    pub center: bool,
    /// Disable warm starts.
    #[arg(long)]
    pub cold: bool,
    /// After the stream ends, rerun it cold and report both mean iteration counts.
    #[arg(long)]
    pub compare_cold: bool,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Read samples from a file instead of standard input.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
}

fn solver_config(a: &StreamArgs, cfg: &Config) -> CliResult<SolverConfig> {
    let Method::RobustTrend {
        gamma,
        lambda1,
        lambda2,
    } = preset(MethodKind::RobustTrend, DEFAULT_PRESET_RATIO)
    else {
        unreachable!("robusttrend preset is a RobustTrend method")
    };
    let base = SolverConfig::new(
        cfg.resolve(a.gamma, "gamma", gamma)?,
        cfg.resolve(a.lambda1, "lambda1", lambda1)?,
        cfg.resolve(a.lambda2, "lambda2", lambda2)?,
    )?;
    a.solver.apply(cfg, base)
}

pub fn run(a: &StreamArgs, cfg: &Config) -> CliResult<()> {
    let solver = solver_config(a, cfg)?;
    let opts = StreamOptions {
        window: cfg.resolve(a.window, "window", DEFAULT_WINDOW)?,
        warm_start: !a.cold,
        emit: if a.center { Emit::Center } else { Emit::Last },
    };
    let mut state = StreamState::new(solver, opts)?;

    let (reader, origin): (Box<dyn BufRead>, String) = match &a.input {
        Some(p) => (
            Box::new(io::BufReader::new(std::fs::File::open(p).map_err(io_err(p))?)),
            p.display().to_string(),
        ),
        None => (Box::new(io::stdin().lock()), "<stdin>".to_string()),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut kept = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(&origin))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let x: f64 = t.parse().map_err(|_| CliError::Parse {
            origin: origin.clone(),
            line: i + 1,
            msg: format!("cannot parse '{t}' as a number"),
        })?;
        if a.compare_cold {
            kept.push(x);
        }
        let point = state.push(x).map_err(|e| CliError::Parse {
            origin: origin.clone(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        if let Some(p) = point {
            writeln!(out, "{}", p.value).map_err(io_err("<stdout>"))?;
            out.flush().map_err(io_err("<stdout>"))?;
        }
    }

    let mode = if opts.warm_start { "warm" } else { "cold" };
    eprintln!(
        "samples: {}\noutputs: {}\nmean iterations ({mode} start): {:.2}",
        state.seen(),
        state.emitted(),
        state.mean_iterations()
    );
    if a.compare_cold {
        let cold_opts = StreamOptions {
            warm_start: false,
            ..opts
        };
        let (_, cold) = stream_all(&kept, solver, cold_opts)?;
        eprintln!("mean iterations (cold start): {:.2}", cold.mean_iterations());
    }
    Ok(())
}
