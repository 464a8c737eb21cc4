use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use robtrend::harness::{bench_solver_config, Method, MethodKind};
use robtrend::metrics::score;

use crate::args::{ModelArgs, SolverArgs};
use crate::config::Config;
use crate::error::{io_err, CliResult};
use crate::io::{open_output, read_series};
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Input CSV (`-` for standard input).
    #[arg(default_value = "-")]
    pub input: PathBuf,
    /// Filter to run.
    #[arg(short, long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output CSV; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write `index<TAB>trend` for external plotting.
    #[arg(long, value_name = "PATH")]
    pub emit_plot: Option<PathBuf>,
}

pub fn run(a: &FilterArgs, cfg: &Config) -> CliResult<()> {
    let name = match &a.method {
        Some(m) => m.clone(),
        None => cfg.raw("method").unwrap_or("robusttrend").to_string(),
    };
    let kind: MethodKind = name.parse()?;
    let method = a.model.method(kind, cfg)?;
    let admm = a.solver.apply(cfg, bench_solver_config())?;

    let input = read_series(&a.input)?;
    let est = method.run(&input.values, &admm)?;
    let residual: Vec<f64> = input
        .values
        .iter()
        .zip(&est.trend)
        .map(|(y, t)| y - t)
        .collect();

    let target = a.output.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let mut text = String::with_capacity(input.values.len() * 60);
    text.push_str("index,value,trend,residual\n");
    for (i, ((y, t), r)) in input.values.iter().zip(&est.trend).zip(&residual).enumerate() {
        text.push_str(&format!("{i},{y},{t},{r}\n"));
    }
    let mut out = open_output(a.output.as_deref())?;
    out.write_all(text.as_bytes()).map_err(io_err(&target))?;
    out.flush().map_err(io_err(&target))?;

    if let Some(plot) = &a.emit_plot {
        let mut tsv = String::with_capacity(est.trend.len() * 24);
        for (i, t) in est.trend.iter().enumerate() {
            tsv.push_str(&format!("{i}\t{t}\n"));
        }
        std::fs::write(plot, tsv).map_err(io_err(plot))?;
    }

    if let Some(path) = &a.output {
        let mut m = RunManifest::new("filter")
            .param("input", a.input.display())
            .param("method", method);
        for (k, v) in SolverArgs::describe(&admm) {
            m = m.param(k, v);
        }
        m.write_beside(path)?;
    }

    let mut summary = format!("method: {method}\n");
    if let Some(it) = est.iterations {
        summary.push_str(&format!(
            "iterations: {it}\nconverged: {}\n",
            est.converged.unwrap_or(false)
        ));
    }
    if let (Some(p), Some(d)) = (est.primal_residual_norm, est.dual_residual_norm) {
        summary.push_str(&format!("primal residual: {p:.3e}\ndual residual: {d:.3e}\n"));
    }
    if let Some(truth) = &input.truth {
        let (mse, mae) = score(&est.trend, truth)?;
        summary.push_str(&format!("mse vs truth: {mse:.6}\nmae vs truth: {mae:.6}\n"));
    }
    eprint!("{summary}");
    if matches!(method, Method::RobustTrend { .. }) && est.converged == Some(false) {
        eprintln!("warning: ADMM stopped at max-iter before reaching tolerance");
    }
    Ok(())
}
