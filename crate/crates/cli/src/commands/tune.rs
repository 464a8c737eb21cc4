use clap::Args;
use robtrend::harness::{bench_solver_config, tune, MethodKind, TUNING_SEED};
use robtrend::synth::SyntheticSpec;

use crate::args::{parse_list, SolverArgs};
use crate::commands::worker_pool;
use crate::config::Config;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    /// Comma-separated method names (default: all implemented).
    #[arg(long)]
    pub methods: Option<String>,
    /// Comma-separated outlier ratios.
    #[arg(long, default_value = "0.01,0.05,0.10,0.20")]
    pub ratios: String,
    /// Dataset seed; defaults to the reserved tuning seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

pub fn run(a: &TuneArgs, cfg: &Config) -> CliResult<()> {
    fn usage(flag: &'static str) -> impl Fn(String) -> CliError {
        move |e| CliError::Usage(format!("--{flag}: {e}"))
    }
    let methods: Vec<MethodKind> = match a.methods.as_deref().or(cfg.raw("methods")) {
        Some(s) => parse_list(s).map_err(usage("methods"))?,
        None => MethodKind::IMPLEMENTED.to_vec(),
    };
    let ratios: Vec<f64> = parse_list(&a.ratios).map_err(usage("ratios"))?;
    let admm = a.solver.apply(cfg, bench_solver_config())?;
    let seed = cfg.resolve(a.seed, "seed", TUNING_SEED)?;
    let n = cfg.resolve(a.n, "n", SyntheticSpec::default().n)?;

    let pool = worker_pool()?;
    println!("method,ratio,best,mse");
    for kind in methods {
        for &r in &ratios {
            let spec = SyntheticSpec {
                n,
                ..SyntheticSpec::default().with_outliers(r).with_seed(seed)
            };
            let (m, mse) = pool.install(|| tune(kind, &spec, &admm))?;
            println!("{kind},{r},\"{m}\",{mse}");
        }
    }
    Ok(())
}
