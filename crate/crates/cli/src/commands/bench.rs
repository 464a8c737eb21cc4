use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use robtrend::harness::{bench_solver_config, BenchGrid, BenchResults, Metric, MethodKind};
use robtrend::synth::SyntheticSpec;

use crate::args::{parse_list, parse_seeds, SolverArgs};
use crate::commands::worker_pool;
use crate::config::Config;
use crate::error::{io_err, CliError, CliResult};
use crate::io::open_output;
use crate::manifest::RunManifest;

/// Named experiment layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Whole-series MSE/MAE for the main comparison.
    Table1,
    /// Change-point-local MSE/MAE for the main comparison.
    Table2,
    /// Loss/regularizer ablation at 5% outliers.
    Table3,
}

const TABLE_METHODS: [MethodKind; 6] = [
    MethodKind::RobustTrend,
    MethodKind::Hp,
    MethodKind::L1Trend,
    MethodKind::TvDenoise,
    MethodKind::Mixed,
    MethodKind::RepeatedMedian,
];

const ABLATION_METHODS: [MethodKind; 6] = [
    MethodKind::TvDenoise,
    MethodKind::TvHuber,
    MethodKind::L1Trend,
    MethodKind::L1Huber,
    MethodKind::RobustTrendL2,
    MethodKind::RobustTrend,
];

const TABLE_RATIOS: [f64; 4] = [0.01, 0.05, 0.10, 0.20];

impl Preset {
    fn methods(self) -> Vec<MethodKind> {
        match self {
            Preset::Table1 | Preset::Table2 => TABLE_METHODS.to_vec(),
            Preset::Table3 => ABLATION_METHODS.to_vec(),
        }
    }

    fn ratios(self) -> Vec<f64> {
        match self {
            Preset::Table1 | Preset::Table2 => TABLE_RATIOS.to_vec(),
            Preset::Table3 => vec![0.05],
        }
    }

    fn metrics(self) -> Vec<Metric> {
        match self {
            Preset::Table1 | Preset::Table3 => vec![Metric::Mse, Metric::Mae],
            Preset::Table2 => vec![Metric::CpMse, Metric::CpMae],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Experiment layout; explicit --methods/--ratios/--metrics override it.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Comma-separated outlier ratios.
    #[arg(long)]
    pub ratios: Option<String>,
    /// Comma-separated method names.
    #[arg(long)]
    pub methods: Option<String>,
    /// Seeds: `1..10` (inclusive) or a comma list.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Comma-separated metrics (mse, mae, cp_mse, cp_mae).
    #[arg(long)]
    pub metrics: Option<String>,
    /// Series length.
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Results CSV; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the aligned text table here (it always goes to stderr).
    #[arg(long, value_name = "PATH")]
    pub table: Option<PathBuf>,
}

impl FromStr for MetricArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Metric::ALL
            .iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .map(|m| MetricArg(*m))
            .ok_or_else(|| format!("unknown metric '{s}' (mse, mae, cp_mse, cp_mae)"))
    }
}

struct MetricArg(Metric);

fn list_setting<T>(flag: &Option<String>, cfg: &Config, key: &str) -> CliResult<Option<Vec<T>>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    let raw = match flag {
        Some(s) => Some(s.as_str()),
        None => cfg.raw(key),
    };
    raw.map(|s| parse_list(s).map_err(|e| CliError::Usage(format!("--{key}: {e}"))))
        .transpose()
}

fn fmt_ratio(r: f64) -> String {
    let pct = r * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("{}%", pct.round())
    } else {
        format!("{pct}%")
    }
}

pub fn csv_rows(
    res: &BenchResults,
    methods: &[MethodKind],
    ratios: &[f64],
    metrics: &[Metric],
) -> String {
    let mut s = String::from("method,metric,ratio,mean,stddev,n_seeds\n");
    for &metric in metrics {
        for &m in methods {
            for &r in ratios {
                match res.summary(m, metric, r) {
                    Some(sum) => writeln!(
                        s,
                        "{},{},{r},{},{},{}",
                        m.name(),
                        metric.name(),
                        sum.mean,
                        sum.stddev,
                        sum.n_seeds
                    ),
                    None => writeln!(s, "{},{},{r},NA,NA,0", m.name(), metric.name()),
                }
                .expect("writing to a String cannot fail");
            }
        }
    }
    s
}

pub fn text_table(
    res: &BenchResults,
    methods: &[MethodKind],
    ratios: &[f64],
    metrics: &[Metric],
) -> String {
    let name_w = methods.iter().map(|m| m.name().len()).max().unwrap_or(6).max(6);
    let cell_w = 17;
    let mut s = String::new();
    for &metric in metrics {
        let _ = write!(s, "{:<name_w$}", metric.name());
        for &r in ratios {
            let _ = write!(s, "  {:>cell_w$}", fmt_ratio(r));
        }
        s.push('\n');
        for &m in methods {
            let _ = write!(s, "{:<name_w$}", m.name());
            for &r in ratios {
                let cell = match res.summary(m, metric, r) {
                    Some(sum) => format!("{:.4} +/- {:.4}", sum.mean, sum.stddev),
                    None => "NA".to_string(),
                };
                let _ = write!(s, "  {cell:>cell_w$}");
            }
            s.push('\n');
        }
        s.push('\n');
    }
    s
}

pub fn run(a: &BenchArgs, cfg: &Config) -> CliResult<()> {
    let methods = match list_setting::<MethodKind>(&a.methods, cfg, "methods")? {
        Some(m) => m,
        None => a
            .preset
            .map(Preset::methods)
            .unwrap_or_else(|| MethodKind::IMPLEMENTED.to_vec()),
    };
    let ratios = match list_setting::<f64>(&a.ratios, cfg, "ratios")? {
        Some(r) => r,
        None => a.preset.map(Preset::ratios).unwrap_or_else(|| TABLE_RATIOS.to_vec()),
    };
    let metrics = match list_setting::<MetricArg>(&a.metrics, cfg, "metrics")? {
        Some(m) => m.into_iter().map(|m| m.0).collect(),
        None => a.preset.map(Preset::metrics).unwrap_or_else(|| Metric::ALL.to_vec()),
    };
    let seeds_raw = match &a.seeds {
        Some(s) => s.clone(),
        None => cfg.raw("seeds").unwrap_or("1..10").to_string(),
    };
    let seeds = parse_seeds(&seeds_raw).map_err(|e| CliError::Usage(format!("--seeds: {e}")))?;

    let mut grid = BenchGrid::new(methods.clone(), ratios.clone(), seeds.clone());
    grid.base = SyntheticSpec {
        n: cfg.resolve(a.n, "n", SyntheticSpec::default().n)?,
        ..SyntheticSpec::default()
    };
    grid.admm = a.solver.apply(cfg, bench_solver_config())?;
    grid.validate()?;

    let pool = worker_pool()?;
    let res = pool.install(|| grid.run())?;

    let csv = csv_rows(&res, &methods, &ratios, &metrics);
    let target = a.output.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let mut out = open_output(a.output.as_deref())?;
    out.write_all(csv.as_bytes()).map_err(io_err(&target))?;
    out.flush().map_err(io_err(&target))?;

    let table = text_table(&res, &methods, &ratios, &metrics);
    eprint!("{table}");
    if let Some(p) = &a.table {
        std::fs::write(p, &table).map_err(io_err(p))?;
    }
    let failures: Vec<_> = res.errors().collect();
    if !failures.is_empty() {
        eprintln!("{} cell(s) failed and are reported as NA:", failures.len());
        let mut seen = std::collections::BTreeSet::new();
        for (k, e) in failures {
            if seen.insert((k.method, e.clone())) {
                eprintln!("  {}: {e}", k.method);
            }
        }
    }

    if let Some(path) = &a.output {
        let mut m = RunManifest::new("bench")
            .param("methods", methods.iter().map(|m| m.name()).collect::<Vec<_>>().join(","))
            .param("ratios", ratios.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","))
            .param("metrics", metrics.iter().map(|m| m.name()).collect::<Vec<_>>().join(","))
            .param("seeds", seeds_raw)
            .param("n", grid.base.n);
        for (k, v) in SolverArgs::describe(&grid.admm) {
            m = m.param(k, v);
        }
        m.write_beside(path)?;
    }
    Ok(())
}
