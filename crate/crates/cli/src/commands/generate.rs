use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use robtrend::synth::{generate, SyntheticSpec};

use crate::config::Config;
use crate::error::{io_err, CliResult};
use crate::io::open_output;
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Series length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Fraction of samples replaced by outliers, in [0, 1].
    #[arg(long)]
    pub outlier_ratio: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trend amplitude.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Standard deviation of the Gaussian noise.
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Magnitude of each outlier offset.
    #[arg(long)]
    pub outlier_amplitude: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(a: &GenerateArgs, cfg: &Config) -> CliResult<()> {
    let d = SyntheticSpec::default();
    let spec = SyntheticSpec {
        n: cfg.resolve(a.n, "n", d.n)?,
        amplitude: cfg.resolve(a.amplitude, "amplitude", d.amplitude)?,
        noise_sigma: cfg.resolve(a.noise_sigma, "noise-sigma", d.noise_sigma)?,
        outlier_ratio: cfg.resolve(a.outlier_ratio, "outlier-ratio", d.outlier_ratio)?,
        outlier_amplitude: cfg.resolve(a.outlier_amplitude, "outlier-amplitude", d.outlier_amplitude)?,
        seed: cfg.resolve(a.seed, "seed", d.seed)?,
    };
    let data = generate(&spec)?;

    let target = a.output.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let mut out = open_output(a.output.as_deref())?;
    let mut is_outlier = vec![false; spec.n];
    for &i in &data.outlier_positions {
        is_outlier[i] = true;
    }
    let mut is_cp = vec![false; spec.n];
    for &i in &data.change_points {
        is_cp[i] = true;
    }
    let mut text = String::with_capacity(spec.n * 40);
    text.push_str("index,value,truth,is_outlier,is_change_point\n");
    for (i, (v, t)) in data.values().iter().zip(data.truth()).enumerate() {
        text.push_str(&format!(
            "{i},{v},{t},{},{}\n",
            u8::from(is_outlier[i]),
            u8::from(is_cp[i])
        ));
    }
    out.write_all(text.as_bytes()).map_err(io_err(&target))?;
    out.flush().map_err(io_err(&target))?;

    if let Some(path) = &a.output {
        RunManifest::new("generate")
            .param("n", spec.n)
            .param("amplitude", spec.amplitude)
            .param("noise-sigma", spec.noise_sigma)
            .param("outlier-ratio", spec.outlier_ratio)
            .param("outlier-amplitude", spec.outlier_amplitude)
            .with_seed(spec.seed)
            .write_beside(path)?;
    }
    eprintln!(
        "generated {} samples, {} outliers, {} change points",
        spec.n,
        data.outlier_positions.len(),
        data.change_points.len()
    );
    Ok(())
}
