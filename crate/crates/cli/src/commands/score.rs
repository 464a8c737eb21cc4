use std::path::PathBuf;

use clap::Args;
use robtrend::metrics::report;

use crate::error::{CliError, CliResult};
use crate::io::{read_series, read_series_column};

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// Filter output with a `trend` column.
    pub estimate: PathBuf,
    /// Generated CSV supplying `truth` and `is_change_point`.
    #[arg(long)]
    pub truth: PathBuf,
}

pub fn run(a: &ScoreArgs) -> CliResult<()> {
    let est = read_series_column(&a.estimate, "trend")?;
    let reference = read_series(&a.truth)?;
    let truth = reference.truth.ok_or_else(|| {
        CliError::Usage(format!("{} has no 'truth' column", a.truth.display()))
    })?;
    let cps = reference.change_points.ok_or_else(|| {
        CliError::Usage(format!("{} has no 'is_change_point' column", a.truth.display()))
    })?;
    let r = report(&est.values, &truth, &cps)?;
    print!("{}", r.to_key_value());
    Ok(())
}
