//! Batch experiments for adelic heights and equidistribution, written as
//! CSV/JSON tables plus plot-ready data files.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::path::PathBuf;

pub use config::{ExperimentConfig, ExperimentKind, OutputPaths, Parameters};
pub use error::{CliError, CliResult};
pub use experiments::run;
pub use report::{Cell, ExperimentReport, emit_plotdata};

/// Runs `config` and writes the report and its plot files. Files are written
/// even when some rows failed; the failures are listed in the report metadata.
pub fn run_and_write(config: ExperimentConfig) -> CliResult<(ExperimentReport, Vec<PathBuf>)> {
    let dir = config.out_dir();
    let stem = config.stem();
    let report = run(config)?;
    let mut paths = report.write(&dir, &stem)?;
    paths.extend(emit_plotdata(&report, &dir, &stem)?);
    Ok((report, paths))
}
