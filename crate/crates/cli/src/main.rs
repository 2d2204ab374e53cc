use std::path::PathBuf;
use std::process::ExitCode;

use adelic_cli::{CliError, ExperimentConfig, ExperimentKind, Parameters, run_and_write};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Flags override the fields of `--config`, which override built-in defaults.
#[derive(Debug, Parser)]
#[command(name = "adelic", version, about = "Adelic height and equidistribution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Random seed for samplers and random instances.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Numerical tolerance for roots and heights.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory (default: current directory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Output file prefix (default: the experiment kind).
    #[arg(long, global = true)]
    stem: Option<String>,
    /// Recompute every exact field from scratch and compare.
    #[arg(long, global = true)]
    verify: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Naive, Mahler and canonical heights of points and polynomials.
    Height(HeightArgs),
    /// Local pairings between algebraic sets.
    Pairing(PairingArgs),
    /// Discrepancy of roots of unity, periodic points or preimages.
    Equidist(EquidistArgs),
    /// Critically finite parameters of z^D + c.
    Mandelbrot(MandelbrotArgs),
    /// Local energies for T² + 1/p.
    Basilica(BasilicaArgs),
    /// Random Berkovich balls, their tree and energies.
    BerkovichDemo(BerkovichArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum EquidistKind {
    RootsOfUnity,
    PeriodicPoints,
    Preimages,
}

impl From<EquidistKind> for ExperimentKind {
    fn from(k: EquidistKind) -> Self {
        match k {
            EquidistKind::RootsOfUnity => ExperimentKind::RootsOfUnity,
            EquidistKind::PeriodicPoints => ExperimentKind::PeriodicPoints,
            EquidistKind::Preimages => ExperimentKind::Preimages,
        }
    }
}

#[derive(Debug, Args)]
struct HeightArgs {
    /// Map as "num|den" ascending coefficients, e.g. "-1,0,1".
    #[arg(long, allow_hyphen_values = true)]
    map: Option<String>,
    /// Rational point "a/b" or "inf"; repeatable.
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Option<Vec<String>>,
    /// Polynomial as ascending coefficients, e.g. "-2,0,1"; repeatable.
    #[arg(long = "poly", allow_hyphen_values = true)]
    polys: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct PairingArgs {
    /// Polynomial as ascending coefficients; repeatable.
    #[arg(long = "poly", allow_hyphen_values = true)]
    polys: Option<Vec<String>>,
    /// Places: "inf" or primes.
    #[arg(long, value_delimiter = ',')]
    places: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct EquidistArgs {
    #[arg(long, value_enum)]
    kind: Option<EquidistKind>,
    /// Map as "num|den" ascending coefficients.
    #[arg(long, allow_hyphen_values = true)]
    map: Option<String>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Sizes N for roots of unity.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Comma-separated: re, im, exp_re, bump, abs2_capped.
    #[arg(long, value_delimiter = ',')]
    test_functions: Option<Vec<String>>,
    /// Equilibrium sample size.
    #[arg(long)]
    samples: Option<usize>,
    /// Inverse-iteration depth of the equilibrium sampler.
    #[arg(long)]
    depth: Option<usize>,
    /// Rational point whose iterated preimages are taken.
    #[arg(long, allow_hyphen_values = true)]
    base_point: Option<String>,
    /// Constant C in the bound C·Lip·log N/N.
    #[arg(long)]
    constant: Option<f64>,
}

#[derive(Debug, Args)]
struct MandelbrotArgs {
    /// Degree D of z^D + c.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Level whose parameter cloud serves as the reference.
    #[arg(long)]
    reference_n: Option<usize>,
    /// Comma-separated: re, im, exp_re, bump, abs2_capped.
    #[arg(long, value_delimiter = ',')]
    test_functions: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct BasilicaArgs {
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Debug, Args)]
struct BerkovichArgs {
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// Number of random balls.
    #[arg(long)]
    count: Option<usize>,
}

impl Command {
    /// Kinds this subcommand accepts and the flag-level parameters.
    fn resolve(self) -> (Vec<ExperimentKind>, Option<ExperimentKind>, Parameters) {
        use ExperimentKind as K;
        let mut p = Parameters::default();
        match self {
            Command::Height(a) => {
                (p.map, p.points, p.polys) = (a.map, a.points, a.polys);
                (vec![K::HeightTable], None, p)
            }
            Command::Pairing(a) => {
                (p.polys, p.places) = (a.polys, a.places);
                (vec![K::PairingTable], None, p)
            }
            Command::Equidist(a) => {
                (p.map, p.n_min, p.n_max, p.sizes) = (a.map, a.n_min, a.n_max, a.sizes);
                (p.test_functions, p.samples, p.depth) = (a.test_functions, a.samples, a.depth);
                (p.base_point, p.constant) = (a.base_point, a.constant);
                (vec![K::RootsOfUnity, K::PeriodicPoints, K::Preimages], a.kind.map(Into::into), p)
            }
            Command::Mandelbrot(a) => {
                (p.degree, p.n_min, p.n_max) = (a.degree, a.n_min, a.n_max);
                (p.reference_n, p.test_functions) = (a.reference_n, a.test_functions);
                (vec![K::Mandelbrot], None, p)
            }
            Command::Basilica(a) => {
                (p.primes, p.n_min, p.n_max) = (a.primes, a.n_min, a.n_max);
                (vec![K::Basilica], None, p)
            }
            Command::BerkovichDemo(a) => {
                (p.primes, p.count) = (a.primes, a.count);
                (vec![K::BerkovichDemo], None, p)
            }
        }
    }
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let (allowed, flag_kind, mut flags) = cli.command.resolve();
    flags.seed = cli.seed;
    flags.tol = cli.tol;
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::new(flag_kind.unwrap_or(allowed[0])),
    };
    if let Some(k) = flag_kind {
        config.kind = k;
    }
    if !allowed.contains(&config.kind) {
        return Err(CliError::Config(format!(
            "configuration kind {} does not belong to this subcommand",
            config.kind.name()
        )));
    }
    config.parameters.overlay(&flags);
    if cli.jobs.is_some() {
        config.jobs = cli.jobs;
    }
    if cli.out_dir.is_some() {
        config.output.out_dir = cli.out_dir;
    }
    if cli.stem.is_some() {
        config.output.stem = cli.stem;
    }
    config.verify |= cli.verify;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run_and_write(config) {
        Ok((report, paths)) => {
            for p in &paths {
                println!("{}", p.display());
            }
            for note in &report.metadata.notes {
                eprintln!("note: {note}");
            }
            if report.metadata.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &report.metadata.failures {
                    eprintln!("row {:?} failed: {}", f.key, f.message);
                }
                eprintln!(
                    "error: {}",
                    CliError::RowsFailed {
                        failed: report.metadata.failures.len(),
                        total: report.timing.rows.len(),
                    }
                );
                ExitCode::from(2)
            }
        }
        Err(e @ CliError::Verify(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
