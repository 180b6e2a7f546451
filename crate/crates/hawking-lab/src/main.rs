use clap::{Parser, ValueEnum};
use hawking_lab::{run, Lab, RunConfig, RunDir, RunError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Experiment {
    Geometry,
    Foliation,
    Star,
    EvolveFree,
    EvolveStar,
    Radiation,
    Decay,
    Blueshift,
    WkbCheck,
    Hawking,
    Asymp,
    SpectralSelftest,
    AppendixCheck,
    Selftest,
}

/// Numerical experiments for massive fields near a collapsing star in Schwarzschild-de Sitter.
///
/// Exit codes: 0 all checks pass, 1 validation error, 2 numerical failure or failed check.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    experiment: Experiment,
    /// Sectioned key = value config; the canonical parameters are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; each experiment writes into a subdirectory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Comma-separated values of kappa_minus * T, overriding [modes] kappa_t.
    #[arg(long)]
    t_sweep: Option<String>,
    /// Comma-separated angular modes, overriding [modes] ell.
    #[arg(long)]
    mode_list: Option<String>,
}

fn execute(cli: &Cli) -> Result<bool, RunError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let cfg = cfg.with_overrides(cli.t_sweep.as_deref(), cli.mode_list.as_deref())?;
    let workers = match cli.workers {
        Some(0) => return Err(RunError::Validation("--workers must be positive".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| RunError::Io(e.to_string()))?;
    let lab = Lab::new(cfg)?;
    let name = cli.experiment.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let dir = RunDir::create(&cli.out, &name, &lab.cfg, &lab.bg)?;
    dir.start()?;
    let report = match pool.install(|| run(&lab, &name)) {
        Ok(r) => r,
        Err(e) => {
            dir.abort(&e)?;
            return Err(e);
        }
    };
    let hash = dir.finish(&report)?;
    for c in &report.checks {
        let tag = c.criterion.map_or(String::new(), |n| format!("[{n}] "));
        println!("{} {tag}{}: {:e} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.measured, c.limit);
    }
    println!("{name}: {} -> {} (manifest {hash})", if report.pass { "pass" } else { "fail" }, dir.dir.display());
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
