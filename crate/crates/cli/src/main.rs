use clap::{Parser, Subcommand};
use fishbone_cli::{commands, presets, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral-Galerkin simulator for the fish-bone suspension-bridge model.
#[derive(Parser)]
#[command(name = "fishbone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a config; writes trajectory.csv, energy.csv and manifest.cfg.
    Simulate {
        config: PathBuf,
        /// Output directory (overrides output.directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrum and closed-form coefficients of the linear system.
    Linear {
        config: PathBuf,
        /// Drop cable, stretching and prestress terms.
        #[arg(long)]
        linearize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inequality suites, energy conservation and closed-form oracle checks.
    Verify {
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// H2 radius of the sampled states.
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
    },
    /// Envelope-ratio classification over sweep.beta x sweep.U.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a named preset config (unit, tnb, fig3, fig4, fig5, fig6).
    Preset { name: String },
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FISHBONE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("FISHBONE_THREADS: expected a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("FISHBONE_THREADS: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    threads()?;
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = commands::load(&config)?;
            let b = commands::simulate(&cfg, out.as_deref())?;
            println!("trajectory: {}", b.trajectory.display());
            println!("energy: {}", b.energy.display());
            println!("manifest: {}", b.manifest.display());
            println!("samples: {}", b.samples);
            println!("max_identity_residual: {:e}", b.max_residual);
        }
        Command::Linear { config, linearize, out } => {
            let cfg = commands::load(&config)?;
            let mut report = String::new();
            let res = commands::linear(&cfg, linearize, out.as_deref(), &mut report);
            print!("{report}");
            res?;
        }
        Command::Verify { seed, samples, radius } => {
            let v = commands::verify(seed, samples, radius)?;
            print!("{}", v.report);
            if v.violations > 0 {
                return Err(CliError::Verification(v.failures.join("; ")));
            }
        }
        Command::Sweep { config, out } => {
            let cfg = commands::load(&config)?;
            let (rows, path) = commands::sweep(&cfg, out.as_deref())?;
            for r in &rows {
                println!(
                    "beta = {:e}, U = {:e}: ratio {:.6e} {}",
                    r.beta,
                    r.wind_speed,
                    r.ratio,
                    r.class.as_str()
                );
            }
            println!("sweep: {}", path.display());
        }
        Command::Preset { name } => match presets::preset(&name) {
            Some(text) => print!("{text}"),
            None => {
                return Err(CliError::Config(format!(
                    "unknown preset `{name}` (known: {})",
                    presets::NAMES.join(", ")
                )))
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
