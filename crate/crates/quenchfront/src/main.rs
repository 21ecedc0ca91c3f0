use std::{fs, io, path::PathBuf, process::ExitCode};

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use quenchfront::{
    commands::{self, Output},
    RunConfig,
};

/// Admissible fronts of u'' + c u' - x u - u^3 = 0.
#[derive(Parser)]
#[command(name = "quenchfront", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the front at one drift and write the profile.
    Solve(Flags),
    /// Continue the branch over [cmin, cmax] and write one row per point.
    Branch(Flags),
    /// Leading eigenvalues of the linearization and the ground state.
    Spectrum(Flags),
    /// Perturb the front and measure the decay rate under the evolution.
    Evolve(Flags),
    /// Tanh-ramp front against the scaled linear-ramp front.
    CompareTanh(Flags),
    /// Run the acceptance criteria.
    Validate {
        #[command(flatten)]
        flags: Flags,
        /// Added to Omega0 in the front-delay prediction.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        omega0_offset: f64,
    },
}

#[derive(Args, Clone, Default)]
struct Flags {
    /// Config file (`key = value` lines) or a previous output CSV whose header is reused.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    cmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    cmax: Option<f64>,
    #[arg(long)]
    dc: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Interface level (default 0.1).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    xmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    xmax: Option<f64>,
    /// Grid spacing (for validate: coarse spacing of the order study).
    #[arg(long)]
    h: Option<f64>,
    /// Newton residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of eigenvalues.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    /// imex-euler or imex-cn.
    #[arg(long)]
    scheme: Option<String>,
    /// Also compute the leading eigenvalue.
    #[arg(long)]
    spectrum: bool,
    /// Converged profile CSV used as the starting point.
    #[arg(long)]
    seed_file: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
}

impl Flags {
    fn effective(&self) -> Result<RunConfig> {
        let base = match &self.config {
            None => RunConfig::default(),
            Some(path) => {
                let text = fs::read_to_string(path)?;
                if text.starts_with("# schema_version") {
                    commands::config_of(path)?
                } else {
                    RunConfig::from_file(path)?
                }
            }
        };
        let flags = RunConfig {
            c: self.c,
            cmin: self.cmin,
            cmax: self.cmax,
            dc: self.dc,
            eps: self.eps,
            delta: self.delta,
            xmin: self.xmin,
            xmax: self.xmax,
            h: self.h,
            tol: self.tol,
            k: self.k,
            dt: self.dt,
            t_end: self.t_end,
            amplitude: self.amplitude,
            scheme: self.scheme.clone(),
            spectrum: self.spectrum.then_some(true),
            seed_file: self.seed_file.clone(),
            out: self.out.clone(),
        };
        Ok(base.overlay(&flags))
    }
}

type Runner = Box<dyn Fn(&RunConfig) -> Result<Output>>;

fn run(cli: Cli) -> Result<Option<anyhow::Error>> {
    let (flags, runner): (&Flags, Runner) = match &cli.command {
        Command::Solve(f) => (f, Box::new(commands::solve)),
        Command::Branch(f) => (f, Box::new(commands::branch)),
        Command::Spectrum(f) => (f, Box::new(commands::spectrum)),
        Command::Evolve(f) => (f, Box::new(commands::evolve)),
        Command::CompareTanh(f) => (f, Box::new(commands::compare_tanh)),
        Command::Validate { flags, omega0_offset } => {
            let offset = *omega0_offset;
            (flags, Box::new(move |cfg: &RunConfig| commands::validate(cfg, offset)))
        }
    };
    let cfg = flags.effective()?;
    let out = runner(&cfg)?;
    let validating = matches!(cli.command, Command::Validate { .. });
    match &cfg.out {
        Some(path) => out.table.write(path.as_ref())?,
        None if !validating => out.table.write_to(io::stdout().lock())?,
        None => {}
    }
    Ok(out.failure)
}

/// One machine-readable line: `error: kind=<kind> message="<text>"`.
fn report(e: &anyhow::Error) {
    let kind = e
        .chain()
        .find_map(|c| c.downcast_ref::<quenchfront_core::Error>())
        .map(|ce| {
            let dbg = format!("{ce:?}");
            dbg.split([' ', '(', '{']).next().unwrap_or("Unknown").to_string()
        })
        .unwrap_or_else(|| "Usage".to_string());
    let message = format!("{e:#}").replace('"', "'");
    eprintln!("error: kind={kind} message=\"{message}\"");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(e)) | Err(e) => {
            report(&e);
            ExitCode::FAILURE
        }
    }
}
