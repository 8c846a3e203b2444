mod commands;
mod manifest;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gc_twin::{InterfaceConfig, Placement};

use crate::commands::Outcome;

#[derive(Parser, Debug)]
#[command(name = "gc-twin", version, about = "Galvanic-coupling wearable channel digital twin")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Scenario file (TOML); the built-in scenario for --placement otherwise.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Placement of the built-in scenario.
    #[arg(long, global = true, value_enum)]
    pub placement: Option<PlacementArg>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Frequency grid, `log:START:STOP:N` or `lin:START:STOP:N`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Mesh resolution `NR:NTHETA:NZ`.
    #[arg(long, global = true)]
    pub mesh: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Link response and channel metrics of one scenario over the grid.
    Sweep,
    /// Distance-normalised attenuation and delay coefficients at 10 kHz and 1 MHz.
    Narrowband {
        /// Interface configuration of the built-in configurations.
        #[arg(long, value_enum, default_value = "foam-gel")]
        interface: InterfaceArg,
    },
    /// In-band attenuation and delay spread versus bandwidth.
    Wideband {
        /// Carrier frequency, Hz.
        #[arg(long, default_value_t = 500e3)]
        fc: f64,
        /// Comma-separated bandwidths, Hz.
        #[arg(long, value_delimiter = ',', default_value = "50e3,100e3,200e3,300e3,400e3,500e3,600e3,700e3,800e3")]
        bands: Vec<f64>,
        /// Interface configurations to compare; the scenario's own if omitted.
        #[arg(long, value_enum, value_delimiter = ',')]
        interfaces: Vec<InterfaceArg>,
    },
    /// PN channel-sounding simulation.
    Sound {
        /// Channel response CSV (f_Hz,ReH,ImH); the scenario's link otherwise.
        #[arg(long)]
        channel: Option<PathBuf>,
        #[arg(long)]
        snr_db: Option<f64>,
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Gain and phase alignment of measured replicates against a twin response.
    Calibrate {
        #[command(flatten)]
        inputs: CalibInputs,
    },
    /// Similarity of calibrated measurements and twin response.
    Compare {
        #[command(flatten)]
        inputs: CalibInputs,
        /// Configuration name written in the report.
        #[arg(long, default_value = "run")]
        label: String,
    },
    /// Export the built-in tissue table.
    Tissues,
    /// Export the canonical form of the scenario.
    Scenario,
    /// Regenerate the twin and synthetic measured fixture files.
    Fixture,
}

#[derive(Args, Debug, Clone)]
pub struct CalibInputs {
    /// Twin response CSV (f_Hz,ReH,ImH).
    #[arg(long)]
    pub twin: PathBuf,
    /// Measured response CSV, single (f_Hz,ReH,ImH) or replicates (replicate,f_Hz,ReH,ImH).
    #[arg(long)]
    pub measured: PathBuf,
    /// Calibration band `LOW:HIGH` in Hz; central half of the grid otherwise.
    #[arg(long)]
    pub calib_band: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum PlacementArg {
    #[value(alias = "long")]
    Longitudinal,
    #[value(alias = "rad")]
    Radial,
}

impl From<PlacementArg> for Placement {
    fn from(p: PlacementArg) -> Self {
        match p {
            PlacementArg::Longitudinal => Placement::Longitudinal,
            PlacementArg::Radial => Placement::Radial,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum InterfaceArg {
    Bare,
    Foam,
    Gel,
    FoamGel,
}

impl From<InterfaceArg> for InterfaceConfig {
    fn from(i: InterfaceArg) -> Self {
        match i {
            InterfaceArg::Bare => InterfaceConfig::Bare,
            InterfaceArg::Foam => InterfaceConfig::FoamOnly,
            InterfaceArg::Gel => InterfaceConfig::GelOnly,
            InterfaceArg::FoamGel => InterfaceConfig::FoamGel,
        }
    }
}

fn init_workers() -> Result<()> {
    if let Ok(v) = std::env::var("GC_TWIN_WORKERS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("GC_TWIN_WORKERS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker pool")?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    match &cli.command {
        Command::Sweep => commands::sweep(c),
        Command::Narrowband { interface } => commands::narrowband(c, (*interface).into()),
        Command::Wideband { fc, bands, interfaces } => {
            let ifs: Vec<InterfaceConfig> = interfaces.iter().map(|&i| i.into()).collect();
            commands::wideband(c, *fc, bands, &ifs)
        }
        Command::Sound {
            channel,
            snr_db,
            repetitions,
        } => commands::sound(c, channel.as_deref(), *snr_db, *repetitions),
        Command::Calibrate { inputs } => commands::calibrate(c, inputs),
        Command::Compare { inputs, label } => commands::compare(c, inputs, label),
        Command::Tissues => commands::tissues(c),
        Command::Scenario => commands::scenario(c),
        Command::Fixture => commands::fixture(c),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    match (&cli.common.out, outcome.stdout_ok) {
        (None, true) => {
            let mut stdout = std::io::stdout().lock();
            for (_, text) in &outcome.files {
                stdout.write_all(text.as_bytes())?;
            }
        }
        (out, _) => {
            let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir).with_context(|| format!("creating output directory {}", dir.display()))?;
            for (name, text) in &outcome.files {
                let path = dir.join(name);
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                println!("wrote {}", path.display());
            }
            if !outcome.summary.is_empty() {
                print!("{}", outcome.summary);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<Outcome> {
        init_workers()?;
        let outcome = dispatch(&cli)?;
        emit(&cli, &outcome)?;
        Ok(outcome)
    };
    match run() {
        Ok(o) if o.failures.is_empty() => ExitCode::SUCCESS,
        Ok(o) => {
            for f in &o.failures {
                eprintln!("failed: {f}");
            }
            eprintln!("{} row(s) failed", o.failures.len());
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
