//! Command-line front end: sweep configuration, table output and the
//! subcommands behind the `plaquette` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_events, cmd_evolve, cmd_forbidden, cmd_surface, cmd_table1, cmd_wstate, Signal, DEFAULT_RESOLUTION,
};
pub use config::{linspace, parse_range, parse_scalar, Format, GeometrySource, SweepConfig};
pub use output::{Cell, Table};
pub use report::{cmd_report, ReportOutcome};

use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "plaquette", version, about = "Exact dynamics and state-transfer analysis of a four-spin DM/Heisenberg plaquette")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// flat key = value config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// t grid as min:max:steps, e.g. 0:4pi:129
    #[arg(long, allow_hyphen_values = true)]
    pub t_range: Option<String>,
    /// J grid as min:max:steps
    #[arg(long, allow_hyphen_values = true)]
    pub j_range: Option<String>,
    /// DM strength
    #[arg(long)]
    pub d: Option<String>,
    /// paper-default, swapped-control, or a bond-list file
    #[arg(long)]
    pub geometry: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// output file (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// W-state threshold
    #[arg(long)]
    pub threshold: Option<String>,
    /// largest m for the sequence table
    #[arg(long)]
    pub max_m: Option<u32>,
}

impl Common {
    pub fn resolve(&self) -> Result<SweepConfig> {
        let mut cfg = match &self.config {
            Some(p) => SweepConfig::from_file(p)?,
            None => SweepConfig::default(),
        };
        let overrides = [
            ("t_range", self.t_range.clone()),
            ("j_range", self.j_range.clone()),
            ("d", self.d.clone()),
            ("geometry", self.geometry.clone()),
            ("format", self.format.clone()),
            ("threshold", self.threshold.clone()),
            ("max_m", self.max_m.map(|m| m.to_string())),
        ];
        for (k, v) in overrides {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// closed-form amplitudes with the numeric-path deviation
    Evolve {
        #[command(flatten)]
        common: Common,
        /// pin J to one value instead of the J grid
        #[arg(long, allow_hyphen_values = true)]
        j: Option<String>,
    },
    /// concurrence and gap surfaces
    Surface {
        #[command(flatten)]
        common: Common,
        /// comma-separated subset of C12,C34,C13,C24,GAP
        #[arg(long, default_value = "C12,C34,C13,C24,GAP")]
        signals: String,
        #[arg(long, allow_hyphen_values = true)]
        j: Option<String>,
    },
    /// fractional transfer couplings with verification
    Table1 {
        #[command(flatten)]
        common: Common,
    },
    /// located transfer events
    Events {
        #[command(flatten)]
        common: Common,
        /// grid points per π
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// gap supremum at the given couplings
    Forbidden {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1,3", allow_hyphen_values = true)]
        j_values: String,
    },
    /// W-like points on the grid
    Wstate {
        #[command(flatten)]
        common: Common,
    },
    /// consolidated JSON certification report
    Report {
        #[command(flatten)]
        common: Common,
    },
}

fn pinned(j: &Option<String>) -> Result<Option<f64>> {
    j.as_deref().map(parse_scalar).transpose()
}

fn run_table(cfg: &SweepConfig, table: Result<Table>) -> Result<()> {
    output::emit(cfg.out.as_deref(), &table?.render(cfg.format))
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Evolve { common, j } => {
            let cfg = common.resolve()?;
            run_table(&cfg, cmd_evolve(&cfg, pinned(j)?))
        }
        Command::Surface { common, signals, j } => {
            let cfg = common.resolve()?;
            let signals = Signal::parse_list(signals)?;
            run_table(&cfg, cmd_surface(&cfg, &signals, pinned(j)?))
        }
        Command::Table1 { common } => {
            let cfg = common.resolve()?;
            run_table(&cfg, cmd_table1(&cfg))
        }
        Command::Events { common, resolution } => {
            let cfg = common.resolve()?;
            run_table(&cfg, cmd_events(&cfg, *resolution))
        }
        Command::Forbidden { common, j_values } => {
            let cfg = common.resolve()?;
            let js = commands::parse_j_values(j_values)?;
            run_table(&cfg, cmd_forbidden(&cfg, &js))
        }
        Command::Wstate { common } => {
            let cfg = common.resolve()?;
            run_table(&cfg, cmd_wstate(&cfg))
        }
        Command::Report { .. } => unreachable!("handled in run"),
    }
}

fn run_report(common: &Common) -> i32 {
    let cfg = match common.resolve() {
        Ok(c) => c,
        Err(e) => {
            let doc = report::error_document(None, &e);
            let _ = output::emit(common.out.as_deref(), &doc);
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let outcome = cmd_report(&cfg);
    if let Err(e) = output::emit(cfg.out.as_deref(), &outcome.document) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    outcome.exit_code
}

/// Parses `args` (including the program name) and runs; returns the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Command::Report { common } = &cli.command {
        return run_report(common);
    }
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
