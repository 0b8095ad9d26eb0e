//! Command-line front end.
//!
//! Configuration is resolved in layers: built-in defaults for the command,
//! then the `--config` JSON file, then `--set key=value` overrides in order,
//! then the explicit `--seed`, `--workers`, `--out` and `--format` flags.
//! Exit status is 0 on success, 2 on invalid input and 3 when an internal
//! consistency check fails.

mod commands;
pub mod config;
mod selftest;
mod table;

use std::ffi::OsString;
use std::io::Write;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::montecarlo::Runner;
pub use commands::header;
use config::{apply_set, defaults, merge, resolve, Format, RunConfig};
pub use table::{Cell, Table};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "EHBOUNDS_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "ehbounds", version, about = "Finite-blocklength bounds for AWGN channels with block energy arrivals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<std::path::PathBuf>,
    /// Override a config entry by dotted path, e.g. `model.params.mean=2`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for simulations. Defaults to $EHBOUNDS_WORKERS, then
    /// to the number of available cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Achievable and converse log M over n × L × eps.
    Bounds,
    /// Second-order coefficients over regime × eps.
    SecondOrder,
    /// Save-and-transmit design over n × L × eps × eps1.
    Design,
    /// Linear-regime rate quantiles over lambda × eps × mode.
    LinearCapacity,
    /// Monte Carlo energy outage over n × L × (eps1 or m).
    OutageSim,
    /// Monte Carlo rate quantile over lambda × eps.
    QuantileSim,
    /// Monte Carlo adaptive budget shortfall over lambda × n × eta × (eps or rate).
    AdaptiveSim,
    /// Run the built-in invariant suite.
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bounds => "bounds",
            Command::SecondOrder => "second-order",
            Command::Design => "design",
            Command::LinearCapacity => "linear-capacity",
            Command::OutageSim => "outage-sim",
            Command::QuantileSim => "quantile-sim",
            Command::AdaptiveSim => "adaptive-sim",
            Command::Selftest => "selftest",
        }
    }

    const ALL: [Command; 8] = [
        Command::Bounds,
        Command::SecondOrder,
        Command::Design,
        Command::LinearCapacity,
        Command::OutageSim,
        Command::QuantileSim,
        Command::AdaptiveSim,
        Command::Selftest,
    ];
}

fn clap_command() -> clap::Command {
    let mut cmd = Cli::command();
    for c in Command::ALL {
        let help = format!(
            "Output columns: {}\n\nDefault config:\n{}",
            header(c.name()).join(","),
            serde_json::to_string_pretty(&defaults(c.name())).expect("defaults serialize")
        );
        cmd = cmd.mut_subcommand(c.name(), |s| s.after_long_help(help));
    }
    cmd
}

pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut value = defaults(cli.command.name());
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let file: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if !file.is_object() {
            return Err(Error::Config("config file must hold a JSON object".into()));
        }
        merge(&mut value, file);
    }
    for s in &cli.set {
        apply_set(&mut value, s)?;
    }
    let obj = value.as_object_mut().expect("defaults are an object");
    // the subcommand always wins over a `command` entry in the file
    obj.insert("command".into(), cli.command.name().into());
    if let Some(seed) = cli.seed {
        obj.insert("seed".into(), seed.into());
    }
    if let Some(w) = cli.workers {
        obj.insert("workers".into(), w.into());
    }
    if let Some(out) = &cli.out {
        obj.insert("out".into(), out.clone().into());
    }
    if let Some(f) = cli.format {
        obj.insert("format".into(), serde_json::to_value(f).expect("format serializes"));
    }
    resolve(value)
}

fn worker_count(cfg: &RunConfig) -> Result<usize> {
    if let Some(w) = cfg.workers {
        return Ok(w);
    }
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        return v.trim().parse().map_err(|_| Error::Config(format!("{WORKERS_ENV}={v:?} is not a count")));
    }
    Ok(std::thread::available_parallelism().map_or(1, usize::from))
}

/// Runs a resolved config and returns the rendered output.
pub fn execute(cfg: &RunConfig) -> Result<(String, bool)> {
    let runner = Runner::new(worker_count(cfg)?)?;
    let table = match cfg.command.as_str() {
        "bounds" => commands::bounds(cfg)?,
        "second-order" => commands::second_order(cfg)?,
        "design" => commands::design_grid(cfg)?,
        "linear-capacity" => commands::linear_capacity(cfg)?,
        "outage-sim" => commands::outage_sim(cfg, &runner)?,
        "quantile-sim" => commands::quantile_sim(cfg, &runner)?,
        "adaptive-sim" => commands::adaptive_sim(cfg, &runner)?,
        "selftest" => selftest::run(&runner)?,
        other => return Err(Error::Config(format!("unknown command {other:?}"))),
    };
    let ok = cfg.command != "selftest" || table.rows.iter().all(|r| r[1] == Cell::B(true));
    Ok((table.render(cfg), ok))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Consistency(_) => 3,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = resolve_config(cli)?;
    let (text, ok) = execute(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{path}: {e}")))?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))?,
    }
    Ok(ok)
}

/// Entry point for the binary. Returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match clap_command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    match run(&cli) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("ehbounds: selftest reported failing checks");
            3
        }
        Err(e) => {
            eprintln!("ehbounds: {e}");
            exit_code(&e)
        }
    }
}
