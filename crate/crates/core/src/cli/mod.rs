//! Command-line front end: `summary`, `train`, `eval`, `predict` and
//! `gradcheck`.
//!
//! Settings resolve in the order flag, `BOTNET_*` environment variable,
//! `--config` file, built-in default.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_config, RunConfig};

use crate::error::{Error, ErrorCategory, Result};
use crate::training::Mutation;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "botnet",
    version,
    about = "GRU + 1-D CNN botnet flow classifier"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Flat `key = value` settings file.
    #[arg(long, global = true, env = "BOTNET_CONFIG")]
    pub config: Option<PathBuf>,
    /// Input flow CSV.
    #[arg(long, global = true, env = "BOTNET_DATA")]
    pub data: Option<PathBuf>,
    /// Weight manifest to write (train) or read.
    #[arg(long, global = true, env = "BOTNET_WEIGHTS")]
    pub weights: Option<PathBuf>,
    /// Report output: metrics (eval), predictions (predict), probe table (gradcheck).
    #[arg(long, global = true, env = "BOTNET_REPORT")]
    pub report: Option<PathBuf>,
    /// Per-epoch stats file (train); defaults to `<weights>.epochs`.
    #[arg(long, global = true, env = "BOTNET_STATS")]
    pub stats: Option<PathBuf>,
    /// File naming the 16 feature columns, one per line.
    #[arg(long, global = true, env = "BOTNET_FEATURES")]
    pub features: Option<PathBuf>,
    #[arg(long, global = true, env = "BOTNET_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "BOTNET_EPOCHS")]
    pub epochs: Option<usize>,
    #[arg(long, global = true, env = "BOTNET_BATCH_SIZE")]
    pub batch_size: Option<usize>,
    #[arg(long, global = true, env = "BOTNET_LEARNING_RATE")]
    pub learning_rate: Option<f64>,
    /// `single` or `double`.
    #[arg(long, global = true, env = "BOTNET_PRECISION")]
    pub precision: Option<String>,
    /// Keep the class mix in the validation split.
    #[arg(long, global = true, env = "BOTNET_STRATIFIED")]
    pub stratified: bool,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the layer table and parameter counts.
    Summary {
        #[arg(long, env = "BOTNET_GRU_UNITS")]
        gru_units: Option<usize>,
        #[arg(long, env = "BOTNET_FILTERS")]
        filters: Option<usize>,
    },
    /// Fit a model on a labeled CSV and write its weights.
    Train,
    /// Score a labeled CSV and print the statistics report.
    Eval,
    /// Write one prediction line per CSV row.
    Predict,
    /// Compare analytic gradients with finite differences.
    Gradcheck {
        #[arg(long, env = "BOTNET_PROBES")]
        probes: Option<usize>,
        #[arg(long, env = "BOTNET_TOLERANCE")]
        tolerance: Option<f64>,
        /// Corrupt the GRU recurrent gradients to show the check failing.
        #[arg(long)]
        mutate: bool,
    },
}

pub fn exit_code(err: &Error) -> i32 {
    match err.category() {
        ErrorCategory::Config => EXIT_CONFIG,
        ErrorCategory::Data => EXIT_DATA,
        ErrorCategory::Numeric => EXIT_NUMERIC,
        ErrorCategory::Io => EXIT_IO,
    }
}

fn category_name(c: ErrorCategory) -> &'static str {
    match c {
        ErrorCategory::Config => "config",
        ErrorCategory::Data => "data",
        ErrorCategory::Numeric => "numeric",
        ErrorCategory::Io => "io",
    }
}

/// Merges defaults, the config file and command-line values.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let o = &cli.opts;
    let mut cfg = match &o.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let paths = [
        (&o.data, &mut cfg.data),
        (&o.weights, &mut cfg.weights),
        (&o.report, &mut cfg.report),
        (&o.stats, &mut cfg.stats),
        (&o.features, &mut cfg.features),
    ];
    for (flag, slot) in paths {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    if let Some(v) = o.seed {
        cfg.train.seed = v;
    }
    if let Some(v) = o.epochs {
        cfg.train.epochs = v;
    }
    if let Some(v) = o.batch_size {
        cfg.train.batch_size = v;
    }
    if let Some(v) = o.learning_rate {
        cfg.train.learning_rate = v;
    }
    if let Some(p) = &o.precision {
        cfg.precision = config::parse_precision(p)?;
    }
    if o.stratified {
        cfg.train.stratified = true;
    }
    match &cli.command {
        Command::Summary { gru_units, filters } => {
            if let Some(u) = gru_units {
                cfg.arch.gru_units = *u;
            }
            if let Some(f) = filters {
                cfg.arch.filters = *f;
            }
        }
        Command::Gradcheck {
            probes,
            tolerance,
            mutate,
        } => {
            if let Some(p) = probes {
                cfg.gradcheck.probes = *p;
            }
            if let Some(t) = tolerance {
                cfg.gradcheck.tolerance = *t;
            }
            if *mutate {
                cfg.gradcheck.mutation = Some(Mutation::FlipGruRecurrent);
            }
        }
        _ => {}
    }
    if cfg.arch.filters == 0 || cfg.arch.gru_units == 0 {
        return Err(Error::Config(
            "filters and gru_units must be at least 1".into(),
        ));
    }
    Ok(cfg)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let cfg = resolve(cli)?;
    match cli.command {
        Command::Summary { .. } => commands::cmd_summary(&cfg, out),
        Command::Train => commands::cmd_train(&cfg, out),
        Command::Eval => commands::cmd_eval(&cfg, out),
        Command::Predict => commands::cmd_predict(&cfg, out),
        Command::Gradcheck { .. } => commands::cmd_gradcheck(&cfg, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to stderr as `error[category]: message`.
pub fn run<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                eprint!("{}", e.render());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            return e.exit_code();
        }
    };
    let level = match cli.opts.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env("BOTNET_LOG")
        .try_init();
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error[{}]: {e}", category_name(e.category()));
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("botnet").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "seed = 3\nepochs = 7\nbatch_size = 20\n").unwrap();
        let cli = parse(&["train", "--config", path.to_str().unwrap(), "--epochs", "2"]);
        let cfg = resolve(&cli).unwrap();
        assert_eq!(cfg.train.seed, 3);
        assert_eq!(cfg.train.epochs, 2);
        assert_eq!(cfg.train.batch_size, 20);
    }

    #[test]
    fn summary_overrides_architecture() {
        let cfg = resolve(&parse(&["summary", "--gru-units", "4", "--filters", "8"])).unwrap();
        assert_eq!(cfg.arch.gru_units, 4);
        assert_eq!(cfg.arch.filters, 8);
        assert!(resolve(&parse(&["summary", "--filters", "0"])).is_err());
    }

    #[test]
    fn exit_codes_by_category() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Data("x".into())), EXIT_DATA);
        assert_eq!(exit_code(&Error::Numeric("x".into())), EXIT_NUMERIC);
        let io = Error::io("p", std::io::Error::other("x"));
        assert_eq!(exit_code(&io), EXIT_IO);
    }

    #[test]
    fn bad_precision_is_config_error() {
        let err = resolve(&parse(&["train", "--precision", "half"])).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_CONFIG);
    }
}
