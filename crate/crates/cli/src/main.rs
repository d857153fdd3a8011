mod commands;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ultrapoly::sliding::Quantifier;

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "ultrapoly", version, about = "Extreme rays of the polytope of l-infinity nearest ultrametrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, short, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = QuantifierArg::AllResolutions)]
    pub quantifier: QuantifierArg,

    /// Raise log verbosity (repeatable).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Nearest ultrametric, distance q, subdominant map and spanning tree.
    Nearest { input: String },
    /// Inequality system of the polytope.
    Cone { input: String },
    /// Sliding closure and the mobility filter.
    Candidates { input: String },
    /// Certified extreme rays.
    Extremes {
        input: String,
        /// Cross-check against the residuation oracle and probe random combinations.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Extremality certificate for one candidate ultrametric.
    Check {
        input: String,
        /// File, or inline pair values such as `2,6,6`.
        candidate: String,
        /// Compare the verdict with the enumerated extremes.
        #[arg(long)]
        oracle: bool,
    },
    /// Add one far-away item.
    Extend {
        input: String,
        candidate: String,
        #[arg(long, default_value = "1")]
        epsilon: String,
    },
    /// Grow the four-item counterexample to `items` items.
    Counterexample {
        #[arg(long, short = 'n', default_value_t = 5)]
        items: usize,
        #[arg(long, default_value = "1")]
        epsilon: String,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Newick,
    Dot,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum QuantifierArg {
    AllResolutions,
    PerResolution,
}

impl From<QuantifierArg> for Quantifier {
    fn from(q: QuantifierArg) -> Self {
        match q {
            QuantifierArg::AllResolutions => Quantifier::AllResolutions,
            QuantifierArg::PerResolution => Quantifier::PerResolution,
        }
    }
}

fn write_out(path: Option<&PathBuf>, body: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "stdout".into(),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    let result = commands::run(&cli).and_then(|outcome| {
        write_out(cli.output.as_ref(), &outcome.body)?;
        match outcome.disagreement {
            Some(msg) => Err(CliError::Disagreement(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
