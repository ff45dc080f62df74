use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fahp_core::{Defuzz, DerivationMethod};

/// Fuzzy AHP decision analysis.
///
/// Settings stored in the project file are the defaults; flags override them
/// for one invocation. Exit status: 0 ok, 1 invalid or inconsistent project,
/// 2 usage error, 3 I/O error.
#[derive(Debug, Parser)]
#[command(name = "fahp", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check structure and consistency ratios.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Print local and global criterion weights.
    Weights {
        #[command(flatten)]
        common: Common,
        /// Only this decision node (e.g. `goal`, `C3`).
        #[arg(long)]
        node: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Print per-criterion and global scores with the final ranking.
    Rank {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Boost each top-level criterion in turn and compare rankings.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        factor: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Write a Markdown report.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        factor: Option<f64>,
        /// Defaults to standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write scores (or scenario results) as CSV or JSON.
    Export {
        #[command(flatten)]
        common: Common,
        /// Export scenario results instead of the baseline scores.
        #[arg(long)]
        scenarios: bool,
        #[arg(long)]
        factor: Option<f64>,
        #[arg(long, value_enum, default_value_t = ExportFormat::Csv)]
        format: ExportFormat,
        /// Defaults to standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Serve the project over HTTP on the loopback interface.
    Serve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Project file (JSON).
    pub project: PathBuf,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, value_enum)]
    pub defuzz: Option<DefuzzArg>,
    /// Consistency ratio threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Use inconsistent matrices instead of failing.
    #[arg(long = "override")]
    pub allow_inconsistent: bool,
    /// Disable data-parallel evaluation.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    GmMiddle,
    Buckley,
}

impl From<Method> for DerivationMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::GmMiddle => DerivationMethod::GmMiddle,
            Method::Buckley => DerivationMethod::Buckley,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(name = "defuzz")]
pub enum DefuzzArg {
    Middle,
    Centroid,
}

impl From<DefuzzArg> for Defuzz {
    fn from(d: DefuzzArg) -> Self {
        match d {
            DefuzzArg::Middle => Defuzz::Middle,
            DefuzzArg::Centroid => Defuzz::Centroid,
        }
    }
}
