//! The `waldcheck` command line: reads category, quiver, representation and
//! opfibration documents, runs the checks of the `waldcheck` library on them
//! and prints a report as text or as JSON records, one per line.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
pub mod fixtures;
pub mod format;

pub use format::Document;
use waldcheck::backends::Backend;
use waldcheck::ParseError;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;

#[derive(Parser, Debug)]
#[command(name = "waldcheck", version, about = "Exhaustive checks of finite Waldhausen categories")]
pub struct Cli {
    /// Cap on enumerated instances per axiom sweep.
    #[arg(long, global = true, env = "WALDCHECK_BUDGET")]
    pub budget: Option<u64>,
    /// Backend window, `pset:n` or `vect:p:d`.
    #[arg(long, global = true)]
    pub backend: Option<Backend>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Records,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep the Waldhausen axioms over a category document or a backend.
    VerifyWaldhausen {
        input: Option<PathBuf>,
    },
    /// Check that the cofibrations and a right class form a weak
    /// factorization system.
    CheckWfs {
        input: Option<PathBuf>,
        /// Morphism-class document for the right class; defaults to the
        /// maps with the right lifting property.
        #[arg(long)]
        right: Option<PathBuf>,
    },
    /// Rooted sequence, left-rootedness and stage subquivers.
    Quiver {
        input: PathBuf,
        #[command(subcommand)]
        action: QuiverAction,
    },
    /// Classify a morphism of representations by its maps ρ_i.
    RepClassify {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        morphism: PathBuf,
    },
    /// Verify the Waldhausen structure on representations of a quiver and
    /// replay the stagewise induction.
    RepVerify {
        #[arg(long)]
        quiver: PathBuf,
        /// Skip the stagewise replay.
        #[arg(long)]
        no_replay: bool,
    },
    /// Total structure of an opfibration document or of a builtin one.
    Total {
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
        /// Compose every lift with a vertical automorphism (0 keeps the
        /// cleavage).
        #[arg(long, default_value_t = 0)]
        variant: usize,
        /// Rank excess of the domain opfibration window; defaults to the
        /// backend bound.
        #[arg(long)]
        excess: Option<usize>,
        /// Also print the classification of every morphism.
        #[arg(long)]
        table: bool,
    },
    /// Compare the fibers of a restriction opfibration with products of
    /// coslice categories.
    FiberIso {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long, default_value_t = 1)]
        stage: usize,
        #[arg(long)]
        excess: Option<usize>,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum QuiverAction {
    RootedSeq,
    IsLeftRooted,
    Subquiver { mu: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    Codomain,
    Domain,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse { path: String, error: ParseError },
    Data(String),
    Missing(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Missing(_) => EXIT_NO_INPUT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Parse { path, error } => write!(f, "{path}:{}:{}: {}", error.line, error.column, error.message),
            CliError::Data(m) => write!(f, "error: {m}"),
            CliError::Missing(m) => write!(f, "cannot read {m}"),
        }
    }
}

impl From<waldcheck::Error> for CliError {
    fn from(e: waldcheck::Error) -> Self {
        match e {
            waldcheck::Error::Parse(error) => CliError::Parse { path: "<input>".into(), error },
            other => CliError::Data(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_document(path: &Path) -> CliResult<Document> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Missing(format!("{}: {e}", path.display())))?;
    Document::parse(&text).map_err(|error| parse_error(path, error))
}

pub(crate) fn parse_error(path: &Path, error: ParseError) -> CliError {
    CliError::Parse { path: path.display().to_string(), error }
}

/// Collected report lines and records; only one of the two is printed.
#[derive(Default)]
pub struct Output {
    pub lines: Vec<String>,
    pub records: Vec<serde_json::Value>,
}

impl Output {
    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn text(&mut self, block: &str) {
        self.lines.extend(block.lines().map(str::to_string));
    }

    pub fn record(&mut self, v: serde_json::Value) {
        self.records.push(v);
    }

    fn write(&self, format: OutputFormat, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            OutputFormat::Text => {
                for l in &self.lines {
                    writeln!(out, "{l}")?;
                }
            }
            OutputFormat::Records => {
                for r in &self.records {
                    writeln!(out, "{r}")?;
                }
            }
        }
        Ok(())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let mut report = Output::default();
    let result = commands::execute(&cli, &mut report);
    let _ = report.write(cli.format, out);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.code()
        }
    }
}
