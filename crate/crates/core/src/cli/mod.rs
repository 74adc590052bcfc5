//! Command-line front end. [`run`] parses arguments, executes one command and
//! returns the JSON report, the human summary and the exit code, so the
//! binary only has to print them.
//!
//! Exit codes: 0 verdict reached (including non-membership), 1 input or
//! validation error, 2 budget exceeded, 3 internal invariant failure.

mod commands;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::geometry::{Budget, GeometryError};
use crate::mapping::MappingError;
use crate::model::ModelError;
use crate::quantum::QuantumError;

pub use report::{Report, REPORT_TYPE};

pub const BUDGET_ENV: &str = "BELLCTX_BUDGET";
pub const DEFAULT_SNAP_DEN: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "bellctx", version, about = "Bell correlations and contextuality behaviours, exactly")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Enumeration budget (deterministic assignments and vertices held at once).
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Numerical tolerance for quantum commands.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Largest denominator accepted when snapping floats to rationals.
    #[arg(long = "snap-den", global = true)]
    pub snap_den: Option<u64>,
    /// Worker threads for batches of independent inputs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the produced document, or a check's certificate, to this path.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML file whose keys mirror the flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    /// No-signalling test of a correlation.
    Ns,
    /// Membership in the local polytope.
    Local,
    /// Membership in the non-contextual polytope.
    Nc,
    /// Membership in the contextual set (all equivalences respected).
    Ctxset,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate any supported document.
    Validate { input: PathBuf },
    /// Map a no-signalling correlation to a contextuality behaviour.
    Map { input: PathBuf },
    /// Map a behaviour in NS form back to a correlation.
    Unmap {
        input: PathBuf,
        #[arg(long = "index-A", value_delimiter = ',')]
        index_a: Option<Vec<usize>>,
    },
    /// Remove deterministic inputs and zero-probability outcomes of Alice.
    Reduce { input: PathBuf },
    /// Undo a reduction given its relabelling record.
    EmbedBell {
        input: PathBuf,
        #[arg(long)]
        record: PathBuf,
    },
    /// Normal form of every equivalence in a scenario.
    NormalForm { input: PathBuf },
    /// Rewrite repeated-preparation equivalences into NS form.
    EmbedPreps { input: PathBuf },
    /// Blend towards the interior point with weight 1/n.
    Blend {
        input: PathBuf,
        #[arg(long)]
        n: u64,
    },
    /// Membership checks with certificates.
    Check {
        kind: CheckKind,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Behaviour file when the positional input is a bare scenario.
        #[arg(long)]
        behaviour: Option<PathBuf>,
    },
    /// Facets of the non-contextual polytope of a scenario.
    Facets { input: PathBuf },
    /// Vertices of the non-contextual polytope of a scenario.
    Vertices { input: PathBuf },
    /// Bob's assemblage from a quantum realisation.
    Assemblage { input: PathBuf },
    /// Purification and steering POVMs for an assemblage or realisation.
    Hjw {
        input: PathBuf,
        /// Realisation supplying Bob's measurements for the table comparison.
        #[arg(long)]
        bob: Option<PathBuf>,
    },
    /// Re-check a certificate against the data it certifies.
    VerifyCert {
        certificate: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Tables of a quantum realisation, snapped to rationals when possible.
    Snap { input: PathBuf },
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Validate { .. } => "validate".into(),
            Command::Map { .. } => "map".into(),
            Command::Unmap { .. } => "unmap".into(),
            Command::Reduce { .. } => "reduce".into(),
            Command::EmbedBell { .. } => "embed-bell".into(),
            Command::NormalForm { .. } => "normal-form".into(),
            Command::EmbedPreps { .. } => "embed-preps".into(),
            Command::Blend { .. } => "blend".into(),
            Command::Check { kind, .. } => {
                let k = kind.to_possible_value().expect("no skipped variants");
                format!("check {}", k.get_name())
            }
            Command::Facets { .. } => "facets".into(),
            Command::Vertices { .. } => "vertices".into(),
            Command::Assemblage { .. } => "assemblage".into(),
            Command::Hjw { .. } => "hjw".into(),
            Command::VerifyCert { .. } => "verify-cert".into(),
            Command::Snap { .. } => "snap".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Budget(_) => "budget",
            CliError::Internal(_) => "internal",
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<MappingError> for CliError {
    fn from(e: MappingError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            GeometryError::Internal(_) => CliError::Internal(e.to_string()),
            GeometryError::Model(m) => m.into(),
        }
    }
}

/// Effective settings after merging flags, environment and config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub budget: Budget,
    pub tolerance: f64,
    pub snap_den: u64,
    pub jobs: usize,
    pub output: Option<PathBuf>,
}

impl Settings {
    /// Precedence: flag, then `BELLCTX_BUDGET` (budget only), then config
    /// file, then defaults.
    pub fn resolve(flags: &Flags, env_budget: Option<&str>) -> Result<Settings, CliError> {
        let config = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
            }
            None => toml::Table::new(),
        };
        let int_key = |key: &str| -> Result<Option<u64>, CliError> {
            match config.get(key) {
                None => Ok(None),
                Some(toml::Value::Integer(n)) if *n > 0 => Ok(Some(*n as u64)),
                Some(v) => Err(CliError::Input(format!("config key {key:?} must be a positive integer, got {v}"))),
            }
        };
        let env_budget = env_budget
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| CliError::Input(format!("{BUDGET_ENV}={s:?}: {e}")))
            })
            .transpose()?;
        let budget = match flags.budget.or(env_budget).or(int_key("budget")?.map(|n| n as usize)) {
            Some(n) => Budget {
                atlas: n,
                vertices: n,
            },
            None => Budget::default(),
        };
        let tolerance = match (flags.tolerance, config.get("tolerance")) {
            (Some(t), _) => t,
            (None, Some(toml::Value::Float(t))) => *t,
            (None, Some(v)) => return Err(CliError::Input(format!("config key \"tolerance\" must be a float, got {v}"))),
            (None, None) => crate::quantum::TOLERANCE,
        };
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(CliError::Input(format!("tolerance must be a nonnegative number, got {tolerance}")));
        }
        let snap_den = flags.snap_den.or(int_key("snap-den")?).unwrap_or(DEFAULT_SNAP_DEN);
        let jobs = flags.jobs.or(int_key("jobs")?.map(|n| n as usize)).unwrap_or(1).max(1);
        let output = flags.output.clone().or_else(|| {
            config
                .get("output")
                .and_then(toml::Value::as_str)
                .map(PathBuf::from)
        });
        Ok(Settings {
            budget,
            tolerance,
            snap_den,
            jobs,
            output,
        })
    }
}

/// Everything the binary needs to print.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(args, std::env::var(BUDGET_ENV).ok().as_deref())
}

/// [`run`] with the budget environment variable passed explicitly.
pub fn run_with_env<I, T>(args: I, env_budget: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let command = cli.command.name();
    let started = std::time::Instant::now();
    let result = Settings::resolve(&cli.flags, env_budget)
        .and_then(|settings| commands::execute(&cli.command, &settings).map(|r| (r, settings)));
    let elapsed = started.elapsed();
    match result {
        Ok((mut report, settings)) => {
            if let (Some(path), Some(text)) = (&settings.output, &report.document_text) {
                if let Err(e) = std::fs::write(path, text) {
                    let err = CliError::Input(format!("{}: {e}", path.display()));
                    return Report::failure(&command, &err).finish(elapsed);
                }
                report.set("output", path.display().to_string().into());
            }
            report.finish(elapsed)
        }
        Err(err) => Report::failure(&command, &err).finish(elapsed),
    }
}

/// Reads a file, or standard input for `-`.
pub(crate) fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}
