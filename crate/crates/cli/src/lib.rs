//! Scenario-driven front end for the `bcurrent` library.
//!
//! | exit | meaning                                         |
//! |------|-------------------------------------------------|
//! | 0    | success                                         |
//! | 1    | any other failure, or a failed oracle check     |
//! | 2    | scenario, expression or command-line parse error |
//! | 3    | invalid geometry, point outside the domain      |
//! | 4    | no outward vector for some chart                |
//! | 5    | quadrature budget exceeded (partial CSV written) |
//! | 6    | Weinstock test failed or form not ∂̄-closed      |
//! | 7    | growth estimate failed                          |

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub mod commands;
pub mod output;
pub mod reproduce;
pub mod scenario;

pub use scenario::Scenario;

pub mod exit_code {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const GEOMETRY: i32 = 3;
    pub const NO_OUTWARD_VECTOR: i32 = 4;
    pub const BUDGET_EXCEEDED: i32 = 5;
    pub const WEINSTOCK: i32 = 6;
    pub const GROWTH: i32 = 7;
}

#[derive(Parser, Debug)]
#[command(name = "bcurrent", version, about = "Boundary values of holomorphic functions on domains with corners")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Locate corner strata and classify each as generic or not.
    Classify,
    /// Pairing sequence F(ε) for every form, with fits and an existence verdict.
    Pair,
    /// As `pair`, with every candidate model and the Richardson table.
    Asymptotics,
    /// Pair the boundary value with a ∂̄-closed form family.
    Weinstock,
    /// Polynomial growth exponent near the boundary.
    Growth,
    /// End-to-end run of the square counterexample with oracle cross-checks.
    ReproducePaper,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Pair => "pair",
            Command::Asymptotics => "asymptotics",
            Command::Weinstock => "weinstock",
            Command::Growth => "growth",
            Command::ReproducePaper => "reproduce-paper",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Options {
    /// Scenario JSON file, or the name of a bundled scenario.
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    /// First ε of the schedule.
    #[arg(long, global = true)]
    pub eps0: Option<f64>,
    /// Ratio between consecutive ε.
    #[arg(long, global = true)]
    pub ratio: Option<f64>,
    /// Number of ε values.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Also write the refinement history of every quadrature.
    #[arg(long, global = true)]
    pub diagnostics: bool,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn other(message: impl Into<String>) -> Self {
        Self::new(exit_code::OTHER, message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::other(format!("{}: {e}", path.display()))
    }

    /// Same error, reported under a command-specific code.
    pub fn with_code(self, code: i32) -> Self {
        CliError { code, ..self }
    }
}

impl From<bcurrent::Error> for CliError {
    fn from(e: bcurrent::Error) -> Self {
        use bcurrent::Error as E;
        let code = match e {
            E::Parse { .. } => exit_code::PARSE,
            E::InvalidGeometry(_) | E::OutsideDomain(_) => exit_code::GEOMETRY,
            E::NoOutwardVector { .. } => exit_code::NO_OUTWARD_VECTOR,
            E::BudgetExceeded { .. } => exit_code::BUDGET_EXCEEDED,
            E::FormNotClosed { .. } => exit_code::WEINSTOCK,
            _ => exit_code::OTHER,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<scenario::LoadError> for CliError {
    fn from(e: scenario::LoadError) -> Self {
        CliError::new(exit_code::PARSE, e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

/// Scenario with the command-line overrides applied.
pub fn resolve_scenario(opts: &Options) -> Result<Scenario, CliError> {
    let name = opts.scenario.as_deref().ok_or_else(|| CliError::new(exit_code::PARSE, "--scenario is required"))?;
    let mut sc = Scenario::load(name)?;
    if let Some(e) = opts.eps0 {
        sc.schedule.eps0 = e;
    }
    if let Some(r) = opts.ratio {
        sc.schedule.ratio = r;
    }
    if let Some(k) = opts.steps {
        sc.schedule.steps = k;
    }
    if let Some(t) = opts.tol {
        sc.quadrature.rel_tol = t;
    }
    Ok(sc)
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let opts = &cli.opts;
    match cli.command {
        Command::ReproducePaper => reproduce::run(opts),
        cmd => {
            let sc = resolve_scenario(opts)?;
            match cmd {
                Command::Classify => commands::classify(&sc, opts),
                Command::Pair => commands::pair(&sc, opts, false),
                Command::Asymptotics => commands::pair(&sc, opts, true),
                Command::Weinstock => commands::weinstock(&sc, opts),
                Command::Growth => commands::growth(&sc, opts),
                Command::ReproducePaper => unreachable!(),
            }
        }
    }
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit_code::PARSE } else { exit_code::OK };
        }
    };
    let result = match cli.opts.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(CliError::other(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
