//! Command-line front end.
//!
//! Every subcommand produces a [`Report`]: a list of [`ResultRecord`]s for
//! JSON output and a [`Table`] for CSV output. Sweeps evaluate their points
//! independently (optionally on the rayon pool) and assemble rows in grid
//! order, so output does not depend on `--parallel`.

mod commands;
mod output;

use std::f64::consts::FRAC_PI_8;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{
    cmd_approx, cmd_diamond, cmd_fig1, cmd_fig2, cmd_fig3, cmd_fig4, cmd_twocopy, read_spec, read_spec_list,
};
pub use output::{format_number, join_numbers, Cell, ResultRecord, Table, CONVENTION};

pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        use crate::Error as E;
        match e {
            E::NoConvergence(m) => CliError::Solver(m),
            E::NotPositiveDefinite => CliError::Solver(e.to_string()),
            E::Parse(m) => CliError::Parse(m),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Sweep size: `N` for one axis, `NxM` for two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub first: usize,
    pub second: Option<usize>,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad grid size {t:?}: {e}"));
        match s.split_once(['x', 'X']) {
            Some((a, b)) => Ok(Grid { first: parse(a)?, second: Some(parse(b)?) }),
            None => Ok(Grid { first: parse(s)?, second: None }),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "chanapprox", version, about = "Optimal convex approximation of quantum channels in diamond norm")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Certificate tolerance for every diamond-norm evaluation.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; sweeps default to csv, the rest to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Sweep size, `N` or `NxM`.
    #[arg(long, global = true)]
    pub grid: Option<Grid>,
    /// Evaluate sweep points concurrently.
    #[arg(long, global = true)]
    pub parallel: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diamond distance between two channels.
    Diamond {
        /// Channel spec: inline JSON or a path to a JSON file.
        a: String,
        b: String,
    },
    /// Closest mixture of the given channels to a target.
    Approx {
        target: String,
        /// Available channels; a JSON array expands to several.
        #[arg(required = true)]
        set: Vec<String>,
    },
    /// Covariant-family distance against the identity distance x.
    Fig1,
    /// Pauli distance of U(alpha, beta, delta) over alpha, beta in [0, pi/2].
    Fig2 {
        #[arg(long, default_value_t = FRAC_PI_8)]
        delta: f64,
    },
    /// Pauli distance of generalized damping over q, gamma in [0, 1].
    Fig3,
    /// Pauli distance of generalized damping and its bounds over gamma.
    Fig4 {
        #[arg(long, default_value_t = 0.7)]
        q: f64,
    },
    /// Correlated, product and tensored single-copy approximations of two copies.
    Twocopy,
}

/// One parameter axis `start..=stop` with `count` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub axes: Vec<Axis>,
    pub tol: f64,
    pub parallel: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol >= crate::diamond::MIN_TOL) {
            return Err(CliError::Parse(format!("tolerance {} below {}", self.tol, crate::diamond::MIN_TOL)));
        }
        for a in &self.axes {
            if a.count < 2 || !(a.start <= a.stop) {
                return Err(CliError::Parse(format!("bad axis {a:?}: need count >= 2 and start <= stop")));
            }
        }
        Ok(())
    }
}

/// Records for JSON output plus the CSV table of the same data.
#[derive(Clone, Debug)]
pub struct Report {
    pub records: Vec<ResultRecord>,
    pub table: Table,
    pub default_format: Format,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => Ok(self.table.to_csv()),
            Format::Json => {
                let text = if self.records.len() == 1 {
                    serde_json::to_string_pretty(&self.records[0])
                } else {
                    serde_json::to_string_pretty(&self.records)
                };
                text.map(|mut s| {
                    s.push('\n');
                    s
                })
                .map_err(|e| CliError::Parse(e.to_string()))
            }
        }
    }
}

fn grid_1d(grid: Option<Grid>, default: usize) -> Result<usize, CliError> {
    match grid {
        None => Ok(default),
        Some(Grid { first, second: None }) => Ok(first),
        Some(g) => Err(CliError::Parse(format!("this sweep takes --grid N, got {}x{}", g.first, g.second.unwrap_or(0)))),
    }
}

fn grid_2d(grid: Option<Grid>, default: usize) -> (usize, usize) {
    match grid {
        None => (default, default),
        Some(Grid { first, second }) => (first, second.unwrap_or(first)),
    }
}

/// Runs a parsed command line and returns the report it produced.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let tol = cli.tol;
    let sweep = |axes: Vec<Axis>| {
        let cfg = SweepConfig { axes, tol, parallel: cli.parallel };
        cfg.validate().map(|_| cfg)
    };
    use std::f64::consts::FRAC_PI_2;
    match &cli.command {
        Command::Diamond { a, b } => cmd_diamond(&read_spec(a)?, &read_spec(b)?, tol),
        Command::Approx { target, set } => cmd_approx(&read_spec(target)?, &read_spec_list(set)?, tol),
        Command::Fig1 => cmd_fig1(&sweep(vec![Axis::new(0.0, 2.0, grid_1d(cli.grid, 201)?)])?),
        Command::Fig2 { delta } => {
            let (n, m) = grid_2d(cli.grid, 41);
            cmd_fig2(&sweep(vec![Axis::new(0.0, FRAC_PI_2, n), Axis::new(0.0, FRAC_PI_2, m)])?, *delta)
        }
        Command::Fig3 => {
            let (n, m) = grid_2d(cli.grid, 33);
            cmd_fig3(&sweep(vec![Axis::new(0.0, 1.0, n), Axis::new(0.0, 1.0, m)])?)
        }
        Command::Fig4 { q } => cmd_fig4(&sweep(vec![Axis::new(0.0, 1.0, grid_1d(cli.grid, 101)?)])?, *q),
        Command::Twocopy => cmd_twocopy(tol),
    }
}

/// Executes and writes the output; the returned value is the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = execute(cli).and_then(|report| {
        let text = report.render(cli.format.unwrap_or(report.default_format))?;
        match &cli.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("chanapprox: {e}");
            e.exit_code()
        }
    }
}
