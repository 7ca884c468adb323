//! The `maxdiv` command line.
//!
//! Exit status: 0 success, 2 input error, 3 precondition violated
//! (asymmetric matrix, too many species), 4 numerical failure.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diversity::{diversity, diversity_profile, Order};
use crate::error::Error;
use crate::graph::{clique_capacity, epsilon_entropy_bounds, maximum_independent_set};
use crate::io::{emit_profile_csv, parse_abundances, parse_general_matrix, parse_graph, parse_irreflexive_graph, parse_metric, ParseError};
use crate::linalg::{is_strictly_diagonally_dominant, is_ultrametric, SimilarityMatrix};
use crate::maximizer::{full_support_diagnostics, maximize, maximize_exhaustive, FeasibleSubset, MaximizationResult};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

/// Environment variable holding the default number of significant digits.
pub const PRECISION_ENV: &str = "MAXDIV_PRECISION";

#[derive(Debug, Parser)]
#[command(name = "maxdiv", version, about = "Similarity-sensitive diversity and its maximization")]
pub struct Cli {
    /// Significant digits in human-readable output
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 6)]
    pub precision: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// Full-precision JSON
    Json,
}

#[derive(Debug, Args)]
pub struct CommunityArgs {
    /// Similarity matrix as headerless CSV
    #[arg(long, short = 'z')]
    pub matrix: PathBuf,
    /// Relative abundances, comma or newline separated
    #[arg(long, short = 'p')]
    pub abundances: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diversity of one order
    Diversity {
        #[command(flatten)]
        community: CommunityArgs,
        /// Order q in [0, inf]
        #[arg(long, short = 'q')]
        q: Order,
    },
    /// Diversity profile as `q,value` CSV
    Profile {
        #[command(flatten)]
        community: CommunityArgs,
        /// Comma-separated ascending orders (default 0,0.25,0.5,1,2,4,8,16,inf)
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<Order>>,
        /// Write the CSV here instead of standard output
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Maximum diversity and the maximizing distributions
    Maximize {
        /// Symmetric similarity matrix as headerless CSV
        #[arg(long, short = 'z')]
        matrix: PathBuf,
        /// Describe every winning subset's weighting space
        #[arg(long)]
        family: bool,
        /// Skip the fast path and enumerate all subsets
        #[arg(long)]
        exhaustive: bool,
    },
    /// Definiteness, ultrametricity, dominance and full-support findings
    Diagnose {
        /// Symmetric similarity matrix as headerless CSV
        #[arg(long, short = 'z')]
        matrix: PathBuf,
    },
    /// Graph applications
    #[command(subcommand)]
    Graph(GraphCommand),
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Independence number of a reflexive graph
    Alpha {
        /// Header line `n`, then one 1-based edge `i j` per line
        #[arg(long, short = 'g')]
        graph: PathBuf,
    },
    /// Clique capacity 1 - 1/omega of a loop-free graph
    Capacity {
        /// Header line `n`, then one 1-based edge `i j` per line
        #[arg(long, short = 'g')]
        graph: PathBuf,
    },
    /// Covering-number bounds on the maximum diversity of a threshold matrix
    Entropy {
        /// Distance matrix as headerless CSV
        #[arg(long, short = 'd')]
        metric: PathBuf,
        /// Similarity threshold: species within this distance count as similar
        #[arg(long, short = 'e')]
        epsilon: f64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Library(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } => EXIT_INPUT,
            CliError::Write { .. } => EXIT_NUMERICAL,
            CliError::Library(e) => match e {
                Error::NotSymmetric { .. } | Error::TooManySpecies { .. } | Error::GridTooLarge { .. } => {
                    EXIT_PRECONDITION
                }
                Error::Numerical(_) | Error::LpIterationLimit(_) | Error::ZeroWeighting => EXIT_NUMERICAL,
                _ => EXIT_INPUT,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn parsed<T>(path: &Path, r: std::result::Result<T, ParseError>) -> CliResult<T> {
    r.map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn load_matrix(path: &Path) -> CliResult<SimilarityMatrix> {
    parsed(path, parse_general_matrix(&read(path)?))
}

fn load_community(args: &CommunityArgs) -> CliResult<(SimilarityMatrix, crate::diversity::Distribution)> {
    let z = load_matrix(&args.matrix)?;
    let p = parsed(&args.abundances, parse_abundances(&read(&args.abundances)?, z.n()))?;
    Ok((z, p))
}

/// `x` to `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let exponent = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exponent) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

struct Printer {
    digits: usize,
}

impl Printer {
    fn num(&self, x: f64) -> String {
        format_significant(x, self.digits)
    }

    fn vector(&self, v: &[f64]) -> String {
        let cells: Vec<String> = v.iter().map(|&x| self.num(x)).collect();
        format!("({})", cells.join(", "))
    }
}

fn one_based(indices: &[usize]) -> String {
    let cells: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", cells.join(", "))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("results serialize");
    s.push('\n');
    s
}

fn describe_family(pr: &Printer, out: &mut String, w: &FeasibleSubset) {
    let ws = &w.weighting_space;
    let _ = writeln!(out, "  support {} magnitude {}", one_based(&w.indices), pr.num(w.magnitude));
    let _ = writeln!(out, "    vertex weighting {}", pr.vector(w.representative()));
    if ws.nullspace_basis.is_empty() {
        let _ = writeln!(out, "    weighting is unique");
    } else {
        if let Some(particular) = &ws.particular {
            let _ = writeln!(out, "    particular weighting {}", pr.vector(particular));
        }
        for (k, v) in ws.nullspace_basis.iter().enumerate() {
            let _ = writeln!(out, "    kernel direction {} {}", k + 1, pr.vector(v));
        }
        let _ = writeln!(
            out,
            "    maximizers: particular + kernel combination, kept where nonnegative, then normalized"
        );
    }
}

fn render_maximization(pr: &Printer, r: &MaximizationResult, family: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dmax: {}", pr.num(r.dmax));
    let _ = writeln!(out, "method: {}", serde_json::to_value(r.method).unwrap().as_str().unwrap_or(""));
    let supports: Vec<String> = r.winners.iter().map(|w| one_based(&w.indices)).collect();
    let _ = writeln!(out, "winners: {}", supports.join(" "));
    let _ = writeln!(out, "sample maximizer: {}", pr.vector(r.sample_maximizer.probs()));
    let _ = writeln!(out, "unique maximizer: {}", r.unique_maximizer);
    let _ = writeln!(out, "full-support maximizer exists: {}", r.full_support_exists);
    let _ = writeln!(out, "all maximizers have full support: {}", r.all_maximizers_full_support);
    if family {
        let _ = writeln!(out, "winner families:");
        for w in &r.winners {
            describe_family(pr, &mut out, w);
        }
    }
    out
}

#[derive(Serialize)]
struct Diagnosis {
    symmetric: bool,
    ultrametric: bool,
    strictly_diagonally_dominant: bool,
    #[serde(flatten)]
    support: crate::maximizer::FullSupportDiagnostics,
}

fn diagnose(z: &SimilarityMatrix) -> CliResult<Diagnosis> {
    let support = full_support_diagnostics(z)?;
    Ok(Diagnosis {
        symmetric: z.is_symmetric(),
        ultrametric: is_ultrametric(z),
        strictly_diagonally_dominant: is_strictly_diagonally_dominant(z),
        support,
    })
}

fn render_diagnosis(pr: &Printer, d: &Diagnosis) -> String {
    let s = &d.support;
    let mut out = String::new();
    let _ = writeln!(out, "symmetric: {}", d.symmetric);
    let _ = writeln!(out, "minimum eigenvalue: {}", pr.num(s.min_eigenvalue));
    let _ = writeln!(out, "positive semidefinite: {}", s.positive_semidefinite);
    let _ = writeln!(out, "positive definite: {}", s.positive_definite);
    let _ = writeln!(out, "ultrametric: {}", d.ultrametric);
    let _ = writeln!(out, "strictly diagonally dominant: {}", d.strictly_diagonally_dominant);
    match (&s.best_weighting, s.weighting_floor) {
        (Some(w), Some(floor)) => {
            let _ = writeln!(out, "weighting with largest minimum: {} (minimum {})", pr.vector(w), pr.num(floor));
        }
        _ => {
            let _ = writeln!(out, "weighting: none");
        }
    }
    let _ = writeln!(out, "full-support maximizer exists: {}", s.exists_full_support_maximizer);
    let _ = writeln!(out, "all maximizers have full support: {}", s.all_maximizers_full_support);
    out
}

/// Runs one command, writing its report to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let pr = Printer { digits: cli.precision };
    let as_json = cli.format == Format::Json;
    let text = match &cli.command {
        Command::Diversity { community, q } => {
            let (z, p) = load_community(community)?;
            let value = diversity(&z, &p, *q)?;
            if as_json {
                json(&serde_json::json!({ "q": q, "value": value }))
            } else {
                format!("{}\n", pr.num(value))
            }
        }
        Command::Profile { community, orders, output } => {
            let (z, p) = load_community(community)?;
            let orders = orders.clone().unwrap_or_else(Order::default_grid);
            let profile = diversity_profile(&z, &p, &orders)?;
            let body = if as_json { json(&profile) } else { emit_profile_csv(&profile) };
            if let Some(path) = output {
                std::fs::write(path, &body).map_err(|source| CliError::Write {
                    path: path.clone(),
                    source,
                })?;
                String::new()
            } else {
                body
            }
        }
        Command::Maximize { matrix, family, exhaustive } => {
            let z = load_matrix(matrix)?;
            let result = if *exhaustive { maximize_exhaustive(&z)? } else { maximize(&z)? };
            if as_json {
                json(&result)
            } else {
                render_maximization(&pr, &result, *family)
            }
        }
        Command::Diagnose { matrix } => {
            let z = load_matrix(matrix)?;
            let d = diagnose(&z)?;
            if as_json {
                json(&d)
            } else {
                render_diagnosis(&pr, &d)
            }
        }
        Command::Graph(GraphCommand::Alpha { graph }) => {
            let g = parsed(graph, parse_graph(&read(graph)?))?;
            let set = maximum_independent_set(&g);
            if as_json {
                json(&serde_json::json!({ "alpha": set.len(), "independent_set": set }))
            } else {
                format!("alpha: {}\nindependent set: {}\n", set.len(), one_based(&set))
            }
        }
        Command::Graph(GraphCommand::Capacity { graph }) => {
            let x = parsed(graph, parse_irreflexive_graph(&read(graph)?))?;
            let c = clique_capacity(&x);
            if as_json {
                json(&c)
            } else {
                format!(
                    "capacity: {}\nclique number: {}\nclique: {}\nwitness: {}\n",
                    pr.num(c.value),
                    c.clique_number,
                    one_based(&c.clique),
                    pr.vector(c.witness.probs())
                )
            }
        }
        Command::Graph(GraphCommand::Entropy { metric, epsilon }) => {
            let d = parsed(metric, parse_metric(&read(metric)?))?;
            let b = epsilon_entropy_bounds(&d, *epsilon)?;
            if as_json {
                json(&b)
            } else {
                format!(
                    "epsilon: {}\ncovering number N(d, eps): {}\nmaximum diversity of Z^eps: {}\ncovering number N(d, eps/2): {}\n",
                    pr.num(b.epsilon),
                    b.covering_number,
                    pr.num(b.dmax),
                    b.covering_number_half
                )
            }
        }
    };
    out.write_all(text.as_bytes()).map_err(|source| CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

/// Parses `args`, runs the command and returns the process exit status.
/// Errors go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(1.4556962025316456, 6), "1.45570");
        assert_eq!(format_significant(0.4782608695652174, 3), "0.478");
        assert_eq!(format_significant(2.0, 6), "2.00000");
        assert_eq!(format_significant(1234.5678, 3), "1235");
        assert_eq!(format_significant(0.0, 6), "0");
        assert_eq!(format_significant(f64::INFINITY, 6), "inf");
        assert_eq!(format_significant(1.5e-9, 2), "1.5e-9");
    }

    #[test]
    fn exit_codes() {
        let asym = CliError::Library(Error::NotSymmetric {
            row: 0,
            col: 1,
            upper: 0.5,
            lower: 0.0,
        });
        assert_eq!(asym.exit_code(), EXIT_PRECONDITION);
        assert_eq!(CliError::Library(Error::TooManySpecies { n: 31, cap: 30 }).exit_code(), EXIT_PRECONDITION);
        assert_eq!(CliError::Library(Error::Numerical("x".into())).exit_code(), EXIT_NUMERICAL);
        assert_eq!(CliError::Library(Error::InvalidOrder(-1.0)).exit_code(), EXIT_INPUT);
    }

    #[test]
    fn usage_errors_exit_with_input_status() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["maxdiv", "frobnicate"], &mut out, &mut err), EXIT_INPUT);
        assert_eq!(run(["maxdiv", "--help"], &mut out, &mut err), 0);
    }
}
