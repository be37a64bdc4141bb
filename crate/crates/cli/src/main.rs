mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pomlab_core::Error;

#[derive(Parser)]
#[command(name = "pom-lab", version, about = "Pareto-optimal matchings of preference matrices")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of greedy states explored by enumerations.
    #[arg(long, global = true, default_value_t = pomlab_core::reach::DEFAULT_STATE_BUDGET)]
    budget: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Greedy matching for one row order.
    Greedy {
        matrix: PathBuf,
        /// 1-based rows, e.g. "1 3 2", or "identity".
        #[arg(long, default_value = "identity")]
        perm: String,
    },
    /// Unavoidable and reachable elements, family size and bounds.
    Analyze {
        matrix: PathBuf,
        #[arg(long)]
        verify: bool,
    },
    /// One decision query with its witness.
    Check {
        matrix: PathBuf,
        #[command(flatten)]
        query: Query,
    },
    /// Counts of reachable and exactly reachable sets.
    Count {
        matrix: PathBuf,
        /// Count exactly reachable sets containing these elements.
        #[arg(long)]
        supersets: Option<String>,
        #[arg(long)]
        verify: bool,
    },
    /// Generate a construction as matrix text.
    Construct {
        kind: Kind,
        #[arg(long)]
        k: Option<usize>,
        /// Rows, for the half-constant matrix.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        cnf: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Input matrix for flatten and transform.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TransformMode::Front)]
        mode: TransformMode,
        /// Unavoidable elements for the front transform (default: all).
        #[arg(long)]
        elements: Option<String>,
        #[arg(long)]
        verify: bool,
    },
    /// Multi-matchings through row expansion.
    Multi {
        matrix: PathBuf,
        /// File with one positive degree per row.
        #[arg(long)]
        degrees: PathBuf,
        /// Multiset order of 1-based rows, e.g. "1 1 2".
        #[arg(long)]
        perm: Option<String>,
        #[arg(long)]
        avoidable: Option<String>,
    },
}

#[derive(clap::Args)]
#[group(required = true, multiple = false)]
struct Query {
    /// Is some POM image a superset of this set?
    #[arg(long)]
    reachable: Option<String>,
    /// Is this set exactly a POM image?
    #[arg(long)]
    exact: Option<String>,
    /// Does some POM avoid every element of this set?
    #[arg(long)]
    avoidable: Option<String>,
    /// Is this matching (1-based columns per row, "-" for unassigned) a POM?
    #[arg(long)]
    pom: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Mk,
    Nk,
    Half,
    Sat,
    Indep,
    Flatten,
    Transform,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformMode {
    Front,
    UniqueLast,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Budget(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// A failure, possibly with the partial report produced before it.
pub struct Failed {
    pub report: Option<Box<report::Report>>,
    pub failure: Failure,
}

impl<E: Into<Failure>> From<E> for Failed {
    fn from(e: E) -> Self {
        Failed {
            report: None,
            failure: e.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = pomlab_core::Budget::new(cli.budget);
    let outcome = match cli.command {
        Command::Greedy { matrix, perm } => commands::greedy(&matrix, &perm),
        Command::Analyze { matrix, verify } => commands::analyze(&matrix, verify, budget),
        Command::Check { matrix, query } => {
            let q = if let Some(s) = query.reachable {
                commands::CheckQuery::Reachable(s)
            } else if let Some(s) = query.exact {
                commands::CheckQuery::Exact(s)
            } else if let Some(s) = query.avoidable {
                commands::CheckQuery::Avoidable(s)
            } else {
                commands::CheckQuery::Pom(query.pom.unwrap_or_default())
            };
            commands::check(&matrix, q, budget)
        }
        Command::Count {
            matrix,
            supersets,
            verify,
        } => commands::count(&matrix, supersets.as_deref(), verify, budget),
        Command::Construct {
            kind,
            k,
            m,
            cnf,
            graph,
            matrix,
            mode,
            elements,
            verify,
        } => {
            let spec = match kind {
                Kind::Mk => commands::Construction::Mk(k),
                Kind::Nk => commands::Construction::Nk(k),
                Kind::Half => commands::Construction::Half(m),
                Kind::Sat => commands::Construction::Sat(cnf),
                Kind::Indep => commands::Construction::Indep(graph),
                Kind::Flatten => commands::Construction::Flatten(matrix),
                Kind::Transform => commands::Construction::Transform {
                    matrix,
                    unique_last: matches!(mode, TransformMode::UniqueLast),
                    elements,
                },
            };
            commands::construct(spec, verify, budget)
        }
        Command::Multi {
            matrix,
            degrees,
            perm,
            avoidable,
        } => commands::multi(&matrix, &degrees, perm.as_deref(), avoidable.as_deref()),
    };
    match outcome {
        Ok(report) => {
            report.print(cli.json);
            ExitCode::SUCCESS
        }
        Err(Failed { report, failure }) => {
            if let Some(report) = report {
                report.print(cli.json);
            }
            let (code, msg) = match failure {
                Failure::Input(m) => (2, m),
                Failure::Budget(m) => (3, m),
                Failure::Verification(m) => (4, m),
            };
            eprintln!("pom-lab: {msg}");
            ExitCode::from(code)
        }
    }
}
