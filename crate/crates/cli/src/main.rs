//! `composer`: build composition models at publish time, answer queries
//! against them, and inspect the shortest-path machinery.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use compose_core::planner::{EntryMode, PathSelection};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "composer", version, about = "Service composition planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Adjacency,
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectionArg {
    Canonical,
    Compact,
}

impl From<SelectionArg> for PathSelection {
    fn from(s: SelectionArg) -> Self {
        match s {
            SelectionArg::Canonical => PathSelection::Canonical,
            SelectionArg::Compact => PathSelection::Compact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntryModeArg {
    Any,
    All,
}

impl From<EntryModeArg> for EntryMode {
    fn from(m: EntryModeArg) -> Self {
        match m {
            EntryModeArg::Any => EntryMode::Any,
            EntryModeArg::All => EntryMode::All,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the composition graph and shortest-path tables into a model file.
    Build {
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        hierarchy: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Answer a composition query from a model file.
    Query {
        #[arg(long)]
        model: PathBuf,
        /// Concepts the requester provides (comma separated or repeated).
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<String>,
        /// Concepts the requester wants (comma separated or repeated).
        #[arg(long, value_delimiter = ',', required = true)]
        outputs: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        #[arg(long, value_enum, default_value_t = SelectionArg::Canonical)]
        selection: SelectionArg,
        /// Overrides the entry mode stored in the model's config.
        #[arg(long, value_enum)]
        entry_mode: Option<EntryModeArg>,
        /// Current registry; the query fails if the model was built from another revision.
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Rebuild the tables from the embedded registry and compare before answering.
        #[arg(long)]
        verify: bool,
    },
    /// Run all-pairs shortest paths on a raw adjacency matrix file.
    Apsp {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Check a registry (and optional config) against a hierarchy.
    Validate {
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        hierarchy: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Time Floyd–Warshall against repeated Dijkstra on seeded random graphs.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![64, 128, 256])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Export the composition graph stored in a model file.
    Graph {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphFormat::Adjacency)]
        format: GraphFormat,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Build {
            registry,
            hierarchy,
            config,
            output,
        } => commands::build(&registry, &hierarchy, config.as_deref(), &output),
        Command::Query {
            model,
            inputs,
            outputs,
            format,
            selection,
            entry_mode,
            registry,
            verify,
        } => commands::query(commands::QueryArgs {
            model: &model,
            inputs,
            outputs,
            format,
            selection: selection.into(),
            entry_mode: entry_mode.map(Into::into),
            registry: registry.as_deref(),
            verify,
        }),
        Command::Apsp { matrix, format } => commands::apsp(&matrix, format),
        Command::Validate {
            registry,
            hierarchy,
            config,
        } => commands::validate(&registry, &hierarchy, config.as_deref()),
        Command::Bench {
            sizes,
            seed,
            density,
            repeats,
            format,
        } => commands::bench(&sizes, seed, density, repeats, format),
        Command::Graph { model, format } => commands::graph(&model, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { error::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Findings(n)) => {
            // the report already went to stdout
            eprintln!("error: {n} finding(s)");
            ExitCode::from(error::EXIT_VALIDATION as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
