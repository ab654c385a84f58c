//! `tree-idioms`: mine idioms from parse trees and compress with them.
//!
//! Exit status is 0 on success, 1 when input data is bad (parse errors,
//! malformed trees, failed verification) and 2 for configuration errors
//! (bad flags, mismatched grammar and idiom files, unsupported versions).

mod commands;
mod fail;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "tree-idioms", version, about = "Mine code idioms from parse trees and compress trees with them")]
pub struct Cli {
    /// Threads for per-tree work. Output does not depend on this.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    workers: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the seeded demo corpus (programs separated by `%%` lines).
    DemoCorpus {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Parse mini-language sources into a tree file.
    Parse {
        /// Source files; each may hold several programs separated by `%%` lines.
        #[arg(required = true)]
        sources: Vec<PathBuf>,
        #[command(flatten)]
        grammar: GrammarArg,
        /// Where to save the grammar if parsing registered new identifiers or literals.
        #[arg(long)]
        grammar_out: Option<PathBuf>,
        /// Write nothing if any program fails to parse.
        #[arg(long)]
        strict: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Mine idioms from a tree file.
    Extract {
        trees: PathBuf,
        #[command(flatten)]
        grammar: GrammarArg,
        #[command(flatten)]
        miner: MinerArgs,
        /// Also write the corpus as rewritten by every extracted idiom.
        #[arg(long)]
        rewritten: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compress a tree file with an idiom file.
    Compress {
        trees: PathBuf,
        #[command(flatten)]
        grammar: GrammarArg,
        #[arg(long)]
        idioms: PathBuf,
        /// Use only the top K idioms.
        #[arg(long)]
        k: Option<usize>,
        /// Print a compression table for each listed K instead of writing trees.
        #[arg(long, value_delimiter = ',', conflicts_with = "k")]
        sweep: Option<Vec<usize>>,
        /// Re-run the idiom list until nothing changes.
        #[arg(long)]
        fixpoint: bool,
        /// JSON report with per-tree statistics.
        #[arg(long, conflicts_with = "sweep")]
        report: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Expand compressed trees back to base-grammar trees.
    Expand {
        trees: PathBuf,
        #[command(flatten)]
        grammar: GrammarArg,
        #[arg(long)]
        idioms: PathBuf,
        /// Tree file the expansion must reproduce exactly.
        #[arg(long)]
        verify: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List idioms with their flat rules and base-grammar templates.
    Catalog {
        #[command(flatten)]
        grammar: GrammarArg,
        #[arg(long)]
        idioms: PathBuf,
        #[arg(long)]
        top: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-check the miner against the naive reference implementations.
    #[command(hide = true)]
    Oracle {
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct GrammarArg {
    /// `builtin:mini` or a grammar JSON file.
    #[arg(long = "grammar", value_name = "GRAMMAR")]
    pub spec: String,
}

#[derive(Args, Debug)]
pub struct MinerArgs {
    /// Idiom budget.
    #[arg(short, long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_count: u64,
    #[arg(long, default_value = "lex-min", value_parser = ["lex-min", "lex-max"])]
    pub tie_break: String,
    /// Skip patterns whose child is an identifier or literal rule.
    #[arg(long)]
    pub no_identifier_idioms: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers as usize).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(fail::USAGE);
        }
    };
    match pool.install(|| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
