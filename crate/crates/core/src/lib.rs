//! Mining code idioms from parse trees.
//!
//! The miner repeatedly finds the most frequent parent/child pair of rule
//! applications in a corpus of parse trees, fuses it into a new production
//! (an *idiom*), and rewrites every occurrence. The ranked idioms can then
//! be used to compress unseen trees, and compressed trees expand back to the
//! original exactly.
//!
//! ```
//! use tree_idioms::minilang::{parse_program, MiniGrammar};
//! use tree_idioms::{extract_idioms, Compressor, MinerConfig};
//!
//! let mut mini = MiniGrammar::new();
//! let corpus: Vec<_> = ["x = 1 ;", "y = 2 ;", "z = 3 ;"]
//!     .iter()
//!     .map(|src| parse_program(src, &mut mini).unwrap())
//!     .collect();
//! let config = MinerConfig { n: 10, ..Default::default() };
//! let extraction = extract_idioms(corpus.clone(), mini.grammar(), config).unwrap();
//! let compressor = Compressor::new(mini.grammar(), &extraction.idioms).unwrap();
//! let small = compressor.compress_tree(&corpus[0]);
//! assert!(small.internal_count() < corpus[0].internal_count());
//! assert_eq!(compressor.expand_tree(&small).unwrap(), corpus[0]);
//! ```

pub mod compress;
pub mod error;
pub mod grammar;
pub mod idioms;
pub mod miner;
pub mod minilang;
pub mod oracle;
pub mod tree;
pub mod treefile;

pub use compress::{render_sweep, CompressionReport, Compressor, SweepRow, TreeStats};
pub use error::{CompressError, GrammarError, IdiomFileError, MineError, ReplayError, TreeSyntaxError};
pub use grammar::{Grammar, GrammarFile, ProductionRule, RuleId, RuleOrigin, Symbol, SymbolKind, FORMAT_VERSION};
pub use idioms::{Idiom, IdiomFile, IdiomSet};
pub use miner::{
    count_patterns, extract_idioms, most_frequent, Depth2Pattern, Extraction, HaltReason, Miner, MinerConfig,
    PatternCounts, TieBreak,
};
pub use tree::{
    replay, replay_from, rule_sequence, validate_template, validate_tree, ParseTree, RuleSequence, Violation,
};
pub use treefile::{deserialize_tree, read_trees, serialize_tree, write_trees, LineError};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/mining.md")]
    mod mining {}
    #[doc = include_str!("../../../book/src/compression.md")]
    mod compression {}
    #[doc = include_str!("../../../book/src/bpe.md")]
    mod bpe {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
