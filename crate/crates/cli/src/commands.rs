use std::fmt::Write as _;
use std::path::Path;

use tree_idioms::minilang::{generate_demo_corpus, join_corpus, parse_program, split_corpus};
use tree_idioms::oracle::{
    brute_force_counts, random_corpus, random_sequences, reference_extract, reference_pair_bpe, ChainCorpus,
};
use tree_idioms::{
    count_patterns, render_sweep, write_trees, CompressError, Compressor, Miner, MinerConfig, ParseTree, TieBreak,
};

use crate::fail::{emit, read, write, CmdResult, Failure, DOMAIN};
use crate::inputs::{load_grammar, load_idioms, load_mini, load_trees};
use crate::{Command, MinerArgs};

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::DemoCorpus { seed, count, output } => {
            emit(output.as_deref(), &join_corpus(&generate_demo_corpus(seed, count)))
        }
        Command::Parse { sources, grammar, grammar_out, strict, output } => {
            parse(&sources, &grammar.spec, grammar_out.as_deref(), strict, output.as_deref())
        }
        Command::Extract { trees, grammar, miner, rewritten, output } => {
            extract(&trees, &grammar.spec, &miner, rewritten.as_deref(), output.as_deref())
        }
        Command::Compress { trees, grammar, idioms, k, sweep, fixpoint, report, output } => {
            let g = load_grammar(&grammar.spec)?;
            let set = load_idioms(&idioms, &g)?;
            let corpus = load_trees(&trees, &g)?;
            if let Some(ks) = sweep {
                let c = Compressor::new(&g, &set).map_err(compress_failure)?.with_fixpoint(fixpoint);
                let rows = c.k_sweep(&corpus, &ks).map_err(compress_failure)?;
                return emit(output.as_deref(), &render_sweep(&rows));
            }
            let k = k.unwrap_or(set.len());
            if k > set.len() {
                return Err(compress_failure(CompressError::KOutOfRange { k, available: set.len() }));
            }
            let prefix = set.prefix(k);
            let c = Compressor::new(&g, &prefix).map_err(compress_failure)?.with_fixpoint(fixpoint);
            let (small, rep) = c.compress_corpus(&corpus);
            if let Some(path) = report {
                write(&path, &rep.to_json())?;
            }
            emit(output.as_deref(), &write_trees(&small))?;
            eprint!("{}", rep.render_table());
            Ok(())
        }
        Command::Expand { trees, grammar, idioms, verify, output } => {
            expand(&trees, &grammar.spec, &idioms, verify.as_deref(), output.as_deref())
        }
        Command::Catalog { grammar, idioms, top, output } => {
            let g = load_grammar(&grammar.spec)?;
            let set = load_idioms(&idioms, &g)?;
            let mut out = String::new();
            for idiom in set.iter().take(top.unwrap_or(usize::MAX)) {
                let template = set.expand_idiom(idiom, &g).map_err(Failure::domain)?;
                writeln!(out, "#{} (support {}) {}", idiom.rank, idiom.support, idiom.rule).unwrap();
                writeln!(out, "    {}", render_template(&template)).unwrap();
            }
            emit(output.as_deref(), &out)
        }
        Command::Oracle { seeds, output } => oracle(seeds, output.as_deref()),
    }
}

fn compress_failure(e: CompressError) -> Failure {
    match e {
        CompressError::FingerprintMismatch { .. }
        | CompressError::KOutOfRange { .. }
        | CompressError::UnsortedSweep => Failure::usage(e),
        _ => Failure::domain(e),
    }
}

fn parse(
    sources: &[std::path::PathBuf],
    spec: &str,
    grammar_out: Option<&Path>,
    strict: bool,
    output: Option<&Path>,
) -> CmdResult {
    let mut mini = load_mini(spec)?;
    let before = mini.grammar().fingerprint().to_string();
    let mut trees = Vec::new();
    let mut failed = 0;
    let mut total = 0;
    for path in sources {
        let text = read(path)?;
        for program in split_corpus(&text, &path.display().to_string()) {
            total += 1;
            match parse_program(&program.text, &mut mini) {
                Ok(t) => trees.push(t),
                Err(e) => {
                    failed += 1;
                    let pos = e.position();
                    eprintln!("{}:{}:{}: {}", program.origin, program.first_line + pos.line - 1, pos.col, e.message());
                }
            }
        }
    }
    let grew = mini.grammar().fingerprint() != before;
    match grammar_out {
        Some(p) => write(p, &mini.grammar().to_json())?,
        None if grew => {
            return Err(Failure::msg(
                DOMAIN,
                format!("the sources use identifiers or literals not in {spec}; pass --grammar-out to save the extended grammar"),
            ))
        }
        None => {}
    }
    if failed > 0 && strict {
        return Err(Failure::msg(DOMAIN, format!("{failed} of {total} programs failed to parse; nothing written")));
    }
    emit(output, &write_trees(&trees))?;
    if failed > 0 {
        return Err(Failure::msg(DOMAIN, format!("{failed} of {total} programs failed to parse")));
    }
    Ok(())
}

fn extract(trees: &Path, spec: &str, args: &MinerArgs, rewritten: Option<&Path>, output: Option<&Path>) -> CmdResult {
    let g = load_grammar(spec)?;
    let corpus = load_trees(trees, &g)?;
    let before: usize = corpus.iter().map(ParseTree::internal_count).sum();
    let config = MinerConfig {
        n: args.n,
        min_count: args.min_count,
        tie_break: TieBreak::parse(&args.tie_break).expect("clap restricts the values"),
        identifier_idioms: !args.no_identifier_idioms,
    };
    let ex = tree_idioms::extract_idioms(corpus, &g, config).map_err(Failure::domain)?;
    let after: usize = ex.corpus.iter().map(ParseTree::internal_count).sum();
    if let Some(p) = rewritten {
        write(p, &write_trees(&ex.corpus))?;
    }
    emit(output, &ex.idioms.to_json())?;
    eprintln!("{} idioms; corpus rules {before} -> {after}; halted: {}", ex.idioms.len(), ex.halt);
    Ok(())
}

fn expand(trees: &Path, spec: &str, idioms: &Path, verify: Option<&Path>, output: Option<&Path>) -> CmdResult {
    let g = load_grammar(spec)?;
    let set = load_idioms(idioms, &g)?;
    let c = Compressor::new(&g, &set).map_err(compress_failure)?;
    let small = load_trees(trees, c.grammar())?;
    let expanded: Vec<ParseTree> = {
        use rayon::prelude::*;
        small.par_iter().map(|t| c.expand_tree(t)).collect::<Result<_, _>>().map_err(Failure::domain)?
    };
    if let Some(original) = verify {
        let orig = load_trees(original, &g)?;
        let mut mismatches = Vec::new();
        for (i, (a, b)) in expanded.iter().zip(&orig).enumerate() {
            if a != b {
                mismatches.push(format!("tree {}: expansion differs from {}", i + 1, original.display()));
            }
        }
        if expanded.len() != orig.len() {
            mismatches.push(format!("{} trees expanded but {} in {}", expanded.len(), orig.len(), original.display()));
        }
        for m in &mismatches {
            eprintln!("{m}");
        }
        eprintln!("verified {} trees: {} mismatches", expanded.len(), mismatches.len());
        if !mismatches.is_empty() {
            return Err(Failure::msg(DOMAIN, format!("{} mismatches", mismatches.len())));
        }
    }
    if output.is_some() || verify.is_none() {
        emit(output, &write_trees(&expanded))?;
    }
    Ok(())
}

/// Tree notation with nonterminal slots shown as `<Name>`.
fn render_template(t: &ParseTree) -> String {
    fn go(t: &ParseTree, out: &mut String) {
        match t.rule {
            Some(id) => {
                write!(out, "({}@{}", t.symbol.name(), id.0).unwrap();
                for c in &t.children {
                    out.push(' ');
                    go(c, out);
                }
                out.push(')');
            }
            None if t.symbol.is_nonterminal() => write!(out, "<{}>", t.symbol.name()).unwrap(),
            None => out.push_str(t.symbol.name()),
        }
    }
    let mut out = String::new();
    go(t, &mut out);
    out
}

/// Runs the optimized miner and the naive references side by side, one line
/// per seed.
fn oracle(seeds: u64, output: Option<&Path>) -> CmdResult {
    let mut out = String::new();
    let mut bad = 0;
    for seed in 0..seeds {
        let (g, corpus) = random_corpus(seed);
        let config = MinerConfig { n: 10, ..Default::default() };
        let mut miner = Miner::new(corpus.clone(), &g, config.clone());
        let mut rounds = 0;
        let mut counts_ok = true;
        loop {
            counts_ok &= count_patterns(miner.corpus()) == brute_force_counts(miner.corpus());
            rounds += 1;
            if miner.step().map_err(Failure::domain)?.is_none() {
                break;
            }
        }
        let fast = miner.finish().idioms;
        let extract_ok = fast.to_json() == reference_extract(&corpus, &g, &config).to_json();

        let chain = ChainCorpus::encode(&random_sequences(seed));
        let bpe = MinerConfig { n: 20, ..Default::default() };
        let ex = tree_idioms::extract_idioms(chain.trees.clone(), &chain.grammar, bpe).map_err(Failure::domain)?;
        let merges = reference_pair_bpe(&chain.ids, chain.vocab_size(), 20, 2, TieBreak::LexMin);
        let mined: Vec<(u32, u32)> = ex.idioms.iter().map(|i| (i.provenance.parent.0, i.provenance.child.0)).collect();
        let bpe_ok = mined == merges;

        let verdict = |ok: bool| if ok { "ok" } else { "MISMATCH" };
        writeln!(
            out,
            "seed {seed}: counts {} over {rounds} rounds, extraction {} ({} idioms), bpe {} ({} merges)",
            verdict(counts_ok),
            verdict(extract_ok),
            fast.len(),
            verdict(bpe_ok),
            merges.len()
        )
        .unwrap();
        bad += usize::from(!(counts_ok && extract_ok && bpe_ok));
    }
    emit(output, &out)?;
    if bad > 0 {
        return Err(Failure::msg(DOMAIN, format!("{bad} seeds disagree with the reference")));
    }
    Ok(())
}
