use tree_idioms::oracle::{
    brute_force_counts, if_else_scenario, random_corpus, random_sequences, reference_extract, reference_pair_bpe,
    ChainCorpus,
};
use tree_idioms::{count_patterns, extract_idioms, Compressor, Depth2Pattern, Miner, MinerConfig, TieBreak};

fn config_for(seed: u64) -> MinerConfig {
    MinerConfig {
        n: 10,
        min_count: 1 + seed % 3,
        tie_break: if seed % 4 == 3 { TieBreak::LexMax } else { TieBreak::LexMin },
        identifier_idioms: seed % 5 != 4,
    }
}

#[test]
fn optimized_counts_match_brute_force_every_round() {
    for seed in 0..100 {
        let (g, corpus) = random_corpus(seed);
        let mut miner = Miner::new(corpus, &g, config_for(seed));
        loop {
            assert_eq!(count_patterns(miner.corpus()), brute_force_counts(miner.corpus()), "seed {seed}");
            if miner.step().unwrap().is_none() {
                break;
            }
        }
    }
}

#[test]
fn optimized_extraction_matches_reference_byte_for_byte() {
    let mut nonempty = 0;
    for seed in 0..100 {
        let (g, corpus) = random_corpus(seed);
        let config = config_for(seed);
        let fast = extract_idioms(corpus.clone(), &g, config.clone()).unwrap().idioms;
        let slow = reference_extract(&corpus, &g, &config);
        assert_eq!(fast.to_json(), slow.to_json(), "seed {seed}");
        nonempty += usize::from(!fast.is_empty());
    }
    assert!(nonempty > 50, "only {nonempty} corpora produced idioms");
}

#[test]
fn chain_trees_reproduce_pair_bpe() {
    for seed in 0..100 {
        let chain = ChainCorpus::encode(&random_sequences(seed));
        let tie = if seed % 2 == 0 { TieBreak::LexMin } else { TieBreak::LexMax };
        let config = MinerConfig { n: 20, min_count: 2, tie_break: tie, identifier_idioms: true };
        let ex = extract_idioms(chain.trees.clone(), &chain.grammar, config).unwrap();
        let merges = reference_pair_bpe(&chain.ids, chain.vocab_size(), 20, 2, tie);
        assert_eq!(ex.idioms.len(), merges.len(), "seed {seed}");

        // Spelling of every token, base and merged.
        let mut spelled: Vec<Vec<String>> = chain.vocab.iter().map(|t| vec![t.clone()]).collect();
        for (idiom, &(a, b)) in ex.idioms.iter().zip(&merges) {
            assert_eq!((idiom.provenance.parent.0, idiom.provenance.child.0), (a, b), "seed {seed}");
            let mut s = spelled[a as usize].clone();
            s.extend(spelled[b as usize].iter().cloned());
            let template = ex.idioms.expand_idiom(idiom, &chain.grammar).unwrap();
            assert_eq!(template.yield_terminals(), s, "seed {seed} rank {}", idiom.rank);
            spelled.push(s);
        }
    }
}

#[test]
fn distinct_pairs_give_no_merges() {
    let seqs: Vec<Vec<String>> = vec!["a b c d".split(' ').map(String::from).collect()];
    let chain = ChainCorpus::encode(&seqs);
    let ex = extract_idioms(chain.trees.clone(), &chain.grammar, MinerConfig::default()).unwrap();
    assert!(ex.idioms.is_empty());
    assert!(reference_pair_bpe(&chain.ids, chain.vocab_size(), 10, 2, TieBreak::LexMin).is_empty());
}

#[test]
fn if_else_scenario_yields_depth_three_idiom() {
    let (g, corpus, nested) = if_else_scenario();
    let ex = extract_idioms(corpus, &g, MinerConfig { n: 2, ..Default::default() }).unwrap();
    let first = ex.idioms.get(1).unwrap();
    let second = ex.idioms.get(2).unwrap();
    assert_eq!(first.rule.to_string(), "Statement -> if ( Expr ) Statement IfOrElse");
    assert_eq!(first.support, 4);
    assert_eq!(second.rule.to_string(), "Statement -> if ( Expr ) Statement else Statement");
    assert_eq!(second.provenance, Depth2Pattern::new(first.rule.id.0, 5, second.provenance.child.0));
    assert_eq!(second.support, 3);
    let template = ex.idioms.expand_idiom(second, &g).unwrap();
    assert_eq!(template.internal_count(), 3);

    assert_eq!(nested.internal_count(), 5);
    let c = Compressor::new(&g, &ex.idioms).unwrap();
    let small = c.compress_tree(&nested);
    assert_eq!(small.rule_sequence().0, vec![second.rule.id, first.rule.id]);
    assert_eq!(c.expand_tree(&small).unwrap(), nested);
}
