use tree_idioms::minilang::{generate_demo_corpus, parse_program, MiniGrammar};
use tree_idioms::{
    extract_idioms, read_trees, validate_tree, write_trees, Compressor, Grammar, IdiomSet, MinerConfig, ParseTree,
};

fn demo() -> (Grammar, Vec<ParseTree>) {
    let mut g = MiniGrammar::new();
    let trees = generate_demo_corpus(1, 500).iter().map(|p| parse_program(&p.text, &mut g).unwrap()).collect();
    (g.into_grammar(), trees)
}

fn mine(g: &Grammar, trees: &[ParseTree], n: usize) -> IdiomSet {
    extract_idioms(trees.to_vec(), g, MinerConfig { n, ..Default::default() }).unwrap().idioms
}

#[test]
fn tree_files_round_trip() {
    let (g, trees) = demo();
    let text = write_trees(&trees);
    assert_eq!(text.lines().count(), 500);
    assert_eq!(read_trees(&text, &g).unwrap(), trees);
}

#[test]
fn compressed_corpus_expands_back_exactly() {
    let (g, trees) = demo();
    let idioms = mine(&g, &trees, 200);
    assert_eq!(idioms.len(), 200);
    for k in [10, 50, 200] {
        let prefix = idioms.prefix(k);
        let c = Compressor::new(&g, &prefix).unwrap();
        let (small, report) = c.compress_corpus(&trees);
        let text = write_trees(&small);
        let reread = read_trees(&text, c.grammar()).unwrap();
        for (orig, s) in trees.iter().zip(&reread) {
            assert_eq!(validate_tree(s, c.grammar()), Ok(()));
            assert_eq!(&c.expand_tree(s).unwrap(), orig);
        }
        assert!(report.mean_ratio > 0.0);
    }
}

#[test]
fn every_template_frontier_is_its_flat_rule() {
    let (g, trees) = demo();
    let idioms = mine(&g, &trees, 200);
    for idiom in &idioms {
        let t = idioms.expand_idiom(idiom, &g).unwrap();
        assert_eq!(t.frontier(), idiom.rule.rhs, "rank {}", idiom.rank);
        assert!(t.internal_count() >= 2);
    }
}

#[test]
fn demo_compression_clears_half_at_k_200() {
    let (g, trees) = demo();
    let idioms = mine(&g, &trees, 600);
    assert_eq!(idioms.len(), 600);
    let c = Compressor::new(&g, &idioms).unwrap();
    let rows = c.k_sweep(&trees, &[0, 100, 200, 400, 600]).unwrap();
    assert_eq!(rows[0].mean_ratio, 0.0);
    assert!(rows[2].mean_ratio >= 0.5, "{}", rows[2].mean_ratio);
    assert!(rows.windows(2).all(|w| w[0].mean_ratio <= w[1].mean_ratio));
    assert!(rows[4].mean_ratio - rows[3].mean_ratio < rows[1].mean_ratio - rows[0].mean_ratio);
}

#[test]
fn catalog_includes_println_idiom() {
    let (g, trees) = demo();
    let idioms = mine(&g, &trees, 200);
    assert!(idioms.iter().any(|i| i.rule.to_string().contains("System . out . println")));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let (g, trees) = demo();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let idioms = mine(&g, &trees, 100);
            let c = Compressor::new(&g, &idioms).unwrap();
            let (small, report) = c.compress_corpus(&trees);
            (idioms.to_json(), write_trees(&small), report.to_json())
        })
    };
    assert_eq!(run(1), run(8));
}

#[test]
fn fixpoint_changes_nothing_on_the_mining_corpus() {
    let (g, trees) = demo();
    let idioms = mine(&g, &trees, 200);
    let once = Compressor::new(&g, &idioms).unwrap();
    let looped = Compressor::new(&g, &idioms).unwrap().with_fixpoint(true);
    assert_eq!(once.compress_corpus(&trees).0, looped.compress_corpus(&trees).0);
}
