//! Seeded generator of demo programs.
//!
//! Programs are stitched together from a fixed pool of statement templates
//! (object creation, try/catch, counting loops, `System.out.println`,
//! guard-and-throw, if/else, while, return, calls) whose slots are filled
//! from small vocabularies. The structure repeats heavily across programs
//! while identifiers and literals vary.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SourceProgram;

const VARS: &[&str] = &[
    "x", "y", "z", "n", "count", "total", "sum", "value", "result", "index", "size", "name", "items", "list", "data",
    "buffer", "flag", "limit", "left", "right", "node", "key",
];
const LOOP_VARS: &[&str] = &["i", "j", "k"];
const CLASSES: &[&str] = &["StringBuilder", "ArrayList", "HashMap", "Point", "File", "Scanner", "Reader", "Integer"];
const EXCEPTIONS: &[&str] =
    &["Exception", "IOException", "IllegalArgumentException", "IllegalStateException", "RuntimeException"];
const METHODS: &[&str] = &[
    "process", "compute", "update", "reset", "close", "open", "log", "add", "put", "get", "append", "parse",
    "validate", "init", "read", "write", "handle", "apply",
];
const INTS: &[&str] = &["0", "1", "2", "3", "5", "8", "10", "16", "42", "64", "100", "255", "1000"];
const STRINGS: &[&str] = &[
    "\"hi\"",
    "\"done\"",
    "\"error\"",
    "\"failed\"",
    "\"value: \"",
    "\"null argument\"",
    "\"index out of range\"",
    "\"starting\"",
    "\"finished\"",
    "\"invalid state\"",
    "\"not found\"",
    "\"ok\"",
    "\"retrying\"",
    "\"bad input\"",
];

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn pick(&mut self, pool: &[&'static str]) -> &'static str {
        pool.choose(&mut self.rng).expect("non-empty pool")
    }

    fn var(&mut self) -> &'static str {
        self.pick(VARS)
    }

    fn atom(&mut self) -> String {
        match self.rng.gen_range(0..3) {
            0 => self.var().to_string(),
            1 => self.pick(INTS).to_string(),
            _ => self.pick(STRINGS).to_string(),
        }
    }

    fn args(&mut self) -> String {
        let n = self.rng.gen_range(0..3);
        (0..n).map(|_| self.atom()).collect::<Vec<_>>().join(" , ")
    }

    fn println(&mut self) -> String {
        if self.rng.gen_bool(0.7) {
            format!("System . out . println ( {} ) ;", self.pick(STRINGS))
        } else {
            format!("System . out . println ( {} + {} ) ;", self.pick(STRINGS), self.var())
        }
    }

    fn call_stmt(&mut self) -> String {
        let m = self.pick(METHODS);
        let a = self.args();
        if a.is_empty() {
            format!("{m} ( ) ;")
        } else {
            format!("{m} ( {a} ) ;")
        }
    }

    fn throw_new(&mut self) -> String {
        format!("throw new {} ( {} ) ;", self.pick(EXCEPTIONS), self.pick(STRINGS))
    }

    fn simple_stmt(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 => self.println(),
            1 => self.call_stmt(),
            2 => format!("{} = {} ;", self.var(), self.atom()),
            _ => format!("{} ++ ;", self.var()),
        }
    }

    fn statement(&mut self) -> String {
        match self.rng.gen_range(0..11) {
            // object instantiation with arguments
            0 => {
                let c = self.pick(CLASSES);
                format!("{c} {} = new {c} ( {} ) ;", self.var(), self.args()).replace("(  )", "( )")
            }
            // try / catch
            1 => {
                let body = self.call_stmt();
                let e = self.pick(EXCEPTIONS);
                let handler = match self.rng.gen_range(0..3) {
                    0 => self.println(),
                    1 => self.throw_new(),
                    _ => self.call_stmt(),
                };
                format!("try {{ {body} }} catch ( {e} e ) {{ {handler} }}")
            }
            // integer for loop
            2 => {
                let i = self.pick(LOOP_VARS);
                let bound = if self.rng.gen_bool(0.5) { self.var() } else { self.pick(INTS) };
                let body = match self.rng.gen_range(0..3) {
                    0 => {
                        let v = self.var();
                        format!("{v} = {v} + {i} ;")
                    }
                    1 => self.println(),
                    _ => format!("{} ( {i} ) ;", self.pick(METHODS)),
                };
                format!("for ( int {i} = 0 ; {i} < {bound} ; {i} ++ ) {{ {body} }}")
            }
            3 => self.println(),
            // guard and throw
            4 => {
                let v = self.var();
                let t = self.throw_new();
                if self.rng.gen_bool(0.5) {
                    format!("if ( {v} == null ) {{ {t} }}")
                } else {
                    format!("if ( {v} == null ) {t}")
                }
            }
            5 => {
                let v = self.var();
                let w = self.var();
                let a = self.pick(INTS);
                let b = self.simple_stmt();
                format!("if ( {v} > {} ) {{ {w} = {a} ; }} else {{ {b} }}", self.pick(INTS))
            }
            6 => {
                let v = self.var();
                format!("while ( {v} < {} ) {{ {v} ++ ; }}", self.pick(INTS))
            }
            7 => {
                if self.rng.gen_bool(0.5) {
                    format!("return {} ;", self.var())
                } else {
                    format!("return {} + {} ;", self.var(), self.pick(INTS))
                }
            }
            8 => format!("{} = {} ( {} ) ;", self.var(), self.pick(METHODS), self.var()),
            9 => format!("int {} = {} ;", self.var(), self.pick(INTS)),
            _ => self.simple_stmt(),
        }
    }
}

/// `count` programs, deterministic for a given `seed`.
pub fn generate_demo_corpus(seed: u64, count: usize) -> Vec<SourceProgram> {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed) };
    (0..count)
        .map(|i| {
            let n = g.rng.gen_range(1..=3);
            let stmts: Vec<String> = (0..n).map(|_| g.statement()).collect();
            SourceProgram::new(stmts.join("\n"), format!("demo seed {seed} #{i}"))
        })
        .collect()
}
