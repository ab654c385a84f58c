use std::fmt;
use std::path::Path;

/// A failed run and the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

/// Exit status for bad input data: parse errors, malformed trees, failed
/// verification.
pub const DOMAIN: u8 = 1;
/// Exit status for configuration problems: mismatched grammar and idiom
/// files, unsupported format versions, out-of-range `--k`.
pub const USAGE: u8 = 2;

impl Failure {
    pub fn domain(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: DOMAIN, error: error.into() }
    }

    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: USAGE, error: error.into() }
    }

    pub fn msg(code: u8, message: impl fmt::Display + Send + Sync + 'static) -> Self {
        Failure { code, error: anyhow::anyhow!("{message}") }
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub fn read(path: &Path) -> CmdResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::msg(DOMAIN, format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &str) -> CmdResult {
    std::fs::write(path, contents).map_err(|e| Failure::msg(DOMAIN, format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, contents: &str) -> CmdResult {
    match path {
        Some(p) => write(p, contents),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::msg(DOMAIN, format!("stdout: {e}")))
        }
    }
}
