//! The bundled example programs and their expectation files.
//!
//! Each `name.xdt` has a sidecar `name.expect` listing the kind or type of
//! every declaration, the oracle's observation of the main term and an
//! upper bound on the number of reduction steps. Setting `XDT_BLESS=1`
//! rewrites the sidecars from the current results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::oracle::{denote, is_observable, observe, OracleError};
use crate::program::{load, LoadError, Program};
use crate::reduce::{evaluate, EvalError, DEFAULT_FUEL};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Load { path: String, source: Box<LoadError> },
    #[error("{path}: {source}")]
    Eval { path: String, source: EvalError },
    #[error("{path}: {source}")]
    Oracle { path: String, source: OracleError },
    #[error("{path}: expectation mismatch\n--- expected\n{expected}--- actual\n{actual}")]
    Mismatch {
        path: String,
        expected: String,
        actual: String,
    },
}

pub struct CorpusEntry {
    pub path: PathBuf,
    pub program: Program,
}

impl CorpusEntry {
    pub fn name(&self) -> &str {
        self.path.file_stem().and_then(|s| s.to_str()).unwrap_or("?")
    }
}

/// The directory holding the bundled programs.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// Loads and checks every `.xdt` file in `dir`, sorted by name.
pub fn load_dir(dir: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let io = |e| CorpusError::Io {
        path: dir.display().to_string(),
        source: e,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "xdt"))
        .collect();
    paths.sort();
    paths.into_iter().map(|p| load_file(&p)).collect()
}

pub fn load_file(path: &Path) -> Result<CorpusEntry, CorpusError> {
    let shown = path.display().to_string();
    let src = std::fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: shown.clone(),
        source: e,
    })?;
    let program = load(&src).map_err(|e| CorpusError::Load {
        path: shown,
        source: Box::new(e),
    })?;
    Ok(CorpusEntry {
        path: path.to_path_buf(),
        program,
    })
}

pub fn load_corpus() -> Result<Vec<CorpusEntry>, CorpusError> {
    load_dir(&corpus_dir())
}

/// What the sidecar records about a program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub decls: Vec<String>,
    pub observation: Option<String>,
    pub steps: Option<usize>,
}

impl Expectation {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for d in &self.decls {
            let _ = writeln!(out, "{d}");
        }
        if let Some(o) = &self.observation {
            let _ = writeln!(out, "observation {o}");
        }
        if let Some(s) = self.steps {
            let _ = writeln!(out, "steps <= {s}");
        }
        out
    }

    pub fn parse(text: &str) -> Expectation {
        let mut e = Expectation {
            decls: Vec::new(),
            observation: None,
            steps: None,
        };
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            if let Some(o) = line.strip_prefix("observation ") {
                e.observation = Some(o.to_string());
            } else if let Some(s) = line.strip_prefix("steps <= ") {
                e.steps = s.trim().parse().ok();
            } else {
                e.decls.push(line.to_string());
            }
        }
        e
    }

    /// `actual` meets this expectation: equal declarations and
    /// observation, and no more steps than the bound.
    pub fn admits(&self, actual: &Expectation) -> bool {
        self.decls == actual.decls
            && self.observation == actual.observation
            && match (self.steps, actual.steps) {
                (Some(bound), Some(n)) => n <= bound,
                (None, None) => true,
                _ => false,
            }
    }
}

/// Computes the expectation of an entry: declarations as the checker
/// reports them, the oracle's observation of main and the number of
/// small-step reductions.
pub fn compute(entry: &CorpusEntry) -> Result<Expectation, CorpusError> {
    let path = entry.path.display().to_string();
    let p = &entry.program;
    let decls = p.describe();
    let (mut observation, mut steps) = (None, None);
    if let Some((_, s)) = &p.main {
        let m = p.to_term();
        let ev = evaluate(&m, DEFAULT_FUEL, false).map_err(|e| CorpusError::Eval {
            path: path.clone(),
            source: e,
        })?;
        steps = Some(ev.steps);
        if s.is_mono() && is_observable(&s.body) {
            let v = denote(&m).map_err(|e| CorpusError::Oracle {
                path: path.clone(),
                source: e,
            })?;
            let o = observe(&v, &s.body).map_err(|e| CorpusError::Oracle {
                path: path.clone(),
                source: e,
            })?;
            observation = Some(o.to_string());
        }
    }
    Ok(Expectation {
        decls,
        observation,
        steps,
    })
}

pub fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("expect")
}

/// Compares an entry against its sidecar, or rewrites the sidecar when
/// `XDT_BLESS=1`.
pub fn verify(entry: &CorpusEntry) -> Result<Expectation, CorpusError> {
    let actual = compute(entry)?;
    let side = sidecar(&entry.path);
    let shown = side.display().to_string();
    if std::env::var("XDT_BLESS").is_ok_and(|v| v == "1") {
        std::fs::write(&side, actual.render()).map_err(|e| CorpusError::Io { path: shown, source: e })?;
        return Ok(actual);
    }
    let text = std::fs::read_to_string(&side).map_err(|e| CorpusError::Io {
        path: shown.clone(),
        source: e,
    })?;
    let expected = Expectation::parse(&text);
    if !expected.admits(&actual) {
        return Err(CorpusError::Mismatch {
            path: shown,
            expected: expected.render(),
            actual: actual.render(),
        });
    }
    Ok(actual)
}
