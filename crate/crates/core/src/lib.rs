//! Interpreter for a small concept-oriented language: concepts pair a
//! reference class (identity, copied by value) with an object class (state on
//! the heap), and every access passes through user-defined continuations.

pub mod error;
pub mod eval;
pub mod refops;
pub mod runtime;
pub mod semantics;
pub mod syntax;

pub use error::{Diagnostic, RuntimeError, RuntimeErrorKind, Severity};
pub use eval::{Config, Interpreter, Stats};
pub use semantics::{analyze, Analyzed, ConceptId, ConceptTable};

/// Tokenizes, parses and analyzes `source`.
pub fn compile(source: &str) -> Result<Analyzed, Diagnostic> {
    let tokens = syntax::tokenize(source).map_err(|e| Diagnostic::from(&e))?;
    let program = syntax::parse(&tokens).map_err(|e| Diagnostic::from(&e))?;
    analyze(program).map_err(|e| Diagnostic::from(&e))
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub stdout: String,
    pub trace: String,
    /// The runtime error that stopped the run, if any.
    pub error: Option<Diagnostic>,
    pub stats: Stats,
    pub warnings: Vec<Diagnostic>,
    /// Primitive handles allocated during the run.
    pub allocations: u64,
}

/// Compiles and runs `source` with tracing on. Compile errors are returned
/// as `Err`; runtime errors are reported in the outcome.
pub fn run_source(source: &str, config: Config) -> Result<Outcome, Diagnostic> {
    let analyzed = compile(source)?;
    let mut out = Vec::new();
    let mut trace = Vec::new();
    let mut interp = Interpreter::new(&analyzed, &mut out, Some(&mut trace), config);
    let error = interp.run().err().map(|e| Diagnostic::from(&e));
    let stats = interp.stats().clone();
    let allocations = interp.heap().allocations();
    let mut warnings: Vec<Diagnostic> = analyzed.warnings.iter().map(Diagnostic::from).collect();
    warnings.extend(interp.warnings().iter().cloned());
    drop(interp);
    Ok(Outcome {
        stdout: String::from_utf8(out).expect("utf-8 output"),
        trace: String::from_utf8(trace).expect("utf-8 trace"),
        error,
        stats,
        warnings,
        allocations,
    })
}

/// Compiles and runs `source`, returning everything it printed.
pub fn run_to_string(source: &str) -> Result<String, Diagnostic> {
    let outcome = run_source(source, Config::default())?;
    match outcome.error {
        Some(e) => Err(e),
        None => Ok(outcome.stdout),
    }
}
