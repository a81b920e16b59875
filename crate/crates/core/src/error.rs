//! Runtime errors and rendered diagnostics.

use std::fmt;

use thiserror::Error;

use crate::refops::RefOpError;
use crate::runtime::HeapError;
use crate::semantics::{SemanticError, Warning};
use crate::syntax::ast::Span;
use crate::syntax::{LexError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeErrorKind {
    #[error("no member `{member}` in `{concept}`")]
    NoSuchMember { concept: String, member: String },
    #[error("cannot resolve `{concept}`: {reason}")]
    ResolutionFailed { concept: String, reason: String },
    #[error("concept `{0}` has reference fields but no `continue` method")]
    MissingContinuation(String),
    #[error("dangling handle: {0}")]
    DanglingHandle(String),
    #[error("`super` used at the first segment")]
    NoParent,
    #[error("cannot create `{concept}`: {reason}")]
    CreateFailed { concept: String, reason: String },
    #[error("{0}")]
    RefOp(RefOpError),
    #[error("`.{0}()` used outside a reference method")]
    NotInReferenceMethod(String),
    #[error("`{0}` is only valid inside a special method")]
    NotInSpecialMethod(String),
    #[error("continuation of `{0}` proceeded twice")]
    ContinueTwice(String),
    #[error("`{0}` crossed the border twice in one access")]
    DoubleCrossing(String),
    #[error("field `{field}` of `{concept}` is unset")]
    UnsetField { concept: String, field: String },
    #[error("{0}")]
    RuntimeTypeError(String),
    #[error("`{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("step limit of {0} exhausted")]
    FuelExhausted(u64),
    #[error("call depth limit of {0} exceeded")]
    CallDepthExceeded(usize),
    #[error("output error: {0}")]
    Io(String),
}

impl RuntimeErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            Self::NoSuchMember { .. } => "NoSuchMember",
            Self::ResolutionFailed { .. } => "ResolutionFailed",
            Self::MissingContinuation(_) => "MissingContinuation",
            Self::DanglingHandle(_) => "DanglingHandle",
            Self::NoParent => "NoParent",
            Self::CreateFailed { .. } => "CreateFailed",
            Self::RefOp(e) => e.code(),
            Self::NotInReferenceMethod(_) => "NotInReferenceMethod",
            Self::NotInSpecialMethod(_) => "NotInSpecialMethod",
            Self::ContinueTwice(_) => "ContinueTwice",
            Self::DoubleCrossing(_) => "DoubleCrossing",
            Self::UnsetField { .. } => "UnsetField",
            Self::RuntimeTypeError(_) => "RuntimeTypeError",
            Self::ArityMismatch { .. } => "ArityMismatch",
            Self::FuelExhausted(_) => "FuelExhausted",
            Self::CallDepthExceeded(_) => "CallDepthExceeded",
            Self::Io(_) => "Io",
        }
    }
}

impl From<RefOpError> for RuntimeErrorKind {
    fn from(e: RefOpError) -> Self {
        RuntimeErrorKind::RefOp(e)
    }
}

impl From<HeapError> for RuntimeErrorKind {
    fn from(e: HeapError) -> Self {
        match e {
            HeapError::Dangling(h) => RuntimeErrorKind::DanglingHandle(format!("handle {} was deleted", h.id())),
            HeapError::MissingSegment(h) => RuntimeErrorKind::DanglingHandle(format!(
                "handle {} does not hold an object of the expected concept",
                h.id()
            )),
        }
    }
}

/// A runtime error with the innermost source position and the chain of
/// accesses that were active, innermost first.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind}")]
pub struct RuntimeError {
    pub kind: RuntimeErrorKind,
    pub span: Option<Span>,
    pub accesses: Vec<String>,
}

impl RuntimeError {
    pub fn new(kind: RuntimeErrorKind) -> Self {
        RuntimeError { kind, span: None, accesses: vec![] }
    }

    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}

impl<T: Into<RuntimeErrorKind>> From<T> for RuntimeError {
    fn from(kind: T) -> Self {
        RuntimeError::new(kind.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// Any reportable problem, rendered as `error[Code]: message at file:line:col`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub span: Option<Span>,
    pub notes: Vec<String>,
}

impl Diagnostic {
    pub fn render(&self, file: &str) -> String {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let mut out = format!("{sev}[{}]: {}", self.code, self.message);
        match self.span {
            Some(s) => out.push_str(&format!(" at {file}:{}:{}", s.line, s.column)),
            None => out.push_str(&format!(" in {file}")),
        }
        for n in &self.notes {
            out.push_str(&format!("\n  note: {n}"));
        }
        out
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("<input>"))
    }
}

fn error(code: &str, message: String, span: Option<Span>) -> Diagnostic {
    Diagnostic { severity: Severity::Error, code: code.into(), message, span, notes: vec![] }
}

impl From<&LexError> for Diagnostic {
    fn from(e: &LexError) -> Self {
        error("LexError", e.to_string(), Some(Span::new(e.line, e.column)))
    }
}

impl From<&ParseError> for Diagnostic {
    fn from(e: &ParseError) -> Self {
        error("ParseError", e.to_string(), Some(Span::new(e.line, e.column)))
    }
}

impl From<&SemanticError> for Diagnostic {
    fn from(e: &SemanticError) -> Self {
        error(e.kind.code(), e.kind.to_string(), Some(e.span))
    }
}

impl From<&RuntimeError> for Diagnostic {
    fn from(e: &RuntimeError) -> Self {
        let mut d = error(e.code(), e.kind.to_string(), e.span);
        d.notes = e.accesses.iter().map(|a| format!("in access {a}")).collect();
        d
    }
}

impl From<&Warning> for Diagnostic {
    fn from(w: &Warning) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code: w.code.into(),
            message: w.message.clone(),
            span: Some(w.span),
            notes: vec![],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_format() {
        let e = RuntimeError {
            kind: RuntimeErrorKind::NoParent,
            span: Some(Span::new(3, 7)),
            accesses: vec!["Account.getBalance".into()],
        };
        assert_eq!(
            Diagnostic::from(&e).render("x.cop"),
            "error[NoParent]: `super` used at the first segment at x.cop:3:7\n  note: in access Account.getBalance"
        );
    }
}
