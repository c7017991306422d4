//! Textual front end: `.rsys` model files, `.props` property files and
//! state-set predicates.
//!
//! ```text
//! model    := "model" NAME "{" item* "}"
//! item     := "state" NAME ":" domain ["init" value] ";"
//!           | "input" NAME {"," NAME} ":" domain ";"
//!           | "init" expr ";" | "assume" expr ";" | "invariant" expr ";"
//!           | "trans" "{" {NAME "'" "=" expr ";"} "}"
//! domain   := "bool" | INT ".." INT | "{" NAME {"," NAME} "}"
//! props    := {"property" NAME "{" ["assume" expr ";"] ["assert" expr ";"] "}"}
//! expr     := implies ["?" expr ":" expr]
//! implies  := or ["=>" implies]
//! or       := and {"||" and}
//! and      := eq {"&&" eq}
//! eq       := rel {("==" | "!=") rel}
//! rel      := add {("<" | "<=" | ">" | ">=") add}
//! add      := unary {("+" | "-") unary}
//! unary    := ("!" | "-") unary | primary
//! primary  := INT | "true" | "false" | NAME | "next" "(" NAME ")" | "(" expr ")"
//! ```
//!
//! `//` starts a comment that runs to the end of the line.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use crate::model::{Expr, ExprScope, Model, Property};

pub use printer::{print_expr, print_model, print_properties};

/// Location of a token or expression in the source text. Lines and columns
/// are 1-based; `start..end` are byte offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: Option<String>,
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl SourceSpan {
    /// Span from the start of `self` to the end of `other`.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let col_end = if other.line == self.line { other.col_end } else { self.col_start.max(self.col_end) };
        SourceSpan {
            file: self.file.clone(),
            start: self.start,
            end: other.end.max(self.start),
            line: self.line,
            col_start: self.col_start,
            col_end,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic { severity: Severity::Error, message: message.into(), span }
    }

    pub fn warning(message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic { severity: Severity::Warning, message: message.into(), span }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        if let Some(file) = &self.span.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}: {sev}: {}", self.span.line, self.span.col_start, self.message)
    }
}

/// One or more diagnostics; returned when parsing fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    /// Attaches a file name to every span.
    pub fn with_file(mut self, file: &str) -> Self {
        for d in &mut self.0 {
            d.span.file = Some(file.to_string());
        }
        self
    }
}

impl From<Diagnostic> for Diagnostics {
    fn from(d: Diagnostic) -> Self {
        Diagnostics(vec![d])
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}

pub fn parse_model(text: &str) -> Result<Model, Diagnostics> {
    parser::parse_model(text)
}

/// Parses a property file against `model`. Assumptions may read state and
/// input variables; assertions may also use `next(v)`.
pub fn parse_properties(model: &Model, text: &str) -> Result<Vec<Property>, Diagnostics> {
    parser::parse_properties(model, text)
}

/// Parses a predicate over state variables (an initial or final state set).
pub fn parse_state_set(model: &Model, text: &str) -> Result<Expr, Diagnostics> {
    parser::parse_expr(model, text, ExprScope::STATE, "a state set")
}

/// Parses a boolean expression in the given scope.
pub fn parse_expr(model: &Model, text: &str, scope: ExprScope) -> Result<Expr, Diagnostics> {
    parser::parse_expr(model, text, scope, "this expression")
}
