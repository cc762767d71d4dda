//! The textual grammar format (`.codeco` files).
//!
//! ```text
//! start: s
//! # comment
//! np => det(exist:+) noun(text:$N) >(type:noun, noun:$N)
//! vp(num:$Num) ~> v(num:$Num, type:tr) np(case:acc) pp
//! det(exist:-) => // ['every']
//! x => .
//! ```
//!
//! One rule per line. `=>` is a normal rule, `~>` a scope-closing rule, `.` an
//! empty body. A name is a preterminal iff every rule for it rewrites to a
//! single terminal.

mod lexer;
mod parse;

use std::fmt::{self, Write as _};

use crate::grammar::Grammar;
use crate::validate::{validate_grammar, Diagnostic};

pub use parse::{parse_grammar, parse_grammar_with_warnings};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
    pub length: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub span: SourceSpan,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.span.line, self.span.column, self.message)
    }
}

/// Writes `g` in the textual format. The output re-parses to a grammar equal
/// to `g` up to variable ids.
pub fn serialize_grammar(g: &Grammar) -> String {
    let mut out = String::new();
    writeln!(out, "start: {}", g.start()).unwrap();
    for (_, rule) in g.all_rules() {
        writeln!(out, "{rule}").unwrap();
    }
    out
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}", join_lines(.0))]
    Syntax(Vec<ParseDiagnostic>),
    #[error("{}", join_lines(.0))]
    Invalid(Vec<Diagnostic>),
}

fn join_lines<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

/// Parses and validates in one step.
pub fn load_grammar(text: &str) -> Result<Grammar, LoadError> {
    let g = parse_grammar(text).map_err(LoadError::Syntax)?;
    let problems = validate_grammar(&g);
    if problems.is_empty() {
        Ok(g)
    } else {
        Err(LoadError::Invalid(problems))
    }
}
