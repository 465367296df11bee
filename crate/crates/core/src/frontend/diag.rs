use std::fmt::Write;

use crate::error::Error;
use crate::syntax::Name;

use super::lexer::{Span, SyntaxError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub code: &'static str,
    pub message: String,
    pub fixpoint: Option<Name>,
    /// Constraint graph of a failed recursion check, in dump format.
    pub excerpt: Option<String>,
}

impl Diagnostic {
    pub fn syntax(e: &SyntaxError) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            span: e.span,
            code: "E-SYNTAX",
            message: e.message.clone(),
            fixpoint: None,
            excerpt: None,
        }
    }

    pub fn checker(e: &Error, span: Span) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            span,
            code: e.code(),
            message: e.kind.to_string(),
            fixpoint: e.fixpoint.clone(),
            excerpt: e.constraints.clone(),
        }
    }

    pub fn warning(code: &'static str, message: String, span: Span) -> Diagnostic {
        Diagnostic { severity: Severity::Warning, span, code, message, fixpoint: None, excerpt: None }
    }

    pub fn render(&self, file: &str, src: &str) -> String {
        let (line, col) = self.span.line_col(src);
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let mut out = format!("{kind}[{}]: {}\n --> {file}:{line}:{col}\n", self.code, self.message);
        if let Some(f) = &self.fixpoint {
            let _ = writeln!(out, "  = in fixpoint `{f}`");
        }
        if let Some(c) = &self.excerpt {
            out.push_str("  = constraints:\n");
            for l in c.lines() {
                let _ = writeln!(out, "    {l}");
            }
        }
        out
    }
}
