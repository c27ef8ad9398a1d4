use std::fmt;

use serde::Serialize;
use serde_json::json;

use crate::model::Span;

/// The closed set of checker diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Code {
    /// Unresolved or duplicate name.
    E001,
    /// Role is not a participant of the protocol.
    E002,
    /// Sender does not know the message.
    E003,
    /// A refinement depends on a value its creator does not know.
    E004,
    /// `read` on a value not every participant knows.
    E005,
    /// Non-exhaustive (or, as a warning, redundant) case split.
    E006,
    /// `rec`, `call`, `end` or `read` not in tail position; unguarded `rec`.
    E007,
    /// Callee participants do not appear in order among the caller's.
    E008,
    /// Unbound or duplicate message variable.
    E009,
    /// Ill-kinded refinement or pattern.
    E010,
    /// A role sends a message to itself.
    E011,
    /// The entry protocol takes protocol parameters.
    E012,
}

impl Code {
    pub const ALL: [Code; 12] = [
        Code::E001,
        Code::E002,
        Code::E003,
        Code::E004,
        Code::E005,
        Code::E006,
        Code::E007,
        Code::E008,
        Code::E009,
        Code::E010,
        Code::E011,
        Code::E012,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::E001 => "E001",
            Code::E002 => "E002",
            Code::E003 => "E003",
            Code::E004 => "E004",
            Code::E005 => "E005",
            Code::E006 => "E006",
            Code::E007 => "E007",
            Code::E008 => "E008",
            Code::E009 => "E009",
            Code::E010 => "E010",
            Code::E011 => "E011",
            Code::E012 => "E012",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Related {
    pub span: Span,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    pub related: Option<Related>,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: Severity::Error,
            span,
            message: message.into(),
            related: None,
        }
    }

    pub fn warning(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Self::error(code, span, message)
        }
    }

    pub fn with_related(mut self, span: Span, message: impl Into<String>) -> Self {
        self.related = Some(Related {
            span,
            message: message.into(),
        });
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `{code, severity, file, line, col, len, message, related?}`
    pub fn to_json(&self, file: &str) -> serde_json::Value {
        let mut obj = json!({
            "code": self.code,
            "severity": self.severity,
            "file": file,
            "line": self.span.line,
            "col": self.span.col,
            "len": self.span.len(),
            "message": self.message,
        });
        if let Some(rel) = &self.related {
            obj["related"] = json!({
                "line": rel.span.line,
                "col": rel.span.col,
                "len": rel.span.len(),
                "message": rel.message,
            });
        }
        obj
    }

    /// `file:line:col: error[E004]: message`
    pub fn render(&self, file: &str) -> String {
        let mut out = format!(
            "{file}:{}:{}: {}[{}]: {}",
            self.span.line, self.span.col, self.severity, self.code, self.message
        );
        if let Some(rel) = &self.related {
            out.push_str(&format!(
                "\n  note: {file}:{}:{}: {}",
                rel.span.line, rel.span.col, rel.message
            ));
        }
        out
    }
}
