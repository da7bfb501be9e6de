use std::fmt;

use crate::expr::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
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

/// Stable diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Code {
    UnknownCharacter,
    UnterminatedComment,
    UnterminatedString,
    InvalidNumber,
    Syntax,
    InvalidType,
    DuplicateDeclaration,
    UndeclaredType,
    UndeclaredVariable,
    UnknownFunction,
    TypeMismatch,
    TaxonomyViolation,
    CyclicDefinition,
    UnitMismatch,
    InvalidExtremum,
    ConstantFunction,
    MissingDirection,
    UnboundVarpoint,
    ClampedValue,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::UnknownCharacter => "E001",
            Code::UnterminatedComment => "E002",
            Code::UnterminatedString => "E003",
            Code::InvalidNumber => "E004",
            Code::Syntax => "E100",
            Code::InvalidType => "E101",
            Code::DuplicateDeclaration => "E102",
            Code::UndeclaredType => "E200",
            Code::UndeclaredVariable => "E201",
            Code::UnknownFunction => "E202",
            Code::TypeMismatch => "E203",
            Code::TaxonomyViolation => "E204",
            Code::CyclicDefinition => "E205",
            Code::UnitMismatch => "E206",
            Code::InvalidExtremum => "E207",
            Code::ConstantFunction => "E300",
            Code::MissingDirection => "E301",
            Code::UnboundVarpoint => "W400",
            Code::ClampedValue => "W401",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub code: Code,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic { severity: Severity::Error, span, code, message: message.into() }
    }

    pub fn warning(code: Code, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic { severity: Severity::Warning, span, code, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: severity[code]: message`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{}:{}:{}: {}[{}]: {}",
            file, self.span.line, self.span.column, self.severity, self.code, self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}[{}]: {}",
            self.span.line, self.span.column, self.severity, self.code, self.message
        )
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
