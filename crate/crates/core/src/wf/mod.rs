//! Well-formedness: structural diagnostics, static semantic verdicts, and
//! an independent checker for derivation traces.
//!
//! A statement is well-formed when its formula follows from the formulas at
//! its dependencies. Statically the dependencies are not yet evaluated, so
//! their `?` witnesses are replaced by rigid unknowns (`$y@/a[1]`) and the
//! `!` variables of the statement itself by rigid parameters (`$x`). A proof
//! under those unknowns covers every run. When no proof is found and the
//! knowledge used was exact, the statement is rejected; otherwise the
//! verdict is left to run time with a warning.

mod semantic;
mod structural;
mod verify;

use std::fmt;

use crate::program::{InductionScheme, Program, Span};
use crate::prover::SearchLimits;

pub use semantic::{check_loop, check_semantic, statement_verdicts};
pub use structural::check_structural;
pub use verify::{verify_trace, Accepted, Rejection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        })
    }
}

/// Stable diagnostic codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    /// The formula does not follow from its dependencies.
    NotDerivable,
    /// Two statements bind the same location.
    DestructiveAssign,
    /// An IND/GIND statement does not have the scheme shape.
    SchemeError,
    /// Dependencies and sequencing form a cycle.
    Cycle,
    /// A formula outside the executable fragment, or with free variables.
    UnsupportedFormula,
    /// A dependency that names nothing usable.
    UnknownDep,
    /// A predicate used with two different arities.
    ArityClash,
    /// A loop whose bounds, target or dependencies are malformed.
    MalformedLoop,
    /// Well-formedness could not be settled statically.
    Deferred,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::NotDerivable => "WF001",
            Code::DestructiveAssign => "WF002",
            Code::SchemeError => "WF003",
            Code::Cycle => "WF004",
            Code::UnsupportedFormula => "WF005",
            Code::UnknownDep => "WF006",
            Code::ArityClash => "WF007",
            Code::MalformedLoop => "WF008",
            Code::Deferred => "WF100",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One finding, printed as `SEVERITY CODE loc:line:col message`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    /// The statement's target as written, e.g. `/z` or `/istep`.
    pub loc: String,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn error(
        code: Code,
        loc: impl Into<String>,
        span: Span,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            loc: loc.into(),
            span,
            message: message.into(),
        }
    }

    pub fn warning(
        code: Code,
        loc: impl Into<String>,
        span: Span,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            loc: loc.into(),
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}:{} {}",
            self.severity, self.code, self.loc, self.span, self.message
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WfVerdict {
    WellFormed,
    NotWellFormed(Diagnostic),
    /// Not settled statically; checked per instance at run time.
    Unknown(Diagnostic),
    WellFormedByScheme(InductionScheme),
}

impl WfVerdict {
    pub fn diagnostic(&self) -> Option<&Diagnostic> {
        match self {
            WfVerdict::NotWellFormed(d) | WfVerdict::Unknown(d) => Some(d),
            _ => None,
        }
    }
}

/// Structural checks, then per-statement verdicts when the structure is
/// sound. Diagnostics come in statement order.
pub fn check_program(p: &Program, lim: SearchLimits) -> Vec<Diagnostic> {
    let mut out = check_structural(p);
    if out.iter().any(|d| d.severity == Severity::Error) {
        return out;
    }
    for v in statement_verdicts(p, lim).values() {
        out.extend(v.diagnostic().cloned());
    }
    out
}

pub fn has_errors(ds: &[Diagnostic]) -> bool {
    ds.iter().any(|d| d.severity == Severity::Error)
}
