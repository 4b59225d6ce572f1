//! The `check`, `run` and `verify` commands as plain functions returning
//! exit codes, so they can be driven from tests without a process.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, no errors, trace accepted |
//! | 1 | failure, well-formedness violation, trace rejected |
//! | 2 | I/O, parse, unknown location, extra moves |
//! | 3 | search or unfold limit, missing move |

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use crate::exec::{
    emit_trace, execute, AgentStore, ExecConfig, ExecError, Interactive, MoveScript, MoveSource,
    Status,
};
use crate::program::Program;
use crate::prover::SearchLimits;
use crate::syntax::{parse_location, parse_program};
use crate::trace::Trace;
use crate::wf::{check_program, has_errors, verify_trace};

pub const OK: i32 = 0;
pub const FAILED: i32 = 1;
pub const USAGE: i32 = 2;
pub const LIMIT: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Moves {
    Script(Vec<u64>),
    Interactive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub program: PathBuf,
    pub query: String,
    pub moves: Moves,
    pub exec: ExecConfig,
    pub trace: Option<PathBuf>,
}

fn load(path: &Path, err: &mut dyn Write) -> Result<Program, i32> {
    let src = std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        USAGE
    })?;
    parse_program(&src).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", path.display());
        USAGE
    })
}

/// Prints every diagnostic; 0 iff none is an error.
pub fn cmd_check(path: &Path, lim: SearchLimits, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let p = match load(path, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let ds = check_program(&p, lim);
    for d in &ds {
        let _ = writeln!(out, "{d}");
    }
    if has_errors(&ds) {
        FAILED
    } else {
        OK
    }
}

/// Executes the query and prints the formula it evolved to.
pub fn cmd_run(
    cfg: &RunConfig,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let p = match load(&cfg.program, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let target = match parse_location(&cfg.query) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: bad query location `{}`: {e}", cfg.query);
            return USAGE;
        }
    };
    let mut store = AgentStore::new();
    let (result, extra) = match &cfg.moves {
        Moves::Script(m) => {
            let mut script = MoveScript::new(m.clone());
            let r = execute(&mut store, &p, &target, &mut script, &cfg.exec);
            (r, script.remaining())
        }
        Moves::Interactive => {
            let mut src = Interactive::new(input, &mut *out);
            let r = execute(&mut store, &p, &target, &mut src, &cfg.exec);
            (r, src.remaining())
        }
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let code = match &e {
                ExecError::UnknownLocation(_) | ExecError::NotAnAgent(_) => USAGE,
                ExecError::MoveUnderflow { .. } => LIMIT,
                ExecError::Structural(ds) => {
                    for d in ds {
                        let _ = writeln!(err, "{d}");
                    }
                    FAILED
                }
                ExecError::Unsupported(_) | ExecError::Model(_) => FAILED,
            };
            let _ = writeln!(err, "error: {e}");
            return code;
        }
    };
    match outcome.status {
        Status::Success => {}
        status => {
            let at = outcome.failed_at.map(|k| k.to_string()).unwrap_or_default();
            let why = outcome.reason.unwrap_or_default();
            let _ = writeln!(err, "{status:?} at {at}: {why}");
            return if status == Status::LimitExhausted {
                LIMIT
            } else {
                FAILED
            };
        }
    }
    if extra > 0 {
        let _ = writeln!(err, "error: {extra} move(s) left unused");
        return USAGE;
    }
    let (key, formula) = outcome.binding.expect("success carries a binding");
    let _ = writeln!(out, "{formula}");
    if let Some(path) = &cfg.trace {
        let t = emit_trace(&store, &p, &key).expect("root was just bound");
        if let Err(e) = std::fs::write(path, t.render()) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return USAGE;
        }
    }
    OK
}

/// Re-checks a trace file against a program file.
pub fn cmd_verify(trace: &Path, program: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match std::fs::read_to_string(trace) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", trace.display());
            return USAGE;
        }
    };
    let t = match Trace::parse(&text) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", trace.display());
            return USAGE;
        }
    };
    let p = match load(program, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    match verify_trace(&t, &p) {
        Ok(a) => {
            let _ = writeln!(out, "accepted: {} node(s), {} step(s)", a.nodes, a.steps);
            OK
        }
        Err(r) => {
            let _ = writeln!(out, "rejected: {r}");
            FAILED
        }
    }
}

/// Parses `4,10` into moves.
pub fn parse_moves(s: &str) -> Result<Vec<u64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|m| {
            m.trim()
                .parse::<u64>()
                .map_err(|_| format!("`{}` is not a natural number", m.trim()))
        })
        .collect()
}
