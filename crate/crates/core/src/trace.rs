//! Text form of derivation traces.
//!
//! ```text
//! lpcode-trace 1
//! program sha256:<hex digest of the rendered program>
//! root /query@4
//! node /a[4]
//!   formula "fib(4,3)"
//!   deps /a[3] /a[2] /r[3]
//!   moves
//!   derivation (rule /r[3] ((x 2) (y 1) (z 2)) ((fact /a[2] "fib(2,1)") (fact /a[3] "fib(3,2)")) "fib(4,3)")
//! ```
//!
//! Nodes appear after every node they depend on, the root last. The
//! derivation is one s-expression:
//!
//! ```text
//! d := (fact LOC "ATOM")
//!    | (rule LOC ((VAR TERM)*) (d*) "ATOM")
//!    | (pick INDEX d)
//!    | (and d*)
//!    | (true)
//!    | (axiom LOC)
//! ```
//!
//! A `TERM` that is not an integer is written in double quotes.

use std::fmt::{self, Write as _};

use sha2::{Digest, Sha256};

use crate::exec::AgentKey;
use crate::formula::{Atom, Formula, Substitution, Term};
use crate::program::{Location, Program};
use crate::prover::Derivation;
use crate::syntax::{parse_atom, parse_formula, parse_location, parse_term};

const MAGIC: &str = "lpcode-trace 1";

/// `sha256:` digest of the program's canonical rendering.
pub fn fingerprint(p: &Program) -> String {
    let digest = Sha256::digest(p.to_string().as_bytes());
    format!("sha256:{}", hex::encode(digest))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceNode {
    pub key: AgentKey,
    pub formula: Formula,
    pub deps: Vec<AgentKey>,
    pub moves: Vec<u64>,
    pub derivation: Derivation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub program: String,
    pub root: AgentKey,
    pub nodes: Vec<TraceNode>,
}

impl Trace {
    pub fn node(&self, key: &AgentKey) -> Option<&TraceNode> {
        self.nodes.iter().find(|n| n.key == *key)
    }

    pub fn render(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Trace, TraceParseError> {
        parse_trace(text)
    }
}

fn write_derivation(out: &mut String, d: &Derivation) {
    match d {
        Derivation::Fact { source, atom } => {
            let _ = write!(out, "(fact {source} \"{atom}\")");
        }
        Derivation::Rule {
            source,
            subst,
            premises,
            conclusion,
        } => {
            let _ = write!(out, "(rule {source} (");
            for (i, (v, t)) in subst.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                match t {
                    Term::Int(n) => {
                        let _ = write!(out, "({v} {n})");
                    }
                    t => {
                        let _ = write!(out, "({v} \"{t}\")");
                    }
                }
            }
            out.push_str(") (");
            for (i, p) in premises.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_derivation(out, p);
            }
            let _ = write!(out, ") \"{conclusion}\")");
        }
        Derivation::Pick { index, sub } => {
            let _ = write!(out, "(pick {index} ");
            write_derivation(out, sub);
            out.push(')');
        }
        Derivation::And(xs) => {
            out.push_str("(and");
            for x in xs {
                out.push(' ');
                write_derivation(out, x);
            }
            out.push(')');
        }
        Derivation::Truth => out.push_str("(true)"),
        Derivation::Axiom { source } => {
            let _ = write!(out, "(axiom {source})");
        }
    }
}

/// S-expression form of a derivation, as used in traces.
pub fn derivation_sexpr(d: &Derivation) -> String {
    let mut s = String::new();
    write_derivation(&mut s, d);
    s
}

fn join<T: fmt::Display>(xs: &[T], sep: &str) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{MAGIC}")?;
        writeln!(f, "program {}", self.program)?;
        writeln!(f, "root {}", self.root)?;
        for n in &self.nodes {
            writeln!(f, "node {}", n.key)?;
            writeln!(f, "  formula \"{}\"", n.formula)?;
            let deps = join(&n.deps, " ");
            writeln!(f, "  deps{}{deps}", if deps.is_empty() { "" } else { " " })?;
            let moves = join(&n.moves, " ");
            writeln!(
                f,
                "  moves{}{moves}",
                if moves.is_empty() { "" } else { " " }
            )?;
            writeln!(f, "  derivation {}", derivation_sexpr(&n.derivation))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Word(String),
    Quoted(String),
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' => {
                chars.next();
            }
            '(' => {
                chars.next();
                out.push(Tok::Open);
            }
            ')' => {
                chars.next();
                out.push(Tok::Close);
            }
            '"' => {
                chars.next();
                let mut q = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(c) => q.push(c),
                        None => return Err("unterminated string".into()),
                    }
                }
                out.push(Tok::Quoted(q));
            }
            _ => {
                let mut w = String::new();
                while let Some(&c) = chars.peek() {
                    if c == ' ' || c == '(' || c == ')' || c == '"' {
                        break;
                    }
                    w.push(c);
                    chars.next();
                }
                out.push(Tok::Word(w));
            }
        }
    }
    Ok(out)
}

struct Sexp {
    toks: Vec<Tok>,
    pos: usize,
}

impl Sexp {
    fn next(&mut self) -> Result<Tok, String> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or("unexpected end of derivation")?;
        self.pos += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expect(&mut self, t: Tok) -> Result<(), String> {
        let got = self.next()?;
        if got == t {
            Ok(())
        } else {
            Err(format!("expected {t:?}, found {got:?}"))
        }
    }

    fn word(&mut self) -> Result<String, String> {
        match self.next()? {
            Tok::Word(w) => Ok(w),
            t => Err(format!("expected a word, found {t:?}")),
        }
    }

    fn quoted(&mut self) -> Result<String, String> {
        match self.next()? {
            Tok::Quoted(q) => Ok(q),
            t => Err(format!("expected a quoted string, found {t:?}")),
        }
    }

    fn location(&mut self) -> Result<Location, String> {
        let w = self.word()?;
        parse_location(&w).map_err(|e| format!("bad location `{w}`: {e}"))
    }

    fn atom(&mut self) -> Result<Atom, String> {
        let q = self.quoted()?;
        parse_atom(&q).map_err(|e| format!("bad atom `{q}`: {e}"))
    }

    fn derivation(&mut self) -> Result<Derivation, String> {
        self.expect(Tok::Open)?;
        let head = self.word()?;
        let d = match head.as_str() {
            "fact" => Derivation::Fact {
                source: self.location()?,
                atom: self.atom()?,
            },
            "rule" => {
                let source = self.location()?;
                self.expect(Tok::Open)?;
                let mut subst = Substitution::new();
                while self.peek() == Some(&Tok::Open) {
                    self.next()?;
                    let v = self.word()?;
                    let t = match self.next()? {
                        Tok::Word(w) | Tok::Quoted(w) => {
                            parse_term(&w).map_err(|e| format!("bad term `{w}`: {e}"))?
                        }
                        t => return Err(format!("expected a term, found {t:?}")),
                    };
                    if subst.contains(&v) {
                        return Err(format!("variable {v} bound twice"));
                    }
                    subst.insert(v, t);
                    self.expect(Tok::Close)?;
                }
                self.expect(Tok::Close)?;
                self.expect(Tok::Open)?;
                let mut premises = Vec::new();
                while self.peek() == Some(&Tok::Open) {
                    premises.push(self.derivation()?);
                }
                self.expect(Tok::Close)?;
                Derivation::Rule {
                    source,
                    subst,
                    premises,
                    conclusion: self.atom()?,
                }
            }
            "pick" => {
                let w = self.word()?;
                let index = w.parse().map_err(|_| format!("bad pick index `{w}`"))?;
                Derivation::Pick {
                    index,
                    sub: Box::new(self.derivation()?),
                }
            }
            "and" => {
                let mut xs = Vec::new();
                while self.peek() == Some(&Tok::Open) {
                    xs.push(self.derivation()?);
                }
                Derivation::And(xs)
            }
            "true" => Derivation::Truth,
            "axiom" => Derivation::Axiom {
                source: self.location()?,
            },
            other => return Err(format!("unknown derivation node `{other}`")),
        };
        self.expect(Tok::Close)?;
        Ok(d)
    }
}

/// Parses the s-expression form of a derivation.
pub fn parse_derivation(s: &str) -> Result<Derivation, String> {
    let mut p = Sexp {
        toks: lex(s)?,
        pos: 0,
    };
    let d = p.derivation()?;
    if p.pos != p.toks.len() {
        return Err("trailing input after derivation".into());
    }
    Ok(d)
}

struct Lines<'t> {
    lines: Vec<&'t str>,
    pos: usize,
}

fn err(line: usize, message: impl Into<String>) -> TraceParseError {
    TraceParseError {
        line,
        message: message.into(),
    }
}

impl<'t> Lines<'t> {
    /// Next line, which must read `name` followed by a space or nothing.
    fn field(&mut self, name: &str) -> Result<(usize, &'t str), TraceParseError> {
        let n = self.pos + 1;
        let l = self
            .lines
            .get(self.pos)
            .ok_or_else(|| err(n, format!("missing `{name}` line")))?;
        self.pos += 1;
        let rest = l
            .strip_prefix(name)
            .filter(|r| r.is_empty() || r.starts_with(' '))
            .ok_or_else(|| err(n, format!("expected `{}`", name.trim())))?;
        Ok((n, rest.strip_prefix(' ').unwrap_or(rest)))
    }

    fn done(&self) -> bool {
        self.pos >= self.lines.len()
    }
}

fn key(n: usize, s: &str) -> Result<AgentKey, TraceParseError> {
    s.parse::<AgentKey>().map_err(|e| err(n, e.to_string()))
}

fn parse_trace(text: &str) -> Result<Trace, TraceParseError> {
    let mut ls = Lines {
        lines: text.lines().collect(),
        pos: 0,
    };
    if ls.lines.first() != Some(&MAGIC) {
        return Err(err(1, format!("expected `{MAGIC}`")));
    }
    ls.pos = 1;
    let (_, program) = ls.field("program")?;
    let (n, root) = ls.field("root")?;
    let root = key(n, root)?;
    let mut nodes = Vec::new();
    while !ls.done() {
        let (n, k) = ls.field("node")?;
        let k = key(n, k)?;
        let (n, f) = ls.field("  formula")?;
        let f = f
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .ok_or_else(|| err(n, "expected a quoted formula"))?;
        let formula = parse_formula(f).map_err(|e| err(n, e.to_string()))?;
        let (n, d) = ls.field("  deps")?;
        let deps = d
            .split_whitespace()
            .map(|s| key(n, s))
            .collect::<Result<Vec<_>, _>>()?;
        let (n, m) = ls.field("  moves")?;
        let moves = m
            .split_whitespace()
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|_| err(n, format!("bad move `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let (n, d) = ls.field("  derivation")?;
        let derivation = parse_derivation(d).map_err(|e| err(n, e))?;
        nodes.push(TraceNode {
            key: k,
            formula,
            deps,
            moves,
            derivation,
        });
    }
    Ok(Trace {
        program: program.to_string(),
        root,
        nodes,
    })
}
