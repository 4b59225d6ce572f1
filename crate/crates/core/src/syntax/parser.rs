use std::collections::BTreeSet;
use std::fmt;

use num_traits::ToPrimitive;

use super::lexer::{tokenize, Spanned, Tok};
use crate::formula::{Atom, Formula, Junction, Quantifier, Term};
use crate::program::{
    Assignment, Dep, ForLoop, IndexExpr, LocRef, Location, Program, Span, Statement, Upper,
};

const KEYWORDS: &[&str] = &["tt", "ff", "all", "exi", "for", "in", "inf", "IND", "GIND"];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        match self.expected.as_slice() {
            [] => write!(f, "unexpected {}", self.found),
            [one] => write!(f, "expected {one}, found {}", self.found),
            many => write!(
                f,
                "expected one of {}; found {}",
                many.join(", "),
                self.found
            ),
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    expected: BTreeSet<String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        let toks = tokenize(src).map_err(|e| ParseError {
            line: e.line,
            col: e.col,
            expected: vec![],
            found: format!("character `{}`", e.found),
        })?;
        Ok(Parser {
            toks,
            pos: 0,
            expected: BTreeSet::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        let t = &self.toks[self.pos];
        Span {
            line: t.line,
            col: t.col,
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        self.expected.clear();
        t
    }

    fn check(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            true
        } else {
            self.expected.insert(tok.to_string());
            false
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.check(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn check_kw(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            true
        } else {
            self.expected.insert(format!("`{kw}`"));
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.check_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            expected: self.expected.iter().cloned().collect(),
            found: t.tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => {
                self.expected.insert("identifier".into());
                Err(self.error())
            }
        }
    }

    fn small_int(&mut self) -> PResult<u64> {
        match self.peek() {
            Tok::Int(n) => match n.to_u64() {
                Some(v) => {
                    self.bump();
                    Ok(v)
                }
                None => {
                    self.expected.insert("index below 2^64".into());
                    Err(self.error())
                }
            },
            _ => {
                self.expected.insert("integer".into());
                Err(self.error())
            }
        }
    }

    fn finish(&mut self) -> PResult<()> {
        self.expect(Tok::Eof)
    }

    // program := { stmt ("." | ";") }
    fn program(&mut self) -> PResult<Program> {
        let mut p = Program::default();
        while !self.check(&Tok::Eof) {
            let s = self.statement()?;
            if self.eat(&Tok::Semi) {
                p.push(s, true);
            } else if self.eat(&Tok::Dot) {
                p.push(s, false);
            } else {
                return Err(self.error());
            }
        }
        if p.chained.last() == Some(&true) {
            // `;` must be followed by another statement
            return Err(self.error());
        }
        Ok(p)
    }

    fn statement(&mut self) -> PResult<Statement> {
        let span = self.span();
        let target = self.loc_ref()?;
        self.expect(Tok::Eq)?;
        if self.eat_kw("for") {
            let name = match target.concrete() {
                Some(l) => l,
                None => {
                    self.expected
                        .insert("loop name without a variable index".into());
                    return Err(self.error());
                }
            };
            let index_var = self.ident()?;
            if !self.eat_kw("in") {
                return Err(self.error());
            }
            let lower = self.small_int()?;
            self.expect(Tok::DotDot)?;
            let upper = if self.eat_kw("inf") {
                Upper::Infinite
            } else {
                Upper::Finite(self.small_int()?)
            };
            self.expect(Tok::Colon)?;
            let body_span = self.span();
            let body_target = self.loc_ref()?;
            self.expect(Tok::Eq)?;
            let formula = self
                .formula()?
                .with_distinct_binders(std::slice::from_ref(&index_var));
            let deps = self.deps()?;
            Ok(Statement::Loop(ForLoop {
                name,
                index_var,
                lower,
                upper,
                body: Assignment {
                    target: body_target,
                    formula,
                    deps,
                    span: body_span,
                },
                span,
            }))
        } else {
            let formula = self.formula()?.with_distinct_binders(&[]);
            let deps = self.deps()?;
            Ok(Statement::Assign(Assignment {
                target,
                formula,
                deps,
                span,
            }))
        }
    }

    fn deps(&mut self) -> PResult<Vec<Dep>> {
        if !self.eat(&Tok::Caret) {
            return Ok(vec![]);
        }
        self.expect(Tok::LBrace)?;
        let mut deps = vec![self.dep()?];
        while self.eat(&Tok::Comma) {
            deps.push(self.dep()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(deps)
    }

    fn dep(&mut self) -> PResult<Dep> {
        if self.eat_kw("IND") {
            Ok(Dep::Ind)
        } else if self.eat_kw("GIND") {
            Ok(Dep::Gind)
        } else {
            Ok(Dep::Loc(self.loc_ref()?))
        }
    }

    fn loc_ref(&mut self) -> PResult<LocRef> {
        self.expect(Tok::Slash)?;
        let name = self.ident()?;
        if !self.eat(&Tok::LBracket) {
            return Ok(LocRef::plain(name));
        }
        let index = if matches!(self.peek(), Tok::Int(_)) {
            IndexExpr::Lit(self.small_int()?)
        } else {
            let var = self.ident()?;
            let sign = if self.eat(&Tok::Plus) {
                1
            } else if self.eat(&Tok::Minus) {
                -1
            } else {
                0
            };
            let offset = if sign == 0 {
                0
            } else {
                match i64::try_from(self.small_int()?) {
                    Ok(k) => sign * k,
                    Err(_) => return Err(self.error()),
                }
            };
            IndexExpr::Var { name: var, offset }
        };
        self.expect(Tok::RBracket)?;
        Ok(LocRef::at(name, index))
    }

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.junction(0)?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    // Loosest to tightest: #|, #&, |, &.
    fn junction(&mut self, level: usize) -> PResult<Formula> {
        const LEVELS: [(Tok, Junction); 4] = [
            (Tok::ChoiceBar, Junction::ChoiceOr),
            (Tok::ChoiceAmp, Junction::ChoiceAnd),
            (Tok::Bar, Junction::ParOr),
            (Tok::Amp, Junction::ParAnd),
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let (tok, j) = &LEVELS[level];
        let first = self.junction(level + 1)?;
        let mut parts = vec![first];
        while self.eat(tok) {
            parts.push(self.junction(level + 1)?);
        }
        if parts.len() == 1 {
            Ok(parts.pop().unwrap())
        } else {
            Ok(Formula::Junction(*j, parts))
        }
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat(&Tok::Tilde) {
            return Ok(Formula::negate(self.unary()?));
        }
        let quant = if self.eat(&Tok::Bang) {
            Some(Quantifier::ChoiceAll)
        } else if self.eat(&Tok::Question) {
            Some(Quantifier::ChoiceExists)
        } else if self.eat_kw("all") {
            Some(Quantifier::BlindAll)
        } else if self.eat_kw("exi") {
            Some(Quantifier::BlindExists)
        } else {
            None
        };
        if let Some(q) = quant {
            let mut vars = vec![self.ident()?];
            while self.eat(&Tok::Comma) {
                vars.push(self.ident()?);
            }
            self.expect(Tok::Dot)?;
            let body = self.unary()?;
            return Ok(vars
                .into_iter()
                .rev()
                .fold(body, |acc, v| Formula::quant(q, v, acc)));
        }
        if self.eat_kw("tt") {
            return Ok(Formula::Truth);
        }
        if self.eat_kw("ff") {
            return Ok(Formula::Falsity);
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        Ok(Formula::Atomic(self.atom()?))
    }

    fn atom(&mut self) -> PResult<Atom> {
        let pred = self.ident()?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            args.push(self.term()?);
            while self.eat(&Tok::Comma) {
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
        }
        Ok(Atom { pred, args })
    }

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.term_primary()?;
        while self.eat(&Tok::Plus) {
            t = Term::sum(t, self.term_primary()?);
        }
        Ok(t)
    }

    fn term_primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Term::Int(n))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => {
                self.expected.insert("integer".into());
                self.expected.insert("`(`".into());
                Ok(Term::Var(self.ident()?))
            }
        }
    }
}

/// Parses a whole program.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let prog = p.program()?;
    p.finish()?;
    Ok(prog)
}

/// Parses a standalone formula (no deps, no trailing `.`).
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f.with_distinct_binders(&[]))
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_atom(src: &str) -> Result<Atom, ParseError> {
    let mut p = Parser::new(src)?;
    let a = p.atom()?;
    p.finish()?;
    Ok(a)
}

/// Parses a concrete location such as `/a[4]`.
pub fn parse_location(src: &str) -> Result<Location, ParseError> {
    let mut p = Parser::new(src)?;
    let r = p.loc_ref()?;
    match r.concrete() {
        Some(l) => {
            p.finish()?;
            Ok(l)
        }
        None => Err(ParseError {
            line: 1,
            col: 1,
            expected: vec!["literal index".into()],
            found: format!("variable index in `{src}`"),
        }),
    }
}
