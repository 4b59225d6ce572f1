//! `Display` impls producing the concrete syntax accepted by the parser.

use std::fmt;

use crate::formula::{Atom, Formula, Junction, Term};
use crate::program::{
    Assignment, Dep, ForLoop, IndexExpr, LocRef, Location, Program, Statement, Upper,
};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(n) => write!(f, "{n}"),
            Term::Var(v) => f.write_str(v),
            Term::Sum(a, b) => match **b {
                Term::Sum(..) => write!(f, "{a}+({b})"),
                _ => write!(f, "{a}+{b}"),
            },
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// Binding strength: `->` loosest, then `#|`, `#&`, `|`, `&`, unary forms.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 0,
        Formula::Junction(Junction::ChoiceOr, _) => 1,
        Formula::Junction(Junction::ChoiceAnd, _) => 2,
        Formula::Junction(Junction::ParOr, _) => 3,
        Formula::Junction(Junction::ParAnd, _) => 4,
        _ => 5,
    }
}

/// Prints `0` in parentheses unless it binds tighter than `1`.
struct Operand<'a>(&'a Formula, u8);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if level(self.0) <= self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Truth => f.write_str("tt"),
            Formula::Falsity => f.write_str("ff"),
            Formula::Atomic(a) => write!(f, "{a}"),
            Formula::Neg(a) => write!(f, "~{}", Operand(a, 4)),
            Formula::Junction(j, xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " {} ", j.symbol())?;
                    }
                    write!(f, "{}", Operand(x, level(self)))?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => write!(f, "{} -> {}", Operand(a, 0), b),
            Formula::Quant(q, v, body) => {
                // Runs of the same quantifier print as `all x, y, z.`
                write!(f, "{}{v}", q.keyword())?;
                let mut body = &**body;
                while let Formula::Quant(q2, v2, inner) = body {
                    if q2 != q {
                        break;
                    }
                    write!(f, ", {v2}")?;
                    body = inner;
                }
                write!(f, ". {}", Operand(body, 4))
            }
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "/{}[{i}]", self.name),
            None => write!(f, "/{}", self.name),
        }
    }
}

impl fmt::Display for IndexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexExpr::Lit(n) => write!(f, "{n}"),
            IndexExpr::Var { name, offset } if *offset == 0 => f.write_str(name),
            IndexExpr::Var { name, offset } if *offset > 0 => write!(f, "{name}+{offset}"),
            IndexExpr::Var { name, offset } => write!(f, "{name}-{}", offset.unsigned_abs()),
        }
    }
}

impl fmt::Display for LocRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.index {
            Some(i) => write!(f, "/{}[{i}]", self.name),
            None => write!(f, "/{}", self.name),
        }
    }
}

impl fmt::Display for Dep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dep::Ind => f.write_str("IND"),
            Dep::Gind => f.write_str("GIND"),
            Dep::Loc(l) => write!(f, "{l}"),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.target, self.formula)?;
        if !self.deps.is_empty() {
            f.write_str(" ^ {")?;
            for (i, d) in self.deps.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{d}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl fmt::Display for ForLoop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = for {} in {}..",
            self.name, self.index_var, self.lower
        )?;
        match self.upper {
            Upper::Finite(n) => write!(f, "{n}")?,
            Upper::Infinite => f.write_str("inf")?,
        }
        write!(f, " : {}", self.body)
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Assign(a) => write!(f, "{a}"),
            Statement::Loop(l) => write!(f, "{l}"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, chained) in self.statements.iter().zip(&self.chained) {
            writeln!(f, "{s}{}", if *chained { ";" } else { "." })?;
        }
        Ok(())
    }
}
