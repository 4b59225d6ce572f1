use std::fmt;

use crate::formula::Formula;

/// A concrete agent location such as `/x` or `/a[4]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub name: String,
    pub index: Option<u64>,
}

impl Location {
    pub fn new(name: impl Into<String>) -> Self {
        Location {
            name: name.into(),
            index: None,
        }
    }

    pub fn indexed(name: impl Into<String>, index: u64) -> Self {
        Location {
            name: name.into(),
            index: Some(index),
        }
    }
}

/// Index inside a location reference: a literal, or `i`, `i+k`, `i-k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexExpr {
    Lit(u64),
    Var { name: String, offset: i64 },
}

impl IndexExpr {
    pub fn var(name: impl Into<String>, offset: i64) -> Self {
        IndexExpr::Var {
            name: name.into(),
            offset,
        }
    }

    /// Evaluates with `var = value`; `None` if the result is negative or the
    /// expression mentions another variable.
    pub fn eval(&self, var: &str, value: u64) -> Option<u64> {
        match self {
            IndexExpr::Lit(n) => Some(*n),
            IndexExpr::Var { name, offset } if name == var => {
                let v = value as i128 + *offset as i128;
                u64::try_from(v).ok()
            }
            IndexExpr::Var { .. } => None,
        }
    }
}

/// A location as written in source, possibly indexed by a loop variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocRef {
    pub name: String,
    pub index: Option<IndexExpr>,
}

impl LocRef {
    pub fn plain(name: impl Into<String>) -> Self {
        LocRef {
            name: name.into(),
            index: None,
        }
    }

    pub fn at(name: impl Into<String>, index: IndexExpr) -> Self {
        LocRef {
            name: name.into(),
            index: Some(index),
        }
    }

    /// The location, if no loop variable is involved.
    pub fn concrete(&self) -> Option<Location> {
        match &self.index {
            None => Some(Location::new(&self.name)),
            Some(IndexExpr::Lit(n)) => Some(Location::indexed(&self.name, *n)),
            Some(IndexExpr::Var { .. }) => None,
        }
    }

    pub fn instantiate(&self, var: &str, value: u64) -> Option<Location> {
        match &self.index {
            None => Some(Location::new(&self.name)),
            Some(e) => e.eval(var, value).map(|i| Location::indexed(&self.name, i)),
        }
    }

    /// `(var, offset)` when indexed by a loop variable.
    pub fn var_offset(&self) -> Option<(&str, i64)> {
        match &self.index {
            Some(IndexExpr::Var { name, offset }) => Some((name, *offset)),
            _ => None,
        }
    }
}

impl From<&Location> for LocRef {
    fn from(l: &Location) -> Self {
        LocRef {
            name: l.name.clone(),
            index: l.index.map(IndexExpr::Lit),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Dep {
    Ind,
    Gind,
    Loc(LocRef),
}

/// Source position of a statement. Never part of structural equality.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// `/x = F ^ {deps}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub target: LocRef,
    pub formula: Formula,
    pub deps: Vec<Dep>,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InductionTag {
    Ind,
    Gind,
}

impl Assignment {
    pub fn dep_locations(&self) -> impl Iterator<Item = &LocRef> {
        self.deps.iter().filter_map(|d| match d {
            Dep::Loc(l) => Some(l),
            _ => None,
        })
    }

    pub fn induction_tags(&self) -> Vec<InductionTag> {
        self.deps
            .iter()
            .filter_map(|d| match d {
                Dep::Ind => Some(InductionTag::Ind),
                Dep::Gind => Some(InductionTag::Gind),
                Dep::Loc(_) => None,
            })
            .collect()
    }

    pub fn is_axiom(&self) -> bool {
        self.deps.is_empty()
    }

    /// Whether execution needs outside input (a leading `!`).
    pub fn is_service(&self) -> bool {
        !self.formula.choice_all_prefix().0.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Upper {
    Finite(u64),
    Infinite,
}

impl Upper {
    pub fn admits(self, k: u64) -> bool {
        match self {
            Upper::Finite(n) => k <= n,
            Upper::Infinite => true,
        }
    }
}

/// `/name = for i in lower..upper : /a[i] = F(i) ^ {deps}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ForLoop {
    pub name: Location,
    pub index_var: String,
    pub lower: u64,
    pub upper: Upper,
    pub body: Assignment,
    pub span: Span,
}

impl ForLoop {
    /// Name of the array the loop fills, e.g. `a` for `/a[i]`.
    pub fn array(&self) -> &str {
        &self.body.target.name
    }

    pub fn covers(&self, k: u64) -> bool {
        k >= self.lower && self.upper.admits(k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Statement {
    Assign(Assignment),
    Loop(ForLoop),
}

impl Statement {
    pub fn span(&self) -> Span {
        match self {
            Statement::Assign(a) => a.span,
            Statement::Loop(l) => l.span,
        }
    }
}

/// A parsed program. `chained[i]` records that statement `i` is followed by
/// `;` (forward sequencing into statement `i + 1`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub statements: Vec<Statement>,
    pub chained: Vec<bool>,
}

impl Program {
    pub fn push(&mut self, s: Statement, chained_to_next: bool) {
        self.statements.push(s);
        self.chained.push(chained_to_next);
    }

    /// Pairs `(before, after)` of statement indices joined by `;`.
    pub fn sequence_edges(&self) -> Vec<(usize, usize)> {
        self.chained
            .iter()
            .enumerate()
            .filter(|(i, c)| **c && i + 1 < self.statements.len())
            .map(|(i, _)| (i, i + 1))
            .collect()
    }

    pub fn loops(&self) -> impl Iterator<Item = (usize, &ForLoop)> {
        self.statements
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Statement::Loop(l) => Some((i, l)),
                _ => None,
            })
    }

    pub fn assignments(&self) -> impl Iterator<Item = (usize, &Assignment)> {
        self.statements
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Statement::Assign(a) => Some((i, a)),
                _ => None,
            })
    }
}
