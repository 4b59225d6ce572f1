//! Statements, locations, the dependency graph, loop unfolding and
//! induction-scheme validation.

mod induction;
mod loops;
mod model;
mod order;

use std::borrow::Cow;

pub use induction::{validate_induction, InductionScheme, SchemeError};
pub use loops::{instantiate, unfold_loop, Residual};
pub use model::{
    Assignment, Dep, ForLoop, IndexExpr, InductionTag, LocRef, Location, Program, Span, Statement,
    Upper,
};
pub use order::dependency_order;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("index {value} is out of range for {reference}")]
    IndexOutOfRange { reference: String, value: u64 },
    #[error("unknown location {0}")]
    UnknownLocation(Location),
    #[error("{0} names a loop and cannot be executed")]
    NotAnAgent(Location),
    #[error("dependency cycle: {}", fmt_cycle(.0))]
    Cycle(Vec<Location>),
}

fn fmt_cycle(c: &[Location]) -> String {
    c.iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// What a concrete location refers to inside a program.
#[derive(Clone, Copy, Debug)]
pub enum Resolved<'p> {
    /// A statement written directly in the program.
    Plain {
        stmt: usize,
        assignment: &'p Assignment,
    },
    /// An element of a loop's array.
    Member {
        stmt: usize,
        lp: &'p ForLoop,
        index: u64,
    },
    /// The name of a loop (`/istep`), usable only in dependency lists.
    LoopName { stmt: usize, lp: &'p ForLoop },
}

impl<'p> Resolved<'p> {
    pub fn stmt(&self) -> usize {
        match *self {
            Resolved::Plain { stmt, .. }
            | Resolved::Member { stmt, .. }
            | Resolved::LoopName { stmt, .. } => stmt,
        }
    }

    /// The concrete assignment; loop members are instantiated.
    pub fn assignment(&self) -> Result<Cow<'p, Assignment>, ModelError> {
        match *self {
            Resolved::Plain { assignment, .. } => Ok(Cow::Borrowed(assignment)),
            Resolved::Member { lp, index, .. } => lp.instance(index).map(Cow::Owned),
            Resolved::LoopName { lp, .. } => Err(ModelError::NotAnAgent(lp.name.clone())),
        }
    }
}

impl Program {
    /// Looks a location up: plain statements win over loop members.
    pub fn resolve(&self, loc: &Location) -> Option<Resolved<'_>> {
        let as_ref = LocRef::from(loc);
        if let Some((stmt, assignment)) = self.assignments().find(|(_, a)| a.target == as_ref) {
            return Some(Resolved::Plain { stmt, assignment });
        }
        if let Some(index) = loc.index {
            if let Some((stmt, lp)) = self
                .loops()
                .find(|(_, lp)| lp.array() == loc.name && lp.covers(index))
            {
                return Some(Resolved::Member { stmt, lp, index });
            }
        }
        self.loops()
            .find(|(_, lp)| &lp.name == loc)
            .map(|(stmt, lp)| Resolved::LoopName { stmt, lp })
    }

    pub fn assignment_at(&self, loc: &Location) -> Result<Cow<'_, Assignment>, ModelError> {
        self.resolve(loc)
            .ok_or_else(|| ModelError::UnknownLocation(loc.clone()))?
            .assignment()
    }

    /// The loop whose array holds `loc`, if `loc` is (or would be) a member.
    pub fn loop_for_member(&self, loc: &Location) -> Option<(usize, &ForLoop)> {
        let index = loc.index?;
        self.loops()
            .find(|(_, lp)| lp.array() == loc.name && lp.covers(index))
    }
}
