//! Bounded backward chaining over the Horn fragment.
//!
//! A [`KnowledgeBase`] is the list of formulas bound at a statement's
//! dependencies. [`derive`] searches depth-first in program order with
//! iterative deepening and returns the first solution it meets together
//! with a [`Derivation`] that can be re-checked without search.

pub(crate) mod kb;
mod saturate;
mod search;
mod unify;

use crate::formula::{Atom, Substitution};
use crate::program::Location;

pub use kb::{Clause, ClauseKind, Goal, KnowledgeBase};
pub use search::{derive, select_lemma};
pub use unify::{canonical, is_flex, unify, ConstraintStore, UnifyFailure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SearchLimits {
    pub max_depth: u32,
    pub max_steps: u64,
}

impl SearchLimits {
    /// Both limits must be at least 1.
    pub fn new(max_depth: u32, max_steps: u64) -> Option<SearchLimits> {
        (max_depth >= 1 && max_steps >= 1).then_some(SearchLimits {
            max_depth,
            max_steps,
        })
    }
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_depth: 64,
            max_steps: 100_000,
        }
    }
}

/// Certificate for a goal. Atoms and substitutions are fully evaluated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Derivation {
    /// The atom is (a conjunct of) the formula bound at `source`.
    Fact { source: Location, atom: Atom },
    /// Instance of the `all`-rule at `source`; `subst` maps each of the
    /// rule's own variables to its value.
    Rule {
        source: Location,
        subst: Substitution,
        premises: Vec<Derivation>,
        conclusion: Atom,
    },
    /// Candidate `index` of a `#|` goal was chosen.
    Pick { index: usize, sub: Box<Derivation> },
    /// One sub-derivation per atom of a conjunctive goal.
    And(Vec<Derivation>),
    /// The goal was `tt`.
    Truth,
    /// A statement without dependencies, taken as given.
    Axiom { source: Location },
}

impl Derivation {
    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Derivation::Rule { premises, .. } => {
                1 + premises.iter().map(Derivation::size).sum::<usize>()
            }
            Derivation::Pick { sub, .. } => 1 + sub.size(),
            Derivation::And(xs) => 1 + xs.iter().map(Derivation::size).sum::<usize>(),
            _ => 1,
        }
    }
}

/// A successful search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    /// Values of the goal's `?`-variables.
    pub subst: Substitution,
    pub derivation: Derivation,
    /// Chosen candidate for `#|` goals.
    pub pick: Option<usize>,
    /// Clause attempts spent.
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProveError {
    #[error("not derivable")]
    NotDerivable,
    #[error("search bound exhausted")]
    BoundExhausted,
    #[error("unsupported formula{}: {reason}", location.as_ref().map(|l| format!(" at {l}")).unwrap_or_default())]
    Unsupported {
        location: Option<Location>,
        reason: String,
    },
}
