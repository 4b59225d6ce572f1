//! Terms, atoms and formulas over the computability-logic connectives.
//!
//! All values are immutable once built. Concrete syntax lives in
//! [`crate::syntax`]; this module only holds the data and the pure
//! operations on it (substitution, free variables, arithmetic).

mod ast;
mod subst;
mod term;

pub use ast::{alpha_eq, fresh_name, Formula, Junction, Quantifier};
pub use subst::{substitute, Substitution};
pub use term::{eval_term, Atom, NotGround, Term};

/// Free variables of a formula.
pub fn free_vars(f: &Formula) -> std::collections::BTreeSet<String> {
    f.free_vars()
}
