//! Bottom-up closure of a function-free knowledge base.
//!
//! When no clause uses `+` and every rule is range-restricted, the set of
//! derivable atoms is finite. Computing it up front lets the search answer
//! `NotDerivable` exactly (iterative deepening alone can only report that a
//! bound was hit on recursive rules) and prune subgoals that cannot succeed.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{Atom, Term};

use super::kb::{Clause, ClauseKind};
use super::unify::{is_flex, Bindings};

/// Above this many atoms the closure is abandoned and search runs unaided.
const MAX_ATOMS: usize = 50_000;

pub(crate) struct Saturation {
    facts: BTreeMap<(String, usize), Vec<Atom>>,
}

fn function_free(a: &Atom) -> bool {
    a.args.iter().all(|t| !matches!(t, Term::Sum(..)))
}

fn flex_vars(a: &Atom) -> BTreeSet<String> {
    let mut vs = BTreeSet::new();
    for t in &a.args {
        t.collect_vars(&mut vs);
    }
    vs.retain(|v| is_flex(v));
    vs
}

impl Saturation {
    /// `None` when the knowledge base or goal falls outside the
    /// function-free, range-restricted case.
    pub(crate) fn build(clauses: &[Clause], goal: &[Atom]) -> Option<Saturation> {
        if !goal.iter().all(function_free) {
            return None;
        }
        let mut known: BTreeSet<Atom> = BTreeSet::new();
        let mut rules = Vec::new();
        for c in clauses {
            if !function_free(&c.head) || !c.body.iter().all(function_free) {
                return None;
            }
            match c.kind {
                ClauseKind::Fact => {
                    known.insert(c.head.clone());
                }
                ClauseKind::Rule => {
                    let body_vars: BTreeSet<String> = c.body.iter().flat_map(flex_vars).collect();
                    if !flex_vars(&c.head).is_subset(&body_vars) {
                        return None;
                    }
                    if c.body.is_empty() {
                        known.insert(c.head.clone());
                    } else {
                        rules.push(c);
                    }
                }
            }
        }
        let mut sat = Saturation {
            facts: BTreeMap::new(),
        };
        for a in &known {
            sat.add(a.clone());
        }
        loop {
            let mut fresh = Vec::new();
            for r in &rules {
                sat.join(&r.body, Bindings::default(), &mut |b| {
                    let h = b.resolve_atom(&r.head);
                    if !known.contains(&h) {
                        fresh.push(h);
                    }
                });
            }
            let mut changed = false;
            for h in fresh {
                if known.insert(h.clone()) {
                    sat.add(h);
                    changed = true;
                }
            }
            if !changed {
                return Some(sat);
            }
            if known.len() > MAX_ATOMS {
                return None;
            }
        }
    }

    fn add(&mut self, a: Atom) {
        self.facts
            .entry((a.pred.clone(), a.arity()))
            .or_default()
            .push(a);
    }

    fn candidates(&self, a: &Atom) -> &[Atom] {
        self.facts
            .get(&(a.pred.clone(), a.arity()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    fn join(&self, atoms: &[Atom], b: Bindings, emit: &mut dyn FnMut(&Bindings)) {
        let Some((first, rest)) = atoms.split_first() else {
            emit(&b);
            return;
        };
        let goal = b.resolve_atom(first);
        for fact in self.candidates(&goal) {
            let mut b2 = b.clone();
            if b2.unify_atoms(&goal, fact).is_ok() {
                self.join(rest, b2, emit);
            }
        }
    }

    /// Whether some derivable atom unifies with `a`.
    pub(crate) fn admits(&self, a: &Atom) -> bool {
        self.candidates(a)
            .iter()
            .any(|f| Bindings::default().unify_atoms(a, f).is_ok())
    }

    /// Whether the conjunction has a common derivable instance.
    pub(crate) fn admits_all(&self, atoms: &[Atom]) -> bool {
        let mut found = false;
        self.join(atoms, Bindings::default(), &mut |_| found = true);
        found
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::program::Location;
    use crate::prover::KnowledgeBase;
    use crate::syntax::{parse_atom, parse_formula};

    fn clauses(fs: &[&str]) -> Vec<Clause> {
        KnowledgeBase {
            entries: fs
                .iter()
                .map(|f| (Location::new("k"), parse_formula(f).unwrap()))
                .collect::<Vec<(Location, Formula)>>(),
        }
        .clauses()
        .unwrap()
    }

    #[test]
    fn transitive_closure() {
        let cs = clauses(&[
            "e(1,2) & e(2,3) & e(3,1)",
            "all x, y. (e(x,y) -> t(x,y))",
            "all x, y, z. (t(x,y) & e(y,z) -> t(x,z))",
        ]);
        let s = Saturation::build(&cs, &[]).unwrap();
        assert!(s.admits(&parse_atom("t(1,1)").unwrap()));
        assert!(!s.admits(&parse_atom("t(1,4)").unwrap()));
        assert!(s.admits_all(&[parse_atom("t(X,3)").unwrap(), parse_atom("e(3,X)").unwrap()]));
    }

    #[test]
    fn arithmetic_opts_out() {
        let cs = clauses(&["all x. (n(x) -> n(x+1))"]);
        assert!(Saturation::build(&cs, &[]).is_none());
    }
}
