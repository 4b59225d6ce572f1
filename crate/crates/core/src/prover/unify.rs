//! Unification over terms with `+`.
//!
//! Variables whose name starts with `$` are rigid: they behave like unknown
//! constants and are never bound. All other variables are flexible. Besides
//! syntactic matching, two arithmetic cases are solved directly:
//! `v + k` against a term without flexible variables (`v = n - k`, natural
//! numbers only), and a variable against a sum with no flexible variables.
//! Anything else involving a sum is kept as a pending constraint and retried
//! whenever more variables are bound.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::formula::{Atom, Substitution, Term};

pub fn is_flex(name: &str) -> bool {
    !name.starts_with('$')
}

/// Equalities between terms that could not be decided yet.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintStore {
    pub pending: Vec<(Term, Term)>,
}

impl ConstraintStore {
    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UnifyFailure {
    #[error("predicate or arity mismatch")]
    Mismatch,
    #[error("terms do not unify")]
    Clash,
}

/// A term as constant plus a multiset of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Linear {
    constant: BigInt,
    vars: BTreeMap<String, u32>,
}

impl Linear {
    pub(crate) fn of(t: &Term) -> Linear {
        let mut l = Linear {
            constant: BigInt::zero(),
            vars: BTreeMap::new(),
        };
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            match t {
                Term::Int(n) => l.constant += n,
                Term::Var(v) => *l.vars.entry(v.clone()).or_insert(0) += 1,
                Term::Sum(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        l
    }

    fn has_flex(&self) -> bool {
        self.vars.keys().any(|v| is_flex(v))
    }

    fn as_flex_var(&self) -> Option<&str> {
        match (self.constant.is_zero(), self.vars.len()) {
            (true, 1) => {
                let (v, n) = self.vars.iter().next().unwrap();
                (*n == 1 && is_flex(v)).then_some(v.as_str())
            }
            _ => None,
        }
    }

    /// Canonical term: variables in name order, then the constant.
    pub(crate) fn to_term(&self) -> Term {
        let mut parts: Vec<Term> = Vec::new();
        for (v, n) in &self.vars {
            for _ in 0..*n {
                parts.push(Term::var(v.clone()));
            }
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(Term::Int(self.constant.clone()));
        }
        let mut it = parts.into_iter();
        let first = it.next().unwrap();
        it.fold(first, Term::sum)
    }
}

/// Canonical form of a term (ground terms become a single integer).
pub fn canonical(t: &Term) -> Term {
    Linear::of(t).to_term()
}

pub(crate) fn canonical_atom(a: &Atom) -> Atom {
    a.map_terms(canonical)
}

enum Step {
    Done,
    Deferred,
    Fail,
}

/// Substitution plus pending constraints. The substitution is kept
/// idempotent: range terms never mention bound variables.
#[derive(Clone, Debug, Default)]
pub(crate) struct Bindings {
    pub(crate) subst: Substitution,
    pub(crate) store: ConstraintStore,
}

impl Bindings {
    pub(crate) fn resolve(&self, t: &Term) -> Term {
        self.subst.apply_term(t)
    }

    pub(crate) fn resolve_atom(&self, a: &Atom) -> Atom {
        self.subst.apply_atom(a)
    }

    fn bind(&mut self, var: &str, t: Term) {
        let single = Substitution::singleton(var, t.clone());
        let updated: Vec<(String, Term)> = self
            .subst
            .iter()
            .map(|(v, r)| (v.clone(), single.apply_term(r)))
            .collect();
        for (v, r) in updated {
            self.subst.insert(v, r);
        }
        self.subst.insert(var, t);
    }

    fn term_step(&mut self, a: &Term, b: &Term) -> Step {
        let (a, b) = (self.resolve(a), self.resolve(b));
        let (la, lb) = (Linear::of(&a), Linear::of(&b));
        if la == lb {
            return Step::Done;
        }
        if let Some(v) = la.as_flex_var() {
            return self.bind_or_defer(v.to_string(), &lb, a, b);
        }
        if let Some(v) = lb.as_flex_var() {
            return self.bind_or_defer(v.to_string(), &la, b, a);
        }
        match (la.has_flex(), lb.has_flex()) {
            (false, false) => Step::Fail,
            (true, false) => self.solve_offset(&la, &lb, a, b),
            (false, true) => self.solve_offset(&lb, &la, b, a),
            (true, true) => {
                self.store.pending.push((a, b));
                Step::Deferred
            }
        }
    }

    fn bind_or_defer(&mut self, v: String, other: &Linear, vt: Term, ot: Term) -> Step {
        if other.vars.contains_key(&v) {
            return Step::Fail;
        }
        if other.has_flex() && other.as_flex_var().is_none() {
            self.store.pending.push((vt, ot));
            return Step::Deferred;
        }
        self.bind(&v, other.to_term());
        Step::Done
    }

    /// `flex` has flexible variables, `fixed` has none.
    fn solve_offset(&mut self, flex: &Linear, fixed: &Linear, ft: Term, xt: Term) -> Step {
        let flex_vars: Vec<(&String, &u32)> =
            flex.vars.iter().filter(|(v, _)| is_flex(v)).collect();
        let [(v, 1)] = flex_vars.as_slice() else {
            self.store.pending.push((ft, xt));
            return Step::Deferred;
        };
        let mut rest = fixed.clone();
        for (w, n) in flex.vars.iter().filter(|(w, _)| !is_flex(w)) {
            match rest.vars.get_mut(w) {
                Some(m) if *m >= *n => {
                    *m -= n;
                    if *m == 0 {
                        rest.vars.remove(w);
                    }
                }
                _ => return Step::Fail,
            }
        }
        rest.constant -= &flex.constant;
        if rest.constant.is_negative() {
            return Step::Fail;
        }
        let v = v.to_string();
        self.bind(&v, rest.to_term());
        Step::Done
    }

    /// Re-examines pending constraints until nothing changes.
    pub(crate) fn settle(&mut self) -> bool {
        loop {
            let pending = std::mem::take(&mut self.store.pending);
            let before = pending.len();
            let mut progressed = false;
            for (a, b) in pending {
                match self.term_step(&a, &b) {
                    Step::Done => progressed = true,
                    Step::Deferred => {}
                    Step::Fail => return false,
                }
            }
            if !progressed || self.store.pending.is_empty() {
                return true;
            }
            debug_assert!(self.store.pending.len() < before);
        }
    }

    pub(crate) fn unify_atoms(&mut self, goal: &Atom, head: &Atom) -> Result<(), UnifyFailure> {
        if goal.pred != head.pred || goal.args.len() != head.args.len() {
            return Err(UnifyFailure::Mismatch);
        }
        for (a, b) in goal.args.iter().zip(&head.args) {
            if let Step::Fail = self.term_step(a, b) {
                return Err(UnifyFailure::Clash);
            }
        }
        if self.settle() {
            Ok(())
        } else {
            Err(UnifyFailure::Clash)
        }
    }

    /// Discharges every pending constraint, defaulting unconstrained
    /// variables to 0 where a choice is still open.
    pub(crate) fn discharge(&mut self) -> bool {
        if !self.settle() {
            return false;
        }
        while let Some((a, b)) = self.store.pending.first().cloned() {
            let mut vs = std::collections::BTreeSet::new();
            self.resolve(&a).collect_vars(&mut vs);
            self.resolve(&b).collect_vars(&mut vs);
            let Some(v) = vs.into_iter().find(|v| is_flex(v)) else {
                return false;
            };
            self.bind(&v, Term::int(0));
            if !self.settle() {
                return false;
            }
        }
        true
    }

    /// Final value of a term: resolved, open variables set to 0, canonical.
    pub(crate) fn ground(&self, t: &Term) -> Term {
        let r = self.resolve(t);
        canonical(&r.map_vars(&|v| is_flex(v).then(|| Term::int(0))))
    }

    pub(crate) fn ground_atom(&self, a: &Atom) -> Atom {
        a.map_terms(|t| self.ground(t))
    }
}

/// Unifies a goal atom with a clause head, extending `s` and `c`.
pub fn unify(
    goal: &Atom,
    head: &Atom,
    s: &Substitution,
    c: &ConstraintStore,
) -> Result<(Substitution, ConstraintStore), UnifyFailure> {
    let mut b = Bindings {
        subst: s.clone(),
        store: c.clone(),
    };
    b.unify_atoms(goal, head)?;
    Ok((b.subst, b.store))
}
