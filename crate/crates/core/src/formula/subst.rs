use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::{fresh_name, Formula};
use super::term::{Atom, Term};

/// A finite map from variable names to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<String, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(var: impl Into<String>, t: Term) -> Self {
        let mut s = Self::new();
        s.insert(var, t);
        s
    }

    pub fn insert(&mut self, var: impl Into<String>, t: Term) {
        self.0.insert(var.into(), t);
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn remove(&mut self, var: &str) -> Option<Term> {
        self.0.remove(var)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.0.iter()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        t.map_vars(&|v| self.0.get(v).cloned())
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        a.map_terms(|t| self.apply_term(t))
    }

    /// `theta ∘ self`: apply `self` first, then `theta`.
    pub fn then(&self, theta: &Substitution) -> Substitution {
        let mut out: BTreeMap<String, Term> = self
            .0
            .iter()
            .map(|(v, t)| (v.clone(), theta.apply_term(t)))
            .collect();
        for (v, t) in &theta.0 {
            out.entry(v.clone()).or_insert_with(|| t.clone());
        }
        Substitution(out)
    }

    /// Variables occurring in the range.
    pub fn range_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.0.values() {
            t.collect_vars(&mut out);
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.range_vars().iter().all(|v| !self.0.contains_key(v))
    }
}

impl FromIterator<(String, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}↦{t}")?;
        }
        write!(f, "}}")
    }
}

/// Capture-avoiding substitution of free variables.
pub fn substitute(f: &Formula, s: &Substitution) -> Formula {
    if s.is_empty() {
        return f.clone();
    }
    match f {
        Formula::Truth | Formula::Falsity => f.clone(),
        Formula::Atomic(a) => Formula::Atomic(s.apply_atom(a)),
        Formula::Neg(a) => Formula::negate(substitute(a, s)),
        Formula::Junction(j, xs) => {
            Formula::Junction(*j, xs.iter().map(|x| substitute(x, s)).collect())
        }
        Formula::Implies(a, b) => Formula::implies(substitute(a, s), substitute(b, s)),
        Formula::Quant(q, v, body) => {
            let mut inner = s.clone();
            inner.remove(v);
            let free = body.free_vars();
            let mut incoming = BTreeSet::new();
            for w in free.iter().filter(|w| inner.contains(w)) {
                inner.get(w).unwrap().collect_vars(&mut incoming);
            }
            if incoming.contains(v) {
                let mut used = incoming;
                body.all_vars(&mut used);
                used.extend(inner.0.keys().cloned());
                let fresh = fresh_name(v, &used);
                let body = rename_free(body, v, &fresh);
                Formula::quant(*q, fresh, substitute(&body, &inner))
            } else {
                Formula::quant(*q, v.clone(), substitute(body, &inner))
            }
        }
    }
}

/// Renames free occurrences of `from` to `to`; `to` must be fresh for `f`.
pub(crate) fn rename_free(f: &Formula, from: &str, to: &str) -> Formula {
    substitute(f, &Substitution::singleton(from, Term::var(to)))
}
