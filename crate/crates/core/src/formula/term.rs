use std::collections::BTreeSet;

use num_bigint::BigInt;

/// A first-order term: an integer, a variable, or a sum of two terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(BigInt),
    Var(String),
    Sum(Box<Term>, Box<Term>),
}

impl Term {
    pub fn int(n: impl Into<BigInt>) -> Term {
        Term::Int(n.into())
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn sum(left: Term, right: Term) -> Term {
        Term::Sum(Box::new(left), Box::new(right))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Int(_) => true,
            Term::Var(_) => false,
            Term::Sum(a, b) => a.is_ground() && b.is_ground(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Int(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Sum(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Int(_) => false,
            Term::Var(v) => v == name,
            Term::Sum(a, b) => a.contains_var(name) || b.contains_var(name),
        }
    }

    /// Replaces every variable `v` with `f(v)` when it returns `Some`.
    pub fn map_vars(&self, f: &impl Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Int(_) => self.clone(),
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::Sum(a, b) => Term::sum(a.map_vars(f), b.map_vars(f)),
        }
    }

    /// Collapses every variable-free subterm into its integer value.
    pub fn fold_ground(&self) -> Term {
        match self {
            Term::Sum(a, b) => {
                let (a, b) = (a.fold_ground(), b.fold_ground());
                match (&a, &b) {
                    (Term::Int(x), Term::Int(y)) => Term::Int(x + y),
                    _ => Term::sum(a, b),
                }
            }
            _ => self.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("term `{0}` is not ground")]
pub struct NotGround(pub Term);

/// Evaluates a variable-free term.
pub fn eval_term(t: &Term) -> Result<BigInt, NotGround> {
    match t {
        Term::Int(n) => Ok(n.clone()),
        Term::Var(_) => Err(NotGround(t.clone())),
        Term::Sum(a, b) => match (eval_term(a), eval_term(b)) {
            (Ok(x), Ok(y)) => Ok(x + y),
            _ => Err(NotGround(t.clone())),
        },
    }
}

/// An elementary atom `pred(t1,...,tn)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Atom {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().map(f).collect(),
        }
    }

    /// Evaluates every argument; fails if any is not ground.
    pub fn evaluated(&self) -> Result<Atom, NotGround> {
        let args = self
            .args
            .iter()
            .map(|t| eval_term(t).map(Term::Int))
            .collect::<Result<_, _>>()?;
        Ok(Atom {
            pred: self.pred.clone(),
            args,
        })
    }
}
