use std::collections::BTreeSet;

use super::term::{Atom, Term};

/// The four n-ary connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Junction {
    /// Parallel conjunction `&`.
    ParAnd,
    /// Parallel disjunction `|`.
    ParOr,
    /// Choice conjunction `#&`, resolved by the environment.
    ChoiceAnd,
    /// Choice disjunction `#|`, resolved by the machine.
    ChoiceOr,
}

impl Junction {
    pub fn symbol(self) -> &'static str {
        match self {
            Junction::ParAnd => "&",
            Junction::ParOr => "|",
            Junction::ChoiceAnd => "#&",
            Junction::ChoiceOr => "#|",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    /// `!x.` the environment picks a value for `x`.
    ChoiceAll,
    /// `?x.` the machine picks a value for `x`.
    ChoiceExists,
    /// `all x.`
    BlindAll,
    /// `exi x.`
    BlindExists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::ChoiceAll => "!",
            Quantifier::ChoiceExists => "?",
            Quantifier::BlindAll => "all ",
            Quantifier::BlindExists => "exi ",
        }
    }

    pub fn is_choice(self) -> bool {
        matches!(self, Quantifier::ChoiceAll | Quantifier::ChoiceExists)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Truth,
    Falsity,
    Atomic(Atom),
    Neg(Box<Formula>),
    Junction(Junction, Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quantifier, String, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atomic(Atom::new(pred, args))
    }

    pub fn quant(q: Quantifier, var: impl Into<String>, body: Formula) -> Formula {
        Formula::Quant(q, var.into(), Box::new(body))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn negate(a: Formula) -> Formula {
        Formula::Neg(Box::new(a))
    }

    /// Binary operators print with surrounding parentheses when nested.
    pub fn is_binary(&self) -> bool {
        matches!(self, Formula::Junction(..) | Formula::Implies(..))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Truth | Formula::Falsity => {}
            Formula::Atomic(a) => {
                let mut vs = BTreeSet::new();
                for t in &a.args {
                    t.collect_vars(&mut vs);
                }
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Neg(a) => a.collect_free(bound, out),
            Formula::Junction(_, xs) => xs.iter().for_each(|x| x.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Truth | Formula::Falsity => {}
            Formula::Atomic(a) => a.args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Neg(a) => a.all_vars(out),
            Formula::Junction(_, xs) => xs.iter().for_each(|x| x.all_vars(out)),
            Formula::Implies(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Formula::Quant(_, v, body) => {
                out.insert(v.clone());
                body.all_vars(out);
            }
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atomic(a) => out.push(a),
            Formula::Neg(a) | Formula::Quant(_, _, a) => a.collect_atoms(out),
            Formula::Junction(_, xs) => xs.iter().for_each(|x| x.collect_atoms(out)),
            Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Truth | Formula::Falsity => {}
        }
    }

    /// True if any choice operator (`!`, `?`, `#&`, `#|`) occurs.
    pub fn has_choice(&self) -> bool {
        match self {
            Formula::Truth | Formula::Falsity | Formula::Atomic(_) => false,
            Formula::Neg(a) => a.has_choice(),
            Formula::Junction(j, xs) => {
                matches!(j, Junction::ChoiceAnd | Junction::ChoiceOr)
                    || xs.iter().any(Formula::has_choice)
            }
            Formula::Implies(a, b) => a.has_choice() || b.has_choice(),
            Formula::Quant(q, _, body) => q.is_choice() || body.has_choice(),
        }
    }

    /// Leading `!`-variables and the formula under them.
    pub fn choice_all_prefix(&self) -> (Vec<&str>, &Formula) {
        let mut vars = Vec::new();
        let mut f = self;
        while let Formula::Quant(Quantifier::ChoiceAll, v, body) = f {
            vars.push(v.as_str());
            f = body;
        }
        (vars, f)
    }

    /// Maps every term in place, without regard to binders.
    pub fn map_terms(&self, f: &impl Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Truth | Formula::Falsity => self.clone(),
            Formula::Atomic(a) => Formula::Atomic(a.map_terms(f)),
            Formula::Neg(a) => Formula::negate(a.map_terms(f)),
            Formula::Junction(j, xs) => {
                Formula::Junction(*j, xs.iter().map(|x| x.map_terms(f)).collect())
            }
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::Quant(q, v, body) => Formula::quant(*q, v.clone(), body.map_terms(f)),
        }
    }

    /// Folds every variable-free arithmetic subterm.
    pub fn fold_ground(&self) -> Formula {
        self.map_terms(&Term::fold_ground)
    }

    /// Renames bound variables that shadow an enclosing binder (or one of
    /// `outer`) to fresh names, so that every quantifier nest binds
    /// pairwise-distinct names. Already-distinct formulas come back unchanged.
    pub fn with_distinct_binders(&self, outer: &[String]) -> Formula {
        let mut used = BTreeSet::new();
        self.all_vars(&mut used);
        used.extend(outer.iter().cloned());
        let mut scope: Vec<String> = outer.to_vec();
        distinct(self, &mut scope, &mut used)
    }
}

fn distinct(f: &Formula, scope: &mut Vec<String>, used: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Truth | Formula::Falsity | Formula::Atomic(_) => f.clone(),
        Formula::Neg(a) => Formula::negate(distinct(a, scope, used)),
        Formula::Junction(j, xs) => {
            Formula::Junction(*j, xs.iter().map(|x| distinct(x, scope, used)).collect())
        }
        Formula::Implies(a, b) => {
            Formula::implies(distinct(a, scope, used), distinct(b, scope, used))
        }
        Formula::Quant(q, v, body) => {
            let (name, body) = if scope.contains(v) {
                let fresh = fresh_name(v, used);
                used.insert(fresh.clone());
                let renamed = super::subst::rename_free(body, v, &fresh);
                (fresh, renamed)
            } else {
                (v.clone(), (**body).clone())
            };
            scope.push(name.clone());
            let body = distinct(&body, scope, used);
            scope.pop();
            Formula::quant(*q, name, body)
        }
    }
}

/// `base_1`, `base_2`, ...: the first one not in `used`.
pub fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|c| !used.contains(c))
        .expect("unbounded supply of names")
}

/// Structural equality up to consistent renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha(a, b, &mut Vec::new())
}

fn alpha(a: &Formula, b: &Formula, env: &mut Vec<(String, String)>) -> bool {
    match (a, b) {
        (Formula::Truth, Formula::Truth) | (Formula::Falsity, Formula::Falsity) => true,
        (Formula::Atomic(x), Formula::Atomic(y)) => {
            x.pred == y.pred
                && x.args.len() == y.args.len()
                && x.args
                    .iter()
                    .zip(&y.args)
                    .all(|(s, t)| alpha_term(s, t, env))
        }
        (Formula::Neg(x), Formula::Neg(y)) => alpha(x, y, env),
        (Formula::Junction(j, xs), Formula::Junction(k, ys)) => {
            j == k && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha(x, y, env))
        }
        (Formula::Implies(a1, b1), Formula::Implies(a2, b2)) => {
            alpha(a1, a2, env) && alpha(b1, b2, env)
        }
        (Formula::Quant(q, v, x), Formula::Quant(r, w, y)) if q == r => {
            env.push((v.clone(), w.clone()));
            let ok = alpha(x, y, env);
            env.pop();
            ok
        }
        _ => false,
    }
}

fn alpha_term(s: &Term, t: &Term, env: &[(String, String)]) -> bool {
    match (s, t) {
        (Term::Int(a), Term::Int(b)) => a == b,
        (Term::Var(a), Term::Var(b)) => {
            let left = env.iter().rposition(|(x, _)| x == a);
            let right = env.iter().rposition(|(_, y)| y == b);
            match (left, right) {
                (Some(i), Some(j)) => i == j,
                (None, None) => a == b,
                _ => false,
            }
        }
        (Term::Sum(a1, b1), Term::Sum(a2, b2)) => {
            alpha_term(a1, a2, env) && alpha_term(b1, b2, env)
        }
        _ => false,
    }
}
