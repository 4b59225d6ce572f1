use std::collections::BTreeSet;

use crate::formula::{Atom, Formula, Junction, Quantifier};
use crate::program::Location;

use super::unify::{canonical, canonical_atom, is_flex};
use super::{Derivation, Proof, ProveError};

/// Formulas bound at a statement's dependencies, in dependency order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub entries: Vec<(Location, Formula)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClauseKind {
    Fact,
    Rule,
}

/// One usable entry: `all vars. (body -> head)`, or a fact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub source: Location,
    pub kind: ClauseKind,
    pub vars: Vec<String>,
    pub body: Vec<Atom>,
    pub head: Atom,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, source: Location, f: Formula) {
        self.entries.push((source, f));
    }

    /// Splits every entry into clauses, rejecting anything outside the
    /// fragment of facts and Horn rules.
    pub fn clauses(&self) -> Result<Vec<Clause>, ProveError> {
        let mut out = Vec::new();
        for (loc, f) in &self.entries {
            compile(loc, f, &mut out).map_err(|reason| ProveError::Unsupported {
                location: Some(loc.clone()),
                reason,
            })?;
        }
        Ok(out)
    }
}

fn has_flex(a: &Atom) -> bool {
    let mut vs = BTreeSet::new();
    for t in &a.args {
        t.collect_vars(&mut vs);
    }
    vs.iter().any(|v| is_flex(v))
}

/// Atoms of `tt`, an atom, or a `&` of atoms.
pub(crate) fn atom_list(f: &Formula) -> Option<Vec<Atom>> {
    match f {
        Formula::Truth => Some(Vec::new()),
        Formula::Atomic(a) => Some(vec![a.clone()]),
        Formula::Junction(Junction::ParAnd, xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(atom_list(x)?);
            }
            Some(out)
        }
        _ => None,
    }
}

fn compile(loc: &Location, f: &Formula, out: &mut Vec<Clause>) -> Result<(), String> {
    match f {
        Formula::Truth => Ok(()),
        Formula::Atomic(a) => {
            if has_flex(a) {
                return Err(format!("fact {a} has free variables"));
            }
            out.push(Clause {
                source: loc.clone(),
                kind: ClauseKind::Fact,
                vars: Vec::new(),
                body: Vec::new(),
                head: canonical_atom(a),
            });
            Ok(())
        }
        Formula::Junction(Junction::ParAnd, xs) => xs.iter().try_for_each(|x| compile(loc, x, out)),
        Formula::Quant(Quantifier::BlindAll, ..) | Formula::Implies(..) => {
            let (vars, body, head) =
                rule_parts(f).ok_or_else(|| format!("{f} is not a Horn rule"))?;
            let bound: BTreeSet<&str> = vars.iter().map(String::as_str).collect();
            let mut used = BTreeSet::new();
            for a in body.iter().chain([&head]) {
                for t in &a.args {
                    t.collect_vars(&mut used);
                }
            }
            if let Some(v) = used
                .iter()
                .find(|v| is_flex(v) && !bound.contains(v.as_str()))
            {
                return Err(format!("variable {v} is not bound in {f}"));
            }
            out.push(Clause {
                source: loc.clone(),
                kind: ClauseKind::Rule,
                vars,
                body,
                head,
            });
            Ok(())
        }
        Formula::Falsity => Err("ff cannot be used as knowledge".into()),
        Formula::Neg(_) => Err("negation is not supported in knowledge".into()),
        other => Err(format!("{other} is outside the Horn fragment")),
    }
}

/// `all x1..xn. (A1 & .. & Am -> B)` or `all x1..xn. B`.
pub(crate) fn rule_parts(f: &Formula) -> Option<(Vec<String>, Vec<Atom>, Atom)> {
    let mut vars = Vec::new();
    let mut m = f;
    while let Formula::Quant(Quantifier::BlindAll, v, body) = m {
        vars.push(v.clone());
        m = body;
    }
    match m {
        Formula::Implies(body, head) => match &**head {
            Formula::Atomic(h) => Some((vars, atom_list(body)?, h.clone())),
            _ => None,
        },
        Formula::Atomic(h) if !vars.is_empty() => Some((vars, Vec::new(), h.clone())),
        _ => None,
    }
}

/// What the machine has to establish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Goal {
    /// Conjunction of atoms with `?`-variables to be witnessed.
    Conj {
        atoms: Vec<Atom>,
        exists: Vec<String>,
    },
    /// `#|` over candidates; the first derivable one is chosen.
    ChoicePick(Vec<Goal>),
}

impl Goal {
    /// Reads `?x.. (A1 & .. & An)` or a `#|` of such formulas.
    pub fn from_formula(f: &Formula) -> Result<Goal, ProveError> {
        let unsupported = |reason: String| ProveError::Unsupported {
            location: None,
            reason,
        };
        if let Formula::Junction(Junction::ChoiceOr, xs) = f {
            let cands = xs
                .iter()
                .map(conj_goal)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| unsupported(format!("candidate of {f} is not a goal")))?;
            return Ok(Goal::ChoicePick(cands));
        }
        conj_goal(f).ok_or_else(|| unsupported(format!("{f} is not a goal")))
    }

    /// The formula the goal evolves to under a proof.
    pub fn evolve(&self, proof: &Proof) -> Formula {
        match self {
            Goal::ChoicePick(cands) => {
                let i = proof.pick.unwrap_or(0);
                cands[i].evolve(proof)
            }
            Goal::Conj { atoms, .. } => {
                let ground = |a: &Atom| {
                    let a = proof.subst.apply_atom(a);
                    a.map_terms(canonical)
                };
                match atoms.as_slice() {
                    [] => Formula::Truth,
                    [a] => Formula::Atomic(ground(a)),
                    many => Formula::Junction(
                        Junction::ParAnd,
                        many.iter().map(|a| Formula::Atomic(ground(a))).collect(),
                    ),
                }
            }
        }
    }

    pub(crate) fn conj_derivation(mut ds: Vec<Derivation>) -> Derivation {
        match ds.len() {
            0 => Derivation::Truth,
            1 => ds.pop().unwrap(),
            _ => Derivation::And(ds),
        }
    }
}

fn conj_goal(f: &Formula) -> Option<Goal> {
    let mut exists = Vec::new();
    let mut m = f;
    while let Formula::Quant(Quantifier::ChoiceExists, v, body) = m {
        exists.push(v.clone());
        m = body;
    }
    Some(Goal::Conj {
        atoms: atom_list(m)?,
        exists,
    })
}
