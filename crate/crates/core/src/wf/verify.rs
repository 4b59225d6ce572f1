use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::exec::AgentKey;
use crate::formula::{substitute, Atom, Formula, Junction, Substitution, Term};
use crate::program::{validate_induction, Location, Program, Resolved};
use crate::prover::kb::{atom_list, rule_parts};
use crate::prover::{canonical, is_flex, Derivation, Goal};
use crate::trace::{fingerprint, Trace, TraceNode};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accepted {
    pub nodes: usize,
    /// Derivation nodes checked.
    pub steps: u64,
}

/// Why a trace was refused, and where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub node: Option<AgentKey>,
    /// Position inside the node, e.g. `derivation.premise[1]`.
    pub path: String,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Some(k) if self.path.is_empty() => write!(f, "{k}: {}", self.reason),
            Some(k) => write!(f, "{k} at {}: {}", self.path, self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

impl std::error::Error for Rejection {}

fn canon(a: &Atom) -> Atom {
    a.map_terms(canonical)
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Junction(Junction::ParAnd, xs) => xs.iter().flat_map(conjuncts).collect(),
        other => vec![other],
    }
}

/// One-way match of a goal argument against a ground value.
fn match_term(pat: &Term, value: &Term, s: &mut Substitution) -> bool {
    let pat = canonical(&s.apply_term(pat));
    match &pat {
        Term::Var(v) if is_flex(v) => {
            s.insert(v.clone(), value.clone());
            true
        }
        p if p.is_ground() => *p == *value,
        _ => false,
    }
}

fn match_atom(pat: &Atom, value: &Atom, s: &mut Substitution) -> bool {
    if pat.pred != value.pred || pat.arity() != value.arity() {
        return false;
    }
    // Bare variables first so that sums over them can be evaluated after.
    let mut rest = Vec::new();
    for (p, v) in pat.args.iter().zip(&value.args) {
        if matches!(p, Term::Var(_)) {
            if !match_term(p, v, s) {
                return false;
            }
        } else {
            rest.push((p, v));
        }
    }
    rest.into_iter().all(|(p, v)| match_term(p, v, s))
}

struct Checker<'a> {
    key: &'a AgentKey,
    kb: BTreeMap<Location, &'a Formula>,
    steps: u64,
}

impl<'a> Checker<'a> {
    fn reject(&self, path: &str, reason: impl Into<String>) -> Rejection {
        Rejection {
            node: Some(self.key.clone()),
            path: path.to_string(),
            reason: reason.into(),
        }
    }

    fn source(&self, path: &str, loc: &Location) -> Result<&'a Formula, Rejection> {
        let f = *self
            .kb
            .get(loc)
            .ok_or_else(|| self.reject(path, format!("{loc} is not a dependency of this node")))?;
        Ok(f)
    }

    /// Checks that `d` derives exactly `want`.
    fn atom(&mut self, path: &str, d: &Derivation, want: &Atom) -> Result<(), Rejection> {
        self.steps += 1;
        match d {
            Derivation::Fact { source, atom } => {
                if atom != want {
                    return Err(self.reject(path, format!("fact {atom} where {want} is needed")));
                }
                let f = self.source(path, source)?;
                let found = conjuncts(f)
                    .into_iter()
                    .any(|c| matches!(c, Formula::Atomic(a) if canon(a) == *atom));
                if !found {
                    return Err(self.reject(path, format!("{atom} is not stated at {source}")));
                }
                Ok(())
            }
            Derivation::Rule {
                source,
                subst,
                premises,
                conclusion,
            } => {
                if conclusion != want {
                    return Err(self.reject(
                        path,
                        format!("rule concludes {conclusion} where {want} is needed"),
                    ));
                }
                if let Some((v, t)) = subst.iter().find(|(_, t)| !matches!(t, Term::Int(_))) {
                    return Err(self.reject(path, format!("{v} is bound to non-number {t}")));
                }
                let f = self.source(path, source)?;
                let keys: BTreeSet<&str> = subst.iter().map(|(v, _)| v.as_str()).collect();
                let mut last = format!(
                    "{source} holds no rule over {{{}}}",
                    keys.iter().copied().collect::<Vec<_>>().join(",")
                );
                for c in conjuncts(f) {
                    let Some((vars, body, head)) = rule_parts(c) else {
                        continue;
                    };
                    let vs: BTreeSet<&str> = vars.iter().map(String::as_str).collect();
                    if vs != keys {
                        continue;
                    }
                    if canon(&subst.apply_atom(&head)) != *conclusion {
                        last = format!("head of {source} does not give {conclusion}");
                        continue;
                    }
                    if body.len() != premises.len() {
                        last = format!(
                            "{} premise(s) given, {source} needs {}",
                            premises.len(),
                            body.len()
                        );
                        continue;
                    }
                    for (i, (b, d)) in body.iter().zip(premises).enumerate() {
                        let want = canon(&subst.apply_atom(b));
                        self.atom(&format!("{path}.premise[{i}]"), d, &want)?;
                    }
                    return Ok(());
                }
                Err(self.reject(path, last))
            }
            other => Err(self.reject(path, format!("{} cannot derive an atom", kind(other)))),
        }
    }

    /// Checks a conjunctive goal against the node's formula.
    fn conj(
        &mut self,
        path: &str,
        d: &Derivation,
        atoms: &[Atom],
        formula: &Formula,
    ) -> Result<(), Rejection> {
        let got = atom_list(formula).ok_or_else(|| {
            self.reject(
                "formula",
                format!("{formula} is not a conjunction of atoms"),
            )
        })?;
        if got.len() != atoms.len() {
            return Err(self.reject(
                "formula",
                format!("{formula} does not have the shape of the goal"),
            ));
        }
        let mut s = Substitution::new();
        for (g, a) in atoms.iter().zip(&got) {
            if !a.is_ground() || canon(a) != *a || !match_atom(g, a, &mut s) {
                return Err(self.reject("formula", format!("{a} is not an instance of {g}")));
            }
        }
        match (atoms.len(), d) {
            (0, Derivation::Truth) => {
                self.steps += 1;
                Ok(())
            }
            (0, other) => Err(self.reject(path, format!("{} for a `tt` goal", kind(other)))),
            (1, d) => self.atom(path, d, &got[0]),
            (_, Derivation::And(ds)) if ds.len() == got.len() => {
                self.steps += 1;
                for (i, (d, a)) in ds.iter().zip(&got).enumerate() {
                    self.atom(&format!("{path}.and[{i}]"), d, a)?;
                }
                Ok(())
            }
            (_, other) => Err(self.reject(
                path,
                format!("{} does not cover {} conjuncts", kind(other), got.len()),
            )),
        }
    }
}

fn kind(d: &Derivation) -> &'static str {
    match d {
        Derivation::Fact { .. } => "fact",
        Derivation::Rule { .. } => "rule",
        Derivation::Pick { .. } => "pick",
        Derivation::And(_) => "and",
        Derivation::Truth => "true",
        Derivation::Axiom { .. } => "axiom",
    }
}

/// Re-checks every node of `t` against `p` without any search: each step
/// must be a stated fact or an instance of a stated rule, and every
/// formula must be an instance of its statement.
pub fn verify_trace(t: &Trace, p: &Program) -> Result<Accepted, Rejection> {
    let global = |reason: String| Rejection {
        node: None,
        path: String::new(),
        reason,
    };
    if t.program != fingerprint(p) {
        return Err(global(
            "source mismatch: the trace was made from another program".into(),
        ));
    }
    match t.nodes.last() {
        Some(n) if n.key == t.root => {}
        _ => return Err(global(format!("the last node is not the root {}", t.root))),
    }
    let mut seen: BTreeMap<&AgentKey, &TraceNode> = BTreeMap::new();
    let mut steps = 0;
    for n in &t.nodes {
        if seen.contains_key(&n.key) {
            return Err(global(format!("{} appears twice", n.key)));
        }
        steps += check_node(n, &seen, p)?;
        seen.insert(&n.key, n);
    }
    Ok(Accepted {
        nodes: t.nodes.len(),
        steps,
    })
}

fn check_node(
    n: &TraceNode,
    seen: &BTreeMap<&AgentKey, &TraceNode>,
    p: &Program,
) -> Result<u64, Rejection> {
    let reject = |path: &str, reason: String| Rejection {
        node: Some(n.key.clone()),
        path: path.to_string(),
        reason,
    };
    let loc = &n.key.loc;
    let a = match p.resolve(loc) {
        None => return Err(reject("", format!("{loc} is not in the program"))),
        Some(Resolved::LoopName { .. }) => return Err(reject("", format!("{loc} names a loop"))),
        Some(r) => r
            .assignment()
            .map_err(|e| reject("", e.to_string()))?
            .into_owned(),
    };
    let (vars, matrix) = a.formula.choice_all_prefix();
    if n.moves != n.key.instance || n.moves.len() != vars.len() {
        return Err(reject(
            "moves",
            format!(
                "{} move(s) recorded, the statement takes {}",
                n.moves.len(),
                vars.len()
            ),
        ));
    }
    let choice: Substitution = vars
        .iter()
        .zip(&n.moves)
        .map(|(v, m)| (v.to_string(), Term::int(*m)))
        .collect();
    let m = substitute(matrix, &choice);

    if a.is_axiom() && !m.has_choice() {
        if !n.deps.is_empty() {
            return Err(reject(
                "deps",
                "a statement without dependencies lists some".into(),
            ));
        }
        let ok = match (&m, &n.derivation) {
            (Formula::Atomic(at), Derivation::Fact { source, atom }) => {
                source == loc && *atom == canon(at) && n.formula == Formula::Atomic(canon(at))
            }
            (_, Derivation::Axiom { source }) => source == loc && n.formula == m,
            _ => false,
        };
        if !ok {
            return Err(reject(
                "derivation",
                format!("not the statement {m} itself"),
            ));
        }
        return Ok(1);
    }

    // Which dependencies this node may rest on.
    let allowed: BTreeSet<Location> = if a.induction_tags().is_empty() {
        a.dep_locations().filter_map(|r| r.concrete()).collect()
    } else {
        let scheme = validate_induction(&a, p).map_err(|e| reject("", e.to_string()))?;
        let member = scheme.member(n.moves[0]);
        if n.deps != [AgentKey::plain(member.clone())] {
            return Err(reject(
                "deps",
                format!("an induction node rests on {member} alone"),
            ));
        }
        BTreeSet::from([member])
    };
    let mut kb = BTreeMap::new();
    for d in &n.deps {
        if !allowed.contains(&d.loc) {
            return Err(reject("deps", format!("{d} is not a dependency of {loc}")));
        }
        let Some(dn) = seen.get(d) else {
            return Err(reject(
                "deps",
                format!("{d} does not come before this node"),
            ));
        };
        if kb.insert(d.loc.clone(), &dn.formula).is_some() {
            return Err(reject("deps", format!("{} listed twice", d.loc)));
        }
    }

    let goal = Goal::from_formula(&m).map_err(|e| reject("formula", e.to_string()))?;
    let mut c = Checker {
        key: &n.key,
        kb,
        steps: 0,
    };
    match (&goal, &n.derivation) {
        (Goal::Conj { atoms, .. }, d) => c.conj("derivation", d, atoms, &n.formula)?,
        (Goal::ChoicePick(cands), Derivation::Pick { index, sub }) => {
            let Some(Goal::Conj { atoms, .. }) = cands.get(*index) else {
                return Err(reject("derivation", format!("no candidate {index}")));
            };
            c.steps += 1;
            c.conj("derivation.pick", sub, atoms, &n.formula)?
        }
        (Goal::ChoicePick(_), d) => {
            return Err(reject(
                "derivation",
                format!("{} where a pick is needed", kind(d)),
            ))
        }
    }
    Ok(c.steps)
}
