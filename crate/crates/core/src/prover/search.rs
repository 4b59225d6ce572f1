use std::collections::BTreeSet;
use std::rc::Rc;

use crate::formula::{Atom, Substitution, Term};
use crate::program::Location;

use super::kb::{Clause, ClauseKind, Goal, KnowledgeBase};
use super::saturate::Saturation;
use super::unify::{canonical_atom, is_flex, Bindings};
use super::{Derivation, Proof, ProveError, SearchLimits};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

/// Goals currently being proved, innermost first.
struct Anc {
    atom: Atom,
    parent: Option<Rc<Anc>>,
}

/// A derivation whose terms still mention search variables.
#[derive(Clone)]
enum Skel {
    Fact {
        source: Location,
        atom: Atom,
    },
    Rule {
        source: Location,
        vars: Vec<(String, String)>,
        premises: Vec<Skel>,
        head: Atom,
    },
}

type Cont<'c> = dyn FnMut(&mut Search, Bindings, Skel) -> Flow + 'c;
type ConjCont<'c> = dyn FnMut(&mut Search, Bindings, Vec<Skel>) -> Flow + 'c;

struct Search<'a> {
    clauses: &'a [Clause],
    sat: Option<&'a Saturation>,
    max_steps: u64,
    steps: u64,
    cutoff: bool,
    out_of_steps: bool,
    fresh: u64,
}

fn has_flex(a: &Atom) -> bool {
    let mut vs = BTreeSet::new();
    for t in &a.args {
        t.collect_vars(&mut vs);
    }
    vs.iter().any(|v| is_flex(v))
}

fn repeats_ancestor(anc: &Option<Rc<Anc>>, goal: &Atom, b: &Bindings) -> bool {
    let mut cur = anc.as_deref();
    while let Some(node) = cur {
        let a = b.resolve_atom(&node.atom);
        if !has_flex(&a) && canonical_atom(&a) == *goal {
            return true;
        }
        cur = node.parent.as_deref();
    }
    false
}

impl Search<'_> {
    fn solve_conj(
        &mut self,
        goals: &[Atom],
        depth: u32,
        anc: &Option<Rc<Anc>>,
        b: Bindings,
        acc: Vec<Skel>,
        k: &mut ConjCont<'_>,
    ) -> Flow {
        let Some((first, rest)) = goals.split_first() else {
            return k(self, b, acc);
        };
        self.solve_atom(first, depth, anc, b, &mut |s, b2, d| {
            let mut acc2 = acc.clone();
            acc2.push(d);
            s.solve_conj(rest, depth, anc, b2, acc2, &mut *k)
        })
    }

    fn solve_atom(
        &mut self,
        atom: &Atom,
        depth: u32,
        anc: &Option<Rc<Anc>>,
        b: Bindings,
        k: &mut Cont<'_>,
    ) -> Flow {
        // Continuations nest with every step, so deep searches outgrow the
        // thread's stack long before the step budget runs out.
        stacker::maybe_grow(64 * 1024, 1024 * 1024, || {
            self.expand(atom, depth, anc, b, k)
        })
    }

    fn expand(
        &mut self,
        atom: &Atom,
        depth: u32,
        anc: &Option<Rc<Anc>>,
        b: Bindings,
        k: &mut Cont<'_>,
    ) -> Flow {
        if depth == 0 {
            self.cutoff = true;
            return Flow::Continue;
        }
        let goal = b.resolve_atom(atom);
        if !has_flex(&goal) && repeats_ancestor(anc, &canonical_atom(&goal), &b) {
            return Flow::Continue;
        }
        if let Some(sat) = self.sat {
            if !sat.admits(&goal) {
                return Flow::Continue;
            }
        }
        let node = Some(Rc::new(Anc {
            atom: goal.clone(),
            parent: anc.clone(),
        }));
        let clauses = self.clauses;
        for clause in clauses {
            if clause.head.pred != goal.pred || clause.head.arity() != goal.arity() {
                continue;
            }
            self.steps += 1;
            if self.steps > self.max_steps {
                self.out_of_steps = true;
                return Flow::Stop;
            }
            let flow = match clause.kind {
                ClauseKind::Fact => {
                    let mut b2 = b.clone();
                    if b2.unify_atoms(&goal, &clause.head).is_err() {
                        continue;
                    }
                    let d = Skel::Fact {
                        source: clause.source.clone(),
                        atom: clause.head.clone(),
                    };
                    k(self, b2, d)
                }
                ClauseKind::Rule => {
                    self.fresh += 1;
                    let vars: Vec<(String, String)> = clause
                        .vars
                        .iter()
                        .map(|v| (v.clone(), format!("{v}#{}", self.fresh)))
                        .collect();
                    let renaming: Substitution = vars
                        .iter()
                        .map(|(v, r)| (v.clone(), Term::var(r.clone())))
                        .collect();
                    let head = renaming.apply_atom(&clause.head);
                    let mut b2 = b.clone();
                    if b2.unify_atoms(&goal, &head).is_err() {
                        continue;
                    }
                    let body: Vec<Atom> =
                        clause.body.iter().map(|a| renaming.apply_atom(a)).collect();
                    let source = &clause.source;
                    self.solve_conj(&body, depth - 1, &node, b2, Vec::new(), &mut |s, b3, ps| {
                        let d = Skel::Rule {
                            source: source.clone(),
                            vars: vars.clone(),
                            premises: ps,
                            head: head.clone(),
                        };
                        k(s, b3, d)
                    })
                }
            };
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }
}

fn materialize(s: &Skel, b: &Bindings) -> Derivation {
    match s {
        Skel::Fact { source, atom } => Derivation::Fact {
            source: source.clone(),
            atom: atom.clone(),
        },
        Skel::Rule {
            source,
            vars,
            premises,
            head,
        } => Derivation::Rule {
            source: source.clone(),
            subst: vars
                .iter()
                .map(|(v, r)| (v.clone(), b.ground(&Term::var(r.clone()))))
                .collect(),
            premises: premises.iter().map(|p| materialize(p, b)).collect(),
            conclusion: b.ground_atom(head),
        },
    }
}

fn derive_conj(
    atoms: &[Atom],
    exists: &[String],
    clauses: &[Clause],
    lim: SearchLimits,
) -> Result<Proof, ProveError> {
    let sat = Saturation::build(clauses, atoms);
    if let Some(sat) = &sat {
        if !sat.admits_all(atoms) {
            return Err(ProveError::NotDerivable);
        }
    }
    let mut s = Search {
        clauses,
        sat: sat.as_ref(),
        max_steps: lim.max_steps,
        steps: 0,
        cutoff: false,
        out_of_steps: false,
        fresh: 0,
    };
    for depth in 1..=lim.max_depth {
        s.cutoff = false;
        let mut found = None;
        s.solve_conj(
            atoms,
            depth,
            &None,
            Bindings::default(),
            Vec::new(),
            &mut |_, b, ps| {
                let mut b = b;
                if !b.discharge() {
                    return Flow::Continue;
                }
                found = Some((b, ps));
                Flow::Stop
            },
        );
        if let Some((b, ps)) = found {
            let mut vars: BTreeSet<String> = exists.iter().cloned().collect();
            for a in atoms {
                for t in &a.args {
                    t.collect_vars(&mut vars);
                }
            }
            let subst = vars
                .into_iter()
                .filter(|v| is_flex(v))
                .map(|v| {
                    let t = b.ground(&Term::var(v.clone()));
                    (v, t)
                })
                .collect();
            let ds = ps.iter().map(|p| materialize(p, &b)).collect();
            return Ok(Proof {
                subst,
                derivation: Goal::conj_derivation(ds),
                pick: None,
                steps: s.steps,
            });
        }
        if s.out_of_steps {
            return Err(ProveError::BoundExhausted);
        }
        if !s.cutoff {
            return Err(ProveError::NotDerivable);
        }
    }
    Err(ProveError::BoundExhausted)
}

/// Proves `goal` from `kb`. A `#|` goal is handed to [`select_lemma`].
pub fn derive(goal: &Goal, kb: &KnowledgeBase, lim: SearchLimits) -> Result<Proof, ProveError> {
    match goal {
        Goal::Conj { atoms, exists } => derive_conj(atoms, exists, &kb.clauses()?, lim),
        Goal::ChoicePick(cands) => select_lemma(cands, kb, lim),
    }
}

/// Tries each candidate in order and keeps the first that derives. The
/// derivation is wrapped in a `Pick` node carrying the chosen index.
pub fn select_lemma(
    candidates: &[Goal],
    kb: &KnowledgeBase,
    lim: SearchLimits,
) -> Result<Proof, ProveError> {
    let clauses = kb.clauses()?;
    let mut exhausted = false;
    let mut steps = 0;
    for (i, c) in candidates.iter().enumerate() {
        let Goal::Conj { atoms, exists } = c else {
            return Err(ProveError::Unsupported {
                location: None,
                reason: "nested lemma candidates".into(),
            });
        };
        match derive_conj(atoms, exists, &clauses, lim) {
            Ok(p) => {
                return Ok(Proof {
                    subst: p.subst,
                    derivation: Derivation::Pick {
                        index: i,
                        sub: Box::new(p.derivation),
                    },
                    pick: Some(i),
                    steps: steps + p.steps,
                })
            }
            Err(ProveError::BoundExhausted) => {
                exhausted = true;
                steps += lim.max_steps;
            }
            Err(ProveError::NotDerivable) => {}
            Err(e) => return Err(e),
        }
    }
    Err(if exhausted {
        ProveError::BoundExhausted
    } else {
        ProveError::NotDerivable
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_formula};

    fn kb(entries: &[(&str, &str)]) -> KnowledgeBase {
        KnowledgeBase {
            entries: entries
                .iter()
                .map(|(l, f)| {
                    let loc = crate::syntax::parse_location(l).unwrap();
                    (loc, parse_formula(f).unwrap())
                })
                .collect(),
        }
    }

    fn goal(f: &str) -> Goal {
        Goal::from_formula(&parse_formula(f).unwrap()).unwrap()
    }

    const FIB_RULE: &str = "all x, y, z. (fib(x,y) & fib(x+1,z) -> fib(x+2,y+z))";

    #[test]
    fn witness_from_fact() {
        let p = derive(
            &goal("?w. p(0,w)"),
            &kb(&[("/x", "p(0,1)")]),
            SearchLimits::default(),
        )
        .unwrap();
        assert_eq!(p.subst, Substitution::singleton("w", Term::int(1)));
        assert_eq!(
            p.derivation,
            Derivation::Fact {
                source: Location::new("x"),
                atom: parse_atom("p(0,1)").unwrap()
            }
        );
    }

    #[test]
    fn underivable_fact() {
        let r = derive(
            &goal("p(0,5)"),
            &kb(&[("/x", "p(0,1)")]),
            SearchLimits::default(),
        );
        assert_eq!(r, Err(ProveError::NotDerivable));
    }

    #[test]
    fn ground_goal_is_fact() {
        let p = derive(
            &goal("p(0,1)"),
            &kb(&[("/x", "p(0,1)")]),
            SearchLimits::default(),
        )
        .unwrap();
        assert!(p.subst.is_empty());
        assert!(matches!(p.derivation, Derivation::Fact { .. }));
    }

    #[test]
    fn fib_step_by_rule() {
        let k = kb(&[
            ("/a[3]", "fib(3,2)"),
            ("/a[2]", "fib(2,1)"),
            ("/r[3]", FIB_RULE),
        ]);
        let p = derive(&goal("?y. fib(4,y)"), &k, SearchLimits::default()).unwrap();
        assert_eq!(p.subst, Substitution::singleton("y", Term::int(3)));
        let Derivation::Rule {
            source,
            subst,
            premises,
            conclusion,
        } = p.derivation
        else {
            panic!("expected a rule node");
        };
        assert_eq!(source, Location::indexed("r", 3));
        assert_eq!(conclusion.to_string(), "fib(4,3)");
        assert_eq!(subst.to_string(), "{x↦2, y↦1, z↦2}");
        assert_eq!(premises.len(), 2);
        assert!(premises
            .iter()
            .all(|d| matches!(d, Derivation::Fact { .. })));
    }

    #[test]
    fn fib_from_bases_by_recursion() {
        let k = kb(&[
            ("/r[1]", "fib(1,1)"),
            ("/r[2]", "fib(2,1)"),
            ("/r[3]", FIB_RULE),
        ]);
        let p = derive(&goal("?y. fib(10,y)"), &k, SearchLimits::default()).unwrap();
        assert_eq!(p.subst.get("y"), Some(&Term::int(55)));
    }

    #[test]
    fn lemma_selection() {
        let k = kb(&[("/x", "p(0,1)")]);
        let p = select_lemma(
            &[goal("p(0,1)"), goal("p(0,5)")],
            &k,
            SearchLimits::default(),
        )
        .unwrap();
        assert_eq!(p.pick, Some(0));
        assert!(matches!(p.derivation, Derivation::Pick { index: 0, .. }));
        let r = select_lemma(
            &[goal("p(0,5)"), goal("p(0,5)")],
            &k,
            SearchLimits::default(),
        );
        assert_eq!(r, Err(ProveError::NotDerivable));
    }

    #[test]
    fn left_recursion_is_decided() {
        let k = kb(&[
            ("/e", "e(1,2) & e(2,1)"),
            ("/t", "all x, y, z. (t(x,y) & e(y,z) -> t(x,z))"),
            ("/b", "all x, y. (e(x,y) -> t(x,y))"),
        ]);
        let lim = SearchLimits::default();
        assert_eq!(
            derive(&goal("t(1,3)"), &k, lim),
            Err(ProveError::NotDerivable)
        );
        assert!(derive(&goal("t(1,1)"), &k, lim).is_ok());
    }

    #[test]
    fn tiny_limits_exhaust() {
        let k = kb(&[
            ("/r[1]", "fib(1,1)"),
            ("/r[2]", "fib(2,1)"),
            ("/r[3]", FIB_RULE),
        ]);
        let lim = SearchLimits::new(2, 100_000).unwrap();
        assert_eq!(
            derive(&goal("?y. fib(10,y)"), &k, lim),
            Err(ProveError::BoundExhausted)
        );
        let lim = SearchLimits::new(64, 3).unwrap();
        assert_eq!(
            derive(&goal("?y. fib(10,y)"), &k, lim),
            Err(ProveError::BoundExhausted)
        );
    }

    #[test]
    fn conjunctive_goal() {
        let k = kb(&[("/f", "e(1,2) & e(2,3)")]);
        let p = derive(&goal("?n. (e(1,n) & e(n,3))"), &k, SearchLimits::default()).unwrap();
        assert_eq!(p.subst.get("n"), Some(&Term::int(2)));
        assert!(matches!(p.derivation, Derivation::And(ref v) if v.len() == 2));
    }
}
