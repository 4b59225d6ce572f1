//! Shared fixtures: random function-free programs and a naive bottom-up
//! oracle for them.

#![allow(dead_code)]

use std::collections::BTreeSet;

use lpcode::formula::{Atom, Formula, Junction, Quantifier, Term};
use lpcode::program::{Location, Program};
use lpcode::prover::{derive, Derivation, Goal, KnowledgeBase, ProveError, SearchLimits};
use lpcode::syntax::parse_program;
use lpcode::trace::Trace;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const FIB: &str = include_str!("../../programs/fib.lp");
pub const TRIANGLE: &str = include_str!("../../programs/triangle.lp");
pub const FORWARD: &str = include_str!("../../programs/forward.lp");
pub const CONSEQUENCE: &str = include_str!("../../programs/consequence.lp");
pub const LEMMAS: &str = include_str!("../../programs/lemmas.lp");

pub fn program(src: &str) -> Program {
    parse_program(src).unwrap()
}

pub fn loc(s: &str) -> Location {
    lpcode::syntax::parse_location(s).unwrap()
}

/// fib(n) with fib(1) = fib(2) = 1, by iteration.
pub fn fib_oracle(n: u32) -> num_bigint::BigInt {
    let (mut a, mut b) = (num_bigint::BigInt::from(1), num_bigint::BigInt::from(1));
    for _ in 2..n {
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
    if n <= 2 {
        1.into()
    } else {
        b
    }
}

pub const DOMAIN: u64 = 6;

#[derive(Clone, Debug)]
pub struct Rule {
    pub vars: Vec<String>,
    pub body: Vec<Atom>,
    pub head: Atom,
}

/// A Datalog program: facts, range-restricted rules, and a conjunctive
/// goal whose variables are the `?`-witnesses.
#[derive(Clone, Debug)]
pub struct Datalog {
    pub arity: Vec<usize>,
    pub facts: Vec<Atom>,
    pub rules: Vec<Rule>,
    pub goal: Vec<Atom>,
    pub goal_vars: Vec<String>,
}

fn pred(i: usize) -> String {
    format!("p{i}")
}

fn c(n: u64) -> Term {
    Term::int(n)
}

impl Datalog {
    pub fn random(rng: &mut ChaCha8Rng) -> Datalog {
        let npred = rng.gen_range(2..=6);
        let arity: Vec<usize> = (0..npred).map(|_| rng.gen_range(1..=2)).collect();
        let nfacts = rng.gen_range(1..=8);
        let facts = (0..nfacts)
            .map(|_| {
                let p = rng.gen_range(0..npred);
                Atom::new(
                    pred(p),
                    (0..arity[p]).map(|_| c(rng.gen_range(0..DOMAIN))).collect(),
                )
            })
            .collect();
        let pool = ["x", "y", "z"];
        let nrules = rng.gen_range(0..=4);
        let mut rules = Vec::new();
        for _ in 0..nrules {
            let term = |rng: &mut ChaCha8Rng| {
                if rng.gen_bool(0.8) {
                    Term::var(*pool.choose(rng).unwrap())
                } else {
                    c(rng.gen_range(0..DOMAIN))
                }
            };
            let nbody = rng.gen_range(1..=2);
            let body: Vec<Atom> = (0..nbody)
                .map(|_| {
                    let p = rng.gen_range(0..npred);
                    Atom::new(pred(p), (0..arity[p]).map(|_| term(rng)).collect())
                })
                .collect();
            let mut bound = BTreeSet::new();
            for a in &body {
                for t in &a.args {
                    t.collect_vars(&mut bound);
                }
            }
            let bound: Vec<String> = bound.into_iter().collect();
            let hp = rng.gen_range(0..npred);
            let head = Atom::new(
                pred(hp),
                (0..arity[hp])
                    .map(|_| {
                        if !bound.is_empty() && rng.gen_bool(0.85) {
                            Term::var(bound.choose(rng).unwrap().clone())
                        } else {
                            c(rng.gen_range(0..DOMAIN))
                        }
                    })
                    .collect(),
            );
            rules.push(Rule {
                vars: bound,
                body,
                head,
            });
        }
        let gpool = ["u", "v"];
        let ngoal = rng.gen_range(1..=2);
        let goal: Vec<Atom> = (0..ngoal)
            .map(|_| {
                let p = rng.gen_range(0..npred);
                Atom::new(
                    pred(p),
                    (0..arity[p])
                        .map(|_| {
                            if rng.gen_bool(0.6) {
                                Term::var(*gpool.choose(rng).unwrap())
                            } else {
                                c(rng.gen_range(0..DOMAIN))
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        let mut gv = BTreeSet::new();
        for a in &goal {
            for t in &a.args {
                t.collect_vars(&mut gv);
            }
        }
        Datalog {
            arity,
            facts,
            rules,
            goal,
            goal_vars: gv.into_iter().collect(),
        }
    }

    pub fn fact_formula(&self) -> Formula {
        conj(self.facts.iter().cloned().map(Formula::Atomic).collect())
    }

    pub fn rule_formula(r: &Rule) -> Formula {
        let mut f = Formula::implies(
            conj(r.body.iter().cloned().map(Formula::Atomic).collect()),
            Formula::Atomic(r.head.clone()),
        );
        for v in r.vars.iter().rev() {
            f = Formula::quant(Quantifier::BlindAll, v.clone(), f);
        }
        f
    }

    pub fn goal_formula(&self) -> Formula {
        let mut f = conj(self.goal.iter().cloned().map(Formula::Atomic).collect());
        for v in self.goal_vars.iter().rev() {
            f = Formula::quant(Quantifier::ChoiceExists, v.clone(), f);
        }
        f
    }

    pub fn kb(&self) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        kb.push(Location::new("f"), self.fact_formula());
        for (i, r) in self.rules.iter().enumerate() {
            kb.push(Location::indexed("r", i as u64 + 1), Self::rule_formula(r));
        }
        kb
    }

    pub fn goal(&self) -> Goal {
        Goal::from_formula(&self.goal_formula()).unwrap()
    }

    /// The same knowledge as a program whose `/g` asks the goal.
    pub fn source(&self) -> String {
        let mut s = format!("/f = {}.\n", self.fact_formula());
        let mut deps = vec!["/f".to_string()];
        for (i, r) in self.rules.iter().enumerate() {
            s += &format!("/r[{}] = {}.\n", i + 1, Self::rule_formula(r));
            deps.push(format!("/r[{}]", i + 1));
        }
        s += &format!("/g = {} ^ {{{}}}.\n", self.goal_formula(), deps.join(", "));
        s
    }

    /// Every ground atom derivable from the facts and rules.
    pub fn fixpoint(&self) -> BTreeSet<Atom> {
        let mut known: BTreeSet<Atom> = self.facts.iter().cloned().collect();
        loop {
            let mut new = Vec::new();
            for r in &self.rules {
                for values in assignments(r.vars.len()) {
                    let inst = |a: &Atom| ground(a, &r.vars, &values);
                    if r.body.iter().all(|b| known.contains(&inst(b))) {
                        let h = inst(&r.head);
                        if !known.contains(&h) {
                            new.push(h);
                        }
                    }
                }
            }
            if new.is_empty() {
                return known;
            }
            known.extend(new);
        }
    }

    /// Ground instances of the goal's variables that the oracle satisfies.
    pub fn answers(&self, known: &BTreeSet<Atom>) -> BTreeSet<Vec<u64>> {
        assignments(self.goal_vars.len())
            .filter(|vals| {
                self.goal
                    .iter()
                    .all(|a| known.contains(&ground(a, &self.goal_vars, vals)))
            })
            .collect()
    }
}

fn conj(mut xs: Vec<Formula>) -> Formula {
    match xs.len() {
        0 => Formula::Truth,
        1 => xs.pop().unwrap(),
        _ => Formula::Junction(Junction::ParAnd, xs),
    }
}

fn ground(a: &Atom, vars: &[String], vals: &[u64]) -> Atom {
    a.map_terms(|t| match t {
        Term::Var(v) => {
            let i = vars.iter().position(|x| x == v).expect("bound var");
            c(vals[i])
        }
        other => other.clone(),
    })
}

/// All tuples over the domain of the given length.
fn assignments(n: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = DOMAIN.pow(n as u32);
    (0..total).map(move |mut k| {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push(k % DOMAIN);
            k /= DOMAIN;
        }
        v
    })
}

/// Single edits of fib.lp and triangle.lp that break their induction
/// schemes.
pub fn induction_mutants() -> Vec<(&'static str, String)> {
    let fib = |from: &str, to: &str| {
        assert!(FIB.contains(from), "{from}");
        FIB.replacen(from, to, 1)
    };
    let tri = |from: &str, to: &str| {
        assert!(TRIANGLE.contains(from), "{from}");
        TRIANGLE.replacen(from, to, 1)
    };
    vec![
        (
            "fib: base dropped",
            fib("{GIND, /a[1], /a[2], /istep}", "{GIND, /a[2], /istep}"),
        ),
        ("fib: step starts late", fib("for i in 3..", "for i in 4..")),
        (
            "fib: step dependency dropped",
            fib("{/a[i-1], /a[i-2], /r[3]}", "{/a[i-1], /r[3]}"),
        ),
        ("fib: IND tag", fib("{GIND,", "{IND,")),
        (
            "fib: base unjustified",
            fib("fib(2,y) ^ {/r[2]}", "fib(2,y) ^ {/r[1]}"),
        ),
        (
            "tri: base dropped",
            tri("{IND, /a[1], /istep}", "{IND, /istep}"),
        ),
        ("tri: step starts late", tri("for i in 2..", "for i in 3..")),
        (
            "tri: step reaches back two",
            tri("{/a[i-1], /r[2]}", "{/a[i-2], /r[2]}"),
        ),
        (
            "tri: step proves the successor",
            tri(": /a[i] = ?s. tri(i,s)", ": /a[i] = ?s. tri(i+1,s)"),
        ),
    ]
}

/// Every variant of a rendered trace with one integer bumped by one,
/// except in the version header.
pub fn bumped_integers(text: &str) -> Vec<String> {
    let header = text.find('\n').map_or(text.len(), |i| i + 1);
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = header;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: num_bigint::BigUint = text[start..i].parse().unwrap();
            out.push(format!("{}{}{}", &text[..start], n + 1u32, &text[i..]));
        } else {
            i += 1;
        }
    }
    out
}

/// Variants of `d` with two distinct premises of one rule swapped.
pub fn premise_swaps(d: &Derivation) -> Vec<Derivation> {
    let mut out = Vec::new();
    match d {
        Derivation::Rule {
            source,
            subst,
            premises,
            conclusion,
        } => {
            for i in 0..premises.len() {
                for j in i + 1..premises.len() {
                    if premises[i] != premises[j] {
                        let mut ps = premises.clone();
                        ps.swap(i, j);
                        out.push(Derivation::Rule {
                            source: source.clone(),
                            subst: subst.clone(),
                            premises: ps,
                            conclusion: conclusion.clone(),
                        });
                    }
                }
                for sub in premise_swaps(&premises[i]) {
                    let mut ps = premises.clone();
                    ps[i] = sub;
                    out.push(Derivation::Rule {
                        source: source.clone(),
                        subst: subst.clone(),
                        premises: ps,
                        conclusion: conclusion.clone(),
                    });
                }
            }
        }
        Derivation::Pick { index, sub } => {
            for s in premise_swaps(sub) {
                out.push(Derivation::Pick {
                    index: *index,
                    sub: Box::new(s),
                });
            }
        }
        Derivation::And(xs) => {
            for i in 0..xs.len() {
                for s in premise_swaps(&xs[i]) {
                    let mut ys = xs.clone();
                    ys[i] = s;
                    out.push(Derivation::And(ys));
                }
            }
        }
        _ => {}
    }
    out
}

/// Single-edit corruptions of a trace: bumped integers, swapped premises
/// and dropped nodes.
pub fn trace_mutants(t: &Trace) -> Vec<(String, Trace)> {
    let text = t.render();
    let mut out: Vec<(String, Trace)> = bumped_integers(&text)
        .into_iter()
        .enumerate()
        .filter_map(|(i, m)| Trace::parse(&m).ok().map(|t| (format!("integer #{i}"), t)))
        .collect();
    for (n, node) in t.nodes.iter().enumerate() {
        for d in premise_swaps(&node.derivation) {
            let mut m = t.clone();
            m.nodes[n].derivation = d;
            out.push((format!("premises of {}", node.key), m));
        }
        if n + 1 < t.nodes.len() {
            let mut m = t.clone();
            m.nodes.remove(n);
            out.push((format!("without {}", node.key), m));
        }
    }
    out
}

/// Runs derive on `d` and compares with the fixpoint: `Ok(true)` for a
/// correct witness, `Ok(false)` for a correct refusal.
pub fn oracle_case(d: &Datalog) -> Result<bool, String> {
    let answers = d.answers(&d.fixpoint());
    match derive(&d.goal(), &d.kb(), SearchLimits::default()) {
        Ok(proof) => {
            let mut witness = Vec::new();
            for v in &d.goal_vars {
                match proof.subst.get(v) {
                    Some(Term::Int(n)) => witness.push(u64::try_from(n).unwrap()),
                    other => return Err(format!("{v} bound to {other:?}\n{}", d.source())),
                }
            }
            if answers.contains(&witness) {
                Ok(true)
            } else {
                Err(format!("bad witness {witness:?}\n{}", d.source()))
            }
        }
        Err(ProveError::NotDerivable) if answers.is_empty() => Ok(false),
        Err(ProveError::NotDerivable) => Err(format!("missed an answer\n{}", d.source())),
        Err(e) => Err(format!("{e}\n{}", d.source())),
    }
}
