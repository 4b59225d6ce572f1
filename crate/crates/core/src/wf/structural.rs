use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{Substitution, Term};
use crate::program::{
    dependency_order, validate_induction, Assignment, Dep, ForLoop, IndexExpr, Location,
    ModelError, Program, Resolved, Statement, Upper,
};
use crate::prover::{Goal, KnowledgeBase};

use super::{Code, Diagnostic};

/// How many loop indices past the lower bound have their dependencies
/// resolved. Offsets larger than this are not looked at.
const LOOP_PROBE: u64 = 8;

/// Duplicate targets, unknown dependencies, cycles, malformed loops, arity
/// clashes, unsupported formulas and bad induction shapes.
pub fn check_structural(p: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    duplicates(p, &mut out);
    arities(p, &mut out);
    for (i, s) in p.statements.iter().enumerate() {
        match s {
            Statement::Assign(a) => assignment(p, i, a, &mut out),
            Statement::Loop(lp) => for_loop(p, lp, &mut out),
        }
    }
    // Forward references can make the dependency closure infinite.
    if !out.iter().any(|d| d.code == Code::MalformedLoop) {
        cycles(p, &mut out);
    }
    out
}

fn target_name(s: &Statement) -> String {
    match s {
        Statement::Assign(a) => a.target.to_string(),
        Statement::Loop(lp) => lp.name.to_string(),
    }
}

fn duplicates(p: &Program, out: &mut Vec<Diagnostic>) {
    let mut seen: BTreeMap<Location, usize> = BTreeMap::new();
    for (i, s) in p.statements.iter().enumerate() {
        let loc = match s {
            Statement::Assign(a) => match a.target.concrete() {
                Some(l) => l,
                None => {
                    out.push(Diagnostic::error(
                        Code::MalformedLoop,
                        a.target.to_string(),
                        a.span,
                        "index variable in a target outside a loop",
                    ));
                    continue;
                }
            },
            Statement::Loop(lp) => lp.name.clone(),
        };
        if let Some(first) = seen.insert(loc.clone(), i) {
            out.push(Diagnostic::error(
                Code::DestructiveAssign,
                loc.to_string(),
                s.span(),
                format!(
                    "{loc} is already bound at {}; destructive assignments are not allowed",
                    p.statements[first].span()
                ),
            ));
            seen.insert(loc, first);
        }
    }
    // Plain statements inside a loop's range, and overlapping loops.
    let loops: Vec<(usize, &ForLoop)> = p.loops().collect();
    for (i, a) in p.assignments() {
        let Some(l) = a.target.concrete() else {
            continue;
        };
        let Some(k) = l.index else { continue };
        if let Some((_, lp)) = loops
            .iter()
            .find(|(_, lp)| lp.array() == l.name && lp.covers(k))
        {
            out.push(Diagnostic::error(
                Code::DestructiveAssign,
                l.to_string(),
                p.statements[i].span(),
                format!("{l} is also produced by loop {}", lp.name),
            ));
        }
    }
    for (n, (_, a)) in loops.iter().enumerate() {
        for (_, b) in &loops[n + 1..] {
            let overlap = a.array() == b.array() && {
                let lo = a.lower.max(b.lower);
                a.covers(lo) && b.covers(lo)
            };
            if overlap {
                out.push(Diagnostic::error(
                    Code::DestructiveAssign,
                    b.name.to_string(),
                    b.span,
                    format!(
                        "loops {} and {} both produce /{}",
                        a.name,
                        b.name,
                        a.array()
                    ),
                ));
            }
        }
    }
}

fn arities(p: &Program, out: &mut Vec<Diagnostic>) {
    let mut first: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for s in &p.statements {
        let (f, target) = match s {
            Statement::Assign(a) => (&a.formula, a.target.to_string()),
            Statement::Loop(lp) => (&lp.body.formula, lp.name.to_string()),
        };
        let mut reported = BTreeSet::new();
        for atom in f.atoms() {
            let (n, at) = first
                .entry(atom.pred.clone())
                .or_insert((atom.arity(), target.clone()))
                .clone();
            if n != atom.arity() && reported.insert(atom.pred.clone()) {
                out.push(Diagnostic::error(
                    Code::ArityClash,
                    target.clone(),
                    s.span(),
                    format!(
                        "{} is used with {} argument(s) here and {n} at {at}",
                        atom.pred,
                        atom.arity()
                    ),
                ));
            }
        }
    }
}

/// Statement shapes the executor can run: `!`-prefix then a goal, or a
/// choice-free axiom usable as knowledge.
pub(crate) fn shape_problem(a: &Assignment, bound_outside: &[String]) -> Option<String> {
    let mut free = a.formula.free_vars();
    for v in bound_outside {
        free.remove(v);
    }
    if let Some(v) = free.iter().next() {
        return Some(format!("free variable {v} in {}", a.formula));
    }
    let (vars, matrix) = a.formula.choice_all_prefix();
    if a.is_axiom() && !matrix.has_choice() {
        // The axiom has to be usable as knowledge once its `!` are chosen.
        let rigid: Substitution = vars
            .iter()
            .copied()
            .chain(bound_outside.iter().map(String::as_str))
            .map(|v| (v.to_string(), Term::var(format!("${v}"))))
            .collect();
        let inst = crate::formula::substitute(matrix, &rigid);
        let kb = KnowledgeBase {
            entries: vec![(Location::new("_"), inst)],
        };
        return kb.clauses().err().map(|e| e.to_string());
    }
    Goal::from_formula(matrix).err().map(|e| e.to_string())
}

fn assignment(p: &Program, _i: usize, a: &Assignment, out: &mut Vec<Diagnostic>) {
    let target = a.target.to_string();
    if let Some(msg) = shape_problem(a, &[]) {
        out.push(Diagnostic::error(
            Code::UnsupportedFormula,
            &target,
            a.span,
            msg,
        ));
    }
    let tagged = !a.induction_tags().is_empty();
    for d in &a.deps {
        let Dep::Loc(r) = d else { continue };
        let Some(l) = r.concrete() else {
            out.push(Diagnostic::error(
                Code::UnknownDep,
                &target,
                a.span,
                format!("dependency {r} uses an index variable outside a loop"),
            ));
            continue;
        };
        match p.resolve(&l) {
            None => out.push(Diagnostic::error(
                Code::UnknownDep,
                &target,
                a.span,
                format!("dependency {l} is not declared"),
            )),
            Some(Resolved::LoopName { .. }) if !tagged => out.push(Diagnostic::error(
                Code::UnknownDep,
                &target,
                a.span,
                format!("loop {l} can only back an IND or GIND statement"),
            )),
            Some(_) => {}
        }
    }
    if tagged {
        if let Err(e) = validate_induction(a, p) {
            out.push(Diagnostic::error(
                Code::SchemeError,
                &target,
                a.span,
                e.to_string(),
            ));
        }
    }
}

fn for_loop(p: &Program, lp: &ForLoop, out: &mut Vec<Diagnostic>) {
    let name = lp.name.to_string();
    let mut bad = |msg: String| {
        out.push(Diagnostic::error(Code::MalformedLoop, &name, lp.span, msg));
    };
    if let Upper::Finite(n) = lp.upper {
        if lp.lower > n {
            bad(format!("empty range {}..{n}", lp.lower));
        }
    }
    let target_ok = matches!(
        &lp.body.target.index,
        Some(IndexExpr::Var { name, offset: 0 }) if *name == lp.index_var
    );
    if !target_ok {
        bad(format!(
            "loop target {} must be indexed by {}",
            lp.body.target, lp.index_var
        ));
    }
    if !lp.body.induction_tags().is_empty() {
        bad("loop bodies cannot carry induction tags".into());
    }
    let mut max_back = 0u64;
    for r in lp.body.dep_locations() {
        match r.var_offset() {
            Some((v, _)) if v != lp.index_var => {
                bad(format!("dependency {r} uses unknown index variable {v}"))
            }
            Some((_, k)) if k > 0 || (r.name == lp.array() && k == 0) => {
                bad(format!("dependency {r} does not refer to an earlier index"))
            }
            Some((_, k)) => {
                if (lp.lower as i128) + (k as i128) < 0 {
                    bad(format!(
                        "dependency {r} is negative at {} = {}",
                        lp.index_var, lp.lower
                    ));
                }
                max_back = max_back.max(k.unsigned_abs());
            }
            None => {}
        }
    }
    if let Some(msg) = shape_problem(&lp.body, std::slice::from_ref(&lp.index_var)) {
        out.push(Diagnostic::error(
            Code::UnsupportedFormula,
            &name,
            lp.span,
            msg,
        ));
    }
    // Dependencies of the first few instances must exist.
    let last = match lp.upper {
        Upper::Finite(n) => n.min(lp.lower + max_back.max(1) + LOOP_PROBE),
        Upper::Infinite => lp.lower + max_back.max(1) + LOOP_PROBE,
    };
    let mut missing = BTreeSet::new();
    for i in lp.lower..=last {
        for r in lp.body.dep_locations() {
            let Some(l) = r.instantiate(&lp.index_var, i) else {
                continue;
            };
            match p.resolve(&l) {
                None => {
                    missing.insert(l);
                }
                Some(Resolved::LoopName { .. }) => {
                    missing.insert(l);
                }
                Some(_) => {}
            }
        }
    }
    for l in missing {
        out.push(Diagnostic::error(
            Code::UnknownDep,
            &name,
            lp.span,
            format!("dependency {l} is not declared"),
        ));
    }
}

fn cycles(p: &Program, out: &mut Vec<Diagnostic>) {
    let mut seen: BTreeSet<BTreeSet<Location>> = BTreeSet::new();
    for (i, s) in p.statements.iter().enumerate() {
        let start = match s {
            Statement::Assign(a) => a.target.concrete(),
            Statement::Loop(lp) if lp.covers(lp.lower) => {
                Some(Location::indexed(lp.array(), lp.lower))
            }
            Statement::Loop(_) => None,
        };
        let Some(start) = start else { continue };
        if let Err(ModelError::Cycle(c)) = dependency_order(p, &start) {
            let key: BTreeSet<Location> = c.iter().cloned().collect();
            if seen.insert(key) {
                let path = c
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(" -> ");
                out.push(Diagnostic::error(
                    Code::Cycle,
                    target_name(&p.statements[i]),
                    s.span(),
                    format!("dependency cycle {path}"),
                ));
            }
        }
    }
}
