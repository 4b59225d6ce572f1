use std::collections::BTreeMap;

use crate::exec::service::{goal_atoms, service_instance};
use crate::formula::{alpha_eq, substitute, Formula, Junction, Substitution, Term};
use crate::program::{
    validate_induction, Assignment, ForLoop, LocRef, Location, Program, Resolved, Statement,
};
use crate::prover::{derive, Goal, KnowledgeBase, ProveError, SearchLimits};

use super::{Code, Diagnostic, WfVerdict};

/// Static knowledge for one statement.
struct Hypotheses {
    kb: KnowledgeBase,
    /// A failed proof means a failed run: no unknowns stand in for values
    /// that are only fixed at run time.
    exact: bool,
}

/// The formula a dependency will be bound to, with `!` variables set to
/// `inst` and `?` witnesses replaced by rigid unknowns named after `label`.
/// The flag says whether that formula is exactly what a run binds.
fn bound_shape(da: &Assignment, label: &str, inst: &[Term]) -> Option<(Formula, bool)> {
    let (vars, matrix) = da.formula.choice_all_prefix();
    if vars.len() != inst.len() {
        return None;
    }
    let choice: Substitution = vars
        .iter()
        .zip(inst)
        .map(|(v, t)| (v.to_string(), t.clone()))
        .collect();
    let matrix = substitute(matrix, &choice);
    if !matrix.has_choice() {
        return Some((matrix, inst.iter().all(Term::is_ground)));
    }
    match Goal::from_formula(&matrix).ok()? {
        Goal::Conj { atoms, exists } => {
            let sk: Substitution = exists
                .iter()
                .map(|v| (v.clone(), Term::var(format!("${v}@{label}"))))
                .collect();
            let mut fs: Vec<Formula> = atoms
                .iter()
                .map(|a| Formula::Atomic(sk.apply_atom(a)))
                .collect();
            let f = match fs.len() {
                0 => Formula::Truth,
                1 => fs.pop().unwrap(),
                _ => Formula::Junction(Junction::ParAnd, fs),
            };
            Some((f, false))
        }
        Goal::ChoicePick(_) => None,
    }
}

/// Knowledge from concrete dependency locations. `extra` holds already
/// computed hypotheses (loop predecessors).
fn hypotheses(
    p: &Program,
    deps: &[Location],
    goal: &Formula,
    extra: Vec<(Location, Formula)>,
    mut exact: bool,
) -> Hypotheses {
    let wanted = goal_atoms(goal);
    let mut kb = KnowledgeBase::new();
    for (l, f) in extra {
        kb.push(l, f);
    }
    for l in deps {
        let da = match p.resolve(l) {
            Some(Resolved::LoopName { .. }) | None => continue,
            Some(r) => match r.assignment() {
                Ok(a) => a.into_owned(),
                Err(_) => {
                    exact = false;
                    continue;
                }
            },
        };
        let inst = if da.is_service() {
            match service_instance(&wanted, &da.formula) {
                Some(ts) => ts,
                None => {
                    exact = false;
                    continue;
                }
            }
        } else {
            Vec::new()
        };
        match bound_shape(&da, &l.to_string(), &inst) {
            Some((f, e)) => {
                exact &= e;
                kb.push(l.clone(), f);
            }
            None => exact = false,
        }
    }
    Hypotheses { kb, exact }
}

/// Replaces the leading `!` variables by rigid parameters `$x`.
fn rigid_matrix(f: &Formula) -> (Formula, bool) {
    let (vars, matrix) = f.choice_all_prefix();
    let s: Substitution = vars
        .iter()
        .map(|v| (v.to_string(), Term::var(format!("${v}"))))
        .collect();
    (substitute(matrix, &s), !vars.is_empty())
}

fn judge(
    target: &str,
    a: &Assignment,
    goal: &Formula,
    h: Hypotheses,
    lim: SearchLimits,
) -> WfVerdict {
    let g = match Goal::from_formula(goal) {
        Ok(g) => g,
        Err(e) => {
            return WfVerdict::NotWellFormed(Diagnostic::error(
                Code::UnsupportedFormula,
                target,
                a.span,
                e.to_string(),
            ))
        }
    };
    match derive(&g, &h.kb, lim) {
        Ok(_) => WfVerdict::WellFormed,
        Err(ProveError::NotDerivable) if h.exact => WfVerdict::NotWellFormed(Diagnostic::error(
            Code::NotDerivable,
            target,
            a.span,
            format!("{} does not follow from its dependencies", a.formula),
        )),
        Err(ProveError::Unsupported { reason, .. }) => WfVerdict::NotWellFormed(Diagnostic::error(
            Code::UnsupportedFormula,
            target,
            a.span,
            reason,
        )),
        Err(e) => WfVerdict::Unknown(Diagnostic::warning(
            Code::Deferred,
            target,
            a.span,
            format!("not settled statically ({e}); checked when executed"),
        )),
    }
}

/// Verdict for a plain statement.
pub fn check_semantic(a: &Assignment, p: &Program, lim: SearchLimits) -> WfVerdict {
    let target = a.target.to_string();
    if a.is_axiom() && !a.formula.has_choice() {
        return WfVerdict::WellFormed;
    }
    if !a.induction_tags().is_empty() {
        return by_scheme(&target, a, p, lim);
    }
    let (goal, parametric) = rigid_matrix(&a.formula);
    let deps: Vec<Location> = a.dep_locations().filter_map(LocRef::concrete).collect();
    let h = hypotheses(p, &deps, &goal, Vec::new(), !parametric);
    judge(&target, a, &goal, h, lim)
}

fn by_scheme(target: &str, a: &Assignment, p: &Program, lim: SearchLimits) -> WfVerdict {
    let scheme = match validate_induction(a, p) {
        Ok(s) => s,
        Err(e) => {
            return WfVerdict::NotWellFormed(Diagnostic::error(
                Code::SchemeError,
                target,
                a.span,
                e.to_string(),
            ))
        }
    };
    for b in &scheme.bases {
        let Ok(ba) = p.assignment_at(b) else { continue };
        match check_semantic(&ba, p, lim) {
            WfVerdict::NotWellFormed(d) => {
                return WfVerdict::NotWellFormed(Diagnostic::error(
                    Code::NotDerivable,
                    target,
                    a.span,
                    format!("base {b} is not well-formed: {}", d.message),
                ))
            }
            WfVerdict::Unknown(_) => {
                return deferred(target, a, format!("base {b} is not settled"))
            }
            _ => {}
        }
    }
    let step = p
        .loops()
        .find(|(_, lp)| lp.name == scheme.step)
        .map(|(_, lp)| lp);
    match step.map(|lp| check_loop(lp, p, lim)) {
        Some(WfVerdict::WellFormed) => WfVerdict::WellFormedByScheme(scheme),
        _ => deferred(target, a, format!("step {} is not settled", scheme.step)),
    }
}

fn deferred(target: &str, a: &Assignment, why: String) -> WfVerdict {
    WfVerdict::Unknown(Diagnostic::warning(
        Code::Deferred,
        target,
        a.span,
        format!("{why}; checked when executed"),
    ))
}

/// Verdict for every instance of a loop at once: the index is a rigid
/// parameter `$i` counted from the lower bound, and a dependency `/a[i-k]`
/// on the loop's own array is taken as the body formula at `$i + lower - k`.
/// That is only sound when the plain statements below the loop agree with
/// the body, so otherwise the dependency is dropped and the verdict can at
/// best be deferred. Loops are never rejected statically.
pub fn check_loop(lp: &ForLoop, p: &Program, lim: SearchLimits) -> WfVerdict {
    let target = lp.name.to_string();
    let at = |off: i128| -> Term {
        let base = Term::var("$i");
        if off == 0 {
            base
        } else {
            Term::sum(base, Term::int(off))
        }
    };
    let template = |t: Term| {
        substitute(
            &lp.body.formula,
            &Substitution::singleton(lp.index_var.clone(), t),
        )
    };
    let body = template(at(lp.lower as i128));
    let (goal, _) = rigid_matrix(&body);
    let mut extra = Vec::new();
    let mut plain = Vec::new();
    for r in lp.body.dep_locations() {
        match r.var_offset() {
            None => plain.extend(r.concrete()),
            Some((v, k)) if v == lp.index_var && r.name == lp.array() && k < 0 => {
                let j0 = lp.lower as i128 + k as i128;
                let agree = (j0.max(0) as u64..lp.lower).all(|j| {
                    match p.resolve(&Location::indexed(lp.array(), j)) {
                        Some(Resolved::Plain { assignment, .. }) => {
                            alpha_eq(&assignment.formula, &template(Term::int(j)))
                        }
                        _ => false,
                    }
                });
                if j0 < 0 || !agree {
                    continue;
                }
                let mut shape = lp.body.clone();
                shape.formula = template(at(j0));
                let label = format!("/{}[{}{k}]", lp.array(), lp.index_var);
                let Some((f, _)) = bound_shape(&shape, &label, &[]) else {
                    continue;
                };
                extra.push((Location::new(label.trim_start_matches('/')), f));
            }
            Some(_) => {}
        }
    }
    let h = hypotheses(p, &plain, &goal, extra, false);
    match judge(&target, &lp.body, &goal, h, lim) {
        WfVerdict::WellFormed => WfVerdict::WellFormed,
        WfVerdict::NotWellFormed(d) if d.code != Code::NotDerivable => WfVerdict::NotWellFormed(d),
        _ => deferred(
            &target,
            &lp.body,
            format!(
                "loop body {} is not proved for every index",
                lp.body.formula
            ),
        ),
    }
}

/// One verdict per statement index.
pub fn statement_verdicts(p: &Program, lim: SearchLimits) -> BTreeMap<usize, WfVerdict> {
    p.statements
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let v = match s {
                Statement::Assign(a) => check_semantic(a, p, lim),
                Statement::Loop(lp) => check_loop(lp, p, lim),
            };
            (i, v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn verdicts(src: &str) -> Vec<WfVerdict> {
        let p = parse_program(src).unwrap();
        statement_verdicts(&p, SearchLimits::default())
            .into_values()
            .collect()
    }

    fn codes(src: &str) -> Vec<String> {
        verdicts(src)
            .iter()
            .filter_map(|v| v.diagnostic().map(|d| d.code.to_string()))
            .collect()
    }

    #[test]
    fn consequence() {
        let v = verdicts(include_str!("../../programs/consequence.lp"));
        assert_eq!(v[0], WfVerdict::WellFormed);
        assert_eq!(v[1], WfVerdict::WellFormed);
        let WfVerdict::NotWellFormed(d) = &v[2] else {
            panic!("{:?}", v[2])
        };
        assert_eq!(
            d.to_string(),
            "ERROR WF001 /z:4:1 p(0,5) does not follow from its dependencies"
        );
    }

    #[test]
    fn fib_is_well_formed() {
        let v = verdicts(include_str!("../../programs/fib.lp"));
        assert!(v.iter().all(|v| v.diagnostic().is_none()), "{v:?}");
        assert!(matches!(v[6], WfVerdict::WellFormedByScheme(_)));
        assert_eq!(v[5], WfVerdict::WellFormed);
    }

    #[test]
    fn triangle_and_others() {
        assert!(codes(include_str!("../../programs/triangle.lp")).is_empty());
        assert!(codes(include_str!("../../programs/forward.lp")).is_empty());
        assert!(codes(include_str!("../../programs/lemmas.lp")).is_empty());
    }

    #[test]
    fn skolem_witness_is_not_exact() {
        // /z needs the witness of /y to be 5, which is only known at run time.
        let src = "/x = p(0,5).\n/y = ?w. p(0,w) ^ {/x}.\n/z = p(0,5) ^ {/y}.";
        assert_eq!(codes(src), vec!["WF100"]);
    }

    #[test]
    fn parametric_goal_is_deferred() {
        assert_eq!(codes("/f = p(3).\n/q = !x. p(x) ^ {/f}."), vec!["WF100"]);
    }

    #[test]
    fn wrong_step_is_deferred() {
        let src = include_str!("../../programs/fib.lp").replace("fib(x+2,y+z)", "fib(x+3,y+z)");
        let v = verdicts(&src);
        assert!(matches!(v[5], WfVerdict::Unknown(_)));
        assert!(matches!(v[6], WfVerdict::Unknown(_)));
    }
}
