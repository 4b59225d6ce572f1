use std::collections::BTreeSet;

use crate::formula::{alpha_eq, substitute, Substitution, Term};

use super::model::{Assignment, Dep, InductionTag, Location, Program};
use super::Resolved;

/// A validated IND/GIND justification for a `!`-headed statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductionScheme {
    pub kind: InductionTag,
    /// Number of bases; 1 for IND.
    pub order: usize,
    /// Array holding the instances, `a` for `/a[k]`.
    pub array: String,
    pub bases: Vec<Location>,
    /// Name of the loop handling the inductive steps.
    pub step: Location,
}

impl InductionScheme {
    /// Location holding the instance for move `n`.
    pub fn member(&self, n: u64) -> Location {
        Location::indexed(&self.array, n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error("statement carries no induction tag")]
    NoTag,
    #[error("statement carries more than one induction tag")]
    MultipleTags,
    #[error("an induction scheme needs a formula headed by exactly one `!` quantifier")]
    HeadNotChoiceAll,
    #[error("no step loop among the dependencies")]
    MissingStep,
    #[error("more than one step loop among the dependencies")]
    MultipleSteps,
    #[error("dependency {0} is neither a base nor the step loop")]
    UnexpectedDep(String),
    #[error("missing base")]
    MissingBase,
    #[error("IND takes exactly one base, found {0}")]
    IndOrder(usize),
    #[error("bases must sit at indices 1..{order}, found {found:?}")]
    BaseGap { order: usize, found: Vec<u64> },
    #[error("step loop starts at {lower}, expected {expected}")]
    OriginMismatch { lower: u64, expected: u64 },
    #[error("step loop must be unbounded")]
    BoundedStep,
    #[error(
        "step dependencies on /{array} must be exactly i-1..i-{order}, found offsets {found:?}"
    )]
    StepDeps {
        array: String,
        order: usize,
        found: Vec<i64>,
    },
    #[error("base {0} is not a plain statement of the step's formula")]
    BaseMismatch(Location),
    #[error("the quantified formula does not match the step loop body")]
    ConclusionMismatch,
}

/// Checks that a tagged statement has the IND/GIND shape: bases at
/// `/a[1..r]`, a step loop from `r+1` whose body depends on exactly
/// `/a[i-1..i-r]`, and matching formulas throughout.
pub fn validate_induction(a: &Assignment, p: &Program) -> Result<InductionScheme, SchemeError> {
    let kind = match a.induction_tags().as_slice() {
        [] => return Err(SchemeError::NoTag),
        [t] => *t,
        _ => return Err(SchemeError::MultipleTags),
    };
    let (vars, matrix) = a.formula.choice_all_prefix();
    let [var] = vars.as_slice() else {
        return Err(SchemeError::HeadNotChoiceAll);
    };

    let mut step = None;
    let mut base_refs = Vec::new();
    for d in &a.deps {
        let Dep::Loc(r) = d else { continue };
        let resolved = r.concrete().and_then(|l| p.resolve(&l).map(|res| (l, res)));
        match resolved {
            Some((_, Resolved::LoopName { lp, .. })) => {
                if step.replace(lp).is_some() {
                    return Err(SchemeError::MultipleSteps);
                }
            }
            Some((l, _)) if l.index.is_some() => base_refs.push(l),
            _ => return Err(SchemeError::UnexpectedDep(r.to_string())),
        }
    }
    let lp = step.ok_or(SchemeError::MissingStep)?;
    let array = lp.array().to_string();
    if let Some(stray) = base_refs.iter().find(|l| l.name != array) {
        return Err(SchemeError::UnexpectedDep(stray.to_string()));
    }

    let order = base_refs.len();
    if order == 0 {
        return Err(SchemeError::MissingBase);
    }
    if kind == InductionTag::Ind && order != 1 {
        return Err(SchemeError::IndOrder(order));
    }
    let mut found: Vec<u64> = base_refs.iter().filter_map(|l| l.index).collect();
    found.sort_unstable();
    if found != (1..=order as u64).collect::<Vec<_>>() {
        return Err(SchemeError::BaseGap { order, found });
    }
    let expected = order as u64 + 1;
    if lp.lower != expected {
        return Err(SchemeError::OriginMismatch {
            lower: lp.lower,
            expected,
        });
    }
    if lp.upper != super::Upper::Infinite {
        return Err(SchemeError::BoundedStep);
    }

    let offsets: BTreeSet<i64> = lp
        .body
        .dep_locations()
        .filter(|r| r.name == array)
        .map(|r| match r.var_offset() {
            Some((v, k)) if v == lp.index_var => k,
            // literal indices into the array break the step shape
            _ => 0,
        })
        .collect();
    let wanted: BTreeSet<i64> = (1..=order as i64).map(|k| -k).collect();
    if offsets != wanted {
        return Err(SchemeError::StepDeps {
            array,
            order,
            found: offsets.into_iter().collect(),
        });
    }

    let template_at = |t: Term| {
        substitute(
            &lp.body.formula,
            &Substitution::singleton(lp.index_var.clone(), t),
        )
    };
    let mut bases: Vec<Location> = Vec::with_capacity(order);
    for k in 1..=order as u64 {
        let loc = Location::indexed(&array, k);
        match p.resolve(&loc) {
            Some(Resolved::Plain { assignment, .. })
                if alpha_eq(&assignment.formula, &template_at(Term::int(k))) =>
            {
                bases.push(loc)
            }
            _ => return Err(SchemeError::BaseMismatch(loc)),
        }
    }
    let conclusion = substitute(
        matrix,
        &Substitution::singleton(*var, Term::var(lp.index_var.clone())),
    );
    if !alpha_eq(&conclusion, &lp.body.formula) {
        return Err(SchemeError::ConclusionMismatch);
    }

    Ok(InductionScheme {
        kind,
        order,
        array,
        bases,
        step: lp.name.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::Statement;
    use crate::syntax::parse_program;

    const FIB: &str = include_str!("../../programs/fib.lp");
    const TRI: &str = include_str!("../../programs/triangle.lp");

    fn check(src: &str, target: &str) -> Result<InductionScheme, SchemeError> {
        let p = parse_program(src).unwrap();
        let a = p
            .assignments()
            .find(|(_, a)| a.target.name == target)
            .map(|(_, a)| a.clone())
            .unwrap();
        validate_induction(&a, &p)
    }

    #[test]
    fn accepts_ind() {
        let s = check(TRI, "q").unwrap();
        assert_eq!(s.kind, InductionTag::Ind);
        assert_eq!(s.order, 1);
        assert_eq!(s.bases, vec![Location::indexed("a", 1)]);
    }

    #[test]
    fn accepts_gind() {
        let s = check(FIB, "fib").unwrap();
        assert_eq!(s.kind, InductionTag::Gind);
        assert_eq!(s.order, 2);
        assert_eq!(
            s.bases,
            vec![Location::indexed("a", 1), Location::indexed("a", 2)]
        );
        assert_eq!(s.step, Location::new("istep"));
        assert_eq!(s.member(4), Location::indexed("a", 4));
    }

    #[test]
    fn gind_order_mismatch() {
        let src = FIB.replace("{GIND, /a[1], /a[2], /istep}", "{GIND, /a[1], /istep}");
        assert!(matches!(
            check(&src, "fib"),
            Err(SchemeError::OriginMismatch { .. })
        ));
    }

    #[test]
    fn untagged_statement() {
        assert_eq!(check(FIB, "query"), Err(SchemeError::NoTag));
    }

    #[test]
    fn loop_body_must_match_conclusion() {
        let src = FIB.replace("/fib = (!n. ?y. fib(n,y))", "/fib = (!n. ?y. fib(y,n))");
        assert_eq!(check(&src, "fib"), Err(SchemeError::ConclusionMismatch));
        let p = parse_program(&src).unwrap();
        assert!(matches!(p.statements[5], Statement::Loop(_)));
    }
}
