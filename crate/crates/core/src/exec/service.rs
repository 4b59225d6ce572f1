use crate::formula::{Atom, Formula, Substitution, Term};
use crate::prover::{canonical, is_flex, unify, ConstraintStore, Goal};

/// Atoms a query formula asks for, candidates of a `#|` included.
pub(crate) fn goal_atoms(matrix: &Formula) -> Vec<Atom> {
    match Goal::from_formula(matrix) {
        Ok(Goal::Conj { atoms, .. }) => atoms,
        Ok(Goal::ChoicePick(cs)) => cs
            .into_iter()
            .flat_map(|c| match c {
                Goal::Conj { atoms, .. } => atoms,
                Goal::ChoicePick(_) => Vec::new(),
            })
            .collect(),
        Err(_) => Vec::new(),
    }
}

/// Values for the leading `!` variables of `service` under which one of
/// its atoms unifies with one of `goal`. Goal atoms are tried in order,
/// then service atoms; the first match whose values are fully determined
/// wins. This is how a query hands its sub-question to the agent it
/// depends on: `fib(4,w)` against `!n. ?y. fib(n,y)` gives `n = 4`.
pub(crate) fn service_instance(goal: &[Atom], service: &Formula) -> Option<Vec<Term>> {
    let (vars, matrix) = service.choice_all_prefix();
    if vars.is_empty() {
        return None;
    }
    let mut bound = std::collections::BTreeSet::new();
    matrix.all_vars(&mut bound);
    bound.extend(vars.iter().map(|v| v.to_string()));
    // Primed copies keep the service's variables apart from the goal's.
    let prime: Substitution = bound
        .iter()
        .map(|v| (v.clone(), Term::var(format!("{v}'"))))
        .collect();
    let offered = goal_atoms(matrix);
    for g in goal {
        for s in &offered {
            let s = prime.apply_atom(s);
            let Ok((theta, _)) = unify(g, &s, &Substitution::new(), &ConstraintStore::default())
            else {
                continue;
            };
            let values: Option<Vec<Term>> = vars
                .iter()
                .map(|v| {
                    let t = canonical(&theta.apply_term(&Term::var(format!("{v}'"))));
                    let mut vs = std::collections::BTreeSet::new();
                    t.collect_vars(&mut vs);
                    vs.iter().all(|v| !is_flex(v)).then_some(t)
                })
                .collect();
            if values.is_some() {
                return values;
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_formula};

    #[test]
    fn query_selects_service_instance() {
        let svc = parse_formula("!n. ?y. fib(n,y)").unwrap();
        let goal = [parse_atom("fib(4,w)").unwrap()];
        assert_eq!(service_instance(&goal, &svc), Some(vec![Term::int(4)]));
    }

    #[test]
    fn rigid_instance() {
        let svc = parse_formula("!n. ?y. fib(n,y)").unwrap();
        let goal = [Atom::new("fib", vec![Term::var("$x"), Term::var("w")])];
        assert_eq!(service_instance(&goal, &svc), Some(vec![Term::var("$x")]));
    }

    #[test]
    fn undetermined_or_unrelated() {
        let svc = parse_formula("!n. ?y. fib(n,y)").unwrap();
        assert_eq!(
            service_instance(&[parse_atom("fib(w,4)").unwrap()], &svc),
            None
        );
        assert_eq!(
            service_instance(&[parse_atom("tri(4,w)").unwrap()], &svc),
            None
        );
        let plain = parse_formula("fib(1,1)").unwrap();
        assert_eq!(
            service_instance(&[parse_atom("fib(1,w)").unwrap()], &plain),
            None
        );
    }
}
