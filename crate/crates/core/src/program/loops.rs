use crate::formula::{substitute, Substitution, Term};

use super::model::{Assignment, Dep, ForLoop, LocRef};
use super::ModelError;

/// Instantiates a loop body template at `index_var = value`: index
/// expressions in the target and deps are evaluated and the index variable
/// is substituted into the formula.
pub fn instantiate(
    template: &Assignment,
    index_var: &str,
    value: u64,
) -> Result<Assignment, ModelError> {
    let concrete = |r: &LocRef| {
        r.instantiate(index_var, value)
            .map(|l| LocRef::from(&l))
            .ok_or_else(|| ModelError::IndexOutOfRange {
                reference: r.to_string(),
                value,
            })
    };
    let target = concrete(&template.target)?;
    let deps = template
        .deps
        .iter()
        .map(|d| match d {
            Dep::Loc(r) => concrete(r).map(Dep::Loc),
            other => Ok(other.clone()),
        })
        .collect::<Result<_, _>>()?;
    let formula = substitute(
        &template.formula,
        &Substitution::singleton(index_var, Term::int(value)),
    );
    Ok(Assignment {
        target,
        formula,
        deps,
        span: template.span,
    })
}

/// What remains of a loop after unfolding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Residual {
    Loop(Box<ForLoop>),
    Exhausted,
}

impl ForLoop {
    pub fn instance(&self, i: u64) -> Result<Assignment, ModelError> {
        instantiate(&self.body, &self.index_var, i)
    }
}

/// Generates the instances `lower..=k` in order together with the loop that
/// continues from `k + 1`.
pub fn unfold_loop(lp: &ForLoop, k: u64) -> Result<(Vec<Assignment>, Residual), ModelError> {
    if !lp.covers(k) {
        return Err(ModelError::IndexOutOfRange {
            reference: lp.name.to_string(),
            value: k,
        });
    }
    let instances = (lp.lower..=k)
        .map(|i| lp.instance(i))
        .collect::<Result<Vec<_>, _>>()?;
    let residual = if lp.upper.admits(k + 1) {
        Residual::Loop(Box::new(ForLoop {
            lower: k + 1,
            ..lp.clone()
        }))
    } else {
        Residual::Exhausted
    };
    Ok((instances, residual))
}
