//! Running programs: the agent store, move sources, and the machine that
//! evolves statements into ground bindings.

mod moves;
mod run;
pub(crate) mod service;
mod store;

use std::collections::BTreeSet;

use crate::program::Program;
use crate::trace::{fingerprint, Trace, TraceNode};

pub use moves::{Interactive, MoveScript, MoveSource};
pub use run::{execute, run_query, ExecConfig, ExecError, Outcome, Status};
pub use store::{AgentKey, AgentMode, AgentStore, AlreadyBound, BadKey, Binding};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0} is not bound")]
pub struct UnboundLocation(pub AgentKey);

/// Collects the bindings `root` rests on, dependencies before dependants.
pub fn emit_trace(
    store: &AgentStore,
    p: &Program,
    root: &AgentKey,
) -> Result<Trace, UnboundLocation> {
    let mut nodes = Vec::new();
    let mut seen = BTreeSet::new();
    // Iterative post-order over the dependency edges.
    let mut stack: Vec<(AgentKey, usize)> = vec![(root.clone(), 0)];
    seen.insert(root.clone());
    while let Some((key, next)) = stack.pop() {
        let b = store
            .get(&key)
            .ok_or_else(|| UnboundLocation(key.clone()))?;
        if let Some(d) = b.deps.get(next) {
            stack.push((key.clone(), next + 1));
            if seen.insert(d.clone()) {
                stack.push((d.clone(), 0));
            }
        } else {
            nodes.push(TraceNode {
                key,
                formula: b.formula.clone(),
                deps: b.deps.clone(),
                moves: b.moves.clone(),
                derivation: b.derivation.clone(),
            });
        }
    }
    Ok(Trace {
        program: fingerprint(p),
        root: root.clone(),
        nodes,
    })
}
