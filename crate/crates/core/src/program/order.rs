use std::collections::{BTreeMap, BTreeSet};

use super::model::{Location, Program, Statement};
use super::{ModelError, Resolved};

/// Locations that must be executed before `loc`: its location deps (loop
/// names excluded) and, for `/x = F; /y = G`, the statement sequenced before.
pub(crate) fn prerequisites(p: &Program, loc: &Location) -> Result<Vec<Location>, ModelError> {
    let resolved = p
        .resolve(loc)
        .ok_or_else(|| ModelError::UnknownLocation(loc.clone()))?;
    let assignment = resolved.assignment()?;
    let mut out = Vec::new();
    if let Resolved::Plain { stmt, .. } = resolved {
        if stmt > 0 && p.chained[stmt - 1] {
            if let Statement::Assign(prev) = &p.statements[stmt - 1] {
                if let Some(l) = prev.target.concrete() {
                    out.push(l);
                }
            }
        }
    }
    for r in assignment.dep_locations() {
        let dep = r.concrete().ok_or_else(|| ModelError::IndexOutOfRange {
            reference: r.to_string(),
            value: loc.index.unwrap_or(0),
        })?;
        match p.resolve(&dep) {
            None => return Err(ModelError::UnknownLocation(dep)),
            Some(Resolved::LoopName { .. }) => {}
            Some(_) => {
                if !out.contains(&dep) {
                    out.push(dep)
                }
            }
        }
    }
    Ok(out)
}

/// Topological order of every location transitively required by `target`,
/// ending with `target` itself. Ties go to the earlier statement, then the
/// lower index.
pub fn dependency_order(p: &Program, target: &Location) -> Result<Vec<Location>, ModelError> {
    match p.resolve(target) {
        None => return Err(ModelError::UnknownLocation(target.clone())),
        Some(Resolved::LoopName { lp, .. }) => return Err(ModelError::NotAnAgent(lp.name.clone())),
        Some(_) => {}
    }

    // Iterative DFS collecting the closure and detecting cycles.
    let mut edges: BTreeMap<Location, Vec<Location>> = BTreeMap::new();
    let mut on_path: Vec<Location> = Vec::new();
    let mut done: BTreeSet<Location> = BTreeSet::new();
    let mut stack: Vec<(Location, usize)> = vec![(target.clone(), 0)];
    on_path.push(target.clone());
    edges.insert(target.clone(), prerequisites(p, target)?);
    while let Some((node, next)) = stack.pop() {
        let succ = &edges[&node];
        if next < succ.len() {
            let child = succ[next].clone();
            stack.push((node, next + 1));
            if let Some(pos) = on_path.iter().position(|l| *l == child) {
                let mut cycle = on_path[pos..].to_vec();
                cycle.push(child);
                return Err(ModelError::Cycle(cycle));
            }
            if done.contains(&child) {
                continue;
            }
            if !edges.contains_key(&child) {
                let pre = prerequisites(p, &child)?;
                edges.insert(child.clone(), pre);
            }
            on_path.push(child.clone());
            stack.push((child, 0));
        } else {
            on_path.pop();
            done.insert(node);
        }
    }

    // Kahn's algorithm with a deterministic priority.
    let key = |l: &Location| {
        let stmt = p.resolve(l).map(|r| r.stmt()).unwrap_or(usize::MAX);
        (stmt, l.index.unwrap_or(0), l.name.clone())
    };
    let mut indegree: BTreeMap<&Location, usize> = edges.keys().map(|l| (l, 0)).collect();
    let mut users: BTreeMap<&Location, Vec<&Location>> = BTreeMap::new();
    for (l, pre) in &edges {
        *indegree.get_mut(l).unwrap() = pre.len();
        for d in pre {
            users.entry(d).or_default().push(l);
        }
    }
    let mut ready: BTreeSet<((usize, u64, String), &Location)> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(l, _)| (key(l), *l))
        .collect();
    let mut out = Vec::with_capacity(edges.len());
    while let Some(first) = ready.iter().next().cloned() {
        ready.remove(&first);
        let l = first.1;
        out.push(l.clone());
        for u in users.get(l).into_iter().flatten() {
            let d = indegree.get_mut(u).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.insert((key(u), u));
            }
        }
    }
    Ok(out)
}
