use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{substitute, Formula, Substitution, Term};
use crate::program::{
    dependency_order, unfold_loop, validate_induction, Assignment, ForLoop, Location, ModelError,
    Program, Residual, Resolved,
};
use crate::prover::{canonical, derive, Derivation, Goal, KnowledgeBase, ProveError, SearchLimits};
use crate::wf::{self, Diagnostic, Severity, WfVerdict};

use super::moves::MoveSource;
use super::service::{goal_atoms, service_instance};
use super::store::{AgentKey, AgentMode, AgentStore, Binding};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecConfig {
    pub limits: SearchLimits,
    /// Highest loop index that may be unfolded.
    pub max_unfold: u64,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            limits: SearchLimits::default(),
            max_unfold: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    Failure,
    WellFormednessViolation,
    LimitExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    /// Key and evolved formula of the target on success.
    pub binding: Option<(AgentKey, Formula)>,
    /// The agent whose resolution stopped the run.
    pub failed_at: Option<AgentKey>,
    pub reason: Option<String>,
}

impl Outcome {
    pub fn is_success(&self) -> bool {
        self.status == Status::Success
    }

    pub fn key(&self) -> Option<&AgentKey> {
        self.binding.as_ref().map(|(k, _)| k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExecError {
    #[error("unknown location {0}")]
    UnknownLocation(Location),
    #[error("{0} names a loop, not an agent")]
    NotAnAgent(Location),
    #[error("no move available for `{var}` of {loc}")]
    MoveUnderflow { loc: Location, var: String },
    #[error("the program has {} structural error(s)", .0.len())]
    Structural(Vec<Diagnostic>),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Model(ModelError),
}

impl From<ModelError> for ExecError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownLocation(l) => ExecError::UnknownLocation(l),
            ModelError::NotAnAgent(l) => ExecError::NotAnAgent(l),
            other => ExecError::Model(other),
        }
    }
}

/// Why resolution of an agent stopped short.
#[derive(Debug)]
enum Interrupt {
    Halt {
        status: Status,
        at: AgentKey,
        reason: String,
    },
    Error(ExecError),
}

impl<E: Into<ExecError>> From<E> for Interrupt {
    fn from(e: E) -> Self {
        Interrupt::Error(e.into())
    }
}

fn halt(status: Status, at: &AgentKey, reason: impl Into<String>) -> Interrupt {
    Interrupt::Halt {
        status,
        at: at.clone(),
        reason: reason.into(),
    }
}

struct Machine<'a> {
    p: &'a Program,
    store: &'a mut AgentStore,
    moves: &'a mut dyn MoveSource,
    cfg: &'a ExecConfig,
    verdicts: &'a BTreeMap<usize, WfVerdict>,
}

fn natural(t: &Term) -> Option<u64> {
    match canonical(t) {
        Term::Int(n) => u64::try_from(n).ok(),
        _ => None,
    }
}

impl Machine<'_> {
    fn run(
        &mut self,
        loc: &Location,
        supplied: Option<Vec<u64>>,
        mode: AgentMode,
    ) -> Result<AgentKey, Interrupt> {
        let resolved = self
            .p
            .resolve(loc)
            .ok_or_else(|| ExecError::UnknownLocation(loc.clone()))?;
        if let Resolved::LoopName { lp, .. } = resolved {
            return Err(ExecError::NotAnAgent(lp.name.clone()).into());
        }
        let stmt = resolved.stmt();
        let member = matches!(resolved, Resolved::Member { .. });
        let a = resolved.assignment()?.into_owned();
        let (vars, _) = a.formula.choice_all_prefix();
        let vars: Vec<String> = vars.into_iter().map(String::from).collect();
        let moves = match supplied {
            Some(m) => m,
            None => {
                let mut m = Vec::with_capacity(vars.len());
                for v in &vars {
                    let c = self
                        .moves
                        .next_move(v)
                        .ok_or_else(|| ExecError::MoveUnderflow {
                            loc: loc.clone(),
                            var: v.clone(),
                        })?;
                    m.push(c);
                }
                m
            }
        };
        let key = AgentKey::new(loc.clone(), moves.clone());
        if self.store.contains(&key) {
            return Ok(key);
        }
        if member && loc.index.is_some_and(|k| k > self.cfg.max_unfold) {
            return Err(halt(
                Status::LimitExhausted,
                &key,
                format!("loop index exceeds the unfold cap {}", self.cfg.max_unfold),
            ));
        }
        if let Some(WfVerdict::NotWellFormed(d)) = self.verdicts.get(&stmt) {
            return Err(halt(
                Status::WellFormednessViolation,
                &key,
                d.message.clone(),
            ));
        }
        self.store.set_mode(key.clone(), mode);
        let r = self.evolve(loc, &a, &vars, &moves, &key);
        self.store.set_mode(key.clone(), AgentMode::Idle);
        r.map(|()| key)
    }

    fn evolve(
        &mut self,
        loc: &Location,
        a: &Assignment,
        vars: &[String],
        moves: &[u64],
        key: &AgentKey,
    ) -> Result<(), Interrupt> {
        self.prerequisites(loc, key)?;
        let choice: Substitution = vars
            .iter()
            .zip(moves)
            .map(|(v, m)| (v.clone(), Term::int(*m)))
            .collect();
        let (_, matrix) = a.formula.choice_all_prefix();
        let matrix = substitute(matrix, &choice);

        if a.is_axiom() && !matrix.has_choice() {
            let (formula, derivation) = match &matrix {
                Formula::Atomic(at) => {
                    let at = at.map_terms(canonical);
                    let d = Derivation::Fact {
                        source: loc.clone(),
                        atom: at.clone(),
                    };
                    (Formula::Atomic(at), d)
                }
                other => (
                    other.clone(),
                    Derivation::Axiom {
                        source: loc.clone(),
                    },
                ),
            };
            let b = Binding {
                formula,
                derivation,
                deps: Vec::new(),
                moves: moves.to_vec(),
                prover_calls: 0,
            };
            self.store.insert(key.clone(), b).expect("checked unbound");
            return Ok(());
        }

        let (kb, deps) = if a.induction_tags().is_empty() {
            self.knowledge(a, &matrix)?
        } else {
            self.dispatch(a, moves, key)?
        };
        let goal = Goal::from_formula(&matrix)
            .map_err(|e| ExecError::Unsupported(format!("{key}: {e}")))?;
        self.store.record_call(key.clone());
        match derive(&goal, &kb, self.cfg.limits) {
            Ok(proof) => {
                let b = Binding {
                    formula: goal.evolve(&proof),
                    derivation: proof.derivation,
                    deps,
                    moves: moves.to_vec(),
                    prover_calls: 1,
                };
                self.store.insert(key.clone(), b).expect("checked unbound");
                Ok(())
            }
            Err(ProveError::NotDerivable) => Err(halt(
                Status::Failure,
                key,
                format!("{matrix} does not follow from its dependencies"),
            )),
            Err(ProveError::BoundExhausted) => Err(halt(
                Status::LimitExhausted,
                key,
                format!("search limits reached while resolving {matrix}"),
            )),
            Err(e @ ProveError::Unsupported { .. }) => {
                Err(ExecError::Unsupported(format!("{key}: {e}")).into())
            }
        }
    }

    /// Step 1 unfolds every loop up to the highest member needed; step 2
    /// executes the required locations in dependency order. Agents headed
    /// by `!` that some statement depends on are skipped here: they are
    /// invoked reactively once the instance they must serve is known.
    fn prerequisites(&mut self, loc: &Location, key: &AgentKey) -> Result<(), Interrupt> {
        let order = dependency_order(self.p, loc)?;
        let mut needed: BTreeMap<Location, (ForLoop, u64)> = BTreeMap::new();
        for l in &order {
            if let Some(Resolved::Member { lp, index, .. }) = self.p.resolve(l) {
                if index > self.cfg.max_unfold {
                    return Err(halt(
                        Status::LimitExhausted,
                        key,
                        format!("{l} exceeds the unfold cap {}", self.cfg.max_unfold),
                    ));
                }
                let e = needed.entry(lp.name.clone()).or_insert((lp.clone(), index));
                e.1 = e.1.max(index);
            }
        }
        for (name, (lp, k)) in needed {
            self.unfold(name, &lp, k)?;
        }

        let mut reactive = BTreeSet::new();
        for l in &order {
            for d in self.p.assignment_at(l)?.dep_locations() {
                if let Some(c) = d.concrete() {
                    reactive.insert(c);
                }
            }
        }
        for l in &order[..order.len() - 1] {
            if self.p.assignment_at(l)?.is_service() && reactive.contains(l) {
                continue;
            }
            self.run(l, None, AgentMode::Reactive)?;
        }
        Ok(())
    }

    fn unfold(&mut self, name: Location, lp: &ForLoop, k: u64) -> Result<(), Interrupt> {
        let current = match self.store.residual(&name) {
            None => lp.clone(),
            Some(Residual::Exhausted) => return Ok(()),
            Some(Residual::Loop(r)) if r.lower > k => return Ok(()),
            Some(Residual::Loop(r)) => (**r).clone(),
        };
        let (_, residual) = unfold_loop(&current, k)?;
        self.store.set_residual(name, residual);
        Ok(())
    }

    fn bound(&self, key: &AgentKey) -> Formula {
        self.store.get(key).expect("bound by run").formula.clone()
    }

    fn knowledge(
        &mut self,
        a: &Assignment,
        matrix: &Formula,
    ) -> Result<(KnowledgeBase, Vec<AgentKey>), Interrupt> {
        let wanted = goal_atoms(matrix);
        let mut kb = KnowledgeBase::new();
        let mut deps = Vec::new();
        for r in a.dep_locations() {
            let l = r.concrete().ok_or_else(|| ModelError::IndexOutOfRange {
                reference: r.to_string(),
                value: 0,
            })?;
            match self.p.resolve(&l) {
                None => return Err(ExecError::UnknownLocation(l).into()),
                Some(Resolved::LoopName { .. }) => continue,
                Some(_) => {}
            }
            let da = self.p.assignment_at(&l)?.into_owned();
            let k = if da.is_service() {
                let inst = service_instance(&wanted, &da.formula)
                    .and_then(|ts| ts.iter().map(natural).collect::<Option<Vec<u64>>>());
                let Some(inst) = inst else { continue };
                self.run(&l, Some(inst), AgentMode::Reactive)?
            } else {
                self.run(&l, None, AgentMode::Reactive)?
            };
            kb.push(l, self.bound(&k));
            deps.push(k);
        }
        Ok((kb, deps))
    }

    /// An induction-tagged agent given move `n` delegates to `/a[n]`.
    fn dispatch(
        &mut self,
        a: &Assignment,
        moves: &[u64],
        key: &AgentKey,
    ) -> Result<(KnowledgeBase, Vec<AgentKey>), Interrupt> {
        let scheme = validate_induction(a, self.p)
            .map_err(|e| halt(Status::WellFormednessViolation, key, e.to_string()))?;
        let n = moves[0];
        let member = scheme.member(n);
        if n == 0 || self.p.resolve(&member).is_none() {
            return Err(halt(Status::Failure, key, format!("no instance {member}")));
        }
        let k = self.run(&member, None, AgentMode::Reactive)?;
        let mut kb = KnowledgeBase::new();
        kb.push(member, self.bound(&k));
        Ok((kb, vec![k]))
    }
}

/// Executes `target` against `store`. Locations already bound are reused
/// without calling the prover; failures leave every binding made on the
/// way in place.
pub fn execute(
    store: &mut AgentStore,
    p: &Program,
    target: &Location,
    moves: &mut dyn MoveSource,
    cfg: &ExecConfig,
) -> Result<Outcome, ExecError> {
    if p.resolve(target).is_none() {
        return Err(ExecError::UnknownLocation(target.clone()));
    }
    let errors: Vec<Diagnostic> = wf::check_structural(p)
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .collect();
    if !errors.is_empty() {
        return Err(ExecError::Structural(errors));
    }
    let verdicts = wf::statement_verdicts(p, cfg.limits);
    let mut m = Machine {
        p,
        store,
        moves,
        cfg,
        verdicts: &verdicts,
    };
    match m.run(target, None, AgentMode::Proactive) {
        Ok(key) => {
            let formula = m.bound(&key);
            Ok(Outcome {
                status: Status::Success,
                binding: Some((key, formula)),
                failed_at: None,
                reason: None,
            })
        }
        Err(Interrupt::Halt { status, at, reason }) => Ok(Outcome {
            status,
            binding: None,
            failed_at: Some(at),
            reason: Some(reason),
        }),
        Err(Interrupt::Error(e)) => Err(e),
    }
}

/// [`execute`] on a fresh store.
pub fn run_query(
    p: &Program,
    target: &Location,
    moves: &mut dyn MoveSource,
    cfg: &ExecConfig,
) -> (AgentStore, Result<Outcome, ExecError>) {
    let mut store = AgentStore::new();
    let r = execute(&mut store, p, target, moves, cfg);
    (store, r)
}
