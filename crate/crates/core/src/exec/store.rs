use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::formula::Formula;
use crate::program::{Location, Residual};
use crate::prover::Derivation;
use crate::syntax::parse_location;

/// Key of a binding. Statements headed by `!` are stored once per move
/// tuple, so `/query@4` and `/query@10` coexist; everything else has an
/// empty instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentKey {
    pub loc: Location,
    pub instance: Vec<u64>,
}

impl AgentKey {
    pub fn plain(loc: Location) -> Self {
        AgentKey {
            loc,
            instance: Vec::new(),
        }
    }

    pub fn new(loc: Location, instance: Vec<u64>) -> Self {
        AgentKey { loc, instance }
    }
}

impl fmt::Display for AgentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.loc)?;
        for (i, m) in self.instance.iter().enumerate() {
            write!(f, "{}{m}", if i == 0 { '@' } else { ',' })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("malformed agent key `{0}`")]
pub struct BadKey(pub String);

impl FromStr for AgentKey {
    type Err = BadKey;

    fn from_str(s: &str) -> Result<Self, BadKey> {
        let bad = || BadKey(s.to_string());
        let (loc, inst) = match s.split_once('@') {
            Some((l, i)) => (l, Some(i)),
            None => (s, None),
        };
        let loc = parse_location(loc).map_err(|_| bad())?;
        let instance = match inst {
            None => Vec::new(),
            Some(i) => i
                .split(',')
                .map(|m| m.parse::<u64>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?,
        };
        Ok(AgentKey { loc, instance })
    }
}

/// What a location holds after execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    /// The evolved formula: ground, no choice operators.
    pub formula: Formula,
    pub derivation: Derivation,
    /// Bindings the derivation draws on, in knowledgebase order.
    pub deps: Vec<AgentKey>,
    /// Environment moves consumed by the leading `!` quantifiers.
    pub moves: Vec<u64>,
    /// 1 if the prover ran for this binding, 0 for axioms.
    pub prover_calls: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AgentMode {
    Idle,
    Reactive,
    Proactive,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0} is already bound")]
pub struct AlreadyBound(pub AgentKey);

/// Write-once map from agent keys to bindings, plus the residual form of
/// every loop that has been unfolded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AgentStore {
    bindings: BTreeMap<AgentKey, Binding>,
    residuals: BTreeMap<Location, Residual>,
    calls: Vec<AgentKey>,
    modes: Vec<(AgentKey, AgentMode)>,
}

impl AgentStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &AgentKey) -> Option<&Binding> {
        self.bindings.get(key)
    }

    /// Binding of a location without moves.
    pub fn get_loc(&self, loc: &Location) -> Option<&Binding> {
        self.bindings.get(&AgentKey::plain(loc.clone()))
    }

    pub fn contains(&self, key: &AgentKey) -> bool {
        self.bindings.contains_key(key)
    }

    pub fn insert(&mut self, key: AgentKey, b: Binding) -> Result<(), AlreadyBound> {
        if self.bindings.contains_key(&key) {
            return Err(AlreadyBound(key));
        }
        self.bindings.insert(key, b);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AgentKey, &Binding)> {
        self.bindings.iter()
    }

    /// The loop `name` as left after unfolding, if it was ever unfolded.
    pub fn residual(&self, name: &Location) -> Option<&Residual> {
        self.residuals.get(name)
    }

    pub(crate) fn set_residual(&mut self, name: Location, r: Residual) {
        self.residuals.insert(name, r);
    }

    pub fn residuals(&self) -> impl Iterator<Item = (&Location, &Residual)> {
        self.residuals.iter()
    }

    /// Total prover invocations over the store's lifetime.
    pub fn prover_calls(&self) -> u64 {
        self.calls.len() as u64
    }

    /// Keys whose resolution invoked the prover, in call order.
    pub fn call_log(&self) -> &[AgentKey] {
        &self.calls
    }

    pub(crate) fn record_call(&mut self, key: AgentKey) {
        self.calls.push(key);
    }

    /// Mode transitions in order.
    pub fn mode_log(&self) -> &[(AgentKey, AgentMode)] {
        &self.modes
    }

    pub(crate) fn set_mode(&mut self, key: AgentKey, m: AgentMode) {
        self.modes.push((key, m));
    }

    /// Current mode of a key according to the log.
    pub fn mode_of(&self, key: &AgentKey) -> AgentMode {
        self.modes
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, m)| *m)
            .unwrap_or(AgentMode::Idle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_round_trip() {
        for s in ["/x", "/query@4", "/a[3]", "/q@4,5"] {
            let k: AgentKey = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("/q@x".parse::<AgentKey>().is_err());
        assert!("q".parse::<AgentKey>().is_err());
    }

    #[test]
    fn write_once() {
        let mut s = AgentStore::new();
        let k = AgentKey::plain(Location::new("x"));
        let b = Binding {
            formula: Formula::Truth,
            derivation: Derivation::Truth,
            deps: vec![],
            moves: vec![],
            prover_calls: 0,
        };
        s.insert(k.clone(), b.clone()).unwrap();
        assert_eq!(s.insert(k.clone(), b), Err(AlreadyBound(k)));
        assert_eq!(s.len(), 1);
    }
}
