//! Game arenas: states, actions, weighted transitions and an observation partition.

use std::collections::{BTreeSet, HashMap};

use crate::error::{MpgError, Result};

pub type StateId = usize;
pub type ActionId = usize;
pub type ObsId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub src: StateId,
    pub action: ActionId,
    pub dst: StateId,
    pub weight: i64,
}

/// A finite mean-payoff arena. Immutable once built; ids are dense indices
/// in declaration order and all tie-breaking elsewhere uses them.
#[derive(Clone, Debug)]
pub struct Game {
    name: String,
    states: Vec<String>,
    actions: Vec<String>,
    obs_names: Vec<String>,
    observations: Vec<Vec<StateId>>,
    obs_of: Vec<ObsId>,
    initial: StateId,
    transitions: Vec<Transition>,
    succ: Vec<Vec<Vec<(StateId, i64)>>>,
}

/// Outcome of the limited-observation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Limited {
    Yes,
    /// `{q_I}` is not an observation.
    InitialNotSingleton,
    /// `post_σ(o)` cuts through some observation.
    Split { obs: ObsId, action: ActionId },
}

impl Limited {
    pub fn is_limited(&self) -> bool {
        matches!(self, Limited::Yes)
    }
}

impl Game {
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        actions: Vec<String>,
        observations: Vec<(String, Vec<StateId>)>,
        initial: StateId,
        transitions: Vec<Transition>,
    ) -> Result<Game> {
        let n = states.len();
        if n == 0 {
            return Err(MpgError::Model("no states".into()));
        }
        if actions.is_empty() {
            return Err(MpgError::Model("no actions".into()));
        }
        check_unique("state", &states)?;
        check_unique("action", &actions)?;
        let obs_name_list: Vec<String> = observations.iter().map(|(n, _)| n.clone()).collect();
        check_unique("observation", &obs_name_list)?;
        if initial >= n {
            return Err(MpgError::Model(format!("initial state index {initial} out of range")));
        }

        let mut obs_of = vec![usize::MAX; n];
        let mut obs_sets = Vec::with_capacity(observations.len());
        for (o, (oname, members)) in observations.iter().enumerate() {
            if members.is_empty() {
                return Err(MpgError::Partition(format!("observation {oname} is empty")));
            }
            let mut sorted = members.clone();
            sorted.sort_unstable();
            for &q in &sorted {
                if q >= n {
                    return Err(MpgError::Model(format!("observation {oname} names unknown state")));
                }
                if obs_of[q] != usize::MAX {
                    return Err(MpgError::Partition(format!(
                        "state {} appears in more than one observation",
                        states[q]
                    )));
                }
                obs_of[q] = o;
            }
            obs_sets.push(sorted);
        }
        if let Some(q) = obs_of.iter().position(|&o| o == usize::MAX) {
            return Err(MpgError::Partition(format!("state {} is in no observation", states[q])));
        }

        let mut succ = vec![vec![Vec::new(); actions.len()]; n];
        let mut seen: HashMap<(StateId, ActionId, StateId), i64> = HashMap::new();
        let mut trans = transitions;
        trans.sort();
        trans.dedup();
        for t in &trans {
            if t.src >= n || t.dst >= n {
                return Err(MpgError::Model("transition endpoint out of range".into()));
            }
            if t.action >= actions.len() {
                return Err(MpgError::Model("transition action out of range".into()));
            }
            if let Some(&w) = seen.get(&(t.src, t.action, t.dst)) {
                return Err(MpgError::Model(format!(
                    "transition ({}, {}, {}) has two weights {} and {}",
                    states[t.src], actions[t.action], states[t.dst], w, t.weight
                )));
            }
            seen.insert((t.src, t.action, t.dst), t.weight);
            succ[t.src][t.action].push((t.dst, t.weight));
        }
        for (q, row) in succ.iter().enumerate() {
            for (a, targets) in row.iter().enumerate() {
                if targets.is_empty() {
                    return Err(MpgError::NotTotal {
                        state: states[q].clone(),
                        action: actions[a].clone(),
                    });
                }
            }
        }

        Ok(Game {
            name: name.into(),
            states,
            actions,
            obs_names: obs_name_list,
            observations: obs_sets,
            obs_of,
            initial,
            transitions: trans,
            succ,
        })
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn num_states(&self) -> usize {
        self.states.len()
    }
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
    pub fn num_obs(&self) -> usize {
        self.observations.len()
    }
    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }
    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a]
    }
    pub fn obs_name(&self, o: ObsId) -> &str {
        &self.obs_names[o]
    }
    pub fn state_names(&self) -> &[String] {
        &self.states
    }
    pub fn action_names(&self) -> &[String] {
        &self.actions
    }
    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }
    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|s| s == name)
    }
    pub fn obs_id(&self, name: &str) -> Option<ObsId> {
        self.obs_names.iter().position(|s| s == name)
    }
    /// Observation whose members are exactly `set` (sorted).
    pub fn obs_with_states(&self, set: &[StateId]) -> Option<ObsId> {
        set.first()
            .map(|&q| self.obs_of[q])
            .filter(|&o| self.observations[o] == set)
    }
    pub fn initial(&self) -> StateId {
        self.initial
    }
    pub fn initial_obs(&self) -> ObsId {
        self.obs_of[self.initial]
    }
    pub fn observation(&self, o: ObsId) -> &[StateId] {
        &self.observations[o]
    }
    pub fn observations(&self) -> &[Vec<StateId>] {
        &self.observations
    }
    pub fn obs_of(&self, q: StateId) -> ObsId {
        self.obs_of[q]
    }
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }
    /// Targets of `(q, a)` with weights, sorted by target.
    pub fn successors(&self, q: StateId, a: ActionId) -> &[(StateId, i64)] {
        &self.succ[q][a]
    }
    pub fn weight(&self, q: StateId, a: ActionId, q2: StateId) -> Option<i64> {
        self.succ[q][a].iter().find(|(d, _)| *d == q2).map(|(_, w)| *w)
    }
    pub fn max_abs_weight(&self) -> i64 {
        self.transitions.iter().map(|t| t.weight.abs()).max().unwrap_or(0)
    }

    pub fn check_action(&self, a: ActionId) -> Result<()> {
        if a < self.actions.len() {
            Ok(())
        } else {
            Err(MpgError::UnknownName(format!("action #{a}")))
        }
    }

    /// `post_σ(s)` as a sorted state list.
    pub fn post(&self, set: &[StateId], a: ActionId) -> Result<Vec<StateId>> {
        self.check_action(a)?;
        let mut out = BTreeSet::new();
        for &q in set {
            for &(d, _) in &self.succ[q][a] {
                out.insert(d);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Observations met by `post_σ(o)`, ascending.
    pub fn post_obs(&self, o: ObsId, a: ActionId) -> Vec<ObsId> {
        let mut out = BTreeSet::new();
        for &q in &self.observations[o] {
            for &(d, _) in &self.succ[q][a] {
                out.insert(self.obs_of[d]);
            }
        }
        out.into_iter().collect()
    }

    pub fn check_limited(&self) -> Limited {
        if self.observations[self.initial_obs()].len() != 1 {
            return Limited::InitialNotSingleton;
        }
        for o in 0..self.num_obs() {
            for a in 0..self.num_actions() {
                let post = self.post(&self.observations[o], a).expect("valid action");
                for o2 in self.post_obs(o, a) {
                    let covered = self.observations[o2]
                        .iter()
                        .all(|q| post.binary_search(q).is_ok());
                    if !covered {
                        return Limited::Split { obs: o, action: a };
                    }
                }
            }
        }
        Limited::Yes
    }

    pub fn require_limited(&self) -> Result<()> {
        match self.check_limited() {
            Limited::Yes => Ok(()),
            Limited::InitialNotSingleton => Err(MpgError::NotLimited(format!(
                "initial state {} is not alone in its observation",
                self.state_name(self.initial)
            ))),
            Limited::Split { obs, action } => Err(MpgError::NotLimited(format!(
                "post of {} under {} splits an observation",
                self.obs_name(obs),
                self.action_name(action)
            ))),
        }
    }

    /// Replace every weight `w` by `den·w − num`, so that threshold `num/den`
    /// becomes threshold 0.
    pub fn shift_threshold(&self, num: i64, den: i64) -> Result<Game> {
        if den < 1 {
            return Err(MpgError::Invalid("threshold denominator must be positive".into()));
        }
        let mut trans = Vec::with_capacity(self.transitions.len());
        for t in &self.transitions {
            let w = den
                .checked_mul(t.weight)
                .and_then(|x| x.checked_sub(num))
                .ok_or(MpgError::Overflow)?;
            trans.push(Transition { weight: w, ..*t });
        }
        self.with_transitions(trans)
    }

    /// Same arena with a different transition list.
    pub fn with_transitions(&self, transitions: Vec<Transition>) -> Result<Game> {
        Game::new(
            self.name.clone(),
            self.states.clone(),
            self.actions.clone(),
            self.obs_names
                .iter()
                .cloned()
                .zip(self.observations.iter().cloned())
                .collect(),
            self.initial,
            transitions,
        )
    }

    /// Same arena with a different observation partition.
    pub fn with_observations(&self, observations: Vec<(String, Vec<StateId>)>) -> Result<Game> {
        Game::new(
            self.name.clone(),
            self.states.clone(),
            self.actions.clone(),
            observations,
            self.initial,
            self.transitions.clone(),
        )
    }
}

fn check_unique(kind: &str, names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(MpgError::Model(format!("duplicate {kind} name {n}")));
        }
    }
    Ok(())
}

/// Name-based builder used by generators and tests.
#[derive(Default)]
pub struct GameBuilder {
    name: String,
    states: Vec<String>,
    actions: Vec<String>,
    obs: Vec<(String, Vec<StateId>)>,
    initial: StateId,
    trans: Vec<Transition>,
}

impl GameBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        GameBuilder { name: name.into(), ..Default::default() }
    }
    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        self.states.push(name.into());
        self.states.len() - 1
    }
    pub fn action(&mut self, name: impl Into<String>) -> ActionId {
        self.actions.push(name.into());
        self.actions.len() - 1
    }
    pub fn observation(&mut self, name: impl Into<String>, members: Vec<StateId>) -> ObsId {
        self.obs.push((name.into(), members));
        self.obs.len() - 1
    }
    pub fn initial(&mut self, q: StateId) {
        self.initial = q;
    }
    pub fn trans(&mut self, src: StateId, action: ActionId, dst: StateId, weight: i64) {
        self.trans.push(Transition { src, action, dst, weight });
    }
    /// Add `src -σ-> dst` for every action declared so far.
    pub fn trans_all(&mut self, src: StateId, dst: StateId, weight: i64) {
        for a in 0..self.actions.len() {
            self.trans(src, a, dst, weight);
        }
    }
    pub fn has_trans(&self, src: StateId, action: ActionId) -> bool {
        self.trans.iter().any(|t| t.src == src && t.action == action)
    }
    pub fn num_states(&self) -> usize {
        self.states.len()
    }
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
    pub fn build(self) -> Result<Game> {
        Game::new(self.name, self.states, self.actions, self.obs, self.initial, self.trans)
    }
}
