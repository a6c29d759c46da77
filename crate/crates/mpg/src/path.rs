//! Abstract (observation) and concrete (state) paths.

use crate::error::{MpgError, Result};
use crate::game::{ActionId, Game, ObsId, StateId};

/// `o₀σ₀o₁…oₙ`; `obs.len() == actions.len() + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbstractPath {
    pub obs: Vec<ObsId>,
    pub actions: Vec<ActionId>,
}

/// `q₀σ₀q₁…qₙ`; `states.len() == actions.len() + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConcretePath {
    pub states: Vec<StateId>,
    pub actions: Vec<ActionId>,
}

impl AbstractPath {
    pub fn single(o: ObsId) -> Self {
        AbstractPath { obs: vec![o], actions: vec![] }
    }

    pub fn new(obs: Vec<ObsId>, actions: Vec<ActionId>) -> Result<Self> {
        if obs.len() != actions.len() + 1 {
            return Err(MpgError::InvalidPath("observation/action count mismatch".into()));
        }
        Ok(AbstractPath { obs, actions })
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn first(&self) -> ObsId {
        self.obs[0]
    }

    pub fn last(&self) -> ObsId {
        *self.obs.last().unwrap()
    }

    pub fn is_cycle(&self) -> bool {
        !self.is_empty() && self.first() == self.last()
    }

    pub fn push(&mut self, a: ActionId, o: ObsId) {
        self.actions.push(a);
        self.obs.push(o);
    }

    /// Each step admits at least one transition between the two observations.
    pub fn validate(&self, g: &Game) -> Result<()> {
        if self.obs.len() != self.actions.len() + 1 {
            return Err(MpgError::InvalidPath("observation/action count mismatch".into()));
        }
        for &o in &self.obs {
            if o >= g.num_obs() {
                return Err(MpgError::InvalidPath(format!("unknown observation #{o}")));
            }
        }
        for (i, &a) in self.actions.iter().enumerate() {
            g.check_action(a)?;
            let (o, o2) = (self.obs[i], self.obs[i + 1]);
            let ok = g
                .observation(o)
                .iter()
                .any(|&q| g.successors(q, a).iter().any(|&(d, _)| g.obs_of(d) == o2));
            if !ok {
                return Err(MpgError::InvalidPath(format!(
                    "no {} transition from {} to {}",
                    g.action_name(a),
                    g.obs_name(o),
                    g.obs_name(o2)
                )));
            }
        }
        Ok(())
    }

    pub fn render(&self, g: &Game) -> String {
        let mut s = g.obs_name(self.obs[0]).to_string();
        for (i, &a) in self.actions.iter().enumerate() {
            s.push_str(&format!(" {} {}", g.action_name(a), g.obs_name(self.obs[i + 1])));
        }
        s
    }
}

impl ConcretePath {
    pub fn validate(&self, g: &Game) -> Result<()> {
        if self.states.len() != self.actions.len() + 1 {
            return Err(MpgError::InvalidPath("state/action count mismatch".into()));
        }
        for (i, &a) in self.actions.iter().enumerate() {
            g.check_action(a)?;
            if g.weight(self.states[i], a, self.states[i + 1]).is_none() {
                return Err(MpgError::InvalidPath(format!("step {i} is not a transition")));
            }
        }
        Ok(())
    }

    pub fn render(&self, g: &Game) -> String {
        let mut s = g.state_name(self.states[0]).to_string();
        for (i, &a) in self.actions.iter().enumerate() {
            s.push_str(&format!(" {} {}", g.action_name(a), g.state_name(self.states[i + 1])));
        }
        s
    }
}

/// Sum of weights along `π`, with overflow reported.
pub fn payoff_prefix(g: &Game, pi: &ConcretePath) -> Result<i64> {
    pi.validate(g)?;
    let mut total: i64 = 0;
    for (i, &a) in pi.actions.iter().enumerate() {
        let w = g.weight(pi.states[i], a, pi.states[i + 1]).unwrap();
        total = total.checked_add(w).ok_or(MpgError::Overflow)?;
    }
    Ok(total)
}

/// All concrete paths refining `ψ`, in lexicographic order.
pub fn gamma_enumerate(g: &Game, psi: &AbstractPath) -> Vec<ConcretePath> {
    let mut out = Vec::new();
    let mut states = Vec::with_capacity(psi.obs.len());
    for &q in g.observation(psi.obs[0]) {
        states.push(q);
        gamma_rec(g, psi, &mut states, &mut out);
        states.pop();
    }
    out
}

fn gamma_rec(g: &Game, psi: &AbstractPath, states: &mut Vec<StateId>, out: &mut Vec<ConcretePath>) {
    let i = states.len() - 1;
    if i == psi.actions.len() {
        out.push(ConcretePath { states: states.clone(), actions: psi.actions.clone() });
        return;
    }
    let q = states[i];
    let a = psi.actions[i];
    for &(d, _) in g.successors(q, a) {
        if g.obs_of(d) == psi.obs[i + 1] {
            states.push(d);
            gamma_rec(g, psi, states, out);
            states.pop();
        }
    }
}

/// All rotations `oᵢσᵢ…oₙσ₀…oᵢ` of a cycle, starting with the cycle itself.
pub fn cyclic_permutations(chi: &AbstractPath) -> Result<Vec<AbstractPath>> {
    if !chi.is_cycle() {
        return Err(MpgError::NotACycle);
    }
    let n = chi.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut obs = Vec::with_capacity(n + 1);
        let mut actions = Vec::with_capacity(n);
        for k in 0..n {
            obs.push(chi.obs[(i + k) % n]);
            actions.push(chi.actions[(i + k) % n]);
        }
        obs.push(chi.obs[i]);
        out.push(AbstractPath { obs, actions });
    }
    Ok(out)
}

/// Splice `inner` into `outer` at position `i`, where `inner` starts and ends at `oᵢ`.
/// A zero-length `inner` leaves `outer` unchanged.
pub fn interleave(outer: &AbstractPath, inner: &AbstractPath, i: usize) -> Result<AbstractPath> {
    if !outer.is_cycle() {
        return Err(MpgError::NotACycle);
    }
    if inner.first() != inner.last() {
        return Err(MpgError::NotACycle);
    }
    if i > outer.len() || outer.obs[i] != inner.first() {
        return Err(MpgError::AnchorMismatch(i));
    }
    let mut obs: Vec<ObsId> = outer.obs[..=i].to_vec();
    let mut actions: Vec<ActionId> = outer.actions[..i].to_vec();
    for k in 0..inner.len() {
        actions.push(inner.actions[k]);
        obs.push(inner.obs[k + 1]);
    }
    actions.extend_from_slice(&outer.actions[i..]);
    obs.extend_from_slice(&outer.obs[i + 1..]);
    Ok(AbstractPath { obs, actions })
}

/// `χᵏ`: the cycle traversed `k ≥ 1` times.
pub fn cycle_power(chi: &AbstractPath, k: usize) -> Result<AbstractPath> {
    if !chi.is_cycle() {
        return Err(MpgError::NotACycle);
    }
    if k == 0 {
        return Ok(AbstractPath::single(chi.first()));
    }
    let mut out = chi.clone();
    for _ in 1..k {
        out = interleave(&out, chi, 0)?;
    }
    Ok(out)
}
