//! Knowledge-set construction: turns a partial-observation game into a
//! limited-observation one over pairs `(q, K)`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{MpgError, Result};
use crate::game::{Game, StateId, Transition};
use crate::par;

pub const DEFAULT_BELIEF_CAP: usize = 4096;
pub const BELIEF_CAP_ENV: &str = "MPG_BELIEF_CAP";

/// Cap from the environment, or the default when unset or unparsable.
pub fn belief_cap() -> usize {
    std::env::var(BELIEF_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BELIEF_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeliefState {
    pub state: StateId,
    pub knowledge: Vec<StateId>,
}

/// Result of the construction with the mapping back to base states.
#[derive(Clone, Debug)]
pub struct BeliefGame {
    pub game: Game,
    /// Indexed by belief-game state id.
    pub states: Vec<BeliefState>,
}

pub fn build_belief_game(g: &Game) -> Result<Game> {
    Ok(build_belief(g, belief_cap())?.game)
}

pub fn build_belief(g: &Game, cap: usize) -> Result<BeliefGame> {
    let init = vec![g.initial()];
    let mut seen: BTreeSet<Vec<StateId>> = BTreeSet::new();
    seen.insert(init.clone());
    let mut count = 1;
    if count > cap {
        return Err(MpgError::BeliefCap(cap));
    }
    let mut frontier = vec![init];
    // (K, σ, K') edges between knowledge sets.
    let mut k_edges: Vec<(Vec<StateId>, usize, Vec<StateId>)> = Vec::new();
    while !frontier.is_empty() {
        let expanded: Vec<Vec<(usize, Vec<StateId>)>> = par::map(&frontier, |k| knowledge_successors(g, k));
        let mut next = Vec::new();
        for (k, succ) in frontier.iter().zip(expanded) {
            for (a, k2) in succ {
                if seen.insert(k2.clone()) {
                    count += k2.len();
                    if count > cap {
                        return Err(MpgError::BeliefCap(cap));
                    }
                    next.push(k2.clone());
                }
                k_edges.push((k.clone(), a, k2));
            }
        }
        frontier = next;
    }

    let mut states: Vec<BeliefState> = Vec::new();
    let mut index: BTreeMap<(Vec<StateId>, StateId), StateId> = BTreeMap::new();
    let mut observations = Vec::new();
    for k in &seen {
        let members: Vec<StateId> = k
            .iter()
            .map(|&q| {
                index.insert((k.clone(), q), states.len());
                states.push(BeliefState { state: q, knowledge: k.clone() });
                states.len() - 1
            })
            .collect();
        observations.push((set_name(g, k), members));
    }
    let mut transitions = Vec::new();
    for (k, a, k2) in &k_edges {
        for &q in k {
            for &(q2, w) in g.successors(q, *a) {
                if let Some(&dst) = index.get(&(k2.clone(), q2)) {
                    transitions.push(Transition { src: index[&(k.clone(), q)], action: *a, dst, weight: w });
                }
            }
        }
    }
    let names = states.iter().map(|b| format!("{}@{}", g.state_name(b.state), set_name(g, &b.knowledge))).collect();
    let initial = index[&(vec![g.initial()], g.initial())];
    let game = Game::new(
        format!("{}-belief", g.name()),
        names,
        g.action_names().to_vec(),
        observations,
        initial,
        transitions,
    )?;
    debug_assert!(game.check_limited().is_limited());
    Ok(BeliefGame { game, states })
}

/// For each action, the nonempty pieces `post_σ(K) ∩ o` in observation order.
fn knowledge_successors(g: &Game, k: &[StateId]) -> Vec<(usize, Vec<StateId>)> {
    let mut out = Vec::new();
    for a in 0..g.num_actions() {
        let post = g.post(k, a).expect("action in range");
        let mut by_obs: BTreeMap<usize, Vec<StateId>> = BTreeMap::new();
        for q in post {
            by_obs.entry(g.obs_of(q)).or_default().push(q);
        }
        out.extend(by_obs.into_values().map(|k2| (a, k2)));
    }
    out
}

fn set_name(g: &Game, k: &[StateId]) -> String {
    let names: Vec<&str> = k.iter().map(|&q| g.state_name(q)).collect();
    format!("{{{}}}", names.join(","))
}
