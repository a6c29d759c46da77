//! Clamped-value safety game: functions with values in `[−1, cap]`, Eve
//! avoiding any function with a `−1` coordinate.

use std::collections::HashMap;

use crate::belief::build_belief_game;
use crate::classify::is_forcibly_fac;
use crate::error::{MpgError, Result};
use crate::game::{ActionId, Game, ObsId, StateId};
use crate::par;
use crate::verdict::{Verdict, VerdictTag};
use crate::weights::SuccessorMode;

/// Node cap for the global construction before falling back to local solving.
pub const GLOBAL_NODE_CAP: usize = 1 << 18;
pub const DEFAULT_NODE_CAP: usize = 1 << 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClampedValue {
    Bottom,
    Finite(i64),
}

/// `a + b` collapsed to −1 below zero and capped above; `b` is a raw weight
/// or another clamped value.
pub fn clamped_add(a: ClampedValue, b: ClampedValue, cap: i64) -> ClampedValue {
    match (a, b) {
        (ClampedValue::Finite(x), ClampedValue::Finite(y)) => {
            let s = x.saturating_add(y);
            if s < 0 || (x == -1 && y == -1) {
                ClampedValue::Finite(-1)
            } else {
                ClampedValue::Finite(s.min(cap))
            }
        }
        _ => ClampedValue::Bottom,
    }
}

/// Sparse clamped function: sorted `(state, value)` pairs over one observation.
pub type ClampedFunction = Vec<(StateId, i64)>;

pub fn is_negative(f: &ClampedFunction) -> bool {
    f.iter().any(|&(_, v)| v == -1)
}

pub fn render_clamped(g: &Game, f: &ClampedFunction) -> String {
    let parts: Vec<String> = f.iter().map(|&(q, v)| format!("{}:{}", g.state_name(q), v)).collect();
    format!("{{{}}}", parts.join(", "))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SafetyOutcome {
    EveSafe,
    AdamReaches,
}

#[derive(Clone, Debug)]
pub struct SafetySolution {
    pub outcome: SafetyOutcome,
    pub cap: i64,
    pub initial_value: i64,
    /// Reachable clamped functions; node 0 is the initial one.
    pub nodes: Vec<ClampedFunction>,
    /// `succ[node][action]`: `(observation, node)` pairs; empty on negative
    /// nodes and, for local solving, on pairs that were never expanded.
    pub succ: Vec<Vec<Vec<(ObsId, usize)>>>,
    /// Nodes known to be in Adam's attractor of the negative set.
    pub attractor: Vec<bool>,
    /// Least safe action on nodes shown safe.
    pub strategy: Vec<Option<ActionId>>,
}

impl SafetySolution {
    pub fn successor(&self, node: usize, a: ActionId, o: ObsId) -> Option<usize> {
        self.succ[node][a].iter().find(|(o2, _)| *o2 == o).map(|&(_, n)| n)
    }
}

/// One clamped proper successor per target observation.
pub fn clamped_successors(g: &Game, f: &ClampedFunction, a: ActionId, cap: i64) -> Vec<(ObsId, ClampedFunction)> {
    let mut best: HashMap<StateId, i64> = HashMap::new();
    for &(q, v) in f {
        for &(q2, w) in g.successors(q, a) {
            if let ClampedValue::Finite(nv) = clamped_add(ClampedValue::Finite(v), ClampedValue::Finite(w), cap) {
                best.entry(q2).and_modify(|x| *x = (*x).min(nv)).or_insert(nv);
            }
        }
    }
    let mut by_obs: Vec<(ObsId, ClampedFunction)> = Vec::new();
    let mut entries: Vec<(StateId, i64)> = best.into_iter().collect();
    entries.sort();
    for (q, v) in entries {
        let o = g.obs_of(q);
        match by_obs.iter_mut().find(|(o2, _)| *o2 == o) {
            Some((_, f2)) => f2.push((q, v)),
            None => by_obs.push((o, vec![(q, v)])),
        }
    }
    by_obs.sort_by_key(|(o, _)| *o);
    by_obs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SafetyMethod {
    /// Whole reachable graph, then the backward attractor.
    Global,
    /// On-the-fly fixpoint that only expands what Eve's current candidate
    /// strategy reaches.
    Local,
}

/// Global construction, falling back to local solving on large games.
pub fn solve_safety(g: &Game) -> Result<SafetySolution> {
    match solve_safety_capped(g, GLOBAL_NODE_CAP) {
        Err(MpgError::StateSpaceCap(_)) => solve_safety_with(g, SafetyMethod::Local, DEFAULT_NODE_CAP),
        other => other,
    }
}

pub fn solve_safety_with(g: &Game, method: SafetyMethod, node_cap: usize) -> Result<SafetySolution> {
    match method {
        SafetyMethod::Global => solve_safety_capped(g, node_cap),
        SafetyMethod::Local => solve_safety_local(g, node_cap),
    }
}

fn bounds(g: &Game) -> Result<(i64, i64)> {
    let w = g.max_abs_weight();
    let obs = g.num_obs() as i64;
    let initial_value = w.checked_mul(obs).ok_or(MpgError::Overflow)?;
    let cap = initial_value.checked_mul(2).ok_or(MpgError::Overflow)?;
    Ok((initial_value, cap))
}

pub fn solve_safety_capped(g: &Game, node_cap: usize) -> Result<SafetySolution> {
    g.require_limited()?;
    let (initial_value, cap) = bounds(g)?;

    let mut nodes: Vec<ClampedFunction> = vec![vec![(g.initial(), initial_value)]];
    let mut index: HashMap<ClampedFunction, usize> = HashMap::new();
    index.insert(nodes[0].clone(), 0);
    let mut succ: Vec<Vec<Vec<(ObsId, usize)>>> = vec![Vec::new()];
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let expanded: Vec<Vec<Vec<(ObsId, ClampedFunction)>>> = par::map(&frontier, |&n| {
            if is_negative(&nodes[n]) {
                Vec::new()
            } else {
                (0..g.num_actions()).map(|a| clamped_successors(g, &nodes[n], a, cap)).collect()
            }
        });
        let mut next = Vec::new();
        for (&n, per_action) in frontier.iter().zip(expanded) {
            let mut row = Vec::with_capacity(per_action.len());
            for list in per_action {
                let mut ids = Vec::with_capacity(list.len());
                for (o, f) in list {
                    let id = match index.get(&f) {
                        Some(&id) => id,
                        None => {
                            let id = nodes.len();
                            if id >= node_cap {
                                return Err(MpgError::StateSpaceCap(node_cap));
                            }
                            index.insert(f.clone(), id);
                            nodes.push(f);
                            succ.push(Vec::new());
                            next.push(id);
                            id
                        }
                    };
                    ids.push((o, id));
                }
                row.push(ids);
            }
            succ[n] = row;
        }
        frontier = next;
    }

    let attractor = adam_attractor(&nodes, &succ, g.num_actions());
    let strategy = (0..nodes.len())
        .map(|n| {
            if attractor[n] {
                None
            } else {
                (0..g.num_actions()).find(|&a| succ[n][a].iter().all(|&(_, m)| !attractor[m]))
            }
        })
        .collect();
    let outcome = if attractor[0] { SafetyOutcome::AdamReaches } else { SafetyOutcome::EveSafe };
    Ok(SafetySolution { outcome, cap, initial_value, nodes, succ, attractor, strategy })
}

/// Backward fixpoint: a node joins once every action has a successor inside.
fn adam_attractor(nodes: &[ClampedFunction], succ: &[Vec<Vec<(ObsId, usize)>>], num_actions: usize) -> Vec<bool> {
    let n = nodes.len();
    let mut preds: Vec<Vec<(usize, ActionId)>> = vec![Vec::new(); n];
    for (p, row) in succ.iter().enumerate() {
        for (a, list) in row.iter().enumerate() {
            for &(_, m) in list {
                preds[m].push((p, a));
            }
        }
    }
    let mut in_attr = vec![false; n];
    let mut blocked = vec![vec![false; num_actions]; n];
    let mut blocked_count = vec![0usize; n];
    let mut stack: Vec<usize> = (0..n).filter(|&i| is_negative(&nodes[i])).collect();
    for &i in &stack {
        in_attr[i] = true;
    }
    while let Some(m) = stack.pop() {
        for &(p, a) in &preds[m] {
            if in_attr[p] || blocked[p][a] {
                continue;
            }
            blocked[p][a] = true;
            blocked_count[p] += 1;
            if blocked_count[p] == num_actions {
                in_attr[p] = true;
                stack.push(p);
            }
        }
    }
    in_attr
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Edge {
    /// Node is lost for Eve once every action is lost.
    Node(usize),
    /// Action `σ` at a node is lost once successor `k` is lost.
    Choice(usize, ActionId, usize),
}

/// Local least-fixpoint evaluation of Adam's attractor on the hypergraph
/// `node = ∧_σ choice(σ)`, `choice(σ) = ∨_o succ(σ, o)`, in the style of
/// Liu and Smolka. Values: 0 = unknown/safe so far, 1 = Adam reaches.
fn solve_safety_local(g: &Game, node_cap: usize) -> Result<SafetySolution> {
    g.require_limited()?;
    let (initial_value, cap) = bounds(g)?;
    let na = g.num_actions();
    let mut nodes: Vec<ClampedFunction> = vec![vec![(g.initial(), initial_value)]];
    let mut index: HashMap<ClampedFunction, usize> = HashMap::new();
    index.insert(nodes[0].clone(), 0);
    // Per node: explored flag/value, per-action successor lists and values.
    let mut node_val: Vec<Option<bool>> = vec![None];
    let mut succ: Vec<Vec<Vec<(ObsId, usize)>>> = vec![Vec::new()];
    let mut choice_val: Vec<Vec<Option<bool>>> = vec![Vec::new()];
    let mut node_dep: Vec<Vec<Edge>> = vec![Vec::new()];
    let mut choice_dep: Vec<Vec<Vec<Edge>>> = vec![Vec::new()];

    let mut work: Vec<Edge> = Vec::new();
    node_val[0] = Some(false);
    work.push(Edge::Node(0));
    while let Some(e) = work.pop() {
        if node_val[0] == Some(true) {
            break;
        }
        match e {
            Edge::Node(v) => {
                if node_val[v] == Some(true) {
                    continue;
                }
                if is_negative(&nodes[v]) {
                    node_val[v] = Some(true);
                    work.extend(std::mem::take(&mut node_dep[v]));
                    continue;
                }
                if choice_val[v].is_empty() {
                    choice_val[v] = vec![None; na];
                    choice_dep[v] = vec![Vec::new(); na];
                    succ[v] = vec![Vec::new(); na];
                }
                match (0..na).find(|&a| choice_val[v][a] != Some(true)) {
                    None => {
                        node_val[v] = Some(true);
                        work.extend(std::mem::take(&mut node_dep[v]));
                    }
                    Some(a) => {
                        choice_dep[v][a].push(e);
                        if choice_val[v][a].is_none() {
                            choice_val[v][a] = Some(false);
                            let list = clamped_successors(g, &nodes[v], a, cap);
                            let mut ids = Vec::with_capacity(list.len());
                            for (o, f) in list {
                                let id = match index.get(&f) {
                                    Some(&id) => id,
                                    None => {
                                        let id = nodes.len();
                                        if id >= node_cap {
                                            return Err(MpgError::StateSpaceCap(node_cap));
                                        }
                                        index.insert(f.clone(), id);
                                        nodes.push(f);
                                        node_val.push(None);
                                        succ.push(Vec::new());
                                        choice_val.push(Vec::new());
                                        node_dep.push(Vec::new());
                                        choice_dep.push(Vec::new());
                                        id
                                    }
                                };
                                ids.push((o, id));
                            }
                            let k = ids.len();
                            succ[v][a] = ids;
                            work.extend((0..k).rev().map(|k| Edge::Choice(v, a, k)));
                        }
                    }
                }
            }
            Edge::Choice(v, a, k) => {
                if choice_val[v][a] == Some(true) {
                    continue;
                }
                let t = succ[v][a][k].1;
                match node_val[t] {
                    Some(true) => {
                        choice_val[v][a] = Some(true);
                        work.extend(std::mem::take(&mut choice_dep[v][a]));
                    }
                    Some(false) => node_dep[t].push(e),
                    None => {
                        node_val[t] = Some(false);
                        node_dep[t].push(e);
                        work.push(Edge::Node(t));
                    }
                }
            }
        }
    }

    let attractor: Vec<bool> = node_val.iter().map(|v| *v == Some(true)).collect();
    let strategy = (0..nodes.len())
        .map(|v| {
            if node_val[v] != Some(false) || choice_val[v].is_empty() {
                return None;
            }
            (0..na).find(|&a| choice_val[v][a] == Some(false))
        })
        .collect();
    let outcome = if attractor[0] { SafetyOutcome::AdamReaches } else { SafetyOutcome::EveSafe };
    Ok(SafetySolution { outcome, cap, initial_value, nodes, succ, attractor, strategy })
}

/// Safety verdict; `conclusive` is false when Adam reaches the negative set
/// but the game was not confirmed forcibly FAC.
#[derive(Clone, Debug)]
pub struct SafetyVerdict {
    pub verdict: Verdict,
    pub conclusive: bool,
    pub solution: SafetySolution,
}

/// Solves the safety game on a limited-observation game. With `check_fac`,
/// an Adam result is confirmed against the simple-support game; otherwise it
/// is reported as Adam but marked inconclusive.
pub fn safety_verdict(g: &Game, check_fac: bool) -> Result<SafetyVerdict> {
    let solution = solve_safety(g)?;
    let (tag, conclusive) = match solution.outcome {
        SafetyOutcome::EveSafe => (VerdictTag::EveWins, true),
        SafetyOutcome::AdamReaches if check_fac => {
            if is_forcibly_fac(g, SuccessorMode::Proper)?.0 {
                (VerdictTag::AdamWins, true)
            } else {
                (VerdictTag::Unknown, false)
            }
        }
        SafetyOutcome::AdamReaches => (VerdictTag::AdamWins, false),
    };
    Ok(SafetyVerdict { verdict: Verdict { tag, witness: None }, conclusive, solution })
}

/// Belief construction followed by the safety game.
pub fn winner_partial(g: &Game, check_fbc: bool) -> Result<SafetyVerdict> {
    safety_verdict(&build_belief_game(g)?, check_fbc)
}
