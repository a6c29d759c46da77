//! Observation-based strategies: finite-memory machines extracted from
//! winning cycle-game trees, positional strategies, their verification and
//! a line-oriented file format.
//!
//! Eve machine: in memory `m` with current observation `o` she plays
//! `out(m, o)`; once the next observation `o'` is revealed the memory becomes
//! `next(m, o')`. Adam machine: in memory `m`, observation `o`, after Eve's
//! action `σ` he answers `out(m, o, σ)` and moves to `next(m, o, σ)`.
//!
//! Memory states are strategy-tree nodes. A terminal node is stored as is
//! and behaves like its witness prefix, which is how the machine resets.

use std::collections::{BTreeMap, VecDeque};

use crate::cycle_game::{Player, StrategyTree, Terminality};
use crate::cycles::{classify_cycle, CycleClass};
use crate::error::{MpgError, Result};
use crate::game::{ActionId, Game, ObsId};
use crate::graph;
use crate::path::{AbstractPath, ConcretePath};
use crate::weights::WeightFunction;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EveMachine {
    pub memory: Vec<String>,
    pub initial: usize,
    pub out: BTreeMap<(usize, ObsId), ActionId>,
    pub next: BTreeMap<(usize, ObsId), usize>,
    /// Memory states that stand for a reset to an earlier prefix.
    pub resets: Vec<bool>,
    /// Last function of each memory node, when extracted from a tree.
    pub funcs: Option<Vec<WeightFunction>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdamMachine {
    pub memory: Vec<String>,
    pub initial: usize,
    pub out: BTreeMap<(usize, ObsId, ActionId), ObsId>,
    pub next: BTreeMap<(usize, ObsId, ActionId), usize>,
    pub resets: Vec<bool>,
    pub funcs: Option<Vec<WeightFunction>>,
}

fn domain(g: &Game, m: &[String], mi: usize, o: ObsId, a: Option<ActionId>) -> MpgError {
    let mem = m.get(mi).map_or("?", |s| s.as_str());
    let obs = if o < g.num_obs() { g.obs_name(o) } else { "?" };
    match a {
        Some(a) => MpgError::StrategyDomain(format!("({mem}, {obs}, {})", g.action_name(a))),
        None => MpgError::StrategyDomain(format!("({mem}, {obs})")),
    }
}

impl EveMachine {
    pub fn len(&self) -> usize {
        self.memory.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memory.is_empty()
    }

    pub fn output(&self, g: &Game, m: usize, o: ObsId) -> Result<ActionId> {
        self.out.get(&(m, o)).copied().ok_or_else(|| domain(g, &self.memory, m, o, None))
    }

    pub fn update(&self, g: &Game, m: usize, o_next: ObsId) -> Result<usize> {
        self.next.get(&(m, o_next)).copied().ok_or_else(|| domain(g, &self.memory, m, o_next, None))
    }

    /// Absorb the next observation and produce the action played on it.
    pub fn step(&self, g: &Game, m: usize, o_next: ObsId) -> Result<(usize, ActionId)> {
        let m2 = self.update(g, m, o_next)?;
        Ok((m2, self.output(g, m2, o_next)?))
    }

    /// Smallest finite value in any memory function.
    pub fn beta(&self) -> Option<i64> {
        self.funcs.as_ref()?.iter().filter_map(|f| f.min_finite()).min()
    }
}

impl AdamMachine {
    pub fn len(&self) -> usize {
        self.memory.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memory.is_empty()
    }

    /// Answer Eve's action: `(next memory, chosen observation)`.
    pub fn step(&self, g: &Game, m: usize, o: ObsId, a: ActionId) -> Result<(usize, ObsId)> {
        let key = (m, o, a);
        match (self.next.get(&key), self.out.get(&key)) {
            (Some(&m2), Some(&o2)) => Ok((m2, o2)),
            _ => Err(domain(g, &self.memory, m, o, Some(a))),
        }
    }

    /// Largest finite value in any memory function.
    pub fn ceiling(&self) -> Option<i64> {
        self.funcs.as_ref()?.iter().filter_map(|f| f.max_finite()).max()
    }
}

fn node_names(tree: &StrategyTree) -> Vec<String> {
    (0..tree.len()).map(|i| format!("m{i}")).collect()
}

fn check_tree(tree: &StrategyTree, owner: Player) -> Result<()> {
    if tree.owner != owner {
        return Err(MpgError::MalformedTree(format!("expected a {owner:?} strategy tree")));
    }
    if tree.is_empty() {
        return Err(MpgError::MalformedTree("empty tree".into()));
    }
    for (i, n) in tree.nodes.iter().enumerate() {
        let leaf_ok = match owner {
            Player::Eve => matches!(n.terminal, Terminality::Good(_)),
            Player::Adam => matches!(n.terminal, Terminality::Bad(_)),
        };
        if n.moves.is_empty() && !leaf_ok {
            return Err(MpgError::MalformedTree(format!("leaf m{i} is not winning for {owner:?}")));
        }
        if let Some(w) = n.terminal.witness() {
            if w >= n.depth {
                return Err(MpgError::MalformedTree(format!("witness index of m{i} is not a proper prefix")));
            }
        }
        if n.moves.iter().any(|&(_, c)| c >= tree.len() || tree.nodes[c].parent != Some(i)) {
            return Err(MpgError::MalformedTree(format!("bad child pointer at m{i}")));
        }
    }
    Ok(())
}

/// Memory node after the lazy reset.
fn reset_target(tree: &StrategyTree, i: usize, owner: Player) -> usize {
    match (owner, tree.nodes[i].terminal) {
        (Player::Eve, Terminality::Good(w)) | (Player::Adam, Terminality::Bad(w)) => tree.ancestor(i, w),
        _ => i,
    }
}

pub fn extract_eve_machine(tree: &StrategyTree) -> Result<EveMachine> {
    check_tree(tree, Player::Eve)?;
    let mut out = BTreeMap::new();
    let mut next = BTreeMap::new();
    let mut resets = Vec::with_capacity(tree.len());
    for i in 0..tree.len() {
        let target = reset_target(tree, i, Player::Eve);
        resets.push(target != i);
        let t = &tree.nodes[target];
        let Some(&(a, _)) = t.moves.first() else {
            return Err(MpgError::MalformedTree(format!("reset target of m{i} has no move")));
        };
        out.insert((i, tree.nodes[i].obs), a);
        for &(_, c) in &t.moves {
            next.entry((i, tree.nodes[c].obs)).or_insert(c);
        }
    }
    Ok(EveMachine {
        memory: node_names(tree),
        initial: 0,
        out,
        next,
        resets,
        funcs: Some(tree.nodes.iter().map(|n| n.func.clone()).collect()),
    })
}

pub fn extract_adam_machine(tree: &StrategyTree) -> Result<AdamMachine> {
    check_tree(tree, Player::Adam)?;
    let mut out = BTreeMap::new();
    let mut next = BTreeMap::new();
    let mut resets = Vec::with_capacity(tree.len());
    for i in 0..tree.len() {
        let target = reset_target(tree, i, Player::Adam);
        resets.push(target != i);
        let o = tree.nodes[i].obs;
        if tree.nodes[target].moves.is_empty() {
            return Err(MpgError::MalformedTree(format!("reset target of m{i} has no move")));
        }
        for &(a, c) in &tree.nodes[target].moves {
            out.insert((i, o, a), tree.nodes[c].obs);
            next.insert((i, o, a), c);
        }
    }
    Ok(AdamMachine {
        memory: node_names(tree),
        initial: 0,
        out,
        next,
        resets,
        funcs: Some(tree.nodes.iter().map(|n| n.func.clone()).collect()),
    })
}

/// Memory-1 strategies. Unreachable observations may be left undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositionalStrategy {
    /// Action per observation.
    Eve(Vec<Option<ActionId>>),
    /// Observation per (observation, action).
    Adam(Vec<Vec<Option<ObsId>>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// Reachable concrete cycle of negative weight.
    NegativeCycle(ConcretePath),
    /// Reachable simple abstract cycle that is not bad.
    NonBadCycle(AbstractPath, CycleClass),
}

/// Observations reachable from the initial one when Eve plays `s`.
fn eve_reachable_obs(g: &Game, s: &[Option<ActionId>]) -> Result<Vec<bool>> {
    let mut seen = vec![false; g.num_obs()];
    let mut queue = VecDeque::from([g.initial_obs()]);
    seen[g.initial_obs()] = true;
    while let Some(o) = queue.pop_front() {
        let a = s.get(o).copied().flatten().ok_or_else(|| MpgError::StrategyDomain(g.obs_name(o).to_string()))?;
        for o2 in g.post_obs(o, a) {
            if !seen[o2] {
                seen[o2] = true;
                queue.push_back(o2);
            }
        }
    }
    Ok(seen)
}

/// Edges `(o, σ, o')` of the observation graph under Adam's map, restricted
/// to what is reachable from the initial observation.
fn adam_obs_edges(g: &Game, s: &[Vec<Option<ObsId>>]) -> Result<Vec<(ObsId, ActionId, ObsId)>> {
    let mut seen = vec![false; g.num_obs()];
    let mut queue = VecDeque::from([g.initial_obs()]);
    seen[g.initial_obs()] = true;
    let mut edges = Vec::new();
    while let Some(o) = queue.pop_front() {
        for a in 0..g.num_actions() {
            let o2 = s.get(o).and_then(|row| row.get(a)).copied().flatten().ok_or_else(|| {
                MpgError::StrategyDomain(format!("({}, {})", g.obs_name(o), g.action_name(a)))
            })?;
            if !g.post_obs(o, a).contains(&o2) {
                return Err(MpgError::StrategyDomain(format!(
                    "({}, {}) -> {} is not a successor observation",
                    g.obs_name(o),
                    g.action_name(a),
                    g.obs_name(o2)
                )));
            }
            edges.push((o, a, o2));
            if !seen[o2] {
                seen[o2] = true;
                queue.push_back(o2);
            }
        }
    }
    Ok(edges)
}

/// Simple cycles of a labelled multigraph, each rooted at its smallest node.
fn simple_cycles(edges: &[(ObsId, ActionId, ObsId)], budget: usize) -> Result<Vec<AbstractPath>> {
    let n = edges.iter().map(|&(u, _, v)| u.max(v) + 1).max().unwrap_or(0);
    let mut adj: Vec<Vec<(ActionId, ObsId)>> = vec![Vec::new(); n];
    for &(u, a, v) in edges {
        adj[u].push((a, v));
    }
    let mut out = Vec::new();
    fn dfs(
        adj: &[Vec<(ActionId, ObsId)>],
        start: usize,
        path: &mut AbstractPath,
        on_path: &mut [bool],
        out: &mut Vec<AbstractPath>,
        budget: usize,
    ) -> Result<()> {
        let u = path.last();
        for &(a, v) in &adj[u] {
            if v == start {
                let mut c = path.clone();
                c.push(a, v);
                out.push(c);
                if out.len() > budget {
                    return Err(MpgError::Budget(budget));
                }
            } else if v > start && !on_path[v] {
                on_path[v] = true;
                path.push(a, v);
                dfs(adj, start, path, on_path, out, budget)?;
                path.obs.pop();
                path.actions.pop();
                on_path[v] = false;
            }
        }
        Ok(())
    }
    let mut on_path = vec![false; n];
    for start in 0..n {
        let mut path = AbstractPath::single(start);
        on_path[start] = true;
        dfs(&adj, start, &mut path, &mut on_path, &mut out, budget)?;
        on_path[start] = false;
    }
    Ok(out)
}

const CYCLE_BUDGET: usize = 1 << 20;

/// `Ok(None)` when the strategy wins, otherwise a counterexample.
pub fn verify_positional(g: &Game, s: &PositionalStrategy) -> Result<Option<Counterexample>> {
    g.require_limited()?;
    match s {
        PositionalStrategy::Eve(map) => {
            let reach_obs = eve_reachable_obs(g, map)?;
            let mut edges = Vec::new();
            for q in 0..g.num_states() {
                let o = g.obs_of(q);
                if !reach_obs[o] {
                    continue;
                }
                let a = map[o].expect("reachable observation has an action");
                for &(q2, w) in g.successors(q, a) {
                    edges.push((q, q2, w));
                }
            }
            Ok(graph::negative_cycle(g.num_states(), &edges, Some(g.initial())).map(|cycle| {
                let mut states = cycle.clone();
                states.push(cycle[0]);
                let actions = cycle.iter().map(|&q| map[g.obs_of(q)].unwrap()).collect();
                Counterexample::NegativeCycle(ConcretePath { states, actions })
            }))
        }
        PositionalStrategy::Adam(map) => {
            let edges = adam_obs_edges(g, map)?;
            for c in simple_cycles(&edges, CYCLE_BUDGET)? {
                let class = classify_cycle(g, &c)?;
                if class != CycleClass::Bad {
                    return Ok(Some(Counterexample::NonBadCycle(c, class)));
                }
            }
            Ok(None)
        }
    }
}

const CANDIDATE_BUDGET: usize = 1 << 20;

/// First verified positional strategy, Eve's candidates before Adam's, each
/// enumerated over the observations it reaches in ascending index order.
pub fn search_positional_fac(g: &Game) -> Result<PositionalStrategy> {
    g.require_limited()?;
    if !crate::classify::is_fac(g, crate::weights::SuccessorMode::Proper)?.0 {
        return Err(MpgError::NotFac);
    }
    search_positional(g)?.ok_or(MpgError::NotFac)
}

/// The same enumeration without the FAC precondition.
pub fn search_positional(g: &Game) -> Result<Option<PositionalStrategy>> {
    let mut tried = 0usize;
    let mut eve = vec![None; g.num_obs()];
    if let Some(s) = search_eve(g, &mut eve, &mut tried)? {
        return Ok(Some(s));
    }
    let mut adam = vec![vec![None; g.num_actions()]; g.num_obs()];
    search_adam(g, &mut adam, &mut tried)
}

fn bump(tried: &mut usize) -> Result<()> {
    *tried += 1;
    if *tried > CANDIDATE_BUDGET {
        return Err(MpgError::Budget(CANDIDATE_BUDGET));
    }
    Ok(())
}

fn search_eve(g: &Game, map: &mut Vec<Option<ActionId>>, tried: &mut usize) -> Result<Option<PositionalStrategy>> {
    // First reachable observation without an action, if any.
    let mut seen = vec![false; g.num_obs()];
    let mut queue = VecDeque::from([g.initial_obs()]);
    seen[g.initial_obs()] = true;
    let mut open = None;
    while let Some(o) = queue.pop_front() {
        match map[o] {
            None => open = Some(open.map_or(o, |x: ObsId| x.min(o))),
            Some(a) => {
                for o2 in g.post_obs(o, a) {
                    if !seen[o2] {
                        seen[o2] = true;
                        queue.push_back(o2);
                    }
                }
            }
        }
    }
    match open {
        None => {
            bump(tried)?;
            let s = PositionalStrategy::Eve(map.clone());
            Ok(verify_positional(g, &s)?.is_none().then_some(s))
        }
        Some(o) => {
            for a in 0..g.num_actions() {
                map[o] = Some(a);
                if let Some(s) = search_eve(g, map, tried)? {
                    return Ok(Some(s));
                }
            }
            map[o] = None;
            Ok(None)
        }
    }
}

fn search_adam(g: &Game, map: &mut Vec<Vec<Option<ObsId>>>, tried: &mut usize) -> Result<Option<PositionalStrategy>> {
    let mut seen = vec![false; g.num_obs()];
    let mut queue = VecDeque::from([g.initial_obs()]);
    seen[g.initial_obs()] = true;
    let mut open: Option<(ObsId, ActionId)> = None;
    while let Some(o) = queue.pop_front() {
        for a in 0..g.num_actions() {
            match map[o][a] {
                None => open = Some(open.map_or((o, a), |x| x.min((o, a)))),
                Some(o2) => {
                    if !seen[o2] {
                        seen[o2] = true;
                        queue.push_back(o2);
                    }
                }
            }
        }
    }
    match open {
        None => {
            bump(tried)?;
            let s = PositionalStrategy::Adam(map.clone());
            Ok(verify_positional(g, &s)?.is_none().then_some(s))
        }
        Some((o, a)) => {
            for o2 in g.post_obs(o, a) {
                map[o][a] = Some(o2);
                if let Some(s) = search_adam(g, map, tried)? {
                    return Ok(Some(s));
                }
            }
            map[o][a] = None;
            Ok(None)
        }
    }
}

/// Exact check of an Eve machine: no negative cycle in the product of the
/// game with the machine memory, reachable from `(q_I, m₀)`.
pub fn verify_eve_machine(g: &Game, m: &EveMachine) -> Result<Option<ConcretePath>> {
    let k = m.len();
    let id = |q: usize, mem: usize| q * k + mem;
    let mut seen = vec![false; g.num_states() * k];
    let mut edges = Vec::new();
    let mut act = vec![None; g.num_states() * k];
    let start = id(g.initial(), m.initial);
    seen[start] = true;
    let mut queue = VecDeque::from([(g.initial(), m.initial)]);
    while let Some((q, mem)) = queue.pop_front() {
        let a = m.output(g, mem, g.obs_of(q))?;
        act[id(q, mem)] = Some(a);
        for &(q2, w) in g.successors(q, a) {
            let mem2 = m.update(g, mem, g.obs_of(q2))?;
            edges.push((id(q, mem), id(q2, mem2), w));
            if !seen[id(q2, mem2)] {
                seen[id(q2, mem2)] = true;
                queue.push_back((q2, mem2));
            }
        }
    }
    Ok(graph::negative_cycle(g.num_states() * k, &edges, Some(start)).map(|cycle| {
        let mut states: Vec<usize> = cycle.iter().map(|&x| x / k).collect();
        states.push(cycle[0] / k);
        let actions = cycle.iter().map(|&x| act[x].unwrap()).collect();
        ConcretePath { states, actions }
    }))
}

/// Structural check of an Adam machine: defined and admissible on every
/// reachable `(memory, observation, action)`.
pub fn check_adam_machine(g: &Game, m: &AdamMachine) -> Result<usize> {
    let mut seen = BTreeMap::new();
    let mut queue = VecDeque::from([(m.initial, g.initial_obs())]);
    seen.insert((m.initial, g.initial_obs()), ());
    while let Some((mem, o)) = queue.pop_front() {
        for a in 0..g.num_actions() {
            let (mem2, o2) = m.step(g, mem, o, a)?;
            if !g.post_obs(o, a).contains(&o2) {
                return Err(domain(g, &m.memory, mem, o, Some(a)));
            }
            if seen.insert((mem2, o2), ()).is_none() {
                queue.push_back((mem2, o2));
            }
        }
    }
    Ok(seen.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    EveMachine(EveMachine),
    AdamMachine(AdamMachine),
    Positional(PositionalStrategy),
}

pub fn render_strategy(g: &Game, s: &Strategy) -> String {
    let mut out = String::new();
    let mut line = |l: String| {
        out.push_str(&l);
        out.push('\n');
    };
    let resets_line = |mem: &[String], resets: &[bool]| {
        let r: Vec<&str> = mem.iter().zip(resets).filter(|(_, &r)| r).map(|(m, _)| m.as_str()).collect();
        (!r.is_empty()).then(|| format!("resets {}", r.join(" ")))
    };
    match s {
        Strategy::EveMachine(m) => {
            line("eve-machine".into());
            line(format!("memory {}", m.memory.join(" ")));
            line(format!("init {}", m.memory[m.initial]));
            if let Some(r) = resets_line(&m.memory, &m.resets) {
                line(r);
            }
            for (&(mi, o), &a) in &m.out {
                line(format!("out {} {} -> {}", m.memory[mi], g.obs_name(o), g.action_name(a)));
            }
            for (&(mi, o), &m2) in &m.next {
                line(format!("next {} {} -> {}", m.memory[mi], g.obs_name(o), m.memory[m2]));
            }
        }
        Strategy::AdamMachine(m) => {
            line("adam-machine".into());
            line(format!("memory {}", m.memory.join(" ")));
            line(format!("init {}", m.memory[m.initial]));
            if let Some(r) = resets_line(&m.memory, &m.resets) {
                line(r);
            }
            for (&(mi, o, a), &o2) in &m.out {
                line(format!("out {} {} {} -> {}", m.memory[mi], g.obs_name(o), g.action_name(a), g.obs_name(o2)));
            }
            for (&(mi, o, a), &m2) in &m.next {
                line(format!("next {} {} {} -> {}", m.memory[mi], g.obs_name(o), g.action_name(a), m.memory[m2]));
            }
        }
        Strategy::Positional(PositionalStrategy::Eve(map)) => {
            line("eve-positional".into());
            for (o, a) in map.iter().enumerate() {
                if let Some(a) = a {
                    line(format!("{} -> {}", g.obs_name(o), g.action_name(*a)));
                }
            }
        }
        Strategy::Positional(PositionalStrategy::Adam(map)) => {
            line("adam-positional".into());
            for (o, row) in map.iter().enumerate() {
                for (a, o2) in row.iter().enumerate() {
                    if let Some(o2) = o2 {
                        line(format!("{} {} -> {}", g.obs_name(o), g.action_name(a), g.obs_name(*o2)));
                    }
                }
            }
        }
    }
    out
}

pub fn parse_strategy(g: &Game, text: &str) -> Result<Strategy> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty())
        .collect();
    let Some(((first_no, header), rest)) = lines.split_first() else {
        return Err(MpgError::Parse { line: 1, msg: "empty strategy file".into() });
    };
    let perr = |line: usize, msg: String| MpgError::Parse { line, msg };
    let obs = |line: usize, s: &str| g.obs_id(s).ok_or_else(|| perr(line, format!("unknown observation {s}")));
    let act = |line: usize, s: &str| g.action_id(s).ok_or_else(|| perr(line, format!("unknown action {s}")));
    match header.as_slice() {
        ["eve-positional"] => {
            let mut map = vec![None; g.num_obs()];
            for (no, t) in rest {
                match t.as_slice() {
                    [o, "->", a] => map[obs(*no, o)?] = Some(act(*no, a)?),
                    _ => return Err(perr(*no, "expected `<obs> -> <action>`".into())),
                }
            }
            Ok(Strategy::Positional(PositionalStrategy::Eve(map)))
        }
        ["adam-positional"] => {
            let mut map = vec![vec![None; g.num_actions()]; g.num_obs()];
            for (no, t) in rest {
                match t.as_slice() {
                    [o, a, "->", o2] => map[obs(*no, o)?][act(*no, a)?] = Some(obs(*no, o2)?),
                    _ => return Err(perr(*no, "expected `<obs> <action> -> <obs>`".into())),
                }
            }
            Ok(Strategy::Positional(PositionalStrategy::Adam(map)))
        }
        [kind @ ("eve-machine" | "adam-machine")] => {
            let adam = *kind == "adam-machine";
            let mut memory: Vec<String> = Vec::new();
            let mut initial = None;
            let mut resets_named: Vec<(usize, String)> = Vec::new();
            let mut eve_out = BTreeMap::new();
            let mut eve_next: BTreeMap<(usize, ObsId), String> = BTreeMap::new();
            let mut adam_out = BTreeMap::new();
            let mut adam_next: BTreeMap<(usize, ObsId, ActionId), String> = BTreeMap::new();
            let mem = |memory: &[String], line: usize, s: &str| {
                memory.iter().position(|m| m == s).ok_or_else(|| perr(line, format!("unknown memory {s}")))
            };
            for (no, t) in rest {
                let no = *no;
                match (t.as_slice(), adam) {
                    (["memory", ids @ ..], _) if !ids.is_empty() => memory.extend(ids.iter().map(|s| s.to_string())),
                    (["init", m], _) => initial = Some(mem(&memory, no, m)?),
                    (["resets", ids @ ..], _) => resets_named.extend(ids.iter().map(|s| (no, s.to_string()))),
                    (["out", m, o, "->", a], false) => {
                        eve_out.insert((mem(&memory, no, m)?, obs(no, o)?), act(no, a)?);
                    }
                    (["next", m, o, "->", m2], false) => {
                        eve_next.insert((mem(&memory, no, m)?, obs(no, o)?), m2.to_string());
                    }
                    (["out", m, o, a, "->", o2], true) => {
                        adam_out.insert((mem(&memory, no, m)?, obs(no, o)?, act(no, a)?), obs(no, o2)?);
                    }
                    (["next", m, o, a, "->", m2], true) => {
                        adam_next.insert((mem(&memory, no, m)?, obs(no, o)?, act(no, a)?), m2.to_string());
                    }
                    _ => return Err(perr(no, format!("cannot parse `{}`", t.join(" ")))),
                }
            }
            let initial = initial.ok_or_else(|| perr(*first_no, "missing `init` line".into()))?;
            let mut resets = vec![false; memory.len()];
            for (no, r) in resets_named {
                resets[mem(&memory, no, &r)?] = true;
            }
            let resolve = |s: &str| mem(&memory, *first_no, s);
            if adam {
                let next = adam_next.into_iter().map(|(k, v)| Ok((k, resolve(&v)?))).collect::<Result<_>>()?;
                Ok(Strategy::AdamMachine(AdamMachine { memory, initial, out: adam_out, next, resets, funcs: None }))
            } else {
                let next = eve_next.into_iter().map(|(k, v)| Ok((k, resolve(&v)?))).collect::<Result<_>>()?;
                Ok(Strategy::EveMachine(EveMachine { memory, initial, out: eve_out, next, resets, funcs: None }))
            }
        }
        _ => Err(perr(*first_no, format!("unknown strategy kind `{}`", header.join(" ")))),
    }
}
