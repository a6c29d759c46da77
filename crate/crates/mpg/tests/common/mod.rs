//! Random instance generators and brute-force oracles shared by the
//! acceptance and property suites. Oracles here deliberately avoid the
//! library's propagation and matrix code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use mpg::generators::{builtin_game, gen_expmem, gen_hamiltonian, gen_qbf, parse_qbf, Digraph, QbfVariant};
use mpg::path::{gamma_enumerate, AbstractPath};
use mpg::weights::{preceq, ExtValue, WeightFunction};
use mpg::{Game, GameBuilder};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The four-formula QBF suite with truth values.
pub const QBF_SUITE: [(&str, &str, bool); 4] = [
    ("exists x.(x)", "exists x\nclause x\n", true),
    ("exists x.(x)&(~x)", "exists x\nclause x\nclause -x\n", false),
    ("forall x exists y.(x|~y)&(~x|y)", "forall x\nexists y\nclause x -y\nclause -x y\n", true),
    ("forall x.(x)", "forall x\nclause x\n", false),
];

pub struct LimitedParams {
    pub obs: usize,
    pub obs_size: usize,
    pub actions: usize,
    pub max_weight: i64,
    /// Largest number of observations a single `post_σ(o)` may cover.
    pub fanout: usize,
}

impl Default for LimitedParams {
    fn default() -> Self {
        LimitedParams { obs: 3, obs_size: 3, actions: 2, max_weight: 4, fanout: 2 }
    }
}

/// Random limited-observation game. Every `post_σ(o)` is a union of whole
/// observations because each target observation is covered by construction.
pub fn random_limited(r: &mut ChaCha8Rng, p: &LimitedParams) -> Game {
    let mut b = GameBuilder::new("random-limited");
    let init = b.state("qI");
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for o in 0..p.obs {
        let size = r.gen_range(1..=p.obs_size);
        blocks.push((0..size).map(|i| b.state(format!("s{o}_{i}"))).collect());
    }
    let acts: Vec<usize> = (0..p.actions).map(|i| b.action(format!("a{i}"))).collect();
    b.observation("oI", vec![init]);
    for (o, block) in blocks.iter().enumerate() {
        b.observation(format!("o{o}"), block.clone());
    }
    b.initial(init);
    let w = |r: &mut ChaCha8Rng| r.gen_range(-p.max_weight..=p.max_weight);
    for &a in &acts {
        for q in &blocks[0] {
            b.trans(init, a, *q, w(r));
        }
    }
    for src in &blocks {
        for &a in &acts {
            let k = r.gen_range(1..=p.fanout.min(p.obs));
            let mut targets: Vec<usize> = (0..p.obs).collect();
            targets.shuffle(r);
            targets.truncate(k);
            for t in targets {
                let block = &blocks[t];
                // Every target state gets an in-edge; every source keeps at least one.
                let mut covered = vec![false; block.len()];
                for &q in src {
                    let d = r.gen_range(0..block.len());
                    covered[d] = true;
                    b.trans(q, a, block[d], w(r));
                    if r.gen_bool(0.4) {
                        let d2 = r.gen_range(0..block.len());
                        if d2 != d {
                            covered[d2] = true;
                            b.trans(q, a, block[d2], w(r));
                        }
                    }
                }
                for (i, c) in covered.iter().enumerate() {
                    if !c {
                        let q = *src.choose(r).unwrap();
                        b.trans(q, a, block[i], w(r));
                    }
                }
            }
        }
    }
    b.build().expect("random limited game builds")
}

/// Random partial-observation game on at most `max_states` states. With
/// `visible`, a transition's weight depends only on (source observation,
/// action, target observation).
pub fn random_partial(r: &mut ChaCha8Rng, max_states: usize, visible: bool) -> Game {
    let n = r.gen_range(2..=max_states);
    let mut b = GameBuilder::new("random-partial");
    let qs: Vec<usize> = (0..n).map(|i| b.state(format!("q{i}"))).collect();
    let acts: Vec<usize> = (0..r.gen_range(1..=2)).map(|i| b.action(format!("a{i}"))).collect();
    let blocks = r.gen_range(1..=n);
    let mut obs_of: Vec<usize> = (0..n).map(|i| if i < blocks { i } else { r.gen_range(0..blocks) }).collect();
    obs_of.shuffle(r);
    for o in 0..blocks {
        let members: Vec<usize> = qs.iter().copied().filter(|&q| obs_of[q] == o).collect();
        b.observation(format!("o{o}"), members);
    }
    b.initial(qs[r.gen_range(0..n)]);
    let mut table: BTreeMap<(usize, usize, usize), i64> = BTreeMap::new();
    for &q in &qs {
        for &a in &acts {
            let mut dsts: BTreeSet<usize> = BTreeSet::new();
            for _ in 0..r.gen_range(1..=2) {
                dsts.insert(r.gen_range(0..n));
            }
            for d in dsts {
                let wgt = if visible {
                    let key = (obs_of[q], a, obs_of[d]);
                    *table.entry(key).or_insert_with(|| r.gen_range(-3..=3))
                } else {
                    r.gen_range(-3..=3)
                };
                b.trans(q, a, d, wgt);
            }
        }
    }
    b.build().expect("random partial game builds")
}

/// Random walk of `len` steps along `post_obs`, starting at `start`.
pub fn random_walk(r: &mut ChaCha8Rng, g: &Game, start: usize, len: usize) -> AbstractPath {
    let mut p = AbstractPath::single(start);
    for _ in 0..len {
        let a = r.gen_range(0..g.num_actions());
        let posts = g.post_obs(p.last(), a);
        let o = *posts.choose(r).expect("total game");
        p.push(a, o);
    }
    p
}

/// Random abstract cycle anchored at `anchor`, of length at most `max_len`.
pub fn random_cycle(r: &mut ChaCha8Rng, g: &Game, anchor: usize, max_len: usize) -> Option<AbstractPath> {
    for _ in 0..200 {
        let mut p = AbstractPath::single(anchor);
        for _ in 0..max_len {
            let a = r.gen_range(0..g.num_actions());
            let posts = g.post_obs(p.last(), a);
            let o = *posts.choose(r).unwrap();
            p.push(a, o);
            if o == anchor && r.gen_bool(0.5) {
                return Some(p);
            }
        }
        if p.is_cycle() {
            return Some(p);
        }
    }
    None
}

/// Random function on observation `o`, finite with values in `range`, each
/// coordinate masked with probability `mask_p`.
pub fn random_function(r: &mut ChaCha8Rng, g: &Game, o: usize, range: i64, mask_p: f64) -> WeightFunction {
    WeightFunction::from_entries(
        g.observation(o)
            .iter()
            .map(|&q| {
                let v = if r.gen_bool(mask_p) { ExtValue::PlusInf } else { ExtValue::Finite(r.gen_range(-range..=range)) };
                (q, v)
            })
            .collect(),
    )
}

/// `min{f₀(π[0]) + w(π)}` per end state, by enumerating `γ(ψ)`.
pub fn brute_min_path(g: &Game, psi: &AbstractPath, f0: &WeightFunction) -> BTreeMap<usize, ExtValue> {
    let mut out: BTreeMap<usize, ExtValue> = BTreeMap::new();
    for pi in gamma_enumerate(g, psi) {
        let start = f0.get(pi.states[0]);
        let v = match start {
            ExtValue::Finite(x) => {
                let mut total = x;
                for i in 0..pi.actions.len() {
                    total += g.weight(pi.states[i], pi.actions[i], pi.states[i + 1]).unwrap();
                }
                ExtValue::Finite(total)
            }
            ExtValue::PlusInf => ExtValue::PlusInf,
            ExtValue::Bottom => continue,
        };
        let end = *pi.states.last().unwrap();
        out.entry(end).and_modify(|x| *x = ext_min(*x, v)).or_insert(v);
    }
    out
}

fn ext_min(a: ExtValue, b: ExtValue) -> ExtValue {
    match (a, b) {
        (ExtValue::Finite(x), ExtValue::Finite(y)) => ExtValue::Finite(x.min(y)),
        (ExtValue::Finite(_), _) => a,
        _ => b,
    }
}

/// Brute-force `B[i][j]`: least weight of a concrete `ρ`-path from the i-th
/// to the j-th state of `o₀`.
pub fn brute_cycle_matrix(g: &Game, rho: &AbstractPath) -> Vec<Vec<Option<i64>>> {
    let states = g.observation(rho.first()).to_vec();
    let idx = |q: usize| states.iter().position(|&s| s == q).unwrap();
    let mut m = vec![vec![None; states.len()]; states.len()];
    for pi in gamma_enumerate(g, rho) {
        let mut total = 0;
        for i in 0..pi.actions.len() {
            total += g.weight(pi.states[i], pi.actions[i], pi.states[i + 1]).unwrap();
        }
        let (i, j) = (idx(pi.states[0]), idx(*pi.states.last().unwrap()));
        let cell: &mut Option<i64> = &mut m[i][j];
        *cell = Some(cell.map_or(total, |c: i64| c.min(total)));
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleClass {
    Good,
    Bad,
    Neither,
}

type Matrix = Vec<Vec<Option<i64>>>;

/// Searches a function `f₀` on `o₀` that witnesses every matrix at once:
/// mask-free with `f₀ ⪯₀ fₙ` when `good`, otherwise finite somewhere with
/// `fₙ ⪯₁ f₀`. Values range over `0..=R` with `R = |o₀|·(1 + max|B|)`.
fn witness_search(g: &Game, anchor: usize, mats: &[Matrix], good: bool) -> bool {
    let states = g.observation(anchor).to_vec();
    let n = states.len();
    let maxabs = mats.iter().flatten().flatten().flatten().map(|v| v.abs()).max().unwrap_or(0);
    let bound = n as i64 * (1 + maxabs);
    let to_wf = |v: &[Option<i64>]| {
        WeightFunction::from_entries(
            states.iter().zip(v).map(|(&q, x)| (q, x.map_or(ExtValue::PlusInf, ExtValue::Finite))).collect(),
        )
    };
    // None = +∞ (masked or unreachable).
    let apply = |m: &Matrix, f0: &[Option<i64>]| -> Vec<Option<i64>> {
        (0..n).map(|j| (0..n).filter_map(|i| Some(f0[i]? + m[i][j]?)).min()).collect()
    };
    let radix = bound as usize + 2; // last digit encodes +∞
    for code in 0..radix.pow(n as u32) {
        let mut c = code;
        let mut f0 = Vec::with_capacity(n);
        for _ in 0..n {
            let d = c % radix;
            c /= radix;
            f0.push(if d == radix - 1 { None } else { Some(d as i64) });
        }
        let w0 = to_wf(&f0);
        let ok = if good {
            f0.iter().all(Option::is_some)
                && mats.iter().all(|m| {
                    let fnn = apply(m, &f0);
                    fnn.iter().all(Option::is_some) && preceq(0, &w0, &to_wf(&fnn))
                })
        } else {
            f0.iter().any(Option::is_some) && mats.iter().all(|m| preceq(1, &to_wf(&apply(m, &f0)), &w0))
        };
        if ok {
            return true;
        }
    }
    false
}

/// Class of a cycle straight from the witness definitions.
pub fn bounded_witness_class(g: &Game, rho: &AbstractPath) -> OracleClass {
    let m = [brute_cycle_matrix(g, rho)];
    match (witness_search(g, rho.first(), &m, true), witness_search(g, rho.first(), &m, false)) {
        (true, false) => OracleClass::Good,
        (false, true) => OracleClass::Bad,
        (false, false) => OracleClass::Neither,
        (true, true) => panic!("cycle is both good and bad"),
    }
}

/// Whether cycles anchored at the same observation share one good
/// (`good`) or bad witness.
pub fn common_witness(g: &Game, cycles: &[&AbstractPath], good: bool) -> bool {
    let mats: Vec<Matrix> = cycles.iter().map(|c| brute_cycle_matrix(g, c)).collect();
    witness_search(g, cycles[0].first(), &mats, good)
}

/// Least weight of a concrete cycle `q → q` refining `ρ`, per start state,
/// by layered relaxation over transitions.
pub fn min_concrete_cycles(g: &Game, rho: &AbstractPath) -> Vec<Option<i64>> {
    g.observation(rho.first())
        .iter()
        .map(|&start| {
            let mut layer: BTreeMap<usize, i64> = BTreeMap::from([(start, 0)]);
            for (i, &a) in rho.actions.iter().enumerate() {
                let mut next: BTreeMap<usize, i64> = BTreeMap::new();
                for (&q, &v) in &layer {
                    for t in g.transitions().iter().filter(|t| t.src == q && t.action == a) {
                        if g.obs_of(t.dst) == rho.obs[i + 1] {
                            let e = next.entry(t.dst).or_insert(i64::MAX);
                            *e = (*e).min(v + t.weight);
                        }
                    }
                }
                layer = next;
            }
            layer.get(&start).copied()
        })
        .collect()
}

/// Simple abstract cycles of the observation graph, rooted at their least
/// observation, capped at `budget`.
pub fn simple_cycles(g: &Game, budget: usize) -> Vec<AbstractPath> {
    let mut out = Vec::new();
    fn dfs(g: &Game, start: usize, path: &mut AbstractPath, on: &mut [bool], out: &mut Vec<AbstractPath>, budget: usize) {
        for a in 0..g.num_actions() {
            for o in g.post_obs(path.last(), a) {
                if out.len() >= budget {
                    return;
                }
                if o == start {
                    let mut c = path.clone();
                    c.push(a, o);
                    out.push(c);
                } else if o > start && !on[o] {
                    on[o] = true;
                    path.push(a, o);
                    dfs(g, start, path, on, out, budget);
                    path.obs.pop();
                    path.actions.pop();
                    on[o] = false;
                }
            }
        }
    }
    let mut on = vec![false; g.num_obs()];
    for start in 0..g.num_obs() {
        on[start] = true;
        let mut p = AbstractPath::single(start);
        dfs(g, start, &mut p, &mut on, &mut out, budget);
        on[start] = false;
    }
    out
}

pub fn digraph(n: usize, edges: &[(usize, usize)]) -> Digraph {
    Digraph::new((0..n).map(|i| format!("v{i}")).collect(), edges.to_vec()).expect("valid graph")
}

/// Built-in, QBF, Hamiltonian and random limited games.
pub fn corpus() -> Vec<Game> {
    let mut out: Vec<Game> = ["fig1", "fig2", "zeroloop"].iter().map(|n| builtin_game(n).unwrap()).collect();
    for (name, text, _) in QBF_SUITE {
        let phi = parse_qbf(text).unwrap();
        for v in [QbfVariant::Membership, QbfVariant::Winner] {
            let mut g = gen_qbf(&phi, v).unwrap();
            g.set_name(format!("{} [{v:?}]", name));
            out.push(g);
        }
    }
    for (n, edges) in [
        (3, vec![(0, 1), (1, 2), (2, 0)]),
        (3, vec![(0, 1), (1, 0), (1, 2)]),
        (4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]),
    ] {
        out.push(gen_hamiltonian(&digraph(n, &edges)).unwrap());
    }
    out.push(gen_expmem(1).unwrap());
    let mut r = rng(2024);
    for i in 0..12 {
        let mut g = random_limited(&mut r, &LimitedParams::default());
        g.set_name(format!("random-limited-{i}"));
        out.push(g);
    }
    out
}

/// Brute-force Hamiltonian cycle test over vertex permutations.
pub fn brute_hamiltonian(n: usize, edges: &[(usize, usize)]) -> bool {
    let has = |u: usize, v: usize| edges.contains(&(u, v));
    let mut perm: Vec<usize> = (1..n).collect();
    fn permute(k: usize, perm: &mut Vec<usize>, check: &dyn Fn(&[usize]) -> bool) -> bool {
        if k == perm.len() {
            return check(perm);
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            if permute(k + 1, perm, check) {
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    let check = |p: &[usize]| {
        let mut order = vec![0];
        order.extend_from_slice(p);
        (0..n).all(|i| has(order[i], order[(i + 1) % n]))
    };
    permute(0, &mut perm, &check)
}

/// Eve wins if some observation-based positional strategy leaves no
/// reachable negative concrete cycle (exhaustive over strategies).
pub fn eve_positional_heuristic(g: &Game) -> Option<bool> {
    let no = g.num_obs();
    let na = g.num_actions();
    let total = na.checked_pow(no as u32)?;
    if total > 4096 {
        return None;
    }
    for code in 0..total {
        let choice: Vec<usize> = (0..no).map(|o| code / na.pow(o as u32) % na).collect();
        let n = g.num_states();
        // Reachable states under the strategy.
        let mut reach = vec![false; n];
        let mut stack = vec![g.initial()];
        reach[g.initial()] = true;
        while let Some(q) = stack.pop() {
            for &(d, _) in g.successors(q, choice[g.obs_of(q)]) {
                if !reach[d] {
                    reach[d] = true;
                    stack.push(d);
                }
            }
        }
        // Bellman-Ford from a virtual source over reachable states.
        let mut dist = vec![0i64; n];
        let mut changed = true;
        for _ in 0..=n {
            changed = false;
            for q in (0..n).filter(|&q| reach[q]) {
                for &(d, w) in g.successors(q, choice[g.obs_of(q)]) {
                    if dist[q] + w < dist[d] {
                        dist[d] = dist[q] + w;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Some(true);
        }
    }
    None
}

/// Adam wins if he wins even when Eve sees states: perfect-information
/// value iteration with the standard `2·n·W` error bound.
pub fn adam_perfect_info_heuristic(g: &Game) -> Option<bool> {
    let n = g.num_states();
    let w = g.max_abs_weight().max(1);
    let k = (4 * n * n * n) as i64 * w + 1;
    let mut v = vec![0i64; n];
    for _ in 0..k {
        v = (0..n)
            .map(|q| {
                (0..g.num_actions())
                    .map(|a| g.successors(q, a).iter().map(|&(d, wt)| wt + v[d]).min().unwrap())
                    .max()
                    .unwrap()
            })
            .collect();
    }
    let q = g.initial();
    // value ∈ [v/k − 2nW/k, v/k + 2nW/k]
    if v[q] + 2 * n as i64 * w < 0 {
        Some(true)
    } else {
        None
    }
}
