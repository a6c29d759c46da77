//! Built-in example games and reduction gadgets (quantified boolean
//! formulas, Hamiltonian cycles).
//!
//! QBF gadget layout, variables `v₀ … vₙ₋₁` in quantifier order:
//!
//! * literal observations `L:v = {x:v, z:v}` and `NL:v = {nx:v, nz:v}`,
//!   merge observation `B:v = {bm:v, bz:v}`; clause observations
//!   `Cj = {cj, czj}`;
//! * `B:v₋₁` (or `qI`) enters both states of the chosen literal observation
//!   with weight 0: universal variables let Adam pick, existential ones map
//!   action `v` / `~v` to `L:v` / `NL:v` and everything else to the sink;
//! * `L:v → B:v` weighs `x → bm` −1 and `z → bz` 0, `NL:v → B:v` weighs
//!   `nx → bm` 0 and `nz → bz` −1, so the two literals leave incomparable
//!   functions on `B:v`;
//! * `B:vₙ₋₁` enters every clause with weight 0; from `Cj` the action of a
//!   literal of `vᵢ` in the clause leads to that literal's observation with
//!   weight `n − i`, which restores the function first seen there.
//!
//! Revisiting an already chosen literal closes a good cycle; revisiting the
//! other literal leaves an unresolved merge. The membership variant ends
//! non-literal moves in a neutral sink. The winner variant adds, in every
//! non-initial non-sink observation, tracker states `y:v` / `ny:v` that
//! record which literal was chosen and give Adam a weight-0 return to `qI`
//! from the literal observations; it uses a losing sink for Eve.

use crate::error::{MpgError, Result};
use crate::game::{ActionId, Game, GameBuilder, StateId};

pub const BUILTIN_NAMES: [&str; 3] = ["fig1", "fig2", "zeroloop"];

pub fn builtin_game(name: &str) -> Result<Game> {
    match name {
        "fig1" => {
            let mut b = GameBuilder::new("fig1");
            let q: Vec<StateId> = (0..4).map(|i| b.state(format!("q{i}"))).collect();
            let a = b.action("a");
            let bb = b.action("b");
            b.observation("o0", vec![q[0]]);
            b.observation("o12", vec![q[1], q[2]]);
            b.observation("o3", vec![q[3]]);
            b.initial(q[0]);
            b.trans_all(q[0], q[1], -1);
            b.trans_all(q[0], q[2], -1);
            b.trans(q[1], a, q[0], -1);
            b.trans(q[2], bb, q[0], -1);
            b.trans(q[1], bb, q[3], -1);
            b.trans(q[2], a, q[3], -1);
            b.trans_all(q[3], q[3], 1);
            b.build()
        }
        "fig2" => {
            let mut b = GameBuilder::new("fig2");
            let q: Vec<StateId> = (0..4).map(|i| b.state(format!("q{i}"))).collect();
            let a = b.action("a");
            let bb = b.action("b");
            b.observation("o0", vec![q[0]]);
            b.observation("o12", vec![q[1], q[2]]);
            b.observation("o3", vec![q[3]]);
            b.initial(q[0]);
            b.trans_all(q[0], q[1], 0);
            b.trans_all(q[0], q[2], 0);
            b.trans(q[1], a, q[1], 0);
            b.trans(q[1], bb, q[1], -1);
            b.trans(q[1], bb, q[2], -1);
            b.trans(q[2], a, q[2], -1);
            b.trans(q[2], bb, q[3], 0);
            b.trans_all(q[3], q[3], 1);
            b.build()
        }
        "zeroloop" => {
            let mut b = GameBuilder::new("zeroloop");
            let q = b.state("q0");
            b.action("a");
            b.observation("o0", vec![q]);
            b.initial(q);
            b.trans_all(q, q, 0);
            b.build()
        }
        other => Err(MpgError::UnknownName(other.to_string())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// A literal: variable index and polarity (`true` = positive).
pub type Literal = (usize, bool);

/// Prenex CNF formula; variable indices follow quantifier order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qbf {
    pub vars: Vec<(Quantifier, String)>,
    pub clauses: Vec<Vec<Literal>>,
}

impl Qbf {
    pub fn new(vars: Vec<(Quantifier, String)>, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (_, v) in &vars {
            if !seen.insert(v.as_str()) {
                return Err(MpgError::Invalid(format!("variable {v} quantified twice")));
            }
        }
        let mut norm = Vec::with_capacity(clauses.len());
        for c in clauses {
            if c.is_empty() {
                return Err(MpgError::Invalid("empty clause".into()));
            }
            if let Some(&(i, _)) = c.iter().find(|(i, _)| *i >= vars.len()) {
                return Err(MpgError::Invalid(format!("literal refers to unknown variable index {i}")));
            }
            let mut c = c;
            c.sort();
            c.dedup();
            norm.push(c);
        }
        Ok(Qbf { vars, clauses: norm })
    }

    /// Truth value by exhaustive expansion of the quantifier prefix.
    pub fn evaluate(&self) -> bool {
        fn go(f: &Qbf, i: usize, asg: &mut Vec<bool>) -> bool {
            if i == f.vars.len() {
                return f.clauses.iter().all(|c| c.iter().any(|&(v, pos)| asg[v] == pos));
            }
            let branch = |val: bool, asg: &mut Vec<bool>| {
                asg.push(val);
                let r = go(f, i + 1, asg);
                asg.pop();
                r
            };
            match f.vars[i].0 {
                Quantifier::Exists => branch(false, asg) || branch(true, asg),
                Quantifier::Forall => branch(false, asg) && branch(true, asg),
            }
        }
        go(self, 0, &mut Vec::new())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (q, v) in &self.vars {
            let kw = match q {
                Quantifier::Exists => "exists",
                Quantifier::Forall => "forall",
            };
            s.push_str(&format!("{kw} {v}\n"));
        }
        for c in &self.clauses {
            let lits: Vec<String> =
                c.iter().map(|&(v, pos)| format!("{}{}", if pos { "" } else { "-" }, self.vars[v].1)).collect();
            s.push_str(&format!("clause {}\n", lits.join(" ")));
        }
        s
    }
}

/// Parses `forall x…` / `exists y…` lines followed by `clause <lit>…` lines.
pub fn parse_qbf(text: &str) -> Result<Qbf> {
    let mut vars: Vec<(Quantifier, String)> = Vec::new();
    let mut clauses = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let kw = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        let perr = |msg: String| MpgError::Parse { line: line_no, msg };
        match kw {
            "forall" | "exists" => {
                if !clauses.is_empty() {
                    return Err(perr("quantifier after clauses: formula is not prenex".into()));
                }
                if rest.is_empty() {
                    return Err(perr(format!("{kw} needs at least one variable")));
                }
                let q = if kw == "forall" { Quantifier::Forall } else { Quantifier::Exists };
                for v in rest {
                    if v.starts_with('-') {
                        return Err(perr(format!("bad variable name {v}")));
                    }
                    vars.push((q, v.to_string()));
                }
            }
            "clause" => {
                if rest.is_empty() {
                    return Err(perr("empty clause".into()));
                }
                let mut c = Vec::new();
                for lit in rest {
                    let (pos, name) = match lit.strip_prefix('-') {
                        Some(n) => (false, n),
                        None => (true, lit),
                    };
                    let v = vars
                        .iter()
                        .position(|(_, n)| n == name)
                        .ok_or_else(|| perr(format!("free variable {name}")))?;
                    c.push((v, pos));
                }
                clauses.push(c);
            }
            other => return Err(perr(format!("unknown keyword {other}"))),
        }
    }
    Qbf::new(vars, clauses)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QbfVariant {
    Membership,
    Winner,
}

pub fn gen_qbf(phi: &Qbf, variant: QbfVariant) -> Result<Game> {
    let n = phi.vars.len();
    if n == 0 {
        return Err(MpgError::Invalid("formula has no variables".into()));
    }
    let winner = variant == QbfVariant::Winner;
    let tag = if winner { "winner" } else { "membership" };
    let mut b = GameBuilder::new(format!("qbf-{tag}"));

    let pos_act: Vec<ActionId> = phi.vars.iter().map(|(_, v)| b.action(v.clone())).collect();
    let neg_act: Vec<ActionId> = phi.vars.iter().map(|(_, v)| b.action(format!("~{v}"))).collect();

    let q_init = b.state("qI");
    b.initial(q_init);
    b.observation("init", vec![q_init]);

    // Observation blocks: main states plus per-variable trackers.
    struct Block {
        main: [StateId; 2],
        y: Vec<StateId>,
        ny: Vec<StateId>,
    }
    let block = |b: &mut GameBuilder, obs: String, s0: String, s1: String| -> Block {
        let main = [b.state(s0), b.state(s1)];
        let (mut y, mut ny) = (Vec::new(), Vec::new());
        if winner {
            for (_, v) in &phi.vars {
                y.push(b.state(format!("{obs}.y:{v}")));
                ny.push(b.state(format!("{obs}.ny:{v}")));
            }
        }
        let members = main.iter().chain(&y).chain(&ny).copied().collect();
        b.observation(obs, members);
        Block { main, y, ny }
    };

    let mut lit = Vec::with_capacity(n);
    let mut nlit = Vec::with_capacity(n);
    let mut merge = Vec::with_capacity(n);
    for (_, v) in &phi.vars {
        lit.push(block(&mut b, format!("L:{v}"), format!("x:{v}"), format!("z:{v}")));
        nlit.push(block(&mut b, format!("NL:{v}"), format!("nx:{v}"), format!("nz:{v}")));
        merge.push(block(&mut b, format!("B:{v}"), format!("bm:{v}"), format!("bz:{v}")));
    }
    let clause: Vec<Block> = (0..phi.clauses.len())
        .map(|j| block(&mut b, format!("C{j}"), format!("c{j}"), format!("cz{j}")))
        .collect();

    let sink: Vec<StateId> = if winner {
        let s = b.state("sink");
        b.observation("sink", vec![s]);
        b.trans_all(s, s, -1);
        vec![s]
    } else {
        let s = [b.state("sink1"), b.state("sink2")];
        b.observation("sink", s.to_vec());
        b.trans_all(s[0], s[1], -1);
        b.trans_all(s[1], s[0], 0);
        s.to_vec()
    };

    let all_states = |blk: &Block| -> Vec<StateId> { blk.main.iter().chain(&blk.y).chain(&blk.ny).copied().collect() };
    let to_sink = |b: &mut GameBuilder, src: &[StateId], a: ActionId| {
        for &s in src {
            for &t in &sink {
                b.trans(s, a, t, 0);
            }
        }
    };
    // Block-to-block move: main states fully connected, trackers in parallel.
    let connect = |b: &mut GameBuilder, src: Option<&Block>, dst: &Block, a: ActionId, main_w: [[i64; 2]; 2], y_w: &dyn Fn(usize, bool) -> i64| {
        match src {
            None => {
                for &t in &all_states(dst) {
                    b.trans(q_init, a, t, 0);
                }
            }
            Some(s) => {
                for (i, &p) in s.main.iter().enumerate() {
                    for (j, &t) in dst.main.iter().enumerate() {
                        if main_w[i][j] != i64::MAX {
                            b.trans(p, a, t, main_w[i][j]);
                        }
                    }
                }
                for k in 0..s.y.len() {
                    b.trans(s.y[k], a, dst.y[k], y_w(k, true));
                    b.trans(s.ny[k], a, dst.ny[k], y_w(k, false));
                }
            }
        }
    };
    let full0 = [[0, 0], [0, 0]];
    let zero = |_: usize, _: bool| 0;
    let num_actions = 2 * n;

    for i in 0..n {
        let src = if i == 0 { None } else { Some(&merge[i - 1]) };
        let src_states = match src {
            Some(s) => all_states(s),
            None => vec![q_init],
        };
        for a in 0..num_actions {
            let (to_pos, to_neg) = match phi.vars[i].0 {
                Quantifier::Forall => (true, true),
                Quantifier::Exists => (a == pos_act[i], a == neg_act[i]),
            };
            if to_pos {
                connect(&mut b, src, &lit[i], a, full0, &zero);
            }
            if to_neg {
                connect(&mut b, src, &nlit[i], a, full0, &zero);
            }
            if !to_pos && !to_neg {
                to_sink(&mut b, &src_states, a);
            }
        }
        let up = |k: usize, pos: bool| i64::from(k == i && pos);
        let up_neg = |k: usize, pos: bool| i64::from(k == i && !pos);
        for a in 0..num_actions {
            connect(&mut b, Some(&lit[i]), &merge[i], a, [[-1, i64::MAX], [i64::MAX, 0]], &up);
            connect(&mut b, Some(&nlit[i]), &merge[i], a, [[0, i64::MAX], [i64::MAX, -1]], &up_neg);
            if winner {
                b.trans(lit[i].y[i], a, q_init, 0);
                b.trans(nlit[i].ny[i], a, q_init, 0);
            }
        }
    }

    let last = &merge[n - 1];
    for cl in &clause {
        for a in 0..num_actions {
            connect(&mut b, Some(last), cl, a, full0, &zero);
        }
    }
    for (j, lits) in phi.clauses.iter().enumerate() {
        for a in 0..num_actions {
            let hit = lits.iter().find(|&&(v, pos)| a == if pos { pos_act[v] } else { neg_act[v] });
            match hit {
                Some(&(v, pos)) => {
                    let w = (n - v) as i64;
                    let dst = if pos { &lit[v] } else { &nlit[v] };
                    let dip = move |k: usize, p: bool| if k == v && p == pos { -1 } else { 0 };
                    connect(&mut b, Some(&clause[j]), dst, a, [[w, i64::MAX], [i64::MAX, w]], &dip);
                }
                None => to_sink(&mut b, &all_states(&clause[j]), a),
            }
        }
    }
    b.build()
}

/// `∀x₁…xₙ ∃y₁…yₙ. ⋀ (xᵢ ∨ ¬yᵢ) ∧ (¬xᵢ ∨ yᵢ)`.
pub fn expmem_formula(n: usize) -> Result<Qbf> {
    if n == 0 {
        return Err(MpgError::Invalid("n must be positive".into()));
    }
    let mut vars: Vec<(Quantifier, String)> = (1..=n).map(|i| (Quantifier::Forall, format!("x{i}"))).collect();
    vars.extend((1..=n).map(|i| (Quantifier::Exists, format!("y{i}"))));
    let mut clauses = Vec::new();
    for i in 0..n {
        clauses.push(vec![(i, true), (n + i, false)]);
        clauses.push(vec![(i, false), (n + i, true)]);
    }
    Qbf::new(vars, clauses)
}

pub fn gen_expmem(n: usize) -> Result<Game> {
    let mut g = gen_qbf(&expmem_formula(n)?, QbfVariant::Winner)?;
    g.set_name(format!("expmem{n}"));
    Ok(g)
}

/// Simple directed graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = vertices.len();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(MpgError::Invalid(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(MpgError::Invalid(format!("self-loop on {}", vertices[u])));
            }
        }
        let mut edges = edges;
        edges.sort();
        edges.dedup();
        Ok(Digraph { vertices, edges })
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u, v)).is_ok()
    }

    /// Brute force over permutations fixing the first vertex.
    pub fn has_hamiltonian_cycle(&self) -> bool {
        let n = self.vertices.len();
        if n < 2 {
            return false;
        }
        fn go(g: &Digraph, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
            let n = used.len();
            let last = *path.last().unwrap();
            if path.len() == n {
                return g.has_edge(last, path[0]);
            }
            for v in 0..n {
                if !used[v] && g.has_edge(last, v) {
                    used[v] = true;
                    path.push(v);
                    if go(g, path, used) {
                        return true;
                    }
                    path.pop();
                    used[v] = false;
                }
            }
            false
        }
        let mut used = vec![false; n];
        used[0] = true;
        go(self, &mut vec![0], &mut used)
    }
}

/// Parses `vertex v` and `edge u v` lines.
pub fn parse_graph(text: &str) -> Result<Digraph> {
    let mut vertices: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let perr = |msg: String| MpgError::Parse { line: line_no, msg };
        match toks.as_slice() {
            ["vertex", names @ ..] if !names.is_empty() => {
                for v in names {
                    if vertices.iter().any(|x| x == v) {
                        return Err(perr(format!("duplicate vertex {v}")));
                    }
                    vertices.push(v.to_string());
                }
            }
            ["edge", u, v] => {
                let find = |x: &str| {
                    vertices.iter().position(|y| y == x).ok_or_else(|| perr(format!("unknown vertex {x}")))
                };
                edges.push((find(u)?, find(v)?));
            }
            _ => return Err(perr(format!("cannot parse `{line}`"))),
        }
    }
    Digraph::new(vertices, edges)
}

/// Vertex states with one singleton observation each, a shared `{q-, q+}`
/// hub and the initial state. Action `v` moves along edge `(u, v)` with
/// weight +1 or idles at `u` when there is no such edge. The hub enters the
/// first vertex only, at cost `1 − |V|`; `tau` returns to the hub (−1 into
/// `q-`) from vertices with an edge back to the first vertex and idles
/// elsewhere. A simple support cycle through the hub is unresolved exactly
/// when it traces a Hamiltonian cycle.
pub fn gen_hamiltonian(graph: &Digraph) -> Result<Game> {
    let n = graph.vertices.len();
    if n < 2 {
        return Err(MpgError::Invalid("graph needs at least two vertices".into()));
    }
    let mut b = GameBuilder::new("hamiltonian");
    let vs: Vec<StateId> = graph.vertices.iter().map(|v| b.state(v.clone())).collect();
    let q_init = b.state("qI");
    let plus = b.state("q+");
    let minus = b.state("q-");
    let acts: Vec<ActionId> = graph.vertices.iter().map(|v| b.action(v.clone())).collect();
    let tau = b.action("tau");
    for (i, v) in graph.vertices.iter().enumerate() {
        b.observation(format!("o:{v}"), vec![vs[i]]);
    }
    b.observation("hub", vec![minus, plus]);
    b.observation("init", vec![q_init]);
    b.initial(q_init);

    b.trans_all(q_init, plus, 0);
    b.trans_all(q_init, minus, 0);
    let leave = 1 - n as i64;
    b.trans_all(plus, vs[0], leave);
    b.trans_all(minus, vs[0], leave);
    for u in 0..n {
        for v in 0..n {
            if graph.has_edge(u, v) {
                b.trans(vs[u], acts[v], vs[v], 1);
            } else {
                b.trans(vs[u], acts[v], vs[u], 0);
            }
        }
        if graph.has_edge(u, 0) {
            b.trans(vs[u], tau, plus, 0);
            b.trans(vs[u], tau, minus, -1);
        } else {
            b.trans(vs[u], tau, vs[u], 0);
        }
    }
    b.build()
}
