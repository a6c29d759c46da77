//! The cycle-forming reachability games on function/action sequences: the
//! unbounded game (explored to a depth bound) and its simple-support
//! restriction, solved by three-valued backward induction.

use crate::error::{MpgError, Result};
use crate::game::{ActionId, Game, ObsId};
use crate::par;
use crate::verdict::{Verdict, VerdictTag, Witness};
use crate::weights::{preceq, successors, SuccessorMode, WeightFunction};

/// A sequence `f₀σ₀f₁…fₙ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlayNode {
    pub funcs: Vec<WeightFunction>,
    pub actions: Vec<ActionId>,
}

impl PlayNode {
    pub fn root(g: &Game) -> Self {
        PlayNode { funcs: vec![WeightFunction::initial(g)], actions: vec![] }
    }

    pub fn last(&self) -> &WeightFunction {
        self.funcs.last().unwrap()
    }

    /// Number of functions in the sequence.
    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub fn extended(&self, a: ActionId, f: WeightFunction) -> Self {
        let mut n = self.clone();
        n.actions.push(a);
        n.funcs.push(f);
        n
    }

    pub fn terminality(&self) -> Terminality {
        let refs: Vec<&WeightFunction> = self.funcs.iter().collect();
        terminality(&refs)
    }

    pub fn render(&self, g: &Game) -> String {
        let mut s = self.funcs[0].render(g);
        for (i, &a) in self.actions.iter().enumerate() {
            s.push_str(&format!(" -{}-> {}", g.action_name(a), self.funcs[i + 1].render(g)));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Terminality {
    /// `fᵢ ⪯₀ fₙ` for the least such `i`.
    Good(usize),
    /// `fₙ ⪯₁ fᵢ` with `fᵢ` finite somewhere, least `i`.
    Bad(usize),
    None,
}

impl Terminality {
    pub fn witness(self) -> Option<usize> {
        match self {
            Terminality::Good(i) | Terminality::Bad(i) => Some(i),
            Terminality::None => None,
        }
    }
}

fn terminality(seq: &[&WeightFunction]) -> Terminality {
    let Some((last, prefix)) = seq.split_last() else { return Terminality::None };
    if let Some(i) = prefix.iter().position(|f| preceq(0, f, last)) {
        return Terminality::Good(i);
    }
    if let Some(i) = prefix.iter().position(|f| f.has_finite() && preceq(1, last, f)) {
        return Terminality::Bad(i);
    }
    Terminality::None
}

pub fn is_terminal(node: &PlayNode) -> Terminality {
    node.terminality()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Unbounded game; explored up to a depth bound.
    Gamma,
    /// Plays stop at the first repeated support.
    GammaPrime,
}

/// Children of a non-terminal node under `σ`, in successor order.
pub fn expand(g: &Game, node: &PlayNode, a: ActionId, variant: Variant, mode: SuccessorMode) -> Result<Vec<PlayNode>> {
    if node.terminality() != Terminality::None {
        return Err(MpgError::Invalid("cannot expand a terminal node".into()));
    }
    if variant == Variant::GammaPrime && support_repeats(&node.funcs) {
        return Err(MpgError::Invalid("cannot expand a node whose last support repeats".into()));
    }
    Ok(successors(g, node.last(), a, mode)?.into_iter().map(|(_, f)| node.extended(a, f)).collect())
}

fn support_repeats(funcs: &[WeightFunction]) -> bool {
    let Some((last, prefix)) = funcs.split_last() else { return false };
    prefix.iter().any(|f| same_support(f, last))
}

fn same_support(f: &WeightFunction, h: &WeightFunction) -> bool {
    f.entries().len() == h.entries().len() && f.entries().iter().zip(h.entries()).all(|(a, b)| a.0 == b.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Eve,
    Adam,
    Neither,
    /// Cut off by the depth bound; could still go either way.
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Internal,
    Terminal(Terminality),
    /// Non-terminal repeat of an earlier support in the simple-support game.
    Repeat,
    Truncated,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub func: WeightFunction,
    pub obs: ObsId,
    pub kind: NodeKind,
    pub outcome: Outcome,
    pub branches: Vec<Branch>,
}

/// Actions with identical successor lists share one branch; `actions` is
/// ascending and its first element is the representative.
#[derive(Clone, Debug)]
pub struct Branch {
    pub actions: Vec<ActionId>,
    pub children: Vec<TreeNode>,
}

#[derive(Clone, Debug)]
pub struct SolvedTree {
    pub root: TreeNode,
    pub variant: Variant,
    pub mode: SuccessorMode,
}

impl SolvedTree {
    pub fn size(&self) -> usize {
        fn count(n: &TreeNode) -> usize {
            1 + n.branches.iter().flat_map(|b| &b.children).map(count).sum::<usize>()
        }
        count(&self.root)
    }

    /// Maximum number of functions along any root-to-leaf sequence.
    pub fn height(&self) -> usize {
        fn h(n: &TreeNode) -> usize {
            1 + n.branches.iter().flat_map(|b| &b.children).map(h).max().unwrap_or(0)
        }
        h(&self.root)
    }

    /// First non-terminal leaf in depth-first order.
    pub fn first_dead_leaf(&self) -> Option<PlayNode> {
        fn go(n: &TreeNode, path: &mut PlayNode) -> bool {
            if matches!(n.kind, NodeKind::Repeat | NodeKind::Truncated) {
                return true;
            }
            for b in &n.branches {
                for c in &b.children {
                    path.actions.push(b.actions[0]);
                    path.funcs.push(c.func.clone());
                    if go(c, path) {
                        return true;
                    }
                    path.actions.pop();
                    path.funcs.pop();
                }
            }
            false
        }
        let mut path = PlayNode { funcs: vec![self.root.func.clone()], actions: vec![] };
        go(&self.root, &mut path).then_some(path)
    }

    /// A leaf reached when neither player forces a win: at each node take the
    /// first branch with no Adam-winning child, then its first child that is
    /// not Eve-winning.
    pub fn neither_witness(&self) -> Option<PlayNode> {
        if self.root.outcome != Outcome::Neither {
            return None;
        }
        let mut path = PlayNode { funcs: vec![self.root.func.clone()], actions: vec![] };
        let mut node = &self.root;
        while node.kind == NodeKind::Internal {
            let b = node
                .branches
                .iter()
                .find(|b| b.children.iter().all(|c| c.outcome != Outcome::Adam))?;
            let c = b.children.iter().find(|c| c.outcome != Outcome::Eve)?;
            path.actions.push(b.actions[0]);
            path.funcs.push(c.func.clone());
            node = c;
        }
        Some(path)
    }

    pub fn strategy(&self, owner: Player) -> Option<StrategyTree> {
        let want = match owner {
            Player::Eve => Outcome::Eve,
            Player::Adam => Outcome::Adam,
        };
        if self.root.outcome != want {
            return None;
        }
        let mut tree = StrategyTree { owner, nodes: Vec::new() };
        tree.add(&self.root, None, 0, None);
        Some(tree)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    Eve,
    Adam,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyNode {
    pub func: WeightFunction,
    pub obs: ObsId,
    pub parent: Option<usize>,
    /// Index of the function within the play sequence.
    pub depth: usize,
    pub incoming: Option<ActionId>,
    pub terminal: Terminality,
    /// Eve: `(chosen action, child)` for every child of the chosen branch.
    /// Adam: `(action, chosen child)` for every action.
    pub moves: Vec<(ActionId, usize)>,
}

/// A winning strategy restricted to the nodes it reaches; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyTree {
    pub owner: Player,
    pub nodes: Vec<StrategyNode>,
}

impl StrategyTree {
    fn add(&mut self, n: &TreeNode, parent: Option<usize>, depth: usize, incoming: Option<ActionId>) -> usize {
        let idx = self.nodes.len();
        let terminal = match n.kind {
            NodeKind::Terminal(t) => t,
            _ => Terminality::None,
        };
        self.nodes.push(StrategyNode {
            func: n.func.clone(),
            obs: n.obs,
            parent,
            depth,
            incoming,
            terminal,
            moves: Vec::new(),
        });
        if n.kind != NodeKind::Internal {
            return idx;
        }
        let mut moves = Vec::new();
        match self.owner {
            Player::Eve => {
                let b = n
                    .branches
                    .iter()
                    .find(|b| b.children.iter().all(|c| c.outcome == Outcome::Eve))
                    .expect("Eve-winning node has a winning branch");
                let a = b.actions[0];
                for c in &b.children {
                    let ci = self.add(c, Some(idx), depth + 1, Some(a));
                    moves.push((a, ci));
                }
            }
            Player::Adam => {
                for b in &n.branches {
                    let c = b
                        .children
                        .iter()
                        .find(|c| c.outcome == Outcome::Adam)
                        .expect("Adam-winning node answers every action");
                    let ci = self.add(c, Some(idx), depth + 1, Some(b.actions[0]));
                    for &a in &b.actions {
                        moves.push((a, ci));
                    }
                }
                moves.sort();
            }
        }
        self.nodes[idx].moves = moves;
        idx
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Ancestor of `idx` at sequence position `depth`.
    pub fn ancestor(&self, mut idx: usize, depth: usize) -> usize {
        while self.nodes[idx].depth > depth {
            idx = self.nodes[idx].parent.expect("root has depth 0");
        }
        idx
    }

    pub fn play_node(&self, mut idx: usize) -> PlayNode {
        let mut funcs = Vec::new();
        let mut actions = Vec::new();
        loop {
            let n = &self.nodes[idx];
            funcs.push(n.func.clone());
            match (n.parent, n.incoming) {
                (Some(p), Some(a)) => {
                    actions.push(a);
                    idx = p;
                }
                _ => break,
            }
        }
        funcs.reverse();
        actions.reverse();
        PlayNode { funcs, actions }
    }

    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.depth + 1).max().unwrap_or(0)
    }
}

struct Ctx<'a> {
    g: &'a Game,
    variant: Variant,
    mode: SuccessorMode,
    max_len: usize,
}

/// Depth below which sibling subtrees are evaluated in parallel.
const PAR_DEPTH: usize = 6;

fn build(ctx: &Ctx, history: &[&WeightFunction], f: WeightFunction) -> Result<TreeNode> {
    let obs = f.support_obs(ctx.g).unwrap_or(usize::MAX);
    let mut seq: Vec<&WeightFunction> = history.to_vec();
    seq.push(&f);
    let term = terminality(&seq);
    let kind = if term != Terminality::None {
        NodeKind::Terminal(term)
    } else if ctx.variant == Variant::GammaPrime && history.iter().any(|h| same_support(h, &f)) {
        NodeKind::Repeat
    } else if seq.len() >= ctx.max_len {
        NodeKind::Truncated
    } else {
        NodeKind::Internal
    };
    if kind != NodeKind::Internal {
        let outcome = match kind {
            NodeKind::Terminal(Terminality::Good(_)) => Outcome::Eve,
            NodeKind::Terminal(_) => Outcome::Adam,
            NodeKind::Repeat => Outcome::Neither,
            _ => Outcome::Open,
        };
        return Ok(TreeNode { func: f, obs, kind, outcome, branches: Vec::new() });
    }

    let mut groups: Vec<(Vec<ActionId>, Vec<WeightFunction>)> = Vec::new();
    for a in 0..ctx.g.num_actions() {
        let succ: Vec<WeightFunction> = successors(ctx.g, &f, a, ctx.mode)?.into_iter().map(|(_, h)| h).collect();
        match groups.iter_mut().find(|(_, s)| *s == succ) {
            Some((acts, _)) => acts.push(a),
            None => groups.push((vec![a], succ)),
        }
    }

    let jobs: Vec<(usize, WeightFunction)> = groups
        .iter()
        .enumerate()
        .flat_map(|(gi, (_, s))| s.iter().map(move |h| (gi, h.clone())))
        .collect();
    let results: Vec<Result<TreeNode>> = if seq.len() <= PAR_DEPTH && jobs.len() > 1 {
        par::map(&jobs, |(_, h)| build(ctx, &seq, h.clone()))
    } else {
        jobs.iter().map(|(_, h)| build(ctx, &seq, h.clone())).collect()
    };
    let mut branches: Vec<Branch> =
        groups.into_iter().map(|(actions, _)| Branch { actions, children: Vec::new() }).collect();
    for ((gi, _), r) in jobs.into_iter().zip(results) {
        branches[gi].children.push(r?);
    }
    let outcome = combine(&branches);
    Ok(TreeNode { func: f, obs, kind, outcome, branches })
}

/// Three-valued backward induction with `Open` for truncated subtrees.
fn combine(branches: &[Branch]) -> Outcome {
    let all = |b: &Branch, ok: &dyn Fn(Outcome) -> bool| b.children.iter().all(|c| ok(c.outcome));
    let any = |b: &Branch, ok: &dyn Fn(Outcome) -> bool| b.children.iter().any(|c| ok(c.outcome));
    if branches.iter().any(|b| all(b, &|o| o == Outcome::Eve)) {
        return Outcome::Eve;
    }
    if branches.iter().all(|b| any(b, &|o| o == Outcome::Adam)) {
        return Outcome::Adam;
    }
    let could_eve = branches.iter().any(|b| all(b, &|o| matches!(o, Outcome::Eve | Outcome::Open)));
    let could_adam = branches.iter().all(|b| any(b, &|o| matches!(o, Outcome::Adam | Outcome::Open)));
    if could_eve || could_adam {
        Outcome::Open
    } else {
        Outcome::Neither
    }
}

fn solve(g: &Game, variant: Variant, mode: SuccessorMode, max_len: usize) -> Result<SolvedTree> {
    g.require_limited()?;
    let ctx = Ctx { g, variant, mode, max_len };
    let root = build(&ctx, &[], WeightFunction::initial(g))?;
    Ok(SolvedTree { root, variant, mode })
}

/// Full simple-support game tree (node length at most `|Obs| + 1`).
pub fn solve_gamma_prime_tree(g: &Game, mode: SuccessorMode) -> Result<SolvedTree> {
    solve(g, Variant::GammaPrime, mode, g.num_obs() + 2)
}

/// Unbounded game explored up to `depth` functions per node.
pub fn solve_gamma_bounded_tree(g: &Game, depth: usize, mode: SuccessorMode) -> Result<SolvedTree> {
    if depth < 1 {
        return Err(MpgError::DepthTooSmall);
    }
    solve(g, Variant::Gamma, mode, depth)
}

pub fn verdict_of(tree: &SolvedTree) -> Verdict {
    match tree.root.outcome {
        Outcome::Eve => Verdict {
            tag: VerdictTag::EveWins,
            witness: tree.strategy(Player::Eve).map(Witness::Eve),
        },
        Outcome::Adam => Verdict {
            tag: VerdictTag::AdamWins,
            witness: tree.strategy(Player::Adam).map(Witness::Adam),
        },
        Outcome::Neither => Verdict {
            tag: VerdictTag::Neither,
            witness: tree.neither_witness().map(Witness::DeadLeaf),
        },
        Outcome::Open => Verdict { tag: VerdictTag::Unknown, witness: None },
    }
}

pub fn solve_gamma_prime(g: &Game, mode: SuccessorMode) -> Result<Verdict> {
    Ok(verdict_of(&solve_gamma_prime_tree(g, mode)?))
}

pub fn solve_gamma_bounded(g: &Game, depth: usize, mode: SuccessorMode) -> Result<Verdict> {
    Ok(verdict_of(&solve_gamma_bounded_tree(g, depth, mode)?))
}
