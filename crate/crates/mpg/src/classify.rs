//! Class-membership predicates.

use std::collections::BTreeMap;

use crate::belief::build_belief_game;
use crate::cycle_game::{solve_gamma_bounded, solve_gamma_prime_tree, verdict_of, PlayNode};
use crate::error::Result;
use crate::game::Game;
use crate::verdict::Verdict;
use crate::weights::SuccessorMode;

/// Every leaf of the simple-support game is good or bad; otherwise returns
/// the first unresolved leaf.
pub fn is_fac(g: &Game, mode: SuccessorMode) -> Result<(bool, Option<PlayNode>)> {
    let tree = solve_gamma_prime_tree(g, mode)?;
    let leaf = tree.first_dead_leaf();
    Ok((leaf.is_none(), leaf))
}

/// Some player wins the simple-support game.
pub fn is_forcibly_fac(g: &Game, mode: SuccessorMode) -> Result<(bool, Verdict)> {
    let v = verdict_of(&solve_gamma_prime_tree(g, mode)?);
    Ok((v.tag.is_decided(), v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Termination {
    Yes(Verdict),
    Unknown,
}

pub fn is_forcibly_terminating_bounded(g: &Game, depth: usize, mode: SuccessorMode) -> Result<Termination> {
    let v = solve_gamma_bounded(g, depth, mode)?;
    Ok(if v.tag.is_decided() { Termination::Yes(v) } else { Termination::Unknown })
}

/// All `σ`-transitions between a given pair of observations carry one weight.
pub fn is_visible_weights(g: &Game) -> bool {
    let mut seen: BTreeMap<(usize, usize, usize), i64> = BTreeMap::new();
    g.transitions().iter().all(|t| {
        let key = (g.obs_of(t.src), t.action, g.obs_of(t.dst));
        *seen.entry(key).or_insert(t.weight) == t.weight
    })
}

pub fn is_fbc(g: &Game, mode: SuccessorMode) -> Result<(bool, Option<PlayNode>)> {
    is_fac(&build_belief_game(g)?, mode)
}

pub fn is_forcibly_fbc(g: &Game, mode: SuccessorMode) -> Result<(bool, Verdict)> {
    is_forcibly_fac(&build_belief_game(g)?, mode)
}
