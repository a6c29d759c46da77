//! Good / bad classification of abstract cycles.
//!
//! One traversal of a cycle `ρ` acts on functions over `o₀` as a min-plus
//! matrix `A`. A cycle is good iff `A` has no negative cycle (a feasible
//! potential gives a mask-free `f₀ ⪯₀ fₙ`), and bad iff some cycle of `A`
//! has mean at most −1 (potentials along that cycle give `fₙ ⪯₁ f₀`).

use num_rational::Ratio;

use crate::error::{MpgError, Result};
use crate::game::{Game, StateId};
use crate::graph;
use crate::path::AbstractPath;
use crate::weights::{min_path_weights, ExtValue, WeightFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CycleClass {
    Good,
    Bad,
    Neither,
}

/// `A[i][j]`: minimum weight of a concrete `ρ`-path from the `i`-th to the
/// `j`-th state of `o₀`, or `None` when there is no such path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleMatrix {
    pub states: Vec<StateId>,
    pub entries: Vec<Vec<Option<i64>>>,
}

impl CycleMatrix {
    pub fn edges(&self) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if let Some(w) = e {
                    out.push((i, j, *w));
                }
            }
        }
        out
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.entries.iter().flatten().flatten().map(|w| w.abs()).max().unwrap_or(0)
    }
}

pub fn cycle_matrix(g: &Game, rho: &AbstractPath) -> Result<CycleMatrix> {
    if !rho.is_cycle() {
        return Err(MpgError::NotACycle);
    }
    rho.validate(g)?;
    let states = g.observation(rho.first()).to_vec();
    let mut entries = Vec::with_capacity(states.len());
    for &src in &states {
        let unit = WeightFunction::from_entries(
            states
                .iter()
                .map(|&q| (q, if q == src { ExtValue::Finite(0) } else { ExtValue::PlusInf }))
                .collect(),
        );
        let out = min_path_weights(g, rho, &unit)?;
        entries.push(states.iter().map(|&q| out.get(q).finite()).collect());
    }
    Ok(CycleMatrix { states, entries })
}

pub fn min_cycle_mean(m: &CycleMatrix) -> Option<Ratio<i64>> {
    graph::min_cycle_mean(m.states.len(), &m.edges())
}

pub fn classify_matrix(m: &CycleMatrix) -> CycleClass {
    match min_cycle_mean(m) {
        None => CycleClass::Good,
        Some(mean) if mean >= Ratio::from_integer(0) => CycleClass::Good,
        Some(mean) if mean <= Ratio::from_integer(-1) => CycleClass::Bad,
        Some(_) => CycleClass::Neither,
    }
}

pub fn classify_cycle(g: &Game, rho: &AbstractPath) -> Result<CycleClass> {
    let m = cycle_matrix(g, rho)?;
    let class = classify_matrix(&m);
    debug_assert_eq!(
        class == CycleClass::Good,
        graph::negative_cycle(m.states.len(), &m.edges(), None).is_none()
    );
    Ok(class)
}
