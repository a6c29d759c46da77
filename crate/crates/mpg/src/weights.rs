//! Weight functions `Q → ℤ ∪ {+∞, ⊥}`, their σ-successors and the `⪯_k` orders.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{MpgError, Result};
use crate::game::{ActionId, Game, ObsId, StateId};
use crate::path::AbstractPath;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtValue {
    Bottom,
    Finite(i64),
    PlusInf,
}

impl ExtValue {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// `self + w`, with `+∞ + w = +∞`.
    pub fn add(self, w: i64) -> Result<ExtValue> {
        match self {
            ExtValue::Finite(v) => v.checked_add(w).map(ExtValue::Finite).ok_or(MpgError::Overflow),
            other => Ok(other),
        }
    }

    /// Order on non-⊥ values: finite < +∞.
    fn cmp_value(self, other: ExtValue) -> Ordering {
        match (self, other) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => a.cmp(&b),
            (ExtValue::Finite(_), ExtValue::PlusInf) => Ordering::Less,
            (ExtValue::PlusInf, ExtValue::Finite(_)) => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    fn min(self, other: ExtValue) -> ExtValue {
        if self.cmp_value(other) == Ordering::Greater {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Bottom => write!(f, "_"),
            ExtValue::Finite(v) => write!(f, "{v}"),
            ExtValue::PlusInf => write!(f, "+inf"),
        }
    }
}

/// Sparse weight function: entries for the support only, sorted by state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct WeightFunction {
    entries: Vec<(StateId, ExtValue)>,
}

impl WeightFunction {
    /// Entries with `⊥` values are dropped.
    pub fn from_entries(mut entries: Vec<(StateId, ExtValue)>) -> Self {
        entries.retain(|(_, v)| *v != ExtValue::Bottom);
        entries.sort_by_key(|(q, _)| *q);
        entries.dedup_by_key(|(q, _)| *q);
        WeightFunction { entries }
    }

    pub fn finite(entries: &[(StateId, i64)]) -> Self {
        Self::from_entries(entries.iter().map(|&(q, v)| (q, ExtValue::Finite(v))).collect())
    }

    /// `f_I`: 0 on the initial state, ⊥ elsewhere.
    pub fn initial(g: &Game) -> Self {
        Self::finite(&[(g.initial(), 0)])
    }

    pub fn entries(&self) -> &[(StateId, ExtValue)] {
        &self.entries
    }

    pub fn get(&self, q: StateId) -> ExtValue {
        match self.entries.binary_search_by_key(&q, |(s, _)| *s) {
            Ok(i) => self.entries[i].1,
            Err(_) => ExtValue::Bottom,
        }
    }

    pub fn support(&self) -> Vec<StateId> {
        self.entries.iter().map(|(q, _)| *q).collect()
    }

    pub fn support_obs(&self, g: &Game) -> Option<ObsId> {
        g.obs_with_states(&self.support())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_finite(&self) -> bool {
        self.entries.iter().any(|(_, v)| v.is_finite())
    }

    pub fn min_finite(&self) -> Option<i64> {
        self.entries.iter().filter_map(|(_, v)| v.finite()).min()
    }

    pub fn max_finite(&self) -> Option<i64> {
        self.entries.iter().filter_map(|(_, v)| v.finite()).max()
    }

    pub fn render(&self, g: &Game) -> String {
        let parts: Vec<String> =
            self.entries.iter().map(|(q, v)| format!("{}:{}", g.state_name(*q), v)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// `f ⪯_k f'`: equal supports and `f(q) + k ≤ f'(q)` on the support.
pub fn preceq(k: i64, f: &WeightFunction, f2: &WeightFunction) -> bool {
    if f.entries.len() != f2.entries.len() {
        return false;
    }
    f.entries.iter().zip(&f2.entries).all(|(&(q, a), &(q2, b))| {
        q == q2
            && match (a, b) {
                (ExtValue::PlusInf, ExtValue::PlusInf) => true,
                (ExtValue::PlusInf, _) => false,
                (ExtValue::Finite(_), ExtValue::PlusInf) => true,
                (ExtValue::Finite(x), ExtValue::Finite(y)) => (x as i128) + (k as i128) <= y as i128,
                _ => false,
            }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Hash)]
pub enum SuccessorMode {
    /// Pointwise-minimal successors only.
    #[default]
    Proper,
    /// Every coordinate may additionally be masked to `+∞`.
    Masked,
}

/// Largest observation for which masked enumeration is attempted.
pub const MAX_MASK_BITS: usize = 20;

/// Proper σ-successors of `f`, one per observation met by `post_σ(supp f)`,
/// ordered by observation index.
pub fn proper_successors(g: &Game, f: &WeightFunction, a: ActionId) -> Result<Vec<(ObsId, WeightFunction)>> {
    g.check_action(a)?;
    let mut best: Vec<(StateId, ExtValue)> = Vec::new();
    for &(q, v) in &f.entries {
        for &(d, w) in g.successors(q, a) {
            let cand = v.add(w)?;
            match best.iter_mut().find(|(s, _)| *s == d) {
                Some(slot) => slot.1 = slot.1.min(cand),
                None => best.push((d, cand)),
            }
        }
    }
    best.sort_by_key(|&(q, _)| (g.obs_of(q), q));
    let mut out: Vec<(ObsId, WeightFunction)> = Vec::new();
    for (q, v) in best {
        let o = g.obs_of(q);
        match out.last_mut() {
            Some((lo, lf)) if *lo == o => lf.entries.push((q, v)),
            _ => out.push((o, WeightFunction { entries: vec![(q, v)] })),
        }
    }
    Ok(out)
}

/// The proper σ-successor landing in observation `o`, if any.
pub fn proper_successor_in(g: &Game, f: &WeightFunction, a: ActionId, o: ObsId) -> Result<Option<WeightFunction>> {
    Ok(proper_successors(g, f, a)?.into_iter().find(|(o2, _)| *o2 == o).map(|(_, f)| f))
}

/// σ-successors in the given mode, ordered by (observation, mask ascending);
/// mask 0 is the proper successor.
pub fn successors(g: &Game, f: &WeightFunction, a: ActionId, mode: SuccessorMode) -> Result<Vec<(ObsId, WeightFunction)>> {
    let proper = proper_successors(g, f, a)?;
    if mode == SuccessorMode::Proper {
        return Ok(proper);
    }
    let mut out = Vec::new();
    for (o, base) in proper {
        let k = base.entries.len();
        if k > MAX_MASK_BITS {
            return Err(MpgError::Invalid(format!("observation too large for masked mode ({k} states)")));
        }
        for mask in 0u32..(1u32 << k) {
            let entries = base
                .entries
                .iter()
                .enumerate()
                .map(|(j, &(q, v))| if mask >> j & 1 == 1 { (q, ExtValue::PlusInf) } else { (q, v) })
                .collect();
            out.push((o, WeightFunction { entries }));
        }
    }
    Ok(out)
}

/// `ξ(ψ, f₀)`: proper propagation of `f₀` along `ψ`. Each coordinate is the
/// minimum of `f₀(π[0]) + w(π)` over concrete paths refining `ψ` ending there.
pub fn min_path_weights(g: &Game, psi: &AbstractPath, f0: &WeightFunction) -> Result<WeightFunction> {
    let mut f = f0.clone();
    for (i, &a) in psi.actions.iter().enumerate() {
        f = proper_successor_in(g, &f, a, psi.obs[i + 1])?.unwrap_or_default();
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::builtin_game;

    fn fx(g: &Game, pairs: &[(&str, ExtValue)]) -> WeightFunction {
        WeightFunction::from_entries(pairs.iter().map(|(n, v)| (g.state_id(n).unwrap(), *v)).collect())
    }

    use ExtValue::{Finite as F, PlusInf as Inf};

    #[test]
    fn preceq_examples() {
        let g = builtin_game("fig2").unwrap();
        let f2 = fx(&g, &[("q1", F(-1)), ("q2", F(-1))]);
        let f = fx(&g, &[("q1", F(0)), ("q2", F(0))]);
        assert!(preceq(1, &f2, &f));
        assert!(!preceq(2, &f2, &f));
        assert!(preceq(0, &f, &f));
        let inf = fx(&g, &[("q1", Inf)]);
        for k in 0..5 {
            assert!(preceq(k, &inf, &inf));
        }
        assert!(!preceq(0, &inf, &fx(&g, &[("q1", F(3))])));
        assert!(!preceq(0, &f, &fx(&g, &[("q1", F(0))])));
    }

    #[test]
    fn proper_successor_examples() {
        let g = builtin_game("fig1").unwrap();
        let a = g.action_id("a").unwrap();
        let s = successors(&g, &WeightFunction::initial(&g), a, SuccessorMode::Proper).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].1, fx(&g, &[("q1", F(-1)), ("q2", F(-1))]));

        let g = builtin_game("fig2").unwrap();
        let b = g.action_id("b").unwrap();
        let f = fx(&g, &[("q1", F(0)), ("q2", F(0))]);
        let s = successors(&g, &f, b, SuccessorMode::Proper).unwrap();
        let fs: Vec<_> = s.into_iter().map(|(_, f)| f).collect();
        assert_eq!(fs, vec![fx(&g, &[("q1", F(-1)), ("q2", F(-1))]), fx(&g, &[("q3", F(0))])]);
    }

    #[test]
    fn masked_successors() {
        let g = builtin_game("fig2").unwrap();
        let b = g.action_id("b").unwrap();
        let f = fx(&g, &[("q1", F(0)), ("q2", F(0))]);
        let s = successors(&g, &f, b, SuccessorMode::Masked).unwrap();
        let fs: Vec<_> = s.into_iter().map(|(_, f)| f).collect();
        assert_eq!(
            fs,
            vec![
                fx(&g, &[("q1", F(-1)), ("q2", F(-1))]),
                fx(&g, &[("q1", Inf), ("q2", F(-1))]),
                fx(&g, &[("q1", F(-1)), ("q2", Inf)]),
                fx(&g, &[("q1", Inf), ("q2", Inf)]),
                fx(&g, &[("q3", F(0))]),
                fx(&g, &[("q3", Inf)]),
            ]
        );
    }

    #[test]
    fn min_path_examples() {
        let g = builtin_game("fig1").unwrap();
        let a = g.action_id("a").unwrap();
        let o = |n| g.obs_of(g.state_id(n).unwrap());
        let psi = AbstractPath::new(vec![o("q0"), o("q1"), o("q0")], vec![a, a]).unwrap();
        let fi = WeightFunction::initial(&g);
        assert_eq!(min_path_weights(&g, &psi, &fi).unwrap(), fx(&g, &[("q0", F(-2))]));
        assert_eq!(min_path_weights(&g, &AbstractPath::single(o("q0")), &fi).unwrap(), fi);

        let g = builtin_game("fig2").unwrap();
        let a = g.action_id("a").unwrap();
        let o = |n| g.obs_of(g.state_id(n).unwrap());
        let psi = AbstractPath::new(vec![o("q0"), o("q1"), o("q1")], vec![a, a]).unwrap();
        let got = min_path_weights(&g, &psi, &WeightFunction::initial(&g)).unwrap();
        assert_eq!(got, fx(&g, &[("q1", F(0)), ("q2", F(-1))]));
    }

    #[test]
    fn render_omits_bottom() {
        let g = builtin_game("fig2").unwrap();
        let f = fx(&g, &[("q1", F(-1)), ("q2", Inf), ("q3", ExtValue::Bottom)]);
        assert_eq!(f.render(&g), "{q1:-1, q2:+inf}");
    }

    #[test]
    fn overflow_is_reported() {
        let g = builtin_game("fig1").unwrap();
        let a = g.action_id("a").unwrap();
        let f = WeightFunction::finite(&[(g.initial(), i64::MIN)]);
        assert_eq!(proper_successors(&g, &f, a), Err(MpgError::Overflow));
    }
}
