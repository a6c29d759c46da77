//! Play simulation with exact tracking of minimal concrete path weights.

use std::collections::HashSet;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MpgError, Result};
use crate::game::{ActionId, Game, ObsId, StateId};
use crate::safety::SafetySolution;
use crate::strategy::{AdamMachine, EveMachine};
use crate::weights::{proper_successors, WeightFunction};

pub const EXHAUSTIVE_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptedStrategy {
    /// `prefix · period^ω`; `period` is nonempty.
    Periodic { prefix: Vec<ActionId>, period: Vec<ActionId> },
    /// Blocks `aᵏ b` for `k = 1, 2, 3, …`.
    Triangular { a: ActionId, b: ActionId },
}

impl ScriptedStrategy {
    pub fn periodic(prefix: Vec<ActionId>, period: Vec<ActionId>) -> Result<Self> {
        if period.is_empty() {
            return Err(MpgError::Invalid("periodic strategy needs a nonempty period".into()));
        }
        Ok(ScriptedStrategy::Periodic { prefix, period })
    }
}

pub fn scripted_next(s: &ScriptedStrategy, index: usize) -> ActionId {
    match s {
        ScriptedStrategy::Periodic { prefix, period } => {
            if index < prefix.len() {
                prefix[index]
            } else {
                period[(index - prefix.len()) % period.len()]
            }
        }
        ScriptedStrategy::Triangular { a, b } => {
            let (mut start, mut k) = (0usize, 1usize);
            while index >= start + k + 1 {
                start += k + 1;
                k += 1;
            }
            if index == start + k {
                *b
            } else {
                *a
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum EvePolicy {
    Machine(EveMachine),
    Positional(Vec<Option<ActionId>>),
    Scripted(ScriptedStrategy),
    /// Positional strategy on clamped functions of a safety solution.
    Safety(SafetySolution),
}

#[derive(Clone, Debug)]
pub enum AdamPolicy {
    Machine(AdamMachine),
    Positional(Vec<Vec<Option<ObsId>>>),
    Random(u64),
    /// Observation whose successor function has the smallest minimum.
    GreedyMin,
    /// Follows one concrete state along cheapest edges.
    Concrete,
}

/// Eve's per-play state: memory, safety node, or nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct EveState {
    mem: usize,
}

impl EvePolicy {
    fn init(&self, g: &Game) -> Result<(EveState, ActionId)> {
        let o = g.initial_obs();
        match self {
            EvePolicy::Machine(m) => Ok((EveState { mem: m.initial }, m.output(g, m.initial, o)?)),
            _ => Ok((EveState { mem: 0 }, self.positional_action(g, EveState { mem: 0 }, o, 0)?)),
        }
    }

    fn positional_action(&self, g: &Game, st: EveState, o: ObsId, step: usize) -> Result<ActionId> {
        match self {
            EvePolicy::Machine(m) => m.output(g, st.mem, o),
            EvePolicy::Positional(map) => {
                map.get(o).copied().flatten().ok_or_else(|| MpgError::StrategyDomain(g.obs_name(o).to_string()))
            }
            EvePolicy::Scripted(s) => Ok(scripted_next(s, step)),
            EvePolicy::Safety(sol) => sol.strategy[st.mem]
                .ok_or_else(|| MpgError::StrategyDomain(format!("clamped node {} has no safe action", st.mem))),
        }
    }

    /// Advance after `a` was played and `o_next` observed; returns the new
    /// state, the next action, and whether a memory reset happened.
    fn advance(&self, g: &Game, st: EveState, a: ActionId, o_next: ObsId, step: usize) -> Result<(EveState, ActionId, bool)> {
        match self {
            EvePolicy::Machine(m) => {
                let (m2, a2) = m.step(g, st.mem, o_next)?;
                Ok((EveState { mem: m2 }, a2, m.resets[m2]))
            }
            EvePolicy::Safety(sol) => {
                let node = sol.successor(st.mem, a, o_next).ok_or_else(|| {
                    MpgError::StrategyDomain(format!("clamped node {} has no successor in {}", st.mem, g.obs_name(o_next)))
                })?;
                let st2 = EveState { mem: node };
                Ok((st2, self.positional_action(g, st2, o_next, step)?, false))
            }
            _ => Ok((st, self.positional_action(g, st, o_next, step)?, false)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub step: usize,
    /// Action that led here; `None` on the initial row.
    pub action: Option<ActionId>,
    pub obs: ObsId,
    pub func: WeightFunction,
    pub min: Option<i64>,
    pub max: Option<i64>,
    /// `min / step`, from step 1 on.
    pub mean: Option<Ratio<i64>>,
    pub eve_reset: bool,
    pub adam_reset: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    /// Concrete states visited by a concrete adversary.
    pub concrete: Option<Vec<StateId>>,
}

impl Trace {
    pub fn horizon(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn min_value(&self) -> Option<i64> {
        self.rows.iter().filter_map(|r| r.min).min()
    }

    /// Minimal concrete mean at the last step.
    pub fn final_mean(&self) -> Option<Ratio<i64>> {
        self.rows.last().and_then(|r| r.mean)
    }

    pub fn abstract_play(&self, g: &Game) -> String {
        let mut s = g.obs_name(self.rows[0].obs).to_string();
        for r in &self.rows[1..] {
            s.push_str(&format!(" {} {}", g.action_name(r.action.unwrap()), g.obs_name(r.obs)));
        }
        s
    }

    pub fn to_tsv(&self, g: &Game) -> String {
        let mut s = String::from("step\taction\tobservation\tfunction\tmin\tmean\treset\n");
        for r in &self.rows {
            let reset = match (r.eve_reset, r.adam_reset) {
                (true, true) => "eve,adam",
                (true, false) => "eve",
                (false, true) => "adam",
                _ => "-",
            };
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.step,
                r.action.map_or("-", |a| g.action_name(a)),
                g.obs_name(r.obs),
                r.func.render(g),
                r.min.map_or("-".to_string(), |v| v.to_string()),
                r.mean.map_or("-".to_string(), |m| m.to_string()),
                reset
            ));
        }
        s
    }
}

fn row(step: usize, action: Option<ActionId>, obs: ObsId, func: WeightFunction) -> TraceRow {
    let min = func.min_finite();
    let mean = match (min, step) {
        (Some(v), s) if s > 0 => Some(Ratio::new(v, s as i64)),
        _ => None,
    };
    TraceRow { step, action, obs, max: func.max_finite(), min, func, mean, eve_reset: false, adam_reset: false }
}

pub fn simulate(g: &Game, eve: &EvePolicy, adam: &AdamPolicy, horizon: usize) -> Result<Trace> {
    if horizon < 1 {
        return Err(MpgError::Invalid("horizon must be at least 1".into()));
    }
    g.require_limited()?;
    let mut rng = match adam {
        AdamPolicy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut concrete = matches!(adam, AdamPolicy::Concrete).then(|| vec![g.initial()]);
    let mut adam_mem = match adam {
        AdamPolicy::Machine(m) => m.initial,
        _ => 0,
    };
    let mut o = g.initial_obs();
    let mut f = WeightFunction::initial(g);
    let (mut est, mut a) = eve.init(g)?;
    let mut rows = vec![row(0, None, o, f.clone())];
    for step in 1..=horizon {
        let succ = proper_successors(g, &f, a)?;
        let mut adam_reset = false;
        let chosen: usize = match adam {
            AdamPolicy::Machine(m) => {
                adam_reset = m.resets[adam_mem];
                let (m2, o2) = m.step(g, adam_mem, o, a)?;
                adam_mem = m2;
                find_obs(g, &succ, o2, o, a)?
            }
            AdamPolicy::Positional(map) => {
                let o2 = map.get(o).and_then(|r| r.get(a)).copied().flatten().ok_or_else(|| {
                    MpgError::StrategyDomain(format!("({}, {})", g.obs_name(o), g.action_name(a)))
                })?;
                find_obs(g, &succ, o2, o, a)?
            }
            AdamPolicy::Random(_) => rng.as_mut().unwrap().gen_range(0..succ.len()),
            AdamPolicy::GreedyMin => {
                let key = |i: usize| (succ[i].1.min_finite().unwrap_or(i64::MAX), succ[i].0);
                (0..succ.len()).min_by_key(|&i| key(i)).unwrap()
            }
            AdamPolicy::Concrete => {
                let path = concrete.as_mut().unwrap();
                let q = *path.last().unwrap();
                let &(q2, _) = g.successors(q, a).iter().min_by_key(|&&(q2, w)| (w, q2)).unwrap();
                path.push(q2);
                find_obs(g, &succ, g.obs_of(q2), o, a)?
            }
        };
        let (o2, f2) = succ[chosen].clone();
        let mut r = row(step, Some(a), o2, f2.clone());
        r.adam_reset = adam_reset;
        if step < horizon {
            let (est2, a2, eve_reset) = eve.advance(g, est, a, o2, step)?;
            est = est2;
            a = a2;
            r.eve_reset = eve_reset;
        }
        rows.push(r);
        o = o2;
        f = f2;
    }
    Ok(Trace { rows, concrete })
}

fn find_obs(g: &Game, succ: &[(ObsId, WeightFunction)], o2: ObsId, o: ObsId, a: ActionId) -> Result<usize> {
    succ.iter().position(|(x, _)| *x == o2).ok_or_else(|| {
        MpgError::StrategyDomain(format!(
            "({}, {}) -> {} is not a successor observation",
            g.obs_name(o),
            g.action_name(a),
            g.obs_name(o2)
        ))
    })
}

/// Per-step minimum over all adversary observation choices of the smallest
/// tracked value; entry `i` covers step `i`. Layers are deduplicated on
/// (Eve state, function).
pub fn exhaustive_adversary_profile(g: &Game, eve: &EvePolicy, horizon: usize) -> Result<Vec<i64>> {
    g.require_limited()?;
    let (st0, a0) = eve.init(g)?;
    let f0 = WeightFunction::initial(g);
    let mut profile = vec![f0.min_finite().unwrap_or(0)];
    let mut layer: Vec<(EveState, ActionId, WeightFunction)> = vec![(st0, a0, f0)];
    let mut explored = 1usize;
    for step in 1..=horizon {
        let mut seen: HashSet<(EveState, WeightFunction)> = HashSet::new();
        let mut next = Vec::new();
        let mut best = i64::MAX;
        for (st, a, f) in &layer {
            for (o2, f2) in proper_successors(g, f, *a)? {
                if !seen.insert((*st, f2.clone())) {
                    continue;
                }
                explored += 1;
                if explored > EXHAUSTIVE_BUDGET {
                    return Err(MpgError::Budget(EXHAUSTIVE_BUDGET));
                }
                if let Some(v) = f2.min_finite() {
                    best = best.min(v);
                }
                if step < horizon {
                    let (st2, a2, _) = eve.advance(g, *st, *a, o2, step)?;
                    next.push((st2, a2, f2));
                }
            }
        }
        profile.push(best);
        layer = next;
    }
    Ok(profile)
}

/// Minimum over all adversary choices and all steps up to `horizon` of the
/// smallest concrete prefix weight.
pub fn exhaustive_adversary_min(g: &Game, eve: &EvePolicy, horizon: usize) -> Result<i64> {
    Ok(*exhaustive_adversary_profile(g, eve, horizon)?.iter().min().unwrap())
}

/// Per-step minimum against a scripted Eve. Only the function matters
/// because the script ignores observations, so layers stay small.
pub fn exhaustive_scripted_profile(g: &Game, s: &ScriptedStrategy, horizon: usize) -> Result<Vec<i64>> {
    g.require_limited()?;
    let f0 = WeightFunction::initial(g);
    let mut profile = vec![f0.min_finite().unwrap_or(0)];
    let mut layer = vec![f0];
    let mut total = 0usize;
    for step in 1..=horizon {
        let a = scripted_next(s, step - 1);
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for f in &layer {
            for (_, f2) in proper_successors(g, f, a)? {
                if seen.insert(f2.clone()) {
                    next.push(f2);
                }
            }
        }
        total += next.len();
        if next.len() > EXHAUSTIVE_BUDGET || total > 50 * EXHAUSTIVE_BUDGET {
            return Err(MpgError::Budget(EXHAUSTIVE_BUDGET));
        }
        profile.push(next.iter().filter_map(|f| f.min_finite()).min().unwrap_or(i64::MAX));
        layer = next;
    }
    Ok(profile)
}

/// Against an Adam machine, per step: the largest over Eve action words of
/// the smallest tracked value, and whether every reachable configuration
/// satisfies `min ≤ ceiling − resets`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdamAnalysis {
    pub best_min: Vec<i64>,
    pub descent_holds: bool,
}

pub fn exhaustive_eve_words(g: &Game, m: &AdamMachine, horizon: usize) -> Result<AdamAnalysis> {
    g.require_limited()?;
    let ceiling = m.ceiling();
    let f0 = WeightFunction::initial(g);
    let mut best_min = vec![f0.min_finite().unwrap_or(0)];
    let mut descent_holds = ceiling.map_or(true, |c| best_min[0] <= c);
    // (memory, observation, function, resets)
    let mut layer = vec![(m.initial, g.initial_obs(), f0, 0i64)];
    let mut explored = 1usize;
    for _ in 1..=horizon {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        let mut best = i64::MIN;
        for (mem, o, f, r) in &layer {
            let r2 = r + i64::from(m.resets[*mem]);
            for a in 0..g.num_actions() {
                let (mem2, o2) = m.step(g, *mem, *o, a)?;
                let succ = proper_successors(g, f, a)?;
                let f2 = succ[find_obs(g, &succ, o2, *o, a)?].1.clone();
                if !seen.insert((mem2, f2.clone(), r2)) {
                    continue;
                }
                explored += 1;
                if explored > EXHAUSTIVE_BUDGET {
                    return Err(MpgError::Budget(EXHAUSTIVE_BUDGET));
                }
                let v = f2.min_finite().unwrap_or(i64::MAX);
                best = best.max(v);
                if let Some(c) = ceiling {
                    if v > c - r2 {
                        descent_holds = false;
                    }
                }
                next.push((mem2, o2, f2, r2));
            }
        }
        best_min.push(best);
        layer = next;
    }
    Ok(AdamAnalysis { best_min, descent_holds })
}
