mod common;

use proptest::prelude::*;

use common::*;
use mpg::belief::build_belief;
use mpg::classify::{is_fac, is_forcibly_fac, is_forcibly_terminating_bounded, Termination};
use mpg::cycle_game::{solve_gamma_prime, solve_gamma_prime_tree, verdict_of, Player};
use mpg::cycles::{classify_cycle, CycleClass};
use mpg::generators::{gen_expmem, gen_hamiltonian, gen_qbf, parse_qbf, QbfVariant};
use mpg::path::{cycle_power, cyclic_permutations, interleave, AbstractPath};
use mpg::safety::{safety_verdict, solve_safety_with, SafetyMethod};
use mpg::sim::{simulate, AdamPolicy, EvePolicy, ScriptedStrategy};
use mpg::strategy::{
    extract_adam_machine, extract_eve_machine, parse_strategy, render_strategy, search_positional_fac, verify_positional, PositionalStrategy,
    Strategy,
};
use mpg::weights::{min_path_weights, preceq, ExtValue, WeightFunction};
use mpg::{SuccessorMode, VerdictTag};
use rand::Rng;

const PROPER: SuccessorMode = SuccessorMode::Proper;

fn small_limited(seed: u64) -> mpg::Game {
    let mut r = rng(seed);
    let p = LimitedParams { obs: r.gen_range(1..=3), obs_size: r.gen_range(1..=3), actions: 2, max_weight: 3, fanout: 2 };
    random_limited(&mut r, &p)
}

fn class_of(c: OracleClass) -> CycleClass {
    match c {
        OracleClass::Good => CycleClass::Good,
        OracleClass::Bad => CycleClass::Bad,
        OracleClass::Neither => CycleClass::Neither,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn preceq_weakens_and_composes(seed in any::<u64>(), k in -3i64..=3, k2 in -3i64..=3) {
        let g = small_limited(seed);
        let mut r = rng(seed ^ 1);
        let o = r.gen_range(0..g.num_obs());
        let f1 = random_function(&mut r, &g, o, 4, 0.2);
        let f2 = random_function(&mut r, &g, o, 4, 0.2);
        let f3 = random_function(&mut r, &g, o, 4, 0.2);
        if preceq(k, &f1, &f2) {
            prop_assert!(preceq(k - 1, &f1, &f2));
        }
        if preceq(k, &f1, &f2) && preceq(k2, &f2, &f3) {
            prop_assert!(preceq(k + k2, &f1, &f3));
        }
        prop_assert!(preceq(0, &f1, &f1) || f1.entries().iter().any(|(_, v)| *v == ExtValue::Bottom));
    }

    #[test]
    fn min_path_matches_enumeration(seed in any::<u64>(), len in 0usize..=6) {
        let g = small_limited(seed);
        let mut r = rng(seed ^ 2);
        let start = r.gen_range(0..g.num_obs());
        let psi = random_walk(&mut r, &g, start, len);
        let f0 = random_function(&mut r, &g, start, 5, 0.25);
        let fast: Vec<(usize, ExtValue)> = min_path_weights(&g, &psi, &f0).unwrap().entries().to_vec();
        let brute: Vec<(usize, ExtValue)> = brute_min_path(&g, &psi, &f0).into_iter().collect();
        prop_assert_eq!(fast, brute);
    }

    #[test]
    fn classify_matches_witness_search(seed in any::<u64>()) {
        let g = small_limited(seed);
        let mut r = rng(seed ^ 3);
        let anchor = r.gen_range(1..g.num_obs());
        if let Some(rho) = random_cycle(&mut r, &g, anchor, 3) {
            prop_assert_eq!(classify_cycle(&g, &rho).unwrap(), class_of(bounded_witness_class(&g, &rho)));
        }
    }

    #[test]
    fn good_and_bad_cycles_have_concrete_witnesses(seed in any::<u64>()) {
        let g = small_limited(seed);
        let mut r = rng(seed ^ 4);
        let anchor = r.gen_range(1..g.num_obs());
        if let Some(rho) = random_cycle(&mut r, &g, anchor, 4) {
            match classify_cycle(&g, &rho).unwrap() {
                CycleClass::Good => {
                    for k in 1..=3 {
                        let pk = cycle_power(&rho, k).unwrap();
                        prop_assert!(min_concrete_cycles(&g, &pk).iter().flatten().all(|&w| w >= 0));
                    }
                    for perm in cyclic_permutations(&rho).unwrap() {
                        prop_assert_ne!(classify_cycle(&g, &perm).unwrap(), CycleClass::Bad);
                    }
                }
                CycleClass::Bad => {
                    let n = g.observation(anchor).len();
                    let found = (1..=n).any(|k| {
                        let pk = cycle_power(&rho, k).unwrap();
                        min_concrete_cycles(&g, &pk).iter().flatten().any(|&w| w < 0)
                    });
                    prop_assert!(found);
                }
                CycleClass::Neither => {}
            }
        }
    }

    #[test]
    fn powers_keep_good_and_bad(seed in any::<u64>(), k in 1usize..=3) {
        let g = small_limited(seed);
        let mut r = rng(seed ^ 5);
        let anchor = r.gen_range(1..g.num_obs());
        if let Some(rho) = random_cycle(&mut r, &g, anchor, 3) {
            let c = classify_cycle(&g, &rho).unwrap();
            let ck = classify_cycle(&g, &cycle_power(&rho, k).unwrap()).unwrap();
            if c != CycleClass::Neither {
                prop_assert_eq!(c, ck);
            }
        }
    }

    #[test]
    fn trace_matches_enumeration(seed in any::<u64>(), horizon in 1usize..=8) {
        let g = small_limited(seed);
        let mut r = rng(seed ^ 6);
        let period: Vec<usize> = (0..r.gen_range(1..=3)).map(|_| r.gen_range(0..g.num_actions())).collect();
        let eve = EvePolicy::Scripted(ScriptedStrategy::periodic(vec![], period).unwrap());
        let t = simulate(&g, &eve, &AdamPolicy::Random(seed), horizon).unwrap();
        let mut psi = AbstractPath::single(t.rows[0].obs);
        let f0 = WeightFunction::initial(&g);
        for row in &t.rows[1..] {
            psi.push(row.action.unwrap(), row.obs);
            let brute: Vec<(usize, ExtValue)> = brute_min_path(&g, &psi, &f0).into_iter().collect();
            prop_assert_eq!(row.func.entries().to_vec(), brute);
        }
    }

    #[test]
    fn class_implications(seed in any::<u64>()) {
        let g = small_limited(seed);
        let (fac, _) = is_fac(&g, PROPER).unwrap();
        let (ffac, v) = is_forcibly_fac(&g, PROPER).unwrap();
        prop_assert!(!fac || ffac);
        if ffac {
            match is_forcibly_terminating_bounded(&g, g.num_obs() + 1, PROPER).unwrap() {
                Termination::Yes(t) => prop_assert_eq!(t.tag, v.tag),
                Termination::Unknown => prop_assert!(false, "bounded check undecided"),
            }
            let s = safety_verdict(&g, true).unwrap();
            prop_assert!(s.conclusive);
            prop_assert_eq!(s.verdict.tag, v.tag);
        }
        if fac {
            let p = search_positional_fac(&g).unwrap();
            prop_assert!(verify_positional(&g, &p).unwrap().is_none());
            let owner = match p { PositionalStrategy::Eve(_) => VerdictTag::EveWins, PositionalStrategy::Adam(_) => VerdictTag::AdamWins };
            prop_assert_eq!(owner, v.tag);
        }
    }

    #[test]
    fn safety_methods_agree(seed in any::<u64>()) {
        let g = small_limited(seed);
        let a = solve_safety_with(&g, SafetyMethod::Global, 1 << 16).unwrap();
        let b = solve_safety_with(&g, SafetyMethod::Local, 1 << 16).unwrap();
        prop_assert_eq!(a.outcome, b.outcome);
    }

    #[test]
    fn belief_is_limited_and_faithful(seed in any::<u64>(), visible in any::<bool>()) {
        let mut r = rng(seed);
        let g = random_partial(&mut r, 6, visible);
        let bg = build_belief(&g, 4096).unwrap();
        prop_assert!(bg.game.check_limited().is_limited());
        for t in bg.game.transitions() {
            let (s, d) = (&bg.states[t.src], &bg.states[t.dst]);
            prop_assert_eq!(g.weight(s.state, t.action, d.state), Some(t.weight));
            prop_assert!(d.knowledge.contains(&d.state));
        }
        if visible {
            prop_assert!(is_fac(&bg.game, PROPER).unwrap().0);
        }
    }

    #[test]
    fn strategies_roundtrip(seed in any::<u64>()) {
        let g = small_limited(seed);
        let tree = solve_gamma_prime_tree(&g, PROPER).unwrap();
        let s = match verdict_of(&tree).tag {
            VerdictTag::EveWins => Strategy::EveMachine(extract_eve_machine(&tree.strategy(Player::Eve).unwrap()).unwrap()),
            VerdictTag::AdamWins => Strategy::AdamMachine(extract_adam_machine(&tree.strategy(Player::Adam).unwrap()).unwrap()),
            _ => return Ok(()),
        };
        let text = render_strategy(&g, &s);
        prop_assert_eq!(render_strategy(&g, &parse_strategy(&g, &text).unwrap()), text);
    }

    #[test]
    fn hamiltonian_shape(n in 2usize..=5, mask in any::<u32>()) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> (i % 32) & 1 == 1).map(|(_, e)| *e).collect();
        let g = gen_hamiltonian(&digraph(n, &edges)).unwrap();
        prop_assert_eq!(g.num_states(), n + 3);
        prop_assert!(g.check_limited().is_limited());
        if n <= 4 {
            prop_assert_eq!(is_fac(&g, PROPER).unwrap().0, !brute_hamiltonian(n, &edges));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    /// Interleaving keeps the class when both cycles share a witness.
    #[test]
    fn interleaving_with_common_witness(seed in any::<u64>()) {
        let g = small_limited(seed);
        let mut r = rng(seed ^ 7);
        let anchor = r.gen_range(1..g.num_obs());
        if let (Some(c1), Some(c2)) = (random_cycle(&mut r, &g, anchor, 3), random_cycle(&mut r, &g, anchor, 3)) {
            let k = classify_cycle(&g, &c1).unwrap();
            if k != CycleClass::Neither && classify_cycle(&g, &c2).unwrap() == k
                && common_witness(&g, &[&c1, &c2], k == CycleClass::Good)
            {
                prop_assert_eq!(classify_cycle(&g, &interleave(&c1, &c2, 0).unwrap()).unwrap(), k);
            }
        }
    }
}

/// Two good cycles whose interleaving is bad: `a` and `b` each have cycle
/// mean 0, but the interleaving `b·a` has the concrete cycle
/// `r -b-> p -a-> r` of weight −10.
#[test]
fn interleaving_without_common_witness_can_turn_bad() {
    let mut b = mpg::GameBuilder::new("swap");
    let init = b.state("qI");
    let p = b.state("p");
    let q = b.state("r");
    let a = b.action("a");
    let bb = b.action("b");
    b.observation("oI", vec![init]);
    b.observation("o", vec![p, q]);
    b.initial(init);
    b.trans_all(init, p, 0);
    b.trans_all(init, q, 0);
    for (act, w) in [(a, -5), (bb, 5)] {
        b.trans(p, act, p, 0);
        b.trans(p, act, q, w);
        b.trans(q, act, p, -w);
        b.trans(q, act, q, 0);
    }
    let g = b.build().unwrap();
    let o = g.obs_of(p);
    let ca = AbstractPath::new(vec![o, o], vec![a]).unwrap();
    let cb = AbstractPath::new(vec![o, o], vec![bb]).unwrap();
    let mixed = interleave(&ca, &cb, 0).unwrap();
    assert_eq!(classify_cycle(&g, &ca).unwrap(), CycleClass::Good);
    assert_eq!(classify_cycle(&g, &cb).unwrap(), CycleClass::Good);
    assert_eq!(classify_cycle(&g, &mixed).unwrap(), CycleClass::Bad);
    assert_eq!(bounded_witness_class(&g, &mixed), OracleClass::Bad);
    assert!(!common_witness(&g, &[&ca, &cb], true));
    assert_eq!(min_concrete_cycles(&g, &mixed), vec![Some(0), Some(-10)]);
}

#[test]
fn qbf_generator_shape() {
    for (_, text, truth) in QBF_SUITE {
        let phi = parse_qbf(text).unwrap();
        let (n, m) = (phi.vars.len(), phi.clauses.len());
        let mem = gen_qbf(&phi, QbfVariant::Membership).unwrap();
        assert_eq!(mem.num_states(), 1 + 6 * n + 2 * m + 2);
        assert!(mem.check_limited().is_limited());
        let win = gen_qbf(&phi, QbfVariant::Winner).unwrap();
        assert_eq!(win.num_states(), 1 + 6 * n + 2 * m + 1 + 2 * n * (3 * n + m));
        assert!(win.check_limited().is_limited());
        let expected = if truth { VerdictTag::EveWins } else { VerdictTag::AdamWins };
        assert_eq!(solve_gamma_prime(&win, PROPER).unwrap().tag, expected);
    }
    assert_eq!(gen_expmem(1).unwrap().num_states(), 50);
    assert_eq!(gen_expmem(2).unwrap().num_states(), 162);
}
