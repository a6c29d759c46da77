use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mpg::belief::build_belief;
use mpg::classify::is_fac;
use mpg::cycle_game::solve_gamma_prime;
use mpg::generators::{gen_expmem, gen_hamiltonian, gen_qbf, parse_qbf, Digraph, QbfVariant};
use mpg::safety::{solve_safety_with, SafetyMethod};
use mpg::{Game, GameBuilder, SuccessorMode};

/// Runs `f` inside each pool configuration under comparison.
#[cfg(feature = "parallel")]
fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("1-thread", one), ("default", all)]
}

fn compare<F: Fn() + Sync>(c: &mut Criterion, group: &str, input: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    #[cfg(feature = "parallel")]
    for (name, pool) in pools() {
        g.bench_with_input(BenchmarkId::new(name, input), &(), |b, _| b.iter(|| pool.install(&f)));
    }
    #[cfg(not(feature = "parallel"))]
    g.bench_with_input(BenchmarkId::new("sequential", input), &(), |b, _| b.iter(&f));
    g.finish();
}

/// Every state reaches every other with a private signature, so the belief
/// game stays large without exceeding the cap.
fn dense_partial(n: usize) -> Game {
    let mut b = GameBuilder::new("dense");
    let qs: Vec<usize> = (0..n).map(|i| b.state(format!("q{i}"))).collect();
    let acts: Vec<usize> = (0..2).map(|i| b.action(format!("a{i}"))).collect();
    b.observation("even", qs.iter().copied().filter(|q| q % 2 == 0).collect());
    b.observation("odd", qs.iter().copied().filter(|q| q % 2 == 1).collect());
    b.initial(qs[0]);
    for &q in &qs {
        for &a in &acts {
            let (first, second) = ((q * 3 + a + 1) % n, (q + 2 * a + 1) % n);
            b.trans(q, a, first, (q as i64 % 3) - 1);
            if second != first {
                b.trans(q, a, second, 1 - (q as i64 % 2));
            }
        }
    }
    b.build().unwrap()
}

fn bench_gamma_prime(c: &mut Criterion) {
    let expmem = gen_expmem(2).unwrap();
    compare(c, "gamma-prime", "expmem2", || {
        solve_gamma_prime(&expmem, SuccessorMode::Proper).unwrap();
    });
    let phi = parse_qbf("forall x\nexists y\nforall z\nclause x -y z\nclause -x y\nclause y -z\n").unwrap();
    let qbf = gen_qbf(&phi, QbfVariant::Winner).unwrap();
    compare(c, "gamma-prime", "qbf3-winner", || {
        solve_gamma_prime(&qbf, SuccessorMode::Proper).unwrap();
    });
}

fn bench_safety(c: &mut Criterion) {
    let phi = parse_qbf("forall x\nexists y\nclause x -y\nclause -x y\n").unwrap();
    let g = gen_qbf(&phi, QbfVariant::Winner).unwrap();
    compare(c, "safety", "qbf2-winner-global", || {
        solve_safety_with(&g, SafetyMethod::Global, 1 << 20).unwrap();
    });
}

fn bench_belief(c: &mut Criterion) {
    let g = dense_partial(12);
    compare(c, "belief", "dense12", || {
        build_belief(&g, 1 << 16).unwrap();
    });
}

fn bench_hamiltonian(c: &mut Criterion) {
    let names: Vec<String> = (0..5).map(|i| format!("v{i}")).collect();
    let cycle = Digraph::new(names.clone(), vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (2, 4)]).unwrap();
    let path = Digraph::new(names, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 1), (1, 3)]).unwrap();
    let games = [gen_hamiltonian(&cycle).unwrap(), gen_hamiltonian(&path).unwrap()];
    compare(c, "fac", "hamiltonian5", || {
        for g in &games {
            is_fac(g, SuccessorMode::Proper).unwrap();
        }
    });
}

criterion_group!(benches, bench_gamma_prime, bench_safety, bench_belief, bench_hamiltonian);
criterion_main!(benches);
