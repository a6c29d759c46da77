//! Small weighted-digraph algorithms on dense integer node ids.

use num_rational::Ratio;

/// Edge list `(from, to, weight)`.
pub type Edges = [(usize, usize, i64)];

/// A negative cycle reachable from `source` (or from anywhere when `source`
/// is `None`), returned as its node sequence, or `None` when there is none.
pub fn negative_cycle(n: usize, edges: &Edges, source: Option<usize>) -> Option<Vec<usize>> {
    let mut dist: Vec<Option<i128>> = vec![None; n];
    match source {
        Some(s) => dist[s] = Some(0),
        None => dist.iter_mut().for_each(|d| *d = Some(0)),
    }
    let mut pred = vec![usize::MAX; n];
    let mut last_relaxed = None;
    for _ in 0..n {
        last_relaxed = None;
        for &(u, v, w) in edges {
            if let Some(du) = dist[u] {
                let cand = du + w as i128;
                if dist[v].map_or(true, |dv| cand < dv) {
                    dist[v] = Some(cand);
                    pred[v] = u;
                    last_relaxed = Some(v);
                }
            }
        }
        last_relaxed?;
    }
    let mut x = last_relaxed?;
    for _ in 0..n {
        x = pred[x];
    }
    let mut cycle = vec![x];
    let mut y = pred[x];
    while y != x {
        cycle.push(y);
        y = pred[y];
    }
    cycle.reverse();
    Some(cycle)
}

/// Minimum mean weight over all cycles (Karp), or `None` for an acyclic graph.
pub fn min_cycle_mean(n: usize, edges: &Edges) -> Option<Ratio<i64>> {
    if n == 0 {
        return None;
    }
    // d[k][v]: minimum weight of a walk with exactly k edges ending at v,
    // starting anywhere.
    let mut d: Vec<Vec<Option<i64>>> = vec![vec![Some(0); n]];
    for k in 1..=n {
        let mut row = vec![None; n];
        for &(u, v, w) in edges {
            if let Some(du) = d[k - 1][u] {
                let cand = du + w;
                if row[v].map_or(true, |x: i64| cand < x) {
                    row[v] = Some(cand);
                }
            }
        }
        d.push(row);
    }
    let mut best: Option<Ratio<i64>> = None;
    for v in 0..n {
        let Some(dn) = d[n][v] else { continue };
        let mut worst: Option<Ratio<i64>> = None;
        for (k, row) in d.iter().enumerate().take(n) {
            if let Some(dk) = row[v] {
                let m = Ratio::new(dn - dk, (n - k) as i64);
                if worst.map_or(true, |x| m > x) {
                    worst = Some(m);
                }
            }
        }
        if let Some(wv) = worst {
            if best.map_or(true, |b| wv < b) {
                best = Some(wv);
            }
        }
    }
    best
}

/// Nodes reachable from `source` along `edges`.
pub fn reachable(n: usize, edges: &Edges, source: usize) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v, _) in edges {
        adj[u].push(v);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![source];
    seen[source] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}
