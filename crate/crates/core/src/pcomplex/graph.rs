use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::interval::{all_intervals, Interval, LargeProjectionTable};
use super::AxisFamily;
use crate::error::{Error, Result};

/// Unreachable marker in the distance matrix.
pub const UNREACHABLE: u32 = u32::MAX;

/// Largest graph accepted by the exhaustive four-point scan.
pub const EXHAUSTIVE_HYPERBOLICITY_CAP: usize = 400;

/// Projection complex: vertices are axes, `U ~ V` iff no third axis sees them more than `K` apart.
#[derive(Clone, Debug, Serialize)]
pub struct PCGraph {
    pub k: u64,
    pub ids: Vec<String>,
    pub adj: Vec<Vec<usize>>,
    #[serde(skip)]
    dist: Vec<u32>,
    #[serde(skip)]
    sigma: Vec<u128>,
    pub connected: bool,
    /// Ordered pairs whose interval does not step along graph edges.
    pub interval_path_breaks: usize,
    pub warnings: Vec<String>,
}

impl PCGraph {
    /// Graph from an explicit adjacency list (used for the graph-only diagnostics).
    pub fn from_adjacency(ids: Vec<String>, k: u64, adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        let mut adj: Vec<Vec<usize>> = adj;
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let (dist, sigma) = all_pairs(&adj);
        let connected = n == 0 || dist.iter().all(|&d| d != UNREACHABLE);
        PCGraph {
            k,
            ids,
            adj,
            dist,
            sigma,
            connected,
            interval_path_breaks: 0,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Graph distance, `None` when disconnected.
    pub fn distance(&self, u: usize, v: usize) -> Option<u32> {
        let d = self.dist[u * self.len() + v];
        (d != UNREACHABLE).then_some(d)
    }

    /// Number of graph geodesics from `u` to `v` (saturating).
    pub fn geodesic_count(&self, u: usize, v: usize) -> u128 {
        self.sigma[u * self.len() + v]
    }

    pub fn diameter(&self) -> Option<u32> {
        if !self.connected {
            return None;
        }
        Some(self.dist.iter().copied().max().unwrap_or(0))
    }

    /// Adjacency-list export: a header line `# K=<k> vertices=<n> edges=<m>`, then one line
    /// per vertex `<index> <id>: <neighbour indices>`.
    pub fn to_adjacency_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# K={} vertices={} edges={}", self.k, self.len(), self.edge_count());
        for (i, a) in self.adj.iter().enumerate() {
            let nb: Vec<String> = a.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "{i} {}: {}", self.ids[i], nb.join(" "));
        }
        s
    }
}

fn all_pairs(adj: &[Vec<usize>]) -> (Vec<u32>, Vec<u128>) {
    let n = adj.len();
    let rows: Vec<(Vec<u32>, Vec<u128>)> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut d = vec![UNREACHABLE; n];
            let mut c = vec![0u128; n];
            d[s] = 0;
            c[s] = 1;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &adj[u] {
                    if d[v] == UNREACHABLE {
                        d[v] = d[u] + 1;
                        q.push_back(v);
                    }
                    if d[v] == d[u] + 1 {
                        c[v] = c[v].saturating_add(c[u]);
                    }
                }
            }
            (d, c)
        })
        .collect();
    let mut dist = Vec::with_capacity(n * n);
    let mut sigma = Vec::with_capacity(n * n);
    for (d, c) in rows {
        dist.extend(d);
        sigma.extend(c);
    }
    (dist, sigma)
}

/// Builds `P_K`: an edge joins `U, V` iff `𝔽_K(U,V)` is empty. Connectivity and the
/// interval paths (consecutive members of each ordered `𝔽_K[V,W]` adjacent) are checked
/// and failures reported as warnings.
pub fn build_complex(family: &AxisFamily, table: &LargeProjectionTable, kappa: u64, k: u64) -> PCGraph {
    let n = family.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && table.is_gap(k, u, v))
                .collect()
        })
        .collect();
    let mut g = PCGraph::from_adjacency(family.ids.clone(), k, adj);
    if !g.connected {
        g.warnings
            .push(format!("P_K is disconnected at K = {k}; K is too small for the windows"));
    }
    match all_intervals(family, table, kappa, k, false) {
        Ok(ivs) => {
            g.interval_path_breaks = count_interval_breaks(&g, &ivs);
            if g.interval_path_breaks > 0 {
                g.warnings.push(format!(
                    "{} intervals do not form edge paths at K = {k}",
                    g.interval_path_breaks
                ));
            }
        }
        Err(e) => g.warnings.push(format!("interval order failed at K = {k}: {e}")),
    }
    g
}

fn count_interval_breaks(g: &PCGraph, ivs: &[Interval]) -> usize {
    ivs.iter()
        .filter(|iv| iv.members.windows(2).any(|w| !g.has_edge(w[0], w[1])))
        .count()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hyperbolicity {
    pub delta: f64,
    pub exhaustive: bool,
    pub quadruples: u64,
    /// Vertex indices attaining the reported δ.
    pub witness: Option<[usize; 4]>,
}

/// Four-point δ: for the pair sums `S1 >= S2 >= S3` of a quadruple, `(S1 - S2) / 2`;
/// the graph value is the maximum over quadruples. A cycle of length 8 gives 2.
///
/// `samples = None` scans every quadruple (at most [`EXHAUSTIVE_HYPERBOLICITY_CAP`]
/// vertices); otherwise that many uniform quadruples are drawn, giving a lower bound.
pub fn hyperbolicity_scan(g: &PCGraph, samples: Option<(u64, u64)>) -> Result<Hyperbolicity> {
    if !g.connected {
        return Err(Error::Validation("hyperbolicity needs a connected graph".into()));
    }
    let n = g.len();
    let d = |a: usize, b: usize| g.dist[a * n + b] as u64;
    let twice = |a: usize, b: usize, c: usize, e: usize| {
        let mut s = [d(a, b) + d(c, e), d(a, c) + d(b, e), d(a, e) + d(b, c)];
        s.sort_unstable();
        s[2] - s[1]
    };
    match samples {
        None => {
            if n > EXHAUSTIVE_HYPERBOLICITY_CAP {
                return Err(Error::Resource {
                    cap_name: "exhaustive_hyperbolicity_vertices".into(),
                    needed: n as u128,
                    cap: EXHAUSTIVE_HYPERBOLICITY_CAP as u128,
                });
            }
            let best = (0..n)
                .into_par_iter()
                .map(|a| {
                    let mut best = (0u64, None);
                    for b in a + 1..n {
                        for c in b + 1..n {
                            for e in c + 1..n {
                                let t = twice(a, b, c, e);
                                if t > best.0 || best.1.is_none() {
                                    best = (t, Some([a, b, c, e]));
                                }
                            }
                        }
                    }
                    best
                })
                .reduce(|| (0, None), |x, y| if y.0 > x.0 || x.1.is_none() { y } else { x });
            let nn = n as u64;
            let quads = if n >= 4 { nn * (nn - 1) * (nn - 2) * (nn - 3) / 24 } else { 0 };
            Ok(Hyperbolicity {
                delta: best.0 as f64 / 2.0,
                exhaustive: true,
                quadruples: quads,
                witness: best.1,
            })
        }
        Some((count, seed)) => {
            if n < 4 {
                return Ok(Hyperbolicity {
                    delta: 0.0,
                    exhaustive: false,
                    quadruples: 0,
                    witness: None,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = (0u64, None);
            for _ in 0..count {
                let q = [
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                ];
                let t = twice(q[0], q[1], q[2], q[3]);
                if t > best.0 || best.1.is_none() {
                    best = (t, Some(q));
                }
            }
            Ok(Hyperbolicity {
                delta: best.0 as f64 / 2.0,
                exhaustive: false,
                quadruples: count,
                witness: best.1,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForcingReport {
    pub k_hat: u64,
    pub pairs_checked: u64,
    pub members_checked: u64,
    /// `(X, U, Z)` ids with `U ∈ 𝔽_K̂(X,Z)` off some geodesic from `X` to `Z`.
    pub violation: Option<[String; 3]>,
    pub pass: bool,
}

/// Checks that every member of `𝔽_K̂(X,Z)` lies on every graph geodesic from `X` to `Z`:
/// `d(X,U) + d(U,Z) = d(X,Z)` and the geodesic counts multiply.
pub fn check_forcing(g: &PCGraph, table: &LargeProjectionTable, k_hat: u64) -> ForcingReport {
    let n = g.len();
    let res: Vec<(u64, u64, Option<[usize; 3]>)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut pairs = 0;
            let mut members = 0;
            for z in 0..n {
                if z == x {
                    continue;
                }
                pairs += 1;
                let dxz = g.dist[x * n + z];
                for u in table.open_interval(k_hat, x, z) {
                    members += 1;
                    let (dxu, duz) = (g.dist[x * n + u], g.dist[u * n + z]);
                    let on = dxz != UNREACHABLE
                        && dxu != UNREACHABLE
                        && duz != UNREACHABLE
                        && dxu as u64 + duz as u64 == dxz as u64
                        && g.sigma[x * n + u].saturating_mul(g.sigma[u * n + z]) == g.sigma[x * n + z];
                    if !on {
                        return (pairs, members, Some([x, u, z]));
                    }
                }
            }
            (pairs, members, None)
        })
        .collect();
    let violation = res.iter().find_map(|r| r.2);
    ForcingReport {
        k_hat,
        pairs_checked: res.iter().map(|r| r.0).sum(),
        members_checked: res.iter().map(|r| r.1).sum(),
        pass: violation.is_none(),
        violation: violation.map(|t| t.map(|i| g.ids[i].clone())),
    }
}

/// Smallest `K̂ >= max(K, table threshold)` up to `k_max` passing [`check_forcing`].
pub fn scan_forcing(g: &PCGraph, table: &LargeProjectionTable, k_max: u64) -> Option<ForcingReport> {
    (g.k.max(table.threshold)..=k_max)
        .map(|k| check_forcing(g, table, k))
        .find(|r| r.pass)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripodReport {
    pub triples: u64,
    /// Most members of `𝔽_K[U,V]` missing from `𝔽_K[U,W] ∪ 𝔽_K[W,V]` over all triples.
    pub max_missing: usize,
    pub violation: Option<[String; 3]>,
    pub pass: bool,
}

/// Tripod property: members of `𝔽_K[U,V]` outside `𝔽_K[U,W] ∪ 𝔽_K[W,V]` number at most
/// two and are consecutive in the order. `intervals` is the row-major output of
/// [`all_intervals`].
pub fn check_tripod(family: &AxisFamily, intervals: &[Interval]) -> TripodReport {
    let n = family.len();
    let sorted: Vec<Vec<usize>> = intervals
        .iter()
        .map(|iv| {
            let mut m = iv.members.clone();
            m.sort_unstable();
            m
        })
        .collect();
    let has = |v: usize, w: usize, x: usize| sorted[v * n + w].binary_search(&x).is_ok();
    let res: Vec<(u64, usize, Option<[usize; 3]>)> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut triples = 0;
            let mut worst = 0;
            let mut bad = None;
            for v in 0..n {
                if v == u {
                    continue;
                }
                let members = &intervals[u * n + v].members;
                for w in 0..n {
                    if w == u || w == v {
                        continue;
                    }
                    triples += 1;
                    let missing: Vec<usize> = (0..members.len())
                        .filter(|&p| !has(u, w, members[p]) && !has(w, v, members[p]))
                        .collect();
                    worst = worst.max(missing.len());
                    let ok = missing.len() <= 1 || (missing.len() == 2 && missing[1] == missing[0] + 1);
                    if !ok && bad.is_none() {
                        bad = Some([u, v, w]);
                    }
                }
            }
            (triples, worst, bad)
        })
        .collect();
    let violation = res.iter().find_map(|r| r.2);
    TripodReport {
        triples: res.iter().map(|r| r.0).sum(),
        max_missing: res.iter().map(|r| r.1).max().unwrap_or(0),
        pass: violation.is_none(),
        violation: violation.map(|t| t.map(|i| family.ids[i].clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> PCGraph {
        let adj = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
        PCGraph::from_adjacency((0..n).map(|i| i.to_string()).collect(), 0, adj)
    }

    #[test]
    fn cycle_of_eight_has_delta_two() {
        let h = hyperbolicity_scan(&cycle(8), None).unwrap();
        assert_eq!(h.delta, 2.0);
        assert_eq!(h.quadruples, 70);
    }

    #[test]
    fn tree_has_delta_zero() {
        // star plus a path
        let adj = vec![vec![1, 2, 3], vec![0], vec![0, 4], vec![0], vec![2, 5], vec![4]];
        let g = PCGraph::from_adjacency((0..6).map(|i| i.to_string()).collect(), 0, adj);
        assert_eq!(hyperbolicity_scan(&g, None).unwrap().delta, 0.0);
        assert_eq!(g.geodesic_count(1, 5), 1);
    }

    #[test]
    fn geodesic_counts_on_a_square() {
        let g = cycle(4);
        assert_eq!(g.distance(0, 2), Some(2));
        assert_eq!(g.geodesic_count(0, 2), 2);
        assert_eq!(g.diameter(), Some(2));
    }

    #[test]
    fn sampled_mode_is_a_lower_bound() {
        let g = cycle(10);
        let ex = hyperbolicity_scan(&g, None).unwrap();
        let s = hyperbolicity_scan(&g, Some((500, 7))).unwrap();
        assert!(s.delta <= ex.delta);
        assert_eq!(s, hyperbolicity_scan(&g, Some((500, 7))).unwrap());
    }

    #[test]
    fn disconnected_is_reported() {
        let g = PCGraph::from_adjacency(vec!["x".into(), "y".into()], 0, vec![vec![], vec![]]);
        assert!(!g.connected);
        assert!(hyperbolicity_scan(&g, None).is_err());
    }
}
