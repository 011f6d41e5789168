use rayon::prelude::*;
use serde::Serialize;

use super::AxisFamily;
use crate::error::{Error, Result};

/// `𝔽_K[V,W]` in order, endpoints included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub members: Vec<usize>,
    /// Smallest D for which the order sandwich holds on this interval.
    pub sandwich: u64,
}

/// For every ordered pair `(V, W)`, the axes `U` with `d_U(V,W) > threshold` and their values.
#[derive(Clone, Debug)]
pub struct LargeProjectionTable {
    pub threshold: u64,
    n: usize,
    rows: Vec<Vec<(u32, u32)>>,
}

impl LargeProjectionTable {
    pub fn build(family: &AxisFamily, threshold: u64) -> Self {
        let n = family.len();
        let rows: Vec<Vec<(u32, u32)>> = (0..n * n)
            .into_par_iter()
            .map(|vw| {
                let (v, w) = (vw / n, vw % n);
                if v == w {
                    return Vec::new();
                }
                (0..n)
                    .filter(|&u| u != v && u != w)
                    .filter_map(|u| {
                        let d = family.d(u, v, w);
                        (d > threshold).then_some((u as u32, d as u32))
                    })
                    .collect()
            })
            .collect();
        LargeProjectionTable { threshold, n, rows }
    }

    /// `(U, d_U(V,W))` for every `U` above the threshold.
    pub fn row(&self, v: usize, w: usize) -> &[(u32, u32)] {
        &self.rows[v * self.n + w]
    }

    /// Whether `𝔽_K(V,W)` is empty, i.e. `V` and `W` are adjacent in `P_K` (or equal).
    pub fn is_gap(&self, k: u64, v: usize, w: usize) -> bool {
        assert!(k >= self.threshold, "K below the table threshold");
        v == w || self.rows[v * self.n + w].iter().all(|(_, d)| *d as u64 <= k)
    }

    /// `𝔽_K(V,W)` (interior only, unordered) for `K >= threshold`.
    pub fn open_interval(&self, k: u64, v: usize, w: usize) -> Vec<usize> {
        assert!(k >= self.threshold, "K below the table threshold");
        self.rows[v * self.n + w]
            .iter()
            .filter(|(_, d)| *d as u64 > k)
            .map(|(u, _)| *u as usize)
            .collect()
    }
}

/// Orders the interior of `𝔽_K[V,W]` by `A < B ⇔ d_A(V, B) > κ` and checks the order is a
/// strict total order (exactly one of `A<B`, `B<A` for each pair, ranks distinct).
pub fn order_interval(family: &AxisFamily, kappa: u64, v: usize, w: usize, mut interior: Vec<usize>) -> Result<Interval> {
    interior.sort_by(|a, b| family.ids[*a].cmp(&family.ids[*b]));
    let m = interior.len();
    let lt = |a: usize, b: usize| family.d(a, v, b) > kappa;
    let mut rank = vec![0usize; m];
    for i in 0..m {
        for j in 0..i {
            let (a, b) = (interior[i], interior[j]);
            match (lt(a, b), lt(b, a)) {
                (true, false) => rank[j] += 1,
                (false, true) => rank[i] += 1,
                _ => {
                    return Err(Error::Order(format!(
                        "{} and {} are not comparable in [{}, {}]",
                        family.ids[a], family.ids[b], family.ids[v], family.ids[w]
                    )))
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| rank[i]);
    for (pos, &i) in order.iter().enumerate() {
        if rank[i] != pos {
            return Err(Error::Order(format!(
                "order on [{}, {}] is not transitive near {}",
                family.ids[v], family.ids[w], family.ids[interior[i]]
            )));
        }
    }
    let mut members = Vec::with_capacity(m + 2);
    members.push(v);
    members.extend(order.iter().map(|&i| interior[i]));
    members.push(w);
    let sandwich = sandwich_defect(family, &members);
    Ok(Interval { members, sandwich })
}

/// Smallest `D` with `d_{U1}(V,W) - D <= d_{U1}(U0,U2) <= d_{U1}(V,W) + D`,
/// `d_{U0}(U1,U2) <= D` and `d_{U2}(U0,U1) <= D` for all `U0 < U1 < U2` in the interval.
pub fn sandwich_defect(family: &AxisFamily, members: &[usize]) -> u64 {
    let m = members.len();
    if m < 3 {
        return 0;
    }
    let (v, w) = (members[0], members[m - 1]);
    let mut dd = 0i64;
    for b in 1..m - 1 {
        let u1 = members[b];
        let full = family.d(u1, v, w) as i64;
        for a in 0..b {
            for c in b + 1..m {
                let (u0, u2) = (members[a], members[c]);
                let mid = family.d(u1, u0, u2) as i64;
                dd = dd.max(full - mid).max(mid - full);
                dd = dd.max(family.d(u0, u1, u2) as i64);
                dd = dd.max(family.d(u2, u0, u1) as i64);
            }
        }
    }
    dd.max(0) as u64
}

/// `𝔽_K[V,W]` computed directly from the family.
pub fn interval_set(family: &AxisFamily, kappa: u64, k: u64, v: usize, w: usize) -> Result<Interval> {
    if v == w {
        return Ok(Interval {
            members: vec![v],
            sandwich: 0,
        });
    }
    let interior: Vec<usize> = (0..family.len())
        .filter(|&u| u != v && u != w && family.d(u, v, w) > k)
        .collect();
    order_interval(family, kappa, v, w, interior)
}

/// All ordered intervals at `K`, with the first order failure if any.
pub fn all_intervals(
    family: &AxisFamily,
    table: &LargeProjectionTable,
    kappa: u64,
    k: u64,
    with_sandwich: bool,
) -> Result<Vec<Interval>> {
    let n = family.len();
    (0..n * n)
        .into_par_iter()
        .map(|vw| {
            let (v, w) = (vw / n, vw % n);
            if v == w {
                return Ok(Interval {
                    members: vec![v],
                    sandwich: 0,
                });
            }
            let mut iv = order_interval(family, kappa, v, w, table.open_interval(k, v, w))?;
            if !with_sandwich {
                iv.sandwich = 0;
            }
            Ok(iv)
        })
        .collect()
}

/// Smallest `K` in `[table.threshold, k_max]` at which every interval is totally ordered
/// and steps along edges of `P_K` (consecutive members have empty open interval).
pub fn scan_k(family: &AxisFamily, table: &LargeProjectionTable, kappa: u64, k_max: u64) -> Option<u64> {
    let n = family.len();
    (table.threshold..=k_max).find(|&k| {
        (0..n * n).into_par_iter().all(|vw| {
            let (v, w) = (vw / n, vw % n);
            if v == w {
                return true;
            }
            let Some(order) = order_interval_only(family, kappa, v, table.open_interval(k, v, w)) else {
                return false;
            };
            let mut prev = v;
            order.iter().chain([w].iter()).all(|&u| {
                let ok = table.is_gap(k, prev, u);
                prev = u;
                ok
            })
        })
    })
}

fn order_interval_only(family: &AxisFamily, kappa: u64, v: usize, interior: Vec<usize>) -> Option<Vec<usize>> {
    let m = interior.len();
    let mut rank = vec![0usize; m];
    for i in 0..m {
        for j in 0..i {
            let (a, b) = (interior[i], interior[j]);
            match (family.d(a, v, b) > kappa, family.d(b, v, a) > kappa) {
                (true, false) => rank[j] += 1,
                (false, true) => rank[i] += 1,
                _ => return None,
            }
        }
    }
    let mut ordered = vec![usize::MAX; m];
    for (i, &r) in rank.iter().enumerate() {
        if ordered[r] != usize::MAX {
            return None;
        }
        ordered[r] = interior[i];
    }
    Some(ordered)
}
