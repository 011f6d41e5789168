use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::graph::PCGraph;
use super::AxisFamily;
use crate::error::{Error, Result};
use crate::space::Word;

/// Axes at graph distance `n` from the base and the orbit points of their windows.
#[derive(Clone, Debug, Serialize)]
pub struct VisualSphere {
    pub n: usize,
    pub vertices: Vec<usize>,
    /// Orbit points of the windows of `vertices`, shortlex sorted.
    #[serde(skip)]
    pub points: Vec<Word>,
    /// Vertices near the boundary of the family ball, whose neighbours may be missing.
    pub edge_vertices: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereReport {
    pub base: usize,
    pub spheres: Vec<VisualSphere>,
    /// Over every orbit point of every window: how many spheres contain it.
    pub multiplicity_min: usize,
    pub multiplicity_max: usize,
    pub points_covered: usize,
}

/// Breadth-first layers of the complex around `base`, up to `n_max`.
pub fn visual_spheres(family: &AxisFamily, graph: &PCGraph, base: usize, n_max: usize) -> Result<SphereReport> {
    if base >= graph.len() || graph.len() != family.len() {
        return Err(Error::Validation("base vertex not in the graph".into()));
    }
    let fmax = family.fs.iter().map(Word::len).max().unwrap_or(0);
    let near_edge = family.r_fam.saturating_sub(fmax);
    let mut layers: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for u in 0..graph.len() {
        if let Some(d) = graph.distance(base, u) {
            layers.entry(d).or_default().push(u);
        }
    }
    let mut cover: BTreeMap<Word, BTreeSet<u32>> = BTreeMap::new();
    for (&n, us) in &layers {
        for &u in us {
            for p in family.axes[u].orbit_points() {
                cover.entry(p.clone()).or_default().insert(n);
            }
        }
    }
    let spheres = (0..=n_max)
        .map(|n| {
            let vertices = layers.get(&(n as u32)).cloned().unwrap_or_default();
            let pts: BTreeSet<Word> = vertices
                .iter()
                .flat_map(|&u| family.axes[u].orbit_points().cloned())
                .collect();
            VisualSphere {
                n,
                edge_vertices: vertices
                    .iter()
                    .filter(|&&u| family.distance_from_origin(u) > near_edge)
                    .count(),
                vertices,
                points: pts.into_iter().collect(),
            }
        })
        .collect();
    Ok(SphereReport {
        base,
        spheres,
        multiplicity_min: cover.values().map(BTreeSet::len).min().unwrap_or(0),
        multiplicity_max: cover.values().map(BTreeSet::len).max().unwrap_or(0),
        points_covered: cover.len(),
    })
}

/// Greedy `L`-net of a point set: kept points are pairwise more than `l` apart and every
/// point is within `l` of a kept one.
pub fn net(points: &[Word], l: u64) -> Vec<Word> {
    let mut kept: Vec<Word> = Vec::new();
    for p in points {
        if kept.iter().all(|k| k.distance(p) > l) {
            kept.push(p.clone());
        }
    }
    kept
}

/// Orbit points `v` of axis `u` with `|d_U(o, v) - l| <= delta`.
pub fn slab(family: &AxisFamily, u: usize, l: u64, delta: u64) -> Result<Vec<Word>> {
    let ax = &family.axes[u];
    let po = ax.project_indices(&Word::identity())?;
    let mut out = Vec::new();
    for p in ax.orbit_points() {
        let j = ax.index_of(p).expect("orbit point is on the axis");
        let d = po.iter().map(|&i| ax.point_distance(i, j)).max().unwrap_or(0).max(ax.diameter(&po));
        if d.abs_diff(l) <= delta {
            out.push(p.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct TnSeries {
    pub s: f64,
    /// Per-n sums; zero for empty spheres.
    pub sums: Vec<f64>,
    /// The `n` whose sphere is non-empty; all comparisons are restricted to these.
    pub available: Vec<usize>,
    /// `sum(n+1) / sum(n)` for consecutive available `n`.
    pub ratios: Vec<f64>,
    /// Largest over smallest available sum.
    pub max_min: f64,
    /// `(n, m, sum(n+m) / (sum(n) sum(m)))` for `n <= m` with `n`, `m`, `n + m` available.
    pub defects: Vec<(usize, usize, f64)>,
    pub max_defect: f64,
}

/// Per-sphere sums `Σ_{p ∈ T_n} e^{-s|p|}` and their comparison tables.
pub fn tn_series(spheres: &[VisualSphere], s: f64) -> Result<TnSeries> {
    if !(s > 0.0) {
        return Err(Error::Validation("series exponent must be positive".into()));
    }
    let sums: Vec<f64> = spheres
        .iter()
        .map(|sp| {
            let mut terms: Vec<f64> = sp.points.iter().map(|p| (-s * p.len() as f64).exp()).collect();
            terms.sort_by(f64::total_cmp);
            terms.iter().fold(0.0, |a, b| a + b)
        })
        .collect();
    let available: Vec<usize> = (0..sums.len()).filter(|&n| !spheres[n].points.is_empty()).collect();
    let ok = |n: usize| n < sums.len() && !spheres[n].points.is_empty();
    let ratios = (0..sums.len().saturating_sub(1))
        .filter(|&n| ok(n) && ok(n + 1))
        .map(|n| sums[n + 1] / sums[n])
        .collect();
    let max_min = if available.is_empty() {
        f64::INFINITY
    } else {
        let (lo, hi) = available
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &n| (lo.min(sums[n]), hi.max(sums[n])));
        hi / lo
    };
    let mut defects = Vec::new();
    for &n in &available {
        for &m in available.iter().filter(|&&m| m >= n) {
            if ok(n + m) {
                defects.push((n, m, sums[n + m] / (sums[n] * sums[m])));
            }
        }
    }
    let max_defect = defects.iter().map(|d| d.2).fold(0.0, f64::max);
    Ok(TnSeries {
        s,
        sums,
        available,
        ratios,
        max_min,
        defects,
        max_defect,
    })
}
