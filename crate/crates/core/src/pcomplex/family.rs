use std::collections::BTreeMap;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::contracting::{canonical_coset_rep, primitive_root, Axis};
use crate::error::{Error, Result};
use crate::space::{ModelSpace, Word};

/// `π_U(V)` as point indices of `U`, with its diameter.
#[derive(Clone, Debug, Default)]
pub struct ProjSet {
    pub idx: SmallVec<[u16; 4]>,
    pub diam: u32,
}

/// Windowed family of translated axes with the full projection table.
#[derive(Clone, Debug)]
pub struct AxisFamily {
    pub fs: Vec<Word>,
    pub r_fam: u64,
    pub window: u64,
    pub axes: Vec<Axis>,
    /// Index into `fs` of each axis.
    pub kinds: Vec<usize>,
    /// Stable identifiers `"<kind>:<translate>"`.
    pub ids: Vec<String>,
    proj: Vec<ProjSet>,
}

impl AxisFamily {
    /// Axes `g·Ax(f)` (stepping by the primitive root of `f`) for which some translate of
    /// the fundamental segment lies in the ball: `|g| <= R_fam` and `|g f| <= R_fam`.
    /// Translates of the same stabilizer coset are identified; each window is centred at
    /// the orbit point nearest to `o`.
    pub fn build(space: &ModelSpace, fs: &[Word], r_fam: u64, window: u64) -> Result<Self> {
        if fs.is_empty() {
            return Err(Error::Validation("family needs a non-empty F".into()));
        }
        let ball = space.ball(r_fam)?;
        let mut reps: BTreeMap<(usize, Word), ()> = BTreeMap::new();
        for (k, f) in fs.iter().enumerate() {
            let (root, _) = primitive_root(f);
            for g in &ball {
                if g.mul(f).len() <= r_fam {
                    reps.insert((k, canonical_coset_rep(g, &root)), ());
                }
            }
        }
        let entries: Vec<(usize, Word)> = reps.into_keys().collect();
        let axes = entries
            .iter()
            .map(|(k, g)| Axis::with_stabilizer(&fs[*k], g, window))
            .collect::<Result<Vec<_>>>()?;
        Self::from_axes(space, fs.to_vec(), r_fam, window, axes, entries.iter().map(|e| e.0).collect())
    }

    /// Builds a family from explicit axes; all pairwise projections are computed eagerly.
    pub fn from_axes(
        space: &ModelSpace,
        fs: Vec<Word>,
        r_fam: u64,
        window: u64,
        axes: Vec<Axis>,
        kinds: Vec<usize>,
    ) -> Result<Self> {
        let n = axes.len();
        for i in 0..n {
            for j in 0..i {
                if axes[i].points() == axes[j].points() {
                    return Err(Error::Validation(format!("axes {j} and {i} coincide")));
                }
            }
        }
        let ids = axes
            .iter()
            .zip(&kinds)
            .map(|(a, k)| format!("{k}:{}", space.format(a.translate_word())))
            .collect();
        let rows: Vec<Vec<ProjSet>> = (0..n)
            .into_par_iter()
            .map(|u| {
                (0..n)
                    .map(|v| {
                        if u == v {
                            return Ok(ProjSet::default());
                        }
                        let idx = axes[u].project_set(axes[v].points()).map_err(|e| match e {
                            Error::Inconclusive(m) => Error::Inconclusive(format!(
                                "projecting axis {v} to axis {u}: {m}"
                            )),
                            e => e,
                        })?;
                        let diam = axes[u].diameter(&idx) as u32;
                        Ok(ProjSet {
                            idx: idx.iter().map(|&i| i as u16).collect(),
                            diam,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(AxisFamily {
            fs,
            r_fam,
            window,
            axes,
            kinds,
            ids,
            proj: rows.into_iter().flatten().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    /// `π_U(V)` for `U != V`.
    pub fn proj(&self, u: usize, v: usize) -> &ProjSet {
        &self.proj[u * self.axes.len() + v]
    }

    /// `d_U(V, W) = diam(π_U(V) ∪ π_U(W))`, for `V, W != U`.
    pub fn d(&self, u: usize, v: usize, w: usize) -> u64 {
        debug_assert!(u != v && u != w);
        let (a, b) = (self.proj(u, v), self.proj(u, w));
        let mut d = a.diam.max(b.diam) as u64;
        let ax = &self.axes[u];
        for &i in &a.idx {
            for &j in &b.idx {
                d = d.max(ax.point_distance(i as usize, j as usize));
            }
        }
        d
    }

    /// Index of the axis `Ax(f_k)` through the identity, if present.
    pub fn base_axis(&self, kind: usize) -> Option<usize> {
        (0..self.len()).find(|&i| self.kinds[i] == kind && self.axes[i].translate_word().is_identity())
    }

    /// Distance from `o` to the axis window.
    pub fn distance_from_origin(&self, i: usize) -> u64 {
        self.axes[i].distance_to(&Word::identity())
    }
}
