use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{GeodesicPath, ModelSpace, Word};

/// `h` such that both `h·o` and `h·f·o` lie within `r` of the host geodesic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BarrierWitness {
    #[serde(skip)]
    pub h: Word,
    #[serde(skip)]
    pub f: Word,
    pub r: u64,
    /// First vertex index within `r` of `h·o`.
    pub pos_h: usize,
    /// First vertex index within `r` of `h·f·o`.
    pub pos_hf: usize,
    pub dist_h: u64,
    pub dist_hf: u64,
}

struct LocalScan<'a> {
    fs: &'a [Word],
    r: u64,
    ball: Vec<Word>,
    reach: usize,
}

impl<'a> LocalScan<'a> {
    fn new(space: &ModelSpace, fs: &'a [Word], r: u64) -> Result<Self> {
        let fmax = fs.iter().map(Word::len).max().unwrap_or(0);
        Ok(LocalScan {
            fs,
            r,
            ball: space.ball(r)?,
            reach: (fmax + 2 * r) as usize,
        })
    }

    /// Walks the path; at each vertex `v_i` reports every `(u, f)` with `h = v_i u` a barrier
    /// anchored at `i` (the first vertex within `r` of `h`). All distances are computed in
    /// coordinates relative to `v_i`, so long rays cost O(length).
    fn scan<F: FnMut(usize, &Word, &Word, usize, u64, u64, usize)>(&self, path: &GeodesicPath, mut emit: F) {
        let steps = path.steps();
        let n = steps.len();
        let back = (2 * self.r) as usize;
        for i in 0..=n {
            let lo = i.saturating_sub(back.max(self.reach));
            let hi = (i + self.reach).min(n);
            // local[k] = v_i^-1 v_{lo+k}
            let mut local = vec![Word::identity(); hi - lo + 1];
            let mut w = Word::identity();
            for k in (lo..i).rev() {
                w.mul_gen(steps[k].inverse());
                local[k - lo] = w.clone();
            }
            let mut w = Word::identity();
            for k in i..hi {
                w.mul_gen(steps[k]);
                local[k + 1 - lo] = w.clone();
            }
            for u in &self.ball {
                // anchor check: no earlier vertex within r of h
                let earlier = (i.saturating_sub(back)..i).any(|k| local[k - lo].distance(u) <= self.r);
                if earlier {
                    continue;
                }
                for (fi, f) in self.fs.iter().enumerate() {
                    let uf = u.mul(f);
                    let mut hit = None;
                    for (k, lw) in local.iter().enumerate() {
                        let d = lw.distance(&uf);
                        if d <= self.r {
                            hit = Some((lo + k, d));
                            break;
                        }
                    }
                    if let Some((j, dj)) = hit {
                        emit(i, u, f, fi, u.len(), dj, j);
                    }
                }
            }
        }
    }
}

/// All `(r, f)`-barriers on `γ` for `f ∈ F`, each distinct `(h, f)` reported once,
/// ordered by position along `γ`.
pub fn find_barriers(space: &ModelSpace, gamma: &GeodesicPath, fs: &[Word], r: u64) -> Result<Vec<BarrierWitness>> {
    if fs.is_empty() {
        return Ok(Vec::new());
    }
    let scan = LocalScan::new(space, fs, r)?;
    let mut found = Vec::new();
    let mut v = gamma.start().clone();
    let mut cursor = 0;
    let mut seen = HashSet::new();
    scan.scan(gamma, |i, u, f, _fi, dh, dhf, j| {
        while cursor < i {
            v.mul_gen(gamma.steps()[cursor]);
            cursor += 1;
        }
        let h = v.mul(u);
        if seen.insert((h.clone(), f.clone())) {
            found.push(BarrierWitness {
                h,
                f: f.clone(),
                r,
                pos_h: i,
                pos_hf: j,
                dist_h: dh,
                dist_hf: dhf,
            });
        }
    });
    Ok(found)
}

/// Per-`f` number of barriers of each prefix `γ[0..=cut]`, counted in one pass over `γ`.
/// A barrier belongs to the prefix when both `h` and `hf` are within `r` of it.
pub fn count_barriers(
    space: &ModelSpace,
    gamma: &GeodesicPath,
    fs: &[Word],
    r: u64,
    cuts: &[usize],
) -> Result<Vec<Vec<u64>>> {
    let mut counts = vec![vec![0u64; cuts.len()]; fs.len()];
    if fs.is_empty() {
        return Ok(counts);
    }
    let scan = LocalScan::new(space, fs, r)?;
    scan.scan(gamma, |i, _u, _f, fi, _, _, j| {
        for (c, &cut) in cuts.iter().enumerate() {
            if i.max(j) <= cut {
                counts[fi][c] += 1;
            }
        }
    });
    Ok(counts)
}

/// Checks the barrier condition directly.
pub fn is_barrier(gamma: &GeodesicPath, h: &Word, f: &Word, r: u64) -> bool {
    gamma.distance_to(h).0 <= r && gamma.distance_to(&h.mul(f)).0 <= r
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionDiagnostic {
    pub f: String,
    pub dist_g: u64,
    pub dist_gf: u64,
}

/// Extension step: the first `f ∈ F` for which `g·o` is an `(r, f)`-barrier of the geodesic
/// `[o, g·f·probe]`.
pub fn extend(space: &ModelSpace, g: &Word, fs: &[Word], r: u64, probe: &Word) -> Result<(Word, BarrierWitness)> {
    if fs.is_empty() {
        return Err(Error::Validation("extension needs a non-empty F".into()));
    }
    let mut diags = Vec::new();
    for f in fs {
        let target = g.mul(f).mul(probe);
        let gamma = GeodesicPath::canonical(&Word::identity(), &target);
        let (dh, ih) = gamma.distance_to(g);
        let (dhf, ihf) = gamma.distance_to(&g.mul(f));
        if dh <= r && dhf <= r {
            return Ok((
                f.clone(),
                BarrierWitness {
                    h: g.clone(),
                    f: f.clone(),
                    r,
                    pos_h: ih,
                    pos_hf: ihf,
                    dist_h: dh,
                    dist_hf: dhf,
                },
            ));
        }
        diags.push(ExtensionDiagnostic {
            f: space.format(f),
            dist_g: dh,
            dist_gf: dhf,
        });
    }
    Err(Error::Search(format!(
        "no f extends {} at r = {r}: {}",
        space.format(g),
        diags
            .iter()
            .map(|d| format!("{} (d(g,γ)={}, d(gf,γ)={})", d.f, d.dist_g, d.dist_gf))
            .collect::<Vec<_>>()
            .join("; ")
    )))
}
