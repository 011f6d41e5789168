use serde::Serialize;

use super::{canonical_coset_rep, Axis, BarrierWitness};
use crate::error::{Error, Result};
use crate::space::{GeodesicPath, ModelSpace, Word};

/// Piecewise geodesic `p_0 q_1 p_1 ... q_n p_n`; `p_i` runs along `saturation[i]` when given.
#[derive(Clone, Debug)]
pub struct AdmissiblePath {
    pub p: Vec<GeodesicPath>,
    pub q: Vec<GeodesicPath>,
    pub saturation: Vec<Option<Axis>>,
    pub l: u64,
    pub b: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentCheck {
    pub index: usize,
    pub length: u64,
    pub on_axis: bool,
    /// Diameter of the projection of `q_i` (before) and `q_{i+1}` (after) to `X_i`.
    pub proj_before: Option<u64>,
    pub proj_after: Option<u64>,
    pub long_local: bool,
    pub bounded_projection: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub l: u64,
    pub b: u64,
    pub segments: Vec<SegmentCheck>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FellowTravelReport {
    pub r: u64,
    /// Indices on the canonical geodesic `α` of `z_i` (near `p_i^-`) and `w_i` (near `p_i^+`).
    pub z: Vec<usize>,
    pub w: Vec<usize>,
    pub alpha_len: usize,
    pub violation: Option<usize>,
    pub pass: bool,
}

impl AdmissiblePath {
    /// A single geodesic, vacuously admissible.
    pub fn single(p: GeodesicPath) -> Self {
        AdmissiblePath {
            p: vec![p],
            q: Vec::new(),
            saturation: vec![None],
            l: 0,
            b: 0,
        }
    }

    pub fn start(&self) -> Word {
        self.p[0].start().clone()
    }

    pub fn end(&self) -> Word {
        self.p[self.p.len() - 1].end()
    }

    /// Segments in order `p_0, q_1, p_1, ...`.
    pub fn segments(&self) -> Vec<&GeodesicPath> {
        let mut out = vec![&self.p[0]];
        for (q, p) in self.q.iter().zip(&self.p[1..]) {
            out.push(q);
            out.push(p);
        }
        out
    }

    fn check_shape(&self) -> Result<()> {
        if self.p.len() != self.q.len() + 1 || self.saturation.len() != self.p.len() {
            return Err(Error::Validation(
                "admissible path needs n+1 p-segments, n q-segments and n+1 saturation slots".into(),
            ));
        }
        let segs = self.segments();
        for (i, w) in segs.windows(2).enumerate() {
            if w[0].end() != *w[1].start() {
                return Err(Error::Validation(format!("segments {i} and {} do not concatenate", i + 1)));
            }
        }
        Ok(())
    }
}

/// Checks (LL) on interior `p_i` and (BP) on every saturated `p_i`.
pub fn verify_admissible(path: &AdmissiblePath) -> Result<AdmissibilityReport> {
    path.check_shape()?;
    let n = path.q.len();
    let mut segments = Vec::new();
    let mut pass = true;
    for i in 0..=n {
        let p = &path.p[i];
        let length = p.len() as u64;
        let interior = i > 0 && i < n;
        let (on_axis, before, after) = match &path.saturation[i] {
            Some(x) => {
                let on = x.contains(p.start()) && x.contains(&p.end());
                let before = if i > 0 {
                    Some(x.diameter(&x.project_path(&path.q[i - 1])?))
                } else {
                    None
                };
                let after = if i < n {
                    Some(x.diameter(&x.project_path(&path.q[i])?))
                } else {
                    None
                };
                (on, before, after)
            }
            None => (!interior, None, None),
        };
        let long_local = !interior || (on_axis && length > path.l);
        let bounded_projection = before.is_none_or(|d| d <= path.b) && after.is_none_or(|d| d <= path.b);
        pass &= long_local && bounded_projection && (on_axis || !interior);
        segments.push(SegmentCheck {
            index: i,
            length,
            on_axis,
            proj_before: before,
            proj_after: after,
            long_local,
            bounded_projection,
        });
    }
    Ok(AdmissibilityReport {
        l: path.l,
        b: path.b,
        segments,
        pass,
    })
}

/// Finds linearly ordered `z_i <= w_i <= z_{i+1}` on the canonical geodesic between the
/// endpoints with `d(z_i, p_i^-) <= r` and `d(w_i, p_i^+) <= r` (greedy earliest choice).
pub fn fellow_travel_check(_space: &ModelSpace, path: &AdmissiblePath, r: u64) -> Result<FellowTravelReport> {
    path.check_shape()?;
    let alpha = GeodesicPath::canonical(&path.start(), &path.end()).vertices();
    let mut z = Vec::new();
    let mut w = Vec::new();
    let mut cursor = 0;
    let mut violation = None;
    let first_near = |from: usize, target: &Word| (from..alpha.len()).find(|&k| alpha[k].distance(target) <= r);
    for (i, p) in path.p.iter().enumerate() {
        let Some(zi) = first_near(cursor, p.start()) else {
            violation = Some(i);
            break;
        };
        let Some(wi) = first_near(zi, &p.end()) else {
            violation = Some(i);
            break;
        };
        z.push(zi);
        w.push(wi);
        cursor = wi;
    }
    Ok(FellowTravelReport {
        r,
        z,
        w,
        alpha_len: alpha.len(),
        pass: violation.is_none(),
        violation,
    })
}

/// Replaces the stretches of `γ` near each barrier axis by segments on the axis.
///
/// `window` sets the axis windows; entry and exit are the first and last vertices of `γ`
/// within `r` of each axis. Barriers sharing an axis are merged; distinct axes whose
/// stretches interleave are rejected.
pub fn truncate(
    space: &ModelSpace,
    gamma: &GeodesicPath,
    barriers: &[BarrierWitness],
    window: u64,
) -> Result<AdmissiblePath> {
    if barriers.is_empty() {
        return Ok(AdmissiblePath::single(gamma.clone()));
    }
    let r = barriers[0].r;
    let min_f = barriers.iter().map(|b| b.f.len()).min().unwrap_or(0);
    if min_f <= 3 * r {
        return Err(Error::Validation(format!(
            "truncation needs |f| > 3r (min |f| = {min_f}, r = {r})"
        )));
    }
    let verts = gamma.vertices();
    let mut axes: Vec<(usize, usize, Axis)> = Vec::new();
    let mut keys: Vec<(Word, Word)> = Vec::new();
    for b in barriers {
        let ax = Axis::with_stabilizer(&b.f, &b.h, window)?;
        let key = (ax.step().clone(), canonical_coset_rep(&b.h, ax.step()));
        if keys.contains(&key) {
            continue;
        }
        let near: Vec<usize> = (0..verts.len()).filter(|&k| ax.distance_to(&verts[k]) <= r).collect();
        let (Some(&s), Some(&e)) = (near.first(), near.last()) else {
            return Err(Error::Validation("barrier axis does not meet the r-neighbourhood of γ".into()));
        };
        keys.push(key);
        axes.push((s, e, ax));
    }
    axes.sort_by_key(|(s, e, _)| (*s, *e));
    for w in axes.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(Error::Validation(format!(
                "interleaved barriers: stretches [{}, {}] and [{}, {}] overlap",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    let start = gamma.start().clone();
    let end = gamma.end();
    let mut p = vec![GeodesicPath::canonical(&start, &start)];
    let mut q = Vec::new();
    let mut saturation = vec![None];
    let mut prev = start;
    for (s, e, ax) in axes {
        let x = ax.project(&verts[s])?.points[0].clone();
        let y = ax.project(&verts[e])?.points[0].clone();
        q.push(GeodesicPath::canonical(&prev, &x));
        p.push(GeodesicPath::canonical(&x, &y));
        saturation.push(Some(ax));
        prev = y;
    }
    q.push(GeodesicPath::canonical(&prev, &end));
    p.push(GeodesicPath::canonical(&end, &end));
    saturation.push(None);
    let mut path = AdmissiblePath {
        p,
        q,
        saturation,
        l: 0,
        b: 0,
    };
    let (l, b) = measured_constants(&path)?;
    path.l = l;
    path.b = b;
    let _ = space;
    Ok(path)
}

/// Largest `L` and smallest `B` for which the path is admissible: `L = min interior |p_i| - 1`,
/// `B = max` projection diameter of the neighbouring connectors.
pub fn measured_constants(path: &AdmissiblePath) -> Result<(u64, u64)> {
    let n = path.q.len();
    let mut l = u64::MAX;
    let mut b = 0;
    for i in 0..=n {
        if i > 0 && i < n {
            l = l.min((path.p[i].len() as u64).saturating_sub(1));
        }
        if let Some(x) = &path.saturation[i] {
            if i > 0 {
                b = b.max(x.diameter(&x.project_path(&path.q[i - 1])?));
            }
            if i < n {
                b = b.max(x.diameter(&x.project_path(&path.q[i])?));
            }
        }
    }
    Ok((if l == u64::MAX { 0 } else { l }, b))
}
