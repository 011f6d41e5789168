use serde::Serialize;

use crate::contracting::{canonical_coset_rep, find_barriers, primitive_root, smallest_contracting_constant, Axis, BarrierWitness};
use crate::error::{Error, Result};
use crate::space::{GeodesicPath, ModelSpace, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConicalParams {
    /// Barrier radius.
    pub r: u64,
    /// Required projection spread.
    pub l: u64,
    /// Ball radius for certifying the elements of `F`.
    pub certify_radius: u64,
    /// Largest contracting constant accepted.
    pub c_max: u64,
}

impl Default for ConicalParams {
    fn default() -> Self {
        ConicalParams {
            r: 0,
            l: 3,
            certify_radius: 6,
            c_max: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertifiedElement {
    pub f: String,
    /// Smallest certified constant, `None` when above `c_max`.
    pub c: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxisSpread {
    pub f: String,
    pub translate: String,
    /// `d_X(start of ray, end of ray)`.
    pub spread: u64,
    /// Ray index of the barrier that introduced the axis.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConicalWitness {
    pub l: u64,
    pub certified: Vec<CertifiedElement>,
    /// Distinct axes met by the ray with spread `>= L`, in ray order.
    pub axes: Vec<AxisSpread>,
    /// Barriers of the ray for the certified elements.
    pub barriers: Vec<BarrierWitness>,
    /// Axes dropped because no window up to the cap made both projections conclusive.
    pub inconclusive: usize,
}

fn certification_window(f: &Word, radius: u64) -> u64 {
    4 * radius + 2 * f.len()
}

/// Axes `h·Ax(f)` through the barriers of the ray whose projection spread reaches `L`.
/// Only elements of `F` certified contracting (constant `<= c_max` on `B(o, certify_radius)`)
/// are used.
pub fn conical_witness(space: &ModelSpace, ray: &GeodesicPath, fs: &[Word], p: &ConicalParams) -> Result<ConicalWitness> {
    if !ray.is_geodesic() {
        return Err(Error::Validation("conical witness needs a geodesic ray prefix".into()));
    }
    let mut certified = Vec::new();
    let mut usable = Vec::new();
    for f in fs {
        let ax = Axis::with_stabilizer(f, &Word::identity(), certification_window(f, p.certify_radius))?;
        let c = smallest_contracting_constant(space, &ax, p.certify_radius, p.c_max)?.map(|c| c.c);
        if c.is_some() {
            usable.push(f.clone());
        }
        certified.push(CertifiedElement { f: space.format(f), c });
    }
    let barriers = find_barriers(space, ray, &usable, p.r)?;
    let start = ray.start().clone();
    let end = ray.end();
    let cap = 4 * (ray.len() as u64 + start.len() + end.len()) + 16;
    let mut seen: Vec<(Word, Word)> = Vec::new();
    let mut axes = Vec::new();
    let mut inconclusive = 0;
    for b in &barriers {
        let root = primitive_root(&b.f).0;
        let key = (canonical_coset_rep(&b.h, &root), root);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let mut window = 2 * (b.f.len() + p.l + p.r).max(1);
        let spread = loop {
            let ax = Axis::with_stabilizer(&b.f, &b.h, window)?;
            match ax.project_set([&start, &end]) {
                Ok(idx) => break Some(ax.diameter(&idx)),
                Err(Error::Inconclusive(_)) if window < cap => window *= 2,
                Err(Error::Inconclusive(_)) => break None,
                Err(e) => return Err(e),
            }
        };
        match spread {
            Some(s) if s >= p.l => axes.push(AxisSpread {
                f: space.format(&b.f),
                translate: space.format(&b.h),
                spread: s,
                position: b.pos_h,
            }),
            Some(_) => {}
            None => inconclusive += 1,
        }
    }
    Ok(ConicalWitness {
        l: p.l,
        certified,
        axes,
        barriers,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_along_an_axis() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let f = f2.parse("a b").unwrap();
        let ray = GeodesicPath::canonical(&Word::identity(), &f.pow(10));
        let p = ConicalParams { l: 20, ..Default::default() };
        let w = conical_witness(&f2, &ray, &[f], &p).unwrap();
        assert_eq!(w.axes.len(), 1);
        assert_eq!(w.axes[0].spread, 20);
    }

    #[test]
    fn flat_has_no_witness() {
        let z2 = ModelSpace::preset("z2").unwrap();
        let ray = GeodesicPath::canonical(&Word::identity(), &z2.parse("a^12").unwrap());
        let w = conical_witness(&z2, &ray, &[z2.parse("a").unwrap()], &ConicalParams::default()).unwrap();
        assert_eq!(w.certified[0].c, None);
        assert!(w.axes.is_empty());
    }
}
