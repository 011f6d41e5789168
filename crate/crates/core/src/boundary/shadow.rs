use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{GeodesicPath, ModelSpace, Word};

/// Which geodesics `[x, z]` a membership test quantifies over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeodesicSemantics {
    /// Only the canonical geodesic; under-approximates the cone in flats.
    #[default]
    Canonical,
    /// Some geodesic, decided exactly through the interval condition
    /// `d(x,v) + d(v,z) = d(x,z)`.
    SomeGeodesic,
}

/// Cone/shadow of `y` seen from `x`: plain when `fs` is `None`, partial (barrier) otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowSpec {
    pub source: Word,
    pub target: Word,
    pub r: u64,
    pub fs: Option<Vec<Word>>,
    pub semantics: GeodesicSemantics,
}

/// Largest radius accepted by the some-geodesic mode (it enumerates balls of this radius).
pub const SOME_GEODESIC_MAX_RADIUS: u64 = 8;

impl ShadowSpec {
    pub fn plain(source: Word, target: Word, r: u64) -> Self {
        ShadowSpec {
            source,
            target,
            r,
            fs: None,
            semantics: GeodesicSemantics::Canonical,
        }
    }

    pub fn partial(source: Word, target: Word, r: u64, fs: Vec<Word>) -> Self {
        ShadowSpec {
            source,
            target,
            r,
            fs: Some(fs),
            semantics: GeodesicSemantics::Canonical,
        }
    }

    pub fn with_semantics(mut self, semantics: GeodesicSemantics) -> Self {
        self.semantics = semantics;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if matches!(&self.fs, Some(fs) if fs.is_empty()) {
            return Err(Error::Validation("partial shadow needs a non-empty F".into()));
        }
        if self.semantics == GeodesicSemantics::SomeGeodesic && self.r > SOME_GEODESIC_MAX_RADIUS {
            return Err(Error::Capability(format!(
                "some-geodesic shadows are limited to r <= {SOME_GEODESIC_MAX_RADIUS}"
            )));
        }
        Ok(())
    }
}

/// Precomputed state for repeated membership tests.
pub struct Shadow<'a> {
    spec: &'a ShadowSpec,
    near_targets: Vec<(Word, Vec<Word>)>,
}

impl<'a> Shadow<'a> {
    pub fn new(space: &ModelSpace, spec: &'a ShadowSpec) -> Result<Self> {
        spec.validate()?;
        let mut near_targets = Vec::new();
        if spec.semantics == GeodesicSemantics::SomeGeodesic {
            let around_y = space.ball_around(&spec.target, spec.r)?;
            match &spec.fs {
                None => near_targets.push((Word::identity(), around_y)),
                Some(fs) => {
                    for f in fs {
                        near_targets.push((f.clone(), around_y.clone()));
                        near_targets.push((f.clone(), space.ball_around(&spec.target.mul(f), spec.r)?));
                    }
                }
            }
        }
        Ok(Shadow { spec, near_targets })
    }

    pub fn contains(&self, z: &Word) -> bool {
        let s = self.spec;
        match s.semantics {
            GeodesicSemantics::Canonical => {
                let gamma = GeodesicPath::canonical(&s.source, z);
                match &s.fs {
                    None => gamma.distance_to(&s.target).0 <= s.r,
                    Some(fs) => {
                        gamma.distance_to(&s.target).0 <= s.r
                            && fs.iter().any(|f| gamma.distance_to(&s.target.mul(f)).0 <= s.r)
                    }
                }
            }
            GeodesicSemantics::SomeGeodesic => {
                let x = &s.source;
                let dxz = x.distance(z);
                let between = |v: &Word| x.distance(v) + v.distance(z) == dxz;
                match &s.fs {
                    None => self.near_targets[0].1.iter().any(between),
                    Some(_) => self.near_targets.chunks(2).any(|pair| {
                        let (a, b) = (&pair[0].1, &pair[1].1);
                        a.iter().filter(|v| between(v)).any(|v1| {
                            let (d1, e1) = (x.distance(v1), v1.distance(z));
                            b.iter().any(|v2| {
                                let (d2, e2) = (x.distance(v2), v2.distance(z));
                                // v1 then v2, or v2 then v1, on one geodesic
                                (d2 + e2 == dxz) && {
                                    let d12 = v1.distance(v2);
                                    d1 + d12 + e2 == dxz || d2 + d12 + e1 == dxz
                                }
                            })
                        })
                    }),
                }
            }
        }
    }
}

/// Candidates that lie in the shadow, in input order.
pub fn shadow_members(space: &ModelSpace, spec: &ShadowSpec, candidates: &[Word]) -> Result<Vec<Word>> {
    let sh = Shadow::new(space, spec)?;
    let keep: Vec<bool> = candidates.par_iter().map(|z| sh.contains(z)).collect();
    Ok(candidates
        .iter()
        .zip(keep)
        .filter(|&(_z, k)| k).map(|(z, _k)| z.clone())
        .collect())
}
