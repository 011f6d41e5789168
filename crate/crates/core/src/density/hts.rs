use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::series::{from_counts, orbit_counts, slope};
use crate::boundary::{random_geodesic_ray, Shadow, ShadowSpec};
use crate::error::{Error, Result};
use crate::space::{CountMethod, Family, ModelSpace, SubgroupPredicate, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct ConicalProxyParams {
    pub samples: usize,
    pub seed: u64,
    pub r: u64,
    pub fs: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HtsParams {
    pub r: u64,
    /// Convergent-regime check runs at `ω̂ + conv_offset`.
    pub conv_offset: f64,
    pub conv_radius: u64,
    pub proxy: Option<ConicalProxyParams>,
}

impl HtsParams {
    pub fn new(r: u64) -> Self {
        HtsParams {
            r,
            conv_offset: 0.2,
            conv_radius: 60,
            proxy: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceCheck {
    pub s: f64,
    pub radius: u64,
    pub partial_sum: f64,
    /// `P_R - P_{R-1}`.
    pub last_increment: f64,
    /// `last_increment <= 1e-6 · P_R`.
    pub cauchy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConicalProxy {
    pub samples: usize,
    pub seed: u64,
    pub mid: u64,
    pub hits: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HtsReport {
    pub omega_hat: f64,
    pub r: u64,
    /// `P_n(ω̂)` for `n = 0..=R`.
    pub partial_sums: Vec<f64>,
    /// Least-squares slope of the partial sums over the upper half of `n`.
    pub growth_slope: f64,
    /// Last increment over the first (`n >= 1`); near 1 for linear growth.
    pub increment_ratio: f64,
    /// Range of `count_n / e^{ω̂ n}` over non-empty `n <= R`.
    pub count_ratio_min: f64,
    pub count_ratio_max: f64,
    pub convergent: ConvergenceCheck,
    pub conical_proxy: Option<ConicalProxy>,
    pub degenerate: bool,
    pub flags: Vec<String>,
}

/// Evidence for divergence at `s = ω̂`: partial-sum growth, purely exponential growth of the
/// counts, a convergent control at `ω̂ + offset`, and an optional conical-mass proxy.
pub fn hts_evidence(space: &ModelSpace, pred: &SubgroupPredicate, omega_hat: f64, p: &HtsParams) -> Result<HtsReport> {
    if p.r == 0 {
        return Err(Error::Validation("HTS evidence needs R >= 1".into()));
    }
    let o = Word::identity();
    let counts = orbit_counts(space, pred, &o, &o, p.r.max(p.conv_radius), CountMethod::Auto)?;
    let at = from_counts(omega_hat, counts[..=p.r as usize].to_vec());
    let mut partial_sums = Vec::with_capacity(at.contributions.len());
    let mut acc = super::series::KahanSum::default();
    for c in &at.contributions {
        acc.add(*c);
        partial_sums.push(acc.value());
    }
    let pts: Vec<(f64, f64)> = partial_sums.iter().enumerate().map(|(n, &v)| (n as f64, v)).collect();
    let growth_slope = slope(&pts[pts.len() / 2..]);
    let incs: Vec<f64> = at.contributions[1..].iter().copied().filter(|&c| c > 0.0).collect();
    let increment_ratio = match (incs.first(), incs.last()) {
        (Some(a), Some(b)) => b / a,
        _ => 0.0,
    };
    let ratios: Vec<f64> = counts[..=p.r as usize]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(n, &c)| ((c as f64).ln() - omega_hat * n as f64).exp())
        .collect();
    let s = omega_hat + p.conv_offset;
    let conv = from_counts(s, counts[..=p.conv_radius as usize].to_vec());
    let last_increment = *conv.contributions.last().expect("radius >= 0");
    let convergent = ConvergenceCheck {
        s,
        radius: p.conv_radius,
        partial_sum: conv.partial_sum,
        last_increment,
        cauchy: last_increment <= 1e-6 * conv.partial_sum,
    };
    let mut flags = Vec::new();
    let degenerate = omega_hat <= 1e-9 || matches!(space.family(), Family::Lattice { .. });
    if degenerate {
        flags.push("degenerate: polynomial growth, the series at ω̂ is the raw count".into());
    }
    if !pred.is_whole() && !matches!(space.family(), Family::Free { .. }) {
        flags.push("conical proxy samples rays of the ambient group".into());
    }
    let conical_proxy = p.proxy.as_ref().map(|q| conical_proxy(space, p.r, q)).transpose()?;
    Ok(HtsReport {
        omega_hat,
        r: p.r,
        partial_sums,
        growth_slope,
        increment_ratio,
        count_ratio_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        count_ratio_max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        convergent,
        conical_proxy,
        degenerate,
        flags,
    })
}

/// Fraction of sampled deep points `h ∈ S(o, R)` lying in some partial shadow
/// `Π_o^F(v, r)` with `|v| = R/2`. Rays are drawn step-uniformly, which is the uniform
/// measure on spheres of a free group.
fn conical_proxy(space: &ModelSpace, depth: u64, q: &ConicalProxyParams) -> Result<ConicalProxy> {
    if q.fs.is_empty() {
        return Err(Error::Validation("conical proxy needs a non-empty F".into()));
    }
    let mid = depth / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(q.seed);
    let seeds: Vec<u64> = (0..q.samples).map(|_| rng.gen()).collect();
    let hits: Vec<bool> = seeds
        .par_iter()
        .map(|&sd| {
            let ray = random_geodesic_ray(space, depth as usize, sd);
            let h = ray.end();
            let lo = mid.saturating_sub(q.r) as usize;
            let hi = ((mid + q.r) as usize).min(ray.len());
            for i in lo..=hi {
                for v in space.ball_around(&ray.vertex(i), q.r)? {
                    if v.len() != mid {
                        continue;
                    }
                    let spec = ShadowSpec::partial(Word::identity(), v, q.r, q.fs.clone());
                    if Shadow::new(space, &spec)?.contains(&h) {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        })
        .collect::<Result<_>>()?;
    let n = hits.iter().filter(|&&b| b).count();
    Ok(ConicalProxy {
        samples: q.samples,
        seed: q.seed,
        mid,
        hits: n,
        fraction: if q.samples == 0 { 0.0 } else { n as f64 / q.samples as f64 },
    })
}
