//! Random walks driven by finitely supported step distributions: drift, horofunction
//! convergence and barrier recurrence along the walk.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{myrberg_stats, MyrbergStats};
use crate::error::{Error, Result};
use crate::space::{GeodesicPath, ModelSpace, Word};

/// Finitely supported probability measure on the group. Sampling uses the cumulative table
/// against one uniform `f64` per step, so trajectories depend only on the seed and the
/// support order.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDistribution {
    support: Vec<(Word, f64)>,
    cumulative: Vec<f64>,
}

impl StepDistribution {
    pub fn new(space: &ModelSpace, support: Vec<(Word, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Validation("step distribution needs a non-empty support".into()));
        }
        for (w, p) in &support {
            space.validate(w)?;
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::Validation(format!("weight of {} must be positive", space.format(w))));
            }
        }
        let total: f64 = support.iter().map(|x| x.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("weights sum to {total}, not 1")));
        }
        let mut acc = 0.0;
        let cumulative = support
            .iter()
            .map(|x| {
                acc += x.1;
                acc / total
            })
            .collect();
        Ok(StepDistribution { support, cumulative })
    }

    /// `srw`: uniform on the generators; `lazy`: stays put with probability 1/2, else `srw`.
    pub fn preset(space: &ModelSpace, name: &str) -> Result<Self> {
        let gens = space.generators();
        let k = gens.len() as f64;
        let srw = gens.iter().map(|&g| (Word::from_gen(g), 1.0 / k));
        match name {
            "srw" => StepDistribution::new(space, srw.collect()),
            "lazy" => StepDistribution::new(
                space,
                std::iter::once((Word::identity(), 0.5))
                    .chain(srw.map(|(w, p)| (w, p / 2.0)))
                    .collect(),
            ),
            _ => Err(Error::Validation(format!("unknown step distribution preset {name:?} (srw, lazy)"))),
        }
    }

    /// Parses lines `weight word`; blank lines and `#` comments are skipped.
    pub fn parse(space: &ModelSpace, text: &str) -> Result<Self> {
        let mut support = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (p, w) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("line {}: expected `weight word`", i + 1)))?;
            let p: f64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad weight {p:?}", i + 1)))?;
            support.push((space.parse(w.trim())?, p));
        }
        StepDistribution::new(space, support)
    }

    pub fn support(&self) -> &[(Word, f64)] {
        &self.support
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> &Word {
        &self.support[self.sample_index(rng)].0
    }

    fn sample_index<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cumulative.partition_point(|&c| c <= u).min(self.support.len() - 1)
    }

    /// Whether products of at most `depth` support elements reach every generator, which
    /// makes the support generate the group as a semigroup.
    pub fn generates_semigroup(&self, space: &ModelSpace, depth: usize) -> bool {
        let mut seen: HashSet<Word> = HashSet::new();
        let mut frontier = vec![Word::identity()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in &frontier {
                for (s, _) in &self.support {
                    let x = w.mul(s);
                    if seen.insert(x.clone()) {
                        next.push(x);
                    }
                }
            }
            frontier = next;
        }
        space.generators().iter().all(|&g| seen.contains(&Word::from_gen(g)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub seed: u64,
    pub steps: u64,
    pub checkpoint_every: u64,
    /// `(n, w_n)` at `n = 0, every, 2·every, ..`, and the final step.
    #[serde(skip)]
    pub checkpoints: Vec<(u64, Word)>,
    /// Support indices of the increments, when kept.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub increments: Option<Vec<u32>>,
}

impl Trajectory {
    pub fn end(&self) -> &Word {
        &self.checkpoints.last().expect("w_0 is always stored").1
    }
}

/// `w_n = g_1 ... g_n` with `g_i` i.i.d. from `mu`, driven by ChaCha8 seeded with `seed`.
pub fn simulate(
    _space: &ModelSpace,
    mu: &StepDistribution,
    n_steps: u64,
    seed: u64,
    checkpoint_every: u64,
    keep_increments: bool,
) -> Result<Trajectory> {
    if checkpoint_every == 0 {
        return Err(Error::Validation("checkpoint spacing must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Word::identity();
    let mut checkpoints = vec![(0, w.clone())];
    let mut increments = keep_increments.then(|| Vec::with_capacity(n_steps as usize));
    for n in 1..=n_steps {
        let i = mu.sample_index(&mut rng);
        w.mul_assign_word(&mu.support[i].0);
        if let Some(inc) = increments.as_mut() {
            inc.push(i as u32);
        }
        if n % checkpoint_every == 0 || n == n_steps {
            checkpoints.push((n, w.clone()));
        }
    }
    Ok(Trajectory {
        seed,
        steps: n_steps,
        checkpoint_every,
        checkpoints,
        increments,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftCurve {
    /// `(n, d(o, w_n) / n)` at the checkpoints with `n > 0`.
    pub points: Vec<(u64, f64)>,
    pub terminal: f64,
    /// `max d(o, w_n) / sqrt(n)`: a diffusive walk stays in a band of a few units.
    pub diffusive_band: f64,
}

pub fn drift(t: &Trajectory) -> Result<DriftCurve> {
    let points: Vec<(u64, f64)> = t
        .checkpoints
        .iter()
        .filter(|(n, _)| *n > 0)
        .map(|(n, w)| (*n, w.len() as f64 / *n as f64))
        .collect();
    if points.is_empty() {
        return Err(Error::Validation("drift needs at least one step".into()));
    }
    let diffusive_band = t
        .checkpoints
        .iter()
        .filter(|(n, _)| *n > 0)
        .map(|(n, w)| w.len() as f64 / (*n as f64).sqrt())
        .fold(0.0, f64::max);
    Ok(DriftCurve {
        terminal: points.last().expect("non-empty").1,
        points,
        diffusive_band,
    })
}

/// Most checkpoints entering the Gromov-product curve (it costs a quadratic number of products).
pub const GROMOV_CHECKPOINTS: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceParams {
    /// Ball radius of the horovectors.
    pub r: u64,
    /// Consecutive agreeing checkpoints required.
    pub window: usize,
    /// Barrier set and radius for the Myrberg counts; skipped when empty.
    pub fs: Vec<Word>,
    pub barrier_r: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryConvergence {
    pub r: u64,
    pub window: usize,
    pub stabilized: bool,
    /// First checkpoint step from which every later horovector agrees.
    pub stabilized_at: Option<u64>,
    /// Horovector values on the shortlex-sorted ball, when stabilized.
    pub limit: Option<Vec<i64>>,
    /// `(n, min_{m > n} <w_n, w_m>_o)` over checkpoints.
    pub gromov: Vec<(u64, f64)>,
    /// The Gromov curve never decreases.
    pub gromov_monotone: bool,
    /// Barrier counts on the canonical geodesic `[o, w_N]`.
    pub myrberg: Option<MyrbergStats>,
}

pub fn boundary_convergence(space: &ModelSpace, t: &Trajectory, p: &ConvergenceParams) -> Result<BoundaryConvergence> {
    let ys: Vec<Word> = t.checkpoints.iter().map(|c| c.1.clone()).collect();
    let mut ball = space.ball(p.r)?;
    ball.sort_by(Word::shortlex_cmp);
    let vecs: Vec<Vec<i64>> = ys
        .iter()
        .map(|y| ball.iter().map(|x| x.distance(y) as i64 - y.len() as i64).collect())
        .collect();
    let last = vecs.last().expect("w_0 is always stored");
    let first_agree = vecs.iter().rposition(|v| v != last).map_or(0, |i| i + 1);
    // same acceptance rule as a horofunction limit: the last `window` terms agree
    let stabilized = p.window > 0 && ys.len() >= p.window && first_agree <= ys.len() - p.window;
    let stabilized_at = stabilized.then(|| t.checkpoints[first_agree].0);
    let limit = stabilized.then(|| last.clone());
    // suffix minimum of <w_n, w_m>_o over m > n, on evenly spaced checkpoints
    let stride = ys.len().div_ceil(GROMOV_CHECKPOINTS).max(1);
    let idx: Vec<usize> = (0..ys.len()).step_by(stride).collect();
    let mut gromov = Vec::new();
    for (a, &i) in idx.iter().enumerate().take(idx.len().saturating_sub(1)) {
        let m = idx[a + 1..].iter().map(|&j| ys[i].gromov_product2(&ys[j])).min().expect("non-empty");
        gromov.push((t.checkpoints[i].0, m as f64 / 2.0));
    }
    let gromov_monotone = gromov.windows(2).all(|w| w[1].1 >= w[0].1);
    let myrberg = if p.fs.is_empty() {
        None
    } else {
        let ray = GeodesicPath::canonical(&Word::identity(), t.end());
        Some(myrberg_stats(space, &ray, &p.fs, p.barrier_r)?)
    };
    Ok(BoundaryConvergence {
        r: p.r,
        window: p.window,
        stabilized,
        stabilized_at,
        limit,
        gromov,
        gromov_monotone,
        myrberg,
    })
}
