use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::series::{poincare_partial, KahanSum};
use crate::boundary::{random_geodesic_ray, GeodesicSemantics, Shadow, ShadowSpec};
use crate::error::{Error, Result};
use crate::space::{AnnulusSpec, Family, Gen, GeodesicPath, ModelSpace, SubgroupPredicate, Word};

/// Whether appending `g` to `w` extends the canonical spelling of `w` by one step, i.e.
/// `w` lies on the canonical geodesic `[o, w g]` and `|w g| = |w| + 1`.
pub fn extends_spelling(w: &Word, g: Gen) -> bool {
    let Some(last) = w.last_syllable() else { return true };
    if last.factor != g.factor {
        return true;
    }
    let c = g.coord as usize;
    let e = last.exps[c];
    (e == 0 || e.signum() as i8 == g.sign) && last.exps[c + 1..].iter().all(|&x| x == 0)
}

/// `v` is a vertex of the canonical geodesic `[o, z]`.
pub fn is_spelling_prefix(v: &Word, z: &Word) -> bool {
    v.len() <= z.len() && z.canonical_steps().starts_with(&v.canonical_steps())
}

/// Depth-first walk of the canonical-spelling subtree below `root`, down to length `max_len`.
fn walk_subtree<F: FnMut(&Word)>(space: &ModelSpace, w: &mut Word, max_len: u64, f: &mut F) {
    f(w);
    if w.len() >= max_len {
        return;
    }
    for &g in space.generators() {
        if extends_spelling(w, g) {
            w.mul_gen(g);
            walk_subtree(space, w, max_len, f);
            w.mul_gen(g.inverse());
        }
    }
}

/// Truncated Patterson-Sullivan estimator: atoms `e^{-s d(x, g)} / P(s, o, o)` on `B(o, R)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub s: f64,
    pub r: u64,
    #[serde(skip)]
    pub x: Word,
    /// Truncated `P(s, o, o)`.
    pub normalizer: f64,
    /// Set when `s` does not exceed the growth quotient at `R`.
    pub warning: Option<String>,
    #[serde(skip)]
    weights: Vec<f64>,
}

pub fn ps_measure(space: &ModelSpace, s: f64, x: &Word, r: u64) -> Result<MeasureEstimate> {
    space.validate(x)?;
    let o = Word::identity();
    let p = poincare_partial(space, &SubgroupPredicate::Whole, s, &o, &o, r)?;
    let q = if r == 0 {
        0.0
    } else {
        (p.counts[r as usize] as f64).ln() / r as f64
    };
    let warning = (s <= q).then(|| format!("s = {s} does not exceed the growth quotient {q:.4} at R = {r}"));
    let weights = (0..=r + x.len()).map(|n| (-s * n as f64).exp() / p.partial_sum).collect();
    Ok(MeasureEstimate {
        s,
        r,
        x: x.clone(),
        normalizer: p.partial_sum,
        warning,
        weights,
    })
}

impl MeasureEstimate {
    /// Mass of the atom at `g` (zero outside `B(o, R)`).
    pub fn atom(&self, g: &Word) -> f64 {
        if g.len() > self.r {
            return 0.0;
        }
        self.weights[self.x.distance(g) as usize]
    }

    pub fn total_mass(&self, space: &ModelSpace) -> Result<f64> {
        if self.x.is_identity() {
            let c = space.sphere_counts(self.r)?;
            return Ok(c.iter().enumerate().map(|(n, &c)| c as f64 * self.weights[n]).collect::<KahanSum>().value());
        }
        let mut k = KahanSum::default();
        space.for_each_in_annulus(&AnnulusSpec::ball(self.r), |g| k.add(self.atom(g)))?;
        Ok(k.value())
    }

    /// Mass of a shadow seen from `o` with canonical semantics: the union of the spelling
    /// subtrees of the minimal points of `B(v, r)`, filtered by barrier membership when
    /// `F` is given. Other shadows go through a scan of `B(o, R)`.
    pub fn shadow_mass(&self, space: &ModelSpace, spec: &ShadowSpec) -> Result<f64> {
        let sh = Shadow::new(space, spec)?;
        if !spec.source.is_identity() || spec.semantics != GeodesicSemantics::Canonical {
            let mut k = KahanSum::default();
            space.for_each_in_annulus(&AnnulusSpec::ball(self.r), |g| {
                if sh.contains(g) {
                    k.add(self.atom(g))
                }
            })?;
            return Ok(k.value());
        }
        let filter = spec.fs.is_some();
        let roots = minimal_points(space, &spec.target, spec.r)?;
        let cap = space.enumeration_cap();
        let mut visited = 0u128;
        let mut k = KahanSum::default();
        for u in roots {
            let mut w = u;
            walk_subtree(space, &mut w, self.r, &mut |h| {
                visited += 1;
                if !filter || sh.contains(h) {
                    k.add(self.atom(h));
                }
            });
            if visited > cap {
                return Err(Error::Resource {
                    cap_name: "enumeration_cap".into(),
                    needed: visited,
                    cap,
                });
            }
        }
        Ok(k.value())
    }
}

/// Points of `B(v, r)` with no other point of the ball on their canonical geodesic from `o`.
fn minimal_points(space: &ModelSpace, v: &Word, r: u64) -> Result<Vec<Word>> {
    let ball = space.ball_around(v, r)?;
    Ok(ball
        .iter()
        .filter(|u| {
            let p = GeodesicPath::canonical(&Word::identity(), u);
            let mut minimal = true;
            p.for_each_vertex(|i, z| {
                if (i as u64) < u.len() && z.distance(v) <= r {
                    minimal = false;
                }
            });
            minimal
        })
        .cloned()
        .collect())
}

/// Exact limiting visual measure of a Free(k) tree, by cylinder counting:
/// `μ_x(cyl_o(v)) = #{z ∈ S(x, N) : v ∈ [o, z]} / |S(x, N)|` with `N = |x| + |v| + 1`.
pub fn exact_cylinder_mass(space: &ModelSpace, x: &Word, v: &Word) -> Result<BigRational> {
    free_rank(space)?;
    space.validate(x)?;
    space.validate(v)?;
    if v.is_identity() {
        return Ok(BigRational::one());
    }
    let n = x.len() + v.len() + 1;
    let total = space.sphere_count(n)?;
    let hits: u128 = if x.is_identity() {
        let mut c = 0u128;
        let mut w = v.clone();
        walk_subtree(space, &mut w, n, &mut |h| c += u128::from(h.len() == n));
        c
    } else {
        let mut c = 0u128;
        space.for_each_in_sphere(n, |u| c += u128::from(is_spelling_prefix(v, &x.mul(u))))?;
        c
    };
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(total)))
}

pub(crate) fn free_rank(space: &ModelSpace) -> Result<usize> {
    match space.family() {
        Family::Free { rank } => Ok(*rank),
        _ => Err(Error::Capability("exact-limit mode is available on free groups only".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowRow {
    pub target: String,
    pub n: u64,
    pub mass: f64,
    /// `mass · e^{ω n}`.
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_ratio: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnulusSummary {
    pub n: u64,
    pub targets: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Most same-annulus shadows containing one sampled deep atom.
    pub max_overlap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowReport {
    pub mode: &'static str,
    pub omega: f64,
    pub r: u64,
    pub partial: bool,
    pub measure: Option<MeasureEstimate>,
    pub rows: Vec<ShadowRow>,
    pub annuli: Vec<AnnulusSummary>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`.
    pub spread: f64,
    pub overlap_samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShadowReportParams {
    pub omega: f64,
    pub r: u64,
    pub fs: Option<Vec<Word>>,
    pub n1: u64,
    pub n2: u64,
    /// Deep atoms sampled for the overlap count (0 disables it).
    pub overlap_samples: usize,
    pub seed: u64,
}

fn check_annuli(n1: u64, n2: u64) -> Result<()> {
    if n1 > n2 {
        return Err(Error::Validation(format!("empty annulus range {n1}..{n2}")));
    }
    Ok(())
}

/// Shadow masses `μ(Π_o(v, r))` of every `v` with `n1 <= |v| <= n2` under an estimator measure.
pub fn shadow_report(space: &ModelSpace, m: &MeasureEstimate, p: &ShadowReportParams) -> Result<ShadowReport> {
    check_annuli(p.n1, p.n2)?;
    if p.n2 > m.r {
        return Err(Error::Validation(format!("annulus {} lies beyond the measure radius {}", p.n2, m.r)));
    }
    let plain_cylinders = p.r == 0 && p.fs.is_none() && m.x.is_identity();
    let masses: Vec<(Word, f64)> = if plain_cylinders {
        cylinder_masses(space, m, p.n1, p.n2)
    } else {
        let mut targets = Vec::new();
        for n in p.n1..=p.n2 {
            targets.extend(space.enumerate_annulus(&AnnulusSpec::sphere(n))?);
        }
        targets
            .into_par_iter()
            .map(|v| {
                let mass = m.shadow_mass(space, &shadow_spec(&v, p))?;
                Ok((v, mass))
            })
            .collect::<Result<_>>()?
    };
    let rows = sorted_rows(
        space,
        masses.into_iter().map(|(v, mass)| {
            let ratio = mass * (p.omega * v.len() as f64).exp();
            (v, mass, ratio, None)
        }),
    );
    let overlaps = overlap_counts(space, p, m.r)?;
    Ok(finish("estimator", p, Some(m.clone()), rows, overlaps))
}

/// Exact-limit shadow report on Free(k): plain cylinders, masses by cylinder counting.
pub fn exact_shadow_report(space: &ModelSpace, n1: u64, n2: u64) -> Result<ShadowReport> {
    check_annuli(n1, n2)?;
    let k = free_rank(space)? as i64;
    let base = BigInt::from(2 * k - 1);
    let omega = ((2 * k - 1) as f64).ln();
    let mut masses = Vec::new();
    for n in n1..=n2 {
        let scale = BigRational::from_integer(num_traits::pow(base.clone(), n as usize));
        let targets = space.enumerate_annulus(&AnnulusSpec::sphere(n))?;
        let part: Vec<(Word, BigRational, BigRational)> = targets
            .into_par_iter()
            .map(|v| {
                let mass = exact_cylinder_mass(space, &Word::identity(), &v)?;
                let ratio = &mass * &scale;
                Ok((v, mass, ratio))
            })
            .collect::<Result<_>>()?;
        masses.extend(part);
    }
    let rows = sorted_rows(
        space,
        masses
            .into_iter()
            .map(|(v, mass, ratio)| (v, ratio_f64(&mass), ratio_f64(&ratio), Some(ratio.to_string()))),
    );
    let p = ShadowReportParams {
        omega,
        r: 0,
        fs: None,
        n1,
        n2,
        overlap_samples: 0,
        seed: 0,
    };
    Ok(finish("exact", &p, None, rows, Vec::new()))
}

fn shadow_spec(v: &Word, p: &ShadowReportParams) -> ShadowSpec {
    match &p.fs {
        Some(fs) => ShadowSpec::partial(Word::identity(), v.clone(), p.r, fs.clone()),
        None => ShadowSpec::plain(Word::identity(), v.clone(), p.r),
    }
}

fn sorted_rows<I>(space: &ModelSpace, it: I) -> Vec<ShadowRow>
where
    I: Iterator<Item = (Word, f64, f64, Option<String>)>,
{
    let mut v: Vec<_> = it.collect();
    v.sort_by(|a, b| a.0.shortlex_cmp(&b.0));
    v.into_iter()
        .map(|(w, mass, ratio, exact_ratio)| ShadowRow {
            target: space.format(&w),
            n: w.len(),
            mass,
            ratio,
            exact_ratio,
        })
        .collect()
}

fn finish(
    mode: &'static str,
    p: &ShadowReportParams,
    measure: Option<MeasureEstimate>,
    rows: Vec<ShadowRow>,
    overlaps: Vec<usize>,
) -> ShadowReport {
    let annuli: Vec<AnnulusSummary> = (p.n1..=p.n2)
        .map(|n| {
            let rs: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.ratio).collect();
            AnnulusSummary {
                n,
                targets: rs.len(),
                min_ratio: rs.iter().copied().fold(f64::INFINITY, f64::min),
                max_ratio: rs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                max_overlap: overlaps.get((n - p.n1) as usize).copied(),
            }
        })
        .collect();
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    ShadowReport {
        mode,
        omega: p.omega,
        r: p.r,
        partial: p.fs.is_some(),
        measure,
        rows,
        annuli,
        min_ratio,
        max_ratio,
        spread: max_ratio / min_ratio,
        overlap_samples: p.overlap_samples,
    }
}

/// Masses of all plain cylinders `Π_o(v, 0)` with `n1 <= |v| <= n2`, by one pass over the
/// spelling tree of `B(o, R)` accumulating subtree sums.
fn cylinder_masses(space: &ModelSpace, m: &MeasureEstimate, n1: u64, n2: u64) -> Vec<(Word, f64)> {
    fn go(
        space: &ModelSpace,
        m: &MeasureEstimate,
        w: &mut Word,
        n1: u64,
        n2: u64,
        out: &mut Vec<(Word, f64)>,
    ) -> KahanSum {
        let mut k = KahanSum::default();
        k.add(m.atom(w));
        if w.len() < m.r {
            for &g in space.generators() {
                if extends_spelling(w, g) {
                    w.mul_gen(g);
                    let sub = go(space, m, w, n1, n2, out);
                    k.add(sub.value());
                    w.mul_gen(g.inverse());
                }
            }
        }
        if (n1..=n2).contains(&w.len()) {
            out.push((w.clone(), k.value()));
        }
        k
    }
    let firsts: Vec<Gen> = space.generators().to_vec();
    let mut out: Vec<(Word, f64)> = firsts
        .par_iter()
        .flat_map_iter(|&g| {
            let mut out = Vec::new();
            if m.r > 0 {
                let mut w = Word::from_gen(g);
                go(space, m, &mut w, n1, n2, &mut out);
            }
            out
        })
        .collect();
    if n1 == 0 {
        // the shadow of o is everything; x = o here so the total is 1
        out.push((Word::identity(), 1.0));
    }
    out
}

/// Per annulus, the largest number of same-annulus shadows containing one sampled deep atom.
fn overlap_counts(space: &ModelSpace, p: &ShadowReportParams, depth: u64) -> Result<Vec<usize>> {
    if p.overlap_samples == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let seeds: Vec<u64> = (0..p.overlap_samples).map(|_| rng.gen()).collect();
    let per_sample: Vec<Vec<usize>> = seeds
        .par_iter()
        .map(|&sd| {
            let ray = random_geodesic_ray(space, depth as usize, sd);
            let h = ray.end();
            (p.n1..=p.n2)
                .map(|n| {
                    let lo = n.saturating_sub(p.r) as usize;
                    let hi = ((n + p.r) as usize).min(ray.len());
                    let mut cands: Vec<Word> = Vec::new();
                    for i in lo..=hi {
                        for v in space.ball_around(&ray.vertex(i), p.r)? {
                            if v.len() == n && !cands.contains(&v) {
                                cands.push(v);
                            }
                        }
                    }
                    let mut c = 0;
                    for v in &cands {
                        let spec = shadow_spec(v, p);
                        if Shadow::new(space, &spec)?.contains(&h) {
                            c += 1;
                        }
                    }
                    Ok(c)
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;
    Ok((0..=(p.n2 - p.n1) as usize)
        .map(|i| per_sample.iter().map(|s| s[i]).max().unwrap_or(0))
        .collect())
}

pub(crate) fn ratio_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        0.0
    } else {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> ModelSpace {
        ModelSpace::preset("f2").unwrap()
    }

    #[test]
    fn spelling_tree_is_the_ball() {
        for name in ["f2", "z2", "z2*z", "z3"] {
            let sp = ModelSpace::preset(name).unwrap();
            let mut seen = Vec::new();
            walk_subtree(&sp, &mut Word::identity(), 4, &mut |w| seen.push(w.clone()));
            let mut ball = sp.ball(4).unwrap();
            assert_eq!(seen.len(), ball.len(), "{name}");
            seen.sort_by(|a, b| a.shortlex_cmp(b));
            ball.sort_by(|a, b| a.shortlex_cmp(b));
            assert_eq!(seen, ball, "{name}");
        }
    }

    #[test]
    fn normalized_at_o() {
        let sp = f2();
        let m = ps_measure(&sp, 3f64.ln() + 0.05, &Word::identity(), 8).unwrap();
        assert!((m.total_mass(&sp).unwrap() - 1.0).abs() < 1e-12);
        assert!(m.warning.is_none());
        assert!(ps_measure(&sp, 0.5, &Word::identity(), 8).unwrap().warning.is_some());
    }

    #[test]
    fn cylinder_masses_match_scan() {
        let sp = f2();
        let m = ps_measure(&sp, 1.2, &Word::identity(), 7).unwrap();
        let fast = cylinder_masses(&sp, &m, 2, 3);
        for (v, mass) in fast.iter().take(20) {
            let mut slow = 0.0;
            sp.for_each_in_annulus(&AnnulusSpec::ball(7), |g| {
                if is_spelling_prefix(v, g) {
                    slow += m.atom(g)
                }
            })
            .unwrap();
            assert!((mass - slow).abs() < 1e-12);
            let via = m.shadow_mass(&sp, &ShadowSpec::plain(Word::identity(), v.clone(), 0)).unwrap();
            assert!((mass - via).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_masses() {
        let sp = f2();
        let a = sp.parse("a").unwrap();
        let quarter = BigRational::new(1.into(), 4.into());
        assert_eq!(exact_cylinder_mass(&sp, &Word::identity(), &a).unwrap(), quarter);
        assert_eq!(exact_cylinder_mass(&sp, &a, &a).unwrap(), BigRational::new(3.into(), 4.into()));
        let rep = exact_shadow_report(&sp, 1, 3).unwrap();
        assert!(rep.rows.iter().all(|r| r.exact_ratio.as_deref() == Some("3/4")));
        assert!(exact_shadow_report(&ModelSpace::preset("z2").unwrap(), 1, 2).is_err());
    }
}
