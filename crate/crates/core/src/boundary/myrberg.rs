use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contracting::count_barriers;
use crate::error::{Error, Result};
use crate::space::{GeodesicPath, ModelSpace, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MyrbergStats {
    pub length: usize,
    pub r: u64,
    /// Prefix lengths `N/4, N/2, N`.
    pub depths: [usize; 3],
    pub fs: Vec<String>,
    /// Per `f`, the number of distinct `(r, f)`-barriers of each prefix.
    pub counts: Vec<[u64; 3]>,
}

impl MyrbergStats {
    /// Every `f` has a barrier on the full prefix.
    pub fn all_positive(&self) -> bool {
        self.counts.iter().all(|c| c[2] > 0)
    }
}

/// Barrier counts of a ray prefix at a quarter, half and the full length.
pub fn myrberg_stats(space: &ModelSpace, ray: &GeodesicPath, fs: &[Word], r: u64) -> Result<MyrbergStats> {
    if !ray.is_geodesic() {
        return Err(Error::Validation("Myrberg statistics need a geodesic ray prefix".into()));
    }
    let n = ray.len();
    let depths = [n / 4, n / 2, n];
    let raw = count_barriers(space, ray, fs, r, &depths)?;
    Ok(MyrbergStats {
        length: n,
        r,
        depths,
        fs: fs.iter().map(|f| space.format(f)).collect(),
        counts: raw.into_iter().map(|c| [c[0], c[1], c[2]]).collect(),
    })
}

/// Geodesic ray prefix from `o` where each step is drawn uniformly among the generators
/// that increase the length. On a free group this is the uniform reduced ray.
pub fn random_geodesic_ray(space: &ModelSpace, length: usize, seed: u64) -> GeodesicPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = space.generators();
    let mut w = Word::identity();
    let mut steps = Vec::with_capacity(length);
    let mut options = Vec::with_capacity(gens.len());
    for _ in 0..length {
        options.clear();
        for &g in gens {
            let mut t = w.clone();
            t.mul_gen(g);
            if t.len() > w.len() {
                options.push(g);
            }
        }
        let g = *options.choose(&mut rng).expect("some generator extends every word");
        w.mul_gen(g);
        steps.push(g);
    }
    GeodesicPath::from_steps(Word::identity(), steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_ray_counts() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let w = |s: &str| f2.parse(s).unwrap();
        let ray = GeodesicPath::canonical(&Word::identity(), &w("a b").pow(40));
        let fs = vec![w("a b").pow(3), w("a b^-1").pow(3)];
        let s = myrberg_stats(&f2, &ray, &fs, 2).unwrap();
        assert!(s.counts[0][0] < s.counts[0][1] && s.counts[0][1] < s.counts[0][2]);
        assert!(s.counts[1][2] <= 2);
        assert_eq!(myrberg_stats(&f2, &ray, &[], 2).unwrap().counts.len(), 0);
    }

    #[test]
    fn random_rays_are_geodesic_and_reproducible() {
        for name in ["f2", "z2", "z2*z"] {
            let sp = ModelSpace::preset(name).unwrap();
            let ray = random_geodesic_ray(&sp, 200, 11);
            assert!(ray.is_geodesic());
            assert_eq!(ray.end().len(), 200);
            assert_eq!(ray.end(), random_geodesic_ray(&sp, 200, 11).end());
        }
    }
}
