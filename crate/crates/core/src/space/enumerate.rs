use smallvec::SmallVec;

use super::{Exps, ModelSpace, Syllable, Word};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: u128 = 100_000_000;

/// `{v : |d(center, v) - radius| <= width}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnulusSpec {
    pub center: Word,
    pub radius: u64,
    pub width: u64,
}

impl AnnulusSpec {
    pub fn sphere(radius: u64) -> Self {
        AnnulusSpec {
            center: Word::identity(),
            radius,
            width: 0,
        }
    }

    /// `B(o, r)`.
    pub fn ball(r: u64) -> Self {
        AnnulusSpec {
            center: Word::identity(),
            radius: 0,
            width: r,
        }
    }

    pub fn contains(&self, v: &Word) -> bool {
        self.center.distance(v).abs_diff(self.radius) <= self.width
    }

    pub fn lengths(&self) -> std::ops::RangeInclusive<u64> {
        self.radius.saturating_sub(self.width)..=self.radius + self.width
    }
}

/// All vectors of `Z^rank` with L1 norm exactly `norm`, in a fixed order.
pub fn lattice_vectors(rank: usize, norm: u64) -> Vec<Exps> {
    fn rec(rank: usize, i: usize, left: u64, cur: &mut Exps, out: &mut Vec<Exps>) {
        if i + 1 == rank {
            if left == 0 {
                cur[i] = 0;
                out.push(cur.clone());
            } else {
                for s in [1i64, -1] {
                    cur[i] = (s * left as i64) as i32;
                    out.push(cur.clone());
                }
            }
            return;
        }
        for k in 0..=left {
            if k == 0 {
                cur[i] = 0;
                rec(rank, i + 1, left, cur, out);
            } else {
                for s in [1i64, -1] {
                    cur[i] = (s * k as i64) as i32;
                    rec(rank, i + 1, left - k, cur, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    if norm == 0 || rank == 0 {
        return out;
    }
    let mut cur: Exps = SmallVec::from_elem(0, rank);
    rec(rank, 0, norm, &mut cur, &mut out);
    out
}

struct SyllableTable {
    /// `by_norm[l]` lists every syllable of norm `l`, factor by factor.
    by_norm: Vec<Vec<Syllable>>,
}

impl SyllableTable {
    fn new(space: &ModelSpace, max_norm: u64) -> Self {
        let mut by_norm = vec![Vec::new(); max_norm as usize + 1];
        for l in 1..=max_norm {
            for (f, &m) in space.ranks().iter().enumerate() {
                for v in lattice_vectors(m, l) {
                    by_norm[l as usize].push(Syllable {
                        factor: f as u16,
                        exps: v,
                    });
                }
            }
        }
        SyllableTable { by_norm }
    }

    fn visit<F: FnMut(&Word)>(&self, w: &mut Word, left: u64, f: &mut F) {
        if left == 0 {
            f(w);
            return;
        }
        let prev = w.last_syllable().map(|s| s.factor);
        for l in 1..=left {
            for s in &self.by_norm[l as usize] {
                if Some(s.factor) == prev {
                    continue;
                }
                w.push_unchecked(s.clone());
                self.visit(w, left - l, f);
                w.pop_syllable();
            }
        }
    }
}

impl ModelSpace {
    fn check_cap(&self, needed: u128) -> Result<()> {
        if needed > self.enumeration_cap() {
            return Err(Error::Resource {
                cap_name: "enumeration_cap".into(),
                needed,
                cap: self.enumeration_cap(),
            });
        }
        Ok(())
    }

    /// Visits every element of length exactly `n`, each once.
    pub fn for_each_in_sphere<F: FnMut(&Word)>(&self, n: u64, mut f: F) -> Result<()> {
        self.check_cap(self.sphere_count(n)?)?;
        let table = SyllableTable::new(self, n);
        table.visit(&mut Word::identity(), n, &mut f);
        Ok(())
    }

    /// First syllables of the length-`n` sphere; each shard can be enumerated independently.
    pub fn sphere_shards(&self, n: u64) -> Vec<Syllable> {
        let table = SyllableTable::new(self, n);
        table.by_norm.into_iter().flatten().collect()
    }

    /// Visits the elements of length `n` whose first syllable is `first`.
    pub fn for_each_in_shard<F: FnMut(&Word)>(&self, first: &Syllable, n: u64, mut f: F) {
        let l = first.norm();
        if l > n || l == 0 {
            return;
        }
        let table = SyllableTable::new(self, n - l);
        let mut w = Word::identity();
        w.push_unchecked(first.clone());
        table.visit(&mut w, n - l, &mut f);
    }

    /// Visits `center * u` for every `u` with `|u|` in the annulus range; each element once.
    pub fn for_each_in_annulus<F: FnMut(&Word)>(&self, spec: &AnnulusSpec, mut f: F) -> Result<u128> {
        let total = self.annulus_count(spec)?;
        self.check_cap(total)?;
        let hi = *spec.lengths().end();
        let table = SyllableTable::new(self, hi);
        for k in spec.lengths() {
            if spec.center.is_identity() {
                table.visit(&mut Word::identity(), k, &mut f);
            } else {
                table.visit(&mut Word::identity(), k, &mut |u: &Word| {
                    f(&spec.center.mul(u));
                });
            }
        }
        Ok(total)
    }

    pub fn enumerate_annulus(&self, spec: &AnnulusSpec) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        self.for_each_in_annulus(spec, |w| out.push(w.clone()))?;
        Ok(out)
    }

    /// `B(o, r)` ordered by length, then enumeration order.
    pub fn ball(&self, r: u64) -> Result<Vec<Word>> {
        self.enumerate_annulus(&AnnulusSpec {
            center: Word::identity(),
            radius: 0,
            width: r,
        })
    }

    /// `B(center, r)`.
    pub fn ball_around(&self, center: &Word, r: u64) -> Result<Vec<Word>> {
        self.enumerate_annulus(&AnnulusSpec {
            center: center.clone(),
            radius: 0,
            width: r,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_vector_counts() {
        assert_eq!(lattice_vectors(1, 3).len(), 2);
        assert_eq!(lattice_vectors(2, 3).len(), 12);
        assert_eq!(lattice_vectors(3, 1).len(), 6);
        assert_eq!(lattice_vectors(3, 2).len(), 18);
    }

    #[test]
    fn f2_spheres() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let s1 = f2.enumerate_annulus(&AnnulusSpec::sphere(1)).unwrap();
        assert_eq!(s1.len(), 4);
        let s3 = f2.enumerate_annulus(&AnnulusSpec::sphere(3)).unwrap();
        assert_eq!(s3.len(), 36);
        let distinct: std::collections::HashSet<_> = s3.iter().collect();
        assert_eq!(distinct.len(), 36);
    }

    #[test]
    fn z2_sphere_is_4n() {
        let z2 = ModelSpace::preset("z2").unwrap();
        for n in 1..6 {
            assert_eq!(z2.enumerate_annulus(&AnnulusSpec::sphere(n)).unwrap().len() as u64, 4 * n);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let f2 = ModelSpace::preset("f2").unwrap().with_enumeration_cap(100);
        let err = f2.enumerate_annulus(&AnnulusSpec::sphere(6)).unwrap_err();
        assert!(matches!(err, Error::Resource { ref cap_name, .. } if cap_name == "enumeration_cap"));
    }

    #[test]
    fn shards_partition_the_sphere() {
        let z = ModelSpace::preset("z2*z").unwrap();
        let mut n = 0u128;
        for s in z.sphere_shards(5) {
            z.for_each_in_shard(&s, 5, |_| n += 1);
        }
        assert_eq!(n, z.sphere_count(5).unwrap());
    }

    #[test]
    fn annulus_around_center() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let spec = AnnulusSpec {
            center: f2.parse("a b").unwrap(),
            radius: 2,
            width: 1,
        };
        let pts = f2.enumerate_annulus(&spec).unwrap();
        assert_eq!(pts.len(), 4 + 12 + 36);
        assert!(pts.iter().all(|p| spec.contains(p)));
    }
}
