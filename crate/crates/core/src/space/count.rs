use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::{lattice_vectors, AnnulusSpec, ModelSpace, Syllable, Word};
use crate::error::{Error, Result};

/// Membership predicates for subgroups, decidable from the normal form.
#[derive(Clone)]
pub enum SubgroupPredicate {
    Whole,
    /// Kernel of the homomorphism to `Z` sending generator `(factor, coord)` to `weights[factor][coord]`.
    ExponentSum { weights: Vec<Vec<i64>> },
    /// Kernel of the homomorphism to `Z/modulus` with the given generator weights.
    Cyclic { modulus: u32, weights: Vec<Vec<i64>> },
    /// Stabilizer of coset 0 under a right action on `index` cosets; `perms[factor][coord]`
    /// is the permutation applied by the positive generator.
    Cosets { index: u32, perms: Vec<Vec<Vec<u32>>> },
    /// Arbitrary membership test; only streaming counts are available.
    Custom {
        name: String,
        test: Arc<dyn Fn(&Word) -> bool + Send + Sync>,
    },
}

impl fmt::Debug for SubgroupPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupPredicate::Whole => write!(f, "Whole"),
            SubgroupPredicate::ExponentSum { weights } => write!(f, "ExponentSum({weights:?})"),
            SubgroupPredicate::Cyclic { modulus, weights } => {
                write!(f, "Cyclic(mod {modulus}, {weights:?})")
            }
            SubgroupPredicate::Cosets { index, .. } => write!(f, "Cosets(index {index})"),
            SubgroupPredicate::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CountMethod {
    #[default]
    Auto,
    Dp,
    Stream,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Trans {
    Shift(i64),
    Perm(Vec<u32>),
}

impl SubgroupPredicate {
    /// Exponent-sum kernel from one weight per generator, listed in label order.
    pub fn exponent_sum(space: &ModelSpace, flat: &[i64]) -> Result<Self> {
        Ok(SubgroupPredicate::ExponentSum {
            weights: split_weights(space, flat)?,
        })
    }

    /// Kernel of the map to `Z/2` with one weight per generator.
    pub fn parity(space: &ModelSpace, flat: &[i64]) -> Result<Self> {
        Ok(SubgroupPredicate::Cyclic {
            modulus: 2,
            weights: split_weights(space, flat)?,
        })
    }

    pub fn custom(name: &str, test: impl Fn(&Word) -> bool + Send + Sync + 'static) -> Self {
        SubgroupPredicate::Custom {
            name: name.to_string(),
            test: Arc::new(test),
        }
    }

    pub fn is_whole(&self) -> bool {
        matches!(self, SubgroupPredicate::Whole)
    }

    pub fn supports_dp(&self) -> bool {
        !matches!(self, SubgroupPredicate::Custom { .. })
    }

    /// Checks the predicate is well formed for `space`.
    pub fn validate(&self, space: &ModelSpace) -> Result<()> {
        let shape_ok = |w: &Vec<Vec<i64>>| {
            w.len() == space.ranks().len() && w.iter().zip(space.ranks()).all(|(v, &m)| v.len() == m)
        };
        match self {
            SubgroupPredicate::Whole | SubgroupPredicate::Custom { .. } => Ok(()),
            SubgroupPredicate::ExponentSum { weights } => {
                if shape_ok(weights) {
                    Ok(())
                } else {
                    Err(Error::Validation("exponent-sum weights do not match the generators".into()))
                }
            }
            SubgroupPredicate::Cyclic { modulus, weights } => {
                if *modulus == 0 || !shape_ok(weights) {
                    Err(Error::Validation("cyclic kernel needs modulus >= 1 and one weight per generator".into()))
                } else {
                    Ok(())
                }
            }
            SubgroupPredicate::Cosets { index, perms } => {
                if perms.len() != space.ranks().len()
                    || perms.iter().zip(space.ranks()).any(|(p, &m)| p.len() != m)
                {
                    return Err(Error::Validation("coset action needs one permutation per generator".into()));
                }
                for p in perms.iter().flatten() {
                    let mut seen = vec![false; *index as usize];
                    if p.len() != *index as usize {
                        return Err(Error::Validation("permutation has wrong size".into()));
                    }
                    for &x in p {
                        if x >= *index || seen[x as usize] {
                            return Err(Error::Validation("not a permutation".into()));
                        }
                        seen[x as usize] = true;
                    }
                }
                for fp in perms {
                    for i in 0..fp.len() {
                        for j in 0..i {
                            let ab: Vec<u32> = (0..*index).map(|s| fp[j][fp[i][s as usize] as usize]).collect();
                            let ba: Vec<u32> = (0..*index).map(|s| fp[i][fp[j][s as usize] as usize]).collect();
                            if ab != ba {
                                return Err(Error::Capability(
                                    "coset action of an abelian factor must commute".into(),
                                ));
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }

    fn trans(&self, s: &Syllable) -> Trans {
        match self {
            SubgroupPredicate::Whole | SubgroupPredicate::Custom { .. } => Trans::Shift(0),
            SubgroupPredicate::ExponentSum { weights } => Trans::Shift(dot(&weights[s.factor as usize], s)),
            SubgroupPredicate::Cyclic { modulus, weights } => {
                Trans::Shift(dot(&weights[s.factor as usize], s).rem_euclid(*modulus as i64))
            }
            SubgroupPredicate::Cosets { index, perms } => {
                let mut p: Vec<u32> = (0..*index).collect();
                for (c, &e) in s.exps.iter().enumerate() {
                    let gp = &perms[s.factor as usize][c];
                    let step: Vec<u32> = if e >= 0 { gp.clone() } else { invert(gp) };
                    for _ in 0..e.unsigned_abs() {
                        p = p.iter().map(|&x| step[x as usize]).collect();
                    }
                }
                Trans::Perm(p)
            }
        }
    }

    fn apply(&self, state: i64, t: &Trans) -> i64 {
        match (self, t) {
            (SubgroupPredicate::Cyclic { modulus, .. }, Trans::Shift(d)) => (state + d).rem_euclid(*modulus as i64),
            (_, Trans::Shift(d)) => state + d,
            (_, Trans::Perm(p)) => p[state as usize] as i64,
        }
    }

    /// DP state reached from the identity after reading `w`; `None` for custom predicates.
    pub fn state_of(&self, w: &Word) -> Option<i64> {
        if !self.supports_dp() {
            return None;
        }
        let mut st = 0;
        for s in w.syllables() {
            st = self.apply(st, &self.trans(s));
        }
        Some(st)
    }

    pub fn contains(&self, w: &Word) -> bool {
        match self {
            SubgroupPredicate::Custom { test, .. } => test(w),
            SubgroupPredicate::Whole => true,
            _ => self.state_of(w) == Some(0),
        }
    }
}

fn dot(w: &[i64], s: &Syllable) -> i64 {
    w.iter().zip(s.exps.iter()).map(|(a, &e)| a * e as i64).sum()
}

fn invert(p: &[u32]) -> Vec<u32> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x as usize] = i as u32;
    }
    q
}

fn split_weights(space: &ModelSpace, flat: &[i64]) -> Result<Vec<Vec<i64>>> {
    let total: usize = space.ranks().iter().sum();
    if flat.len() != total {
        return Err(Error::Validation(format!(
            "expected {total} generator weights, got {}",
            flat.len()
        )));
    }
    let mut out = Vec::new();
    let mut i = 0;
    for &m in space.ranks() {
        out.push(flat[i..i + m].to_vec());
        i += m;
    }
    Ok(out)
}

fn overflow() -> Error {
    Error::Resource {
        cap_name: "u128 count".into(),
        needed: u128::MAX,
        cap: u128::MAX,
    }
}

/// Number of vectors of `Z^m` with L1 norm `l`.
fn lattice_count(m: usize, l: u64) -> Result<u128> {
    if l == 0 {
        return Ok(1);
    }
    // sum_k 2^k C(m,k) C(l-1,k-1)
    let mut total: u128 = 0;
    for k in 1..=m.min(l as usize) {
        let t = binom(m as u128, k as u128)
            .checked_mul(binom(l as u128 - 1, k as u128 - 1))
            .and_then(|x| x.checked_mul(1u128 << k))
            .ok_or_else(overflow)?;
        total = total.checked_add(t).ok_or_else(overflow)?;
    }
    Ok(total)
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

impl ModelSpace {
    /// Exact number of elements of length `n`.
    pub fn sphere_count(&self, n: u64) -> Result<u128> {
        let counts = self.sphere_counts(n)?;
        Ok(counts[n as usize])
    }

    /// Exact sphere sizes for lengths `0..=n_max`.
    pub fn sphere_counts(&self, n_max: u64) -> Result<Vec<u128>> {
        let nf = self.ranks().len();
        let n = n_max as usize;
        let mut c = vec![vec![0u128; n + 1]; nf];
        for (f, &m) in self.ranks().iter().enumerate() {
            for l in 1..=n {
                c[f][l] = lattice_count(m, l as u64)?;
            }
        }
        // ends[len][f]: normal forms of length len whose last syllable lies in factor f
        let mut ends = vec![vec![0u128; nf]; n + 1];
        let mut totals = vec![0u128; n + 1];
        totals[0] = 1;
        for len in 1..=n {
            for f in 0..nf {
                let mut acc: u128 = 0;
                for l in 1..=len {
                    let before = if l == len {
                        1
                    } else {
                        totals[len - l] - ends[len - l][f]
                    };
                    let t = c[f][l].checked_mul(before).ok_or_else(overflow)?;
                    acc = acc.checked_add(t).ok_or_else(overflow)?;
                }
                ends[len][f] = acc;
            }
            totals[len] = ends[len]
                .iter()
                .try_fold(0u128, |a, &b| a.checked_add(b))
                .ok_or_else(overflow)?;
        }
        Ok(totals)
    }

    pub fn annulus_count(&self, spec: &AnnulusSpec) -> Result<u128> {
        let hi = *spec.lengths().end();
        let s = self.sphere_counts(hi)?;
        spec.lengths()
            .try_fold(0u128, |a, k| a.checked_add(s[k as usize]))
            .ok_or_else(overflow)
    }

    /// Counts annulus elements lying in the subgroup.
    pub fn count_annulus_constrained(
        &self,
        spec: &AnnulusSpec,
        pred: &SubgroupPredicate,
        method: CountMethod,
    ) -> Result<u128> {
        pred.validate(self)?;
        match method {
            CountMethod::Dp if !pred.supports_dp() => Err(Error::Capability(format!(
                "{pred:?} has no finite-state form; use the streaming count"
            ))),
            CountMethod::Stream => self.stream_count(spec, pred),
            _ if pred.is_whole() => self.annulus_count(spec),
            _ if pred.supports_dp() => {
                let per_len = self.dp_counts(pred, &spec.center, *spec.lengths().end())?;
                spec.lengths()
                    .try_fold(0u128, |a, k| a.checked_add(per_len[k as usize]))
                    .ok_or_else(overflow)
            }
            _ => self.stream_count(spec, pred),
        }
    }

    /// Per-length counts of `center * u ∈ H` for `|u| = 0..=n_max` by a transfer DP over
    /// (length, last factor, predicate state).
    pub fn dp_counts(&self, pred: &SubgroupPredicate, center: &Word, n_max: u64) -> Result<Vec<u128>> {
        pred.validate(self)?;
        let init = pred.state_of(center).ok_or_else(|| {
            Error::Capability(format!("{pred:?} has no finite-state form"))
        })?;
        let n = n_max as usize;
        let nf = self.ranks().len();
        // trans[f][l]: aggregated (transition, multiplicity) over syllables of norm l in factor f
        let mut trans: Vec<Vec<Vec<(Trans, u128)>>> = vec![vec![Vec::new(); n + 1]; nf];
        for (f, &m) in self.ranks().iter().enumerate() {
            for l in 1..=n {
                let mut agg: HashMap<Trans, u128> = HashMap::new();
                for v in lattice_vectors(m, l as u64) {
                    *agg.entry(pred.trans(&Syllable { factor: f as u16, exps: v })).or_default() += 1;
                }
                let mut list: Vec<(Trans, u128)> = agg.into_iter().collect();
                list.sort_by(|a, b| format!("{:?}", a.0).cmp(&format!("{:?}", b.0)));
                trans[f][l] = list;
            }
        }
        // table[len][f]: state -> count, for words ending in factor f
        let mut table: Vec<Vec<HashMap<i64, u128>>> = vec![vec![HashMap::new(); nf]; n + 1];
        let mut out = vec![0u128; n + 1];
        out[0] = u128::from(init == 0);
        for len in 1..=n {
            for f in 0..nf {
                let mut cur: HashMap<i64, u128> = HashMap::new();
                for l in 1..=len {
                    let add = |cur: &mut HashMap<i64, u128>, s0: i64, cnt: u128| -> Result<()> {
                        for (t, mult) in &trans[f][l] {
                            let s1 = pred.apply(s0, t);
                            let v = cnt.checked_mul(*mult).ok_or_else(overflow)?;
                            let e = cur.entry(s1).or_default();
                            *e = e.checked_add(v).ok_or_else(overflow)?;
                        }
                        Ok(())
                    };
                    if l == len {
                        add(&mut cur, init, 1)?;
                    } else {
                        for g in (0..nf).filter(|&g| g != f) {
                            for (&s0, &cnt) in &table[len - l][g] {
                                add(&mut cur, s0, cnt)?;
                            }
                        }
                    }
                }
                table[len][f] = cur;
            }
            out[len] = table[len]
                .iter()
                .map(|m| m.get(&0).copied().unwrap_or(0))
                .try_fold(0u128, |a, b| a.checked_add(b))
                .ok_or_else(overflow)?;
        }
        Ok(out)
    }

    /// Counts by enumerating the annulus, sharded on the first syllable.
    pub fn stream_count(&self, spec: &AnnulusSpec, pred: &SubgroupPredicate) -> Result<u128> {
        let total = self.annulus_count(spec)?;
        if total > self.enumeration_cap() {
            return Err(Error::Resource {
                cap_name: "enumeration_cap".into(),
                needed: total,
                cap: self.enumeration_cap(),
            });
        }
        let mut sum: u128 = 0;
        for k in spec.lengths() {
            if k == 0 {
                sum += u128::from(pred.contains(&spec.center));
                continue;
            }
            let shards = self.sphere_shards(k);
            let counts: Vec<u128> = shards
                .par_iter()
                .map(|first| {
                    let mut c = 0u128;
                    self.for_each_in_shard(first, k, |u| {
                        if pred.contains(&spec.center.mul(u)) {
                            c += 1;
                        }
                    });
                    c
                })
                .collect();
            sum += counts.iter().sum::<u128>();
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_count_matches_enumeration() {
        for m in 1..4 {
            for l in 0..7 {
                let expect = if l == 0 { 1 } else { lattice_vectors(m, l).len() as u128 };
                assert_eq!(lattice_count(m, l).unwrap(), expect, "m={m} l={l}");
            }
        }
    }

    #[test]
    fn f2_sphere_closed_form() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let s = f2.sphere_counts(14).unwrap();
        assert_eq!(s[0], 1);
        for n in 1..=14u32 {
            assert_eq!(s[n as usize], 4 * 3u128.pow(n - 1));
        }
    }

    #[test]
    fn zero_a_exponent_length_two_brute_force() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let h = SubgroupPredicate::exponent_sum(&f2, &[1, 0]).unwrap();
        let mut brute = 0;
        f2.for_each_in_sphere(2, |w| {
            let a: i64 = w
                .syllables()
                .iter()
                .filter(|s| s.factor == 0)
                .map(|s| s.exps[0] as i64)
                .sum();
            if a == 0 {
                brute += 1;
            }
        })
        .unwrap();
        // b^2, b^-2, a b a^-1 is length 3; at length 2 only b^±2 qualify
        assert_eq!(brute, 2);
        let dp = f2
            .count_annulus_constrained(&AnnulusSpec::sphere(2), &h, CountMethod::Dp)
            .unwrap();
        assert_eq!(dp, brute);
    }

    #[test]
    fn identity_counts_at_radius_zero() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let h = SubgroupPredicate::exponent_sum(&f2, &[1, 0]).unwrap();
        assert_eq!(
            f2.count_annulus_constrained(&AnnulusSpec::sphere(0), &h, CountMethod::Auto).unwrap(),
            1
        );
        let off = AnnulusSpec {
            center: f2.parse("a").unwrap(),
            radius: 0,
            width: 0,
        };
        assert_eq!(f2.count_annulus_constrained(&off, &h, CountMethod::Auto).unwrap(), 0);
    }

    #[test]
    fn custom_predicate_refuses_dp() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let p = SubgroupPredicate::custom("even length", |w| w.len() % 2 == 0);
        let err = f2
            .count_annulus_constrained(&AnnulusSpec::sphere(3), &p, CountMethod::Dp)
            .unwrap_err();
        assert!(matches!(err, Error::Capability(_)));
        assert_eq!(
            f2.count_annulus_constrained(&AnnulusSpec::sphere(4), &p, CountMethod::Auto).unwrap(),
            108
        );
    }

    #[test]
    fn noncommuting_coset_action_rejected() {
        let z2 = ModelSpace::preset("z2").unwrap();
        let p = SubgroupPredicate::Cosets {
            index: 3,
            perms: vec![vec![vec![1, 0, 2], vec![0, 2, 1]]],
        };
        assert!(matches!(p.validate(&z2), Err(Error::Capability(_))));
    }
}
