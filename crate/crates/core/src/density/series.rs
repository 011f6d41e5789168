use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{CountMethod, ModelSpace, SubgroupPredicate, Word};

/// Compensated (Kahan-Babuska) accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(it: I) -> Self {
        let mut k = KahanSum::default();
        it.into_iter().for_each(|x| k.add(x));
        k
    }
}

/// `c[n] = #{g ∈ Γ : d(x, g y) = n}` for `n = 0..=n_max`.
pub fn orbit_counts(
    space: &ModelSpace,
    pred: &SubgroupPredicate,
    x: &Word,
    y: &Word,
    n_max: u64,
    method: CountMethod,
) -> Result<Vec<u128>> {
    pred.validate(space)?;
    let dp_ok = pred.supports_dp() && method != CountMethod::Stream;
    if method == CountMethod::Dp && !pred.supports_dp() {
        return Err(Error::Capability(format!("{pred:?} has no finite-state form; use the streaming count")));
    }
    if pred.is_whole() && method != CountMethod::Stream {
        return space.sphere_counts(n_max);
    }
    // g = x u y^-1 with |u| = n
    let yinv = y.inverse();
    if dp_ok {
        match pred {
            SubgroupPredicate::ExponentSum { .. } | SubgroupPredicate::Cyclic { .. } => {
                return space.dp_counts(pred, &x.mul(&yinv), n_max);
            }
            SubgroupPredicate::Cosets { .. } if y.is_identity() => return space.dp_counts(pred, x, n_max),
            SubgroupPredicate::Cosets { .. } if method == CountMethod::Dp => {
                return Err(Error::Capability("coset DP supports y = o only".into()));
            }
            _ => {}
        }
    }
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let mut c = 0u128;
        space.for_each_in_sphere(n, |u| {
            if pred.contains(&x.mul(u).mul(&yinv)) {
                c += 1;
            }
        })?;
        out.push(c);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareEstimate {
    pub s: f64,
    pub r: u64,
    pub partial_sum: f64,
    pub counts: Vec<u128>,
    /// `counts[n] e^{-sn}`.
    pub contributions: Vec<f64>,
}

/// Truncated `Σ_{g ∈ Γ, d(x,gy) <= R} e^{-s d(x, gy)}` from exact annulus counts.
pub fn poincare_partial(
    space: &ModelSpace,
    pred: &SubgroupPredicate,
    s: f64,
    x: &Word,
    y: &Word,
    r: u64,
) -> Result<PoincareEstimate> {
    if !(s >= 0.0) {
        return Err(Error::Validation("Poincaré exponent must be non-negative".into()));
    }
    let counts = orbit_counts(space, pred, x, y, r, CountMethod::Auto)?;
    Ok(from_counts(s, counts))
}

pub(crate) fn from_counts(s: f64, counts: Vec<u128>) -> PoincareEstimate {
    let contributions: Vec<f64> = counts
        .iter()
        .enumerate()
        .map(|(n, &c)| if c == 0 { 0.0 } else { (c as f64).ln().mul_add(1.0, -s * n as f64).exp() })
        .collect();
    let partial_sum = contributions.iter().copied().collect::<KahanSum>().value();
    PoincareEstimate {
        s,
        r: counts.len() as u64 - 1,
        partial_sum,
        counts,
        contributions,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentRow {
    pub n: u64,
    pub count: u128,
    /// `log(count) / n`; `None` for `n = 0` or an empty annulus.
    pub quotient: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentEstimate {
    pub n_max: u64,
    pub delta: u64,
    pub rows: Vec<ExponentRow>,
    /// Quotient at the largest `n` with a non-empty annulus.
    pub omega_hat: f64,
    /// Least-squares slope of the quotient over the upper half of the valid `n`.
    pub trend_slope: f64,
    /// Values of `n` skipped because the annulus met `Γ` nowhere.
    pub skipped: Vec<u64>,
}

/// Raw growth quotients `log #(A(o, n, Δ) ∩ Γ) / n` for `n = 1..=n_max`.
pub fn critical_exponent(space: &ModelSpace, pred: &SubgroupPredicate, n_max: u64, delta: u64) -> Result<ExponentEstimate> {
    if n_max == 0 {
        return Err(Error::Validation("n_max must be positive".into()));
    }
    let o = Word::identity();
    let c = orbit_counts(space, pred, &o, &o, n_max + delta, CountMethod::Auto)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for n in 0..=n_max {
        let lo = n.saturating_sub(delta) as usize;
        let hi = (n + delta) as usize;
        let count = c[lo..=hi]
            .iter()
            .try_fold(0u128, |a, &b| a.checked_add(b))
            .ok_or_else(|| Error::Resource {
                cap_name: "u128_count".into(),
                needed: u128::MAX,
                cap: u128::MAX,
            })?;
        let quotient = (n > 0 && count > 0).then(|| (count as f64).ln() / n as f64);
        if n > 0 && count == 0 {
            skipped.push(n);
        }
        rows.push(ExponentRow { n, count, quotient });
    }
    let valid: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.quotient.map(|q| (r.n as f64, q)))
        .collect();
    let omega_hat = valid.last().map_or(0.0, |v| v.1);
    let tail = &valid[valid.len() / 2..];
    Ok(ExponentEstimate {
        n_max,
        delta,
        rows,
        omega_hat,
        trend_slope: slope(tail),
        skipped,
    })
}

/// Least-squares slope; 0 for fewer than two points.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive() {
        let xs: Vec<f64> = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 10_000)).collect();
        let k: KahanSum = xs.iter().copied().collect();
        assert!((k.value() - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn identity_term_only() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let o = Word::identity();
        let p = poincare_partial(&f2, &SubgroupPredicate::Whole, 2.0, &o, &o, 0).unwrap();
        assert_eq!(p.partial_sum, 1.0);
    }

    #[test]
    fn shifted_basepoints_count_the_same_orbit() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let pred = SubgroupPredicate::exponent_sum(&f2, &[1, 0]).unwrap();
        let x = f2.parse("a b").unwrap();
        let y = f2.parse("b^-1").unwrap();
        let dp = orbit_counts(&f2, &pred, &x, &y, 6, CountMethod::Auto).unwrap();
        let st = orbit_counts(&f2, &pred, &x, &y, 6, CountMethod::Stream).unwrap();
        assert_eq!(dp, st);
    }
}
