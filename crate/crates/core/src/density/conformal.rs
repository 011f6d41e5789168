use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::measure::{exact_cylinder_mass, extends_spelling, free_rank, ps_measure, ratio_f64};
use crate::boundary::{busemann_cocycle, horo_limit, HoroLimit, ShadowSpec, DEFAULT_STABILIZATION_WINDOW};
use crate::error::{Error, Result};
use crate::space::{ModelSpace, Word};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ConformalityMode {
    /// Limiting visual measure of a Free(k) tree, in exact arithmetic.
    Exact,
    /// Truncated estimator at exponent `s` on `B(o, r)`.
    Estimator { s: f64, r: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalityRow {
    /// Cylinder `Π_o(v, 0)` tested.
    pub target: String,
    pub depth: u64,
    pub mu_g: f64,
    pub mu_o: f64,
    /// `B_ξ(go, o)` for `ξ` in the cylinder; `None` when it did not stabilize.
    pub busemann: Option<i64>,
    /// `(μ_{go}(A) / μ_o(A)) / e^{-s B}`.
    pub defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_defect: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalityReport {
    pub g: String,
    #[serde(flatten)]
    pub mode: ConformalityMode,
    /// Exponent in the predicted derivative `e^{-s B}`.
    pub exponent: f64,
    pub rows: Vec<ConformalityRow>,
    pub min_defect: f64,
    pub max_defect: f64,
    pub flagged: usize,
}

/// Walks `len` steps down the spelling tree from `v`, always taking the first (or last) child.
fn extension(space: &ModelSpace, v: &Word, len: usize, last: bool) -> Vec<Word> {
    let mut w = v.clone();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let mut kids = space.generators().iter().filter(|&&g| extends_spelling(&w, g));
        let g = if last { kids.next_back() } else { kids.next() };
        w.mul_gen(*g.expect("every word has a spelling child"));
        out.push(w.clone());
    }
    out
}

/// `B_ξ(go, o)` along two extreme rays of the cylinder; `Err(reason)` if they disagree or
/// either fails to stabilize.
fn cylinder_busemann(space: &ModelSpace, v: &Word, g: &Word) -> Result<std::result::Result<i64, String>> {
    let w = DEFAULT_STABILIZATION_WINDOW;
    let len = 2 * g.len() as usize + w + 2;
    let mut vals = Vec::new();
    for last in [false, true] {
        let ys = extension(space, v, len, last);
        match horo_limit(space, &ys, g.len(), w)? {
            HoroLimit::Stabilized(b) => vals.push(busemann_cocycle(&b, g, &Word::identity())?),
            HoroLimit::Diverged(_) => return Ok(Err("Busemann function did not stabilize".into())),
        }
    }
    if vals[0] != vals[1] {
        return Ok(Err(format!("Busemann value varies over the cylinder ({} vs {})", vals[0], vals[1])));
    }
    Ok(Ok(vals[0]))
}

/// Compares `μ_{go}(A) / μ_o(A)` with `e^{-s B_ξ(go, o)}` on plain cylinders `A = Π_o(v, 0)`.
pub fn conformality_check(
    space: &ModelSpace,
    mode: ConformalityMode,
    g: &Word,
    targets: &[Word],
) -> Result<ConformalityReport> {
    space.validate(g)?;
    if targets.iter().any(|v| v.is_identity()) {
        return Err(Error::Validation("test cylinders need v != o".into()));
    }
    let o = Word::identity();
    let (exponent, mut rows) = match mode {
        ConformalityMode::Exact => {
            let k = free_rank(space)? as i64;
            let base = BigInt::from(2 * k - 1);
            let rows = targets
                .iter()
                .map(|v| {
                    let mg = exact_cylinder_mass(space, g, v)?;
                    let mo = exact_cylinder_mass(space, &o, v)?;
                    let b = cylinder_busemann(space, v, g)?;
                    let (defect, exact, flag) = match &b {
                        Ok(b) => {
                            // e^{-ω B} = (2k-1)^{-B}
                            let pred = BigRational::from_integer(num_traits::pow(base.clone(), b.unsigned_abs() as usize));
                            let pred = if *b > 0 { BigRational::one() / pred } else { pred };
                            let d = &mg / &mo / pred;
                            (Some(ratio_f64(&d)), Some(d.to_string()), None)
                        }
                        Err(e) => (None, None, Some(e.clone())),
                    };
                    Ok(ConformalityRow {
                        target: space.format(v),
                        depth: v.len(),
                        mu_g: ratio_f64(&mg),
                        mu_o: ratio_f64(&mo),
                        busemann: b.ok(),
                        defect,
                        exact_defect: exact,
                        flag,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (((2 * k - 1) as f64).ln(), rows)
        }
        ConformalityMode::Estimator { s, r } => {
            let mg = ps_measure(space, s, g, r)?;
            let mo = ps_measure(space, s, &o, r)?;
            let rows = targets
                .iter()
                .map(|v| {
                    let spec = ShadowSpec::plain(o.clone(), v.clone(), 0);
                    let a = mg.shadow_mass(space, &spec)?;
                    let b0 = mo.shadow_mass(space, &spec)?;
                    let b = cylinder_busemann(space, v, g)?;
                    let (defect, flag) = match &b {
                        Ok(b) => (Some(a / b0 / (-s * *b as f64).exp()), None),
                        Err(e) => (None, Some(e.clone())),
                    };
                    Ok(ConformalityRow {
                        target: space.format(v),
                        depth: v.len(),
                        mu_g: a,
                        mu_o: b0,
                        busemann: b.ok(),
                        defect,
                        exact_defect: None,
                        flag,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (s, rows)
        }
    };
    rows.sort_by_key(|r| r.depth);
    let defects: Vec<f64> = rows.iter().filter_map(|r| r.defect).collect();
    Ok(ConformalityReport {
        g: space.format(g),
        mode,
        exponent,
        min_defect: defects.iter().copied().fold(f64::INFINITY, f64::min),
        max_defect: defects.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        flagged: rows.iter().filter(|r| r.flag.is_some()).count(),
        rows,
    })
}
