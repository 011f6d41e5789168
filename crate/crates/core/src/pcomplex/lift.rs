use serde::Serialize;

use super::interval::interval_set;
use super::AxisFamily;
use crate::contracting::{measured_constants, verify_admissible, AdmissibilityReport, AdmissiblePath};
use crate::error::{Error, Result};
use crate::space::{GeodesicPath, Word};

#[derive(Clone, Debug)]
pub struct LiftedPath {
    pub path: AdmissiblePath,
    /// Axis indices `S_0 = U, ..., S_m = V` of the saturation, in order.
    pub saturation: Vec<usize>,
    pub report: AdmissibilityReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftSummary {
    pub saturation: Vec<String>,
    pub l: u64,
    pub b: u64,
    pub segments: usize,
}

impl LiftedPath {
    pub fn summary(&self, family: &AxisFamily) -> LiftSummary {
        LiftSummary {
            saturation: self.saturation.iter().map(|&i| family.ids[i].clone()).collect(),
            l: self.path.l,
            b: self.path.b,
            segments: self.path.p.len() + self.path.q.len(),
        }
    }
}

/// Lifts the interval `𝔽_K[U,V]` to a piecewise geodesic from `x ∈ U` to `y ∈ V`:
/// it runs along each `S_i` between the projections of its neighbours and jumps from
/// `π_{S_i}(S_{i+1})` to `π_{S_{i+1}}(S_i)`. The constructed `(L, B)` are measured and the
/// result is checked for admissibility.
pub fn lift_path(family: &AxisFamily, kappa: u64, k: u64, u: usize, v: usize, x: &Word, y: &Word) -> Result<LiftedPath> {
    let (ax_u, ax_v) = (&family.axes[u], &family.axes[v]);
    if !ax_u.contains(x) || !ax_v.contains(y) {
        return Err(Error::Validation("lift endpoints must lie in the windows of U and V".into()));
    }
    let chain = interval_set(family, kappa, k, u, v)?.members;
    if chain.len() == 1 {
        let mut path = AdmissiblePath::single(GeodesicPath::canonical(x, y));
        path.saturation = vec![Some(ax_u.clone())];
        let report = verify_admissible(&path)?;
        return Ok(LiftedPath {
            path,
            saturation: chain,
            report,
        });
    }
    let m = chain.len() - 1;
    let mut p = Vec::with_capacity(m + 1);
    let mut q = Vec::with_capacity(m);
    let mut entry = x.clone();
    for i in 0..m {
        let (s, t) = (chain[i], chain[i + 1]);
        let out = family.axes[s].points()[family.proj(s, t).idx[0] as usize].clone();
        let into = family.axes[t].points()[family.proj(t, s).idx[0] as usize].clone();
        if i > 0 && out == entry {
            return Err(Error::Admissibility(format!(
                "segment on {} collapses to a point at K = {k}; K is too small",
                family.ids[s]
            )));
        }
        p.push(GeodesicPath::canonical(&entry, &out));
        q.push(GeodesicPath::canonical(&out, &into));
        entry = into;
    }
    p.push(GeodesicPath::canonical(&entry, y));
    let mut path = AdmissiblePath {
        p,
        q,
        saturation: chain.iter().map(|&i| Some(family.axes[i].clone())).collect(),
        l: 0,
        b: 0,
    };
    let (l, b) = measured_constants(&path)?;
    path.l = l;
    path.b = b;
    let report = verify_admissible(&path)?;
    if !report.pass {
        return Err(Error::Admissibility(format!(
            "lifted path fails admissibility at L = {l}, B = {b} (K = {k})"
        )));
    }
    Ok(LiftedPath {
        path,
        saturation: chain,
        report,
    })
}
