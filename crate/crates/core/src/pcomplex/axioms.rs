use rayon::prelude::*;
use serde::Serialize;

use super::{AxisFamily, LargeProjectionTable};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomStatus {
    pub pass: bool,
    /// First violating tuple (axis ids), in index order.
    pub violation: Option<Vec<String>>,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub kappa: u64,
    /// (1) `diam π_U(V) <= κ`.
    pub axiom1: AxiomStatus,
    /// (2) `d_U(V,W) > κ` implies `d_V(U,W) <= κ`.
    pub axiom2: AxiomStatus,
    /// (3) largest `|{U : d_U(V,W) > κ}|` over pairs, with the pair attaining it.
    pub axiom3: AxiomStatus,
    /// Smallest κ for which (1) and (2) hold on this family.
    pub min_kappa: u64,
    pub pass: bool,
}

/// Exhaustive check over all ordered triples of distinct axes.
pub fn check_axioms(family: &AxisFamily, kappa: u64) -> AxiomReport {
    check(family, kappa, true)
}

fn check(family: &AxisFamily, kappa: u64, with_axiom3: bool) -> AxiomReport {
    let n = family.len();
    let ids = |t: &[usize]| t.iter().map(|&i| family.ids[i].clone()).collect::<Vec<_>>();

    // (1)
    let mut k1 = 0;
    let mut v1 = None;
    for u in 0..n {
        for v in 0..n {
            if u != v {
                let d = family.proj(u, v).diam as u64;
                k1 = k1.max(d);
                if d > kappa && v1.is_none() {
                    v1 = Some(vec![u, v]);
                }
            }
        }
    }

    // (2): per U the largest min(d_U(V,W), d_V(U,W)) and the first violation
    let per_u: Vec<(u64, Option<[usize; 3]>)> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut best = 0u64;
            let mut first = None;
            for v in 0..n {
                if v == u {
                    continue;
                }
                for w in 0..n {
                    if w == u || w == v {
                        continue;
                    }
                    let a = family.d(u, v, w);
                    if a <= best.min(kappa) {
                        continue;
                    }
                    let b = family.d(v, u, w);
                    let m = a.min(b);
                    best = best.max(m);
                    if m > kappa && first.is_none() {
                        first = Some([u, v, w]);
                    }
                }
            }
            (best, first)
        })
        .collect();
    let k2 = per_u.iter().map(|p| p.0).max().unwrap_or(0);
    let v2 = per_u.iter().find_map(|p| p.1);

    let (c3, p3) = if with_axiom3 { axiom3_count(family, kappa) } else { (0, None) };

    let min_kappa = k1.max(k2);
    let axiom1 = AxiomStatus {
        pass: v1.is_none(),
        violation: v1.map(|t| ids(&t)),
        value: k1,
    };
    let axiom2 = AxiomStatus {
        pass: v2.is_none(),
        violation: v2.map(|t| ids(&t)),
        value: k2,
    };
    let axiom3 = AxiomStatus {
        pass: true,
        violation: p3.map(|t| ids(&t)),
        value: c3 as u64,
    };
    AxiomReport {
        kappa,
        pass: axiom1.pass && axiom2.pass,
        axiom1,
        axiom2,
        axiom3,
        min_kappa,
    }
}

fn axiom3_count(family: &AxisFamily, kappa: u64) -> (usize, Option<Vec<usize>>) {
    let n = family.len();
    let counts: Vec<(usize, usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|v| {
            (v + 1..n).map(move |w| {
                let c = (0..n).filter(|&u| u != v && u != w && family.d(u, v, w) > kappa).count();
                (c, v, w)
            })
        })
        .collect();
    counts
        .iter()
        .fold((0usize, None), |(c, p), &(cc, v, w)| if cc > c { (cc, Some(vec![v, w])) } else { (c, p) })
}

/// Axioms (1) and (2) at `kappa`, or at the smallest passing κ when `None`; axiom (3) is
/// left empty for [`fill_axiom3`].
pub(crate) fn axioms_12(family: &AxisFamily, kappa: Option<u64>) -> AxiomReport {
    match kappa {
        Some(k) => check(family, k, false),
        None => {
            // at κ = min_kappa neither axiom has a violation, so the scan report is final
            let mut r = check(family, u64::MAX / 2, false);
            r.kappa = r.min_kappa;
            r
        }
    }
}

/// Axiom (3) read off the large-projection table built at the report's κ.
pub(crate) fn fill_axiom3(report: &mut AxiomReport, family: &AxisFamily, table: &LargeProjectionTable) {
    debug_assert_eq!(table.threshold, report.kappa);
    let n = family.len();
    let mut best = (0usize, None);
    for v in 0..n {
        for w in v + 1..n {
            let c = table.row(v, w).len();
            if c > best.0 {
                best = (c, Some([v, w]));
            }
        }
    }
    report.axiom3 = AxiomStatus {
        pass: true,
        violation: best.1.map(|t| t.iter().map(|&i| family.ids[i].clone()).collect()),
        value: best.0 as u64,
    };
}

/// `{U : d_U(V,W) > κ}` listed exactly.
pub fn large_projections(family: &AxisFamily, v: usize, w: usize, kappa: u64) -> Vec<usize> {
    (0..family.len())
        .filter(|&u| u != v && u != w && family.d(u, v, w) > kappa)
        .collect()
}

/// Smallest κ passing axioms (1) and (2).
pub fn scan_kappa(family: &AxisFamily) -> AxiomReport {
    let mut r = check(family, u64::MAX / 2, false);
    let kappa = r.min_kappa;
    let (c3, p3) = axiom3_count(family, kappa);
    r.kappa = kappa;
    r.axiom3 = AxiomStatus {
        pass: true,
        violation: p3.map(|t| t.iter().map(|&i| family.ids[i].clone()).collect()),
        value: c3 as u64,
    };
    r
}
