use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::series::{critical_exponent, orbit_counts, ExponentRow};
use crate::contracting::extend;
use crate::error::{Error, Result};
use crate::space::{AnnulusSpec, CountMethod, ModelSpace, SubgroupPredicate, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct AuditParams {
    /// Annulus `A(o, n, Δ)` the separated set is drawn from.
    pub n: u64,
    pub delta: u64,
    /// Barrier radius of the extension.
    pub r: u64,
    /// Extension set; taken inside `H` so that `g f g^-1 ∈ H` by normality.
    pub fs: Vec<Word>,
    /// Separation radius; defaults to `‖Fo‖ + 4r + 4Δ`.
    pub r_sep: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditFlag {
    pub g: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublingAudit {
    pub n: u64,
    pub delta: u64,
    pub r: u64,
    /// `max_f |f|`.
    pub fo_norm: u64,
    pub r_sep: u64,
    pub annulus_size: usize,
    /// `|B_n|`, a maximal `R_sep`-separated subset of the annulus.
    pub separated: usize,
    pub distinct_images: usize,
    pub injective: bool,
    pub all_in_h: bool,
    /// `| |g f g^-1| - 2|g| | <= ‖Fo‖ + 4r` for every extended `g`.
    pub all_in_window: bool,
    /// `|H ∩ A(o, 2n, R_sep)|`.
    pub h_annulus_count: u128,
    /// `|B_n| <= |H ∩ A(o, 2n, R_sep)|`.
    pub bound_holds: bool,
    /// How often each `f` was chosen, in input order.
    pub f_usage: Vec<usize>,
    pub flagged: Vec<AuditFlag>,
}

impl DoublingAudit {
    pub fn pass(&self) -> bool {
        self.injective && self.all_in_h && self.all_in_window && self.bound_holds && self.flagged.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CogrowthReport {
    pub n_max: u64,
    pub omega_g: f64,
    pub omega_h: f64,
    /// `ω̂_H > ω̂_G / 2`.
    pub verdict: bool,
    pub curve_g: Vec<ExponentRow>,
    pub curve_h: Vec<ExponentRow>,
    pub audit: Option<DoublingAudit>,
}

impl CogrowthReport {
    pub fn pass(&self) -> bool {
        self.verdict && self.audit.as_ref().is_none_or(DoublingAudit::pass)
    }
}

/// Growth of `H` against half the growth of `G`, plus an optional constructive audit of the
/// doubling map `g ↦ g f g^-1` on a separated set.
pub fn cogrowth_check(
    space: &ModelSpace,
    h: &SubgroupPredicate,
    n_max: u64,
    audit: Option<&AuditParams>,
) -> Result<CogrowthReport> {
    let eg = critical_exponent(space, &SubgroupPredicate::Whole, n_max, 0)?;
    let eh = critical_exponent(space, h, n_max, 0)?;
    let audit = audit.map(|a| doubling_audit(space, h, a)).transpose()?;
    Ok(CogrowthReport {
        n_max,
        omega_g: eg.omega_hat,
        omega_h: eh.omega_hat,
        verdict: eh.omega_hat > eg.omega_hat / 2.0,
        curve_g: eg.rows,
        curve_h: eh.rows,
        audit,
    })
}

/// Greedy maximal subset with pairwise distances `> sep`, scanning in the given order.
pub fn separated_subset(points: &[Word], sep: u64) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    for p in points {
        if out.iter().all(|q| q.distance(p) > sep) {
            out.push(p.clone());
        }
    }
    out
}

pub fn doubling_audit(space: &ModelSpace, h: &SubgroupPredicate, a: &AuditParams) -> Result<DoublingAudit> {
    if a.fs.is_empty() {
        return Err(Error::Validation("doubling audit needs a non-empty F".into()));
    }
    for f in &a.fs {
        space.validate(f)?;
        if !h.contains(f) {
            return Err(Error::Validation(format!("{} does not lie in H", space.format(f))));
        }
    }
    let fo_norm = a.fs.iter().map(Word::len).max().unwrap_or(0);
    let r_sep = a.r_sep.unwrap_or(fo_norm + 4 * a.r + 4 * a.delta);
    let mut annulus = space.enumerate_annulus(&AnnulusSpec {
        center: Word::identity(),
        radius: a.n,
        width: a.delta,
    })?;
    annulus.sort_by(|x, y| x.shortlex_cmp(y));
    let b = separated_subset(&annulus, r_sep);
    let slack = fo_norm + 4 * a.r;
    let results: Vec<std::result::Result<(usize, Word), String>> = b
        .par_iter()
        .map(|g| match extend(space, g, &a.fs, a.r, &g.inverse()) {
            Ok((f, _)) => {
                let i = a.fs.iter().position(|x| *x == f).expect("f comes from fs");
                Ok((i, g.mul(&f).mul(&g.inverse())))
            }
            Err(Error::Search(e)) => Err(e),
            Err(e) => Err(e.to_string()),
        })
        .collect();
    let mut f_usage = vec![0usize; a.fs.len()];
    let mut flagged = Vec::new();
    let mut images = HashSet::new();
    let mut all_in_h = true;
    let mut all_in_window = true;
    let mut extended = 0usize;
    for (g, res) in b.iter().zip(results) {
        match res {
            Ok((i, img)) => {
                extended += 1;
                f_usage[i] += 1;
                all_in_h &= h.contains(&img);
                all_in_window &= img.len().abs_diff(2 * g.len()) <= slack;
                images.insert(img);
            }
            Err(reason) => flagged.push(AuditFlag {
                g: space.format(g),
                reason,
            }),
        }
    }
    let lo = (2 * a.n).saturating_sub(r_sep);
    let hi = 2 * a.n + r_sep;
    let o = Word::identity();
    let counts = orbit_counts(space, h, &o, &o, hi, CountMethod::Auto)?;
    let h_annulus_count = counts[lo as usize..=hi as usize].iter().sum();
    Ok(DoublingAudit {
        n: a.n,
        delta: a.delta,
        r: a.r,
        fo_norm,
        r_sep,
        annulus_size: annulus.len(),
        separated: b.len(),
        distinct_images: images.len(),
        injective: images.len() == extended,
        all_in_h,
        all_in_window,
        h_annulus_count,
        bound_holds: (b.len() as u128) <= h_annulus_count,
        f_usage,
        flagged,
    })
}
