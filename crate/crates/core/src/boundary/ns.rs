use rayon::prelude::*;
use serde::Serialize;

use super::shadow::{Shadow, ShadowSpec};
use crate::error::{Error, Result};
use crate::space::{ModelSpace, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NsReport {
    /// Smallest `n` with `h^n z ∈ U` for every sample `z ∉ V`.
    pub n_forward: u32,
    /// Smallest `n` with `h^-n z ∈ V` for every sample `z ∉ U`.
    pub n_backward: u32,
    /// Smallest `n` at which both hold.
    pub n: u32,
    pub samples: usize,
    /// Per sample (input order), the first `n` at which it lands in `U`; `None` when in `V`.
    pub per_sample_forward: Vec<Option<u32>>,
}

fn first_hits(space_u: &Shadow, space_v: &Shadow, h: &Word, samples: &[Word], n_max: u32) -> Vec<Option<Option<u32>>> {
    // outer None: excluded sample; inner None: never hit up to n_max
    samples
        .par_iter()
        .map(|z| {
            if space_v.contains(z) {
                return None;
            }
            let mut w = z.clone();
            for n in 0..=n_max {
                if space_u.contains(&w) {
                    return Some(Some(n));
                }
                w = h.mul(&w);
            }
            Some(None)
        })
        .collect()
}

fn all_inside(sh: &Shadow, excl: &Shadow, h: &Word, samples: &[Word], n: u32) -> bool {
    let hn = h.pow(n as i64);
    samples.par_iter().all(|z| excl.contains(z) || sh.contains(&hn.mul(z)))
}

/// North-South dynamics on samples: the least `n <= n_max` pushing every sample outside `V`
/// into `U` under `h^n`, and every sample outside `U` into `V` under `h^-n`.
pub fn ns_dynamics(
    space: &ModelSpace,
    h: &Word,
    u: &ShadowSpec,
    v: &ShadowSpec,
    samples: &[Word],
    n_max: u32,
) -> Result<NsReport> {
    let su = Shadow::new(space, u)?;
    let sv = Shadow::new(space, v)?;
    let hinv = h.inverse();
    let forward = first_hits(&su, &sv, h, samples, n_max);
    if let Some(i) = forward.iter().position(|x| *x == Some(None)) {
        return Err(Error::Search(format!(
            "h^n z stays outside U for n <= {n_max} (worst sample z = {})",
            space.format(&samples[i])
        )));
    }
    let find = |sh: &Shadow, excl: &Shadow, g: &Word, side: &str| -> Result<u32> {
        (0..=n_max).find(|&n| all_inside(sh, excl, g, samples, n)).ok_or_else(|| {
            let worst = samples
                .iter()
                .find(|z| !excl.contains(z) && !sh.contains(&g.pow(n_max as i64).mul(z)))
                .map(|z| space.format(z))
                .unwrap_or_default();
            Error::Search(format!("no n <= {n_max} works for the {side} side (worst sample z = {worst})"))
        })
    };
    let n_forward = find(&su, &sv, h, "forward")?;
    let n_backward = find(&sv, &su, &hinv, "backward")?;
    let n = (n_forward.max(n_backward)..=n_max)
        .find(|&n| all_inside(&su, &sv, h, samples, n) && all_inside(&sv, &su, &hinv, samples, n))
        .ok_or_else(|| Error::Search(format!("forward and backward conditions never hold together up to {n_max}")))?;
    Ok(NsReport {
        n_forward,
        n_backward,
        n,
        samples: samples.len(),
        per_sample_forward: forward.into_iter().map(|x| x.flatten()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::AnnulusSpec;

    #[test]
    fn ab_on_the_six_sphere() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let h = f2.parse("a b").unwrap();
        let u = ShadowSpec::plain(Word::identity(), h.pow(3), 0);
        let v = ShadowSpec::plain(Word::identity(), h.pow(-3), 0);
        let samples = f2.enumerate_annulus(&AnnulusSpec::sphere(6)).unwrap();
        let rep = ns_dynamics(&f2, &h, &u, &v, &samples, 10).unwrap();
        assert_eq!(rep.n, 6);
        let i = samples.iter().position(|z| *z == h.pow(3)).unwrap();
        assert_eq!(rep.per_sample_forward[i], Some(0));
    }

    #[test]
    fn identity_has_no_dynamics() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let u = ShadowSpec::plain(Word::identity(), f2.parse("a").unwrap(), 0);
        let v = ShadowSpec::plain(Word::identity(), f2.parse("a^-1").unwrap(), 0);
        let samples = f2.ball(2).unwrap();
        assert!(ns_dynamics(&f2, &Word::identity(), &u, &v, &samples, 5).is_err());
    }
}
