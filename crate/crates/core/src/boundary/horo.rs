use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{ModelSpace, Word};

/// Where a horovector came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HoroSource {
    Point { y: String },
    /// Stabilized limit: the last `window` terms of the sequence agreed.
    Limit { last: String, terms: usize, window: usize },
}

/// `b_y(x) = d(x, y) - d(o, y)` on the ball `B(o, R)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoroVector {
    radius: u64,
    points: Vec<Word>,
    values: Vec<i64>,
    index: HashMap<Word, usize>,
    pub source: HoroSource,
}

impl HoroVector {
    pub fn radius(&self) -> u64 {
        self.radius
    }

    /// Ball points in shortlex order, aligned with [`HoroVector::values`].
    pub fn points(&self) -> &[Word] {
        &self.points
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, x: &Word) -> Option<i64> {
        self.index.get(x).map(|&i| self.values[i])
    }

    /// `|b(x) - b(x')| <= d(x, x')` for every pair of ball points.
    pub fn is_lipschitz(&self) -> bool {
        let n = self.points.len();
        (0..n).all(|i| {
            (0..i).all(|j| self.values[i].abs_diff(self.values[j]) <= self.points[i].distance(&self.points[j]))
        })
    }
}

fn ball_sorted(space: &ModelSpace, r: u64) -> Result<Vec<Word>> {
    let mut ball = space.ball(r)?;
    ball.sort_by(Word::shortlex_cmp);
    Ok(ball)
}

fn from_values(radius: u64, points: Vec<Word>, values: Vec<i64>, source: HoroSource) -> HoroVector {
    let index = points.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    HoroVector {
        radius,
        points,
        values,
        index,
        source,
    }
}

fn values_for(points: &[Word], y: &Word) -> Vec<i64> {
    let dy = y.len() as i64;
    points.iter().map(|x| x.distance(y) as i64 - dy).collect()
}

/// Exact horovector of the point `y` on `B(o, R)`.
pub fn horofunction_vector(space: &ModelSpace, y: &Word, r: u64) -> Result<HoroVector> {
    let points = ball_sorted(space, r)?;
    let values = values_for(&points, y);
    Ok(from_values(r, points, values, HoroSource::Point { y: space.format(y) }))
}

/// Ball entries whose values did not settle, with their values over the last terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub window: usize,
    pub oscillating: Vec<(String, Vec<i64>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HoroLimit {
    Stabilized(HoroVector),
    Diverged(Divergence),
}

impl HoroLimit {
    pub fn stabilized(self) -> Option<HoroVector> {
        match self {
            HoroLimit::Stabilized(v) => Some(v),
            HoroLimit::Diverged(_) => None,
        }
    }
}

/// Limit of `b_{y_k}` on `B(o, R)`, accepted when the last `window` terms agree everywhere
/// on the ball. This is sound but incomplete: a later change is never ruled out.
pub fn horo_limit(space: &ModelSpace, ys: &[Word], r: u64, window: usize) -> Result<HoroLimit> {
    if window == 0 || ys.len() < window {
        return Err(Error::Validation(format!(
            "sequence of {} terms is shorter than the stabilization window {window}",
            ys.len()
        )));
    }
    let points = ball_sorted(space, r)?;
    let tail = &ys[ys.len() - window..];
    let rows: Vec<Vec<i64>> = tail.iter().map(|y| values_for(&points, y)).collect();
    let oscillating: Vec<(String, Vec<i64>)> = (0..points.len())
        .filter(|&i| rows.iter().any(|row| row[i] != rows[0][i]))
        .map(|i| (space.format(&points[i]), rows.iter().map(|row| row[i]).collect()))
        .collect();
    if !oscillating.is_empty() {
        return Ok(HoroLimit::Diverged(Divergence { window, oscillating }));
    }
    let values = rows.into_iter().next_back().expect("window is non-empty");
    Ok(HoroLimit::Stabilized(from_values(
        r,
        points,
        values,
        HoroSource::Limit {
            last: space.format(&ys[ys.len() - 1]),
            terms: ys.len(),
            window,
        },
    )))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteDifference {
    /// `max |b1(x) - b2(x)|` over the ball; a lower bound for the sup norm on the whole space.
    pub value: u64,
    pub argmax: Option<String>,
    pub lower_bound: bool,
}

pub fn finite_difference(space: &ModelSpace, b1: &HoroVector, b2: &HoroVector) -> Result<FiniteDifference> {
    if b1.radius != b2.radius || b1.points != b2.points {
        return Err(Error::Validation(format!(
            "horovectors on different balls (R = {} vs {})",
            b1.radius, b2.radius
        )));
    }
    let mut best: (u64, Option<usize>) = (0, None);
    for (i, (x, y)) in b1.values.iter().zip(&b2.values).enumerate() {
        let d = x.abs_diff(*y);
        if d > best.0 {
            best = (d, Some(i));
        }
    }
    Ok(FiniteDifference {
        value: best.0,
        argmax: best.1.map(|i| space.format(&b1.points[i])),
        lower_bound: true,
    })
}

/// `B(x, y) = b(x) - b(y)`.
pub fn busemann_cocycle(b: &HoroVector, x: &Word, y: &Word) -> Result<i64> {
    match (b.value(x), b.value(y)) {
        (Some(bx), Some(by)) => Ok(bx - by),
        _ => Err(Error::Validation(format!(
            "cocycle arguments must lie in the ball of radius {}",
            b.radius
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_horovector_on_f2() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let b = horofunction_vector(&f2, &f2.parse("a^5").unwrap(), 1).unwrap();
        let v = |s: &str| b.value(&f2.parse(s).unwrap()).unwrap();
        assert_eq!((v("a"), v("a^-1"), v("b"), v("b^-1"), v("1")), (-1, 1, 1, 1, 0));
        assert!(b.is_lipschitz());
    }

    #[test]
    fn finite_difference_between_ends() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let b5 = horofunction_vector(&f2, &f2.parse("a^5").unwrap(), 2).unwrap();
        let b9 = horofunction_vector(&f2, &f2.parse("a^9").unwrap(), 2).unwrap();
        let c5 = horofunction_vector(&f2, &f2.parse("b^5").unwrap(), 2).unwrap();
        assert_eq!(finite_difference(&f2, &b5, &b9).unwrap().value, 0);
        let d = finite_difference(&f2, &b5, &c5).unwrap();
        assert_eq!(d.value, 4);
        assert_eq!(b5.value(&f2.parse("a^2").unwrap()), Some(-2));
        assert_eq!(c5.value(&f2.parse("a^2").unwrap()), Some(2));
    }

    #[test]
    fn limits() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let a = f2.parse("a").unwrap();
        let b = f2.parse("b").unwrap();
        let ys: Vec<Word> = (1..=10).map(|k| a.pow(k)).collect();
        let lim = horo_limit(&f2, &ys, 3, 5).unwrap().stabilized().unwrap();
        for x in lim.points() {
            let depth = x.syllables().first().filter(|s| s.factor == 0 && s.exps[0] > 0).map_or(0, |s| s.exps[0] as i64);
            assert_eq!(lim.value(x).unwrap(), x.len() as i64 - 2 * depth);
        }
        assert_eq!(busemann_cocycle(&lim, &a, &Word::identity()).unwrap(), -1);
        let alt: Vec<Word> = (1..=10).map(|k| if k % 2 == 0 { a.pow(k) } else { b.pow(k) }).collect();
        assert!(matches!(horo_limit(&f2, &alt, 2, 5).unwrap(), HoroLimit::Diverged(_)));
        assert!(horo_limit(&f2, &ys[..3], 2, 5).is_err());
    }
}
