use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::space::{GeodesicPath, ModelSpace, Word};

/// Splits `f = u c u^-1` with `c` cyclically reduced.
pub fn cyclic_reduction(f: &Word) -> (Word, Word) {
    let mut u = Word::identity();
    let mut c = f.clone();
    loop {
        let syl = c.syllables();
        if syl.len() >= 2 && syl[0].factor == syl[syl.len() - 1].factor {
            let s1 = Word::from_syllables([syl[0].clone()]);
            c = s1.inverse().mul(&c).mul(&s1);
            u = u.mul(&s1);
        } else {
            return (u, c);
        }
    }
}

/// The primitive root `ρ` with `f = ρ^k` and `k` maximal, together with `k`.
pub fn primitive_root(f: &Word) -> (Word, u64) {
    if f.is_identity() {
        return (Word::identity(), 1);
    }
    let (u, c) = cyclic_reduction(f);
    let syl = c.syllables();
    let (root, k) = if syl.len() == 1 {
        let g = syl[0].exps.iter().fold(0u64, |g, &e| gcd(g, e.unsigned_abs() as u64));
        let s = crate::space::Syllable {
            factor: syl[0].factor,
            exps: syl[0].exps.iter().map(|&e| e / g as i32).collect(),
        };
        (Word::from_syllables([s]), g)
    } else {
        let n = syl.len();
        let mut best = (c.clone(), 1u64);
        for k in (2..=n).rev() {
            if n % k != 0 {
                continue;
            }
            let rho = Word::from_syllables(syl[..n / k].iter().cloned());
            if rho.pow(k as i64) == c {
                best = (rho, k as u64);
                break;
            }
        }
        best
    };
    (u.mul(&root).mul(&u.inverse()), k)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Windowed orbit `{g f^n : |n| |f| <= W}` joined by canonical geodesics between
/// consecutive orbit points, optionally extended by explicit coset representatives.
#[derive(Clone, Debug)]
pub struct Axis {
    f: Word,
    step: Word,
    g: Word,
    window: u64,
    cosets: Vec<Word>,
    points: Vec<Word>,
    orbit: Vec<usize>,
    edge: Vec<bool>,
    index: HashMap<Word, usize>,
    dist: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionResult {
    pub points: Vec<Word>,
    /// Indices of `points` in the axis point list.
    pub indices: Vec<usize>,
    pub diameter: u64,
    pub distance: u64,
}

impl Axis {
    /// `g · Ax(f)` windowed to `|n|·|f| <= window`.
    pub fn new(f: &Word, g: &Word, window: u64) -> Result<Axis> {
        Axis::build(f.clone(), f.clone(), g.clone(), window, Vec::new())
    }

    /// Same as [`Axis::new`] but stepping by the primitive root of `f`, so the point set
    /// is the orbit of the full cyclic stabilizer `⟨ρ⟩ ⊇ ⟨f⟩`.
    pub fn with_stabilizer(f: &Word, g: &Word, window: u64) -> Result<Axis> {
        let (root, _) = primitive_root(f);
        Axis::build(f.clone(), root, g.clone(), window, Vec::new())
    }

    /// Adds orbit points `g f^n c` for each representative `c` (hook for larger stabilizers).
    pub fn with_cosets(f: &Word, g: &Word, window: u64, cosets: Vec<Word>) -> Result<Axis> {
        Axis::build(f.clone(), f.clone(), g.clone(), window, cosets)
    }

    fn build(f: Word, step: Word, g: Word, window: u64, cosets: Vec<Word>) -> Result<Axis> {
        if step.is_identity() {
            return Err(Error::Validation("axis needs a non-trivial element".into()));
        }
        let n = (window / step.len()) as i64;
        if n == 0 {
            return Err(Error::Validation(format!(
                "window {window} shorter than |f| = {}",
                step.len()
            )));
        }
        let orbit_pts: Vec<Word> = (-n..=n).map(|k| g.mul(&step.pow(k))).collect();
        let mut ax = Axis {
            f,
            step,
            g,
            window,
            cosets: cosets.clone(),
            points: Vec::new(),
            orbit: Vec::new(),
            edge: Vec::new(),
            index: HashMap::new(),
            dist: Vec::new(),
        };
        ax.add_point(orbit_pts[0].clone(), true, true);
        for w in orbit_pts.windows(2) {
            let path = GeodesicPath::canonical(&w[0], &w[1]);
            let verts = path.vertices();
            let last = verts.len() - 1;
            for (i, v) in verts.into_iter().enumerate().skip(1) {
                ax.add_point(v, i == last, false);
            }
        }
        let end = ax.index[&orbit_pts[orbit_pts.len() - 1]];
        ax.edge[end] = true;
        for c in &cosets {
            if c.is_identity() {
                continue;
            }
            for (k, o) in orbit_pts.iter().enumerate() {
                let boundary = k == 0 || k + 1 == orbit_pts.len();
                ax.add_point(o.mul(c), true, boundary);
            }
        }
        let m = ax.points.len();
        let mut dist = vec![0u32; m * m];
        for i in 0..m {
            for j in 0..i {
                let d = ax.points[i].distance(&ax.points[j]) as u32;
                dist[i * m + j] = d;
                dist[j * m + i] = d;
            }
        }
        ax.dist = dist;
        Ok(ax)
    }

    fn add_point(&mut self, w: Word, orbit: bool, edge: bool) {
        if let Some(&i) = self.index.get(&w) {
            self.edge[i] |= edge;
            if orbit && !self.orbit.contains(&i) {
                self.orbit.push(i);
            }
            return;
        }
        let i = self.points.len();
        self.index.insert(w.clone(), i);
        self.points.push(w);
        self.edge.push(edge);
        if orbit {
            self.orbit.push(i);
        }
    }

    pub fn f(&self) -> &Word {
        &self.f
    }

    /// Orbit step: `f` itself, or its primitive root for stabilizer axes.
    pub fn step(&self) -> &Word {
        &self.step
    }

    pub fn translate_word(&self) -> &Word {
        &self.g
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn points(&self) -> &[Word] {
        &self.points
    }

    /// Orbit points `g·step^n (·c)`, in window order.
    pub fn orbit_points(&self) -> impl Iterator<Item = &Word> {
        self.orbit.iter().map(move |&i| &self.points[i])
    }

    pub fn is_edge(&self, i: usize) -> bool {
        self.edge[i]
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.index.contains_key(w)
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn point_distance(&self, i: usize, j: usize) -> u64 {
        self.dist[i * self.points.len() + j] as u64
    }

    /// Left translate `h · self`, i.e. the axis with translate `h g`.
    pub fn translate(&self, h: &Word) -> Axis {
        Axis::build(
            self.f.clone(),
            self.step.clone(),
            h.mul(&self.g),
            self.window,
            self.cosets.clone(),
        )
        .expect("translate keeps a valid window")
    }

    /// Same axis recentred at the orbit point nearest to the identity (ties shortlex),
    /// so windows are symmetric about the part of the axis closest to `o`.
    pub fn recentred(&self) -> Axis {
        let g = canonical_coset_rep(&self.g, &self.step);
        Axis::build(self.f.clone(), self.step.clone(), g, self.window, self.cosets.clone())
            .expect("recentring keeps a valid window")
    }

    pub fn distance_to(&self, y: &Word) -> u64 {
        self.points.iter().map(|p| p.distance(y)).min().unwrap_or(u64::MAX)
    }

    /// Exact nearest-point projection of `y` onto the window.
    pub fn project(&self, y: &Word) -> Result<ProjectionResult> {
        let idx = self.project_indices(y)?;
        let distance = self.points[idx[0]].distance(y);
        Ok(ProjectionResult {
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
            diameter: self.diameter(&idx),
            distance,
            indices: idx,
        })
    }

    /// Indices of the minimizers; errors when the window edge attains the minimum.
    pub fn project_indices(&self, y: &Word) -> Result<Vec<usize>> {
        if let Some(&i) = self.index.get(y) {
            return Ok(vec![i]);
        }
        // exact distances to the orbit points first; they give triangle-inequality lower
        // bounds that skip most of the remaining points
        let mut idx = Vec::new();
        let m = self.points.len();
        let pivots: Vec<(usize, u64)> = self.orbit.iter().map(|&o| (o, self.points[o].distance(y))).collect();
        let mut best = pivots.iter().map(|p| p.1).min().unwrap_or(u64::MAX);
        let mut known = vec![u64::MAX; m];
        for &(o, d) in &pivots {
            known[o] = d;
        }
        for (i, p) in self.points.iter().enumerate() {
            let d = if known[i] != u64::MAX {
                known[i]
            } else {
                let row = &self.dist[i * m..(i + 1) * m];
                if pivots.iter().any(|&(o, d)| d.abs_diff(row[o] as u64) > best) {
                    continue;
                }
                p.distance(y)
            };
            if d < best {
                best = d;
                idx.clear();
                idx.push(i);
            } else if d == best {
                idx.push(i);
            }
        }
        if idx.iter().any(|&i| self.edge[i]) {
            return Err(Error::Inconclusive(format!(
                "projection of a point at distance {best} reaches the window edge of the axis (W = {})",
                self.window
            )));
        }
        Ok(idx)
    }

    pub fn diameter(&self, idx: &[usize]) -> u64 {
        let mut d = 0;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[..a] {
                d = d.max(self.point_distance(i, j));
            }
        }
        d
    }

    /// Union of the projections of a set of points.
    pub fn project_set<'a, I: IntoIterator<Item = &'a Word>>(&self, ys: I) -> Result<Vec<usize>> {
        let mut mark = vec![false; self.points.len()];
        for y in ys {
            for i in self.project_indices(y)? {
                mark[i] = true;
            }
        }
        Ok((0..mark.len()).filter(|&i| mark[i]).collect())
    }

    /// Projection of every vertex of a path.
    pub fn project_path(&self, p: &GeodesicPath) -> Result<Vec<usize>> {
        let mut mark = vec![false; self.points.len()];
        let mut err = None;
        p.for_each_vertex(|_, w| {
            if err.is_some() {
                return;
            }
            match self.project_indices(w) {
                Ok(idx) => idx.into_iter().for_each(|i| mark[i] = true),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok((0..mark.len()).filter(|&i| mark[i]).collect())
    }
}

impl PartialEq for Axis {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f
            && self.step == other.step
            && self.window == other.window
            && self.points == other.points
    }
}

/// Orbit point of `g⟨step⟩` nearest the identity, ties broken shortlex.
pub fn canonical_coset_rep(g: &Word, step: &Word) -> Word {
    let span = (g.len() / step.len().max(1)) as i64 + 2;
    let mut best = g.clone();
    let mut k = -span;
    let mut cur = g.mul(&step.pow(-span));
    while k <= span {
        if cur.shortlex_cmp(&best) == std::cmp::Ordering::Less {
            best = cur.clone();
        }
        cur = cur.mul(step);
        k += 1;
    }
    best
}

/// `d_U(x, y)`: diameter of `π_U(x) ∪ π_U(y)`.
pub fn proj_distance(_space: &ModelSpace, u: &Axis, x: &Word, y: &Word) -> Result<u64> {
    let idx = u.project_set([x, y])?;
    Ok(u.diameter(&idx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let (r, k) = primitive_root(&f2.parse("a b a b a b").unwrap());
        assert_eq!((f2.format(&r), k), ("a b".to_string(), 3));
        let (r, k) = primitive_root(&f2.parse("b a^2 b^-1").unwrap());
        assert_eq!((f2.format(&r), k), ("b a b^-1".to_string(), 2));
        let z2 = ModelSpace::preset("z2").unwrap();
        let (r, k) = primitive_root(&z2.parse("a^4 b^-2").unwrap());
        assert_eq!((z2.format(&r), k), ("a^2 b^-1".to_string(), 2));
    }

    #[test]
    fn f2_projection_example() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let ax = Axis::new(&f2.parse("a").unwrap(), &Word::identity(), 10).unwrap();
        let p = ax.project(&f2.parse("b a b^-1").unwrap()).unwrap();
        assert_eq!(p.points, vec![Word::identity()]);
        assert_eq!(p.distance, 3);
        let on = f2.parse("a^3").unwrap();
        let p = ax.project(&on).unwrap();
        assert_eq!((p.points, p.distance), (vec![on], 0));
    }

    #[test]
    fn z2_projection_drops_coordinate() {
        let z2 = ModelSpace::preset("z2").unwrap();
        let ax = Axis::new(&z2.parse("a").unwrap(), &Word::identity(), 20).unwrap();
        let p = ax.project(&z2.parse("a^3 b^5").unwrap()).unwrap();
        assert_eq!(p.points, vec![z2.parse("a^3").unwrap()]);
        assert_eq!(p.distance, 5);
    }

    #[test]
    fn window_edge_is_inconclusive() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let ax = Axis::new(&f2.parse("a").unwrap(), &Word::identity(), 3).unwrap();
        assert!(matches!(ax.project(&f2.parse("a^5 b").unwrap()), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn proj_distance_examples() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let u = Axis::new(&f2.parse("a").unwrap(), &Word::identity(), 10).unwrap();
        let d = |x: &str, y: &str| proj_distance(&f2, &u, &f2.parse(x).unwrap(), &f2.parse(y).unwrap()).unwrap();
        assert_eq!(d("b", "b^-1"), 0);
        assert_eq!(d("a^3 b", "a^-2 b"), 5);
        assert_eq!(d("a^2 b a", "a^2 b a"), 0);
    }

    #[test]
    fn translation_moves_points() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let ax = Axis::new(&f2.parse("a b").unwrap(), &Word::identity(), 8).unwrap();
        let h = f2.parse("b^2 a").unwrap();
        let t = ax.translate(&h);
        let moved: Vec<Word> = ax.points().iter().map(|p| h.mul(p)).collect();
        assert_eq!(t.points(), moved.as_slice());
        assert_eq!(t.translate_word(), &h);
    }

    #[test]
    fn recentre_picks_nearest_orbit_point() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let g = f2.parse("b a b a b").unwrap();
        let rep = canonical_coset_rep(&g, &f2.parse("a b").unwrap());
        // both b and a^-1 have length 1; shortlex prefers the earlier factor
        assert_eq!(f2.format(&rep), "a^-1");
    }
}
