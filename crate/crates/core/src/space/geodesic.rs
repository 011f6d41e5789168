use super::{Gen, Word};

/// A geodesic edge path stored as a start vertex plus unit steps.
///
/// Vertices are materialized on demand so that long rays stay cheap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicPath {
    start: Word,
    steps: Vec<Gen>,
}

impl GeodesicPath {
    /// The canonical geodesic from `x` to `y`: `x` times the prefixes of the canonical
    /// spelling of `x^-1 y` (inside a lattice syllable, coordinate 0 first, then 1, ...).
    pub fn canonical(x: &Word, y: &Word) -> Self {
        let z = x.inverse().mul(y);
        GeodesicPath {
            start: x.clone(),
            steps: z.canonical_steps(),
        }
    }

    /// Builds a path from explicit steps. Callers are responsible for geodesicity;
    /// see [`GeodesicPath::is_geodesic`].
    pub fn from_steps(start: Word, steps: Vec<Gen>) -> Self {
        GeodesicPath { start, steps }
    }

    pub fn start(&self) -> &Word {
        &self.start
    }

    pub fn steps(&self) -> &[Gen] {
        &self.steps
    }

    /// Number of edges (= distance between endpoints for a geodesic).
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> Word {
        let mut w = self.start.clone();
        for &g in &self.steps {
            w.mul_gen(g);
        }
        w
    }

    /// Visits vertices in order without cloning them.
    pub fn for_each_vertex<F: FnMut(usize, &Word)>(&self, mut f: F) {
        let mut w = self.start.clone();
        f(0, &w);
        for (i, &g) in self.steps.iter().enumerate() {
            w.mul_gen(g);
            f(i + 1, &w);
        }
    }

    pub fn vertices(&self) -> Vec<Word> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        self.for_each_vertex(|_, w| out.push(w.clone()));
        out
    }

    pub fn vertex(&self, i: usize) -> Word {
        let mut w = self.start.clone();
        for &g in &self.steps[..i] {
            w.mul_gen(g);
        }
        w
    }

    /// Sub-path between vertex indices `i <= j`.
    pub fn slice(&self, i: usize, j: usize) -> GeodesicPath {
        GeodesicPath {
            start: self.vertex(i),
            steps: self.steps[i..j].to_vec(),
        }
    }

    pub fn translate(&self, h: &Word) -> GeodesicPath {
        GeodesicPath {
            start: h.mul(&self.start),
            steps: self.steps.clone(),
        }
    }

    pub fn reversed(&self) -> GeodesicPath {
        GeodesicPath {
            start: self.end(),
            steps: self.steps.iter().rev().map(|g| g.inverse()).collect(),
        }
    }

    /// True when the endpoints are at distance equal to the number of steps.
    pub fn is_geodesic(&self) -> bool {
        self.start.distance(&self.end()) == self.steps.len() as u64
    }

    /// Smallest distance from `p` to a vertex of the path, with the first index attaining it.
    pub fn distance_to(&self, p: &Word) -> (u64, usize) {
        let mut best = (u64::MAX, 0);
        self.for_each_vertex(|i, w| {
            let d = w.distance(p);
            if d < best.0 {
                best = (d, i);
            }
        });
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::ModelSpace;

    #[test]
    fn f2_geodesic_ab() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let p = GeodesicPath::canonical(&Word::identity(), &f2.parse("a b").unwrap());
        let v: Vec<String> = p.vertices().iter().map(|w| f2.format(w)).collect();
        assert_eq!(v, ["1", "a", "a b"]);
    }

    #[test]
    fn z2_geodesic_moves_a_first() {
        let z2 = ModelSpace::preset("z2").unwrap();
        let p = GeodesicPath::canonical(&Word::identity(), &z2.parse("a b").unwrap());
        let v: Vec<String> = p.vertices().iter().map(|w| z2.format(w)).collect();
        assert_eq!(v, ["1", "a", "a b"]);
    }

    #[test]
    fn degenerate_geodesic() {
        let f2 = ModelSpace::preset("f2").unwrap();
        let x = f2.parse("a b^-1").unwrap();
        let p = GeodesicPath::canonical(&x, &x);
        assert_eq!(p.vertices(), vec![x]);
    }

    #[test]
    fn geodesic_through_cancellation() {
        let z = ModelSpace::preset("z2*z").unwrap();
        let x = z.parse("a^2 t").unwrap();
        let y = z.parse("a^2 b").unwrap();
        let p = GeodesicPath::canonical(&x, &y);
        assert_eq!(p.len() as u64, x.distance(&y));
        assert!(p.is_geodesic());
        assert_eq!(p.end(), y);
        assert_eq!(p.reversed().end(), x);
    }
}
