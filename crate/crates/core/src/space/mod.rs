//! Exact word metrics on free products of free abelian groups.

mod count;
mod enumerate;
mod geodesic;
mod parse;
mod word;

pub use count::{CountMethod, SubgroupPredicate};
pub use enumerate::{lattice_vectors, AnnulusSpec, DEFAULT_ENUMERATION_CAP};
pub use geodesic::GeodesicPath;
pub use word::{Exps, Gen, Syllable, Word};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Free { rank: usize },
    FreeProductAbelian { ranks: Vec<usize>, free_rank: usize },
    Lattice { rank: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpace {
    family: Family,
    ranks: Vec<usize>,
    labels: Vec<Vec<String>>,
    gens: Vec<Gen>,
    enumeration_cap: u128,
}

const DEFAULT_LABELS: &[&str] = &[
    "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "p", "q", "r", "s", "t",
    "u", "v", "w", "x", "y", "z",
];

impl ModelSpace {
    pub fn new(family: Family) -> Result<Self> {
        let ranks = match &family {
            Family::Free { rank } => {
                if *rank < 1 {
                    return Err(Error::Validation("free group needs rank >= 1".into()));
                }
                vec![1; *rank]
            }
            Family::FreeProductAbelian { ranks, free_rank } => {
                if ranks.contains(&0) {
                    return Err(Error::Validation("abelian factor ranks must be >= 1".into()));
                }
                let mut r = ranks.clone();
                r.extend(std::iter::repeat_n(1, *free_rank));
                if r.is_empty() {
                    return Err(Error::Validation("free product needs at least one factor".into()));
                }
                r
            }
            Family::Lattice { rank } => {
                if *rank < 1 {
                    return Err(Error::Validation("lattice needs rank >= 1".into()));
                }
                vec![*rank]
            }
        };
        let total: usize = ranks.iter().sum();
        if total > DEFAULT_LABELS.len() {
            return Err(Error::Validation(format!(
                "{total} generators exceed the default label alphabet; supply labels"
            )));
        }
        if ranks.iter().any(|&m| m > u8::MAX as usize) || ranks.len() > u16::MAX as usize {
            return Err(Error::Validation("factor rank or count too large".into()));
        }
        let mut labels = Vec::new();
        let mut next = 0;
        for &m in &ranks {
            labels.push(
                DEFAULT_LABELS[next..next + m]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            );
            next += m;
        }
        let mut space = ModelSpace {
            family,
            ranks,
            labels,
            gens: Vec::new(),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        };
        space.gens = space.build_gens();
        Ok(space)
    }

    /// Named presets: `f2`, `f3`, `z`, `z2`, `z3`, `z2*z` (labels a,b | t).
    pub fn preset(name: &str) -> Result<Self> {
        let n = name.trim().to_ascii_lowercase();
        match n.as_str() {
            "z2*z" | "z2z" | "z2_z" => ModelSpace::new(Family::FreeProductAbelian {
                ranks: vec![2],
                free_rank: 1,
            })?
            .with_labels(vec![vec!["a".into(), "b".into()], vec!["t".into()]]),
            _ => {
                if let Some(k) = n.strip_prefix('f').and_then(|k| k.parse().ok()) {
                    ModelSpace::new(Family::Free { rank: k })
                } else if n == "z" {
                    ModelSpace::new(Family::Lattice { rank: 1 })
                } else if let Some(m) = n.strip_prefix('z').and_then(|k| k.parse().ok()) {
                    ModelSpace::new(Family::Lattice { rank: m })
                } else {
                    Err(Error::Validation(format!("unknown space preset `{name}`")))
                }
            }
        }
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.ranks.len()
            || labels.iter().zip(&self.ranks).any(|(l, &m)| l.len() != m)
        {
            return Err(Error::Validation(
                "labels must list one name per generator of each factor".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for l in labels.iter().flatten() {
            let ok = !l.is_empty()
                && l.chars().all(|c| c.is_alphabetic() || c == '_')
                && seen.insert(l.clone());
            if !ok {
                return Err(Error::Validation(format!("bad or duplicate generator label `{l}`")));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_enumeration_cap(mut self, cap: u128) -> Self {
        self.enumeration_cap = cap;
        self
    }

    fn build_gens(&self) -> Vec<Gen> {
        let mut g = Vec::new();
        for (f, &m) in self.ranks.iter().enumerate() {
            for c in 0..m {
                for sign in [1i8, -1] {
                    g.push(Gen {
                        factor: f as u16,
                        coord: c as u8,
                        rank: m as u8,
                        sign,
                    });
                }
            }
        }
        g
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn enumeration_cap(&self) -> u128 {
        self.enumeration_cap
    }

    /// Symmetric generating set, ordered factor by factor as `a, a^-1, b, b^-1, ...`.
    pub fn generators(&self) -> &[Gen] {
        &self.gens
    }

    /// True when every factor is infinite cyclic, i.e. the Cayley graph is a tree.
    pub fn is_tree(&self) -> bool {
        !self.ranks.is_empty() && self.ranks.iter().all(|&m| m == 1)
    }

    pub fn gen_label(&self, g: Gen) -> String {
        let l = &self.labels[g.factor as usize][g.coord as usize];
        if g.sign > 0 {
            l.clone()
        } else {
            format!("{l}^-1")
        }
    }

    /// Checks that a word is a valid normal form for this space.
    pub fn validate(&self, w: &Word) -> Result<()> {
        let mut prev: Option<u16> = None;
        for s in w.syllables() {
            let f = s.factor as usize;
            if f >= self.ranks.len() {
                return Err(Error::Validation(format!("syllable factor {f} out of range")));
            }
            if s.exps.len() != self.ranks[f] {
                return Err(Error::Validation(format!(
                    "syllable in factor {f} has {} coordinates, expected {}",
                    s.exps.len(),
                    self.ranks[f]
                )));
            }
            if s.is_zero() {
                return Err(Error::Validation("empty syllable".into()));
            }
            if prev == Some(s.factor) {
                return Err(Error::Validation("adjacent syllables in the same factor".into()));
            }
            prev = Some(s.factor);
        }
        Ok(())
    }

    /// Builds a word from raw syllables, rejecting malformed input.
    pub fn word(&self, syllables: Vec<Syllable>) -> Result<Word> {
        for s in &syllables {
            let f = s.factor as usize;
            if f >= self.ranks.len() || s.exps.len() != self.ranks[f] {
                return Err(Error::Validation(format!("malformed syllable {s:?}")));
            }
        }
        Ok(Word::from_syllables(syllables))
    }

    pub fn multiply(&self, g: &Word, h: &Word) -> Result<Word> {
        self.validate(g)?;
        self.validate(h)?;
        Ok(g.mul(h))
    }

    pub fn distance(&self, x: &Word, y: &Word) -> Result<u64> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(x.distance(y))
    }

    pub fn geodesic(&self, x: &Word, y: &Word) -> GeodesicPath {
        GeodesicPath::canonical(x, y)
    }

    /// Distances from the identity to every vertex in `B(o, r)` via breadth-first search
    /// on the Cayley graph. Used as an oracle; exponential in `r`.
    pub fn bfs_ball(&self, r: u64) -> std::collections::HashMap<Word, u64> {
        let mut dist = std::collections::HashMap::new();
        dist.insert(Word::identity(), 0u64);
        let mut frontier = vec![Word::identity()];
        for d in 1..=r {
            let mut next = Vec::new();
            for w in &frontier {
                for &g in &self.gens {
                    let mut v = w.clone();
                    v.mul_gen(g);
                    if !dist.contains_key(&v) {
                        dist.insert(v.clone(), d);
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        dist
    }
}
