use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

pub type Exps = SmallVec<[i32; 2]>;

/// One factor-element of a normal form: a non-zero vector in the factor `Z^rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub factor: u16,
    pub exps: Exps,
}

impl Syllable {
    pub fn new(factor: u16, exps: &[i32]) -> Self {
        Syllable {
            factor,
            exps: exps.iter().copied().collect(),
        }
    }

    pub fn norm(&self) -> u64 {
        self.exps.iter().map(|e| e.unsigned_abs() as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    fn negated(&self) -> Syllable {
        Syllable {
            factor: self.factor,
            exps: self.exps.iter().map(|e| -e).collect(),
        }
    }

    /// L1 norm of `other - self` (both in the same factor).
    fn diff_norm(&self, other: &Syllable) -> u64 {
        self.exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| (*b as i64 - *a as i64).unsigned_abs())
            .sum()
    }
}

/// A unit generator: `sign` step along coordinate `coord` of factor `factor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    pub factor: u16,
    pub coord: u8,
    pub rank: u8,
    pub sign: i8,
}

impl Gen {
    pub fn inverse(self) -> Gen {
        Gen {
            sign: -self.sign,
            ..self
        }
    }
}

/// Group element in normal form. Also a vertex of the Cayley graph (basepoint = identity).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    syl: Vec<Syllable>,
    len: u64,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Builds a word from arbitrary syllables, reducing to normal form.
    pub fn from_syllables<I: IntoIterator<Item = Syllable>>(it: I) -> Self {
        let mut w = Word::identity();
        for s in it {
            w.push_syllable(s);
        }
        w
    }


    pub fn from_gen(g: Gen) -> Self {
        let mut w = Word::identity();
        w.mul_gen(g);
        w
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syl
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_identity(&self) -> bool {
        self.syl.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.syl.is_empty()
    }

    /// Right-multiplies by a syllable, merging with the last syllable when in the same factor.
    pub fn push_syllable(&mut self, s: Syllable) {
        if s.is_zero() {
            return;
        }
        if let Some(last) = self.syl.last_mut() {
            if last.factor == s.factor {
                self.len -= last.norm();
                for (a, b) in last.exps.iter_mut().zip(s.exps.iter()) {
                    *a += *b;
                }
                if last.is_zero() {
                    self.syl.pop();
                } else {
                    self.len += last.norm();
                }
                return;
            }
        }
        self.len += s.norm();
        self.syl.push(s);
    }

    /// Appends a syllable known to be in a different factor than the current last one.
    pub(crate) fn push_unchecked(&mut self, s: Syllable) {
        self.len += s.norm();
        self.syl.push(s);
    }

    pub(crate) fn pop_syllable(&mut self) -> Option<Syllable> {
        let s = self.syl.pop()?;
        self.len -= s.norm();
        Some(s)
    }

    pub fn mul_gen(&mut self, g: Gen) {
        if let Some(last) = self.syl.last_mut() {
            if last.factor == g.factor {
                let e = &mut last.exps[g.coord as usize];
                let before = e.unsigned_abs();
                *e += g.sign as i32;
                let after = e.unsigned_abs();
                self.len = self.len + after as u64 - before as u64;
                if last.is_zero() {
                    self.syl.pop();
                }
                return;
            }
        }
        let mut exps: Exps = SmallVec::from_elem(0, g.rank as usize);
        exps[g.coord as usize] = g.sign as i32;
        self.syl.push(Syllable {
            factor: g.factor,
            exps,
        });
        self.len += 1;
    }

    pub fn mul_assign_word(&mut self, other: &Word) {
        let mut it = other.syl.iter();
        // Cancellation can only cascade through the first syllables of `other`.
        for s in it.by_ref() {
            let merged_away = match self.syl.last() {
                Some(last) if last.factor == s.factor => {
                    let last = self.syl.last_mut().unwrap();
                    self.len -= last.norm();
                    for (a, b) in last.exps.iter_mut().zip(s.exps.iter()) {
                        *a += *b;
                    }
                    if last.is_zero() {
                        self.syl.pop();
                        true
                    } else {
                        self.len += last.norm();
                        false
                    }
                }
                _ => {
                    self.len += s.norm();
                    self.syl.push(s.clone());
                    false
                }
            };
            if !merged_away {
                break;
            }
        }
        for s in it {
            self.len += s.norm();
            self.syl.push(s.clone());
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.mul_assign_word(other);
        w
    }

    pub fn inverse(&self) -> Word {
        Word {
            syl: self.syl.iter().rev().map(Syllable::negated).collect(),
            len: self.len,
        }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::identity();
        for _ in 0..n.unsigned_abs() {
            w.mul_assign_word(&base);
        }
        w
    }

    /// Word-metric distance `|self^-1 other|`, computed without allocating.
    pub fn distance(&self, other: &Word) -> u64 {
        let (a, b) = (&self.syl, &other.syl);
        let mut i = 0;
        let mut shared = 0;
        while i < a.len() && i < b.len() && a[i] == b[i] {
            shared += a[i].norm();
            i += 1;
        }
        let (ra, rb) = (self.len - shared, other.len - shared);
        if i < a.len() && i < b.len() && a[i].factor == b[i].factor {
            a[i].diff_norm(&b[i]) + (ra - a[i].norm()) + (rb - b[i].norm())
        } else {
            ra + rb
        }
    }

    /// Unit steps spelling this word canonically: syllable by syllable, coordinates in order.
    pub fn canonical_steps(&self) -> Vec<Gen> {
        let mut out = Vec::with_capacity(self.len as usize);
        for s in &self.syl {
            let rank = s.exps.len() as u8;
            for (c, &e) in s.exps.iter().enumerate() {
                let sign = if e > 0 { 1 } else { -1 };
                for _ in 0..e.unsigned_abs() {
                    out.push(Gen {
                        factor: s.factor,
                        coord: c as u8,
                        rank,
                        sign,
                    });
                }
            }
        }
        out
    }

    /// Gromov product <x,y>_o, doubled so it stays integral.
    pub fn gromov_product2(&self, other: &Word) -> u64 {
        self.len + other.len - self.distance(other)
    }

    pub fn first_syllable(&self) -> Option<&Syllable> {
        self.syl.first()
    }

    pub fn last_syllable(&self) -> Option<&Syllable> {
        self.syl.last()
    }

    /// Shortlex comparison: length first, then syllables lexicographically.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.syl.cmp(&other.syl))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syl.is_empty() {
            return write!(f, "Word(1)");
        }
        write!(f, "Word(")?;
        for (i, s) in self.syl.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{:?}", s.factor, s.exps.as_slice())?;
        }
        write!(f, ")")
    }
}
