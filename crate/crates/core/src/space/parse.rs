use super::{ModelSpace, Syllable, Word};
use crate::error::{Error, Result};

impl ModelSpace {
    /// Parses words such as `a^2 t b^-1`. Whitespace is ignored; `1` (or an empty string)
    /// is the identity. Labels are matched longest-first.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() || (s.len() == 1 && s[0] == '1') {
            return Ok(Word::identity());
        }
        let mut labels: Vec<(Vec<char>, usize, usize)> = Vec::new();
        for (f, ls) in self.labels.iter().enumerate() {
            for (c, l) in ls.iter().enumerate() {
                labels.push((l.chars().collect(), f, c));
            }
        }
        labels.sort_by(|a, b| b.0.len().cmp(&a.0.len()));

        let mut w = Word::identity();
        let mut i = 0;
        while i < s.len() {
            let Some((lab, f, c)) = labels
                .iter()
                .find(|(l, _, _)| s[i..].starts_with(l))
                .cloned()
            else {
                return Err(Error::Parse(format!(
                    "unknown generator at `{}` in `{text}`",
                    s[i..].iter().collect::<String>()
                )));
            };
            i += lab.len();
            let mut power: i64 = 1;
            if i < s.len() && s[i] == '^' {
                i += 1;
                let start = i;
                if i < s.len() && (s[i] == '-' || s[i] == '+') {
                    i += 1;
                }
                while i < s.len() && s[i].is_ascii_digit() {
                    i += 1;
                }
                let num: String = s[start..i].iter().collect();
                power = num
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent `{num}` in `{text}`")))?;
            }
            let power = i32::try_from(power)
                .map_err(|_| Error::Parse(format!("exponent out of range in `{text}`")))?;
            let mut exps = vec![0i32; self.ranks[f]];
            exps[c] = power;
            w.push_syllable(Syllable::new(f as u16, &exps));
        }
        Ok(w)
    }

    pub fn format(&self, w: &Word) -> String {
        if w.is_identity() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for s in w.syllables() {
            for (c, &e) in s.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let l = &self.labels[s.factor as usize][c];
                if e == 1 {
                    parts.push(l.clone());
                } else {
                    parts.push(format!("{l}^{e}"));
                }
            }
        }
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_format_roundtrip() {
        let z = ModelSpace::preset("z2*z").unwrap();
        let w = z.parse("a^2 t b^-1").unwrap();
        assert_eq!(z.format(&w), "a^2 t b^-1");
        assert_eq!(z.parse("a^2tb^-1").unwrap(), w);
        assert_eq!(w.len(), 4);
    }

    #[test]
    fn identity_forms() {
        let f2 = ModelSpace::preset("f2").unwrap();
        assert!(f2.parse("1").unwrap().is_identity());
        assert!(f2.parse("  ").unwrap().is_identity());
        assert!(f2.parse("a a^-1").unwrap().is_identity());
        assert_eq!(f2.format(&Word::identity()), "1");
    }

    #[test]
    fn lattice_syllable_prints_in_coordinate_order() {
        let z = ModelSpace::preset("z2*z").unwrap();
        let w = z.parse("b a^2").unwrap();
        assert_eq!(z.format(&w), "a^2 b");
    }

    #[test]
    fn rejects_unknown_labels() {
        let f2 = ModelSpace::preset("f2").unwrap();
        assert!(matches!(f2.parse("a x"), Err(Error::Parse(_))));
        assert!(matches!(f2.parse("a^"), Err(Error::Parse(_))));
    }
}
