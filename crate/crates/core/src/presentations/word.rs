//! Words over a finite generating set.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn pos(gen: usize) -> Self {
        Letter { gen, inv: false }
    }

    pub fn neg(gen: usize) -> Self {
        Letter { gen, inv: true }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// +1 or -1.
    pub fn sign(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    /// Position in the alphabet order `a < A < b < B < ...`.
    pub fn rank(self) -> usize {
        2 * self.gen + usize::from(self.inv)
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

/// A word in the generators. The empty word is the identity.
///
/// Words compare in shortlex order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Word(letters.into_iter().collect())
    }

    /// `g^power`, with negative powers using the inverse letter.
    pub fn power(gen: usize, power: i64) -> Self {
        let letter = Letter::new(gen, power < 0);
        Word(vec![letter; power.unsigned_abs() as usize])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// Cancels adjacent inverse pairs.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    /// Free reduction followed by removal of inverse pairs at the two ends.
    pub fn cyclic_reduce(&self) -> Word {
        let w = self.free_reduce().0;
        let (mut lo, mut hi) = (0, w.len());
        while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        Word(w[lo..hi].to_vec())
    }

    /// Canonical representative of the relator's cyclic class up to inversion:
    /// the shortlex-least cyclic permutation of the cyclically reduced word or
    /// of its inverse.
    pub fn canonical_relator(&self) -> Word {
        let w = self.cyclic_reduce();
        if w.is_empty() {
            return w;
        }
        let inv = w.inverse();
        let mut best: Option<Word> = None;
        for base in [&w, &inv] {
            let n = base.len();
            for s in 0..n {
                let rot: Vec<Letter> = base.0[s..].iter().chain(&base.0[..s]).copied().collect();
                let rot = Word(rot);
                if best.as_ref().is_none_or(|b| rot < *b) {
                    best = Some(rot);
                }
            }
        }
        best.unwrap_or_default()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }

    pub fn uses_only(&self, gens: &[usize]) -> bool {
        self.0.iter().all(|l| gens.contains(&l.gen))
    }

    /// Exponent sum of each generator.
    pub fn exponent_vector(&self, generator_count: usize) -> Vec<i64> {
        let mut v = vec![0i64; generator_count];
        for l in &self.0 {
            v[l.gen] += l.sign();
        }
        v
    }

    /// Replaces every generator by a word.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Vec::new();
        for l in &self.0 {
            let img = &images[l.gen];
            if l.inv {
                out.extend(img.inverse().0);
            } else {
                out.extend_from_slice(&img.0);
            }
        }
        Word(out)
    }

    /// Renders with the given generator names; inverses are upper-cased.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|l| {
                let n = &names[l.gen];
                if l.inv {
                    n.to_uppercase()
                } else {
                    n.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses whitespace-separated tokens. A token is a generator name, its
    /// upper-cased form (the inverse), or either followed by `^k`. The token
    /// `1` stands for the identity.
    pub fn parse(s: &str, names: &[String]) -> Result<Word> {
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::parse(format!("bad exponent in token `{tok}`")))?;
                    (b, e)
                }
                None => (tok, 1),
            };
            let letter = lookup_letter(base, names)
                .ok_or_else(|| Error::parse(format!("unknown generator `{base}` in `{s}`")))?;
            let l = if exp < 0 { letter.inverse() } else { letter };
            for _ in 0..exp.unsigned_abs() {
                out.push(l);
            }
        }
        Ok(Word(out))
    }
}

fn lookup_letter(tok: &str, names: &[String]) -> Option<Letter> {
    if let Some(i) = names.iter().position(|n| n == tok) {
        return Some(Letter::pos(i));
    }
    names
        .iter()
        .position(|n| n.to_uppercase() == tok)
        .map(Letter::neg)
}

/// Checks that names are usable by [`Word::parse`].
pub fn validate_names(names: &[String]) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        let first = n.chars().next();
        if !first.is_some_and(|c| c.is_lowercase()) || n.contains('^') || n.contains(char::is_whitespace) {
            return Err(Error::parse(format!(
                "generator name `{n}` must start with a lower-case letter and contain no `^` or spaces"
            )));
        }
        if names[..i].contains(n) {
            return Err(Error::parse(format!("duplicate generator name `{n}`")));
        }
        if names.iter().any(|m| m == &n.to_uppercase()) {
            return Err(Error::parse(format!("generator `{n}` collides with an inverse token")));
        }
    }
    Ok(())
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if l.inv {
                write!(f, "x{}^-1", l.gen)?;
            } else {
                write!(f, "x{}", l.gen)?;
            }
        }
        Ok(())
    }
}

/// Commutator `x y x^-1 y^-1`.
pub fn commutator(x: usize, y: usize) -> Word {
    Word(vec![Letter::pos(x), Letter::pos(y), Letter::neg(x), Letter::neg(y)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_and_render() {
        let n = names(&["a", "b"]);
        let w = Word::parse("a b A B", &n).unwrap();
        assert_eq!(w, commutator(0, 1));
        assert_eq!(w.render(&n), "a b A B");
        assert_eq!(Word::parse("a^3 b^-2", &n).unwrap().len(), 5);
        assert_eq!(Word::parse("1", &n).unwrap(), Word::empty());
        assert!(Word::parse("c", &n).is_err());
    }

    #[test]
    fn reductions() {
        let n = names(&["a", "b"]);
        let w = Word::parse("a A b", &n).unwrap();
        assert_eq!(w.free_reduce(), Word::parse("b", &n).unwrap());
        let w = Word::parse("b a b A B", &n).unwrap();
        assert_eq!(w.cyclic_reduce(), Word::parse("a b A", &n).unwrap().cyclic_reduce());
        assert_eq!(Word::parse("a b a A B A", &n).unwrap().cyclic_reduce(), Word::empty());
    }

    #[test]
    fn canonical_relator_is_class_invariant() {
        let n = names(&["a", "b"]);
        let r = Word::parse("a b A B", &n).unwrap();
        let rot = Word::parse("b A B a", &n).unwrap();
        assert_eq!(r.canonical_relator(), rot.canonical_relator());
        assert_eq!(r.canonical_relator(), r.inverse().canonical_relator());
    }

    #[test]
    fn shortlex_order() {
        let n = names(&["a", "b"]);
        let a = Word::parse("a", &n).unwrap();
        let ai = Word::parse("A", &n).unwrap();
        let b = Word::parse("b", &n).unwrap();
        let aa = Word::parse("a a", &n).unwrap();
        assert!(a < ai && ai < b && b < aa);
    }

    #[test]
    fn name_validation() {
        assert!(validate_names(&names(&["a", "b"])).is_ok());
        assert!(validate_names(&names(&["A"])).is_err());
        assert!(validate_names(&names(&["a", "a"])).is_err());
    }
}
