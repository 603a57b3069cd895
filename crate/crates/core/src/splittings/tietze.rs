//! Breadth-first enumeration of presentations by Tietze moves.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::presentations::{FinitePresentation, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TietzeBudget {
    /// Moves applied to reach an item.
    pub moves: usize,
    /// Longest new relator or generator definition.
    pub word_length: usize,
    /// Items emitted.
    pub count: usize,
}

/// `(relator index, inverted)` factors; the product is the new relator up
/// to cyclic permutation.
pub type Certificate = Vec<(usize, bool)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TietzeMove {
    AddRelator { relator: Word, certificate: Certificate },
    RemoveRelator { index: usize, certificate: Certificate },
    AddGenerator { definition: Word },
    RemoveGenerator { generator: usize, relator: usize },
}

#[derive(Clone, Debug)]
pub struct TietzeItem {
    pub presentation: FinitePresentation,
    /// Each generator as a word in the input generators.
    pub defs: Vec<Word>,
    pub moves: Vec<TietzeMove>,
}

fn fresh_name(names: &[String]) -> String {
    let taken = |s: &str| names.iter().any(|n| n == s || n.to_uppercase() == s.to_uppercase());
    for c in 'a'..='z' {
        let s = c.to_string();
        if !taken(&s) {
            return s;
        }
    }
    (0..).map(|i| format!("x{i}")).find(|s| !taken(s)).expect("unbounded")
}

/// Freely reduced words of length `1..=max_len` in `n` generators, shortlex.
fn words(n: usize, max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = (0..n).flat_map(|g| [Letter::pos(g), Letter::neg(g)]).collect();
    let mut out = Vec::new();
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.letters().last().is_some_and(|&x| x == l.inverse()) {
                    continue;
                }
                let mut v = w.clone();
                v.0.push(l);
                next.push(v);
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn products(rels: &[Word], skip: Option<usize>, max_len: usize) -> Vec<(Word, Certificate)> {
    let mut out = Vec::new();
    let idx: Vec<usize> = (0..rels.len()).filter(|&i| Some(i) != skip).collect();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a..] {
            for (ii, ji) in [(false, false), (false, true)] {
                let ri = if ii { rels[i].inverse() } else { rels[i].clone() };
                let rj = if ji { rels[j].inverse() } else { rels[j].clone() };
                let w = ri.concat(&rj).canonical_relator();
                if !w.is_empty() && w.len() <= max_len {
                    out.push((w, vec![(i, ii), (j, ji)]));
                }
            }
        }
    }
    out
}

fn successors(item: &TietzeItem, budget: &TietzeBudget) -> Vec<TietzeItem> {
    let p = &item.presentation;
    let n = p.generator_count();
    let rels = p.relators();
    let present: BTreeSet<Word> = rels.iter().map(|r| r.canonical_relator()).collect();
    let mut out = Vec::new();
    let with = |pres: FinitePresentation, defs: Vec<Word>, mv: TietzeMove| {
        let mut moves = item.moves.clone();
        moves.push(mv);
        TietzeItem { presentation: pres, defs, moves }
    };

    // add a relator that is a product of two relators
    for (w, cert) in products(rels, None, budget.word_length) {
        if present.contains(&w) {
            continue;
        }
        let mut r = rels.to_vec();
        r.push(w.clone());
        if let Ok(q) = FinitePresentation::new(p.names().to_vec(), r) {
            out.push(with(q, item.defs.clone(), TietzeMove::AddRelator { relator: w, certificate: cert }));
        }
    }
    // remove a relator that is a product of at most two others
    for k in 0..rels.len() {
        let target = rels[k].canonical_relator();
        let single = (0..rels.len()).find(|&i| i != k && rels[i].canonical_relator() == target);
        let cert = single
            .map(|i| vec![(i, false)])
            .or_else(|| products(rels, Some(k), usize::MAX).into_iter().find(|(w, _)| *w == target).map(|(_, c)| c));
        if let Some(certificate) = cert {
            let mut r = rels.to_vec();
            r.remove(k);
            if let Ok(q) = FinitePresentation::new(p.names().to_vec(), r) {
                out.push(with(q, item.defs.clone(), TietzeMove::RemoveRelator { index: k, certificate }));
            }
        }
    }
    // define a new generator
    for w in words(n, budget.word_length) {
        let mut names = p.names().to_vec();
        names.push(fresh_name(&names));
        let mut r = rels.to_vec();
        r.push(Word::power(n, 1).concat(&w.inverse()));
        let mut defs = item.defs.clone();
        defs.push(w.substitute(&item.defs).free_reduce());
        if let Ok(q) = FinitePresentation::new(names, r) {
            out.push(with(q, defs, TietzeMove::AddGenerator { definition: w }));
        }
    }
    // eliminate a generator occurring once in some relator
    for g in 0..n {
        let Some((k, image)) = rels.iter().enumerate().find_map(|(k, r)| {
            let r = r.cyclic_reduce();
            let ls = r.letters();
            let pos: Vec<usize> = (0..ls.len()).filter(|&i| ls[i].gen == g).collect();
            if pos.len() != 1 {
                return None;
            }
            let i = pos[0];
            // r = x g^e y, so g^e = x^-1 y^-1 ... cyclically g^e = (y x)^-1
            let rest = Word(ls[i + 1..].iter().chain(&ls[..i]).copied().collect());
            let img = if ls[i].inv { rest } else { rest.inverse() };
            Some((k, img))
        }) else {
            continue;
        };
        let mut images: Vec<Word> = Vec::with_capacity(n);
        for h in 0..n {
            images.push(match h.cmp(&g) {
                std::cmp::Ordering::Less => Word::power(h, 1),
                std::cmp::Ordering::Equal => Word::empty(),
                std::cmp::Ordering::Greater => Word::power(h - 1, 1),
            });
        }
        let renum = |w: &Word| w.substitute(&images);
        images[g] = renum(&image);
        let r: Vec<Word> = rels.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, w)| w.substitute(&images)).collect();
        let mut names = p.names().to_vec();
        names.remove(g);
        let mut defs = item.defs.clone();
        defs.remove(g);
        if let Ok(q) = FinitePresentation::new(names, r) {
            out.push(with(q, defs, TietzeMove::RemoveGenerator { generator: g, relator: k }));
        }
    }
    out
}

/// Deterministic breadth-first stream of presentations reachable within the
/// budget, the input first, one per canonical key.
pub struct TietzeStream {
    budget: TietzeBudget,
    queue: VecDeque<TietzeItem>,
    seen: HashSet<(usize, Vec<Word>)>,
    emitted: usize,
}

impl Iterator for TietzeStream {
    type Item = TietzeItem;

    fn next(&mut self) -> Option<TietzeItem> {
        if self.emitted >= self.budget.count {
            return None;
        }
        let item = self.queue.pop_front()?;
        if item.moves.len() < self.budget.moves {
            for s in successors(&item, &self.budget) {
                if self.seen.insert(s.presentation.canonical_key()) {
                    self.queue.push_back(s);
                }
            }
        }
        self.emitted += 1;
        Some(item)
    }
}

pub fn tietze_enumerate(p: &FinitePresentation, budget: TietzeBudget) -> TietzeStream {
    let first = TietzeItem {
        presentation: p.clone(),
        defs: (0..p.generator_count()).map(|g| Word::power(g, 1)).collect(),
        moves: Vec::new(),
    };
    TietzeStream {
        budget,
        seen: HashSet::from([p.canonical_key()]),
        queue: VecDeque::from([first]),
        emitted: 0,
    }
}
