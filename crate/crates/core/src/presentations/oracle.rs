//! Word-problem oracles for free products of abelian groups, confluent
//! rewriting systems, and subgroups of either.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::abelian::{AbelianCoords, AbelianGroup};
use super::word::{commutator, Letter, Word};
use super::FinitePresentation;
use crate::error::{Error, Result};

/// A maximal run of letters from one free factor, in that factor's canonical
/// coordinates. Never trivial inside a normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub factor: usize,
    pub coords: AbelianCoords,
}

/// Canonical key of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    Syllables(Vec<Syllable>),
    Reduced(Word),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    Abelian,
    Free,
    FreeProductOfAbelians,
    RewritingSystem,
}

/// One abelian free factor spanned by a set of ambient generators.
#[derive(Clone, Debug)]
pub struct Factor {
    pub gens: Vec<usize>,
    pub group: AbelianGroup,
}

/// Free product of abelian groups, each spanned by a block of generators.
#[derive(Clone, Debug)]
pub struct FreeProductOracle {
    gen_count: usize,
    factors: Vec<Factor>,
    /// (factor, local index) of each ambient generator.
    locate: Vec<(usize, usize)>,
}

impl FreeProductOracle {
    pub fn new(gen_count: usize, factors: Vec<Factor>) -> Result<Self> {
        let mut locate = vec![None; gen_count];
        for (f, fac) in factors.iter().enumerate() {
            if fac.gens.len() != fac.group.gen_count() {
                return Err(Error::validation("factor generator count mismatch"));
            }
            for (i, &g) in fac.gens.iter().enumerate() {
                if g >= gen_count || locate[g].is_some() {
                    return Err(Error::validation("factors must partition the generators"));
                }
                locate[g] = Some((f, i));
            }
        }
        let locate = locate
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::validation("factors must cover every generator"))?;
        Ok(FreeProductOracle { gen_count, factors, locate })
    }

    /// Recognizes a presentation whose relator-connected generator blocks are
    /// each visibly abelian: every pair of generators in a block has its
    /// commutator among the relators.
    pub fn recognize(p: &FinitePresentation) -> Option<Self> {
        let n = p.generator_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        for r in p.relators() {
            let gens: BTreeSet<usize> = r.letters().iter().map(|l| l.gen).collect();
            let mut it = gens.into_iter();
            if let Some(first) = it.next() {
                for g in it {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, g));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut root_block = vec![usize::MAX; n];
        for g in 0..n {
            let r = find(&mut parent, g);
            if root_block[r] == usize::MAX {
                root_block[r] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[root_block[r]].push(g);
        }
        let canon: BTreeSet<Word> = p.relators().iter().map(|r| r.canonical_relator()).collect();
        let mut factors = Vec::with_capacity(blocks.len());
        for block in blocks {
            for (i, &x) in block.iter().enumerate() {
                for &y in &block[i + 1..] {
                    if !canon.contains(&commutator(x, y).canonical_relator()) {
                        return None;
                    }
                }
            }
            let local: Vec<Vec<i64>> = p
                .relators()
                .iter()
                .filter(|r| r.letters().first().is_some_and(|l| block.contains(&l.gen)))
                .map(|r| {
                    let full = r.exponent_vector(n);
                    block.iter().map(|&g| full[g]).collect()
                })
                .collect();
            let group = AbelianGroup::from_relations(block.len(), &local).ok()?;
            factors.push(Factor { gens: block, group });
        }
        FreeProductOracle::new(n, factors).ok()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor_of(&self, gen: usize) -> usize {
        self.locate[gen].0
    }

    pub fn kind(&self) -> OracleKind {
        if self.factors.len() == 1 {
            OracleKind::Abelian
        } else if self
            .factors
            .iter()
            .all(|f| f.gens.len() == 1 && f.group.free_rank() == 1)
        {
            OracleKind::Free
        } else {
            OracleKind::FreeProductOfAbelians
        }
    }

    fn push_coords(&self, out: &mut Vec<Syllable>, factor: usize, coords: &AbelianCoords) -> Result<()> {
        if let Some(last) = out.last_mut().filter(|s| s.factor == factor) {
            let sum = self.factors[factor].group.add(&last.coords, coords)?;
            if sum.is_zero() {
                out.pop();
            } else {
                last.coords = sum;
            }
        } else if !coords.is_zero() {
            out.push(Syllable { factor, coords: coords.clone() });
        }
        Ok(())
    }

    fn push_letter(&self, out: &mut Vec<Syllable>, l: Letter) -> Result<()> {
        if l.gen >= self.gen_count {
            return Err(Error::validation(format!("generator x{} out of range", l.gen)));
        }
        let (f, local) = self.locate[l.gen];
        let grp = &self.factors[f].group;
        let c = grp.apply_letter(&grp.zero(), Letter::new(local, l.inv))?;
        self.push_coords(out, f, &c)
    }

    /// Alternating syllable decomposition of a word.
    pub fn normal_form(&self, w: &Word) -> Result<Vec<Syllable>> {
        let mut out = Vec::new();
        for &l in w.letters() {
            self.push_letter(&mut out, l)?;
        }
        Ok(out)
    }

    pub fn mul(&self, a: &[Syllable], b: &[Syllable]) -> Result<Vec<Syllable>> {
        let mut out = a.to_vec();
        for s in b {
            self.push_coords(&mut out, s.factor, &s.coords)?;
        }
        Ok(out)
    }

    pub fn inverse(&self, a: &[Syllable]) -> Vec<Syllable> {
        a.iter()
            .rev()
            .map(|s| Syllable { factor: s.factor, coords: self.factors[s.factor].group.neg(&s.coords) })
            .collect()
    }

    /// A word in the ambient generators representing the syllable.
    pub fn syllable_word(&self, s: &Syllable) -> Word {
        let fac = &self.factors[s.factor];
        let local = fac.group.word_of(&s.coords);
        Word::from_letters(local.letters().iter().map(|l| Letter::new(fac.gens[l.gen], l.inv)))
    }
}

/// A confluent, shortlex-reducing rewriting system. Free cancellation is
/// always applied in addition to the supplied rules.
#[derive(Clone, Debug)]
pub struct RewritingOracle {
    gen_count: usize,
    rules: Vec<(Word, Word)>,
    /// Set when a critical pair failed to resolve at construction.
    non_confluent: Option<String>,
}

impl RewritingOracle {
    pub fn new(gen_count: usize, rules: Vec<(Word, Word)>) -> Result<Self> {
        for (l, r) in &rules {
            if l.max_generator().is_some_and(|g| g >= gen_count)
                || r.max_generator().is_some_and(|g| g >= gen_count)
            {
                return Err(Error::validation("rewriting rule uses an unknown generator"));
            }
            if r >= l {
                return Err(Error::validation(format!(
                    "rule {l} -> {r} is not shortlex-decreasing"
                )));
            }
        }
        let mut o = RewritingOracle { gen_count, rules, non_confluent: None };
        o.non_confluent = o.find_unresolved_critical_pair();
        Ok(o)
    }

    pub fn is_confluent(&self) -> bool {
        self.non_confluent.is_none()
    }

    fn all_rules(&self) -> Vec<(Word, Word)> {
        let mut all = self.rules.clone();
        for g in 0..self.gen_count {
            for inv in [false, true] {
                let l = Letter::new(g, inv);
                all.push((Word(vec![l, l.inverse()]), Word::empty()));
            }
        }
        all
    }

    fn find_unresolved_critical_pair(&self) -> Option<String> {
        let all = self.all_rules();
        for (l1, r1) in &all {
            for (l2, r2) in &all {
                let a = l1.letters();
                let b = l2.letters();
                // suffix of l1 overlapping a prefix of l2
                for k in 1..a.len().min(b.len()) {
                    if a[a.len() - k..] == b[..k] {
                        let overlap = Word(a.iter().chain(&b[k..]).copied().collect());
                        let left = r1.concat(&Word(b[k..].to_vec()));
                        let right = Word(a[..a.len() - k].to_vec()).concat(r2);
                        if self.reduce_word(&left) != self.reduce_word(&right) {
                            return Some(format!("overlap {overlap} does not resolve"));
                        }
                    }
                }
                // l2 a proper factor of l1
                if b.len() < a.len() {
                    for s in 0..=a.len() - b.len() {
                        if a[s..s + b.len()] == *b {
                            let left = r1.clone();
                            let right = Word(a[..s].to_vec())
                                .concat(r2)
                                .concat(&Word(a[s + b.len()..].to_vec()));
                            if self.reduce_word(&left) != self.reduce_word(&right) {
                                return Some(format!("inclusion in {l1} does not resolve"));
                            }
                        }
                    }
                }
            }
        }
        None
    }

    fn reduce_word(&self, w: &Word) -> Word {
        let mut cur = w.free_reduce().0;
        'again: loop {
            for (l, r) in &self.rules {
                let ll = l.len();
                if ll == 0 || ll > cur.len() {
                    continue;
                }
                if let Some(pos) = (0..=cur.len() - ll).find(|&i| cur[i..i + ll] == *l.letters()) {
                    let mut next = cur[..pos].to_vec();
                    next.extend_from_slice(r.letters());
                    next.extend_from_slice(&cur[pos + ll..]);
                    cur = Word(next).free_reduce().0;
                    continue 'again;
                }
            }
            return Word(cur);
        }
    }

    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        if let Some(why) = &self.non_confluent {
            return Err(Error::Undecided(format!("rewriting system is not confluent: {why}")));
        }
        if w.max_generator().is_some_and(|g| g >= self.gen_count) {
            return Err(Error::validation("word uses an unknown generator"));
        }
        Ok(self.reduce_word(w))
    }
}

/// The subgroup generated by words of a parent oracle; elements are the
/// parent's canonical keys.
#[derive(Clone, Debug)]
pub struct SubgroupOracle {
    pub parent: Arc<WordProblemOracle>,
    pub images: Vec<Word>,
}

#[derive(Clone, Debug)]
pub enum WordProblemOracle {
    FreeProduct(FreeProductOracle),
    Rewriting(RewritingOracle),
    Subgroup(SubgroupOracle),
}

impl WordProblemOracle {
    pub fn kind(&self) -> OracleKind {
        match self {
            WordProblemOracle::FreeProduct(f) => f.kind(),
            WordProblemOracle::Rewriting(_) => OracleKind::RewritingSystem,
            WordProblemOracle::Subgroup(s) => s.parent.kind(),
        }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            WordProblemOracle::FreeProduct(f) => f.gen_count,
            WordProblemOracle::Rewriting(r) => r.gen_count,
            WordProblemOracle::Subgroup(s) => s.images.len(),
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            WordProblemOracle::FreeProduct(_) => Element::Syllables(Vec::new()),
            WordProblemOracle::Rewriting(_) => Element::Reduced(Word::empty()),
            WordProblemOracle::Subgroup(s) => s.parent.identity(),
        }
    }

    pub fn normalize(&self, w: &Word) -> Result<Element> {
        match self {
            WordProblemOracle::FreeProduct(f) => Ok(Element::Syllables(f.normal_form(w)?)),
            WordProblemOracle::Rewriting(r) => Ok(Element::Reduced(r.normal_form(w)?)),
            WordProblemOracle::Subgroup(s) => {
                if w.max_generator().is_some_and(|g| g >= s.images.len()) {
                    return Err(Error::validation("word uses an unknown generator"));
                }
                s.parent.normalize(&w.substitute(&s.images))
            }
        }
    }

    /// A word in the parent-most generators representing `e`.
    pub fn root_word(&self, e: &Element) -> Result<Word> {
        match (self, e) {
            (WordProblemOracle::FreeProduct(f), Element::Syllables(s)) => {
                Ok(s.iter().fold(Word::empty(), |w, syl| w.concat(&f.syllable_word(syl))))
            }
            (WordProblemOracle::Rewriting(_), Element::Reduced(w)) => Ok(w.clone()),
            (WordProblemOracle::Subgroup(s), _) => s.parent.root_word(e),
            _ => Err(Error::validation("element does not belong to this oracle")),
        }
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        match (self, a, b) {
            (WordProblemOracle::FreeProduct(f), Element::Syllables(x), Element::Syllables(y)) => {
                Ok(Element::Syllables(f.mul(x, y)?))
            }
            (WordProblemOracle::Rewriting(r), Element::Reduced(x), Element::Reduced(y)) => {
                Ok(Element::Reduced(r.normal_form(&x.concat(y))?))
            }
            (WordProblemOracle::Subgroup(s), _, _) => s.parent.mul(a, b),
            _ => Err(Error::validation("element does not belong to this oracle")),
        }
    }

    pub fn inverse(&self, a: &Element) -> Result<Element> {
        match (self, a) {
            (WordProblemOracle::FreeProduct(f), Element::Syllables(x)) => {
                Ok(Element::Syllables(f.inverse(x)))
            }
            (WordProblemOracle::Rewriting(r), Element::Reduced(x)) => {
                Ok(Element::Reduced(r.normal_form(&x.inverse())?))
            }
            (WordProblemOracle::Subgroup(s), _) => s.parent.inverse(a),
            _ => Err(Error::validation("element does not belong to this oracle")),
        }
    }

    /// `a * w` for a word in this oracle's generators.
    pub fn mul_word(&self, a: &Element, w: &Word) -> Result<Element> {
        match (self, a) {
            (WordProblemOracle::FreeProduct(f), Element::Syllables(x)) => {
                let mut out = x.clone();
                for &l in w.letters() {
                    f.push_letter(&mut out, l)?;
                }
                Ok(Element::Syllables(out))
            }
            _ => {
                let b = self.normalize(w)?;
                self.mul(a, &b)
            }
        }
    }

    pub fn mul_letter(&self, a: &Element, l: Letter) -> Result<Element> {
        self.mul_word(a, &Word(vec![l]))
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(self.normalize(w)? == self.identity())
    }

    pub fn equal(&self, u: &Word, v: &Word) -> Result<bool> {
        Ok(self.normalize(u)? == self.normalize(v)?)
    }

    /// `g a g^-1`.
    pub fn conjugate(&self, g: &Element, a: &Element) -> Result<Element> {
        let ga = self.mul(g, a)?;
        self.mul(&ga, &self.inverse(g)?)
    }

    /// Human-readable rendering with the root generator names.
    pub fn render(&self, e: &Element, root_names: &[String]) -> String {
        match self.root_word(e) {
            Ok(w) => w.render(root_names),
            Err(_) => format!("{e:?}"),
        }
    }

    pub fn root(&self) -> &WordProblemOracle {
        match self {
            WordProblemOracle::Subgroup(s) => s.parent.root(),
            o => o,
        }
    }

    pub fn as_free_product(&self) -> Option<&FreeProductOracle> {
        match self {
            WordProblemOracle::FreeProduct(f) => Some(f),
            _ => None,
        }
    }
}

/// Deduces an oracle from the presentation alone.
pub fn infer_oracle(p: &FinitePresentation) -> Result<WordProblemOracle> {
    FreeProductOracle::recognize(p)
        .map(WordProblemOracle::FreeProduct)
        .ok_or_else(|| {
            Error::Undecided(
                "presentation is not a visible free product of abelian groups; supply a confluent rewriting system"
                    .into(),
            )
        })
}
