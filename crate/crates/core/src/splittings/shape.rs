//! Syntactic recognition of free products, amalgams and HNN extensions.

use super::{Colour, Edge, GraphOfGroups, VertexGroup};
use crate::presentations::{FinitePresentation, Letter, Word};

const MAX_PARTITION_GENERATORS: usize = 12;

/// The sub-presentation on `gens` with the given relators, plus its
/// embedding into `p`.
fn block(p: &FinitePresentation, gens: &[usize], relators: &[Word]) -> Option<VertexGroup> {
    let local = |w: &Word| localize(w, gens);
    let names: Vec<String> = gens.iter().map(|&g| p.names()[g].clone()).collect();
    let rels: Vec<Word> = relators.iter().map(local).collect::<Option<_>>()?;
    Some(VertexGroup {
        presentation: FinitePresentation::new(names, rels).ok()?,
        colour: Colour::Uncoloured,
        embedding: gens.iter().map(|&g| Word::power(g, 1)).collect(),
    })
}

fn localize(w: &Word, gens: &[usize]) -> Option<Word> {
    w.letters()
        .iter()
        .map(|l| gens.iter().position(|&g| g == l.gen).map(|i| Letter::new(i, l.inv)))
        .collect::<Option<Vec<_>>>()
        .map(Word)
}

fn components(p: &FinitePresentation) -> Vec<Vec<usize>> {
    let n = p.generator_count();
    let mut comp: Vec<usize> = (0..n).collect();
    for r in p.relators() {
        let gens: Vec<usize> = r.letters().iter().map(|l| l.gen).collect();
        if let Some(&first) = gens.first() {
            for &g in &gens[1..] {
                let (a, b) = (comp[first], comp[g]);
                if a != b {
                    let (lo, hi) = (a.min(b), a.max(b));
                    for c in comp.iter_mut() {
                        if *c == hi {
                            *c = lo;
                        }
                    }
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for g in 0..n {
        match seen.iter().position(|&c| c == comp[g]) {
            Some(i) => out[i].push(g),
            None => {
                seen.push(comp[g]);
                out.push(vec![g]);
            }
        }
    }
    out
}

fn two_vertex(p: &FinitePresentation, a: &[usize], b: &[usize], ids: Vec<(Word, Word)>) -> Option<GraphOfGroups> {
    let inside = |gens: &[usize]| -> Vec<Word> { p.relators().iter().filter(|r| r.uses_only(gens)).cloned().collect() };
    let va = block(p, a, &inside(a))?;
    let vb = block(p, b, &inside(b))?;
    let edge = Edge {
        source: 0,
        target: 1,
        generators: ids.iter().map(|(u, _)| u.clone()).collect(),
        source_images: ids.iter().map(|(u, _)| localize(u, a)).collect::<Option<_>>()?,
        target_images: ids.iter().map(|(_, v)| localize(v, b)).collect::<Option<_>>()?,
        stable_letter: None,
    };
    Some(GraphOfGroups { ambient_names: p.names().to_vec(), vertices: vec![va, vb], edges: vec![edge] })
}

/// Splits a cyclic word into maximal runs by the predicate; returns the runs
/// starting at a run boundary.
fn cyclic_runs(w: &Word, side: impl Fn(Letter) -> bool) -> Vec<(bool, Word)> {
    let w = w.cyclic_reduce();
    let ls = w.letters();
    let n = ls.len();
    let Some(start) = (0..n).find(|&i| side(ls[i]) != side(ls[(i + n - 1) % n])) else {
        return vec![(ls.first().is_some_and(|&l| side(l)), w.clone())];
    };
    let mut runs: Vec<(bool, Word)> = Vec::new();
    for k in 0..n {
        let l = ls[(start + k) % n];
        match runs.last_mut() {
            Some((s, run)) if *s == side(l) => run.push(l),
            _ => runs.push((side(l), Word(vec![l]))),
        }
    }
    runs
}

fn oriented(u: Word, v: Word) -> (Word, Word) {
    if u.letters().first().is_some_and(|l| l.inv) {
        (u.inverse(), v.inverse())
    } else {
        (u, v)
    }
}

fn amalgam(p: &FinitePresentation) -> Option<GraphOfGroups> {
    let n = p.generator_count();
    if !(2..=MAX_PARTITION_GENERATORS).contains(&n) {
        return None;
    }
    'masks: for mask in 1u32..(1 << (n - 1)) {
        // generator 0 always in block A; bits mark block B
        let in_b = |g: usize| g > 0 && (mask >> (g - 1)) & 1 == 1;
        let a: Vec<usize> = (0..n).filter(|&g| !in_b(g)).collect();
        let b: Vec<usize> = (0..n).filter(|&g| in_b(g)).collect();
        let mut ids = Vec::new();
        for r in p.relators() {
            if r.uses_only(&a) || r.uses_only(&b) {
                continue;
            }
            let runs = cyclic_runs(r, |l| in_b(l.gen));
            if runs.len() != 2 {
                continue 'masks;
            }
            let (u, v) = if runs[0].0 { (&runs[1].1, &runs[0].1) } else { (&runs[0].1, &runs[1].1) };
            // u v = 1, so u = v^-1
            ids.push(oriented(u.clone(), v.inverse()));
        }
        if !ids.is_empty() {
            return two_vertex(p, &a, &b, ids);
        }
    }
    None
}

fn hnn(p: &FinitePresentation) -> Option<GraphOfGroups> {
    let n = p.generator_count();
    if n < 2 {
        return None;
    }
    't: for t in (0..n).rev() {
        let base: Vec<usize> = (0..n).filter(|&g| g != t).collect();
        let mut ids = Vec::new();
        let mut base_rels = Vec::new();
        for r in p.relators() {
            if r.uses_only(&base) {
                base_rels.push(r.clone());
                continue;
            }
            let w = r.cyclic_reduce();
            let ls = w.letters();
            let pos: Vec<usize> = (0..ls.len()).filter(|&i| ls[i].gen == t).collect();
            if pos.len() != 2 || ls[pos[0]].inv == ls[pos[1]].inv {
                continue 't;
            }
            // rotate to start at the positive stable letter: t u T v'
            let start = if ls[pos[0]].inv { pos[1] } else { pos[0] };
            let rot: Vec<Letter> = ls[start..].iter().chain(&ls[..start]).copied().collect();
            let back = rot.iter().position(|l| l.gen == t && l.inv).expect("two stable letters");
            let u = Word(rot[1..back].to_vec());
            let v = Word(rot[back + 1..].to_vec()).inverse();
            ids.push(oriented(u, v));
        }
        if ids.is_empty() {
            continue;
        }
        let vertex = block(p, &base, &base_rels)?;
        let edge = Edge {
            source: 0,
            target: 0,
            generators: ids.iter().map(|(u, _)| u.clone()).collect(),
            source_images: ids.iter().map(|(u, _)| localize(u, &base)).collect::<Option<_>>()?,
            target_images: ids.iter().map(|(_, v)| localize(v, &base)).collect::<Option<_>>()?,
            stable_letter: Some(Word::power(t, 1)),
        };
        return Some(GraphOfGroups { ambient_names: p.names().to_vec(), vertices: vec![vertex], edges: vec![edge] });
    }
    None
}

/// A one-edge graph of groups read off the presentation: a free product
/// when the relators separate, then an amalgam, then an HNN extension.
pub fn recognize_splitting_shape(p: &FinitePresentation) -> Option<GraphOfGroups> {
    let comps = components(p);
    if comps.len() >= 2 {
        let a = comps[0].clone();
        let b: Vec<usize> = comps[1..].iter().flatten().copied().collect::<Vec<_>>();
        let mut b = b;
        b.sort_unstable();
        return two_vertex(p, &a, &b, Vec::new());
    }
    amalgam(p).or_else(|| hnn(p))
}
