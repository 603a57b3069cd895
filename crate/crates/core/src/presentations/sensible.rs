//! Sensible generating sets of abelian groups and the word metric they induce.
//!
//! With `A = A1 ⊔ A2`, `A1` a free basis and `A2` a minimal generating set of
//! the torsion subgroup, the group splits internally as `<A1> x <A2>` and the
//! word metric is `|x|_1 + |t|_{A2}` for `x` the `A1`-coordinates and `t` the
//! torsion part.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::abelian::{AbelianCoords, AbelianGroup};
use super::snf::{inverse_unimodular, smith};
use super::word::{Letter, Word};
use crate::error::{Error, Result};

/// Words in the parabolic's own generators (local indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensibleGeneratingSet {
    pub a1: Vec<Word>,
    pub a2: Vec<Word>,
}

/// True iff `a1` is a basis of a free complement and `a2` is a minimal
/// generating set of the torsion subgroup of `group`.
pub fn is_sensible(set: &SensibleGeneratingSet, group: &AbelianGroup) -> bool {
    let coords = |ws: &[Word]| -> Option<Vec<AbelianCoords>> {
        ws.iter().map(|w| group.coords_of(w).ok()).collect()
    };
    let (Some(c1), Some(c2)) = (coords(&set.a1), coords(&set.a2)) else {
        return false;
    };
    for (i, x) in c1.iter().chain(&c2).enumerate() {
        if c1.iter().chain(&c2).skip(i + 1).any(|y| y == x) {
            return false;
        }
    }
    let t = group.torsion_orders().len();
    // A1: free parts form a unimodular square matrix
    if c1.len() != group.free_rank() {
        return false;
    }
    if !c1.is_empty() {
        let m: Vec<Vec<BigInt>> = c1.iter().map(|c| c.0[t..].iter().map(|&x| x.into()).collect()).collect();
        let s = smith(&m, group.free_rank());
        if !s.invariants.iter().all(|d| d.is_one()) {
            return false;
        }
    }
    // A2: torsion elements generating the whole torsion subgroup, minimally
    if c2.iter().any(|c| c.0[t..].iter().any(|&x| x != 0)) {
        return false;
    }
    if c2.len() != t {
        return false;
    }
    if t > 0 {
        let mut m: Vec<Vec<BigInt>> = c2.iter().map(|c| c.0[..t].iter().map(|&x| x.into()).collect()).collect();
        for (i, &d) in group.torsion_orders().iter().enumerate() {
            let mut row = vec![BigInt::zero(); t];
            row[i] = d.into();
            m.push(row);
        }
        let s = smith(&m, t);
        if !s.invariants.iter().all(|d| d.is_one()) {
            return false;
        }
    }
    true
}

/// The finite part `<A2>`, enumerated with its word metric.
#[derive(Clone, Debug)]
pub struct TorsionTable {
    elems: Vec<AbelianCoords>,
    index: HashMap<AbelianCoords, u32>,
    len: Vec<u32>,
    neg: Vec<u32>,
    add: Vec<Vec<u32>>,
    /// Shortest path from zero as a sequence of signed generator moves
    /// `2*i` (`+a2_i`) or `2*i+1` (`-a2_i`).
    path: Vec<Vec<u32>>,
    steps: Vec<Vec<u32>>,
    /// Orders of the generators when `A2` is a basis of a product of cyclic
    /// groups, with each element's exponent tuple.
    cyclic: Option<(Vec<i64>, Vec<Vec<i64>>)>,
}

impl TorsionTable {
    fn build(group: &AbelianGroup, gens: &[AbelianCoords]) -> Result<Self> {
        let limit: u128 = group.torsion_orders().iter().map(|&d| d as u128).product();
        if limit > 1 << 20 {
            return Err(Error::Unsupported("torsion subgroup too large to tabulate".into()));
        }
        let mut elems = vec![group.zero()];
        let mut index: HashMap<AbelianCoords, u32> = HashMap::from([(group.zero(), 0)]);
        let mut path: Vec<Vec<u32>> = vec![Vec::new()];
        let mut head = 0;
        while head < elems.len() {
            let cur = elems[head].clone();
            for (i, g) in gens.iter().enumerate() {
                for sign in [1i64, -1] {
                    let next = group.add_scaled(&cur, g, sign)?;
                    if !index.contains_key(&next) {
                        index.insert(next.clone(), elems.len() as u32);
                        let mut p = path[head].clone();
                        p.push(2 * i as u32 + u32::from(sign < 0));
                        path.push(p);
                        elems.push(next);
                        if elems.len() as u128 > limit {
                            return Err(Error::validation("torsion generators are not torsion"));
                        }
                    }
                }
            }
            head += 1;
        }
        let n = elems.len();
        let len = path.iter().map(|p| p.len() as u32).collect();
        let lookup = |c: &AbelianCoords| -> Result<u32> {
            index.get(c).copied().ok_or_else(|| Error::validation("torsion table not closed"))
        };
        let mut add = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in 0..n {
                add[i][j] = lookup(&group.add(&elems[i], &elems[j])?)?;
            }
        }
        let neg = elems.iter().map(|e| lookup(&group.neg(e))).collect::<Result<Vec<_>>>()?;
        let mut steps = vec![Vec::with_capacity(2 * gens.len()); n];
        for (i, e) in elems.iter().enumerate() {
            for g in gens {
                steps[i].push(lookup(&group.add_scaled(e, g, 1)?)?);
                steps[i].push(lookup(&group.add_scaled(e, g, -1)?)?);
            }
        }
        // cyclic decomposition when the generator orders multiply to |T|
        let mut orders = Vec::new();
        for i in 0..gens.len() {
            let mut k = 1i64;
            let mut cur = steps[0][2 * i];
            while cur != 0 {
                cur = steps[cur as usize][2 * i];
                k += 1;
            }
            orders.push(k);
        }
        let cyclic = if orders.iter().map(|&o| o as u128).product::<u128>() == n as u128 {
            let mut tuples = vec![Vec::new(); n];
            let mut seen = vec![false; n];
            let mut exps = vec![0i64; gens.len()];
            'outer: loop {
                let mut e = 0u32;
                for (i, &x) in exps.iter().enumerate() {
                    for _ in 0..x {
                        e = steps[e as usize][2 * i];
                    }
                }
                if seen[e as usize] {
                    break 'outer;
                }
                seen[e as usize] = true;
                tuples[e as usize] = exps.clone();
                let mut i = 0;
                loop {
                    if i == exps.len() {
                        break 'outer;
                    }
                    exps[i] += 1;
                    if exps[i] < orders[i] {
                        break;
                    }
                    exps[i] = 0;
                    i += 1;
                }
            }
            seen.iter().all(|&s| s).then_some((orders, tuples))
        } else {
            None
        };
        Ok(TorsionTable { elems, index, len, neg, add, path, steps, cyclic })
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn norm(&self, t: u32) -> u32 {
        self.len[t as usize]
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize][b as usize]
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn dist(&self, a: u32, b: u32) -> u32 {
        self.norm(self.sub(b, a))
    }

    /// Result of one signed generator move (`2*i` or `2*i+1`).
    pub fn step(&self, t: u32, mv: u32) -> u32 {
        self.steps[t as usize][mv as usize]
    }

    pub fn move_count(&self) -> usize {
        self.steps.first().map_or(0, |s| s.len())
    }

    /// Moves of a shortest path from `a` to `b`.
    pub fn path_moves(&self, a: u32, b: u32) -> &[u32] {
        &self.path[self.sub(b, a) as usize]
    }

    pub fn lookup(&self, c: &AbelianCoords) -> Option<u32> {
        self.index.get(c).copied()
    }

    pub fn coords(&self, t: u32) -> &AbelianCoords {
        &self.elems[t as usize]
    }

    pub fn cyclic(&self) -> Option<(&[i64], &[Vec<i64>])> {
        self.cyclic.as_ref().map(|(o, t)| (o.as_slice(), t.as_slice()))
    }

    /// Element with the given exponent tuple (cyclic case).
    pub fn from_tuple(&self, tuple: &[i64]) -> u32 {
        let mut e = 0u32;
        for (i, &x) in tuple.iter().enumerate() {
            let orders = &self.cyclic.as_ref().expect("cyclic decomposition").0;
            for _ in 0..x.rem_euclid(orders[i]) {
                e = self.step(e, 2 * i as u32);
            }
        }
        e
    }
}

/// A point of `Z^rank x T` in sensible coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub free: Vec<i64>,
    pub tors: u32,
}

impl LatticePoint {
    pub fn new(free: Vec<i64>, tors: u32) -> Self {
        LatticePoint { free, tors }
    }
}

/// The abelian group `<A1> x <A2>` with its sensible word metric.
#[derive(Clone, Debug)]
pub struct SensibleLattice {
    rank: usize,
    torsion: TorsionTable,
    a1: Vec<Word>,
    a2: Vec<Word>,
    group: AbelianGroup,
    a1_coords: Vec<AbelianCoords>,
    /// Inverse of the free-part matrix of `A1`.
    a1_inv: Vec<Vec<i64>>,
}

impl SensibleLattice {
    pub fn new(group: &AbelianGroup, set: &SensibleGeneratingSet) -> Result<Self> {
        if !is_sensible(set, group) {
            return Err(Error::validation("generating set is not sensible"));
        }
        let c1 = set.a1.iter().map(|w| group.coords_of(w)).collect::<Result<Vec<_>>>()?;
        let c2 = set.a2.iter().map(|w| group.coords_of(w)).collect::<Result<Vec<_>>>()?;
        let torsion = TorsionTable::build(group, &c2)?;
        let t = group.torsion_orders().len();
        let free: Vec<Vec<BigInt>> = c1.iter().map(|c| c.0[t..].iter().map(|&x| x.into()).collect()).collect();
        let a1_inv = inverse_unimodular(&free)
            .ok_or_else(|| Error::validation("free basis is not unimodular"))?
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().ok_or_else(|| Error::Unsupported("basis change overflow".into()))).collect())
            .collect::<Result<Vec<_>>>()?;
        Ok(SensibleLattice {
            rank: set.a1.len(),
            torsion,
            a1: set.a1.clone(),
            a2: set.a2.clone(),
            group: group.clone(),
            a1_coords: c1,
            a1_inv,
        })
    }

    /// `Z^rank x Z/orders[0] x ...` with the standard generators.
    pub fn standard(rank: usize, orders: &[i64]) -> Result<Self> {
        let n = rank + orders.len();
        let rels: Vec<Vec<i64>> = orders
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut r = vec![0; n];
                r[rank + i] = d;
                r
            })
            .collect();
        let group = AbelianGroup::from_relations(n, &rels)?;
        let set = SensibleGeneratingSet {
            a1: (0..rank).map(|g| Word(vec![Letter::pos(g)])).collect(),
            a2: (rank..n).map(|g| Word(vec![Letter::pos(g)])).collect(),
        };
        Self::new(&group, &set)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &TorsionTable {
        &self.torsion
    }

    pub fn is_virtually_cyclic(&self) -> bool {
        self.rank <= 1
    }

    pub fn zero(&self) -> LatticePoint {
        LatticePoint::new(vec![0; self.rank], 0)
    }

    pub fn norm(&self, p: &LatticePoint) -> u64 {
        p.free.iter().map(|x| x.unsigned_abs()).sum::<u64>() + u64::from(self.torsion.norm(p.tors))
    }

    pub fn sub(&self, a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
        LatticePoint::new(
            a.free.iter().zip(&b.free).map(|(x, y)| x - y).collect(),
            self.torsion.sub(a.tors, b.tors),
        )
    }

    pub fn add(&self, a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
        LatticePoint::new(
            a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            self.torsion.add(a.tors, b.tors),
        )
    }

    pub fn dist(&self, a: &LatticePoint, b: &LatticePoint) -> u64 {
        self.norm(&self.sub(b, a))
    }

    /// The generator moves: `±e_i` then the torsion moves.
    pub fn unit_moves(&self, p: &LatticePoint) -> Vec<LatticePoint> {
        let mut out = Vec::with_capacity(2 * self.rank + self.torsion.move_count());
        for i in 0..self.rank {
            for d in [1, -1] {
                let mut q = p.clone();
                q.free[i] += d;
                out.push(q);
            }
        }
        for mv in 0..self.torsion.move_count() as u32 {
            out.push(LatticePoint::new(p.free.clone(), self.torsion.step(p.tors, mv)));
        }
        out.sort();
        out.dedup();
        out.retain(|q| q != p);
        out
    }

    /// Canonical geodesic: free coordinates in index order, then the torsion
    /// part along its shortest-path tree.
    pub fn geodesic(&self, a: &LatticePoint, b: &LatticePoint) -> Vec<LatticePoint> {
        let mut cur = a.clone();
        let mut out = vec![cur.clone()];
        for i in 0..self.rank {
            while cur.free[i] != b.free[i] {
                cur.free[i] += (b.free[i] - cur.free[i]).signum();
                out.push(cur.clone());
            }
        }
        for &mv in self.torsion.path_moves(a.tors, b.tors) {
            cur.tors = self.torsion.step(cur.tors, mv);
            out.push(cur.clone());
        }
        out
    }

    /// All points at distance `1..=radius` from `p`, in sorted order.
    pub fn sphere_ball(&self, p: &LatticePoint, radius: u64) -> Vec<LatticePoint> {
        let mut out = Vec::new();
        for t in 0..self.torsion.order() as u32 {
            let tl = u64::from(self.torsion.norm(t));
            if tl > radius {
                continue;
            }
            let budget = radius - tl;
            let mut v = vec![0i64; self.rank];
            l1_ball(&mut v, 0, budget as i64, &mut |off| {
                let q = LatticePoint::new(
                    p.free.iter().zip(off).map(|(x, d)| x + d).collect(),
                    self.torsion.add(p.tors, t),
                );
                if q != *p {
                    out.push(q);
                }
            });
        }
        out.sort();
        out
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Sensible coordinates of a group element given in canonical coordinates.
    pub fn locate(&self, c: &AbelianCoords) -> Result<LatticePoint> {
        let t = self.group.torsion_orders().len();
        let f = &c.0[t..];
        let mut x = vec![0i64; self.rank];
        for (xi, col) in x.iter_mut().zip(0..self.rank) {
            *xi = f.iter().zip(&self.a1_inv).map(|(a, row)| a * row[col]).sum();
        }
        let mut rest = c.clone();
        for (xi, ci) in x.iter().zip(&self.a1_coords) {
            rest = self.group.add_scaled(&rest, ci, -xi)?;
        }
        let tors = self
            .torsion
            .lookup(&rest)
            .ok_or_else(|| Error::validation("element outside the sensible lattice"))?;
        Ok(LatticePoint::new(x, tors))
    }

    /// Canonical coordinates of a lattice point.
    pub fn coords(&self, p: &LatticePoint) -> Result<AbelianCoords> {
        let mut c = self.torsion.coords(p.tors).clone();
        for (xi, ci) in p.free.iter().zip(&self.a1_coords) {
            c = self.group.add_scaled(&c, ci, *xi)?;
        }
        Ok(c)
    }

    /// Word in the parabolic's local generators.
    pub fn word(&self, p: &LatticePoint) -> Word {
        let mut w = Word::empty();
        for (i, &x) in p.free.iter().enumerate() {
            let base = if x < 0 { self.a1[i].inverse() } else { self.a1[i].clone() };
            for _ in 0..x.unsigned_abs() {
                w = w.concat(&base);
            }
        }
        for &mv in self.torsion.path_moves(0, p.tors) {
            let g = &self.a2[(mv / 2) as usize];
            w = w.concat(&if mv % 2 == 1 { g.inverse() } else { g.clone() });
        }
        w
    }
}

fn l1_ball(v: &mut Vec<i64>, i: usize, budget: i64, f: &mut impl FnMut(&[i64])) {
    if i == v.len() {
        f(v);
        return;
    }
    for x in -budget..=budget {
        v[i] = x;
        l1_ball(v, i + 1, budget - x.abs(), f);
    }
    v[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_bases() {
        let g = AbelianGroup::free(2);
        let w = |v: &[(usize, bool)]| Word::from_letters(v.iter().map(|&(g, i)| Letter::new(g, i)));
        let std = SensibleGeneratingSet { a1: vec![w(&[(0, false)]), w(&[(1, false)])], a2: vec![] };
        assert!(is_sensible(&std, &g));
        let skew = SensibleGeneratingSet {
            a1: vec![w(&[(0, false)]), w(&[(0, false), (1, false)])],
            a2: vec![],
        };
        assert!(is_sensible(&skew, &g));
        let bad = SensibleGeneratingSet { a1: vec![w(&[(0, false), (0, false)]), w(&[(1, false)])], a2: vec![] };
        assert!(!is_sensible(&bad, &g));
    }

    #[test]
    fn duplicated_torsion_generator_is_not_minimal() {
        // Z x Z/2 on generators a, t with t^2
        let g = AbelianGroup::from_relations(2, &[vec![0, 2]]).unwrap();
        let a = Word(vec![Letter::pos(0)]);
        let t = Word(vec![Letter::pos(1)]);
        assert!(is_sensible(&SensibleGeneratingSet { a1: vec![a.clone()], a2: vec![t.clone()] }, &g));
        assert!(!is_sensible(&SensibleGeneratingSet { a1: vec![a], a2: vec![t.clone(), t] }, &g));
    }

    #[test]
    fn lattice_metric() {
        let l = SensibleLattice::standard(1, &[4]).unwrap();
        let p = LatticePoint::new(vec![2], l.torsion().from_tuple(&[3]));
        assert_eq!(l.norm(&p), 3);
        assert_eq!(l.sphere_ball(&l.zero(), 1).len(), 4);
        let geo = l.geodesic(&l.zero(), &p);
        assert_eq!(geo.len() as u64, l.norm(&p) + 1);
        assert!(geo.windows(2).all(|w| l.dist(&w[0], &w[1]) == 1));
    }

    #[test]
    fn locate_round_trips() {
        // Z^2 x Z/2 x Z/6 presented on a, b, s, t
        let g = AbelianGroup::from_relations(4, &[vec![0, 0, 2, 0], vec![0, 0, 0, 6]]).unwrap();
        let w = |v: &[usize]| Word::from_letters(v.iter().map(|&i| Letter::pos(i)));
        let set = SensibleGeneratingSet { a1: vec![w(&[0]), w(&[0, 1])], a2: vec![w(&[2]), w(&[3])] };
        let l = SensibleLattice::new(&g, &set).unwrap();
        for p in l.sphere_ball(&l.zero(), 3) {
            let c = l.coords(&p).unwrap();
            assert_eq!(l.locate(&c).unwrap(), p);
            assert_eq!(g.coords_of(&l.word(&p)).unwrap(), c);
        }
    }

    #[test]
    fn ball_counts_z2() {
        let l = SensibleLattice::standard(2, &[]).unwrap();
        assert_eq!(l.sphere_ball(&l.zero(), 2).len(), 12);
    }
}
