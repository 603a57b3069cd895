//! Cayley graphs of abelian groups with sensible generators, optionally
//! restricted to a box in the free coordinates.

use std::sync::Arc;

use super::BaseGraph;
use crate::error::{Error, Result};
use crate::presentations::{LatticePoint, SensibleLattice};

#[derive(Clone, Debug)]
pub struct LatticeGraph {
    lattice: Arc<SensibleLattice>,
    /// Inclusive bounds per free coordinate. A box is geodesically convex
    /// for the sensible metric, so the induced metric is the restriction.
    bounds: Option<Vec<(i64, i64)>>,
}

impl LatticeGraph {
    pub fn new(lattice: Arc<SensibleLattice>) -> Self {
        LatticeGraph { lattice, bounds: None }
    }

    pub fn boxed(lattice: Arc<SensibleLattice>, bounds: Vec<(i64, i64)>) -> Result<Self> {
        if bounds.len() != lattice.rank() || bounds.iter().any(|(lo, hi)| lo > hi) {
            return Err(Error::validation("box bounds must match the free rank"));
        }
        Ok(LatticeGraph { lattice, bounds: Some(bounds) })
    }

    /// `Z^rank x Z/orders[0] x ...`, unbounded.
    pub fn standard(rank: usize, orders: &[i64]) -> Result<Self> {
        Ok(Self::new(Arc::new(SensibleLattice::standard(rank, orders)?)))
    }

    /// The path graph on `lo..=hi`.
    pub fn segment(lo: i64, hi: i64) -> Result<Self> {
        Self::boxed(Arc::new(SensibleLattice::standard(1, &[])?), vec![(lo, hi)])
    }

    /// The grid `[lo, hi]^rank`.
    pub fn grid(rank: usize, lo: i64, hi: i64) -> Result<Self> {
        Self::boxed(Arc::new(SensibleLattice::standard(rank, &[])?), vec![(lo, hi); rank])
    }

    pub fn lattice(&self) -> &SensibleLattice {
        &self.lattice
    }

    pub fn bounds(&self) -> Option<&[(i64, i64)]> {
        self.bounds.as_deref()
    }

    /// Every vertex, for bounded graphs.
    pub fn vertices(&self) -> Option<Vec<LatticePoint>> {
        let bounds = self.bounds.as_ref()?;
        let mut out = Vec::new();
        let mut cur = bounds.iter().map(|b| b.0).collect::<Vec<_>>();
        loop {
            for t in 0..self.lattice.torsion().order() as u32 {
                out.push(LatticePoint::new(cur.clone(), t));
            }
            let mut i = 0;
            loop {
                if i == cur.len() {
                    out.sort();
                    return Some(out);
                }
                if cur[i] < bounds[i].1 {
                    cur[i] += 1;
                    break;
                }
                cur[i] = bounds[i].0;
                i += 1;
            }
        }
    }

    fn check(&self, v: &LatticePoint) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::OutOfRegion(format!("{:?} outside the base region", v.free)))
        }
    }
}

fn clipped_l1(
    center: &[i64],
    bounds: Option<&[(i64, i64)]>,
    cur: &mut Vec<i64>,
    budget: i64,
    f: &mut impl FnMut(&[i64]),
) {
    let i = cur.len();
    if i == center.len() {
        f(cur);
        return;
    }
    let (mut lo, mut hi) = (center[i] - budget, center[i] + budget);
    if let Some(b) = bounds {
        lo = lo.max(b[i].0);
        hi = hi.min(b[i].1);
    }
    for x in lo..=hi {
        cur.push(x);
        clipped_l1(center, bounds, cur, budget - (x - center[i]).abs(), f);
        cur.pop();
    }
}

impl BaseGraph for LatticeGraph {
    type V = LatticePoint;

    fn contains(&self, v: &LatticePoint) -> bool {
        v.free.len() == self.lattice.rank()
            && (v.tors as usize) < self.lattice.torsion().order()
            && self
                .bounds
                .as_ref()
                .is_none_or(|b| v.free.iter().zip(b).all(|(x, (lo, hi))| lo <= x && x <= hi))
    }

    fn dist(&self, a: &LatticePoint, b: &LatticePoint) -> Result<u64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.lattice.dist(a, b))
    }

    fn within(&self, v: &LatticePoint, radius: u64) -> Result<Vec<LatticePoint>> {
        self.check(v)?;
        let t = self.lattice.torsion();
        let mut out = Vec::new();
        let radius = radius.min(i64::MAX as u64 / 4);
        for s in 0..t.order() as u32 {
            let tl = u64::from(t.norm(s));
            if tl > radius {
                continue;
            }
            let tors = t.add(v.tors, s);
            let mut cur = Vec::with_capacity(v.free.len());
            clipped_l1(&v.free, self.bounds.as_deref(), &mut cur, (radius - tl) as i64, &mut |x| {
                if s != 0 || x != v.free.as_slice() {
                    out.push(LatticePoint::new(x.to_vec(), tors));
                }
            });
        }
        out.sort();
        Ok(out)
    }

    fn far_point(&self, v: &LatticePoint, d: u64) -> Result<Option<LatticePoint>> {
        self.check(v)?;
        let Ok(di) = i64::try_from(d) else { return Ok(None) };
        for i in 0..self.lattice.rank() {
            for sign in [1, -1] {
                let mut q = v.clone();
                q.free[i] = match v.free[i].checked_add(sign * di) {
                    Some(x) => x,
                    None => continue,
                };
                if self.contains(&q) {
                    return Ok(Some(q));
                }
            }
        }
        let t = self.lattice.torsion();
        Ok((0..t.order() as u32)
            .find(|&s| u64::from(t.norm(s)) == d)
            .map(|s| LatticePoint::new(v.free.clone(), t.add(v.tors, s))))
    }

    fn geodesic(&self, a: &LatticePoint, b: &LatticePoint) -> Result<Vec<LatticePoint>> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.lattice.geodesic(a, b))
    }
}
