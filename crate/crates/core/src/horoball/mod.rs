//! Combinatorial horoballs over a base graph.
//!
//! Vertices are pairs `(v, k)`. At depth `k > 0`, `(v, k)` and `(w, k)` are
//! joined when `0 < d(v, w) <= 2^k`; depth 0 carries the base edges, and
//! `(v, k)` is joined to `(v, k + 1)`.

mod lattice;
mod router;

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

pub use lattice::LatticeGraph;
pub use router::{avoid_ball_path_abelian, avoid_ball_path_search, is_avoiding_path};

use crate::error::{Error, Result};

/// Metric access to the graph a horoball is built on.
pub trait BaseGraph: Send + Sync {
    type V: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn contains(&self, v: &Self::V) -> bool;

    fn dist(&self, a: &Self::V, b: &Self::V) -> Result<u64>;

    /// `{w : 0 < d(v, w) <= radius}`, sorted.
    fn within(&self, v: &Self::V, radius: u64) -> Result<Vec<Self::V>>;

    /// A vertex at distance exactly `d` from `v`, if the graph has one.
    fn far_point(&self, v: &Self::V, d: u64) -> Result<Option<Self::V>>;

    /// A geodesic from `a` to `b`, endpoints included.
    fn geodesic(&self, a: &Self::V, b: &Self::V) -> Result<Vec<Self::V>>;
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HoroballVertex<V> {
    pub base: V,
    pub depth: u32,
}

impl<V> HoroballVertex<V> {
    pub fn new(base: V, depth: u32) -> Self {
        HoroballVertex { base, depth }
    }
}

/// `2^k`, saturating.
pub fn pow2(k: u32) -> u64 {
    if k >= 63 {
        u64::MAX
    } else {
        1 << k
    }
}

/// Horizontal cost `ceil(d / 2^l)`.
pub fn level_cost(d: u64, l: u32) -> u64 {
    if l >= 63 {
        u64::from(d > 0)
    } else {
        d.div_ceil(1 << l)
    }
}

/// Geodesic length and turning level between depths `dx`, `dy` over base
/// distance `d`. Among minimizing levels the deepest is chosen, which keeps
/// the horizontal segment at length at most 3.
pub fn best_level(dx: u32, dy: u32, d: u64) -> (u64, u32) {
    let top = dx.max(dy);
    let mut best = (u64::MAX, top);
    let mut l = top;
    loop {
        let cost = u64::from(l - dx) + u64::from(l - dy) + level_cost(d, l);
        if cost <= best.0 {
            best = (cost, l);
        }
        if level_cost(d, l) <= 1 || l >= 126 {
            return best;
        }
        l += 1;
    }
}

pub fn neighbors<G: BaseGraph>(v: &HoroballVertex<G::V>, g: &G) -> Result<Vec<HoroballVertex<G::V>>> {
    let r = if v.depth == 0 { 1 } else { pow2(v.depth) };
    let mut out: Vec<_> = g.within(&v.base, r)?.into_iter().map(|w| HoroballVertex::new(w, v.depth)).collect();
    if v.depth > 0 {
        out.push(HoroballVertex::new(v.base.clone(), v.depth - 1));
    }
    out.push(HoroballVertex::new(v.base.clone(), v.depth + 1));
    Ok(out)
}

pub fn horoball_distance<G: BaseGraph>(x: &HoroballVertex<G::V>, y: &HoroballVertex<G::V>, g: &G) -> Result<u64> {
    Ok(best_level(x.depth, y.depth, g.dist(&x.base, &y.base)?).0)
}

/// Horizontal path at depth `i`: every `2^i`-th vertex of a base geodesic.
pub fn level_interpolate<G: BaseGraph>(u: &G::V, v: &G::V, i: u32, g: &G) -> Result<Vec<HoroballVertex<G::V>>> {
    let geo = g.geodesic(u, v)?;
    let step = usize::try_from(pow2(i)).unwrap_or(usize::MAX);
    let mut out: Vec<_> = geo.iter().step_by(step.max(1)).map(|w| HoroballVertex::new(w.clone(), i)).collect();
    if out.last().map(|w| &w.base) != geo.last() {
        out.push(HoroballVertex::new(v.clone(), i));
    }
    Ok(out)
}

/// Geodesic descending from `x` to the turning level, crossing horizontally,
/// and ascending to `y`.
pub fn horoball_geodesic<G: BaseGraph>(
    x: &HoroballVertex<G::V>,
    y: &HoroballVertex<G::V>,
    g: &G,
) -> Result<Vec<HoroballVertex<G::V>>> {
    let (_, l) = best_level(x.depth, y.depth, g.dist(&x.base, &y.base)?);
    let mut path: Vec<_> = (x.depth..l).map(|k| HoroballVertex::new(x.base.clone(), k)).collect();
    path.extend(level_interpolate(&x.base, &y.base, l, g)?);
    path.extend((y.depth..l).rev().map(|k| HoroballVertex::new(y.base.clone(), k)));
    Ok(path)
}

/// True iff consecutive vertices are adjacent and the path descends, then
/// moves at most 3 steps horizontally, then ascends.
pub fn is_normal_form<G: BaseGraph>(path: &[HoroballVertex<G::V>], g: &G) -> Result<bool> {
    let mut phase = 0; // 0 descending, 1 horizontal, 2 ascending
    let mut horizontal = 0;
    for w in path.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let kind = if a.base == b.base && b.depth == a.depth + 1 {
            0
        } else if a.depth == b.depth {
            let r = if a.depth == 0 { 1 } else { pow2(a.depth) };
            let d = g.dist(&a.base, &b.base)?;
            if d == 0 || d > r {
                return Ok(false);
            }
            horizontal += 1;
            1
        } else if a.base == b.base && a.depth == b.depth + 1 {
            2
        } else {
            return Ok(false);
        };
        if kind < phase {
            return Ok(false);
        }
        phase = kind;
    }
    Ok(horizontal <= 3)
}

/// A point `p2` at depth `k - 1` with `d(p0, p2) <= d(p0, p1) + 3` and
/// `(p1 . p2)_{p0} <= 3`.
pub fn sibling_point<G: BaseGraph>(
    p0: &HoroballVertex<G::V>,
    p1: &HoroballVertex<G::V>,
    k: u32,
    g: &G,
) -> Result<HoroballVertex<G::V>> {
    if k == 0 || p0.depth < k || p1.depth + 1 != k {
        return Err(Error::precondition("need depth(p0) >= k > 0 and depth(p1) = k - 1"));
    }
    let i = p0.depth;
    let d = g.dist(&p1.base, &p0.base)?;
    let (len, l) = best_level(p1.depth, p0.depth, d);
    if d > 0 && l > i {
        // p0 lies on a geodesic from p1 to the point below it
        return Ok(HoroballVertex::new(p0.base.clone(), k - 1));
    }
    // the geodesic from p1 descends at p1's base to depth i; continue from
    // there to a point 3 * 2^i away
    let far = 3u64
        .checked_mul(pow2(i))
        .filter(|_| i < 62)
        .ok_or_else(|| Error::Unsupported("depth too large for a far point".into()))?;
    match g.far_point(&p1.base, far)? {
        Some(gamma) => Ok(HoroballVertex::new(gamma, k - 1)),
        None if d == 0 && len <= 3 => Ok(p1.clone()),
        None => Err(Error::OutOfRegion("no far point in the base region".into())),
    }
}
