//! Paths between deep points of one horoball that keep away from the
//! basepoint, and the finite-horizon ray test.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;

use super::{ConstantsLedger, CuspedSpace, CuspedVertex};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{ball, distance, BallGraph, ImplicitGraph};
use crate::horoball::{self, avoid_ball_path_abelian, pow2, BaseGraph, HoroballVertex, LatticeGraph};
use crate::presentations::{Element, LatticePoint};

const SEARCH_BUDGET: usize = 200_000;

/// Distances from the ball center to points of one horoball, through the
/// rim points the ball contains.
pub struct HoroballProfile {
    pub parabolic: usize,
    pub reference: Element,
    /// Rim points and their distances, nearest first.
    pub rim: Vec<(LatticePoint, u32)>,
    pub radius: u32,
    graph: LatticeGraph,
}

impl HoroballProfile {
    /// `min` over rim points `z0` of `d(v0, z0) + d_H(z0, h)`. Exact whenever
    /// the true distance is at most the ball radius; otherwise the true value
    /// also exceeds the radius.
    pub fn value(&self, h: &HoroballVertex<LatticePoint>) -> Result<u64> {
        let mut best = u64::MAX;
        for (p, d) in &self.rim {
            if u64::from(*d) >= best {
                break;
            }
            let v = u64::from(*d) + horoball::horoball_distance(&HoroballVertex::new(p.clone(), 0), h, &self.graph)?;
            best = best.min(v);
        }
        Ok(best)
    }

    /// The rim point nearest the center.
    pub fn gate(&self) -> Option<&LatticePoint> {
        self.rim.first().map(|(p, _)| p)
    }

    pub fn graph(&self) -> &LatticeGraph {
        &self.graph
    }
}

pub fn horoball_profile(
    x: &CuspedSpace,
    b: &BallGraph<CuspedVertex>,
    parabolic: usize,
    reference: &Element,
) -> Result<HoroballProfile> {
    let mut rim = Vec::new();
    for (v, &d) in b.vertices.iter().zip(&b.dist) {
        if let CuspedVertex::Cayley(e) = v {
            if let Some(p) = x.coset_offset(parabolic, reference, e)? {
                rim.push((p, d));
            }
        }
    }
    rim.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let graph = LatticeGraph::new(x.structure().parabolics[parabolic].lattice_arc());
    Ok(HoroballProfile { parabolic, reference: reference.clone(), rim, radius: b.radius, graph })
}

type HPath = Vec<HoroballVertex<LatticePoint>>;

fn vertical(base: &LatticePoint, from: u32, to: u32) -> HPath {
    if from <= to {
        (from..=to).map(|k| HoroballVertex::new(base.clone(), k)).collect()
    } else {
        (to..=from).rev().map(|k| HoroballVertex::new(base.clone(), k)).collect()
    }
}

fn join(parts: Vec<HPath>) -> HPath {
    let mut out: HPath = Vec::new();
    for p in parts {
        for v in p {
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// Keeps a subsequence of a unit-step path whose consecutive points are at
/// most `2^level` apart.
fn compress(path: &[LatticePoint], level: u32, g: &LatticeGraph) -> Result<Vec<LatticePoint>> {
    let l = g.lattice();
    let jump = pow2(level);
    let mut out = vec![path[0].clone()];
    let mut i = 0;
    while i + 1 < path.len() {
        let mut j = i + 1;
        while j + 1 < path.len() && l.dist(&path[i], &path[j + 1]) <= jump {
            j += 1;
        }
        out.push(path[j].clone());
        i = j;
    }
    Ok(out)
}

fn valid(path: &HPath, prof: &HoroballProfile, m: u64, max_len: &BigInt) -> Result<bool> {
    if BigInt::from(path.len().saturating_sub(1)) > *max_len {
        return Ok(false);
    }
    for v in path {
        if prof.value(v)? < m {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shortest path through horoball vertices of depth at most `max_depth`
/// keeping `F >= m`.
fn search(
    a: &HoroballVertex<LatticePoint>,
    b: &HoroballVertex<LatticePoint>,
    prof: &HoroballProfile,
    m: u64,
    max_depth: u32,
    max_len: u64,
) -> Result<Option<HPath>> {
    let mut prev: HashMap<HoroballVertex<LatticePoint>, Option<HoroballVertex<LatticePoint>>> =
        HashMap::from([(a.clone(), None)]);
    let mut queue = VecDeque::from([(a.clone(), 0u64)]);
    while let Some((u, d)) = queue.pop_front() {
        if &u == b {
            let mut path = vec![u];
            while let Some(Some(p)) = prev.get(path.last().expect("nonempty")) {
                path.push(p.clone());
            }
            path.reverse();
            return Ok(Some(path));
        }
        if d == max_len {
            continue;
        }
        for w in horoball::neighbors(&u, prof.graph())? {
            if w.depth > max_depth || prev.contains_key(&w) || prof.value(&w)? < m {
                continue;
            }
            prev.insert(w.clone(), Some(u.clone()));
            if prev.len() > SEARCH_BUDGET {
                return Err(Error::budget("horoball search vertices", d as usize));
            }
            queue.push_back((w, d + 1));
        }
    }
    Ok(None)
}

/// A path inside the horoball containing `a` and `b` of length at most `K`
/// that never enters `B(v0, min(d(v0, a), d(v0, b)))`. `b` must be the
/// center-based ball `b` of radius at least `max(d(v0, a), d(v0, b))`.
pub fn deep_pair_path(
    x: &CuspedSpace,
    bl: &BallGraph<CuspedVertex>,
    a: &CuspedVertex,
    b: &CuspedVertex,
    ledger: &ConstantsLedger,
) -> Result<Vec<CuspedVertex>> {
    if a == b {
        return Ok(vec![a.clone()]);
    }
    let (CuspedVertex::Horo { parabolic: i, base: ga, .. }, CuspedVertex::Horo { parabolic: j, .. }) = (a, b) else {
        return Err(Error::precondition("both points must be horoball vertices"));
    };
    if i != j {
        return Err(Error::precondition("points lie in different horoballs"));
    }
    let i = *i;
    let k = ledger.k_small()?;
    if u64::from(a.depth()) < k || u64::from(b.depth()) < k {
        return Err(Error::precondition(format!("both depths must be at least k = {k}")));
    }
    let ha = x.horoball_coords(i, ga, a)?.expect("reference lies in its own coset");
    let hb = x
        .horoball_coords(i, ga, b)?
        .ok_or_else(|| Error::precondition("points lie in different horoballs"))?;
    let prof = horoball_profile(x, bl, i, ga)?;
    let g = prof.graph().clone();

    let big_m = ledger.m_small()?;
    let dh = horoball::horoball_distance(&ha, &hb, &g)?;
    if dh > big_m {
        let bound = u32::try_from(big_m).unwrap_or(u32::MAX);
        if distance(x, a, b, bound, SEARCH_BUDGET)?.is_none() {
            return Err(Error::precondition(format!("d(x, y) exceeds M = {big_m}")));
        }
    }
    let (fa, fb) = (prof.value(&ha)?, prof.value(&hb)?);
    if fa.max(fb) > u64::from(bl.radius) {
        return Err(Error::OutOfRegion("ball too small to measure the endpoints".into()));
    }
    if fa.abs_diff(fb) > 20 * ledger.delta {
        return Err(Error::precondition("distances to the basepoint differ by more than 20 delta"));
    }
    let m = fa.min(fb);
    let max_len = ledger.big_k.clone();

    let top = ha.depth.max(hb.depth);
    let d = g.dist(&ha.base, &hb.base)?;
    let span = 64 - d.leading_zeros();
    let lattice = g.lattice();
    for level in top..=top + span + 2 {
        let straight = join(vec![
            vertical(&ha.base, ha.depth, level),
            horoball::level_interpolate(&ha.base, &hb.base, level, &g)?,
            vertical(&hb.base, level, hb.depth),
        ]);
        if valid(&straight, &prof, m, &max_len)? {
            return straight.iter().map(|h| x.from_horoball(i, ga, h)).collect();
        }
        let (Some(c), false) = (prof.gate(), lattice.is_virtually_cyclic()) else { continue };
        if lattice.torsion().cyclic().is_none() {
            continue;
        }
        let (pa, pb) = (lattice.sub(&ha.base, c), lattice.sub(&hb.base, c));
        for r in 1..=lattice.norm(&pa).min(lattice.norm(&pb)) {
            let Ok(route) = avoid_ball_path_abelian(&pa, &pb, r, lattice) else { continue };
            let route: Vec<LatticePoint> = route.iter().map(|p| lattice.add(p, c)).collect();
            let level_path = compress(&route, level, &g)?;
            let cand = join(vec![
                vertical(&ha.base, ha.depth, level),
                level_path.into_iter().map(|p| HoroballVertex::new(p, level)).collect(),
                vertical(&hb.base, level, hb.depth),
            ]);
            if valid(&cand, &prof, m, &max_len)? {
                return cand.iter().map(|h| x.from_horoball(i, ga, h)).collect();
            }
        }
    }
    let cap = u64::try_from(&max_len).unwrap_or(u64::MAX);
    match search(&ha, &hb, &prof, m, top + 4, cap)? {
        Some(p) => p.iter().map(|h| x.from_horoball(i, ga, h)).collect(),
        None => Err(Error::Construction("no avoiding path inside the horoball".into())),
    }
}


/// A chain from `w` to distance `far` whose every step moves one further
/// from `center`; prefixed by a geodesic to `w` it is a geodesic.
/// Whether some geodesic from `center` to a vertex at distance
/// `d(center, x) + horizon` passes within `3 delta` of `x`.
pub fn ray_cover_check<G: ImplicitGraph>(
    g: &G,
    center: &G::V,
    x: &G::V,
    horizon: u32,
    delta: u32,
    max_vertices: usize,
    exec: Exec,
) -> Result<bool> {
    let d0 = distance(g, center, x, u32::MAX, max_vertices)?
        .ok_or_else(|| Error::precondition("x is not connected to the center"))?;
    let reach = 3 * delta;
    let far = d0 + horizon;
    let bl = ball(g, center, far.max(d0 + reach), max_vertices, exec)?;
    let mut on_geodesic = vec![false; bl.len()];
    for v in (0..bl.len()).rev() {
        on_geodesic[v] = bl.dist[v] == far
            || (bl.dist[v] < far
                && bl.adj[v].iter().any(|&w| on_geodesic[w as usize] && bl.dist[w as usize] == bl.dist[v] + 1));
    }
    let xi = bl.index_of(x).expect("x lies in the ball");
    let near = bl.bfs_from(xi, reach, |_| true);
    Ok(near.iter().zip(&on_geodesic).any(|(&d, &on)| on && d <= reach))
}

/// `ray_cover_check` in the cusped space. First tries the vertical ray
/// below `v` in each horoball containing it: the path `v0 -> v -> (v, depth
/// + horizon)` is geodesic once the far end is provably at distance
/// `d(v0, v) + horizon`. Rim points outside `B(v0, d(v0, v))` contribute at
/// least `d(v0, v) + 1 + depth`, so that ball suffices for the bound.
pub fn cusped_ray_cover_check(
    x: &CuspedSpace,
    center: &CuspedVertex,
    v: &CuspedVertex,
    horizon: u32,
    delta: u32,
    max_vertices: usize,
    exec: Exec,
) -> Result<bool> {
    let d0 = distance(x, center, v, u32::MAX, max_vertices)?
        .ok_or_else(|| Error::precondition("x is not connected to the center"))?;
    let parabolics: Vec<usize> = match v {
        CuspedVertex::Horo { parabolic, .. } => vec![*parabolic],
        CuspedVertex::Cayley(_) => (0..x.structure().parabolics.len()).collect(),
    };
    if !parabolics.is_empty() {
        let bl = ball(x, center, d0, max_vertices, exec)?;
        for i in parabolics {
            let prof = horoball_profile(x, &bl, i, v.base())?;
            let zero = prof.graph().lattice().zero();
            let end = HoroballVertex::new(zero, v.depth() + horizon);
            let outside = u64::from(bl.radius) + 1 + u64::from(end.depth);
            if prof.value(&end)?.min(outside) >= u64::from(d0 + horizon) {
                return Ok(true);
            }
        }
    }
    ray_cover_check(x, center, v, horizon, delta, max_vertices, exec)
}
