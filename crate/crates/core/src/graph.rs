//! Breadth-first machinery over implicitly given graphs.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Debug};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::horoball::{self, BaseGraph, HoroballVertex};

/// A graph given by its neighbour function. Neighbour lists must be
/// symmetric and free of self-loops.
pub trait ImplicitGraph: Sync {
    type V: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    fn neighbors(&self, v: &Self::V) -> Result<Vec<Self::V>>;
}

/// A single horoball as a graph in its own right.
pub struct Horoball<G: BaseGraph>(pub G);

impl<G: BaseGraph> ImplicitGraph for Horoball<G> {
    type V = HoroballVertex<G::V>;

    fn neighbors(&self, v: &Self::V) -> Result<Vec<Self::V>> {
        horoball::neighbors(v, &self.0)
    }
}

/// The ball `B(center, radius)` with exact distances from the center.
/// Vertices are ordered by distance, then by key.
#[derive(Clone, Debug)]
pub struct BallGraph<V> {
    pub center: V,
    pub radius: u32,
    pub vertices: Vec<V>,
    pub dist: Vec<u32>,
    /// Neighbours inside the ball, sorted by index.
    pub adj: Vec<Vec<u32>>,
    index: HashMap<V, u32>,
}

impl<V: Clone + Eq + Hash + Ord> BallGraph<V> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &V) -> Option<usize> {
        self.index.get(v).map(|&i| i as usize)
    }

    pub fn dist_to(&self, v: &V) -> Option<u32> {
        self.index_of(v).map(|i| self.dist[i])
    }

    /// Number of vertices at distance at most `r`.
    pub fn count_within(&self, r: u32) -> usize {
        self.dist.partition_point(|&d| d <= r)
    }

    /// Breadth-first distances from vertex `src` using only ball vertices
    /// accepted by `allowed`, up to `limit`; `u32::MAX` marks unreached.
    pub fn bfs_from(&self, src: usize, limit: u32, allowed: impl Fn(usize) -> bool) -> Vec<u32> {
        let mut d = vec![u32::MAX; self.len()];
        if !allowed(src) {
            return d;
        }
        d[src] = 0;
        let mut frontier = vec![src as u32];
        let mut level = 0;
        while !frontier.is_empty() && level < limit {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in &self.adj[u as usize] {
                    if d[w as usize] == u32::MAX && allowed(w as usize) {
                        d[w as usize] = level + 1;
                        next.push(w);
                    }
                }
            }
            frontier = next;
            level += 1;
        }
        d
    }

    /// A shortest path from `src` to `dst` through allowed vertices, of at
    /// most `limit` edges.
    pub fn path(&self, src: usize, dst: usize, limit: u32, allowed: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        if !allowed(src) || !allowed(dst) {
            return None;
        }
        let mut prev = vec![u32::MAX; self.len()];
        prev[src] = src as u32;
        let mut frontier = vec![src as u32];
        let mut level = 0;
        while prev[dst] == u32::MAX && !frontier.is_empty() && level < limit {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in &self.adj[u as usize] {
                    if prev[w as usize] == u32::MAX && allowed(w as usize) {
                        prev[w as usize] = u;
                        next.push(w);
                    }
                }
            }
            frontier = next;
            level += 1;
        }
        if prev[dst] == u32::MAX {
            return None;
        }
        let mut out = vec![dst];
        while *out.last().expect("nonempty") != src {
            out.push(prev[*out.last().expect("nonempty")] as usize);
        }
        out.reverse();
        Some(out)
    }
}

/// Breadth-first ball; fails with a budget error once more than
/// `max_vertices` vertices would be needed, reporting the last complete
/// radius.
pub fn ball<G: ImplicitGraph>(
    g: &G,
    center: &G::V,
    radius: u32,
    max_vertices: usize,
    exec: Exec,
) -> Result<BallGraph<G::V>> {
    let mut vertices = vec![center.clone()];
    let mut dist = vec![0u32];
    let mut index: HashMap<G::V, u32> = HashMap::from([(center.clone(), 0)]);
    let mut layer_start = 0;
    let mut nbrs: Vec<Vec<G::V>> = Vec::new();
    for r in 0..=radius {
        let layer: Vec<G::V> = vertices[layer_start..].to_vec();
        let found = exec.map(&layer, |v| g.neighbors(v));
        let mut fresh: Vec<G::V> = Vec::new();
        let mut seen: HashSet<G::V> = HashSet::new();
        for ns in found {
            let ns = ns?;
            if r < radius {
                for w in &ns {
                    if !index.contains_key(w) && seen.insert(w.clone()) {
                        fresh.push(w.clone());
                    }
                }
            }
            nbrs.push(ns);
        }
        layer_start = vertices.len();
        if vertices.len() + fresh.len() > max_vertices {
            return Err(Error::budget("ball vertices", r as usize));
        }
        fresh.sort();
        for w in fresh {
            index.insert(w.clone(), vertices.len() as u32);
            vertices.push(w);
            dist.push(r + 1);
        }
        if layer_start == vertices.len() {
            break;
        }
    }
    let adj = nbrs
        .iter()
        .map(|ns| {
            let mut a: Vec<u32> = ns.iter().filter_map(|w| index.get(w).copied()).collect();
            a.sort_unstable();
            a.dedup();
            a
        })
        .collect();
    Ok(BallGraph { center: center.clone(), radius, vertices, dist, adj, index })
}

/// Exact distance when at most `bound`, by bidirectional search; `None`
/// when the distance exceeds `bound`.
pub fn distance<G: ImplicitGraph>(g: &G, x: &G::V, y: &G::V, bound: u32, max_vertices: usize) -> Result<Option<u32>> {
    if x == y {
        return Ok(Some(0));
    }
    let mut side: [HashMap<G::V, u32>; 2] = [HashMap::from([(x.clone(), 0)]), HashMap::from([(y.clone(), 0)])];
    let mut frontier: [Vec<G::V>; 2] = [vec![x.clone()], vec![y.clone()]];
    let mut radius = [0u32, 0u32];
    let mut best: Option<u32> = None;
    while radius[0] + radius[1] < bound {
        if frontier[0].is_empty() || frontier[1].is_empty() {
            break;
        }
        let s = usize::from(frontier[1].len() < frontier[0].len());
        let mut next = Vec::new();
        for u in std::mem::take(&mut frontier[s]) {
            for w in g.neighbors(&u)? {
                if side[s].contains_key(&w) {
                    continue;
                }
                side[s].insert(w.clone(), radius[s] + 1);
                if let Some(&o) = side[1 - s].get(&w) {
                    let total = radius[s] + 1 + o;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
                next.push(w);
            }
        }
        radius[s] += 1;
        frontier[s] = next;
        if side[0].len() + side[1].len() > max_vertices {
            return Err(Error::budget("distance search vertices", (radius[0] + radius[1]) as usize));
        }
        if let Some(b) = best {
            if b <= radius[0] + radius[1] + 1 {
                break;
            }
        }
    }
    Ok(best.filter(|&b| b <= bound))
}

/// A half-integer, stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Half(pub i64);

impl Half {
    pub fn from_int(x: i64) -> Self {
        Half(2 * x)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", (self.0 - 1) / 2)
        }
    }
}

/// `(x . y)_z` from the three distances `d(x, z)`, `d(y, z)`, `d(x, y)`.
pub fn gromov_product(dxz: u64, dyz: u64, dxy: u64) -> Half {
    Half(dxz as i64 + dyz as i64 - dxy as i64)
}

/// Result of a four-point scan: a lower bound for the hyperbolicity
/// constant, never a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub delta: Half,
    pub quadruples: u64,
    pub exhaustive: bool,
    pub certified: bool,
}

/// Largest four-point defect `min((x.z)_w, (y.z)_w) - (x.y)_w` over points
/// of `B(center, radius)`: all of them, or `sample` random basepoints.
pub fn estimate_delta<G: ImplicitGraph>(
    g: &G,
    center: &G::V,
    radius: u32,
    sample: Option<(usize, u64)>,
    max_vertices: usize,
    exec: Exec,
) -> Result<DeltaEstimate> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    // geodesics between points of B(r) stay inside B(2r)
    let big = ball(g, center, 2 * radius, max_vertices, exec)?;
    let n = big.count_within(radius);
    let idx: Vec<usize> = (0..n).collect();
    let rows: Vec<Vec<u32>> = exec.map(&idx, |&i| {
        let d = big.bfs_from(i, u32::MAX, |_| true);
        d[..n].to_vec()
    });
    let mut ws: Vec<usize> = idx.clone();
    let exhaustive = match sample {
        Some((count, seed)) if count < n => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            ws.shuffle(&mut rng);
            ws.truncate(count);
            ws.sort_unstable();
            false
        }
        _ => true,
    };
    let per_w = exec.map(&ws, |&w| {
        let dw = &rows[w];
        let mut worst = i64::MIN;
        for x in 0..n {
            let dx = &rows[x];
            for y in x..n {
                let xy = i64::from(dw[x]) + i64::from(dw[y]) - i64::from(dx[y]);
                for z in 0..n {
                    let xz = i64::from(dw[x]) + i64::from(dw[z]) - i64::from(dx[z]);
                    let yz = i64::from(dw[y]) + i64::from(dw[z]) - i64::from(rows[y][z]);
                    let defect = xz.min(yz) - xy;
                    if defect > worst {
                        worst = defect;
                    }
                }
            }
        }
        worst
    });
    let worst = per_w.into_iter().max().unwrap_or(0).max(0);
    let nn = n as u64;
    Ok(DeltaEstimate {
        delta: Half(worst),
        quadruples: ws.len() as u64 * nn * (nn + 1) / 2 * nn,
        exhaustive,
        certified: false,
    })
}
