//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's metric code.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;

pub const UNREACHED: u32 = u32::MAX;

/// A finite graph given by adjacency lists.
#[derive(Clone, Debug)]
pub struct Explicit<K> {
    pub keys: Vec<K>,
    pub index: HashMap<K, usize>,
    pub adj: Vec<Vec<usize>>,
}

impl<K: Clone + Eq + std::hash::Hash> Explicit<K> {
    pub fn id(&self, k: &K) -> usize {
        self.index[k]
    }

    pub fn bfs(&self, src: usize) -> Vec<u32> {
        self.bfs_where(src, |_| true)
    }

    /// Distances from `src` through vertices accepted by `allowed`.
    pub fn bfs_where(&self, src: usize, allowed: impl Fn(usize) -> bool) -> Vec<u32> {
        let mut d = vec![UNREACHED; self.keys.len()];
        if !allowed(src) {
            return d;
        }
        d[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            for &v in &self.adj[u] {
                if d[v] == UNREACHED && allowed(v) {
                    d[v] = d[u] + 1;
                    q.push_back(v);
                }
            }
        }
        d
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }
}

/// Horoball vertex over `Z^rank` as (coordinates, depth).
pub type HKey = (Vec<i64>, u32);

fn l1(a: &[i64], b: &[i64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).sum()
}

/// The horoball over the box `[lo, hi]^rank` truncated at depth `cap`,
/// built from the edge definition.
pub fn explicit_horoball(rank: usize, lo: i64, hi: i64, cap: u32) -> Explicit<HKey> {
    let mut base = vec![vec![]];
    for _ in 0..rank {
        base = base
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (lo..=hi).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    let mut keys = Vec::new();
    for k in 0..=cap {
        for p in &base {
            keys.push((p.clone(), k));
        }
    }
    let index: HashMap<HKey, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let per = base.len();
    let mut adj = vec![Vec::new(); keys.len()];
    for k in 0..=cap {
        let reach = 1u64 << k;
        for i in 0..per {
            let u = k as usize * per + i;
            for j in 0..per {
                let d = l1(&base[i], &base[j]);
                if d > 0 && d <= reach {
                    adj[u].push(k as usize * per + j);
                }
            }
            if k < cap {
                adj[u].push(u + per);
                adj[u + per].push(u);
            }
        }
    }
    Explicit { keys, index, adj }
}

/// Reduced words over `F_rank`, letters `1..=rank` and their negatives.
pub type FWord = Vec<i8>;

/// The ball of radius `r` in the Cayley tree of the free group.
pub fn free_tree(rank: i8, r: usize) -> Explicit<FWord> {
    let mut keys: Vec<FWord> = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..r {
        let mut next = Vec::new();
        for w in &frontier {
            for g in (1..=rank).flat_map(|g| [g, -g]) {
                if w.last() == Some(&-g) {
                    continue;
                }
                let mut v: FWord = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        keys.extend(next.iter().cloned());
        frontier = next;
    }
    let index: HashMap<FWord, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut adj = vec![Vec::new(); keys.len()];
    for (i, w) in keys.iter().enumerate() {
        if !w.is_empty() {
            let p = index[&w[..w.len() - 1].to_vec()];
            adj[i].push(p);
            adj[p].push(i);
        }
    }
    Explicit { keys, index, adj }
}

/// Renders a free-group word in the library's text format.
pub fn render_free(w: &FWord) -> String {
    if w.is_empty() {
        return "1".into();
    }
    let names = ["a", "b", "c", "d"];
    w.iter()
        .map(|&g| {
            let n = names[(g.unsigned_abs() - 1) as usize];
            if g > 0 {
                n.to_string()
            } else {
                n.to_uppercase()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Doubled four-point defect `max - mid` of the three pair sums, over all
/// 4-subsets of `points`, from a full distance matrix.
pub fn four_point_defect(dist: &[Vec<u32>], points: &[usize]) -> i64 {
    let n = points.len();
    let d = |a: usize, b: usize| i64::from(dist[points[a]][points[b]]);
    let mut best = 0;
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                for e in c..n {
                    let mut s = [d(a, b) + d(c, e), d(a, c) + d(b, e), d(a, e) + d(b, c)];
                    s.sort_unstable();
                    best = best.max(s[2] - s[1]);
                }
            }
        }
    }
    best
}

/// The constants recomputed from their defining formulas.
pub struct Constants {
    pub c: BigInt,
    pub m: BigInt,
    pub k: BigInt,
    pub big_k: BigInt,
    pub r_slope: BigInt,
    pub r_intercept: BigInt,
}

pub fn constants(delta: u64) -> Constants {
    let d = BigInt::from(delta);
    let c = 3 * &d;
    let m = 6 * (&c + 45 * &d) + 2 * &d + 3;
    let k = 2 * &m;
    let exp = u32::try_from(2 * &m + 3).unwrap();
    let big_k = 3 * num_traits::pow(BigInt::from(2), exp as usize) + &m + 3;
    // R(n) = 4(n + M) + 3k + 50 delta + 3
    let r_intercept = 4 * &m + 3 * &k + 50 * &d + 3;
    Constants { c, m, k, big_k, r_slope: BigInt::from(4), r_intercept }
}

/// Deterministic pseudo-random stream independent of the library's RNG use.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

pub fn structure(name: &str) -> relhyp::presentations::RelativeStructure {
    let path = format!("{}/structures/{name}", env!("CARGO_MANIFEST_DIR"));
    relhyp::presentations::RelativeStructure::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn structure_path(name: &str) -> String {
    format!("{}/structures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn toy(m: i64, slope: i64, intercept: i64) -> relhyp::cusped::ConstantsLedger {
    relhyp::cusped::ConstantsLedger::toy_from_json(&format!(
        r#"{{"delta":0,"C":0,"M":{m},"k":1,"K":1,"R":{{"slope":{slope},"intercept":{intercept}}}}}"#
    ))
    .unwrap()
}
