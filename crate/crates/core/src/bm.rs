//! The pair conditions star and double-dagger, and the stepwise
//! connectivity check built on them.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cusped::ConstantsLedger;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{ball, BallGraph, ImplicitGraph};
use crate::splittings::GraphOfGroups;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Connected { n: Option<u64>, certified: bool },
    Disconnected { witness: GraphOfGroups },
    Unknown { report: String },
}

impl Verdict {
    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Connected { .. } => "connected",
            Verdict::Disconnected { .. } => "disconnected",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

/// A pair satisfying star, by ball indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StarPair {
    pub x: usize,
    pub y: usize,
    pub eps: u64,
    /// `min(d(v0, x), d(v0, y))`.
    pub m: u64,
}

/// `|d(v0, x) - d(v0, y)| <= eps` and `d(x, y) <= M`.
pub fn star(d0x: u64, d0y: u64, dxy: u64, eps: u64, ledger: &ConstantsLedger) -> bool {
    d0x.abs_diff(d0y) <= eps && BigInt::from(dxy) <= ledger.m
}

/// The forbidden open ball for the pair has radius `m - C - 45 delta + 3 eps`.
/// Points at distance at least this radius are allowed.
pub fn forbidden_radius(m: u64, eps: u64, ledger: &ConstantsLedger) -> BigInt {
    ledger.forbidden_radius(m, eps)
}

fn allowed_from(rho: &BigInt) -> u32 {
    if !rho.is_positive() {
        0
    } else {
        rho.to_u32().unwrap_or(u32::MAX)
    }
}

/// A path of length at most `n` from `x` to `y` through vertices at distance
/// at least the forbidden radius from the center, or `None`.
pub fn ddagger<V: Clone + Eq + std::hash::Hash + Ord>(
    b: &BallGraph<V>,
    x: usize,
    y: usize,
    eps: u64,
    n: u64,
    ledger: &ConstantsLedger,
) -> Result<Option<Vec<usize>>> {
    let (dx, dy) = (b.dist[x], b.dist[y]);
    let need = u64::from(dx.max(dy)) + n;
    if need > u64::from(b.radius) {
        return Err(Error::OutOfRegion(format!("ball radius {} is below the required {need}", b.radius)));
    }
    if x == y {
        return Ok(Some(vec![x]));
    }
    let m = u64::from(dx.min(dy));
    let floor = allowed_from(&forbidden_radius(m, eps, ledger));
    let limit = u32::try_from(n).unwrap_or(u32::MAX);
    Ok(b.path(x, y, limit, |v| b.dist[v] >= floor))
}

/// A witness revalidated: endpoints, length and avoidance of the forbidden ball.
pub fn witness_valid<V: Clone + Eq + std::hash::Hash + Ord>(
    b: &BallGraph<V>,
    path: &[usize],
    x: usize,
    y: usize,
    eps: u64,
    n: u64,
    ledger: &ConstantsLedger,
) -> bool {
    let m = u64::from(b.dist[x].min(b.dist[y]));
    let rho = forbidden_radius(m, eps, ledger);
    path.first() == Some(&x)
        && path.last() == Some(&y)
        && (path.len() as u64) <= n + 1
        && path.windows(2).all(|w| b.adj[w[0]].binary_search(&(w[1] as u32)).is_ok())
        && path.iter().all(|&v| BigInt::from(b.dist[v]) >= rho)
}

/// `ddagger(n)` implies `ddagger(n2)` for `n2 >= n`.
pub fn ddagger_monotone_check<V: Clone + Eq + std::hash::Hash + Ord>(
    b: &BallGraph<V>,
    x: usize,
    y: usize,
    eps: u64,
    n: u64,
    n2: u64,
    ledger: &ConstantsLedger,
) -> Result<bool> {
    if n2 < n {
        return Err(Error::precondition("need n2 >= n"));
    }
    Ok(ddagger(b, x, y, eps, n, ledger)?.is_none() || ddagger(b, x, y, eps, n2, ledger)?.is_some())
}

/// All star pairs `x < y` (ball order) inside `B(v0, r)`.
pub fn star_pairs<V: Clone + Eq + std::hash::Hash + Ord + Sync>(
    b: &BallGraph<V>,
    r: u32,
    eps: u64,
    ledger: &ConstantsLedger,
    exec: Exec,
) -> Result<Vec<StarPair>> {
    let big_m = ledger.m.to_u32().unwrap_or(u32::MAX);
    let inner = b.count_within(r);
    if u64::from(r) + u64::from(big_m).div_ceil(2) > u64::from(b.radius) && (inner < b.len() || b.radius < r) {
        return Err(Error::OutOfRegion("ball too small to measure pair distances".into()));
    }
    let xs: Vec<usize> = (0..inner).collect();
    let rows = exec.map(&xs, |&x| {
        let d = b.bfs_from(x, big_m, |_| true);
        (x + 1..inner)
            .filter(|&y| d[y] != u32::MAX && star(b.dist[x].into(), b.dist[y].into(), d[y].into(), eps, ledger))
            .map(|y| StarPair { x, y, eps, m: b.dist[x].min(b.dist[y]).into() })
            .collect::<Vec<_>>()
    });
    Ok(rows.into_iter().flatten().collect())
}

/// The first star pair of `B(v0, r)` failing `ddagger(eps, n)`.
pub fn find_violating_pair<V: Clone + Eq + std::hash::Hash + Ord + Sync>(
    b: &BallGraph<V>,
    r: u32,
    eps: u64,
    n: u64,
    ledger: &ConstantsLedger,
    exec: Exec,
) -> Result<Option<StarPair>> {
    let pairs = star_pairs(b, r, eps, ledger, exec)?;
    Ok(scan(b, &pairs, n, ledger, exec)?.0)
}

fn scan<V: Clone + Eq + std::hash::Hash + Ord + Sync>(
    b: &BallGraph<V>,
    pairs: &[StarPair],
    n: u64,
    ledger: &ConstantsLedger,
    exec: Exec,
) -> Result<(Option<StarPair>, usize)> {
    let results = exec.map(pairs, |p| ddagger(b, p.x, p.y, p.eps, n, ledger).map(|w| w.map(|w| w.len())));
    let mut witnessed = 0;
    for (p, r) in pairs.iter().zip(results) {
        match r? {
            Some(_) => witnessed += 1,
            None => return Ok((Some(*p), witnessed)),
        }
    }
    Ok((None, witnessed))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundStats {
    pub n: u64,
    pub pair_radius: u32,
    pub ball_radius: u32,
    pub ball_vertices: usize,
    pub pairs: usize,
    pub passed: usize,
}

#[derive(Clone, Debug)]
pub struct ConnectivityRun<V> {
    pub verdict: Verdict,
    pub rounds: Vec<RoundStats>,
    /// The last violating pair, with distances from the center.
    pub violating: Option<(V, V, u32, u32)>,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub max_vertices: usize,
    pub exec: Exec,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { max_vertices: 2_000_000, exec: Exec::Parallel }
    }
}

/// For `n = n_start ..= n_budget`: if every star pair of `B(v0, R(n))`
/// satisfies `ddagger(10 delta, n)` the boundary is connected; otherwise the
/// next `n` is tried.
pub fn check_connectivity<G: ImplicitGraph>(
    g: &G,
    center: &G::V,
    ledger: &ConstantsLedger,
    n_start: u64,
    n_budget: u64,
    opts: CheckOptions,
) -> Result<ConnectivityRun<G::V>> {
    let eps = 10 * ledger.delta;
    let mut rounds = Vec::new();
    let mut violating = None;
    let half_m = ledger.m_small()?.div_ceil(2);
    for n in n_start..=n_budget {
        let r = ledger.r_small(n)?;
        let radius = r.checked_add(n.max(half_m)).and_then(|x| u32::try_from(x).ok());
        let (Some(radius), Ok(pair_radius)) = (radius, u32::try_from(r)) else {
            return Ok(ConnectivityRun {
                verdict: Verdict::Unknown { report: format!("ball radius for n = {n} exceeds the addressable range") },
                rounds,
                violating,
            });
        };
        let b = match ball(g, center, radius, opts.max_vertices, opts.exec) {
            Ok(b) => b,
            Err(Error::Budget { attained, .. }) => {
                return Ok(ConnectivityRun {
                    verdict: Verdict::Unknown {
                        report: format!(
                            "ball budget of {} vertices exceeded at n = {n} (radius {radius} needed, {attained} reached)",
                            opts.max_vertices
                        ),
                    },
                    rounds,
                    violating,
                })
            }
            Err(e) => return Err(e),
        };
        let pairs = star_pairs(&b, pair_radius, eps, ledger, opts.exec)?;
        let (bad, passed) = scan(&b, &pairs, n, ledger, opts.exec)?;
        rounds.push(RoundStats {
            n,
            pair_radius,
            ball_radius: radius,
            ball_vertices: b.len(),
            pairs: pairs.len(),
            passed,
        });
        match bad {
            None => {
                return Ok(ConnectivityRun {
                    verdict: Verdict::Connected { n: Some(n), certified: ledger.certified && !ledger.toy },
                    rounds,
                    violating,
                })
            }
            Some(p) => {
                violating = Some((b.vertices[p.x].clone(), b.vertices[p.y].clone(), b.dist[p.x], b.dist[p.y]));
            }
        }
    }
    let report = if n_budget < n_start {
        "n budget below the starting value".to_string()
    } else {
        format!("every n up to {n_budget} has a pair failing the dagger condition")
    };
    Ok(ConnectivityRun { verdict: Verdict::Unknown { report }, rounds, violating })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cusped::CuspedSpace;
    use crate::presentations::RelativeStructure;

    fn toy(m: i64, slope: i64, intercept: i64) -> ConstantsLedger {
        ConstantsLedger::toy_from_json(&format!(
            r#"{{"delta":0,"C":0,"M":{m},"k":1,"K":100,"R":{{"slope":{slope},"intercept":{intercept}}}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn star_boundaries() {
        let l = toy(4, 0, 2);
        assert!(star(3, 3, 0, 0, &l));
        assert!(!star(3, 3, 5, 0, &l));
        assert!(star(3, 5, 4, 2, &l));
        assert!(!star(3, 6, 4, 2, &l));
    }

    #[test]
    fn tree_pairs_are_separated() {
        let s = RelativeStructure::from_json(r#"{"generators":["a","b"],"relators":[],"delta":1}"#).unwrap();
        let x = CuspedSpace::assemble(&s);
        let l = toy(2, 0, 2);
        let b = ball(&x, &x.origin(), 6, 1 << 20, Exec::Sequential).unwrap();
        let a = b.index_of(&x.parse_vertex("a").unwrap()).unwrap();
        let bb = b.index_of(&x.parse_vertex("b").unwrap()).unwrap();
        assert!(ddagger(&b, a, bb, 0, 4, &l).unwrap().is_none());
        assert_eq!(ddagger(&b, a, a, 0, 4, &l).unwrap(), Some(vec![a]));
        assert!(ddagger(&b, a, bb, 0, 6, &l).is_err());
        let run = check_connectivity(&x, &x.origin(), &l, 1, 2, CheckOptions::default()).unwrap();
        assert!(run.verdict.is_unknown());
        assert_eq!(run.rounds.len(), 2);
        assert!(run.violating.is_some());
        let run = check_connectivity(&x, &x.origin(), &l, 3, 2, CheckOptions::default()).unwrap();
        assert!(run.verdict.is_unknown() && run.rounds.is_empty());
    }
}
