//! Paths between far points of an abelian group that stay away from the
//! identity.

use std::collections::{HashMap, VecDeque};

use super::{BaseGraph, LatticeGraph};
use crate::error::{Error, Result};
use crate::presentations::{LatticePoint, SensibleLattice};

/// True iff `path` runs from `a` to `b` by unit steps, has at most
/// `max_len` edges and stays outside `B(0, r - 1)`.
pub fn is_avoiding_path(
    path: &[LatticePoint],
    a: &LatticePoint,
    b: &LatticePoint,
    r: u64,
    max_len: u64,
    l: &SensibleLattice,
) -> bool {
    path.first() == Some(a)
        && path.last() == Some(b)
        && (path.len() as u64) <= max_len + 1
        && path.iter().all(|p| l.norm(p) >= r)
        && path.windows(2).all(|w| l.dist(&w[0], &w[1]) == 1)
}

fn cyclic_norm(x: i64, n: i64) -> i64 {
    let x = x.rem_euclid(n);
    x.min(n - x)
}

/// A path from `a` to `b` of length at most `3 d(a, b)` avoiding the ball
/// of radius `r - 1` about the identity. Requires free rank at least 2 and
/// `A2` a basis of a product of cyclic groups.
pub fn avoid_ball_path_abelian(
    a: &LatticePoint,
    b: &LatticePoint,
    r: u64,
    l: &SensibleLattice,
) -> Result<Vec<LatticePoint>> {
    if l.norm(a) < r || l.norm(b) < r {
        return Err(Error::precondition("endpoint inside the forbidden ball"));
    }
    if a == b {
        return Ok(vec![a.clone()]);
    }
    if l.dist(a, b) == 1 {
        return Ok(vec![a.clone(), b.clone()]);
    }
    if l.is_virtually_cyclic() {
        return Err(Error::precondition("the group is virtually cyclic"));
    }
    let t = l.torsion();
    let (orders, tuples) = t
        .cyclic()
        .ok_or_else(|| Error::Unsupported("torsion generators do not form a cyclic basis".into()))?;
    let m = l.rank();

    let mut head = vec![a.clone()];
    let mut tail = vec![b.clone()];
    let (mut a, mut b) = (a.clone(), b.clone());

    // shift by a basis vector on which both endpoints have the same sign
    while l.dist(&a, &b) >= 2 {
        let Some(i) = (0..m).find(|&i| a.free[i].signum() * b.free[i].signum() > 0) else { break };
        let s = a.free[i].signum();
        let (mut ea, mut eb) = (a.clone(), b.clone());
        ea.free[i] += s;
        eb.free[i] += s;
        let geo = l.geodesic(&ea, &eb);
        a = geo[1].clone();
        b = geo[geo.len() - 2].clone();
        head.extend([ea, a.clone()]);
        tail.extend([eb, b.clone()]);
    }

    // align cyclic coordinates whose geodesic misses 0
    if l.dist(&a, &b) >= 2 {
        for (c, &n) in orders.iter().enumerate() {
            let (x, y) = (tuples[a.tors as usize][c], tuples[b.tors as usize][c]);
            if cyclic_norm(x - y, n) == cyclic_norm(x, n) + cyclic_norm(y, n) {
                continue;
            }
            // move the endpoint with the smaller norm in this coordinate
            let (mover, dest, list) = if cyclic_norm(x, n) <= cyclic_norm(y, n) {
                (&mut a, y, &mut head)
            } else {
                (&mut b, x, &mut tail)
            };
            let from = tuples[mover.tors as usize][c];
            let delta = (dest - from).rem_euclid(n);
            let (mv, count) = if delta <= n - delta { (2 * c as u32, delta) } else { (2 * c as u32 + 1, n - delta) };
            for _ in 0..count {
                mover.tors = t.step(mover.tors, mv);
                list.push(mover.clone());
            }
        }
    }

    if l.dist(&a, &b) >= 2 {
        // orient so that a has nonpositive and b nonnegative coordinates
        let sign: Vec<i64> = (0..m).map(|i| if a.free[i] > 0 || b.free[i] < 0 { -1 } else { 1 }).collect();
        // cyclic coordinates already equal stay fixed; the others pass through 0
        let differ: Vec<usize> =
            (0..orders.len()).filter(|&c| tuples[a.tors as usize][c] != tuples[b.tors as usize][c]).collect();
        let toward_zero = |p: &LatticePoint| -> Option<u32> {
            let tup = &tuples[p.tors as usize];
            differ.iter().copied().find(|&c| tup[c] != 0).map(|c| {
                let x = tup[c];
                if x <= orders[c] - x {
                    2 * c as u32 + 1
                } else {
                    2 * c as u32
                }
            })
        };
        // a to (0, ..., 0, -S_a; common torsion)
        let last = m - 1;
        for i in 0..last {
            while a.free[i] * sign[i] < 0 {
                a.free[last] -= sign[last];
                head.push(a.clone());
                a.free[i] += sign[i];
                head.push(a.clone());
            }
        }
        while let Some(mv) = toward_zero(&a) {
            a.free[last] -= sign[last];
            head.push(a.clone());
            a.tors = t.step(a.tors, mv);
            head.push(a.clone());
        }
        // b to (S_b, 0, ..., 0; common torsion)
        for i in 1..m {
            while b.free[i] * sign[i] > 0 {
                b.free[0] += sign[0];
                tail.push(b.clone());
                b.free[i] -= sign[i];
                tail.push(b.clone());
            }
        }
        while let Some(mv) = toward_zero(&b) {
            b.free[0] += sign[0];
            tail.push(b.clone());
            b.tors = t.step(b.tors, mv);
            tail.push(b.clone());
        }
        // corner route through (S_b, 0, ..., 0, -S_a)
        while a.free[0] != b.free[0] {
            a.free[0] += sign[0];
            head.push(a.clone());
        }
        while a.free[last] != b.free[last] {
            a.free[last] += sign[last];
            head.push(a.clone());
        }
    } else if a != b {
        head.push(b.clone());
    }
    if head.last() == tail.last() {
        tail.pop();
    }
    head.extend(tail.into_iter().rev());
    Ok(head)
}

/// Shortest path avoiding `B(0, r - 1)` inside a bounded lattice graph,
/// by breadth-first search; `None` if there is none of length `<= max_len`.
pub fn avoid_ball_path_search(
    a: &LatticePoint,
    b: &LatticePoint,
    r: u64,
    g: &LatticeGraph,
    max_len: u64,
) -> Result<Option<Vec<LatticePoint>>> {
    let l = g.lattice();
    if !g.contains(a) || !g.contains(b) {
        return Err(Error::OutOfRegion("endpoint outside the base region".into()));
    }
    if l.norm(a) < r || l.norm(b) < r {
        return Ok(None);
    }
    let mut prev: HashMap<LatticePoint, Option<LatticePoint>> = HashMap::from([(a.clone(), None)]);
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
        for v in l.unit_moves(&u) {
            if g.contains(&v) && l.norm(&v) >= r && !prev.contains_key(&v) {
                prev.insert(v.clone(), Some(u.clone()));
                queue.push_back((v, d + 1));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> LatticePoint {
        LatticePoint::new(vec![x, y], 0)
    }

    #[test]
    fn opposite_corners_of_z2() {
        let l = SensibleLattice::standard(2, &[]).unwrap();
        let (a, b) = (p(3, 0), p(0, 3));
        let path = avoid_ball_path_abelian(&a, &b, 3, &l).unwrap();
        assert!(is_avoiding_path(&path, &a, &b, 3, 18, &l));
        let (a, b) = (p(-3, 1), p(2, -4));
        let path = avoid_ball_path_abelian(&a, &b, 4, &l).unwrap();
        assert!(is_avoiding_path(&path, &a, &b, 4, 3 * l.dist(&a, &b), &l));
    }

    #[test]
    fn trivial_cases() {
        let l = SensibleLattice::standard(2, &[]).unwrap();
        assert_eq!(avoid_ball_path_abelian(&p(1, 1), &p(1, 1), 2, &l).unwrap().len(), 1);
        assert_eq!(avoid_ball_path_abelian(&p(2, 2), &p(3, 2), 4, &l).unwrap(), vec![p(2, 2), p(3, 2)]);
        assert!(avoid_ball_path_abelian(&p(1, 0), &p(3, 2), 2, &l).is_err());
    }

    #[test]
    fn torsion_alignment() {
        let l = SensibleLattice::standard(2, &[5]).unwrap();
        let t = l.torsion();
        let a = LatticePoint::new(vec![-2, 0], t.from_tuple(&[1]));
        let b = LatticePoint::new(vec![0, 3], t.from_tuple(&[2]));
        let path = avoid_ball_path_abelian(&a, &b, 3, &l).unwrap();
        assert!(is_avoiding_path(&path, &a, &b, 3, 3 * l.dist(&a, &b), &l));
    }

    #[test]
    fn virtually_cyclic_is_rejected() {
        let l = SensibleLattice::standard(1, &[4]).unwrap();
        let a = LatticePoint::new(vec![3], 0);
        let b = LatticePoint::new(vec![-3], 0);
        assert!(matches!(avoid_ball_path_abelian(&a, &b, 3, &l), Err(Error::Precondition(_))));
        let g = LatticeGraph::boxed(std::sync::Arc::new(l), vec![(-8, 8)]).unwrap();
        assert!(avoid_ball_path_search(&a, &b, 3, &g, 100).unwrap().is_none());
    }
}
