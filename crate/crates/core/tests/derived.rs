//! Worked examples, each checked against an independent brute-force oracle
//! and frozen.

mod common;

use common::*;
use relhyp::bm::{check_connectivity, CheckOptions, Verdict};
use relhyp::cusped::{cusped_ray_cover_check, deep_pair_path, ray_cover_check, thick_part_member, CuspedSpace, CuspedVertex};
use relhyp::exec::Exec;
use relhyp::graph::{ball, distance, estimate_delta, gromov_product, Half, Horoball, ImplicitGraph};
use relhyp::horoball::{
    avoid_ball_path_abelian, horoball_distance, horoball_geodesic, level_interpolate, sibling_point, HoroballVertex,
    LatticeGraph,
};
use relhyp::presentations::{
    cayley_ball, is_sensible, AbelianGroup, LatticePoint, RelativeStructure, SensibleGeneratingSet, SensibleLattice,
    Word,
};
use relhyp::splittings::{
    connectivity_decision, dunwoody_decomposition, edge_group_closure, recognize_splitting_shape, Budgets, TietzeBudget,
};

fn z(x: i64, k: u32) -> HoroballVertex<LatticePoint> {
    HoroballVertex::new(LatticePoint::new(vec![x], 0), k)
}

fn z2(x: i64, y: i64, k: u32) -> HoroballVertex<LatticePoint> {
    HoroballVertex::new(LatticePoint::new(vec![x, y], 0), k)
}

#[test]
fn duplicated_torsion_generator_is_not_sensible() {
    // Z x Z/2 on generators a, t
    let g = AbelianGroup::from_relations(2, &[vec![0, 2]]).unwrap();
    let a = Word::power(0, 1);
    let t = Word::power(1, 1);
    // brute force: t has order 2 and generates the torsion subgroup alone
    assert!(!g.coords_of(&t).unwrap().is_zero());
    assert!(g.coords_of(&t.concat(&t)).unwrap().is_zero());
    assert_eq!(g.torsion_orders(), [2]);
    let singleton = SensibleGeneratingSet { a1: vec![a.clone()], a2: vec![t.clone()] };
    let doubled = SensibleGeneratingSet { a1: vec![a], a2: vec![t.clone(), t] };
    assert!(is_sensible(&singleton, &g));
    assert!(!is_sensible(&doubled, &g));
}

#[test]
fn z2_cayley_ball_of_radius_two() {
    let s = structure("z2.json");
    let brute = (-2i64..=2).flat_map(|x| (-2i64..=2).map(move |y| (x, y))).filter(|(x, y)| x.abs() + y.abs() <= 2).count();
    assert_eq!(brute, 13);
    assert_eq!(cayley_ball(&s, 2).unwrap().len(), brute);
}

#[test]
fn horoball_over_z_from_0_to_8() {
    let g = LatticeGraph::segment(-40, 40).unwrap();
    let ex = explicit_horoball(1, -40, 40, 8);
    let bfs = ex.bfs(ex.id(&(vec![0], 0)));
    let oracle = bfs[ex.id(&(vec![8], 0))];
    // min(8, 2 + 4, 4 + 2, 6 + 1)
    let closed = [8u32, 2 + 4, 4 + 2, 6 + 1].into_iter().min().unwrap();
    assert_eq!((oracle, closed), (6, 6));
    assert_eq!(horoball_distance(&z(0, 0), &z(8, 0), &g).unwrap(), 6);

    let path = horoball_geodesic(&z(0, 0), &z(8, 0), &g).unwrap();
    let depths: Vec<u32> = path.iter().map(|v| v.depth).collect();
    assert_eq!(path.len() - 1, 6);
    assert_eq!(depths, vec![0, 1, 2, 2, 2, 1, 0]);
    assert_eq!(path[2].base.free, vec![0]);
    assert_eq!(path[4].base.free, vec![8]);
}

#[test]
fn far_sibling_over_z() {
    let g = LatticeGraph::standard(1, &[]).unwrap();
    let (p0, p1) = (z(0, 4), z(0, 1));
    let p2 = sibling_point(&p0, &p1, 2, &g).unwrap();
    assert_eq!(p2, z(48, 1));
    let ex = explicit_horoball(1, -100, 100, 9);
    let id = |v: &HoroballVertex<LatticePoint>| ex.id(&(v.base.free.clone(), v.depth));
    let from0 = ex.bfs(id(&p0));
    let (d01, d02) = (from0[id(&p1)], from0[id(&p2)]);
    let d12 = ex.bfs(id(&p1))[id(&p2)];
    assert_eq!(d02, d01 + 3);
    assert_eq!(gromov_product(d01.into(), d02.into(), d12.into()), Half(0));
}

#[test]
fn sibling_below_p0_when_the_geodesic_turns() {
    let g = LatticeGraph::standard(1, &[]).unwrap();
    let (p0, p1) = (z(0, 3), z(40, 1));
    let p2 = sibling_point(&p0, &p1, 2, &g).unwrap();
    assert_eq!(p2, z(0, 1));
    let ex = explicit_horoball(1, -100, 100, 9);
    let id = |v: &HoroballVertex<LatticePoint>| ex.id(&(v.base.free.clone(), v.depth));
    let from0 = ex.bfs(id(&p0));
    let (d01, d02) = (from0[id(&p1)], from0[id(&p2)]);
    let d12 = ex.bfs(id(&p1))[id(&p2)];
    assert!(d02 <= d01 + 3);
    assert_eq!(gromov_product(d01.into(), d02.into(), d12.into()), Half(0));
}

#[test]
fn vertical_pair_admits_p1_itself() {
    let g = LatticeGraph::standard(1, &[]).unwrap();
    let (p0, p1) = (z(5, 2), z(5, 1));
    let ex = explicit_horoball(1, -100, 100, 9);
    let id = |v: &HoroballVertex<LatticePoint>| ex.id(&(v.base.free.clone(), v.depth));
    let d01 = ex.bfs(id(&p0))[id(&p1)];
    assert_eq!(d01, 1);
    // p2 = p1: d(p0, p1) <= d(p0, p1) + 3 and (p1 . p1)_{p0} = d(p0, p1) <= 3
    assert!(gromov_product(d01.into(), d01.into(), 0) <= Half::from_int(3));
    let p2 = sibling_point(&p0, &p1, 2, &g).unwrap();
    let from0 = ex.bfs(id(&p0));
    let d02 = from0[id(&p2)];
    let d12 = ex.bfs(id(&p1))[id(&p2)];
    assert!(d02 <= d01 + 3);
    assert!(gromov_product(d01.into(), d02.into(), d12.into()) <= Half::from_int(3));
}

#[test]
fn router_around_the_corner() {
    let l = SensibleLattice::standard(2, &[]).unwrap();
    let (a, b) = (LatticePoint::new(vec![3, 0], 0), LatticePoint::new(vec![0, 3], 0));
    // complement BFS over [-20, 20]^2 without the ball of radius 2
    let grid = explicit_horoball(2, -20, 20, 0);
    let allowed = |i: usize| grid.keys[i].0.iter().map(|x| x.abs()).sum::<i64>() >= 3;
    let reach = grid.bfs_where(grid.id(&(vec![3, 0], 0)), allowed);
    let shortest = reach[grid.id(&(vec![0, 3], 0))];
    assert!(shortest != UNREACHED && shortest <= 18);
    let path = avoid_ball_path_abelian(&a, &b, 3, &l).unwrap();
    assert!(path.len() - 1 <= 18 && path.len() as u32 - 1 >= shortest);
    assert_eq!((path.first(), path.last()), (Some(&a), Some(&b)));
    for w in path.windows(2) {
        let d: i64 = w[0].free.iter().zip(&w[1].free).map(|(x, y)| (x - y).abs()).sum();
        assert_eq!(d, 1);
    }
    assert!(path.iter().all(|p| p.free.iter().map(|x| x.abs()).sum::<i64>() >= 3));
}

#[test]
fn level_interpolation_in_z2() {
    let g = LatticeGraph::standard(2, &[]).unwrap();
    let p = level_interpolate(&LatticePoint::new(vec![0, 0], 0), &LatticePoint::new(vec![5, 0], 0), 1, &g).unwrap();
    // BFS in the level-1 graph: neighbours at l1 distance 1 or 2
    let level = explicit_horoball(2, -10, 10, 1);
    let from = level.bfs_where(level.id(&(vec![0, 0], 1)), |i| level.keys[i].1 == 1);
    assert_eq!(from[level.id(&(vec![5, 0], 1))], 3);
    assert_eq!(p.len() - 1, 3);
    assert!(p.iter().all(|v| v.depth == 1));
}

#[test]
fn cusped_neighbours_are_symmetric() {
    for file in ["z2_free_z2.json", "f2.json", "z2_z4.json"] {
        let s = structure(file);
        let x = CuspedSpace::assemble(&s);
        let b = ball(&x, &x.origin(), 3, 1 << 20, Exec::Sequential).unwrap();
        for v in &b.vertices {
            for u in x.neighbors(v).unwrap() {
                assert!(x.neighbors(&u).unwrap().contains(v), "{file}: {} -> {}", x.render(v), x.render(&u));
            }
        }
    }
}

#[test]
fn small_cusped_balls() {
    let f2 = structure("f2.json");
    let x = CuspedSpace::assemble(&f2);
    let tree = free_tree(2, 2);
    assert_eq!(tree.keys.len(), 1 + 4 + 12);
    assert_eq!(ball(&x, &x.origin(), 2, 1 << 20, Exec::Sequential).unwrap().len(), tree.keys.len());

    let zz = structure("z2_free_z2.json");
    let x = CuspedSpace::assemble(&zz);
    let b = ball(&x, &x.origin(), 1, 1 << 20, Exec::Sequential).unwrap();
    let cayley = b.vertices.iter().filter(|v| matches!(v, CuspedVertex::Cayley(_))).count();
    let horo: Vec<_> = b.vertices.iter().filter(|v| v.depth() == 1).collect();
    assert_eq!((b.len(), cayley, horo.len()), (11, 9, 2));
}

#[test]
fn horoball_pairs_in_the_cusped_space() {
    let zz = structure("z2_free_z2.json");
    let x = CuspedSpace::assemble(&zz);
    let g = LatticeGraph::standard(2, &[]).unwrap();
    let mut rng = SplitMix(2024);
    for _ in 0..100 {
        let (ax, ay, bx, by) = (rng.range(-5, 5), rng.range(-5, 5), rng.range(-5, 5), rng.range(-5, 5));
        let (da, db) = (rng.range(1, 3) as u32, rng.range(1, 3) as u32);
        let word = |p: i64, q: i64| {
            let w = Word::power(0, p).concat(&Word::power(1, q));
            w.render(zz.names())
        };
        let u = x.parse_vertex(&format!("P0:{}@{da}", word(ax, ay))).unwrap();
        let v = x.parse_vertex(&format!("P0:{}@{db}", word(bx, by))).unwrap();
        let closed = horoball_distance(&z2(ax, ay, da), &z2(bx, by, db), &g).unwrap();
        let bfs = distance(&x, &u, &v, 16, 4_000_000).unwrap();
        assert_eq!(bfs, Some(closed as u32), "{} {}", x.render(&u), x.render(&v));
    }
}

#[test]
fn horoball_over_z_four_point_baseline() {
    let h = Horoball(LatticeGraph::standard(1, &[]).unwrap());
    let est = estimate_delta(&h, &z(0, 0), 5, None, 1 << 20, Exec::Sequential).unwrap();
    let ex = explicit_horoball(1, -80, 80, 8);
    let from_c = ex.bfs(ex.id(&(vec![0], 0)));
    let inside: Vec<usize> = (0..ex.keys.len()).filter(|&i| from_c[i] <= 5).collect();
    let mut dist = vec![Vec::new(); ex.keys.len()];
    for &i in &inside {
        dist[i] = ex.bfs(i);
    }
    assert_eq!(est.delta, Half(four_point_defect(&dist, &inside)));
    assert_eq!(est.delta, Half(3));
    assert!(!est.certified);
}

#[test]
fn deep_pair_in_z2_free_z2() {
    let zz = structure("z2_free_z2.json");
    let x = CuspedSpace::assemble(&zz);
    let ledger = relhyp::cusped::ConstantsLedger::toy_from_json(
        r#"{"delta":1,"C":0,"M":6,"k":2,"K":50,"R":{"slope":0,"intercept":4}}"#,
    )
    .unwrap();
    let b = ball(&x, &x.origin(), 5, 1 << 21, Exec::Parallel).unwrap();
    let a = x.parse_vertex("P0:A A A A@2").unwrap();
    let c = x.parse_vertex("P0:a a a a@2").unwrap();
    let m = b.dist_to(&a).unwrap().min(b.dist_to(&c).unwrap());
    assert_eq!(m, 3);
    // complement BFS in the ball: a path avoiding the open ball of radius m exists
    let (ia, ic) = (b.index_of(&a).unwrap(), b.index_of(&c).unwrap());
    let comp = b.bfs_from(ia, u32::MAX, |v| b.dist[v] >= m);
    assert!(comp[ic] != u32::MAX);

    let path = deep_pair_path(&x, &b, &a, &c, &ledger).unwrap();
    assert_eq!((path.first(), path.last()), (Some(&a), Some(&c)));
    assert!(path.len() - 1 <= 50);
    for w in path.windows(2) {
        assert!(x.neighbors(&w[0]).unwrap().contains(&w[1]));
    }
    for v in &path {
        let d = distance(&x, &x.origin(), v, m.saturating_sub(1), 1 << 21).unwrap();
        assert!(d.is_none(), "{} enters the forbidden ball", x.render(v));
        assert!(matches!(v, CuspedVertex::Horo { parabolic: 0, .. }));
    }
    assert_eq!(deep_pair_path(&x, &b, &a, &a, &ledger).unwrap(), vec![a.clone()]);
}

#[test]
fn rim_point_lies_on_a_long_geodesic() {
    let zz = structure("z2_free_z2.json");
    let x = CuspedSpace::assemble(&zz);
    let rim = x.parse_vertex("a").unwrap();
    assert!(cusped_ray_cover_check(&x, &x.origin(), &rim, 10, 0, 1 << 21, Exec::Parallel).unwrap());
    // oracle: within the horoball the vertical ray below the rim point ends
    // at distance 1 + 10 from the identity, and depth is 1-Lipschitz, so no
    // shortcut through other rim points exists
    let g = LatticeGraph::standard(2, &[]).unwrap();
    assert_eq!(horoball_distance(&z2(0, 0, 0), &z2(1, 0, 10), &g).unwrap(), 11);
    let ex = explicit_horoball(2, -3, 3, 3);
    let d = ex.bfs(ex.id(&(vec![0, 0], 0)));
    assert_eq!(d[ex.id(&(vec![1, 0], 3))], 4);
    // the exhaustive method agrees at a horizon it can afford
    assert!(ray_cover_check(&x, &x.origin(), &rim, 2, 0, 1 << 21, Exec::Parallel).unwrap());
    assert!(cusped_ray_cover_check(&x, &x.origin(), &x.origin(), 4, 0, 1 << 20, Exec::Parallel).unwrap());
    let f2 = CuspedSpace::assemble(&structure("f2.json"));
    let v = f2.parse_vertex("a b").unwrap();
    assert!(cusped_ray_cover_check(&f2, &f2.origin(), &v, 3, 0, 1 << 20, Exec::Sequential).unwrap());
}

#[test]
fn thick_part_boundaries() {
    let zz = structure("z2_free_z2.json");
    let x = CuspedSpace::assemble(&zz);
    assert!(thick_part_member(&x.origin(), 0));
    assert!(!thick_part_member(&x.parse_vertex("P0:a@5").unwrap(), 4));
    assert!(thick_part_member(&x.parse_vertex("P0:a@4").unwrap(), 4));
}

#[test]
fn free_group_toy_pairs_are_separated_through_the_center() {
    let s = structure("f2.json");
    let x = CuspedSpace::assemble(&s);
    let run = check_connectivity(&x, &x.origin(), &toy(2, 0, 2), 1, 3, CheckOptions::default()).unwrap();
    assert!(run.verdict.is_unknown());
    let (a, b, da, db) = run.violating.unwrap();
    let (ta, tb) = (x.render(&a), x.render(&b));
    assert_eq!(da, db);
    // different first letters: every path between them passes the center
    assert_ne!(ta.split(' ').next(), tb.split(' ').next(), "{ta} / {tb}");
    let tree = free_tree(2, 6);
    let ia = tree.keys.iter().position(|k| render_free(k) == ta).unwrap();
    let ib = tree.keys.iter().position(|k| render_free(k) == tb).unwrap();
    let reach = tree.bfs_where(ia, |v| tree.keys[v].len() as u32 >= da);
    assert_eq!(reach[ib], UNREACHED);
}

/// Brute-force connectivity check at toy constants: every pair in the
/// radius-`r` ball with equal distance to the center and distance at most
/// `m` is joined within `n` steps outside the open ball of radius
/// `min(d(v0, x), d(v0, y))`, inside `B(v0, r + max(n, m / 2))`.
fn brute_passes<G: ImplicitGraph>(g: &G, center: &G::V, r: u32, m: u32, n: u32) -> bool {
    let b = ball(g, center, r + n.max(m.div_ceil(2)), 1 << 21, Exec::Sequential).unwrap();
    let inner = b.count_within(r);
    for xi in 0..inner {
        let near = b.bfs_from(xi, m, |_| true);
        for yi in xi + 1..inner {
            if near[yi] > m || b.dist[xi] != b.dist[yi] {
                continue;
            }
            let floor = b.dist[xi];
            let reach = b.bfs_from(xi, n, |v| b.dist[v] >= floor);
            if reach[yi] > n {
                return false;
            }
        }
    }
    true
}

#[test]
fn synthetic_single_cusp_is_connected_at_toy_constants() {
    let s = structure("z2_cusp.json");
    let l = toy(2, 0, 2);
    let b = Budgets { tietze: TietzeBudget { moves: 0, word_length: 2, count: 4 }, n_start: Some(1), ..Budgets::default() };
    let (v, _) = connectivity_decision(&s, &l, &b).unwrap();
    assert_eq!(v, Verdict::Connected { n: Some(3), certified: false });
    let x = CuspedSpace::assemble(&s);
    assert!(!brute_passes(&x, &x.origin(), 2, 2, 2));
    assert!(brute_passes(&x, &x.origin(), 2, 2, 3));

    let h = Horoball(LatticeGraph::standard(2, &[]).unwrap());
    let run = check_connectivity(&h, &z2(0, 0, 0), &l, 1, 6, CheckOptions::default()).unwrap();
    let n = match run.verdict {
        Verdict::Connected { n: Some(n), certified: false } => n,
        other => panic!("{other:?}"),
    };
    assert!(brute_passes(&h, &z2(0, 0, 0), 2, 2, n as u32));
    assert!(n == 1 || !brute_passes(&h, &z2(0, 0, 0), 2, 2, n as u32 - 1));
}

#[test]
fn commutator_reads_as_an_hnn_extension() {
    let s = structure("z2.json");
    let g = recognize_splitting_shape(&s.ambient).unwrap();
    assert_eq!(g.vertices.len(), 1);
    let e = &g.edges[0];
    let names = s.names();
    assert_eq!(e.stable_letter.as_ref().map(|t| t.render(names)), Some("b".into()));
    assert_eq!(e.generators.iter().map(|w| w.render(names)).collect::<Vec<_>>(), vec!["a"]);
    assert_eq!(e.target_images.len(), 1);
}

#[test]
fn order_two_edge_group() {
    let s = RelativeStructure::from_json(r#"{"generators":["a","b"],"relators":["a a"]}"#).unwrap();
    let a = s.parse_word("a").unwrap();
    let t = edge_group_closure(&[a.clone()], &s.oracle, 64).unwrap().unwrap();
    // oracle: 1 and a are distinct and a a is trivial
    assert!(!s.oracle.is_trivial(&a).unwrap());
    assert!(s.oracle.is_trivial(&a.concat(&a)).unwrap());
    assert_eq!(t.len(), 2);
}

#[test]
fn free_group_of_rank_three_has_three_vertices() {
    let s = structure("f3.json");
    let l = relhyp::cusped::compute_constants(1, None, true).unwrap();
    let b = Budgets { tietze: TietzeBudget { moves: 0, word_length: 2, count: 4 }, ..Budgets::default() };
    let (d, _) = dunwoody_decomposition(&s, &l, &b).unwrap();
    assert_eq!(d.graph.vertices.len(), 3);
    assert!(d.complete);
    assert_eq!(d.edge_orders, vec![1, 1]);
    let mut images: Vec<String> =
        d.graph.vertices.iter().map(|v| v.embedding.iter().map(|w| w.render(s.names())).collect()).collect();
    images.sort();
    assert_eq!(images, vec!["a", "b", "c"]);
}

#[test]
fn gromov_product_on_a_geodesic_vanishes() {
    let ex = explicit_horoball(1, -20, 20, 4);
    let (x, y) = (ex.id(&(vec![-5], 0)), ex.id(&(vec![5], 0)));
    let dx = ex.bfs(x);
    let dy = ex.bfs(y);
    for zi in 0..ex.keys.len() {
        if dx[zi] + dy[zi] == dx[y] {
            assert_eq!(gromov_product(dx[zi].into(), dy[zi].into(), dx[y].into()), Half(0));
        }
    }
    assert_eq!(gromov_product(5, 7, 4), Half::from_int(4));
}
