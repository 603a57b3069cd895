mod common;

use common::*;
use proptest::prelude::*;
use relhyp::bm::{ddagger, ddagger_monotone_check, star_pairs, witness_valid, Verdict};
use relhyp::cusped::{compute_constants, CuspedSpace};
use relhyp::exec::Exec;
use relhyp::graph::{ball, estimate_delta, gromov_product, Half, ImplicitGraph};
use relhyp::horoball::{
    avoid_ball_path_abelian, horoball_distance, horoball_geodesic, is_avoiding_path, is_normal_form, sibling_point,
    HoroballVertex, LatticeGraph,
};
use relhyp::presentations::{infer_oracle, FinitePresentation, LatticePoint, SensibleLattice, Word};
use relhyp::splittings::{check_multi_ended, edge_group_closure, recognize_splitting_shape, tietze_enumerate, Budgets, TietzeBudget};

fn hv(free: Vec<i64>, depth: u32) -> HoroballVertex<LatticePoint> {
    HoroballVertex::new(LatticePoint::new(free, 0), depth)
}

fn point2() -> impl Strategy<Value = (Vec<i64>, u32)> {
    (prop::collection::vec(-40i64..=40, 2), 0u32..6)
}

fn word(gens: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..gens, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, inv)| relhyp::presentations::Letter::new(g, inv))))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, .. ProptestConfig::default() })]

    #[test]
    fn horoball_metric_is_symmetric_and_triangular(a in point2(), b in point2(), c in point2()) {
        let g = LatticeGraph::standard(2, &[]).unwrap();
        let (a, b, c) = (hv(a.0, a.1), hv(b.0, b.1), hv(c.0, c.1));
        let ab = horoball_distance(&a, &b, &g).unwrap();
        prop_assert_eq!(ab, horoball_distance(&b, &a, &g).unwrap());
        prop_assert!(ab <= horoball_distance(&a, &c, &g).unwrap() + horoball_distance(&c, &b, &g).unwrap());
        prop_assert_eq!(ab == 0, a == b);
    }

    #[test]
    fn horoball_geodesics_realise_the_distance(a in point2(), b in point2()) {
        let g = LatticeGraph::standard(2, &[]).unwrap();
        let (a, b) = (hv(a.0, a.1), hv(b.0, b.1));
        let p = horoball_geodesic(&a, &b, &g).unwrap();
        prop_assert_eq!((p.len() - 1) as u64, horoball_distance(&a, &b, &g).unwrap());
        prop_assert_eq!(p.first(), Some(&a));
        prop_assert_eq!(p.last(), Some(&b));
        prop_assert!(is_normal_form(&p, &g).unwrap());
    }

    #[test]
    fn horoball_distance_matches_bfs_on_a_small_box(ax in -12i64..=12, ad in 0u32..4, bx in -12i64..=12, bd in 0u32..4) {
        let g = LatticeGraph::standard(1, &[]).unwrap();
        let ex = explicit_horoball(1, -40, 40, 6);
        let d = ex.bfs(ex.id(&(vec![ax], ad)))[ex.id(&(vec![bx], bd))];
        prop_assert_eq!(u64::from(d), horoball_distance(&hv(vec![ax], ad), &hv(vec![bx], bd), &g).unwrap());
    }

    #[test]
    fn sibling_bounds(x0 in -30i64..=30, y0 in -30i64..=30, x1 in -30i64..=30, y1 in -30i64..=30, k in 1u32..4, extra in 0u32..3) {
        let g = LatticeGraph::standard(2, &[]).unwrap();
        let p0 = hv(vec![x0, y0], k + extra);
        let p1 = hv(vec![x1, y1], k - 1);
        let p2 = sibling_point(&p0, &p1, k, &g).unwrap();
        prop_assert_eq!(p2.depth, k - 1);
        let d01 = horoball_distance(&p0, &p1, &g).unwrap();
        let d02 = horoball_distance(&p0, &p2, &g).unwrap();
        let d12 = horoball_distance(&p1, &p2, &g).unwrap();
        prop_assert!(d02 <= d01 + 3);
        prop_assert!(gromov_product(d01, d02, d12) <= Half::from_int(3));
    }

    #[test]
    fn router_paths_avoid_the_ball(a in prop::collection::vec(-12i64..=12, 2), b in prop::collection::vec(-12i64..=12, 2), r in 1u64..6, t in 0u32..4) {
        let l = SensibleLattice::standard(2, &[4]).unwrap();
        let (a, b) = (LatticePoint::new(a, t), LatticePoint::new(b, (t * 3) % 4));
        prop_assume!(l.norm(&a) >= r && l.norm(&b) >= r);
        let p = avoid_ball_path_abelian(&a, &b, r, &l).unwrap();
        prop_assert!(is_avoiding_path(&p, &a, &b, r, 3 * l.dist(&a, &b), &l));
    }

    #[test]
    fn lattice_geodesics(a in prop::collection::vec(-20i64..=20, 2), b in prop::collection::vec(-20i64..=20, 2), s in 0u32..4, t in 0u32..4) {
        let l = SensibleLattice::standard(2, &[4]).unwrap();
        let (a, b) = (LatticePoint::new(a, s), LatticePoint::new(b, t));
        let p = l.geodesic(&a, &b);
        prop_assert_eq!((p.len() - 1) as u64, l.dist(&a, &b));
        prop_assert!(p.windows(2).all(|w| l.dist(&w[0], &w[1]) == 1));
        prop_assert_eq!(l.dist(&a, &b), l.norm(&l.sub(&b, &a)));
    }

    #[test]
    fn ledger_identities(delta in 1u64..=40) {
        let l = compute_constants(delta, None, true).unwrap();
        let o = constants(delta);
        prop_assert_eq!(&l.c, &o.c);
        prop_assert_eq!(&l.m, &o.m);
        prop_assert_eq!(&l.k, &o.k);
        prop_assert_eq!(&l.big_k, &o.big_k);
        prop_assert_eq!(&l.r.slope, &o.r_slope);
        prop_assert_eq!(&l.r.intercept, &o.r_intercept);
    }

    #[test]
    fn gromov_products_are_bounded(a in point2(), b in point2(), c in point2()) {
        let g = LatticeGraph::standard(2, &[]).unwrap();
        let (x, y, z) = (hv(a.0, a.1), hv(b.0, b.1), hv(c.0, c.1));
        let (dxz, dyz, dxy) = (
            horoball_distance(&x, &z, &g).unwrap(),
            horoball_distance(&y, &z, &g).unwrap(),
            horoball_distance(&x, &y, &g).unwrap(),
        );
        let p = gromov_product(dxz, dyz, dxy);
        prop_assert!(p >= Half(0));
        prop_assert!(p <= Half::from_int(dxz.min(dyz) as i64));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, .. ProptestConfig::default() })]

    #[test]
    fn cusped_neighbours_are_symmetric(w in word(4, 8), depth in 0u32..4, which in 0usize..2) {
        let s = structure("z2_free_z2.json");
        let x = CuspedSpace::assemble(&s);
        let v = if depth == 0 { x.cayley(&w).unwrap() } else { x.horo(which, &w, depth).unwrap() };
        for u in x.neighbors(&v).unwrap() {
            prop_assert!(x.neighbors(&u).unwrap().contains(&v));
        }
    }

    #[test]
    fn balls_are_nested(r in 0u32..4, pick in 0usize..3) {
        let s = structure(["f2.json", "z2_free_z2.json", "z2_z4.json"][pick]);
        let x = CuspedSpace::assemble(&s);
        let small = ball(&x, &x.origin(), r, 1 << 20, Exec::Sequential).unwrap();
        let big = ball(&x, &x.origin(), r + 1, 1 << 20, Exec::Parallel).unwrap();
        for (v, d) in small.vertices.iter().zip(&small.dist) {
            prop_assert_eq!(big.dist_to(v), Some(*d));
        }
        prop_assert_eq!(big.count_within(r), small.len());
    }

    #[test]
    fn ddagger_witnesses_are_valid(m in 1i64..4, n in 0u64..3, seed in any::<u64>()) {
        let s = structure("z2_free_z2.json");
        let x = CuspedSpace::assemble(&s);
        let ledger = toy(m, 0, 2);
        let b = ball(&x, &x.origin(), 5, 1 << 20, Exec::Parallel).unwrap();
        let pairs = star_pairs(&b, 2, 0, &ledger, Exec::Parallel).unwrap();
        prop_assert_eq!(&pairs, &star_pairs(&b, 2, 0, &ledger, Exec::Sequential).unwrap());
        let mut rng = SplitMix(seed);
        for _ in 0..20.min(pairs.len()) {
            let p = pairs[rng.below(pairs.len() as u64) as usize];
            prop_assert!(b.dist[p.x] == b.dist[p.y]);
            if let Some(path) = ddagger(&b, p.x, p.y, 0, n, &ledger).unwrap() {
                prop_assert!(witness_valid(&b, &path, p.x, p.y, 0, n, &ledger));
            }
            prop_assert!(ddagger_monotone_check(&b, p.x, p.y, 0, n, n + 1, &ledger).unwrap());
        }
    }

    #[test]
    fn star_pairs_match_brute_force(m in 0i64..4) {
        let s = structure("f2.json");
        let x = CuspedSpace::assemble(&s);
        let ledger = toy(m, 0, 2);
        let b = ball(&x, &x.origin(), 4, 1 << 20, Exec::Sequential).unwrap();
        let got: Vec<(String, String)> = star_pairs(&b, 2, 0, &ledger, Exec::Parallel)
            .unwrap()
            .into_iter()
            .map(|p| (x.render(&b.vertices[p.x]), x.render(&b.vertices[p.y])))
            .collect();
        let tree = free_tree(2, 2);
        let mut want = Vec::new();
        for i in 0..tree.keys.len() {
            let d = tree.bfs(i);
            for j in 0..tree.keys.len() {
                if tree.keys[i].len() == tree.keys[j].len() && i != j && i64::from(d[j]) <= m {
                    want.push((render_free(&tree.keys[i]), render_free(&tree.keys[j])));
                }
            }
        }
        for (a, c) in &got {
            prop_assert!(want.contains(&(a.clone(), c.clone())));
        }
        prop_assert_eq!(got.len() * 2, want.len());
    }

    #[test]
    fn tietze_stream_is_sound(moves in 0usize..3, len in 1usize..3, count in 1usize..120, pick in 0usize..3) {
        let (names, rels): (&[&str], &[&str]) = [
            (&["a", "b"][..], &["a b A B"][..]),
            (&["a", "b"][..], &["a a"][..]),
            (&["a", "b", "c"][..], &[][..]),
        ][pick];
        let p = FinitePresentation::parse(names, rels).unwrap();
        let o = infer_oracle(&p).unwrap();
        let items: Vec<_> = tietze_enumerate(&p, TietzeBudget { moves, word_length: len, count }).collect();
        prop_assert!(items.len() <= count);
        prop_assert_eq!(&items[0].presentation, &p);
        let mut keys = std::collections::HashSet::new();
        for item in &items {
            prop_assert!(keys.insert(item.presentation.canonical_key()));
            prop_assert!(item.moves.len() <= moves);
            for r in item.presentation.relators() {
                prop_assert!(o.is_trivial(&r.substitute(&item.defs)).unwrap());
            }
        }
    }

    #[test]
    fn recognised_shapes_reassemble(pick in 0usize..4) {
        let (names, rels): (&[&str], &[&str]) = [
            (&["a", "b"][..], &["a b A B"][..]),
            (&["a", "b"][..], &["a a"][..]),
            (&["a", "b", "c", "d"][..], &["a b A B", "c d C D"][..]),
            (&["a", "b", "c"][..], &[][..]),
        ][pick];
        let p = FinitePresentation::parse(names, rels).unwrap();
        let o = infer_oracle(&p).unwrap();
        let Some(g) = recognize_splitting_shape(&p) else { return Ok(()) };
        // every vertex relator holds in the ambient group and every edge
        // identification is an identity of the ambient group
        for v in &g.vertices {
            for r in v.presentation.relators() {
                prop_assert!(o.is_trivial(&r.substitute(&v.embedding)).unwrap());
            }
        }
        for e in &g.edges {
            for ((gen, si), ti) in e.generators.iter().zip(&e.source_images).zip(&e.target_images) {
                let src = si.substitute(&g.vertices[e.source].embedding);
                let tgt = ti.substitute(&g.vertices[e.target].embedding);
                prop_assert!(o.equal(gen, &src).unwrap());
                let conj = match &e.stable_letter {
                    Some(t) => t.inverse().concat(&src).concat(t),
                    None => src.clone(),
                };
                prop_assert!(o.equal(&conj, &tgt).unwrap() || o.equal(&t_conj(&e.stable_letter, &src), &tgt).unwrap());
            }
        }
    }

    #[test]
    fn closures_are_groups(w in word(2, 4)) {
        let p = FinitePresentation::parse(&["a", "b"], &["a a"]).unwrap();
        let o = infer_oracle(&p).unwrap();
        let a = Word::power(0, 1);
        let g = w.concat(&a).concat(&w.inverse());
        let t = edge_group_closure(&[g], &o, 8).unwrap().unwrap();
        prop_assert_eq!(t.len(), 2);
        prop_assert!(o.is_trivial(&t.elements[t.identity()]).unwrap());
        for i in 0..t.len() {
            prop_assert!(o.is_trivial(&t.elements[i].concat(&t.elements[t.inverse[i]])).unwrap());
            for j in 0..t.len() {
                let k = t.product[i][j];
                prop_assert!(o.equal(&t.elements[i].concat(&t.elements[j]), &t.elements[k]).unwrap());
            }
        }
        prop_assert!(edge_group_closure(&[Word::power(1, 1)], &o, 8).unwrap().is_none());
    }

    #[test]
    fn z2_is_never_split(moves in 0usize..2, count in 1usize..200) {
        let p = FinitePresentation::parse(&["a", "b"], &["a b A B"]).unwrap();
        let o = infer_oracle(&p).unwrap();
        let b = Budgets { tietze: TietzeBudget { moves, word_length: 2, count }, ..Budgets::default() };
        let (v, _) = check_multi_ended(&p, &o, &b).unwrap();
        prop_assert!(!matches!(v, Verdict::Disconnected { .. }), "Z2 reported split");
    }

    #[test]
    fn backends_agree(r in 1u32..3, seed in any::<u64>()) {
        let s = structure("z2_free_z2.json");
        let x = CuspedSpace::assemble(&s);
        let a = estimate_delta(&x, &x.origin(), r, Some((8, seed)), 1 << 20, Exec::Sequential).unwrap();
        let b = estimate_delta(&x, &x.origin(), r, Some((8, seed)), 1 << 20, Exec::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }
}

fn t_conj(t: &Option<Word>, w: &Word) -> Word {
    match t {
        Some(t) => t.concat(w).concat(&t.inverse()),
        None => w.clone(),
    }
}

#[test]
fn delta_estimates_grow_with_radius() {
    let s = structure("z2_free_z2.json");
    let x = CuspedSpace::assemble(&s);
    let mut last = Half(0);
    for r in 0..=2 {
        let e = estimate_delta(&x, &x.origin(), r, None, 1 << 21, Exec::Parallel).unwrap();
        assert!(e.delta >= last);
        assert!(e.exhaustive && !e.certified);
        last = e.delta;
    }
}
