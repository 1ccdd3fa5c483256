use std::collections::BTreeMap;

use polygraph::freecat::Bounds;
use polygraph::limitlab::{
    check_functoriality, computad_topos_gate, graph_morphisms, graph_path_experiment, is_pullback, is_weak_pullback,
    preserves_pullbacks_experiment, pullback_sets, wide_pullback_sets, Cospan, FinSetMap, GateVerdict, Graph,
    IdentityFunctor, ListFunctor, MultisetFunctor, PairsFunctor, SetFunctor, SliceFunctor, Square, Witness,
};
use proptest::prelude::*;

fn map(cod: usize, images: &[usize]) -> FinSetMap {
    FinSetMap::new(cod, images.to_vec()).unwrap()
}

#[test]
fn pullbacks_have_the_universal_property() {
    // every cone from a set of size <= 2 factors uniquely, for cospans over sets of size <= 2
    for cospan in Cospan::all(2, 2) {
        let pb = pullback_sets(&cospan.f, &cospan.g).unwrap();
        for n in 0..=2 {
            for u in FinSetMap::all(n, cospan.f.domain) {
                for v in FinSetMap::all(n, cospan.g.domain) {
                    let commutes = u.then(&cospan.f).unwrap() == v.then(&cospan.g).unwrap();
                    let factors = FinSetMap::all(n, pb.pairs.len())
                        .into_iter()
                        .filter(|h| h.then(&pb.left).unwrap() == u && h.then(&pb.right).unwrap() == v)
                        .count();
                    assert_eq!(factors, usize::from(commutes));
                }
            }
        }
    }
}

#[test]
fn universal_property_with_larger_cones() {
    let f = map(2, &[0, 1, 1]);
    let g = map(2, &[1, 0]);
    let pb = pullback_sets(&f, &g).unwrap();
    for n in [3, 4] {
        for u in FinSetMap::all(n, 3) {
            for v in FinSetMap::all(n, 2) {
                if u.then(&f).unwrap() != v.then(&g).unwrap() {
                    continue;
                }
                let factors = FinSetMap::all(n, pb.pairs.len())
                    .into_iter()
                    .filter(|h| h.then(&pb.left).unwrap() == u && h.then(&pb.right).unwrap() == v)
                    .count();
                assert_eq!(factors, 1);
            }
        }
    }
}

#[test]
fn wide_pullbacks_iterate_binary_ones() {
    let legs = [map(2, &[0, 1, 1]), map(2, &[1, 1]), map(2, &[0, 1])];
    let wide = wide_pullback_sets(&legs).unwrap();
    let mut iterated = Vec::new();
    let first = pullback_sets(&legs[0], &legs[1]).unwrap();
    let through = first.left.then(&legs[0]).unwrap();
    for (i, j) in pullback_sets(&through, &legs[2]).unwrap().pairs {
        let (a, b) = first.pairs[i];
        iterated.push(vec![a, b, j]);
    }
    iterated.sort();
    assert_eq!(wide, iterated);
    assert!(wide_pullback_sets(&[map(2, &[0]), map(3, &[0])]).is_err());
}

proptest! {
    #[test]
    fn pullback_squares_are_weak_pullbacks(
        a in proptest::collection::vec(0usize..3, 0..4),
        b in proptest::collection::vec(0usize..3, 0..4),
        extra in proptest::collection::vec(any::<prop::sample::Index>(), 0..3),
    ) {
        let (f, g) = (map(3, &a), map(3, &b));
        let s = Square::of_pullback(&f, &g).unwrap();
        prop_assert!(is_pullback(&s));
        prop_assert!(is_weak_pullback(&s).is_some());
        // add junk elements over existing ones: still weak, no longer a pullback
        let pb = pullback_sets(&f, &g).unwrap();
        if !pb.pairs.is_empty() && !extra.is_empty() {
            let mut left = pb.left.images.clone();
            let mut top = pb.right.images.clone();
            for ix in &extra {
                let k = ix.index(pb.pairs.len());
                left.push(pb.pairs[k].0);
                top.push(pb.pairs[k].1);
            }
            let s = Square::new(map(g.domain, &top), map(f.domain, &left), g.clone(), f.clone()).unwrap();
            prop_assert!(!is_pullback(&s));
            let section = is_weak_pullback(&s).unwrap();
            prop_assert_eq!(section.len(), pb.pairs.len());
        }
    }

    #[test]
    fn functors_respect_composition(
        first in proptest::collection::vec(0usize..3, 0..4),
        second in proptest::collection::vec(0usize..2, 3),
    ) {
        let (f, g) = (map(3, &first), map(2, &second));
        prop_assert!(check_functoriality(&IdentityFunctor, &f, &g).unwrap());
        prop_assert!(check_functoriality(&PairsFunctor, &f, &g).unwrap());
        let (lists, bags) = (ListFunctor { max_len: 2 }, MultisetFunctor { max_size: 3 });
        prop_assert!(check_functoriality(&lists, &f, &g).unwrap());
        prop_assert!(check_functoriality(&bags, &f, &g).unwrap());
    }
}

#[test]
fn engine_slices_are_functorial() {
    let s = SliceFunctor::new(2, Bounds::with_size(2));
    let f = map(3, &[0, 2]);
    let g = map(2, &[1, 0, 1]);
    assert!(check_functoriality(&s, &f, &g).unwrap());
    assert_eq!(s.elements(2).len(), MultisetFunctor { max_size: 2 }.elements(2).len());
}

/// Lists over a pullback, by explicit bijection with pairs of equal-length lists.
#[test]
fn lists_preserve_pullbacks_by_bijection() {
    let r = preserves_pullbacks_experiment(&ListFunctor { max_len: 3 }, &Cospan::all(3, 3)).unwrap();
    assert!(r.all_preserved(), "{:?}", r.failures.first());
    assert_eq!(r.cases, r.pullbacks_preserved);
    let counted: usize = Cospan::all(3, 3)
        .iter()
        .map(|c| {
            let pb = pullback_sets(&c.f, &c.g).unwrap().pairs.len();
            (0..=3).map(|l| pb.pow(l)).sum::<usize>()
        })
        .sum();
    let list = ListFunctor { max_len: 3 };
    let direct: usize =
        Cospan::all(3, 3).iter().map(|c| list.elements(pullback_sets(&c.f, &c.g).unwrap().pairs.len()).len()).sum();
    assert_eq!(counted, direct);
}

#[test]
fn multisets_fail_with_a_replayable_witness() {
    let f = map(1, &[0, 0]);
    let cospan = Cospan::new(f.clone(), f).with_names(&["a", "b"], &["a", "b"], &["*"]);
    let r = preserves_pullbacks_experiment(&MultisetFunctor { max_size: 2 }, &[cospan]).unwrap();
    assert_eq!(r.failures.len(), 1);
    let case = &r.failures[0];
    assert!(case.weak_pullback);
    // brute force: multisets of size 2 over the four pairs, grouped by their projections
    let pairs = [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")];
    let mut by_image: BTreeMap<(Vec<&str>, Vec<&str>), Vec<String>> = BTreeMap::new();
    for i in 0..4 {
        for j in i..4 {
            let mut l = vec![pairs[i].0, pairs[j].0];
            let mut r = vec![pairs[i].1, pairs[j].1];
            l.sort();
            r.sort();
            let name = format!("{{({},{}),({},{})}}", pairs[i].0, pairs[i].1, pairs[j].0, pairs[j].1);
            by_image.entry((l, r)).or_default().push(name);
        }
    }
    assert_eq!(by_image.values().map(Vec::len).sum::<usize>(), 10);
    assert_eq!(by_image.len(), 9);
    let conflated = by_image.values().find(|v| v.len() > 1).unwrap();
    match case.witness.as_ref().unwrap() {
        Witness::Conflated { first, second, .. } => {
            assert_eq!(&vec![first.clone(), second.clone()], conflated);
        }
        w => panic!("{w:?}"),
    }
}

#[test]
fn failures_always_carry_witnesses() {
    let r = preserves_pullbacks_experiment(&MultisetFunctor { max_size: 2 }, &Cospan::all(2, 2)).unwrap();
    assert!(!r.failures.is_empty());
    for case in &r.failures {
        assert!(case.witness.is_some(), "{}", case.cospan);
    }
    let pairs = preserves_pullbacks_experiment(&PairsFunctor, &Cospan::all(2, 2)).unwrap();
    assert!(pairs.all_preserved());
}

#[test]
fn path_tables_match_direct_enumeration() {
    for g in Graph::enumerate(2, 3) {
        for h in Graph::enumerate(2, 2) {
            for m in graph_morphisms(&g, &h) {
                assert_eq!(m.vertex.len(), g.vertices);
                for (e, &(s, t)) in g.edges.iter().enumerate() {
                    assert_eq!(h.edges[m.edge[e]], (m.vertex[s], m.vertex[t]));
                }
            }
        }
    }
    let small = graph_path_experiment(2, 2, 3, 10, 1).unwrap();
    assert_eq!(small.failures.len(), 0);
    assert_eq!(small.engine_graphs_agreed, small.graphs);
    assert_eq!(small.engine_cospans_agreed, small.engine_cospans_checked);
}

#[test]
fn gates_give_the_expected_verdicts() {
    let b = Bounds::with_size(3);
    let one = computad_topos_gate(1, b, 7).unwrap();
    assert_eq!(one.verdict, GateVerdict::PassWithinBounds);
    assert_eq!(one.engine_agreed, one.engine_checked);
    let three = computad_topos_gate(3, b, 7).unwrap();
    assert_eq!(three.verdict, GateVerdict::Counterexample);
    assert_eq!(three.oracle_replay, Some(true));
    // the witness has size two and survives a larger bound
    let four = computad_topos_gate(3, Bounds::with_size(4), 7).unwrap();
    assert_eq!(three.witness, four.witness);
    assert!(computad_topos_gate(4, b, 7).is_err());
}
