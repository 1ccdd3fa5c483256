use std::collections::{BTreeMap, HashMap};

use polygraph::freecat::{generate_terms, Bounds, CongruenceEngine, Term, Verdict};

fn scalar_engine(names: &[&str], size: usize) -> CongruenceEngine {
    let mut e = CongruenceEngine::new(Bounds::with_size(size));
    e.add_points(&["x"]).unwrap();
    e.add_level(vec![]).unwrap();
    e.saturate().unwrap();
    let u = e.identity(0, 0).unwrap();
    e.add_level(names.iter().map(|n| (n.to_string(), u, u)).collect())
        .unwrap();
    e.saturate().unwrap();
    e
}

/// Paths of length <= bound in a graph, counted by brute force.
fn path_count(points: usize, edges: &[(u32, u32)], bound: usize) -> usize {
    let mut count = points;
    let mut frontier: Vec<u32> = edges.iter().map(|e| e.1).collect();
    count += frontier.len();
    for _ in 1..bound {
        let mut next = Vec::new();
        for &end in &frontier {
            for e in edges {
                if e.0 == end {
                    next.push(e.1);
                }
            }
        }
        count += next.len();
        frontier = next;
    }
    count
}

fn graph_engine(points: usize, edges: &[(u32, u32)], size: usize) -> CongruenceEngine {
    let mut e = CongruenceEngine::new(Bounds::with_size(size));
    let names: Vec<String> = (0..points).map(|i| format!("p{i}")).collect();
    e.add_points(&names).unwrap();
    e.add_level(
        edges
            .iter()
            .enumerate()
            .map(|(i, &(s, t))| (format!("e{i}"), s, t))
            .collect(),
    )
    .unwrap();
    e.saturate().unwrap();
    e
}

#[test]
fn empty_engine_is_a_fixed_point() {
    let mut e = CongruenceEngine::new(Bounds::default());
    let r = e.saturate().unwrap();
    assert_eq!(r.fixed_point_at, Some(0));
    assert_eq!(r.rounds_run, 0);
}

#[test]
fn iterated_identities_only() {
    let mut e = CongruenceEngine::new(Bounds::with_size(3));
    e.add_points(&["a"]).unwrap();
    for _ in 0..3 {
        e.add_level(vec![]).unwrap();
        e.saturate().unwrap();
    }
    for d in 0..=3 {
        assert_eq!(e.class_count(d), 1, "dimension {d}");
    }
}

#[test]
fn loop_gives_four_words() {
    let e = graph_engine(1, &[(0, 0)], 3);
    assert_eq!(e.class_count(1), 4);
    assert_eq!(e.class_count(1), path_count(1, &[(0, 0)], 3));
}

#[test]
fn two_cycle_paths() {
    // f: a -> b, g: b -> a
    let e = graph_engine(2, &[(0, 1), (1, 0)], 2);
    assert_eq!(e.class_count(1), path_count(2, &[(0, 1), (1, 0)], 2));
    let terms = generate_terms(&e, 1, 2, 10_000);
    let reps: Vec<String> = terms.iter().map(|t| t.serialize()).collect();
    for want in ["gen(e0)", "gen(e1)", "comp0(gen(e0),gen(e1))", "comp0(gen(e1),gen(e0))"] {
        assert!(reps.iter().any(|r| r == want), "missing {want}");
    }
}

#[test]
fn acyclic_graphs_match_the_path_oracle() {
    let graphs: Vec<(usize, Vec<(u32, u32)>)> = vec![
        (3, vec![(0, 1), (1, 2)]),
        (3, vec![(0, 1), (0, 1), (1, 2), (0, 2)]),
        (4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]),
        (2, vec![]),
    ];
    for (n, edges) in graphs {
        let e = graph_engine(n, &edges, 4);
        assert_eq!(e.class_count(1), path_count(n, &edges, 4), "{edges:?}");
        assert!(!e.truncated(1) || path_count(n, &edges, 5) > path_count(n, &edges, 4));
    }
}

#[test]
fn whiskering_is_well_formed() {
    let mut e = CongruenceEngine::new(Bounds::with_size(2));
    e.add_points(&["a", "b"]).unwrap();
    e.add_level(vec![("f".into(), 0, 1)]).unwrap();
    e.saturate().unwrap();
    let f = e.generator_class(1, "f").unwrap();
    e.add_level(vec![("α".into(), f, f)]).unwrap();
    e.saturate().unwrap();
    let ok = e.parse_term("comp0(id1(id1(a)),α)").unwrap();
    assert!(e.check_term(&ok).unwrap());
    let bad = e.parse_term("comp0(α,α)").unwrap();
    assert!(!e.check_term(&bad).unwrap());
}

#[test]
fn scalar_cells_are_multisets() {
    let e = scalar_engine(&["α", "β"], 2);
    assert_eq!(e.class_count(2), 6);
    let by_bag = e.counts_by_multiset(2);
    assert!(by_bag.values().all(|&c| c == 1));
    assert_eq!(by_bag.len(), 6);
    let e = scalar_engine(&["α", "β"], 4);
    let mut by_size = BTreeMap::new();
    for c in 0..e.class_count(2) as u32 {
        *by_size.entry(e.class_size(2, c)).or_insert(0) += 1;
    }
    assert_eq!(by_size.into_values().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
}

#[test]
fn eckmann_hilton_certificates_replay() {
    let e = scalar_engine(&["α", "β"], 2);
    let report = e.report(2);
    assert!(report.fixed_point_at.unwrap() <= 3, "{report:?}");
    let a = e.parse_term("comp0(α,β)").unwrap();
    for other in ["comp1(α,β)", "comp1(β,α)", "comp0(β,α)"] {
        let b = e.parse_term(other).unwrap();
        match e.equal_cells(&a, &b).unwrap() {
            Verdict::Equal(cert) => cert.replay(&e).unwrap(),
            v => panic!("{other}: {v:?}"),
        }
    }
    let alpha = e.parse_term("α").unwrap();
    let beta = e.parse_term("β").unwrap();
    assert!(matches!(e.equal_cells(&alpha, &beta).unwrap(), Verdict::Distinct(_)));
    assert!(matches!(e.equal_cells(&alpha, &alpha).unwrap(), Verdict::Equal(_)));
    assert!(e.equal_cells(&alpha, &e.parse_term("x").unwrap()).is_err());
}

#[test]
fn every_generated_pair_in_a_class_replays() {
    let engines = vec![
        (scalar_engine(&["α", "β"], 2), 2usize, 4usize),
        (graph_engine(2, &[(0, 1), (1, 1)], 3), 1, 3),
    ];
    for (e, dim, leaves) in engines {
        let terms = generate_terms(&e, dim, leaves, 3000);
        let mut by_class: HashMap<u32, Vec<Term>> = HashMap::new();
        for t in terms {
            if let Some(c) = e.eval(&t).unwrap() {
                by_class.entry(c).or_default().push(t);
            }
        }
        let mut checked = 0;
        for members in by_class.values() {
            for t in members.iter().take(12) {
                let cert = e.explain(&members[0], t).unwrap();
                cert.replay(&e).unwrap_or_else(|m| panic!("{} vs {t}: {m}", members[0]));
                checked += 1;
            }
        }
        assert!(checked >= by_class.len() + 2, "only {checked} checked");
        assert!(e.audit().is_clean());
    }
}

#[test]
fn generated_terms_evaluate_in_theta2() {
    let mut e = CongruenceEngine::new(Bounds::with_size(3));
    e.add_points(&["o"]).unwrap();
    e.add_level(vec![]).unwrap();
    e.saturate().unwrap();
    e.add_level(vec![]).unwrap();
    e.saturate().unwrap();
    let terms = generate_terms(&e, 2, 3, 5000);
    assert!(!terms.is_empty());
    for t in &terms {
        assert_eq!(e.eval(t).unwrap(), Some(0), "{t}");
    }
}
