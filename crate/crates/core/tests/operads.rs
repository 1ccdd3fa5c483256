use std::collections::BTreeSet;

use polygraph::freecat::Bounds;
use polygraph::operads::{
    eval_analytic, eval_strongly_analytic, free_symmetric_bijection, known_slice_oracle, permutations, slice_of_strict,
    NonSymCollection, Presentation, SymCollection, ViolationKind,
};
use proptest::prelude::*;

fn cycles(p: &[u8]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut count = 0;
    for i in 0..p.len() {
        if !seen[i] {
            count += 1;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = p[j] as usize;
            }
        }
    }
    count
}

/// Orbit count by Burnside's lemma: average number of fixed points.
fn burnside(a: &SymCollection, x: usize, bound: usize) -> usize {
    let mut total = 0;
    for n in 0..=bound.min(a.max_arity()) {
        let perms = permutations(n);
        let mut fixed = 0;
        for (i, p) in perms.iter().enumerate() {
            let on_a = (0..a.elements(n).len() as u32).filter(|&e| a.act(n, i, e) == e).count();
            fixed += on_a * x.pow(cycles(p) as u32);
        }
        total += fixed / perms.len();
    }
    total
}

#[test]
fn orbit_counts_agree_with_burnside() {
    let twisted = SymCollection::parse("arity 0 : e\narity 2 : m mop k\naction 2 1 0 : m -> mop, mop -> m\narity 3 : p q\n")
        .unwrap();
    let collections = [
        SymCollection::commutative(3),
        SymCollection::regular(3),
        SymCollection::free_on(&NonSymCollection::constant(&[1, 2, 0, 1])),
        twisted,
    ];
    for a in &collections {
        for x in 0..=3 {
            assert_eq!(eval_analytic(a, x, 3).len(), burnside(a, x, 3), "{a:?} x={x}");
        }
    }
}

#[test]
fn orbit_representatives_are_least() {
    let a = SymCollection::commutative(3);
    for m in eval_analytic(&a, 3, 3) {
        let mut sorted = m.args.clone();
        sorted.sort();
        assert_eq!(m.args, sorted);
    }
}

#[test]
fn free_symmetric_agrees_with_core() {
    for counts in [vec![1, 1, 1, 1], vec![0, 2, 1, 3], vec![2, 0, 0, 1]] {
        let a = NonSymCollection::constant(&counts);
        for x in 0..=3 {
            let check = free_symmetric_bijection(&a, x, 3);
            assert!(check.bijective, "{counts:?} x={x}: {check:?}");
            assert_eq!(check.analytic, check.strongly_analytic);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum T {
    Var(usize),
    E,
    M(bool, Box<T>, Box<T>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Nf {
    Var(usize),
    E,
    Prod(bool, Vec<Nf>),
}

fn normalize(t: &T) -> Nf {
    match t {
        T::Var(v) => Nf::Var(*v),
        T::E => Nf::E,
        T::M(op, l, r) => {
            let mut factors = Vec::new();
            for side in [l, r] {
                match normalize(side) {
                    Nf::E => {}
                    Nf::Prod(o, fs) if o == *op => factors.extend(fs),
                    other => factors.push(other),
                }
            }
            match factors.len() {
                0 => Nf::E,
                1 => factors.pop().unwrap(),
                _ => Nf::Prod(*op, factors),
            }
        }
    }
}

/// Terms over variables `lo..hi` in order, each once, with at most `units` units.
fn terms(lo: usize, hi: usize, units: usize, ops: usize) -> Vec<T> {
    let mut out = Vec::new();
    if hi == lo + 1 {
        out.push(T::Var(lo));
    }
    if hi == lo && units > 0 {
        out.push(T::E);
    }
    if ops == 0 {
        return out;
    }
    for mid in lo..=hi {
        for u in 0..=units {
            for o in 0..ops {
                for l in terms(lo, mid, u, o) {
                    for r in terms(mid, hi, units - u, ops - 1 - o) {
                        for op in [false, true] {
                            out.push(T::M(op, Box::new(l.clone()), Box::new(r.clone())));
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn double_monoid_counts_match_normalization() {
    let entry = known_slice_oracle("double-monoid-shared-unit", 4).unwrap();
    for n in 0..=4 {
        let forms: BTreeSet<Nf> = terms(0, n, 1, n.max(1) + 1).iter().map(normalize).collect();
        assert_eq!(forms.len(), entry.arity_counts[n], "arity {n}");
    }
}

#[test]
fn catalog_oracles_enumerate_directly() {
    // words and multisets over {a, b} of length <= 3
    let words: usize = (0..=3).map(|n| 2usize.pow(n)).sum();
    let bags = (0..=3usize).map(|n| n + 1).sum::<usize>();
    let fm = known_slice_oracle("free-monoid", 3).unwrap();
    let fcm = known_slice_oracle("free-commutative-monoid", 3).unwrap();
    assert_eq!(fm.evaluate_counts(2).iter().sum::<usize>(), words);
    assert_eq!(fcm.evaluate_counts(2).iter().sum::<usize>(), bags);
}

#[test]
fn catalog_classifications() {
    let expected = [
        ("zero-slice-monoid", true),
        ("free-monoid", true),
        ("free-commutative-monoid", false),
        ("double-monoid-shared-unit", true),
        ("bicategory-first-slice", true),
    ];
    for (name, regular) in expected {
        let entry = known_slice_oracle(name, 3).unwrap();
        assert_eq!(entry.presentation.is_strongly_regular().strongly_regular, regular, "{name}");
    }
}

#[test]
fn slices_agree_with_oracles() {
    for k in 1..=2 {
        for x in 0..=3 {
            let r = slice_of_strict(k, x, Bounds::with_size(4)).unwrap();
            assert!(r.matches_oracle, "k={k} x={x}: {r:?}");
            assert_eq!(r.unknown_pairs, 0);
        }
    }
}

fn theory(equations: &[&str]) -> Presentation {
    let mut text = String::from("op m : 2\nop e : 0\nop i : 1\n");
    for eq in equations {
        text.push_str(eq);
        text.push('\n');
    }
    Presentation::parse(&text).unwrap()
}

const EQUATIONS: [&str; 7] = [
    "m(m(x,y),z) = m(x,m(y,z))",
    "m(e,x) = x",
    "m(x,y) = m(y,x)",
    "m(x,x) = x",
    "m(x,i(x)) = e",
    "i(m(x,y)) = m(i(x),i(y))",
    "m(x,e) = e",
];

proptest! {
    #[test]
    fn regularity_ignores_names_and_order(
        picks in proptest::sample::subsequence((0..EQUATIONS.len()).collect::<Vec<_>>(), 1..=EQUATIONS.len()),
        seed in any::<u64>(),
    ) {
        let eqs: Vec<&str> = picks.iter().map(|&i| EQUATIONS[i]).collect();
        let base = theory(&eqs).is_strongly_regular();
        let mut shuffled = eqs.clone();
        let len = shuffled.len();
        shuffled.rotate_left((seed as usize) % len);
        if seed & 1 == 1 {
            shuffled.reverse();
        }
        let renamed = theory(&shuffled).rename_variables(&|v: &str| format!("{v}_{}", seed % 7));
        let other = renamed.is_strongly_regular();
        prop_assert_eq!(base.strongly_regular, other.strongly_regular);
        let kinds = |p: &Presentation| -> BTreeSet<String> {
            p.equations
                .iter()
                .filter_map(|e| {
                    Presentation { ops: p.ops.clone(), equations: vec![e.clone()] }
                        .is_strongly_regular()
                        .witness
                        .map(|w| format!("{:?}", w.kind))
                })
                .collect()
        };
        prop_assert_eq!(kinds(&theory(&eqs)), kinds(&renamed));
    }

    #[test]
    fn evaluation_is_monotone(counts in proptest::collection::vec(0usize..3, 1..5), x in 0usize..3, n in 0usize..4) {
        let a = NonSymCollection::constant(&counts);
        let s = SymCollection::free_on(&a);
        let c = SymCollection::commutative(counts.len() - 1);
        for (small, big) in [((x, n), (x + 1, n)), ((x, n), (x, n + 1))] {
            prop_assert!(eval_strongly_analytic(&a, small.0, small.1).len() <= eval_strongly_analytic(&a, big.0, big.1).len());
            prop_assert!(eval_analytic(&s, small.0, small.1).len() <= eval_analytic(&s, big.0, big.1).len());
            prop_assert!(eval_analytic(&c, small.0, small.1).len() <= eval_analytic(&c, big.0, big.1).len());
        }
    }
}

#[test]
fn commutativity_is_a_permutation_violation() {
    let v = theory(&["m(x,y) = m(y,x)"]).is_strongly_regular();
    assert_eq!(v.witness.unwrap().kind, ViolationKind::Permutation);
}
