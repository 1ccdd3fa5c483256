//! One line per acceptance criterion. Exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use polygraph::computads::{theta_computad, Computad};
use polygraph::freecat::{generate_terms, Bounds, CongruenceEngine, Verdict};
use polygraph::limitlab::{computad_topos_gate, graph_path_experiment, GateVerdict, Graph, Witness};
use polygraph::operads::{free_symmetric_bijection, slice_of_strict, NonSymCollection, Presentation, ViolationKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SCALAR: &str = include_str!("../data/scalar.cptd");

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn run(id: usize, name: &str, limit: Duration, engines: &mut Vec<CongruenceEngine>, f: impl FnOnce(&mut Vec<CongruenceEngine>) -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = f(engines);
    let elapsed = start.elapsed();
    if elapsed > limit {
        o.ok = false;
        o.detail = format!("{}; over the {:?} limit", o.detail, limit);
    }
    println!(
        "{} {id} {name} ({:.2}s): {}",
        if o.ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        o.detail
    );
    o.ok
}

fn theta_collapse(engines: &mut Vec<CongruenceEngine>) -> Outcome {
    let mut counts = Vec::new();
    for k in 0..=4 {
        let c = theta_computad(k, Bounds::with_size(3)).expect("θ_k builds");
        let e = c.free_algebra();
        counts.push((0..=k).map(|d| e.class_count(d)).collect::<Vec<_>>());
        engines.push(e.clone());
    }
    let ok = counts.iter().all(|c| c.iter().all(|&n| n == 1));
    outcome(ok, format!("class counts per dimension {counts:?}"))
}

fn slices() -> Outcome {
    let b = Bounds::with_size(4);
    let (one, two) = match (slice_of_strict(1, 2, b), slice_of_strict(2, 2, b)) {
        (Ok(a), Ok(c)) => (a, c),
        (a, c) => return outcome(false, format!("{:?} {:?}", a.err(), c.err())),
    };
    let ok = one.counts_by_size == [1, 2, 4, 8, 16]
        && two.counts_by_size == [1, 2, 3, 4, 5]
        && one.matches_oracle
        && two.matches_oracle
        && one.unknown_pairs + two.unknown_pairs == 0;
    outcome(
        ok,
        format!(
            "k=1 {:?} vs {} {:?}; k=2 {:?} vs {} {:?}; unknown pairs {}",
            one.counts_by_size,
            one.oracle_name,
            one.oracle,
            two.counts_by_size,
            two.oracle_name,
            two.oracle,
            one.unknown_pairs + two.unknown_pairs
        ),
    )
}

fn eckmann_hilton(engines: &mut Vec<CongruenceEngine>) -> Outcome {
    let c = match Computad::parse(SCALAR, Bounds::with_size(2)) {
        Ok(c) => c,
        Err(err) => return outcome(false, err.to_string()),
    };
    let e = c.free_algebra();
    let parse = |s: &str| e.parse_term(s).expect("scalar terms parse");
    let base = parse("comp0(alpha,beta)");
    let mut steps = Vec::new();
    let mut ok = true;
    for other in ["comp1(alpha,beta)", "comp1(beta,alpha)"] {
        match e.equal_cells(&base, &parse(other)) {
            Ok(Verdict::Equal(cert)) => {
                ok &= cert.replay(e).is_ok();
                steps.push(cert.len());
            }
            v => {
                ok = false;
                steps.push(0);
                eprintln!("{other}: {v:?}");
            }
        }
    }
    engines.push(e.clone());
    outcome(ok, format!("comp0(α,β) = comp1(α,β) = comp1(β,α) with replayed certificates of {steps:?} steps"))
}

fn regularity() -> Outcome {
    let check = |text: &str| Presentation::parse(text).map(|p| p.is_strongly_regular());
    let (mon, com, dbl) = (
        check(include_str!("../data/monoid.thy")),
        check(include_str!("../data/commutative-monoid.thy")),
        check(include_str!("../data/gray-slice2.thy")),
    );
    let (Ok(mon), Ok(com), Ok(dbl)) = (mon, com, dbl) else {
        return outcome(false, "catalog presentations failed to parse");
    };
    let witness = com.witness.clone();
    let ok = mon.strongly_regular
        && !com.strongly_regular
        && witness.as_ref().is_some_and(|w| w.kind == ViolationKind::Permutation)
        && dbl.strongly_regular;
    outcome(
        ok,
        format!(
            "monoid {}, commutative monoid {} ({}), double monoid with shared unit {}",
            mon.strongly_regular,
            com.strongly_regular,
            witness.map_or("no witness".into(), |w| format!("{:?} in {}", w.kind, w.text)),
            dbl.strongly_regular
        ),
    )
}

fn graph_gate() -> Outcome {
    match graph_path_experiment(3, 3, 3, 50, 2026) {
        Ok(r) => outcome(
            r.failures.is_empty()
                && r.pullbacks_preserved == r.cospans
                && r.engine_graphs_agreed == r.graphs
                && r.engine_cospans_agreed == r.engine_cospans_checked,
            format!(
                "{} graphs, {} cospans, {} preserved; engine agreed on {}/{} graphs and {}/{} sampled pullbacks",
                r.graphs,
                r.cospans,
                r.pullbacks_preserved,
                r.engine_graphs_agreed,
                r.graphs,
                r.engine_cospans_agreed,
                r.engine_cospans_checked
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn multiset_gate() -> Outcome {
    let r = match computad_topos_gate(3, Bounds::with_size(2), 0) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let conflated = matches!(&r.witness, Some(Witness::Conflated { .. }));
    let ok = r.verdict == GateVerdict::Counterexample && conflated && r.oracle_replay == Some(true) && r.engine_agreed == 1;
    outcome(ok, format!("{} {:?} over {}", r.verdict.label(), r.witness, r.witness_cospan.unwrap_or_default()))
}

fn soundness(engines: &[CongruenceEngine]) -> Outcome {
    let (mut instances, mut violations, mut splits) = (0, 0, 0);
    for e in engines.iter() {
        let audit = e.audit();
        instances += audit.instances;
        violations += audit.multiset_violations + audit.boundary_violations;
        splits += (0..e.level_count()).map(|d| e.report(d).class_splits).sum::<usize>();
    }
    // also across bounds: cells equal under a small bound stay equal under a larger one
    let (small, large) = match (Computad::parse(SCALAR, Bounds::with_size(2)), Computad::parse(SCALAR, Bounds::with_size(3))) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return outcome(false, "scalar computad failed"),
    };
    let terms = generate_terms(small.free_algebra(), 2, 2, 2000);
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            let (sa, sb) = (small.free_algebra().eval(a), small.free_algebra().eval(b));
            if let (Ok(Some(x)), Ok(Some(y))) = (sa, sb) {
                if x == y && large.free_algebra().eval(a).ok() != large.free_algebra().eval(b).ok() {
                    splits += 1;
                }
            }
        }
    }
    outcome(
        violations == 0 && splits == 0 && instances > 0,
        format!("{instances} axiom instances audited, {violations} violations, {splits} class splits"),
    )
}

fn path_count(points: usize, edges: &[(usize, usize)], bound: usize) -> usize {
    let mut total = points;
    let mut ends: Vec<usize> = (0..points).collect();
    for _ in 0..bound {
        ends = ends
            .iter()
            .flat_map(|&v| edges.iter().filter(move |e| e.0 == v).map(|e| e.1))
            .collect();
        total += ends.len();
    }
    total
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut agreed = 0;
    for _ in 0..20 {
        let v = rng.random_range(1..=4);
        let e = rng.random_range(0..=5);
        let edges: Vec<(usize, usize)> = (0..e).map(|_| (rng.random_range(0..v), rng.random_range(0..v))).collect();
        let g = Graph { vertices: v, edges: edges.clone() };
        let Ok(c) = g.computad(Bounds::with_size(3)) else { continue };
        if c.free_algebra().class_count(1) == path_count(v, &edges, 3) {
            agreed += 1;
        }
    }
    let mut bijective = 0;
    let collections = [vec![1, 1, 1, 1], vec![0, 2, 1, 3], vec![2, 0, 3, 1]];
    for counts in &collections {
        for x in 0..=3 {
            if free_symmetric_bijection(&NonSymCollection::constant(counts), x, 3).bijective {
                bijective += 1;
            }
        }
    }
    outcome(
        agreed == 20 && bijective == 4 * collections.len(),
        format!("{agreed}/20 random graphs match the path oracle; {bijective}/{} free-symmetric bijections", 4 * collections.len()),
    )
}

fn main() {
    let mut engines = Vec::new();
    let secs = Duration::from_secs;
    let results = [
        run(1, "theta-computad collapse", secs(1), &mut engines, theta_collapse),
        run(2, "slice identification", secs(60), &mut engines, |_| slices()),
        run(3, "Eckmann-Hilton emergence", secs(10), &mut engines, eckmann_hilton),
        run(4, "strong-regularity catalog", secs(5), &mut engines, |_| regularity()),
        run(5, "topos gate, positive side", secs(300), &mut engines, |_| graph_gate()),
        run(6, "topos gate, negative side", secs(1), &mut engines, |_| multiset_gate()),
        run(7, "engine soundness", secs(60), &mut engines, |e| soundness(e)),
        run(8, "oracle equivalences", secs(60), &mut engines, |_| oracles()),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
