use std::collections::BTreeSet;

use super::engine::CongruenceEngine;
use super::term::Term;

/// Well-typed terms of dimension `dim` with at most `bound` generator leaves,
/// built syntactically. Composites of two identity terms and direct unit
/// instances are skipped since they only restate smaller terms.
/// At most `cap` terms per dimension are produced.
pub fn generate_terms(engine: &CongruenceEngine, dim: usize, bound: usize, cap: usize) -> Vec<Term> {
    let mut by_dim: Vec<Vec<Term>> = Vec::new();
    for r in 0..=dim {
        let mut atoms: Vec<Term> = engine
            .generator_names(r)
            .into_iter()
            .map(|n| Term::gen(n, r))
            .collect();
        if r > 0 {
            atoms.extend(by_dim[r - 1].iter().cloned().map(Term::identity));
        }
        let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); bound + 1];
        for a in atoms {
            let s = a.leaf_count();
            if s <= bound {
                by_size[s].push(a);
            }
        }
        let mut total: usize = by_size.iter().map(Vec::len).sum();
        if r > 0 {
            for s in 2..=bound {
                let mut fresh = BTreeSet::new();
                for s1 in 1..s {
                    let s2 = s - s1;
                    for a in &by_size[s1] {
                        for b in &by_size[s2] {
                            for k in 0..r {
                                if total + fresh.len() >= cap {
                                    break;
                                }
                                if a.is_identity_like() && b.is_identity_like() {
                                    continue;
                                }
                                if is_unit_factor(a, r - k) || is_unit_factor(b, r - k) {
                                    continue;
                                }
                                let t = Term::compose(k, a.clone(), b.clone());
                                if engine.check_term(&t).unwrap_or(false) {
                                    fresh.insert(t);
                                }
                            }
                        }
                    }
                }
                total += fresh.len();
                by_size[s].extend(fresh);
            }
        }
        by_dim.push(by_size.into_iter().flatten().collect());
    }
    by_dim.pop().unwrap_or_default()
}

/// A factor that is a `times`-fold identity on a lower cell.
fn is_unit_factor(t: &Term, times: usize) -> bool {
    t.strip_identities(times).is_some()
}
