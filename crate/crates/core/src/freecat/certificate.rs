use std::collections::HashSet;

use serde::Serialize;

use super::engine::{pat_term, AxiomFamily, CongruenceEngine, EvalError, Node, NodeId, Pat, Reason};
use super::term::{Side, Term};
use crate::error::{Error, Result};

/// A single rewrite at a position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub path: Vec<Side>,
    pub family: AxiomFamily,
    pub before: Term,
    pub after: Term,
}

/// A chain of rewrites from `start` to `end`, checkable without the e-graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub dim: usize,
    pub start: Term,
    pub end: Term,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DistinctReason {
    GeneratorMultiset { left: Vec<String>, right: Vec<String> },
    Word { left: Vec<String>, right: Vec<String> },
    Points { left: String, right: String },
    Boundary { source: bool, inner: Box<DistinctReason> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Equal(Certificate),
    Distinct(DistinctReason),
    Unknown(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Equal(_) => "equal",
            Verdict::Distinct(_) => "distinct",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

fn lift(side: Side, steps: Vec<Step>) -> Vec<Step> {
    steps
        .into_iter()
        .map(|mut s| {
            s.path.insert(0, side);
            s
        })
        .collect()
}

fn reverse(steps: Vec<Step>) -> Vec<Step> {
    steps
        .into_iter()
        .rev()
        .map(|s| Step {
            path: s.path,
            family: s.family,
            before: s.after,
            after: s.before,
        })
        .collect()
}

impl CongruenceEngine {
    fn explain_nodes(&self, d: usize, a: NodeId, b: NodeId) -> Vec<Step> {
        if a == b {
            return Vec::new();
        }
        let proof = &self.levels[d].proof;
        let mut up_a = vec![a];
        while let Some((p, _)) = proof[*up_a.last().unwrap() as usize] {
            up_a.push(p);
        }
        let on_a: HashSet<NodeId> = up_a.iter().copied().collect();
        let mut up_b = vec![b];
        while !on_a.contains(up_b.last().unwrap()) {
            let (p, _) = proof[*up_b.last().unwrap() as usize]
                .expect("nodes explained together must share a proof tree");
            up_b.push(p);
        }
        let lca = *up_b.last().unwrap();
        let mut steps = Vec::new();
        for &x in up_a.iter().take_while(|&&x| x != lca) {
            let (p, r) = proof[x as usize].unwrap();
            steps.extend(self.edge_chain(d, x, p, r));
        }
        for &y in up_b.iter().rev().skip(1) {
            let (p, r) = proof[y as usize].unwrap();
            steps.extend(self.edge_chain(d, p, y, r));
        }
        steps
    }

    fn edge_chain(&self, d: usize, x: NodeId, y: NodeId, reason: Reason) -> Vec<Step> {
        let l = &self.levels[d];
        match reason {
            Reason::Congruence => {
                let (Node::Comp { left: xl, right: xr, .. }, Node::Comp { left: yl, right: yr, .. }) =
                    (l.nodes[x as usize], l.nodes[y as usize])
                else {
                    unreachable!("congruence edges join composites");
                };
                let mut steps = lift(Side::Left, self.explain_nodes(d, xl, yl));
                steps.extend(lift(Side::Right, self.explain_nodes(d, xr, yr)));
                steps
            }
            Reason::Axiom(i) => {
                let rec = &l.axioms[i as usize];
                let forward = {
                    let mut cache = vec![None; l.nodes.len()];
                    let lower = &self.levels[..d];
                    let mut steps = self.to_pattern(d, rec.lhs_node, &rec.lhs);
                    steps.push(Step {
                        path: Vec::new(),
                        family: rec.family,
                        before: pat_term(l, lower, &rec.lhs, &mut cache),
                        after: pat_term(l, lower, &rec.rhs, &mut cache),
                    });
                    steps.extend(reverse(self.to_pattern(d, rec.rhs_node, &rec.rhs)));
                    steps
                };
                if (x, y) == (rec.lhs_node, rec.rhs_node) {
                    forward
                } else {
                    debug_assert_eq!((y, x), (rec.lhs_node, rec.rhs_node));
                    reverse(forward)
                }
            }
        }
    }

    fn to_pattern(&self, d: usize, x: NodeId, pat: &Pat) -> Vec<Step> {
        match pat {
            Pat::Node(n) => self.explain_nodes(d, x, *n),
            Pat::Comp { left, right, via, .. } => {
                let mut steps = self.explain_nodes(d, x, *via);
                let Node::Comp { left: vl, right: vr, .. } = self.levels[d].nodes[*via as usize] else {
                    unreachable!("pattern composites sit on composite nodes");
                };
                steps.extend(lift(Side::Left, self.to_pattern(d, vl, left)));
                steps.extend(lift(Side::Right, self.to_pattern(d, vr, right)));
                steps
            }
        }
    }

    /// Rewrites from an arbitrary term to the given node of its class.
    fn term_chain(&self, t: &Term, target: NodeId) -> Vec<Step> {
        let d = t.dim();
        let l = &self.levels[d];
        match t {
            Term::Gen { name, .. } => self.explain_nodes(d, l.gen_node(name).unwrap(), target),
            Term::Identity(body) => {
                let (_, m) = self.eval_node(body).unwrap();
                let below = &self.levels[d - 1];
                let c = below.class_of(m);
                let mut steps = lift(Side::Inner, self.term_chain(body, below.rep_node(c)));
                steps.extend(self.explain_nodes(d, l.unit_nodes[c as usize], target));
                steps
            }
            Term::Compose { left, right, .. } => {
                let (_, m) = self.eval_node(t).unwrap();
                let Node::Comp { left: ml, right: mr, .. } = l.nodes[m as usize] else {
                    unreachable!()
                };
                let mut steps = lift(Side::Left, self.term_chain(left, ml));
                steps.extend(lift(Side::Right, self.term_chain(right, mr)));
                steps.extend(self.explain_nodes(d, m, target));
                steps
            }
        }
    }

    /// Certificate that two terms denote the same cell, if the engine proved it.
    pub fn explain(&self, a: &Term, b: &Term) -> Option<Certificate> {
        let (d, na) = self.eval_node(a).ok()?;
        let (db, nb) = self.eval_node(b).ok()?;
        let l = &self.levels[d];
        if d != db || l.class_of(na) != l.class_of(nb) {
            return None;
        }
        let target = l.rep_node(l.class_of(na));
        let mut steps = self.term_chain(a, target);
        steps.extend(reverse(self.term_chain(b, target)));
        Some(Certificate {
            dim: d,
            start: a.clone(),
            end: b.clone(),
            steps,
        })
    }

    /// Decides equality of two cells within the saturated region.
    pub fn equal_cells(&self, a: &Term, b: &Term) -> Result<Verdict> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        for t in [a, b] {
            if !self.check_term(t)? {
                return Err(Error::IllTyped(format!("`{t}` is not well-typed")));
            }
            if let Err(EvalError::IllTyped(m)) = self.eval_node(t) {
                return Err(Error::IllTyped(m));
            }
        }
        if let Some(cert) = self.explain(a, b) {
            return Ok(Verdict::Equal(cert));
        }
        Ok(match self.distinct_reason(a, b) {
            Some(r) => Verdict::Distinct(r),
            None => Verdict::Unknown(if self.eval_node(a).is_ok() && self.eval_node(b).is_ok() {
                "different classes within the bound, no separating invariant".into()
            } else {
                "a term lies outside the saturated region".into()
            }),
        })
    }

    /// Invariants preserved by every axiom: generator multiset, the word in
    /// dimension 1, and recursively the boundaries.
    fn distinct_reason(&self, a: &Term, b: &Term) -> Option<DistinctReason> {
        let d = a.dim();
        let (ba, bb) = (a.generator_bag(d), b.generator_bag(d));
        if ba != bb {
            return Some(DistinctReason::GeneratorMultiset { left: ba, right: bb });
        }
        if d == 0 {
            return match (a, b) {
                (Term::Gen { name: x, .. }, Term::Gen { name: y, .. }) if x != y => {
                    Some(DistinctReason::Points {
                        left: x.clone(),
                        right: y.clone(),
                    })
                }
                _ => None,
            };
        }
        if d == 1 {
            let (wa, wb) = (a.generator_word(1), b.generator_word(1));
            if wa != wb {
                return Some(DistinctReason::Word { left: wa, right: wb });
            }
        }
        let (Ok((sa, ta)), Ok((sb, tb))) = (self.type_of(a), self.type_of(b)) else {
            return None;
        };
        let below = &self.levels[d - 1];
        for (source, x, y) in [(true, sa, sb), (false, ta, tb)] {
            if x != y {
                if let Some(r) = self.distinct_reason(below.rep_term(x), below.rep_term(y)) {
                    return Some(DistinctReason::Boundary {
                        source,
                        inner: Box::new(r),
                    });
                }
            }
        }
        None
    }

    fn check_instance(&self, family: AxiomFamily, a: &Term, b: &Term) -> bool {
        self.match_instance(family, a, b) || self.match_instance(family, b, a)
    }

    fn match_instance(&self, family: AxiomFamily, a: &Term, b: &Term) -> bool {
        use Term::Compose as C;
        let d = a.dim();
        if b.dim() != d {
            return false;
        }
        match family {
            AxiomFamily::Associativity { k } => match (a, b) {
                (C { k: k1, left: l, right: z }, C { k: k2, left: x2, right: r }) if *k1 == k && *k2 == k => {
                    match (&**l, &**r) {
                        (C { k: k3, left: x, right: y }, C { k: k4, left: y2, right: z2 }) => {
                            *k3 == k && *k4 == k && x == x2 && y == y2 && z == z2
                        }
                        _ => false,
                    }
                }
                _ => false,
            },
            AxiomFamily::Interchange { j, k } => {
                let (C { k: ja, left: la, right: ra }, C { k: kb, left: lb, right: rb }) = (a, b) else {
                    return false;
                };
                if *ja != j || *kb != k || j >= k {
                    return false;
                }
                match (&**la, &**ra, &**lb, &**rb) {
                    (
                        C { k: k1, left: p, right: q },
                        C { k: k2, left: r, right: s },
                        C { k: j1, left: p2, right: r2 },
                        C { k: j2, left: q2, right: s2 },
                    ) => *k1 == k && *k2 == k && *j1 == j && *j2 == j && p == p2 && q == q2 && r == r2 && s == s2,
                    _ => false,
                }
            }
            AxiomFamily::LeftUnit { k } | AxiomFamily::RightUnit { k } => {
                let left = matches!(family, AxiomFamily::LeftUnit { .. });
                let C { k: kk, left: l, right: r } = a else { return false };
                if *kk != k || k >= d {
                    return false;
                }
                let (unit, body) = if left { (&**l, &**r) } else { (&**r, &**l) };
                if body != b {
                    return false;
                }
                let Term::Identity(w) = unit else { return false };
                let Ok((s, t)) = self.type_of(body) else { return false };
                let side = if left { s } else { t };
                let z = self.boundary(d - 1, side, k, !left);
                let want = self.iter_unit_class(d, k, z);
                matches!(self.eval(w), Ok(Some(c)) if c == want)
            }
            AxiomFamily::IdentityFunctoriality { k } => {
                let (C { k: kk, left: l, right: r }, Term::Identity(w3)) = (a, b) else {
                    return false;
                };
                let (Term::Identity(w1), Term::Identity(w2)) = (&**l, &**r) else {
                    return false;
                };
                if *kk != k || k + 1 >= d {
                    return false;
                }
                match (self.eval(w1), self.eval(w2), self.eval(w3)) {
                    (Ok(Some(c1)), Ok(Some(c2)), Ok(Some(c3))) => {
                        self.compose(d - 1, k, c1, c2) == Some(c3)
                    }
                    _ => false,
                }
            }
        }
    }
}

impl Certificate {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Replays every step. Side conditions are checked against the frozen
    /// lower-dimensional tables only.
    pub fn replay(&self, engine: &CongruenceEngine) -> std::result::Result<(), String> {
        let mut cur = self.start.clone();
        for (i, step) in self.steps.iter().enumerate() {
            let sub = cur
                .at(&step.path)
                .ok_or_else(|| format!("step {i}: no subterm at {:?}", step.path))?;
            if *sub != step.before {
                return Err(format!("step {i}: expected `{}`, found `{sub}`", step.before));
            }
            if !engine.check_instance(step.family, &step.before, &step.after) {
                return Err(format!(
                    "step {i}: `{}` -> `{}` is not an instance of {}",
                    step.before,
                    step.after,
                    step.family.label()
                ));
            }
            cur = cur.replace_at(&step.path, step.after.clone()).unwrap();
            if !engine.check_term(&cur).unwrap_or(false) {
                return Err(format!("step {i}: result `{cur}` is ill-typed"));
            }
        }
        if cur != self.end {
            return Err(format!("chain ends at `{cur}`, not `{}`", self.end));
        }
        Ok(())
    }
}
