use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use super::term::{Signature, Term};
use super::Bounds;
use crate::error::{Error, Result};

/// Dense index of an equivalence class within a frozen level.
pub type ClassId = u32;
pub(crate) type NodeId = u32;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Gen(u32),
    /// Identity on a class of the level below.
    Unit(ClassId),
    Comp { k: u8, left: NodeId, right: NodeId },
}

/// Which strict-category axiom justified a merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AxiomFamily {
    Associativity { k: usize },
    LeftUnit { k: usize },
    RightUnit { k: usize },
    Interchange { j: usize, k: usize },
    IdentityFunctoriality { k: usize },
}

impl AxiomFamily {
    pub fn label(&self) -> String {
        match self {
            AxiomFamily::Associativity { k } => format!("assoc_{k}"),
            AxiomFamily::LeftUnit { k } => format!("unit_left_{k}"),
            AxiomFamily::RightUnit { k } => format!("unit_right_{k}"),
            AxiomFamily::Interchange { j, k } => format!("interchange_{j}_{k}"),
            AxiomFamily::IdentityFunctoriality { k } => format!("id_functor_{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Reason {
    Congruence,
    Axiom(u32),
}

/// Shape of one side of an axiom instance. `via` is the node that was
/// matched (or created) for that composite.
#[derive(Debug, Clone)]
pub(crate) enum Pat {
    Node(NodeId),
    Comp {
        k: u8,
        left: Box<Pat>,
        right: Box<Pat>,
        via: NodeId,
    },
}

fn pn(n: NodeId) -> Box<Pat> {
    Box::new(Pat::Node(n))
}

#[derive(Debug, Clone)]
pub(crate) struct AxiomRecord {
    pub family: AxiomFamily,
    pub lhs: Pat,
    pub rhs: Pat,
    pub lhs_node: NodeId,
    pub rhs_node: NodeId,
}

#[derive(Debug, Clone)]
struct ClassData {
    nodes: Vec<NodeId>,
    src: ClassId,
    tgt: ClassId,
    bag: Vec<u32>,
    word: Option<Vec<u32>>,
    unit_of: Option<ClassId>,
}

#[derive(Debug, Clone)]
pub(crate) struct GenInfo {
    pub name: String,
    pub src: ClassId,
    pub tgt: ClassId,
}

#[derive(Debug, Clone)]
struct Frozen {
    node_class: Vec<ClassId>,
    roots: Vec<NodeId>,
    reps: Vec<NodeId>,
    rep_terms: Vec<Term>,
}

#[derive(Debug, Clone)]
pub(crate) struct Level {
    pub dim: usize,
    pub gens: Vec<GenInfo>,
    gen_index: HashMap<String, u32>,
    pub nodes: Vec<Node>,
    parent: Vec<NodeId>,
    pub proof: Vec<Option<(NodeId, Reason)>>,
    class: Vec<Option<ClassData>>,
    memo: HashMap<Node, NodeId>,
    pub unit_nodes: Vec<NodeId>,
    pub axioms: Vec<AxiomRecord>,
    seen: HashSet<(u8, NodeId, NodeId, NodeId)>,
    unions: usize,
    rounds: usize,
    fixed_point_at: Option<usize>,
    truncated: bool,
    cap_hit: bool,
    /// Node pairs that shared a class before a round and not after it.
    splits: usize,
    frozen: Option<Frozen>,
}

#[derive(Debug)]
enum Added {
    Node(NodeId),
    OverBound,
    MissingLower,
    Incompatible,
    Cap,
}

/// Outcome of saturating one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaturationReport {
    pub dim: usize,
    pub rounds_run: usize,
    /// First round that produced no new nodes and no merges.
    pub fixed_point_at: Option<usize>,
    pub node_cap_hit: bool,
    /// Some compatible composite was skipped because it exceeded the bound.
    pub truncated: bool,
    /// Always zero for a sound engine: classes only merge.
    pub class_splits: usize,
    pub nodes: usize,
    pub classes: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EngineStats {
    pub nodes: usize,
    pub classes: usize,
    pub merges: usize,
    pub axiom_instances: BTreeMap<String, usize>,
}

/// Structural recomputation of every recorded axiom instance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub instances: usize,
    pub multiset_violations: usize,
    pub boundary_violations: usize,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.multiset_violations == 0 && self.boundary_violations == 0
    }
}

/// A class of cells with its canonical representative.
#[derive(Debug, Clone, Serialize)]
pub struct CellInfo {
    pub dim: usize,
    pub class: ClassId,
    pub representative: Term,
    pub generators: Vec<String>,
    pub src: Option<ClassId>,
    pub tgt: Option<ClassId>,
}

impl Level {
    fn new(dim: usize) -> Level {
        Level {
            dim,
            gens: Vec::new(),
            gen_index: HashMap::new(),
            nodes: Vec::new(),
            parent: Vec::new(),
            proof: Vec::new(),
            class: Vec::new(),
            memo: HashMap::new(),
            unit_nodes: Vec::new(),
            axioms: Vec::new(),
            seen: HashSet::new(),
            unions: 0,
            rounds: 0,
            fixed_point_at: None,
            truncated: false,
            cap_hit: false,
            splits: 0,
            frozen: None,
        }
    }

    fn frozen(&self) -> &Frozen {
        self.frozen
            .as_ref()
            .expect("level must be frozen before querying classes")
    }

    pub fn class_count(&self) -> usize {
        self.frozen().roots.len()
    }

    pub fn class_of(&self, n: NodeId) -> ClassId {
        self.frozen().node_class[n as usize]
    }

    pub fn rep_node(&self, c: ClassId) -> NodeId {
        self.frozen().reps[c as usize]
    }

    pub fn rep_term(&self, c: ClassId) -> &Term {
        &self.frozen().rep_terms[c as usize]
    }

    fn data(&self, c: ClassId) -> &ClassData {
        let root = self.frozen().roots[c as usize];
        self.class[root as usize].as_ref().unwrap()
    }

    pub fn src_of(&self, c: ClassId) -> ClassId {
        self.data(c).src
    }

    pub fn tgt_of(&self, c: ClassId) -> ClassId {
        self.data(c).tgt
    }

    pub fn bag_of(&self, c: ClassId) -> &[u32] {
        &self.data(c).bag
    }

    pub fn unit_of(&self, c: ClassId) -> Option<ClassId> {
        self.data(c).unit_of
    }

    /// Class of the identity on lower class `c`.
    pub fn unit_class(&self, c: ClassId) -> ClassId {
        self.class_of(self.unit_nodes[c as usize])
    }

    pub fn compose(&self, k: usize, a: ClassId, b: ClassId) -> Option<ClassId> {
        let f = self.frozen();
        let key = Node::Comp {
            k: k as u8,
            left: f.roots[a as usize],
            right: f.roots[b as usize],
        };
        self.memo.get(&key).map(|&n| f.node_class[n as usize])
    }

    pub fn gen_node(&self, name: &str) -> Option<NodeId> {
        self.gen_index.get(name).copied()
    }

    fn find(&self, mut n: NodeId) -> NodeId {
        while self.parent[n as usize] != n {
            n = self.parent[n as usize];
        }
        n
    }

    fn find_mut(&mut self, n: NodeId) -> NodeId {
        let root = self.find(n);
        let mut cur = n;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn cdata(&self, root: NodeId) -> &ClassData {
        self.class[root as usize].as_ref().unwrap()
    }

    fn canonical(&mut self, node: Node) -> Node {
        match node {
            Node::Comp { k, left, right } => Node::Comp {
                k,
                left: self.find_mut(left),
                right: self.find_mut(right),
            },
            other => other,
        }
    }

    fn push_node(&mut self, node: Node, data: ClassData) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        self.parent.push(id);
        self.proof.push(None);
        let mut data = data;
        data.nodes = vec![id];
        self.class.push(Some(data));
        self.memo.insert(node, id);
        id
    }

    fn bnd(lower: &[Level], level: usize, c: ClassId, k: usize, tgt: bool) -> ClassId {
        let (mut level, mut c) = (level, c);
        while level > k {
            let l = &lower[level];
            c = if tgt { l.tgt_of(c) } else { l.src_of(c) };
            level -= 1;
        }
        c
    }

    /// Identity on level-`k` class `z`, lifted to level `self.dim - 1`.
    fn iter_unit(lower: &[Level], top: usize, k: usize, mut z: ClassId) -> ClassId {
        for level in lower.iter().take(top).skip(k + 1) {
            z = level.unit_class(z);
        }
        z
    }

    fn add(&mut self, lower: &[Level], bounds: &Bounds, node: Node) -> Added {
        let node = self.canonical(node);
        if let Some(&n) = self.memo.get(&node) {
            return Added::Node(n);
        }
        if self.nodes.len() >= bounds.max_nodes {
            self.cap_hit = true;
            return Added::Cap;
        }
        let d = self.dim;
        let one = d == 1;
        let data = match node {
            Node::Gen(i) => {
                let g = &self.gens[i as usize];
                ClassData {
                    nodes: vec![],
                    src: g.src,
                    tgt: g.tgt,
                    bag: vec![i],
                    word: one.then(|| vec![i]),
                    unit_of: None,
                }
            }
            Node::Unit(c) => ClassData {
                nodes: vec![],
                src: c,
                tgt: c,
                bag: vec![],
                word: one.then(Vec::new),
                unit_of: Some(c),
            },
            Node::Comp { k, left, right } => {
                let k = k as usize;
                let (x, y) = (self.cdata(left), self.cdata(right));
                if x.bag.len() + y.bag.len() > bounds.size {
                    // only a truncation if the pair would have been composable
                    if Self::bnd(lower, d - 1, x.tgt, k, true)
                        == Self::bnd(lower, d - 1, y.src, k, false)
                    {
                        self.truncated = true;
                    }
                    return Added::OverBound;
                }
                if Self::bnd(lower, d - 1, x.tgt, k, true) != Self::bnd(lower, d - 1, y.src, k, false)
                {
                    return Added::Incompatible;
                }
                let (src, tgt) = if k == d - 1 {
                    (x.src, y.tgt)
                } else {
                    let below = &lower[d - 1];
                    match (below.compose(k, x.src, y.src), below.compose(k, x.tgt, y.tgt)) {
                        (Some(s), Some(t)) => (s, t),
                        _ => {
                            self.truncated = true;
                            return Added::MissingLower;
                        }
                    }
                };
                let mut bag = x.bag.clone();
                bag.extend_from_slice(&y.bag);
                bag.sort_unstable();
                let word = match (&x.word, &y.word) {
                    (Some(a), Some(b)) => Some([a.as_slice(), b.as_slice()].concat()),
                    _ => None,
                };
                ClassData {
                    nodes: vec![],
                    src,
                    tgt,
                    bag,
                    word,
                    unit_of: None,
                }
            }
        };
        Added::Node(self.push_node(node, data))
    }

    fn reroot(&mut self, a: NodeId) {
        let mut cur = a;
        let mut carried: Option<(NodeId, Reason)> = None;
        loop {
            let next = self.proof[cur as usize].take();
            self.proof[cur as usize] = carried;
            match next {
                None => break,
                Some((p, r)) => {
                    carried = Some((cur, r));
                    cur = p;
                }
            }
        }
    }

    fn union(&mut self, a: NodeId, b: NodeId, reason: Reason) -> Result<bool> {
        let (ra, rb) = (self.find_mut(a), self.find_mut(b));
        if ra == rb {
            return Ok(false);
        }
        {
            let (x, y) = (self.cdata(ra), self.cdata(rb));
            if x.bag != y.bag || x.src != y.src || x.tgt != y.tgt || x.word != y.word {
                return Err(Error::Soundness(format!(
                    "attempted to merge inequivalent cells at dimension {}",
                    self.dim
                )));
            }
        }
        self.reroot(a);
        self.proof[a as usize] = Some((b, reason));
        let (root, child) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[child as usize] = root;
        let moved = self.class[child as usize].take().unwrap();
        let dst = self.class[root as usize].as_mut().unwrap();
        dst.nodes.extend(moved.nodes);
        if dst.unit_of.is_none() {
            dst.unit_of = moved.unit_of;
        }
        self.unions += 1;
        Ok(true)
    }

    fn record(
        &mut self,
        family: AxiomFamily,
        lhs: Pat,
        rhs: Pat,
        lhs_node: NodeId,
        rhs_node: NodeId,
    ) -> Result<()> {
        if self.find_mut(lhs_node) == self.find_mut(rhs_node) {
            return Ok(());
        }
        let idx = self.axioms.len() as u32;
        self.axioms.push(AxiomRecord {
            family,
            lhs,
            rhs,
            lhs_node,
            rhs_node,
        });
        self.union(lhs_node, rhs_node, Reason::Axiom(idx))?;
        Ok(())
    }

    /// Restores the hashcons invariant, merging congruent nodes.
    fn rebuild(&mut self) -> Result<()> {
        loop {
            let mut merged = false;
            let mut memo: HashMap<Node, NodeId> = HashMap::with_capacity(self.nodes.len());
            for id in 0..self.nodes.len() as NodeId {
                let key = self.canonical(self.nodes[id as usize]);
                match memo.get(&key) {
                    Some(&other) => {
                        if self.find_mut(other) != self.find_mut(id) {
                            self.union(other, id, Reason::Congruence)?;
                            merged = true;
                        }
                    }
                    None => {
                        memo.insert(key, id);
                    }
                }
            }
            if !merged {
                self.memo = memo;
                return Ok(());
            }
        }
    }

    fn roots(&self) -> Vec<NodeId> {
        (0..self.nodes.len() as NodeId)
            .filter(|&n| self.parent[n as usize] == n)
            .collect()
    }

    fn class_nodes(&mut self, n: NodeId) -> Vec<NodeId> {
        let r = self.find_mut(n);
        self.cdata(r).nodes.clone()
    }

    fn unit_node_for(&self, lower: &[Level], k: usize, z: ClassId) -> NodeId {
        let lifted = Self::iter_unit(lower, self.dim, k, z);
        self.unit_nodes[lifted as usize]
    }

    /// One round: expansion, unit introduction, rewriting.
    fn round(&mut self, lower: &[Level], bounds: &Bounds) -> Result<bool> {
        let d = self.dim;
        let start_nodes = self.nodes.len();
        let start_unions = self.unions;

        let roots = self.roots();
        // expansion, indexed by k-source
        for k in 0..d {
            let mut by_src: HashMap<ClassId, Vec<NodeId>> = HashMap::new();
            for &y in &roots {
                let s = Self::bnd(lower, d - 1, self.cdata(y).src, k, false);
                by_src.entry(s).or_default().push(y);
            }
            for &x in &roots {
                let t = Self::bnd(lower, d - 1, self.cdata(x).tgt, k, true);
                let Some(ys) = by_src.get(&t) else { continue };
                let xs = self.cdata(x).bag.len();
                for &y in ys {
                    if xs + self.cdata(y).bag.len() > bounds.size {
                        self.truncated = true;
                        continue;
                    }
                    let node = Node::Comp {
                        k: k as u8,
                        left: x,
                        right: y,
                    };
                    if let Added::Cap = self.add(lower, bounds, node) {
                        return Ok(true);
                    }
                }
            }
        }

        // unit introduction
        for &t in &roots {
            for k in 0..d {
                let (s, g) = {
                    let c = self.cdata(t);
                    (
                        Self::bnd(lower, d - 1, c.src, k, false),
                        Self::bnd(lower, d - 1, c.tgt, k, true),
                    )
                };
                let u = self.unit_node_for(lower, k, s);
                if let Added::Node(n) = self.add(lower, bounds, Node::Comp { k: k as u8, left: u, right: t }) {
                    let lhs = Pat::Comp { k: k as u8, left: pn(u), right: pn(t), via: n };
                    self.record(AxiomFamily::LeftUnit { k }, lhs, Pat::Node(t), n, t)?;
                }
                let u = self.unit_node_for(lower, k, g);
                if let Added::Node(n) = self.add(lower, bounds, Node::Comp { k: k as u8, left: t, right: u }) {
                    let lhs = Pat::Comp { k: k as u8, left: pn(t), right: pn(u), via: n };
                    self.record(AxiomFamily::RightUnit { k }, lhs, Pat::Node(t), n, t)?;
                }
            }
        }
        self.rebuild()?;

        let snapshot = self.nodes.len() as NodeId;
        for p in 0..snapshot {
            if self.cap_hit {
                break;
            }
            self.rewrite_at(lower, bounds, p)?;
        }
        self.rebuild()?;

        Ok(self.nodes.len() != start_nodes || self.unions != start_unions)
    }

    fn rewrite_at(&mut self, lower: &[Level], bounds: &Bounds, p: NodeId) -> Result<()> {
        let Node::Comp { k: j8, left: x0, right: y0 } = self.nodes[p as usize] else {
            return Ok(());
        };
        let j = j8 as usize;
        let d = self.dim;
        let xs = self.class_nodes(x0);
        let ys = self.class_nodes(y0);

        // associativity, left-bracketed to right-bracketed
        for &xn in &xs {
            if let Node::Comp { k, left: a, right: b } = self.nodes[xn as usize] {
                if k == j8 && self.seen.insert((0, p, xn, 0)) {
                    let Added::Node(z) = self.add(lower, bounds, Node::Comp { k, left: b, right: y0 }) else { continue };
                    let Added::Node(q) = self.add(lower, bounds, Node::Comp { k, left: a, right: z }) else { continue };
                    let lhs = Pat::Comp {
                        k,
                        left: Box::new(Pat::Comp { k, left: pn(a), right: pn(b), via: xn }),
                        right: pn(y0),
                        via: p,
                    };
                    let rhs = Pat::Comp {
                        k,
                        left: pn(a),
                        right: Box::new(Pat::Comp { k, left: pn(b), right: pn(y0), via: z }),
                        via: q,
                    };
                    self.record(AxiomFamily::Associativity { k: j }, lhs, rhs, p, q)?;
                }
            }
        }
        // and back
        for &yn in &ys {
            if let Node::Comp { k, left: b, right: c } = self.nodes[yn as usize] {
                if k == j8 && self.seen.insert((1, p, 0, yn)) {
                    let Added::Node(z) = self.add(lower, bounds, Node::Comp { k, left: x0, right: b }) else { continue };
                    let Added::Node(q) = self.add(lower, bounds, Node::Comp { k, left: z, right: c }) else { continue };
                    let lhs = Pat::Comp {
                        k,
                        left: pn(x0),
                        right: Box::new(Pat::Comp { k, left: pn(b), right: pn(c), via: yn }),
                        via: p,
                    };
                    let rhs = Pat::Comp {
                        k,
                        left: Box::new(Pat::Comp { k, left: pn(x0), right: pn(b), via: z }),
                        right: pn(c),
                        via: q,
                    };
                    self.record(AxiomFamily::Associativity { k: j }, lhs, rhs, p, q)?;
                }
            }
        }

        // interchange: p = (a *k b) *j (c *k d) with j < k, both directions
        for &xn in &xs {
            let Node::Comp { k: kx, left: a, right: b } = self.nodes[xn as usize] else { continue };
            for &yn in &ys {
                let Node::Comp { k: ky, left: c, right: dd } = self.nodes[yn as usize] else { continue };
                if kx != ky || kx == j8 {
                    continue;
                }
                let k = kx;
                if !self.seen.insert((2, p, xn, yn)) {
                    continue;
                }
                let (outer, inner) = (j8, k);
                // forward when the outer index is the smaller one
                let family = if outer < inner {
                    AxiomFamily::Interchange { j: outer as usize, k: inner as usize }
                } else {
                    AxiomFamily::Interchange { j: inner as usize, k: outer as usize }
                };
                let Added::Node(u) = self.add(lower, bounds, Node::Comp { k: outer, left: a, right: c }) else { continue };
                let Added::Node(v) = self.add(lower, bounds, Node::Comp { k: outer, left: b, right: dd }) else { continue };
                let Added::Node(q) = self.add(lower, bounds, Node::Comp { k: inner, left: u, right: v }) else { continue };
                let lhs = Pat::Comp {
                    k: outer,
                    left: Box::new(Pat::Comp { k: inner, left: pn(a), right: pn(b), via: xn }),
                    right: Box::new(Pat::Comp { k: inner, left: pn(c), right: pn(dd), via: yn }),
                    via: p,
                };
                let rhs = Pat::Comp {
                    k: inner,
                    left: Box::new(Pat::Comp { k: outer, left: pn(a), right: pn(c), via: u }),
                    right: Box::new(Pat::Comp { k: outer, left: pn(b), right: pn(dd), via: v }),
                    via: q,
                };
                self.record(family, lhs, rhs, p, q)?;
            }
        }

        // units and functoriality of identities
        let (rx, ry) = (self.find_mut(x0), self.find_mut(y0));
        let (xd, yd) = (self.cdata(rx).clone(), self.cdata(ry).clone());
        if let Some(z) = xd.unit_of {
            let s = Self::bnd(lower, d - 1, yd.src, j, false);
            if Self::iter_unit(lower, d, j, s) == z {
                let u = self.unit_nodes[z as usize];
                let lhs = Pat::Comp { k: j8, left: pn(u), right: pn(y0), via: p };
                self.record(AxiomFamily::LeftUnit { k: j }, lhs, Pat::Node(y0), p, y0)?;
            }
        }
        if let Some(z) = yd.unit_of {
            let t = Self::bnd(lower, d - 1, xd.tgt, j, true);
            if Self::iter_unit(lower, d, j, t) == z {
                let u = self.unit_nodes[z as usize];
                let lhs = Pat::Comp { k: j8, left: pn(x0), right: pn(u), via: p };
                self.record(AxiomFamily::RightUnit { k: j }, lhs, Pat::Node(x0), p, x0)?;
            }
        }
        if j + 1 < d {
            if let (Some(c1), Some(c2)) = (xd.unit_of, yd.unit_of) {
                match lower[d - 1].compose(j, c1, c2) {
                    Some(c3) => {
                        let (u1, u2, u3) = (
                            self.unit_nodes[c1 as usize],
                            self.unit_nodes[c2 as usize],
                            self.unit_nodes[c3 as usize],
                        );
                        let lhs = Pat::Comp { k: j8, left: pn(u1), right: pn(u2), via: p };
                        self.record(AxiomFamily::IdentityFunctoriality { k: j }, lhs, Pat::Node(u3), p, u3)?;
                    }
                    None => self.truncated = true,
                }
            }
        }
        Ok(())
    }

    fn node_term(&self, lower: &[Level], n: NodeId, cache: &mut Vec<Option<Term>>) -> Term {
        if let Some(t) = &cache[n as usize] {
            return t.clone();
        }
        let t = match self.nodes[n as usize] {
            Node::Gen(i) => Term::gen(self.gens[i as usize].name.clone(), self.dim),
            Node::Unit(c) => Term::identity(lower[self.dim - 1].rep_term(c).clone()),
            Node::Comp { k, left, right } => {
                let l = self.node_term(lower, left, cache);
                let r = self.node_term(lower, right, cache);
                Term::compose(k as usize, l, r)
            }
        };
        cache[n as usize] = Some(t.clone());
        t
    }

    fn freeze(&mut self, lower: &[Level]) {
        let n = self.nodes.len();
        for id in 0..n as NodeId {
            self.find_mut(id);
        }
        let roots = self.roots();
        let mut dense = vec![NONE; n];
        for (i, &r) in roots.iter().enumerate() {
            dense[r as usize] = i as ClassId;
        }
        let node_class: Vec<ClassId> = (0..n).map(|i| dense[self.parent[i] as usize]).collect();
        let mut cache = vec![None; n];
        let mut strings: Vec<String> = Vec::with_capacity(n);
        for id in 0..n as NodeId {
            strings.push(self.node_term(lower, id, &mut cache).serialize());
        }
        let mut reps: Vec<NodeId> = roots.clone();
        for id in 0..n {
            let c = node_class[id] as usize;
            let best = reps[c] as usize;
            let (a, b) = (&strings[id], &strings[best]);
            if (a.len(), a) < (b.len(), b) {
                reps[c] = id as NodeId;
            }
        }
        let rep_terms = reps
            .iter()
            .map(|&r| cache[r as usize].clone().unwrap())
            .collect();
        self.frozen = Some(Frozen {
            node_class,
            roots,
            reps,
            rep_terms,
        });
    }

    pub fn members(&self, c: ClassId) -> &[NodeId] {
        &self.data(c).nodes
    }
}

/// Why a term failed to evaluate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum EvalError {
    IllTyped(String),
    /// Well-typed but outside the saturated region.
    Missing,
}

/// Tower of e-graph levels, one per dimension.
#[derive(Debug, Clone)]
pub struct CongruenceEngine {
    pub(crate) levels: Vec<Level>,
    bounds: Bounds,
}

impl CongruenceEngine {
    pub fn new(bounds: Bounds) -> Self {
        CongruenceEngine {
            levels: Vec::new(),
            bounds,
        }
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Number of levels; the top dimension is one less.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn top_dim(&self) -> Option<usize> {
        self.levels.len().checked_sub(1)
    }

    pub fn is_frozen(&self) -> bool {
        self.levels.last().is_none_or(|l| l.frozen.is_some())
    }

    /// Adds the dimension-0 level. Points are never identified.
    pub fn add_points<S: AsRef<str>>(&mut self, names: &[S]) -> Result<()> {
        if !self.levels.is_empty() {
            return Err(Error::Usage("points already added".into()));
        }
        let mut level = Level::new(0);
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref().to_string();
            if level.gen_index.insert(name.clone(), i as u32).is_some() {
                return Err(Error::Usage(format!("duplicate generator `{name}`")));
            }
            level.gens.push(GenInfo {
                name,
                src: NONE,
                tgt: NONE,
            });
            level.push_node(
                Node::Gen(i as u32),
                ClassData {
                    nodes: vec![],
                    src: NONE,
                    tgt: NONE,
                    bag: vec![i as u32],
                    word: None,
                    unit_of: None,
                },
            );
        }
        level.freeze(&[]);
        level.fixed_point_at = Some(0);
        self.levels.push(level);
        Ok(())
    }

    /// Adds the next level; boundaries are classes of the current top level.
    pub fn add_level(&mut self, gens: Vec<(String, ClassId, ClassId)>) -> Result<()> {
        let Some(top) = self.levels.last() else {
            return Err(Error::Usage("add points first".into()));
        };
        if top.frozen.is_none() {
            return Err(Error::Usage("saturate the top level first".into()));
        }
        let d = self.levels.len();
        let below = top.class_count() as ClassId;
        for (name, s, t) in &gens {
            if *s >= below || *t >= below {
                return Err(Error::NonParallelAttachment {
                    generator: name.clone(),
                    reason: "boundary class out of range".into(),
                });
            }
            if d >= 2 && (top.src_of(*s) != top.src_of(*t) || top.tgt_of(*s) != top.tgt_of(*t)) {
                return Err(Error::NonParallelAttachment {
                    generator: name.clone(),
                    reason: "source and target are not parallel".into(),
                });
            }
        }
        let mut level = Level::new(d);
        for (i, (name, s, t)) in gens.into_iter().enumerate() {
            if level.gen_index.insert(name.clone(), i as u32).is_some() {
                return Err(Error::Usage(format!("duplicate generator `{name}`")));
            }
            level.gens.push(GenInfo { name, src: s, tgt: t });
        }
        let bounds = self.bounds;
        for i in 0..level.gens.len() as u32 {
            level.add(&self.levels, &bounds, Node::Gen(i));
        }
        for c in 0..below {
            match level.add(&self.levels, &bounds, Node::Unit(c)) {
                Added::Node(n) => level.unit_nodes.push(n),
                _ => return Err(Error::Usage("node cap too small for identities".into())),
            }
        }
        self.levels.push(level);
        Ok(())
    }

    /// Runs one round on the top level. Returns whether anything changed.
    pub fn saturation_round(&mut self) -> Result<bool> {
        let bounds = self.bounds;
        let Some((top, lower)) = self.levels.split_last_mut() else {
            return Ok(false);
        };
        if top.dim == 0 {
            return Ok(false);
        }
        top.frozen = None;
        top.rounds += 1;
        let before: Vec<NodeId> = (0..top.nodes.len() as NodeId).map(|n| top.find(n)).collect();
        let changed = top.round(lower, &bounds)?;
        // each old class must land inside a single new class
        top.splits += before
            .iter()
            .enumerate()
            .filter(|&(n, &r)| top.find(n as NodeId) != top.find(r))
            .count();
        if !changed && top.fixed_point_at.is_none() {
            top.fixed_point_at = Some(top.rounds);
        }
        Ok(changed)
    }

    /// Saturates the top level to a fixed point or the round bound, then freezes it.
    pub fn saturate(&mut self) -> Result<SaturationReport> {
        let bounds = self.bounds;
        if let Some(top) = self.levels.last() {
            if top.fixed_point_at.is_none() && top.dim > 0 {
                while self.levels.last().unwrap().rounds < bounds.max_rounds {
                    let changed = self.saturation_round()?;
                    let top = self.levels.last().unwrap();
                    if !changed || top.cap_hit {
                        break;
                    }
                }
            }
        }
        let Some((top, lower)) = self.levels.split_last_mut() else {
            return Ok(SaturationReport {
                dim: 0,
                rounds_run: 0,
                fixed_point_at: Some(0),
                node_cap_hit: false,
                truncated: false,
                class_splits: 0,
                nodes: 0,
                classes: 0,
            });
        };
        if top.frozen.is_none() {
            top.freeze(lower);
        }
        Ok(self.report(top_dim_of(&self.levels)))
    }

    pub fn report(&self, dim: usize) -> SaturationReport {
        let l = &self.levels[dim];
        SaturationReport {
            dim,
            rounds_run: l.rounds,
            fixed_point_at: l.fixed_point_at,
            node_cap_hit: l.cap_hit,
            truncated: l.truncated,
            class_splits: l.splits,
            nodes: l.nodes.len(),
            classes: l.frozen.as_ref().map_or(0, |f| f.roots.len()),
        }
    }

    pub fn stats(&self, dim: usize) -> EngineStats {
        let l = &self.levels[dim];
        let mut axiom_instances = BTreeMap::new();
        for a in &l.axioms {
            *axiom_instances.entry(a.family.label()).or_insert(0) += 1;
        }
        EngineStats {
            nodes: l.nodes.len(),
            classes: l.frozen.as_ref().map_or(0, |f| f.roots.len()),
            merges: l.unions,
            axiom_instances,
        }
    }

    fn level(&self, dim: usize) -> Result<&Level> {
        let l = self.levels.get(dim).ok_or(Error::DimensionMismatch {
            expected: self.levels.len().saturating_sub(1),
            found: dim,
        })?;
        if l.frozen.is_none() {
            return Err(Error::Usage(format!("dimension {dim} is not saturated")));
        }
        Ok(l)
    }

    pub fn class_count(&self, dim: usize) -> usize {
        self.levels.get(dim).and_then(|l| l.frozen.as_ref()).map_or(0, |f| f.roots.len())
    }

    pub fn truncated(&self, dim: usize) -> bool {
        self.levels.get(dim).is_some_and(|l| l.truncated || l.cap_hit || l.fixed_point_at.is_none())
    }

    pub fn generator_names(&self, dim: usize) -> Vec<&str> {
        self.levels
            .get(dim)
            .map(|l| l.gens.iter().map(|g| g.name.as_str()).collect())
            .unwrap_or_default()
    }

    /// Class of a generator.
    pub fn generator_class(&self, dim: usize, name: &str) -> Option<ClassId> {
        let l = self.levels.get(dim)?;
        let n = l.gen_node(name)?;
        Some(l.class_of(n))
    }

    pub fn signature(&self) -> Signature {
        let mut s = Signature::new();
        for l in &self.levels {
            for g in &l.gens {
                s.insert(g.name.clone(), l.dim);
            }
        }
        s
    }

    pub fn parse_term(&self, input: &str) -> Result<Term> {
        Term::parse(input, &self.signature())
    }

    pub fn representative(&self, dim: usize, c: ClassId) -> &Term {
        self.levels[dim].rep_term(c)
    }

    pub fn src(&self, dim: usize, c: ClassId) -> Option<ClassId> {
        (dim > 0).then(|| self.levels[dim].src_of(c))
    }

    pub fn tgt(&self, dim: usize, c: ClassId) -> Option<ClassId> {
        (dim > 0).then(|| self.levels[dim].tgt_of(c))
    }

    /// Iterated source: the `k`-dimensional source of a `dim`-class.
    pub fn boundary(&self, dim: usize, c: ClassId, k: usize, target: bool) -> ClassId {
        Level::bnd(&self.levels, dim, c, k, target)
    }

    pub fn compose(&self, dim: usize, k: usize, a: ClassId, b: ClassId) -> Option<ClassId> {
        self.levels.get(dim)?.compose(k, a, b)
    }

    /// Identity on a `dim`-class, as a `(dim+1)`-class.
    pub fn identity(&self, dim: usize, c: ClassId) -> Option<ClassId> {
        let up = self.levels.get(dim + 1)?;
        up.frozen.as_ref()?;
        Some(up.unit_class(c))
    }

    pub fn is_identity_class(&self, dim: usize, c: ClassId) -> bool {
        dim > 0 && self.levels[dim].unit_of(c).is_some()
    }

    /// Top-dimensional generators of a class, sorted.
    pub fn class_generators(&self, dim: usize, c: ClassId) -> Vec<String> {
        let l = &self.levels[dim];
        l.bag_of(c).iter().map(|&i| l.gens[i as usize].name.clone()).collect()
    }

    pub fn class_size(&self, dim: usize, c: ClassId) -> usize {
        self.levels[dim].bag_of(c).len()
    }

    pub fn cells(&self, dim: usize) -> Vec<CellInfo> {
        let Ok(l) = self.level(dim) else { return Vec::new() };
        (0..l.class_count() as ClassId)
            .map(|c| CellInfo {
                dim,
                class: c,
                representative: l.rep_term(c).clone(),
                generators: self.class_generators(dim, c),
                src: self.src(dim, c),
                tgt: self.tgt(dim, c),
            })
            .collect()
    }

    /// Class counts keyed by generator multiset.
    pub fn counts_by_multiset(&self, dim: usize) -> BTreeMap<Vec<String>, usize> {
        let mut out = BTreeMap::new();
        for c in 0..self.class_count(dim) as ClassId {
            *out.entry(self.class_generators(dim, c)).or_insert(0) += 1;
        }
        out
    }

    /// Node of the term at its own level.
    pub(crate) fn eval_node(&self, t: &Term) -> std::result::Result<(usize, NodeId), EvalError> {
        let d = t.dim();
        let l = self
            .levels
            .get(d)
            .filter(|l| l.frozen.is_some())
            .ok_or_else(|| EvalError::IllTyped(format!("no saturated level for dimension {d}")))?;
        let n = match t {
            Term::Gen { name, .. } => l
                .gen_node(name)
                .ok_or_else(|| EvalError::IllTyped(format!("unknown generator `{name}`")))?,
            Term::Identity(body) => {
                let (_, m) = self.eval_node(body)?;
                let c = self.levels[d - 1].class_of(m);
                l.unit_nodes[c as usize]
            }
            Term::Compose { k, left, right } => {
                if *k >= d {
                    return Err(EvalError::IllTyped(format!("comp{k} on {d}-cells")));
                }
                if left.dim() != right.dim() {
                    return Err(EvalError::IllTyped("composite of cells of different dimensions".into()));
                }
                let (_, a) = self.eval_node(left)?;
                let (_, b) = self.eval_node(right)?;
                let (ca, cb) = (l.class_of(a), l.class_of(b));
                let f = l.frozen();
                let key = Node::Comp {
                    k: *k as u8,
                    left: f.roots[ca as usize],
                    right: f.roots[cb as usize],
                };
                match l.memo.get(&key) {
                    Some(&n) => n,
                    None => {
                        let ok = Level::bnd(&self.levels, d - 1, l.tgt_of(ca), *k, true)
                            == Level::bnd(&self.levels, d - 1, l.src_of(cb), *k, false);
                        if !ok {
                            return Err(EvalError::IllTyped(format!(
                                "{k}-boundaries do not match in comp{k}"
                            )));
                        }
                        return Err(EvalError::Missing);
                    }
                }
            }
        };
        Ok((d, n))
    }

    /// Class of a term, if it lies within the saturated region.
    pub fn eval(&self, t: &Term) -> Result<Option<ClassId>> {
        match self.eval_node(t) {
            Ok((d, n)) => Ok(Some(self.levels[d].class_of(n))),
            Err(EvalError::Missing) => Ok(None),
            Err(EvalError::IllTyped(m)) => Err(Error::IllTyped(m)),
        }
    }

    /// Boundary classes of a term, computed structurally from the frozen
    /// tables of lower levels only.
    pub(crate) fn type_of(&self, t: &Term) -> std::result::Result<(ClassId, ClassId), EvalError> {
        let d = t.dim();
        if d == 0 {
            return Err(EvalError::IllTyped("points have no boundary".into()));
        }
        let l = self
            .levels
            .get(d)
            .ok_or_else(|| EvalError::IllTyped(format!("no level for dimension {d}")))?;
        match t {
            Term::Gen { name, .. } => {
                let i = l
                    .gen_index
                    .get(name)
                    .ok_or_else(|| EvalError::IllTyped(format!("unknown generator `{name}`")))?;
                let g = &l.gens[*i as usize];
                Ok((g.src, g.tgt))
            }
            Term::Identity(body) => {
                let (_, n) = self.eval_node(body)?;
                let c = self.levels[d - 1].class_of(n);
                Ok((c, c))
            }
            Term::Compose { k, left, right } => {
                let k = *k;
                if k >= d || left.dim() != right.dim() {
                    return Err(EvalError::IllTyped("bad composite".into()));
                }
                let (sa, ta) = self.type_of(left)?;
                let (sb, tb) = self.type_of(right)?;
                if Level::bnd(&self.levels, d - 1, ta, k, true)
                    != Level::bnd(&self.levels, d - 1, sb, k, false)
                {
                    return Err(EvalError::IllTyped(format!("{k}-boundaries do not match")));
                }
                if k + 1 == d {
                    return Ok((sa, tb));
                }
                let below = &self.levels[d - 1];
                match (below.compose(k, sa, sb), below.compose(k, ta, tb)) {
                    (Some(s), Some(t)) => Ok((s, t)),
                    _ => Err(EvalError::Missing),
                }
            }
        }
    }

    /// Whether a term is well-typed, judged against the lower levels.
    pub fn check_term(&self, t: &Term) -> Result<bool> {
        if t.dim() == 0 {
            return Ok(matches!(t, Term::Gen { name, .. } if self.levels.first().is_some_and(|l| l.gen_index.contains_key(name))));
        }
        match self.type_of(t) {
            Ok(_) => Ok(true),
            Err(EvalError::Missing) => Ok(true),
            Err(EvalError::IllTyped(_)) => Ok(false),
        }
    }

    pub(crate) fn iter_unit_class(&self, top: usize, k: usize, z: ClassId) -> ClassId {
        Level::iter_unit(&self.levels, top, k, z)
    }

    /// Up to `limit` distinct terms denoting the class, one per e-graph node.
    pub fn class_member_terms(&self, dim: usize, c: ClassId, limit: usize) -> Vec<Term> {
        let l = &self.levels[dim];
        let mut cache = vec![None; l.nodes.len()];
        l.members(c)
            .iter()
            .take(limit)
            .map(|&n| l.node_term(&self.levels[..dim], n, &mut cache))
            .collect()
    }

    /// Recomputes every recorded axiom instance structurally.
    pub fn audit(&self) -> AuditReport {
        let mut r = AuditReport::default();
        for (d, l) in self.levels.iter().enumerate() {
            if l.frozen.is_none() {
                continue;
            }
            let mut cache = vec![None; l.nodes.len()];
            for a in &l.axioms {
                r.instances += 1;
                let lhs = pat_term(l, &self.levels[..d], &a.lhs, &mut cache);
                let rhs = pat_term(l, &self.levels[..d], &a.rhs, &mut cache);
                if lhs.generator_bag(d) != rhs.generator_bag(d) {
                    r.multiset_violations += 1;
                }
                match (self.type_of(&lhs), self.type_of(&rhs)) {
                    (Ok(x), Ok(y)) if x == y => {}
                    _ => r.boundary_violations += 1,
                }
            }
        }
        r
    }
}

fn top_dim_of(levels: &[Level]) -> usize {
    levels.len() - 1
}

pub(crate) fn pat_term(l: &Level, lower: &[Level], p: &Pat, cache: &mut Vec<Option<Term>>) -> Term {
    match p {
        Pat::Node(n) => l.node_term(lower, *n, cache),
        Pat::Comp { k, left, right, .. } => Term::compose(
            *k as usize,
            pat_term(l, lower, left, cache),
            pat_term(l, lower, right, cache),
        ),
    }
}
