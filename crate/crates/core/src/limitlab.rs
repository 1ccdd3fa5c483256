//! Finite pullbacks, weak pullbacks, and experiments testing whether
//! functors on finite sets and graphs preserve them.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::computads::{pullback_computads, Computad, ComputadBuilder, ComputadMap};
use crate::error::{Error, Result};
use crate::freecat::{Bounds, Term};
use crate::operads::slice_computad;

/// A total function `0..domain -> 0..codomain`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FinSetMap {
    pub domain: usize,
    pub codomain: usize,
    pub images: Vec<usize>,
}

impl FinSetMap {
    pub fn new(codomain: usize, images: Vec<usize>) -> Result<Self> {
        if let Some(v) = images.iter().find(|&&v| v >= codomain) {
            return Err(Error::InvalidMap(format!("image {v} outside codomain of size {codomain}")));
        }
        Ok(FinSetMap {
            domain: images.len(),
            codomain,
            images,
        })
    }

    pub fn identity(n: usize) -> Self {
        FinSetMap {
            domain: n,
            codomain: n,
            images: (0..n).collect(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FinSetMap) -> Result<FinSetMap> {
        if self.codomain != other.domain {
            return Err(Error::CodomainMismatch(format!(
                "cannot compose a map into {} elements with a map from {}",
                self.codomain, other.domain
            )));
        }
        Ok(FinSetMap {
            domain: self.domain,
            codomain: other.codomain,
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        })
    }

    /// Every map `0..domain -> 0..codomain`, in lexicographic order.
    pub fn all(domain: usize, codomain: usize) -> Vec<FinSetMap> {
        if domain == 0 {
            return vec![FinSetMap::new(codomain, Vec::new()).unwrap()];
        }
        (0..domain)
            .map(|_| 0..codomain)
            .multi_cartesian_product()
            .map(|images| FinSetMap {
                domain,
                codomain,
                images,
            })
            .collect()
    }
}

/// The pullback of a cospan, as matching pairs with their projections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pullback {
    pub pairs: Vec<(usize, usize)>,
    pub left: FinSetMap,
    pub right: FinSetMap,
}

pub fn pullback_sets(f: &FinSetMap, g: &FinSetMap) -> Result<Pullback> {
    if f.codomain != g.codomain {
        return Err(Error::CodomainMismatch(format!(
            "cospan legs land in sets of size {} and {}",
            f.codomain, g.codomain
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..f.domain)
        .cartesian_product(0..g.domain)
        .filter(|&(a, b)| f.apply(a) == g.apply(b))
        .collect();
    Ok(Pullback {
        left: FinSetMap {
            domain: pairs.len(),
            codomain: f.domain,
            images: pairs.iter().map(|p| p.0).collect(),
        },
        right: FinSetMap {
            domain: pairs.len(),
            codomain: g.domain,
            images: pairs.iter().map(|p| p.1).collect(),
        },
        pairs,
    })
}

/// Tuples agreeing in the common codomain of all legs.
pub fn wide_pullback_sets(legs: &[FinSetMap]) -> Result<Vec<Vec<usize>>> {
    let Some(first) = legs.first() else {
        return Ok(vec![Vec::new()]);
    };
    if legs.iter().any(|l| l.codomain != first.codomain) {
        return Err(Error::CodomainMismatch("wide cospan legs disagree on the codomain".into()));
    }
    let mut out = Vec::new();
    for c in 0..first.codomain {
        let fibres: Vec<Vec<usize>> = legs
            .iter()
            .map(|l| (0..l.domain).filter(|&x| l.apply(x) == c).collect())
            .collect();
        out.extend(fibres.into_iter().multi_cartesian_product());
    }
    out.sort();
    Ok(out)
}

/// A commuting square
///
/// ```text
/// P --top--> B
/// |left      |right
/// A --bottom--> C
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Square {
    pub top: FinSetMap,
    pub left: FinSetMap,
    pub right: FinSetMap,
    pub bottom: FinSetMap,
}

impl Square {
    pub fn new(top: FinSetMap, left: FinSetMap, right: FinSetMap, bottom: FinSetMap) -> Result<Square> {
        if top.domain != left.domain
            || top.codomain != right.domain
            || left.codomain != bottom.domain
            || right.codomain != bottom.codomain
        {
            return Err(Error::InvalidMap("square sides do not fit together".into()));
        }
        if let Some(p) = (0..top.domain).find(|&p| right.apply(top.apply(p)) != bottom.apply(left.apply(p))) {
            return Err(Error::InvalidMap(format!("square does not commute at element {p}")));
        }
        Ok(Square {
            top,
            left,
            right,
            bottom,
        })
    }

    /// The square formed by a pullback and its cospan.
    pub fn of_pullback(f: &FinSetMap, g: &FinSetMap) -> Result<Square> {
        let p = pullback_sets(f, g)?;
        Square::new(p.right, p.left, g.clone(), f.clone())
    }

    fn comparison(&self) -> (Vec<(usize, usize)>, Vec<usize>) {
        let pb = pullback_sets(&self.bottom, &self.right).expect("a square has a cospan");
        let index: HashMap<(usize, usize), usize> = pb.pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let map = (0..self.top.domain)
            .map(|p| index[&(self.left.apply(p), self.top.apply(p))])
            .collect();
        (pb.pairs, map)
    }
}

pub fn is_pullback(s: &Square) -> bool {
    let (a, b) = (s.bottom.domain, s.right.domain);
    let mut fibres = vec![(0usize, 0usize); s.bottom.codomain];
    (0..a).for_each(|x| fibres[s.bottom.apply(x)].0 += 1);
    (0..b).for_each(|y| fibres[s.right.apply(y)].1 += 1);
    let matching: usize = fibres.iter().map(|(l, r)| l * r).sum();
    if matching != s.top.domain {
        return false;
    }
    // commutativity puts every image in the pullback; it remains to see injectivity
    let mut hit = vec![false; a * b];
    (0..s.top.domain).all(|p| !std::mem::replace(&mut hit[s.left.apply(p) * b + s.top.apply(p)], true))
}

/// A section of the comparison map when it is surjective: for each matching
/// pair, the least corner element over it.
pub fn is_weak_pullback(s: &Square) -> Option<Vec<usize>> {
    let (pairs, map) = s.comparison();
    let mut section = vec![None; pairs.len()];
    for (p, &q) in map.iter().enumerate() {
        section[q].get_or_insert(p);
    }
    section.into_iter().collect()
}

/// All naturality squares are pullbacks.
pub fn is_cartesian(squares: &[Square]) -> bool {
    squares.iter().all(is_pullback)
}

pub fn is_weakly_cartesian(squares: &[Square]) -> bool {
    squares.iter().all(|s| is_weak_pullback(s).is_some())
}

/// A bounded endofunctor of finite sets. Elements of `F(0..n)` are encoded
/// as words over `0..n` or opaque codes.
pub trait SetFunctor {
    fn name(&self) -> String;
    fn elements(&self, n: usize) -> Vec<Vec<usize>>;
    fn map_element(&self, f: &FinSetMap, e: &[usize]) -> Vec<usize>;
    fn render(&self, _n: usize, e: &[usize], label: &dyn Fn(usize) -> String) -> String {
        format!("[{}]", e.iter().map(|&x| label(x)).join(","))
    }
    /// Whether values are cut off by a bound that might hide structure.
    fn partial(&self) -> bool {
        false
    }
}

/// `F(f)` as a map between the enumerated elements.
pub fn fmap<F: SetFunctor + ?Sized>(func: &F, f: &FinSetMap) -> Result<FinSetMap> {
    let dom = func.elements(f.domain);
    let cod = func.elements(f.codomain);
    let index: HashMap<&Vec<usize>, usize> = cod.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let images = dom
        .iter()
        .map(|e| {
            let image = func.map_element(f, e);
            index
                .get(&image)
                .copied()
                .ok_or_else(|| Error::Soundness(format!("{} maps an element outside its bound", func.name())))
        })
        .collect::<Result<_>>()?;
    FinSetMap::new(cod.len(), images)
}

/// Identity and composition laws on the given maps.
pub fn check_functoriality<F: SetFunctor + ?Sized>(func: &F, f: &FinSetMap, g: &FinSetMap) -> Result<bool> {
    let id = fmap(func, &FinSetMap::identity(f.domain))? == FinSetMap::identity(func.elements(f.domain).len());
    let composite = fmap(func, &f.then(g)?)? == fmap(func, f)?.then(&fmap(func, g)?)?;
    Ok(id && composite)
}

pub struct IdentityFunctor;

impl SetFunctor for IdentityFunctor {
    fn name(&self) -> String {
        "identity".into()
    }
    fn elements(&self, n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|x| vec![x]).collect()
    }
    fn map_element(&self, f: &FinSetMap, e: &[usize]) -> Vec<usize> {
        vec![f.apply(e[0])]
    }
    fn render(&self, _n: usize, e: &[usize], label: &dyn Fn(usize) -> String) -> String {
        label(e[0])
    }
}

/// `X ↦ X × X`.
pub struct PairsFunctor;

impl SetFunctor for PairsFunctor {
    fn name(&self) -> String {
        "pairs".into()
    }
    fn elements(&self, n: usize) -> Vec<Vec<usize>> {
        (0..n).cartesian_product(0..n).map(|(a, b)| vec![a, b]).collect()
    }
    fn map_element(&self, f: &FinSetMap, e: &[usize]) -> Vec<usize> {
        e.iter().map(|&x| f.apply(x)).collect()
    }
}

fn words(n: usize, len: usize) -> Vec<Vec<usize>> {
    (0..len).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|w| {
                (0..n).map(move |c| {
                    let mut w = w.clone();
                    w.push(c);
                    w
                })
            })
            .collect()
    })
}

/// Lists of length at most `max_len`: the free monoid.
pub struct ListFunctor {
    pub max_len: usize,
}

impl SetFunctor for ListFunctor {
    fn name(&self) -> String {
        format!("lists(len<={})", self.max_len)
    }
    fn elements(&self, n: usize) -> Vec<Vec<usize>> {
        (0..=self.max_len).flat_map(|l| words(n, l)).collect()
    }
    fn map_element(&self, f: &FinSetMap, e: &[usize]) -> Vec<usize> {
        e.iter().map(|&x| f.apply(x)).collect()
    }
}

/// Finite multisets of size at most `max_size`: the free commutative monoid.
pub struct MultisetFunctor {
    pub max_size: usize,
}

impl SetFunctor for MultisetFunctor {
    fn name(&self) -> String {
        format!("multisets(size<={})", self.max_size)
    }
    fn elements(&self, n: usize) -> Vec<Vec<usize>> {
        (0..=self.max_size)
            .flat_map(|s| (0..n).combinations_with_replacement(s))
            .collect()
    }
    fn map_element(&self, f: &FinSetMap, e: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = e.iter().map(|&x| f.apply(x)).collect();
        out.sort_unstable();
        out
    }
    fn render(&self, _n: usize, e: &[usize], label: &dyn Fn(usize) -> String) -> String {
        format!("{{{}}}", e.iter().map(|&x| label(x)).join(","))
    }
}

/// `X ↦` top-dimensional cells of the free k-category on the k-terminal
/// computad with generator set X, computed by the engine. Elements are
/// class ids.
pub struct SliceFunctor {
    pub k: usize,
    pub bounds: Bounds,
    cache: RefCell<BTreeMap<usize, Rc<Computad>>>,
}

impl SliceFunctor {
    pub fn new(k: usize, bounds: Bounds) -> Self {
        SliceFunctor {
            k,
            bounds,
            cache: RefCell::new(BTreeMap::new()),
        }
    }

    fn computad(&self, n: usize) -> Rc<Computad> {
        self.cache
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| Rc::new(slice_computad(self.k, n, self.bounds).expect("slice computads are valid")))
            .clone()
    }
}

fn rename_generators(t: &Term, dim: usize, f: &dyn Fn(&str) -> String) -> Term {
    match t {
        Term::Gen { name, dim: d } if *d == dim => Term::gen(f(name), dim),
        Term::Gen { .. } => t.clone(),
        Term::Identity(b) => Term::identity(rename_generators(b, dim, f)),
        Term::Compose { k, left, right } => {
            Term::compose(*k, rename_generators(left, dim, f), rename_generators(right, dim, f))
        }
    }
}

impl SetFunctor for SliceFunctor {
    fn name(&self) -> String {
        format!("slice{}(size<={})", self.k, self.bounds.size)
    }
    fn elements(&self, n: usize) -> Vec<Vec<usize>> {
        (0..self.computad(n).free_algebra().class_count(self.k)).map(|c| vec![c]).collect()
    }
    fn map_element(&self, f: &FinSetMap, e: &[usize]) -> Vec<usize> {
        let (src, tgt) = (self.computad(f.domain), self.computad(f.codomain));
        let rep = src.free_algebra().representative(self.k, e[0] as u32);
        let image = rename_generators(rep, self.k, &|name| {
            let i: usize = name[1..].parse().expect("generator names are x<i>");
            format!("x{}", f.apply(i))
        });
        match tgt.free_algebra().eval(&image) {
            Ok(Some(c)) => vec![c as usize],
            _ => vec![usize::MAX],
        }
    }
    fn render(&self, n: usize, e: &[usize], label: &dyn Fn(usize) -> String) -> String {
        let rep = self.computad(n).free_algebra().representative(self.k, e[0] as u32).clone();
        rename_generators(&rep, self.k, &|name| label(name[1..].parse().unwrap())).serialize()
    }
    fn partial(&self) -> bool {
        true
    }
}

/// A cospan of finite sets with element names for reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cospan {
    pub f: FinSetMap,
    pub g: FinSetMap,
    pub names: [Vec<String>; 3],
}

impl Cospan {
    pub fn new(f: FinSetMap, g: FinSetMap) -> Self {
        let num = |n: usize, p: &str| (0..n).map(|i| format!("{p}{i}")).collect();
        let names = [num(f.domain, "a"), num(g.domain, "b"), num(f.codomain, "c")];
        Cospan { f, g, names }
    }

    pub fn with_names(mut self, left: &[&str], right: &[&str], base: &[&str]) -> Self {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
        self.names = [own(left), own(right), own(base)];
        self
    }

    /// Both legs into a set of at most `max_base` elements, sources of at
    /// most `max_side` elements; each unordered pair of legs once.
    pub fn all(max_side: usize, max_base: usize) -> Vec<Cospan> {
        let mut out = Vec::new();
        for c in 0..=max_base {
            let legs: Vec<FinSetMap> = (0..=max_side).flat_map(|a| FinSetMap::all(a, c)).collect();
            for (i, f) in legs.iter().enumerate() {
                for g in &legs[i..] {
                    out.push(Cospan::new(f.clone(), g.clone()));
                }
            }
        }
        out
    }

    fn text(&self) -> String {
        let leg = |m: &FinSetMap, names: &[String]| {
            format!(
                "{{{}}}",
                (0..m.domain).map(|x| format!("{}->{}", names[x], self.names[2][m.apply(x)])).join(",")
            )
        };
        format!("{} ; {}", leg(&self.f, &self.names[0]), leg(&self.g, &self.names[1]))
    }
}

/// Why a comparison map fails to be a bijection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Two distinct elements with the same image pair.
    Conflated { first: String, second: String, image: String },
    /// A matching pair with no preimage.
    Missed { pair: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseResult {
    pub cospan: String,
    pub pullback: bool,
    pub weak_pullback: bool,
    pub witness: Option<Witness>,
    /// Raw indices behind the witness: elements of F(P), or a pair of
    /// elements of F(A) × F(B).
    #[serde(skip)]
    pub raw: Option<(Vec<usize>, Vec<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    pub functor: String,
    pub cases: usize,
    pub pullbacks_preserved: usize,
    pub weak_pullbacks_preserved: usize,
    pub failures: Vec<CaseResult>,
    pub partial: bool,
}

impl PreservationReport {
    pub fn all_preserved(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares `F(A ×_C B)` with `F(A) ×_{F(C)} F(B)` along the canonical map.
pub fn preservation_case<F: SetFunctor + ?Sized>(func: &F, c: &Cospan) -> Result<CaseResult> {
    let pb = pullback_sets(&c.f, &c.g)?;
    let square = Square::new(fmap(func, &pb.right)?, fmap(func, &pb.left)?, fmap(func, &c.g)?, fmap(func, &c.f)?)?;
    let pullback = is_pullback(&square);
    let weak_pullback = is_weak_pullback(&square).is_some();
    let (mut witness, mut raw) = (None, None);
    if !pullback {
        let p_names: Vec<String> = pb.pairs.iter().map(|&(a, b)| format!("({},{})", c.names[0][a], c.names[1][b])).collect();
        let p_elems = func.elements(pb.pairs.len());
        let (a_elems, b_elems) = (func.elements(c.f.domain), func.elements(c.g.domain));
        let show_p = |e: &[usize]| func.render(pb.pairs.len(), e, &|x| p_names[x].clone());
        let show_a = |e: &[usize]| func.render(c.f.domain, e, &|x| c.names[0][x].clone());
        let show_b = |e: &[usize]| func.render(c.g.domain, e, &|x| c.names[1][x].clone());
        let (pairs, map) = square.comparison();
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for (p, &q) in map.iter().enumerate() {
            if let Some(&first) = seen.get(&q) {
                let (ia, ib) = pairs[q];
                witness = Some(Witness::Conflated {
                    first: show_p(&p_elems[first]),
                    second: show_p(&p_elems[p]),
                    image: format!("({},{})", show_a(&a_elems[ia]), show_b(&b_elems[ib])),
                });
                raw = Some((p_elems[first].clone(), p_elems[p].clone()));
                break;
            }
            seen.insert(q, p);
        }
        if witness.is_none() {
            if let Some(q) = (0..pairs.len()).find(|q| !seen.contains_key(q)) {
                let (ia, ib) = pairs[q];
                witness = Some(Witness::Missed {
                    pair: format!("({},{})", show_a(&a_elems[ia]), show_b(&b_elems[ib])),
                });
                raw = Some((a_elems[ia].clone(), b_elems[ib].clone()));
            }
        }
    }
    Ok(CaseResult {
        cospan: c.text(),
        pullback,
        weak_pullback,
        witness,
        raw,
    })
}

pub fn preserves_pullbacks_experiment<F: SetFunctor + ?Sized>(func: &F, cospans: &[Cospan]) -> Result<PreservationReport> {
    let mut report = PreservationReport {
        functor: func.name(),
        cases: cospans.len(),
        pullbacks_preserved: 0,
        weak_pullbacks_preserved: 0,
        failures: Vec::new(),
        partial: func.partial(),
    };
    for c in cospans {
        let r = preservation_case(func, c)?;
        report.pullbacks_preserved += usize::from(r.pullback);
        report.weak_pullbacks_preserved += usize::from(r.weak_pullback);
        if !r.pullback {
            report.failures.push(r);
        }
    }
    Ok(report)
}

/// A finite directed multigraph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    fn canonical(&self) -> Graph {
        (0..self.vertices)
            .permutations(self.vertices)
            .map(|p| {
                let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(s, t)| (p[s], p[t])).collect();
                edges.sort_unstable();
                Graph {
                    vertices: self.vertices,
                    edges,
                }
            })
            .min()
            .unwrap_or_else(|| self.clone())
    }

    /// Graphs up to isomorphism.
    pub fn enumerate(max_vertices: usize, max_edges: usize) -> Vec<Graph> {
        let mut out = BTreeSet::new();
        for v in 0..=max_vertices {
            let slots: Vec<(usize, usize)> = (0..v).cartesian_product(0..v).collect();
            for e in 0..=max_edges {
                for edges in slots.iter().copied().combinations_with_replacement(e) {
                    out.insert(Graph { vertices: v, edges }.canonical());
                }
            }
        }
        out.into_iter().collect()
    }

    /// Paths of length at most `max_len`, each encoded as its start vertex
    /// followed by its edges.
    pub fn paths(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = (0..self.vertices).map(|v| vec![v]).collect();
        let mut frontier: Vec<(Vec<usize>, usize)> = (0..self.vertices).map(|v| (vec![v], v)).collect();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (path, end) in &frontier {
                for (i, &(s, t)) in self.edges.iter().enumerate() {
                    if s == *end {
                        let mut p = path.clone();
                        p.push(i);
                        next.push((p, t));
                    }
                }
            }
            out.extend(next.iter().map(|(p, _)| p.clone()));
            frontier = next;
        }
        out
    }

    pub fn computad(&self, bounds: Bounds) -> Result<Computad> {
        let points: Vec<String> = (0..self.vertices).map(|v| format!("v{v}")).collect();
        let mut b = ComputadBuilder::new(1, bounds).points(&points);
        for (i, &(s, t)) in self.edges.iter().enumerate() {
            b = b.generator(1, &format!("e{i}"), &points[s], &points[t]);
        }
        b.build()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphMorphism {
    pub vertex: Vec<usize>,
    pub edge: Vec<usize>,
}

/// All graph morphisms `g -> h`.
pub fn graph_morphisms(g: &Graph, h: &Graph) -> Vec<GraphMorphism> {
    let mut out = Vec::new();
    for vertex in FinSetMap::all(g.vertices, h.vertices) {
        let choices: Vec<Vec<usize>> = g
            .edges
            .iter()
            .map(|&(s, t)| {
                (0..h.edges.len())
                    .filter(|&j| h.edges[j] == (vertex.apply(s), vertex.apply(t)))
                    .collect()
            })
            .collect();
        if choices.is_empty() {
            out.push(GraphMorphism {
                vertex: vertex.images.clone(),
                edge: Vec::new(),
            });
            continue;
        }
        for edge in choices.into_iter().multi_cartesian_product() {
            out.push(GraphMorphism {
                vertex: vertex.images.clone(),
                edge,
            });
        }
    }
    out
}

/// The pullback graph of two morphisms into a common graph, with the
/// projection morphisms.
pub fn pullback_graph(g1: &Graph, m1: &GraphMorphism, g2: &Graph, m2: &GraphMorphism) -> (Graph, GraphMorphism, GraphMorphism) {
    let vs: Vec<(usize, usize)> = (0..g1.vertices)
        .cartesian_product(0..g2.vertices)
        .filter(|&(a, b)| m1.vertex[a] == m2.vertex[b])
        .collect();
    let vindex: HashMap<(usize, usize), usize> = vs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let es: Vec<(usize, usize)> = (0..g1.edges.len())
        .cartesian_product(0..g2.edges.len())
        .filter(|&(a, b)| m1.edge[a] == m2.edge[b])
        .collect();
    let graph = Graph {
        vertices: vs.len(),
        edges: es
            .iter()
            .map(|&(a, b)| {
                let (s1, t1) = g1.edges[a];
                let (s2, t2) = g2.edges[b];
                (vindex[&(s1, s2)], vindex[&(t1, t2)])
            })
            .collect(),
    };
    let p1 = GraphMorphism {
        vertex: vs.iter().map(|p| p.0).collect(),
        edge: es.iter().map(|p| p.0).collect(),
    };
    let p2 = GraphMorphism {
        vertex: vs.iter().map(|p| p.1).collect(),
        edge: es.iter().map(|p| p.1).collect(),
    };
    (graph, p1, p2)
}

const NONE: u32 = u32::MAX;

/// Paths of bounded length as a trie: a path extends by an edge leaving
/// its end vertex to a longer path.
struct PathTable {
    start: Vec<u32>,
    ext: Vec<u32>,
    end: Vec<usize>,
    edges: usize,
}

impl PathTable {
    fn new(g: &Graph, max_len: usize) -> PathTable {
        let e = g.edges.len();
        let mut t = PathTable {
            start: (0..g.vertices as u32).collect(),
            ext: vec![NONE; g.vertices * e],
            end: (0..g.vertices).collect(),
            edges: e,
        };
        let mut frontier: Vec<usize> = (0..g.vertices).collect();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in frontier {
                for (i, &(s, tgt)) in g.edges.iter().enumerate() {
                    if s == t.end[p] {
                        let q = t.end.len();
                        t.end.push(tgt);
                        t.ext.extend(std::iter::repeat_n(NONE, e));
                        t.ext[p * e + i] = q as u32;
                        next.push(q);
                    }
                }
            }
            frontier = next;
        }
        t
    }

    fn len(&self) -> usize {
        self.end.len()
    }

    fn extend(&self, p: u32, e: usize) -> u32 {
        self.ext[p as usize * self.edges + e]
    }

    /// `F(m)` on paths.
    fn image(&self, m: &GraphMorphism, target: &PathTable) -> FinSetMap {
        let mut images = vec![0usize; self.len()];
        for (v, &p) in self.start.iter().enumerate() {
            images[p as usize] = target.start[m.vertex[v]] as usize;
        }
        for p in 0..self.len() {
            for e in 0..self.edges {
                let q = self.extend(p as u32, e);
                if q != NONE {
                    images[q as usize] = target.extend(images[p] as u32, m.edge[e]) as usize;
                }
            }
        }
        FinSetMap::new(target.len(), images).expect("path images are paths")
    }
}

/// Paths of the pullback graph, given by their two projections.
fn pullback_paths(t1: &PathTable, m1: &GraphMorphism, t2: &PathTable, m2: &GraphMorphism) -> (FinSetMap, FinSetMap) {
    let (mut l1, mut l2) = (Vec::new(), Vec::new());
    for (a, &pa) in t1.start.iter().enumerate() {
        for (b, &pb) in t2.start.iter().enumerate() {
            if m1.vertex[a] == m2.vertex[b] {
                l1.push(pa);
                l2.push(pb);
            }
        }
    }
    let mut i = 0;
    while i < l1.len() {
        let (p, q) = (l1[i], l2[i]);
        for e1 in 0..t1.edges {
            let p2 = t1.extend(p, e1);
            if p2 == NONE {
                continue;
            }
            for e2 in 0..t2.edges {
                let q2 = t2.extend(q, e2);
                if q2 != NONE && m1.edge[e1] == m2.edge[e2] {
                    l1.push(p2);
                    l2.push(q2);
                }
            }
        }
        i += 1;
    }
    let finish = |v: Vec<u32>, cod: usize| FinSetMap::new(cod, v.into_iter().map(|x| x as usize).collect()).unwrap();
    (finish(l1, t1.len()), finish(l2, t2.len()))
}

/// Outcome of the free-category functor on all cospans of small graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphExperiment {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub path_length: usize,
    pub graphs: usize,
    pub cospans: usize,
    pub pullbacks_preserved: usize,
    pub failures: Vec<String>,
    /// Graphs whose engine cell count matched the path count.
    pub engine_graphs_agreed: usize,
    /// Sampled cospans where the engine's computad pullback had exactly
    /// the pulled-back path set as its 1-cells.
    pub engine_cospans_checked: usize,
    pub engine_cospans_agreed: usize,
}

/// Runs every cospan `G1 -> H <- G2` of graphs within the bounds, each
/// unordered pair of legs once. The engine replays a seeded sample.
pub fn graph_path_experiment(
    max_vertices: usize,
    max_edges: usize,
    path_length: usize,
    engine_sample: usize,
    seed: u64,
) -> Result<GraphExperiment> {
    let graphs = Graph::enumerate(max_vertices, max_edges);
    let bounds = Bounds::with_size(path_length);
    let mut engine_graphs_agreed = 0;
    for g in &graphs {
        let c = g.computad(bounds)?;
        if c.free_algebra().class_count(1) == g.paths(path_length).len() {
            engine_graphs_agreed += 1;
        }
    }
    let mut report = GraphExperiment {
        max_vertices,
        max_edges,
        path_length,
        graphs: graphs.len(),
        cospans: 0,
        pullbacks_preserved: 0,
        failures: Vec::new(),
        engine_graphs_agreed,
        engine_cospans_checked: 0,
        engine_cospans_agreed: 0,
    };
    let tables: Vec<PathTable> = graphs.iter().map(|g| PathTable::new(g, path_length)).collect();
    let morphisms: Vec<Vec<(usize, GraphMorphism)>> = graphs
        .iter()
        .map(|h| {
            graphs
                .iter()
                .enumerate()
                .flat_map(|(gi, g)| graph_morphisms(g, h).into_iter().map(move |m| (gi, m)))
                .collect()
        })
        .collect();
    let total: usize = morphisms.iter().map(|m| m.len() * (m.len() + 1) / 2).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample: BTreeSet<usize> = rand::seq::index::sample(&mut rng, total.max(1), engine_sample.min(total))
        .into_iter()
        .collect();
    for (hi, h) in graphs.iter().enumerate() {
        let legs: Vec<FinSetMap> = morphisms[hi]
            .iter()
            .map(|(gi, m)| tables[*gi].image(m, &tables[hi]))
            .collect();
        for i in 0..legs.len() {
            for j in i..legs.len() {
                let ((g1i, m1), (g2i, m2)) = (&morphisms[hi][i], &morphisms[hi][j]);
                let (l1, l2) = pullback_paths(&tables[*g1i], m1, &tables[*g2i], m2);
                let (paths_in_pullback, square) = (l1.domain, Square::new(l2, l1, legs[j].clone(), legs[i].clone())?);
                if sample.contains(&report.cospans) {
                    report.engine_cospans_checked += 1;
                    let (g1, g2) = (&graphs[*g1i], &graphs[*g2i]);
                    if engine_pullback_cells(g1, m1, g2, m2, h, bounds)? == Some(paths_in_pullback) {
                        report.engine_cospans_agreed += 1;
                    }
                }
                report.cospans += 1;
                if is_pullback(&square) {
                    report.pullbacks_preserved += 1;
                } else {
                    report.failures.push(format!("{:?} -> {h:?} <- {:?}", graphs[*g1i], graphs[*g2i]));
                }
            }
        }
    }
    Ok(report)
}

fn computad_map(src: &Graph, m: &GraphMorphism, h: &Graph, bounds: Bounds) -> Result<ComputadMap> {
    let vertices = (0..src.vertices).map(|v| (format!("v{v}"), format!("v{}", m.vertex[v]))).collect();
    let edges = (0..src.edges.len()).map(|e| (format!("e{e}"), format!("e{}", m.edge[e]))).collect();
    ComputadMap::new(src.computad(bounds)?, h.computad(bounds)?, vec![vertices, edges])
}

/// 1-cell count of the engine's pullback of the two computad maps, if
/// every generator lifted uniquely.
fn engine_pullback_cells(
    g1: &Graph,
    m1: &GraphMorphism,
    g2: &Graph,
    m2: &GraphMorphism,
    h: &Graph,
    bounds: Bounds,
) -> Result<Option<usize>> {
    let pb = pullback_computads(&computad_map(g1, m1, h, bounds)?, &computad_map(g2, m2, h, bounds)?)?;
    Ok(pb.failures.is_empty().then(|| pb.apex.free_algebra().class_count(1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GateVerdict {
    #[serde(rename = "PASS-WITHIN-BOUNDS")]
    PassWithinBounds,
    #[serde(rename = "COUNTEREXAMPLE")]
    Counterexample,
}

impl GateVerdict {
    pub fn label(self) -> &'static str {
        match self {
            GateVerdict::PassWithinBounds => "PASS-WITHIN-BOUNDS",
            GateVerdict::Counterexample => "COUNTEREXAMPLE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateReport {
    pub n: usize,
    pub verdict: GateVerdict,
    pub statement: String,
    pub functor: String,
    pub size_bound: usize,
    pub cases: usize,
    pub failures: usize,
    pub witness: Option<Witness>,
    pub witness_cospan: Option<String>,
    /// The witness rechecked by independent enumeration.
    pub oracle_replay: Option<bool>,
    pub engine_checked: usize,
    pub engine_agreed: usize,
    pub partial: bool,
}

const PASS_NOTE: &str = "bounded evidence consistent with a presheaf topos; not a proof";
const FAIL_NOTE: &str = "complete finite counterexample: the free functor does not preserve this pullback";

/// The decisive experiment for n-computads of strict ω-categories.
/// n = 1: lists on all cospans of small sets. n = 2: paths on all cospans
/// of small graphs. n = 3: multisets on `{a,b} -> {*} <- {a,b}`.
pub fn computad_topos_gate(n: usize, bounds: Bounds, seed: u64) -> Result<GateReport> {
    match n {
        1 => {
            let cospans = Cospan::all(3, 3);
            let lists = preserves_pullbacks_experiment(&ListFunctor { max_len: bounds.size }, &cospans)?;
            let slice = SliceFunctor::new(1, bounds);
            let (checked, agreed) = engine_sample(&slice, &ListFunctor { max_len: bounds.size }, &cospans, 40, seed)?;
            Ok(gate_from(1, lists, bounds.size, checked, agreed))
        }
        2 => {
            let g = graph_path_experiment(3, 3, bounds.size, 40, seed)?;
            let failures = g.failures.len();
            Ok(GateReport {
                n,
                verdict: if failures == 0 { GateVerdict::PassWithinBounds } else { GateVerdict::Counterexample },
                statement: if failures == 0 { PASS_NOTE.into() } else { FAIL_NOTE.into() },
                functor: format!("paths(len<={})", bounds.size),
                size_bound: bounds.size,
                cases: g.cospans,
                failures,
                witness: None,
                witness_cospan: g.failures.first().cloned(),
                oracle_replay: None,
                engine_checked: g.engine_cospans_checked + g.graphs,
                engine_agreed: g.engine_cospans_agreed + g.engine_graphs_agreed,
                partial: true,
            })
        }
        3 => {
            let f = FinSetMap::new(1, vec![0, 0])?;
            let witness_cospan = Cospan::new(f.clone(), f).with_names(&["a", "b"], &["a", "b"], &["*"]);
            let multisets = MultisetFunctor { max_size: bounds.size };
            let mut report = preserves_pullbacks_experiment(&multisets, std::slice::from_ref(&witness_cospan))?;
            let decisive = report.failures.first().cloned();
            let rest = preserves_pullbacks_experiment(&multisets, &Cospan::all(2, 2))?;
            report.cases += rest.cases;
            report.failures.extend(rest.failures);
            let slice = SliceFunctor::new(2, bounds);
            let engine = preservation_case(&slice, &witness_cospan)?;
            let mut g = gate_from(3, report, bounds.size, 1, usize::from(!engine.pullback));
            if let Some(case) = decisive {
                g.witness = case.witness.clone();
                g.witness_cospan = Some(case.cospan.clone());
                g.oracle_replay = case.raw.as_ref().map(|(x, y)| replay_multiset_witness(x, y));
            }
            Ok(g)
        }
        _ => Err(Error::Usage(format!("the topos gate supports n = 1, 2, 3, not {n}"))),
    }
}

fn gate_from(n: usize, r: PreservationReport, size: usize, engine_checked: usize, engine_agreed: usize) -> GateReport {
    let failed = !r.failures.is_empty();
    let first = r.failures.first();
    GateReport {
        n,
        verdict: if failed { GateVerdict::Counterexample } else { GateVerdict::PassWithinBounds },
        statement: if failed { FAIL_NOTE.into() } else { PASS_NOTE.into() },
        functor: r.functor.clone(),
        size_bound: size,
        cases: r.cases,
        failures: r.failures.len(),
        witness: first.and_then(|c| c.witness.clone()),
        witness_cospan: first.map(|c| c.cospan.clone()),
        oracle_replay: None,
        engine_checked,
        engine_agreed,
        partial: r.partial || size > 0,
    }
}

/// Agreement of verdicts between an engine-backed functor and its oracle
/// on a seeded sample of cospans.
fn engine_sample(
    engine: &dyn SetFunctor,
    oracle: &dyn SetFunctor,
    cospans: &[Cospan],
    count: usize,
    seed: u64,
) -> Result<(usize, usize)> {
    let mut picks: Vec<&Cospan> = cospans.iter().collect();
    picks.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut agreed = 0;
    let picks: Vec<&Cospan> = picks.into_iter().take(count).collect();
    for c in &picks {
        let (e, o) = (preservation_case(engine, c)?, preservation_case(oracle, c)?);
        let sizes_match = engine.elements(c.f.domain).len() == oracle.elements(c.f.domain).len();
        if e.pullback == o.pullback && sizes_match {
            agreed += 1;
        }
    }
    Ok((picks.len(), agreed))
}

/// Checks, by listing all multisets of pairs over `{a,b} × {a,b}`, that the
/// two given multisets differ yet have the same pair of projections.
pub fn replay_multiset_witness(x: &[usize], y: &[usize]) -> bool {
    // pairs in the order of pullback_sets on {a,b} -> {*} <- {a,b}
    let pairs = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let project = |m: &[usize], side: usize| -> Vec<usize> {
        let mut v: Vec<usize> = m
            .iter()
            .map(|&i| if side == 0 { pairs[i].0 } else { pairs[i].1 })
            .collect();
        v.sort_unstable();
        v
    };
    let mut all = Vec::new();
    for i in 0..4 {
        for j in i..4 {
            all.push(vec![i, j]);
        }
    }
    let known = |m: &[usize]| all.iter().any(|a| a == m);
    x != y && known(x) && known(y) && project(x, 0) == project(y, 0) && project(x, 1) == project(y, 1)
}
