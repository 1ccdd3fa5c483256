//! Computads built dimension by dimension, their free algebras, the
//! computad of a finite algebra, and pullbacks of computads.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::freecat::{Bounds, ClassId, CongruenceEngine, SaturationReport, Signature, Term};
use crate::globular::GlobularSet;
use crate::text;

/// One generator with its attaching boundary (absent in dimension 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorDecl {
    pub name: String,
    pub boundary: Option<(Term, Term)>,
}

/// A validated n-computad together with its bounded free algebra.
#[derive(Debug, Clone)]
pub struct Computad {
    dim: usize,
    layers: Vec<Vec<GeneratorDecl>>,
    bounds: Bounds,
    engine: CongruenceEngine,
    reports: Vec<SaturationReport>,
}

/// Incremental construction; attachments are given in term syntax.
#[derive(Debug, Clone)]
pub struct ComputadBuilder {
    dim: usize,
    layers: Vec<Vec<(String, Option<(String, String)>)>>,
    bounds: Bounds,
}

impl ComputadBuilder {
    pub fn new(dim: usize, bounds: Bounds) -> Self {
        ComputadBuilder {
            dim,
            layers: vec![Vec::new(); dim + 1],
            bounds,
        }
    }

    pub fn point(mut self, name: &str) -> Self {
        self.layers[0].push((name.to_string(), None));
        self
    }

    pub fn points<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        for n in names {
            self.layers[0].push((n.as_ref().to_string(), None));
        }
        self
    }

    pub fn generator(mut self, dim: usize, name: &str, src: &str, tgt: &str) -> Self {
        if dim >= self.layers.len() {
            self.layers.resize(dim + 1, Vec::new());
            self.dim = dim;
        }
        self.layers[dim].push((name.to_string(), Some((src.to_string(), tgt.to_string()))));
        self
    }

    pub fn build(self) -> Result<Computad> {
        let mut signature = Signature::new();
        let mut layers = Vec::with_capacity(self.layers.len());
        for (r, layer) in self.layers.into_iter().enumerate() {
            for (name, _) in &layer {
                if !text::is_identifier(name) {
                    return Err(Error::Usage(format!("`{name}` is not a valid generator name")));
                }
            }
            let mut decls = Vec::new();
            for (name, att) in layer {
                let boundary = match (r, att) {
                    (0, None) => None,
                    (0, Some(_)) => {
                        return Err(Error::NonParallelAttachment {
                            generator: name,
                            reason: "points have no boundary".into(),
                        })
                    }
                    (_, None) => {
                        return Err(Error::NonParallelAttachment {
                            generator: name,
                            reason: "missing boundary".into(),
                        })
                    }
                    (_, Some((s, t))) => Some((Term::parse(&s, &signature)?, Term::parse(&t, &signature)?)),
                };
                decls.push(GeneratorDecl { name, boundary });
            }
            for d in &decls {
                if !signature.insert(d.name.clone(), r) {
                    return Err(Error::Usage(format!("duplicate generator `{}`", d.name)));
                }
            }
            layers.push(decls);
        }
        Computad::from_layers(self.dim, layers, self.bounds)
    }
}

impl Computad {
    /// Validates attachments by saturating each level before the next is attached.
    pub fn from_layers(dim: usize, mut layers: Vec<Vec<GeneratorDecl>>, bounds: Bounds) -> Result<Computad> {
        if layers.len() > dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: layers.len() - 1,
            });
        }
        layers.resize(dim + 1, Vec::new());
        let mut engine = CongruenceEngine::new(bounds);
        let points: Vec<&str> = layers[0].iter().map(|g| g.name.as_str()).collect();
        engine.add_points(&points)?;
        let mut reports = vec![engine.saturate()?];
        for r in 1..=dim {
            let mut gens = Vec::new();
            for g in &layers[r] {
                let (s, t) = g.boundary.as_ref().ok_or_else(|| Error::NonParallelAttachment {
                    generator: g.name.clone(),
                    reason: "missing boundary".into(),
                })?;
                let cs = attachment_class(&engine, &g.name, r, s)?;
                let ct = attachment_class(&engine, &g.name, r, t)?;
                gens.push((g.name.clone(), cs, ct));
            }
            engine.add_level(gens)?;
            reports.push(engine.saturate()?);
        }
        Ok(Computad {
            dim,
            layers,
            bounds,
            engine,
            reports,
        })
    }

    /// A globular set read as a computad whose attachments are generators.
    pub fn from_globular(g: &GlobularSet, bounds: Bounds) -> Result<Computad> {
        g.validate()?;
        let mut layers = vec![g
            .names(0)
            .iter()
            .map(|n| GeneratorDecl {
                name: n.clone(),
                boundary: None,
            })
            .collect::<Vec<_>>()];
        for r in 1..=g.dim() {
            let below = r - 1;
            layers.push(
                (0..g.cell_count(r))
                    .map(|x| GeneratorDecl {
                        name: g.name(r, x).to_string(),
                        boundary: Some((
                            Term::gen(g.name(below, g.src(r, x)), below),
                            Term::gen(g.name(below, g.tgt(r, x)), below),
                        )),
                    })
                    .collect(),
            );
        }
        Computad::from_layers(g.dim(), layers, bounds)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn layers(&self) -> &[Vec<GeneratorDecl>] {
        &self.layers
    }

    pub fn generators(&self, r: usize) -> &[GeneratorDecl] {
        self.layers.get(r).map_or(&[], Vec::as_slice)
    }

    pub fn generator_counts(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn find(&self, r: usize, name: &str) -> Option<&GeneratorDecl> {
        self.generators(r).iter().find(|g| g.name == name)
    }

    /// The saturated free algebra of the computad.
    pub fn free_algebra(&self) -> &CongruenceEngine {
        &self.engine
    }

    pub fn saturation_reports(&self) -> &[SaturationReport] {
        &self.reports
    }

    /// Per-dimension summary, including partiality markers.
    pub fn free_summary(&self) -> Vec<DimensionSummary> {
        (0..=self.dim)
            .map(|r| DimensionSummary {
                dim: r,
                generators: self.layers[r].len(),
                classes: self.engine.class_count(r),
                partial: self.engine.truncated(r),
                size_bound: self.bounds.size,
                report: self.reports[r].clone(),
            })
            .collect()
    }

    pub fn truncate(&self, k: usize) -> Result<Computad> {
        let k = k.min(self.dim);
        Computad::from_layers(k, self.layers[..=k].to_vec(), self.bounds)
    }

    pub fn with_bounds(&self, bounds: Bounds) -> Result<Computad> {
        Computad::from_layers(self.dim, self.layers.clone(), bounds)
    }

    /// Text format: `dim n`, then `gen 0 a` and `gen r f : s -> t`.
    pub fn parse(input: &str, bounds: Bounds) -> Result<Computad> {
        let mut dim: Option<usize> = None;
        let mut builder_layers: Vec<(usize, usize, String, Option<(String, String)>)> = Vec::new();
        for (line, content) in text::lines(input) {
            let mut words = content.splitn(3, char::is_whitespace);
            match words.next() {
                Some("dim") => {
                    let n = words.next().ok_or_else(|| Error::parse(line, "missing dimension"))?;
                    dim = Some(text::parse_usize(line, n)?);
                }
                Some("gen") => {
                    let r = text::parse_usize(line, words.next().unwrap_or(""))?;
                    let rest = words.next().ok_or_else(|| Error::parse(line, "missing generator"))?;
                    if r == 0 {
                        for name in rest.split_whitespace() {
                            builder_layers.push((line, 0, name.to_string(), None));
                        }
                    } else {
                        let (name, att) = text::split_once(line, rest, ":")?;
                        let (s, t) = text::split_once(line, att, "->")?;
                        builder_layers.push((line, r, name.to_string(), Some((s.to_string(), t.to_string()))));
                    }
                }
                Some(other) => return Err(Error::parse(line, format!("unknown directive `{other}`"))),
                None => {}
            }
        }
        let top = builder_layers.iter().map(|g| g.1).max().unwrap_or(0);
        let dim = dim.unwrap_or(top);
        if top > dim {
            return Err(Error::DimensionMismatch { expected: dim, found: top });
        }
        let mut signature = Signature::new();
        let mut layers = vec![Vec::new(); dim + 1];
        let mut ordered = builder_layers;
        ordered.sort_by_key(|g| g.1);
        for (line, r, name, att) in ordered {
            if !text::is_identifier(&name) {
                return Err(Error::parse(line, format!("`{name}` is not a valid name")));
            }
            let boundary = match att {
                None => None,
                Some((s, t)) => {
                    let parse = |x: &str| {
                        Term::parse(x, &signature).map_err(|e| Error::parse(line, e.to_string()))
                    };
                    Some((parse(&s)?, parse(&t)?))
                }
            };
            layers[r].push(GeneratorDecl {
                name: name.clone(),
                boundary,
            });
            if !signature.insert(name.clone(), r) {
                return Err(Error::parse(line, format!("duplicate generator `{name}`")));
            }
        }
        Computad::from_layers(dim, layers, bounds)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        if !self.layers[0].is_empty() {
            let names: Vec<&str> = self.layers[0].iter().map(|g| g.name.as_str()).collect();
            let _ = writeln!(out, "gen 0 {}", names.join(" "));
        }
        for (r, layer) in self.layers.iter().enumerate().skip(1) {
            for g in layer {
                let (s, t) = g.boundary.as_ref().unwrap();
                let _ = writeln!(out, "gen {r} {} : {s} -> {t}", g.name);
            }
        }
        out
    }

    /// Class of a generator's attachment pair.
    pub fn attachment_classes(&self, r: usize, name: &str) -> Option<(ClassId, ClassId)> {
        let g = self.find(r, name)?;
        let (s, t) = g.boundary.as_ref()?;
        Some((self.engine.eval(s).ok()??, self.engine.eval(t).ok()??))
    }
}

fn attachment_class(engine: &CongruenceEngine, name: &str, r: usize, t: &Term) -> Result<ClassId> {
    if t.dim() != r - 1 {
        return Err(Error::NonParallelAttachment {
            generator: name.to_string(),
            reason: format!("boundary `{t}` has dimension {}, expected {}", t.dim(), r - 1),
        });
    }
    match engine.eval(t) {
        Ok(Some(c)) => Ok(c),
        Ok(None) => Err(Error::NonParallelAttachment {
            generator: name.to_string(),
            reason: format!("boundary `{t}` lies outside the size bound"),
        }),
        Err(e) => Err(Error::NonParallelAttachment {
            generator: name.to_string(),
            reason: e.to_string(),
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionSummary {
    pub dim: usize,
    pub generators: usize,
    pub classes: usize,
    /// The bound cut off part of this dimension ("partial up to size N").
    pub partial: bool,
    pub size_bound: usize,
    pub report: SaturationReport,
}

/// One 0-generator and nothing above, up to dimension `k`.
pub fn theta_computad(k: usize, bounds: Bounds) -> Result<Computad> {
    ComputadBuilder::new(k, bounds).point("o").build()
}

/// Parallel pairs of top-dimensional classes of the free algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairSet {
    pub dim: usize,
    pub pairs: Vec<(ClassId, ClassId)>,
    pub partial: bool,
}

pub fn t_functor(c: &Computad) -> PairSet {
    let e = c.free_algebra();
    let n = c.dim();
    let count = e.class_count(n) as ClassId;
    let mut pairs = Vec::new();
    for x in 0..count {
        for y in 0..count {
            if n == 0 || (e.src(n, x) == e.src(n, y) && e.tgt(n, x) == e.tgt(n, y)) {
                pairs.push((x, y));
            }
        }
    }
    PairSet {
        dim: n,
        pairs,
        partial: e.truncated(n),
    }
}

/// A generator-wise map of computads commuting with attachments.
#[derive(Debug, Clone)]
pub struct ComputadMap {
    pub source: Computad,
    pub target: Computad,
    maps: Vec<BTreeMap<String, String>>,
}

impl ComputadMap {
    pub fn new(source: Computad, target: Computad, maps: Vec<BTreeMap<String, String>>) -> Result<ComputadMap> {
        if source.dim() != target.dim() {
            return Err(Error::DimensionMismatch {
                expected: target.dim(),
                found: source.dim(),
            });
        }
        let mut maps = maps;
        maps.resize(source.dim() + 1, BTreeMap::new());
        let m = ComputadMap { source, target, maps };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(c: &Computad) -> ComputadMap {
        let maps = c
            .layers()
            .iter()
            .map(|l| l.iter().map(|g| (g.name.clone(), g.name.clone())).collect())
            .collect();
        ComputadMap {
            source: c.clone(),
            target: c.clone(),
            maps,
        }
    }

    /// The unique map to θ_n, when the source has no generators above dimension 0.
    pub fn to_theta(c: &Computad) -> Result<ComputadMap> {
        let theta = theta_computad(c.dim(), c.bounds())?;
        let mut maps = vec![BTreeMap::new(); c.dim() + 1];
        for g in c.generators(0) {
            maps[0].insert(g.name.clone(), "o".to_string());
        }
        ComputadMap::new(c.clone(), theta, maps)
    }

    pub fn generator_image(&self, r: usize, name: &str) -> Option<&str> {
        self.maps.get(r)?.get(name).map(String::as_str)
    }

    pub fn map_term(&self, t: &Term) -> Result<Term> {
        Ok(match t {
            Term::Gen { name, dim } => {
                let image = self.generator_image(*dim, name).ok_or_else(|| {
                    Error::InvalidMap(format!("generator `{name}` of dimension {dim} is not mapped"))
                })?;
                Term::gen(image, *dim)
            }
            Term::Identity(b) => Term::identity(self.map_term(b)?),
            Term::Compose { k, left, right } => Term::compose(*k, self.map_term(left)?, self.map_term(right)?),
        })
    }

    /// Induced map on classes, by substituting into the representative.
    pub fn map_class(&self, dim: usize, c: ClassId) -> Result<Option<ClassId>> {
        let rep = self.source.free_algebra().representative(dim, c);
        self.target.free_algebra().eval(&self.map_term(rep)?)
    }

    pub fn validate(&self) -> Result<()> {
        for (r, layer) in self.source.layers().iter().enumerate() {
            for g in layer {
                let image = self.generator_image(r, &g.name).ok_or_else(|| {
                    Error::InvalidMap(format!("generator `{}` is not mapped", g.name))
                })?;
                let target = self.target.find(r, image).ok_or_else(|| {
                    Error::InvalidMap(format!("`{image}` is not a {r}-generator of the target"))
                })?;
                let (Some((s, t)), Some((ts, tt))) = (&g.boundary, &target.boundary) else {
                    continue;
                };
                let e = self.target.free_algebra();
                for (mine, theirs) in [(s, ts), (t, tt)] {
                    let a = e.eval(&self.map_term(mine)?)?;
                    let b = e.eval(theirs)?;
                    if a.is_none() || a != b {
                        return Err(Error::InvalidMap(format!(
                            "attachment of `{}` is not carried to that of `{image}`",
                            g.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Pullback of two computad maps, with the projections.
#[derive(Debug, Clone)]
pub struct ComputadPullback {
    pub apex: Computad,
    pub left: ComputadMap,
    pub right: ComputadMap,
    /// Generator pairs whose attachment could not be lifted uniquely.
    pub failures: Vec<PullbackFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackFailure {
    pub dim: usize,
    pub left: String,
    pub right: String,
    pub candidates: usize,
}

/// Generators of the pullback in dimension r are triples (x, y, t): x and
/// y agree in the codomain and t is an attachment in the free algebra of
/// the lower pullback projecting onto both attachments. A pair with other
/// than exactly one candidate is recorded in `failures`.
pub fn pullback_computads(f: &ComputadMap, g: &ComputadMap) -> Result<ComputadPullback> {
    if f.target.to_text() != g.target.to_text() {
        return Err(Error::CodomainMismatch("maps into different computads".into()));
    }
    let n = f.source.dim();
    let bounds = f.source.bounds();
    let mut layers: Vec<Vec<GeneratorDecl>> = Vec::new();
    let mut left_maps: Vec<BTreeMap<String, String>> = Vec::new();
    let mut right_maps: Vec<BTreeMap<String, String>> = Vec::new();
    let mut failures = Vec::new();

    let mut point_layer = Vec::new();
    let (mut lm, mut rm) = (BTreeMap::new(), BTreeMap::new());
    for x in f.source.generators(0) {
        for y in g.source.generators(0) {
            if f.generator_image(0, &x.name) == g.generator_image(0, &y.name) {
                let name = format!("{}.{}", x.name, y.name);
                lm.insert(name.clone(), x.name.clone());
                rm.insert(name.clone(), y.name.clone());
                point_layer.push(GeneratorDecl { name, boundary: None });
            }
        }
    }
    layers.push(point_layer);
    left_maps.push(lm);
    right_maps.push(rm);

    for r in 1..=n {
        let lower = Computad::from_layers(r - 1, layers.clone(), bounds)?;
        let lower_left = ComputadMap {
            source: lower.clone(),
            target: f.source.truncate(r - 1)?,
            maps: left_maps.clone(),
        };
        let lower_right = ComputadMap {
            source: lower.clone(),
            target: g.source.truncate(r - 1)?,
            maps: right_maps.clone(),
        };
        let e = lower.free_algebra();
        let images: Vec<(Option<ClassId>, Option<ClassId>)> = (0..e.class_count(r - 1) as ClassId)
            .map(|c| Ok((lower_left.map_class(r - 1, c)?, lower_right.map_class(r - 1, c)?)))
            .collect::<Result<_>>()?;
        let pairs = t_functor(&lower).pairs;
        let (mut layer, mut lm, mut rm) = (Vec::new(), BTreeMap::new(), BTreeMap::new());
        for x in f.source.generators(r) {
            let (xs, xt) = f.source.attachment_classes(r, &x.name).unwrap();
            for y in g.source.generators(r) {
                if f.generator_image(r, &x.name) != g.generator_image(r, &y.name) {
                    continue;
                }
                let (ys, yt) = g.source.attachment_classes(r, &y.name).unwrap();
                let candidates: Vec<(ClassId, ClassId)> = pairs
                    .iter()
                    .copied()
                    .filter(|&(s, t)| {
                        images[s as usize] == (Some(xs), Some(ys)) && images[t as usize] == (Some(xt), Some(yt))
                    })
                    .collect();
                if candidates.len() != 1 {
                    failures.push(PullbackFailure {
                        dim: r,
                        left: x.name.clone(),
                        right: y.name.clone(),
                        candidates: candidates.len(),
                    });
                }
                for (i, (s, t)) in candidates.iter().enumerate() {
                    let name = if candidates.len() == 1 {
                        format!("{}.{}", x.name, y.name)
                    } else {
                        format!("{}.{}.{i}", x.name, y.name)
                    };
                    lm.insert(name.clone(), x.name.clone());
                    rm.insert(name.clone(), y.name.clone());
                    layer.push(GeneratorDecl {
                        name,
                        boundary: Some((e.representative(r - 1, *s).clone(), e.representative(r - 1, *t).clone())),
                    });
                }
            }
        }
        layers.push(layer);
        left_maps.push(lm);
        right_maps.push(rm);
    }
    let apex = Computad::from_layers(n, layers, bounds)?;
    let left = ComputadMap::new(apex.clone(), f.source.clone(), left_maps)?;
    let right = ComputadMap::new(apex.clone(), g.source.clone(), right_maps)?;
    Ok(ComputadPullback {
        apex,
        left,
        right,
        failures,
    })
}

/// A finite strict n-category given by explicit tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    names: Vec<Vec<String>>,
    src: Vec<Vec<u32>>,
    tgt: Vec<Vec<u32>>,
    /// `ident[r][c]`: the identity (r+1)-cell on r-cell c.
    ident: Vec<Vec<u32>>,
    /// `comp[r]`: composites of r-cells, keyed by (k, a, b).
    comp: Vec<HashMap<(usize, u32, u32), u32>>,
}

impl Algebra {
    /// Builds and validates. Identities must be listed for every cell
    /// below the top dimension; composites for every composable pair.
    pub fn new(
        names: Vec<Vec<String>>,
        src: Vec<Vec<u32>>,
        tgt: Vec<Vec<u32>>,
        ident: Vec<Vec<u32>>,
        comp: Vec<HashMap<(usize, u32, u32), u32>>,
    ) -> Result<Algebra> {
        let a = Algebra {
            names,
            src,
            tgt,
            ident,
            comp,
        };
        a.validate()?;
        Ok(a)
    }

    /// The terminal n-category: one cell in each dimension.
    pub fn terminal(n: usize) -> Algebra {
        let names = (0..=n).map(|r| vec![format!("t{r}")]).collect();
        let zeros = |r: usize| if r == 0 { vec![] } else { vec![0] };
        let comp = (0..=n)
            .map(|r| (0..r).map(|k| ((k, 0, 0), 0)).collect())
            .collect();
        Algebra {
            names,
            src: (0..=n).map(zeros).collect(),
            tgt: (0..=n).map(zeros).collect(),
            ident: (0..n).map(|_| vec![0]).collect(),
            comp,
        }
    }

    /// A set as a 0-category.
    pub fn discrete<S: AsRef<str>>(points: &[S]) -> Algebra {
        Algebra {
            names: vec![points.iter().map(|p| p.as_ref().to_string()).collect()],
            src: vec![vec![]],
            tgt: vec![vec![]],
            ident: vec![],
            comp: vec![HashMap::new()],
        }
    }

    /// A finite monoid as a one-object category. `mul[a][b]` is `a·b`,
    /// with composite `comp0(a, b)` read as `a` then `b`.
    pub fn monoid<S: AsRef<str>>(elements: &[S], mul: &[Vec<u32>], unit: u32) -> Result<Algebra> {
        let m = elements.len();
        let mut table = HashMap::new();
        for a in 0..m {
            for b in 0..m {
                let v = *mul
                    .get(a)
                    .and_then(|row| row.get(b))
                    .ok_or_else(|| Error::InvalidAlgebra("multiplication table is not square".into()))?;
                table.insert((0, a as u32, b as u32), v);
            }
        }
        Algebra::new(
            vec![vec!["*".to_string()], elements.iter().map(|e| e.as_ref().to_string()).collect()],
            vec![vec![], vec![0; m]],
            vec![vec![], vec![0; m]],
            vec![vec![unit]],
            vec![HashMap::new(), table],
        )
    }

    pub fn dim(&self) -> usize {
        self.names.len() - 1
    }

    pub fn cell_count(&self, r: usize) -> usize {
        self.names.get(r).map_or(0, Vec::len)
    }

    pub fn name(&self, r: usize, c: u32) -> &str {
        &self.names[r][c as usize]
    }

    pub fn src(&self, r: usize, c: u32) -> u32 {
        self.src[r][c as usize]
    }

    pub fn tgt(&self, r: usize, c: u32) -> u32 {
        self.tgt[r][c as usize]
    }

    pub fn identity(&self, r: usize, c: u32) -> Option<u32> {
        self.ident.get(r)?.get(c as usize).copied()
    }

    pub fn compose(&self, r: usize, k: usize, a: u32, b: u32) -> Option<u32> {
        self.comp.get(r)?.get(&(k, a, b)).copied()
    }

    fn bnd(&self, mut r: usize, mut c: u32, k: usize, target: bool) -> u32 {
        while r > k {
            c = if target { self.tgt(r, c) } else { self.src(r, c) };
            r -= 1;
        }
        c
    }

    fn composable(&self, r: usize, k: usize, a: u32, b: u32) -> bool {
        self.bnd(r, a, k, true) == self.bnd(r, b, k, false)
    }

    /// Identity on r-cell c lifted to dimension `top`.
    fn iter_ident(&self, mut r: usize, mut c: u32, top: usize) -> u32 {
        while r < top {
            c = self.ident[r][c as usize];
            r += 1;
        }
        c
    }

    /// Checks every strict n-category law over all cells.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidAlgebra(m));
        let n = self.dim();
        if self.src.len() != n + 1 || self.tgt.len() != n + 1 || self.comp.len() != n + 1 || self.ident.len() != n {
            return bad("tables do not cover every dimension".into());
        }
        for r in 1..=n {
            let below = self.cell_count(r - 1) as u32;
            if self.src[r].len() != self.cell_count(r) || self.tgt[r].len() != self.cell_count(r) {
                return bad(format!("boundary table size in dimension {r}"));
            }
            for c in 0..self.cell_count(r) as u32 {
                let (s, t) = (self.src(r, c), self.tgt(r, c));
                if s >= below || t >= below {
                    return bad(format!("boundary of {} out of range", self.name(r, c)));
                }
                if r >= 2 && (self.src(r - 1, s) != self.src(r - 1, t) || self.tgt(r - 1, s) != self.tgt(r - 1, t)) {
                    return bad(format!("{} violates globularity", self.name(r, c)));
                }
            }
        }
        for r in 0..n {
            if self.ident[r].len() != self.cell_count(r) {
                return bad(format!("identities missing in dimension {r}"));
            }
            for c in 0..self.cell_count(r) as u32 {
                let i = self.ident[r][c as usize];
                if i as usize >= self.cell_count(r + 1) || self.src(r + 1, i) != c || self.tgt(r + 1, i) != c {
                    return bad(format!("identity on {} has the wrong boundary", self.name(r, c)));
                }
            }
        }
        for r in 1..=n {
            let cells = self.cell_count(r) as u32;
            for k in 0..r {
                for a in 0..cells {
                    for b in 0..cells {
                        let defined = self.compose(r, k, a, b);
                        match (self.composable(r, k, a, b), defined) {
                            (true, None) => return bad(format!("comp{k} of {} and {} missing", self.name(r, a), self.name(r, b))),
                            (false, Some(_)) => return bad(format!("comp{k} defined on non-composable pair")),
                            (false, None) => continue,
                            (true, Some(c)) => {
                                let (s, t) = if k + 1 == r {
                                    (self.src(r, a), self.tgt(r, b))
                                } else {
                                    let s = self.compose(r - 1, k, self.src(r, a), self.src(r, b));
                                    let t = self.compose(r - 1, k, self.tgt(r, a), self.tgt(r, b));
                                    match (s, t) {
                                        (Some(s), Some(t)) => (s, t),
                                        _ => return bad("lower composite missing".into()),
                                    }
                                };
                                if self.src(r, c) != s || self.tgt(r, c) != t {
                                    return bad(format!("comp{k} has the wrong boundary"));
                                }
                            }
                        }
                    }
                }
                // units
                for a in 0..cells {
                    let s = self.iter_ident(k, self.bnd(r, a, k, false), r);
                    let t = self.iter_ident(k, self.bnd(r, a, k, true), r);
                    if self.compose(r, k, s, a) != Some(a) || self.compose(r, k, a, t) != Some(a) {
                        return bad(format!("unit law fails for {} along {k}", self.name(r, a)));
                    }
                }
                // associativity
                for a in 0..cells {
                    for b in 0..cells {
                        let Some(ab) = self.compose(r, k, a, b) else { continue };
                        for c in 0..cells {
                            let Some(bc) = self.compose(r, k, b, c) else { continue };
                            if self.compose(r, k, ab, c) != self.compose(r, k, a, bc) {
                                return bad(format!("comp{k} is not associative"));
                            }
                        }
                    }
                }
            }
            // interchange
            for j in 0..r {
                for k in j + 1..r {
                    for a in 0..cells {
                        for b in 0..cells {
                            let Some(ab) = self.compose(r, k, a, b) else { continue };
                            for c in 0..cells {
                                for d in 0..cells {
                                    let Some(cd) = self.compose(r, k, c, d) else { continue };
                                    let Some(lhs) = self.compose(r, j, ab, cd) else { continue };
                                    let ac = self.compose(r, j, a, c);
                                    let bd = self.compose(r, j, b, d);
                                    let rhs = ac.zip(bd).and_then(|(x, y)| self.compose(r, k, x, y));
                                    if rhs != Some(lhs) {
                                        return bad("interchange fails".into());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        // identities preserve lower composition
        for r in 1..n {
            for k in 0..r {
                for a in 0..self.cell_count(r) as u32 {
                    for b in 0..self.cell_count(r) as u32 {
                        if let Some(ab) = self.compose(r, k, a, b) {
                            let lhs = self.compose(r + 1, k, self.ident[r][a as usize], self.ident[r][b as usize]);
                            if lhs != Some(self.ident[r][ab as usize]) {
                                return bad("identities do not preserve composition".into());
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Value of a term under an assignment of generators to cells.
    pub fn evaluate(&self, t: &Term, gen: &impl Fn(usize, &str) -> Option<u32>) -> Option<u32> {
        match t {
            Term::Gen { name, dim } => gen(*dim, name),
            Term::Identity(b) => self.identity(b.dim(), self.evaluate(b, gen)?),
            Term::Compose { k, left, right } => {
                let (a, b) = (self.evaluate(left, gen)?, self.evaluate(right, gen)?);
                self.compose(t.dim(), *k, a, b)
            }
        }
    }
}

/// The computad of an algebra with its counit.
#[derive(Debug, Clone)]
pub struct AlgebraComputad {
    pub computad: Computad,
    /// For each generator of dimension r ≥ 1: (source class, cell, target class).
    pub triples: Vec<Vec<(ClassId, u32, ClassId)>>,
    /// Evaluation of each class of the free algebra into the algebra.
    pub evaluation: Vec<Vec<u32>>,
}

impl AlgebraComputad {
    /// The counit on generators: (ξ, a, η) ↦ a.
    pub fn counit(&self, r: usize, index: usize) -> u32 {
        if r == 0 {
            index as u32
        } else {
            self.triples[r][index].1
        }
    }
}

/// Builds the computad whose r-generators are triples (ξ, a, η) with ξ, η
/// parallel (r−1)-cells of the free algebra on the lower part and a an
/// r-cell of the algebra from the value of ξ to the value of η.
pub fn computad_of_algebra(g: &Algebra, bounds: Bounds) -> Result<AlgebraComputad> {
    g.validate()?;
    let n = g.dim();
    let mut layers = vec![(0..g.cell_count(0) as u32)
        .map(|c| GeneratorDecl {
            name: format!("w0_{c}"),
            boundary: None,
        })
        .collect::<Vec<_>>()];
    let mut triples: Vec<Vec<(ClassId, u32, ClassId)>> = vec![Vec::new()];
    let mut current = Computad::from_layers(0, layers.clone(), bounds)?;
    let mut evaluation = vec![evaluate_classes(&current, g, &triples, 0)?];
    for r in 1..=n {
        let e = current.free_algebra();
        let mut layer = Vec::new();
        let mut row = Vec::new();
        for (xi, eta) in t_functor(&current).pairs {
            let (vx, vy) = (evaluation[r - 1][xi as usize], evaluation[r - 1][eta as usize]);
            for a in 0..g.cell_count(r) as u32 {
                if g.src(r, a) == vx && g.tgt(r, a) == vy {
                    layer.push(GeneratorDecl {
                        name: format!("w{r}_{}", row.len()),
                        boundary: Some((e.representative(r - 1, xi).clone(), e.representative(r - 1, eta).clone())),
                    });
                    row.push((xi, a, eta));
                }
            }
        }
        layers.push(layer);
        triples.push(row);
        current = Computad::from_layers(r, layers.clone(), bounds)?;
        evaluation.push(evaluate_classes(&current, g, &triples, r)?);
    }
    Ok(AlgebraComputad {
        computad: current,
        triples,
        evaluation,
    })
}

/// Evaluates every class of dimension r, checking all members agree.
fn evaluate_classes(c: &Computad, g: &Algebra, triples: &[Vec<(ClassId, u32, ClassId)>], r: usize) -> Result<Vec<u32>> {
    let lookup = |dim: usize, name: &str| -> Option<u32> {
        let idx: usize = name.split('_').nth(1)?.parse().ok()?;
        if dim == 0 {
            Some(idx as u32)
        } else {
            triples.get(dim)?.get(idx).map(|t| t.1)
        }
    };
    let e = c.free_algebra();
    (0..e.class_count(r) as ClassId)
        .map(|cls| {
            let mut value = None;
            for t in e.class_member_terms(r, cls, 64) {
                let v = g.evaluate(&t, &lookup).ok_or_else(|| {
                    Error::Soundness(format!("`{t}` does not evaluate in the algebra"))
                })?;
                if value.is_some_and(|w| w != v) {
                    return Err(Error::Soundness(format!("class of `{t}` evaluates inconsistently")));
                }
                value = Some(v);
            }
            value.ok_or_else(|| Error::Soundness("empty class".into()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(size: usize) -> Bounds {
        Bounds::with_size(size)
    }

    #[test]
    fn point_computad() {
        let c = ComputadBuilder::new(0, b(2)).point("a").build().unwrap();
        assert_eq!(c.generator_counts(), vec![1]);
        assert_eq!(c.free_algebra().class_count(0), 1);
    }

    #[test]
    fn scalar_attachment_is_valid() {
        let c = ComputadBuilder::new(2, b(2))
            .point("a")
            .generator(2, "α", "id1(a)", "id1(a)")
            .build()
            .unwrap();
        assert_eq!(c.generator_counts(), vec![1, 0, 1]);
    }

    #[test]
    fn non_parallel_attachment_is_rejected() {
        let err = ComputadBuilder::new(2, b(2))
            .points(&["a", "b", "c"])
            .generator(1, "f", "a", "b")
            .generator(1, "h", "b", "c")
            .generator(2, "α", "f", "h")
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::NonParallelAttachment { .. }), "{err}");
    }

    #[test]
    fn theta_generator_counts() {
        let t = theta_computad(2, b(3)).unwrap();
        assert_eq!(t.generator_counts(), vec![1, 0, 0]);
        for r in 0..=2 {
            assert_eq!(t.free_algebra().class_count(r), 1);
        }
        assert_eq!(t_functor(&t).pairs, vec![(0, 0)]);
    }

    #[test]
    fn parse_round_trip() {
        let src = "dim 2\ngen 0 x y\ngen 1 f : x -> y\ngen 1 g : x -> y\ngen 2 α : f -> g\n";
        let c = Computad::parse(src, b(2)).unwrap();
        let again = Computad::parse(&c.to_text(), b(2)).unwrap();
        assert_eq!(again.to_text(), c.to_text());
        assert!(matches!(Computad::parse("gen 1 f : x -> y", b(2)), Err(Error::Parse { .. })));
    }

    #[test]
    fn parallel_edges_pairs() {
        let c = Computad::parse("gen 0 a b\ngen 1 f : a -> b\ngen 1 g : a -> b", b(2)).unwrap();
        // {f,g}² plus the diagonal on each identity
        assert_eq!(t_functor(&c).pairs.len(), 6);
        let d = Computad::parse("dim 0\ngen 0 a b c", b(2)).unwrap();
        assert_eq!(t_functor(&d).pairs.len(), 9);
    }

    #[test]
    fn truncation_rebuilds() {
        let c = Computad::parse("gen 0 a\ngen 1 f : a -> a\ngen 2 α : f -> comp0(f,f)", b(2)).unwrap();
        let t = c.truncate(1).unwrap();
        assert_eq!(t.generator_counts(), vec![1, 1]);
        assert_eq!(t.free_algebra().class_count(1), c.free_algebra().class_count(1));
    }

    #[test]
    fn terminal_algebra_validates() {
        for n in 0..=3 {
            Algebra::terminal(n).validate().unwrap();
        }
    }

    #[test]
    fn broken_monoid_is_rejected() {
        // non-associative table on {e, a}
        let bad = Algebra::monoid(&["e", "a"], &[vec![0, 1], vec![1, 1]], 1);
        assert!(bad.is_err());
        Algebra::monoid(&["e", "a"], &[vec![0, 1], vec![1, 0]], 0).unwrap();
    }

    #[test]
    fn discrete_algebra_computad_is_the_set() {
        let w = computad_of_algebra(&Algebra::discrete(&["p", "q", "r"]), b(2)).unwrap();
        assert_eq!(w.computad.generator_counts(), vec![3]);
    }

    #[test]
    fn monoid_computad_has_one_generator_per_element() {
        let z3: Vec<Vec<u32>> = (0..3).map(|a| (0..3).map(|b| (a + b) % 3).collect()).collect();
        let m = Algebra::monoid(&["0", "1", "2"], &z3, 0).unwrap();
        let w = computad_of_algebra(&m, b(3)).unwrap();
        assert_eq!(w.computad.generator_counts(), vec![1, 3]);
        // the counit evaluates composites by multiplication
        let e = w.computad.free_algebra();
        for c in 0..e.class_count(1) as u32 {
            let word = e.representative(1, c).generator_word(1);
            let expected = word
                .iter()
                .map(|n| w.counit(1, n[3..].parse().unwrap()))
                .sum::<u32>()
                % 3;
            assert_eq!(w.evaluation[1][c as usize], expected);
        }
    }

    #[test]
    fn terminal_two_category_triples() {
        let bounds = b(1);
        let w = computad_of_algebra(&Algebra::terminal(2), bounds).unwrap();
        // one loop; its free monoid has words of length 0 and 1 within the bound
        assert_eq!(w.computad.generator_counts(), vec![1, 1, 4]);
        for (r, row) in w.triples.iter().enumerate().skip(1) {
            for &(xi, a, eta) in row {
                assert_eq!(w.evaluation[r - 1][xi as usize], 0);
                assert_eq!(w.evaluation[r - 1][eta as usize], 0);
                assert_eq!(a, 0);
            }
        }
    }

    #[test]
    fn pullback_of_identities_is_the_domain() {
        let c = Computad::parse("gen 0 a b\ngen 1 f : a -> b\ngen 2 α : f -> f", b(2)).unwrap();
        let id = ComputadMap::identity(&c);
        let p = pullback_computads(&id, &id).unwrap();
        assert_eq!(p.apex.generator_counts(), c.generator_counts());
        assert!(p.failures.is_empty());
    }

    #[test]
    fn scalar_pullback_over_theta_is_a_product() {
        let x = Computad::parse("dim 2\ngen 0 a\ngen 2 α : id1(a) -> id1(a)\ngen 2 β : id1(a) -> id1(a)", b(2)).unwrap();
        let y = Computad::parse("dim 2\ngen 0 c\ngen 2 γ : id1(c) -> id1(c)", b(2)).unwrap();
        let theta = Computad::parse("dim 2\ngen 0 o\ngen 2 ω : id1(o) -> id1(o)", b(2)).unwrap();
        let to = |c: &Computad, two: &[&str]| {
            let mut maps = vec![BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
            maps[0].insert(c.generators(0)[0].name.clone(), "o".to_string());
            for g in two {
                maps[2].insert(g.to_string(), "ω".to_string());
            }
            ComputadMap::new(c.clone(), theta.clone(), maps).unwrap()
        };
        let p = pullback_computads(&to(&x, &["α", "β"]), &to(&y, &["γ"])).unwrap();
        assert_eq!(p.apex.generator_counts(), vec![1, 0, 2]);
        assert!(p.failures.is_empty());
    }

    #[test]
    fn empty_fiber_pullback() {
        let x = Computad::parse("gen 0 a b\ngen 1 f : a -> b", b(2)).unwrap();
        let y = Computad::parse("gen 0 c\ngen 1 h : c -> c", b(2)).unwrap();
        let base = Computad::parse("gen 0 p q\ngen 1 u : p -> q\ngen 1 v : q -> q", b(2)).unwrap();
        let mut fx = vec![BTreeMap::new(), BTreeMap::new()];
        fx[0].insert("a".into(), "p".into());
        fx[0].insert("b".into(), "q".into());
        fx[1].insert("f".into(), "u".into());
        let mut fy = vec![BTreeMap::new(), BTreeMap::new()];
        fy[0].insert("c".into(), "q".into());
        fy[1].insert("h".into(), "v".into());
        let f = ComputadMap::new(x, base.clone(), fx).unwrap();
        let g = ComputadMap::new(y, base, fy).unwrap();
        let p = pullback_computads(&f, &g).unwrap();
        assert_eq!(p.apex.generator_counts(), vec![1, 0]);
    }
}
