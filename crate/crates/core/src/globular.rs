//! Finite globular sets, their maps, truncation and parallel pairs.
//!
//! Cells are addressed by `(dimension, index)`; names are kept only for
//! input/output. A globular set of dimension `n` stores, for every
//! `1 <= r <= n`, total source and target tables `cells[r] -> cells[r-1]`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::text;

/// The first offending cell found by [`GlobularSet::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cell `{cell}` of dimension {dim}: {reason}")]
pub struct GlobularViolation {
    pub dim: usize,
    pub cell: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlobularSet {
    names: Vec<Vec<String>>,
    // src[r] / tgt[r] map cells[r] -> cells[r-1]; index 0 is always empty.
    src: Vec<Vec<usize>>,
    tgt: Vec<Vec<usize>>,
}

/// Incremental construction; `build` validates, `build_unchecked` does not.
#[derive(Debug, Clone)]
pub struct GlobularSetBuilder {
    inner: GlobularSet,
    index: HashMap<(usize, String), usize>,
}

impl GlobularSetBuilder {
    pub fn new(dim: usize) -> Self {
        GlobularSetBuilder {
            inner: GlobularSet::empty(dim),
            index: HashMap::new(),
        }
    }

    /// Adds a 0-cell. Returns its index.
    pub fn point(&mut self, name: &str) -> usize {
        self.push(0, name, usize::MAX, usize::MAX)
    }

    /// Adds an `r`-cell with source and target given by name.
    pub fn cell(&mut self, r: usize, name: &str, src: &str, tgt: &str) -> Result<usize> {
        assert!(r >= 1 && r <= self.inner.dim(), "cell dimension out of range");
        let s = self.lookup(r - 1, src)?;
        let t = self.lookup(r - 1, tgt)?;
        Ok(self.push(r, name, s, t))
    }

    /// Adds an `r`-cell with source and target given by index.
    pub fn cell_at(&mut self, r: usize, name: &str, src: usize, tgt: usize) -> usize {
        assert!(r >= 1 && r <= self.inner.dim(), "cell dimension out of range");
        self.push(r, name, src, tgt)
    }

    fn lookup(&self, r: usize, name: &str) -> Result<usize> {
        self.index
            .get(&(r, name.to_string()))
            .copied()
            .ok_or_else(|| Error::Usage(format!("no {r}-cell named `{name}`")))
    }

    fn push(&mut self, r: usize, name: &str, s: usize, t: usize) -> usize {
        let idx = self.inner.names[r].len();
        self.inner.names[r].push(name.to_string());
        if r > 0 {
            self.inner.src[r].push(s);
            self.inner.tgt[r].push(t);
        }
        self.index.insert((r, name.to_string()), idx);
        idx
    }

    pub fn build(self) -> Result<GlobularSet> {
        self.inner.validate()?;
        Ok(self.inner)
    }

    pub fn build_unchecked(self) -> GlobularSet {
        self.inner
    }
}

impl GlobularSet {
    /// The globular set of dimension `dim` with no cells.
    pub fn empty(dim: usize) -> Self {
        GlobularSet {
            names: vec![Vec::new(); dim + 1],
            src: vec![Vec::new(); dim + 1],
            tgt: vec![Vec::new(); dim + 1],
        }
    }

    /// One cell in every dimension up to `dim`.
    pub fn terminal(dim: usize) -> Self {
        let mut b = GlobularSetBuilder::new(dim);
        b.point("*");
        for r in 1..=dim {
            b.cell_at(r, "*", 0, 0);
        }
        b.build_unchecked()
    }

    /// A dimension-0 globular set with the given points.
    pub fn discrete<S: AsRef<str>>(points: &[S]) -> Self {
        let mut b = GlobularSetBuilder::new(0);
        for p in points {
            b.point(p.as_ref());
        }
        b.build_unchecked()
    }

    pub fn dim(&self) -> usize {
        self.names.len() - 1
    }

    pub fn cell_count(&self, r: usize) -> usize {
        self.names.get(r).map_or(0, Vec::len)
    }

    /// Cell counts per dimension, `0..=dim`.
    pub fn counts(&self) -> Vec<usize> {
        self.names.iter().map(Vec::len).collect()
    }

    pub fn name(&self, r: usize, x: usize) -> &str {
        &self.names[r][x]
    }

    pub fn names(&self, r: usize) -> &[String] {
        &self.names[r]
    }

    pub fn find(&self, r: usize, name: &str) -> Option<usize> {
        self.names.get(r)?.iter().position(|n| n == name)
    }

    /// Source of an `r`-cell, `r >= 1`.
    pub fn src(&self, r: usize, x: usize) -> usize {
        self.src[r][x]
    }

    pub fn tgt(&self, r: usize, x: usize) -> usize {
        self.tgt[r][x]
    }

    /// Checks totality of the boundary tables and both globularity identities.
    pub fn validate(&self) -> std::result::Result<(), GlobularViolation> {
        for r in 1..=self.dim() {
            let below = self.cell_count(r - 1);
            if self.src[r].len() != self.names[r].len() || self.tgt[r].len() != self.names[r].len()
            {
                return Err(GlobularViolation {
                    dim: r,
                    cell: "<table>".into(),
                    reason: "boundary tables are not total".into(),
                });
            }
            for x in 0..self.cell_count(r) {
                let (s, t) = (self.src[r][x], self.tgt[r][x]);
                if s >= below || t >= below {
                    return Err(self.violation(r, x, "boundary refers to a missing cell"));
                }
                if r >= 2 {
                    if self.src[r - 1][s] != self.src[r - 1][t] {
                        return Err(self.violation(r, x, "s(s(x)) != s(t(x))"));
                    }
                    if self.tgt[r - 1][s] != self.tgt[r - 1][t] {
                        return Err(self.violation(r, x, "t(s(x)) != t(t(x))"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    fn violation(&self, r: usize, x: usize, reason: &str) -> GlobularViolation {
        GlobularViolation {
            dim: r,
            cell: self.names[r][x].clone(),
            reason: reason.into(),
        }
    }

    /// The right adjoint `tr_k`: forget every cell above dimension `k`.
    pub fn truncate(&self, k: usize) -> Result<GlobularSet> {
        if k > self.dim() {
            return Err(Error::Usage(format!(
                "cannot truncate a {}-globular set to dimension {k}",
                self.dim()
            )));
        }
        Ok(GlobularSet {
            names: self.names[..=k].to_vec(),
            src: self.src[..=k].to_vec(),
            tgt: self.tgt[..=k].to_vec(),
        })
    }

    /// The inclusion `L`: regard `self` as an `n`-globular set with empty top cells.
    pub fn include_skeleton(&self, n: usize) -> Result<GlobularSet> {
        if n < self.dim() {
            return Err(Error::Usage(format!(
                "cannot include a {}-globular set into dimension {n}",
                self.dim()
            )));
        }
        let mut out = self.clone();
        out.names.resize(n + 1, Vec::new());
        out.src.resize(n + 1, Vec::new());
        out.tgt.resize(n + 1, Vec::new());
        Ok(out)
    }

    /// All pairs of `r`-cells with equal source and equal target; every pair when `r = 0`.
    pub fn parallel_pairs(&self, r: usize) -> Vec<ParallelPair> {
        let n = self.cell_count(r);
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if r == 0 || (self.src[r][x] == self.src[r][y] && self.tgt[r][x] == self.tgt[r][y])
                {
                    out.push(ParallelPair {
                        dim: r,
                        left: x,
                        right: y,
                    });
                }
            }
        }
        out
    }

    /// Parses the declarative text format:
    ///
    /// ```text
    /// dim 1
    /// cells 0 a b
    /// cell 1 f : a -> b
    /// ```
    pub fn parse(input: &str) -> Result<GlobularSet> {
        let mut builder: Option<GlobularSetBuilder> = None;
        for (line, text) in text::lines(input) {
            let mut words = text.split_whitespace();
            match words.next() {
                Some("dim") => {
                    if builder.is_some() {
                        return Err(Error::parse(line, "duplicate `dim` declaration"));
                    }
                    let d = words
                        .next()
                        .ok_or_else(|| Error::parse(line, "missing dimension"))?;
                    builder = Some(GlobularSetBuilder::new(text::parse_usize(line, d)?));
                }
                Some(kw @ ("cell" | "cells")) => {
                    let b = builder
                        .as_mut()
                        .ok_or_else(|| Error::parse(line, "`dim` must come first"))?;
                    let r = text::parse_usize(
                        line,
                        words.next().ok_or_else(|| Error::parse(line, "missing dimension"))?,
                    )?;
                    if r > b.inner.dim() {
                        return Err(Error::parse(line, format!("dimension {r} exceeds declared dim")));
                    }
                    if kw == "cells" || r == 0 {
                        if kw == "cell" && r == 0 && text.contains(':') {
                            return Err(Error::parse(line, "0-cells have no boundary"));
                        }
                        if r > 0 {
                            return Err(Error::parse(line, "`cells` lists only 0-cells"));
                        }
                        for name in words {
                            declare_name(b, line, 0, name)?;
                            b.point(name);
                        }
                        continue;
                    }
                    let rest = text.splitn(3, char::is_whitespace).nth(2).unwrap_or("");
                    let (name, boundary) = text::split_once(line, rest, ":")?;
                    let (s, t) = text::split_once(line, boundary, "->")?;
                    declare_name(b, line, r, name)?;
                    b.cell(r, name, s, t)
                        .map_err(|e| Error::parse(line, e.to_string()))?;
                }
                Some(other) => {
                    return Err(Error::parse(line, format!("unknown keyword `{other}`")));
                }
                None => {}
            }
        }
        let b = builder.ok_or_else(|| Error::parse(0, "missing `dim` declaration"))?;
        b.build()
    }

    /// Serializes into the format read by [`GlobularSet::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim());
        if !self.names[0].is_empty() {
            out.push_str(&format!("cells 0 {}\n", self.names[0].join(" ")));
        }
        for r in 1..=self.dim() {
            for x in 0..self.cell_count(r) {
                out.push_str(&format!(
                    "cell {r} {} : {} -> {}\n",
                    self.names[r][x],
                    self.names[r - 1][self.src[r][x]],
                    self.names[r - 1][self.tgt[r][x]]
                ));
            }
        }
        out
    }
}

fn declare_name(b: &GlobularSetBuilder, line: usize, r: usize, name: &str) -> Result<()> {
    if !text::is_identifier(name) {
        return Err(Error::parse(line, format!("invalid cell name `{name}`")));
    }
    if b.index.contains_key(&(r, name.to_string())) {
        return Err(Error::parse(line, format!("duplicate {r}-cell `{name}`")));
    }
    Ok(())
}

impl fmt::Display for GlobularSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A pair of `dim`-cells with equal boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParallelPair {
    pub dim: usize,
    pub left: usize,
    pub right: usize,
}

/// A morphism of globular sets, given dimensionwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobMap {
    pub source: GlobularSet,
    pub target: GlobularSet,
    pub components: Vec<Vec<usize>>,
}

impl GlobMap {
    pub fn new(
        source: GlobularSet,
        target: GlobularSet,
        components: Vec<Vec<usize>>,
    ) -> Result<GlobMap> {
        let map = GlobMap {
            source,
            target,
            components,
        };
        map.validate()?;
        Ok(map)
    }

    pub fn identity(g: &GlobularSet) -> GlobMap {
        GlobMap {
            source: g.clone(),
            target: g.clone(),
            components: g.counts().into_iter().map(|n| (0..n).collect()).collect(),
        }
    }

    /// The unique map into the terminal globular set of the same dimension.
    pub fn to_terminal(g: &GlobularSet) -> GlobMap {
        GlobMap {
            source: g.clone(),
            target: GlobularSet::terminal(g.dim()),
            components: g.counts().into_iter().map(|n| vec![0; n]).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        if s.dim() != t.dim() || self.components.len() != s.dim() + 1 {
            return Err(Error::InvalidMap("dimension mismatch".into()));
        }
        for r in 0..=s.dim() {
            if self.components[r].len() != s.cell_count(r) {
                return Err(Error::InvalidMap(format!("component {r} is not total")));
            }
            for (x, &y) in self.components[r].iter().enumerate() {
                if y >= t.cell_count(r) {
                    return Err(Error::InvalidMap(format!("component {r} leaves the target")));
                }
                if r >= 1 {
                    let below = &self.components[r - 1];
                    if below[s.src(r, x)] != t.src(r, y) || below[s.tgt(r, x)] != t.tgt(r, y) {
                        return Err(Error::InvalidMap(format!(
                            "cell `{}` of dimension {r}: map does not commute with boundaries",
                            s.name(r, x)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, r: usize, x: usize) -> usize {
        self.components[r][x]
    }
}

/// The apex of a pullback together with both projections.
#[derive(Debug, Clone)]
pub struct GlobPullback {
    pub apex: GlobularSet,
    pub left: GlobMap,
    pub right: GlobMap,
}

/// Dimensionwise pullback of `f: A -> C` and `g: B -> C`.
pub fn pullback_glob(f: &GlobMap, g: &GlobMap) -> Result<GlobPullback> {
    if f.target != g.target {
        return Err(Error::CodomainMismatch(
            "pullback of globular maps with different codomains".into(),
        ));
    }
    let (a, b) = (&f.source, &g.source);
    let dim = a.dim();
    let mut builder = GlobularSetBuilder::new(dim);
    let mut index: Vec<HashMap<(usize, usize), usize>> = vec![HashMap::new(); dim + 1];
    let mut left = vec![Vec::new(); dim + 1];
    let mut right = vec![Vec::new(); dim + 1];
    for r in 0..=dim {
        for x in 0..a.cell_count(r) {
            for y in 0..b.cell_count(r) {
                if f.apply(r, x) != g.apply(r, y) {
                    continue;
                }
                let name = format!("({},{})", a.name(r, x), b.name(r, y));
                let idx = if r == 0 {
                    builder.point(&name)
                } else {
                    let s = index[r - 1][&(a.src(r, x), b.src(r, y))];
                    let t = index[r - 1][&(a.tgt(r, x), b.tgt(r, y))];
                    builder.cell_at(r, &name, s, t)
                };
                index[r].insert((x, y), idx);
                left[r].push(x);
                right[r].push(y);
            }
        }
    }
    let apex = builder.build()?;
    Ok(GlobPullback {
        left: GlobMap::new(apex.clone(), a.clone(), left)?,
        right: GlobMap::new(apex.clone(), b.clone(), right)?,
        apex,
    })
}
