//! Collections, analytic functors, presentations of algebraic theories and
//! slices of the terminal globular operad.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::computads::{theta_computad, Computad, GeneratorDecl};
use crate::error::{Error, Result};
use crate::freecat::{Bounds, Term, Verdict};
use crate::pasting::Tree;
use crate::text;

/// All permutations of `0..n` in lexicographic order, in one-line notation.
pub fn permutations(n: usize) -> Vec<Vec<u8>> {
    (0..n as u8).permutations(n).collect()
}

fn perm_index(perms: &[Vec<u8>], p: &[u8]) -> usize {
    perms.binary_search_by(|q| q.as_slice().cmp(p)).expect("a permutation")
}

/// `(σ∘τ)(i) = σ(τ(i))`.
fn compose_perm(s: &[u8], t: &[u8]) -> Vec<u8> {
    t.iter().map(|&i| s[i as usize]).collect()
}

fn invert(s: &[u8]) -> Vec<u8> {
    let mut inv = vec![0; s.len()];
    for (i, &v) in s.iter().enumerate() {
        inv[v as usize] = i as u8;
    }
    inv
}

/// Arity-indexed sets with a left action of the symmetric groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymCollection {
    elements: Vec<Vec<String>>,
    /// `action[n][perm][element]`, permutations in lexicographic order.
    action: Vec<Vec<Vec<u32>>>,
}

impl SymCollection {
    pub fn new(elements: Vec<Vec<String>>, action: Vec<Vec<Vec<u32>>>) -> Result<Self> {
        let c = SymCollection { elements, action };
        c.validate()?;
        Ok(c)
    }

    /// One operation in each arity with trivial action.
    pub fn commutative(max_arity: usize) -> Self {
        let elements = (0..=max_arity).map(|n| vec![format!("c{n}")]).collect();
        let action = (0..=max_arity)
            .map(|n| vec![vec![0]; permutations(n).len()])
            .collect();
        SymCollection { elements, action }
    }

    /// The free symmetric collection on `a`: `A[n] = a[n] × Σ_n`, acting on the
    /// permutation factor by `σ·(p, τ) = (p, σ∘τ)`. Element `i·n! + j` is
    /// `(a_i, τ_j)`.
    pub fn free_on(a: &NonSymCollection) -> Self {
        let mut elements = Vec::new();
        let mut action = Vec::new();
        for n in 0..a.elements.len() {
            let perms = permutations(n);
            let f = perms.len();
            elements.push(
                a.elements[n]
                    .iter()
                    .flat_map(|e| perms.iter().map(move |p| format!("{e}{p:?}")))
                    .collect(),
            );
            action.push(
                perms
                    .iter()
                    .map(|s| {
                        (0..a.elements[n].len() * f)
                            .map(|x| {
                                let (i, j) = (x / f, x % f);
                                (i * f + perm_index(&perms, &compose_perm(s, &perms[j]))) as u32
                            })
                            .collect()
                    })
                    .collect(),
            );
        }
        SymCollection { elements, action }
    }

    /// The regular representation: the associative operad viewed as symmetric.
    pub fn regular(max_arity: usize) -> Self {
        SymCollection::free_on(&NonSymCollection::constant(&vec![1; max_arity + 1]))
    }

    pub fn max_arity(&self) -> usize {
        self.elements.len().saturating_sub(1)
    }

    pub fn elements(&self, n: usize) -> &[String] {
        self.elements.get(n).map_or(&[], Vec::as_slice)
    }

    /// `σ·p` for the permutation with lexicographic index `perm`.
    pub fn act(&self, n: usize, perm: usize, p: u32) -> u32 {
        self.action[n][perm][p as usize]
    }

    /// Identity and composition laws, checked on every pair of permutations.
    pub fn validate(&self) -> Result<()> {
        if self.action.len() != self.elements.len() {
            return Err(Error::InvalidCollection("action missing for some arity".into()));
        }
        for n in 0..self.elements.len() {
            let perms = permutations(n);
            let size = self.elements[n].len() as u32;
            if self.action[n].len() != perms.len() || self.action[n].iter().any(|t| t.len() != size as usize) {
                return Err(Error::InvalidCollection(format!("action table of arity {n} has the wrong shape")));
            }
            if self.action[n].iter().flatten().any(|&v| v >= size) {
                return Err(Error::InvalidCollection(format!("action of arity {n} leaves the set")));
            }
            if (0..size).any(|p| self.act(n, 0, p) != p) {
                return Err(Error::InvalidCollection(format!("identity acts nontrivially in arity {n}")));
            }
            for (si, s) in perms.iter().enumerate() {
                for (ti, t) in perms.iter().enumerate() {
                    let st = perm_index(&perms, &compose_perm(s, t));
                    for p in 0..size {
                        if self.act(n, st, p) != self.act(n, si, self.act(n, ti, p)) {
                            return Err(Error::InvalidCollection(format!(
                                "action in arity {n} does not respect composition"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Text format: `arity n : a b c` and `action n <perm> : a -> b, ...`.
    /// Actions may be given for generators only; they are closed under composition.
    pub fn parse(input: &str) -> Result<Self> {
        let mut elements: Vec<Vec<String>> = Vec::new();
        // (line, arity, permutation, element pairs)
        let mut given: Vec<(usize, usize, Vec<u8>, Vec<(String, String)>)> = Vec::new();
        for (line, content) in text::lines(input) {
            let (head, body) = text::split_once(line, content, ":")?;
            let words: Vec<&str> = head.split_whitespace().collect();
            match words.as_slice() {
                ["arity", n] => {
                    let n = text::parse_usize(line, n)?;
                    if elements.len() <= n {
                        elements.resize(n + 1, Vec::new());
                    }
                    elements[n].extend(body.split_whitespace().map(str::to_string));
                }
                ["action", n, perm @ ..] => {
                    let n = text::parse_usize(line, n)?;
                    let p: Vec<u8> = perm
                        .iter()
                        .map(|w| text::parse_usize(line, w).map(|v| v as u8))
                        .collect::<Result<_>>()?;
                    let mut pairs = Vec::new();
                    for piece in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let (a, b) = text::split_once(line, piece, "->")?;
                        pairs.push((a.to_string(), b.to_string()));
                    }
                    given.push((line, n, p, pairs));
                }
                _ => return Err(Error::parse(line, format!("unknown directive `{head}`"))),
            }
        }
        let mut action = Vec::new();
        for (n, elems) in elements.iter().enumerate() {
            let perms = permutations(n);
            let index: HashMap<&str, u32> = elems.iter().enumerate().map(|(i, e)| (e.as_str(), i as u32)).collect();
            let mut table: Vec<Option<Vec<u32>>> = vec![None; perms.len()];
            table[0] = Some((0..elems.len() as u32).collect());
            let mut gens = Vec::new();
            for (line, _, p, pairs) in given.iter().filter(|g| g.1 == n) {
                let mut sorted = p.clone();
                sorted.sort_unstable();
                if sorted != (0..n as u8).collect::<Vec<_>>() {
                    return Err(Error::parse(*line, "not a permutation"));
                }
                let mut row: Vec<Option<u32>> = vec![None; elems.len()];
                for (a, b) in pairs {
                    let (Some(&a), Some(&b)) = (index.get(a.as_str()), index.get(b.as_str())) else {
                        return Err(Error::parse(*line, format!("unknown element in `{a} -> {b}`")));
                    };
                    row[a as usize] = Some(b);
                }
                // unlisted elements are fixed
                let row: Vec<u32> = row.iter().enumerate().map(|(i, v)| v.unwrap_or(i as u32)).collect();
                gens.push((perm_index(&perms, p), row));
            }
            if gens.is_empty() {
                action.push(vec![(0..elems.len() as u32).collect(); perms.len()]);
                continue;
            }
            for (i, row) in &gens {
                if table[*i].as_ref().is_some_and(|r| r != row) {
                    return Err(Error::InvalidCollection(format!("conflicting action in arity {n}")));
                }
                table[*i] = Some(row.clone());
            }
            // close under composition
            loop {
                let mut changed = false;
                for s in 0..perms.len() {
                    for (g, grow) in &gens {
                        let Some(srow) = table[s].clone() else { continue };
                        let gs = perm_index(&perms, &compose_perm(&perms[*g], &perms[s]));
                        let row: Vec<u32> = srow.iter().map(|&x| grow[x as usize]).collect();
                        match &table[gs] {
                            None => {
                                table[gs] = Some(row);
                                changed = true;
                            }
                            Some(existing) if *existing != row => {
                                return Err(Error::InvalidCollection(format!(
                                    "action in arity {n} is not closed under composition"
                                )));
                            }
                            _ => {}
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            let full: Option<Vec<Vec<u32>>> = table.into_iter().collect();
            action.push(full.ok_or_else(|| {
                Error::InvalidCollection(format!("given permutations do not generate the action in arity {n}"))
            })?);
        }
        SymCollection::new(elements, action)
    }
}

/// Arity-indexed finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonSymCollection {
    elements: Vec<Vec<String>>,
}

impl NonSymCollection {
    pub fn new(elements: Vec<Vec<String>>) -> Self {
        NonSymCollection { elements }
    }

    /// `counts[n]` anonymous operations of arity n.
    pub fn constant(counts: &[usize]) -> Self {
        NonSymCollection {
            elements: counts
                .iter()
                .enumerate()
                .map(|(n, &c)| (0..c).map(|i| format!("a{n}_{i}")).collect())
                .collect(),
        }
    }

    pub fn max_arity(&self) -> usize {
        self.elements.len().saturating_sub(1)
    }

    pub fn elements(&self, n: usize) -> &[String] {
        self.elements.get(n).map_or(&[], Vec::as_slice)
    }
}

/// An element of `A[n] × X^n`, or a canonical orbit representative of it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Monomial {
    pub arity: usize,
    pub op: u32,
    pub args: Vec<u32>,
}

/// `Σ A[n] ×_{Σ_n} X^n` for `|X| = x`, as lexicographically least orbit
/// representatives under `σ·(p, x) = (σp, x∘σ⁻¹)`.
pub fn eval_analytic(a: &SymCollection, x: usize, arity_bound: usize) -> Vec<Monomial> {
    let mut out = BTreeSet::new();
    for n in 0..=arity_bound.min(a.max_arity()) {
        let perms = permutations(n);
        let inverses: Vec<Vec<u8>> = perms.iter().map(|p| invert(p)).collect();
        for op in 0..a.elements(n).len() as u32 {
            for args in tuples(x, n) {
                let best = perms
                    .iter()
                    .enumerate()
                    .map(|(si, _)| Monomial {
                        arity: n,
                        op: a.act(n, si, op),
                        args: inverses[si].iter().map(|&i| args[i as usize]).collect(),
                    })
                    .min()
                    .unwrap();
                out.insert(best);
            }
        }
    }
    out.into_iter().collect()
}

/// `Σ A[n] × X^n`.
pub fn eval_strongly_analytic(a: &NonSymCollection, x: usize, arity_bound: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for n in 0..=arity_bound.min(a.max_arity()) {
        for op in 0..a.elements(n).len() as u32 {
            for args in tuples(x, n) {
                out.push(Monomial { arity: n, op, args });
            }
        }
    }
    out.sort();
    out
}

/// All words of length `n` over `0..x`, in lexicographic order.
fn tuples(x: usize, n: usize) -> Vec<Vec<u32>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|w| {
                (0..x as u32).map(move |c| {
                    let mut w = w.clone();
                    w.push(c);
                    w
                })
            })
            .collect()
    })
}

/// Result of comparing the analytic functor of the free symmetric
/// collection on `a` with the strongly analytic functor of `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionCheck {
    pub analytic: usize,
    pub strongly_analytic: usize,
    pub bijective: bool,
}

/// The orbit of `((a, τ), x)` goes to `(a, x∘τ)`; checks this is a bijection.
pub fn free_symmetric_bijection(a: &NonSymCollection, x: usize, arity_bound: usize) -> BijectionCheck {
    let free = SymCollection::free_on(a);
    let orbits = eval_analytic(&free, x, arity_bound);
    let plain = eval_strongly_analytic(a, x, arity_bound);
    let mut image = BTreeSet::new();
    for m in &orbits {
        let perms = permutations(m.arity);
        let f = perms.len() as u32;
        let (op, tau) = (m.op / f, &perms[(m.op % f) as usize]);
        let args: Vec<u32> = tau.iter().map(|&i| m.args[i as usize]).collect();
        image.insert(Monomial {
            arity: m.arity,
            op,
            args,
        });
    }
    let target: BTreeSet<Monomial> = plain.iter().cloned().collect();
    BijectionCheck {
        analytic: orbits.len(),
        strongly_analytic: plain.len(),
        bijective: image.len() == orbits.len() && image == target,
    }
}

/// A term over operation symbols and variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PTerm {
    Var(String),
    Op(String, Vec<PTerm>),
}

impl PTerm {
    fn variables(&self, out: &mut Vec<String>) {
        match self {
            PTerm::Var(v) => out.push(v.clone()),
            PTerm::Op(_, args) => args.iter().for_each(|a| a.variables(out)),
        }
    }

    /// Variables in left-to-right order, with repetitions.
    pub fn variable_sequence(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.variables(&mut out);
        out
    }

    fn rename(&self, f: &impl Fn(&str) -> String) -> PTerm {
        match self {
            PTerm::Var(v) => PTerm::Var(f(v)),
            PTerm::Op(o, args) => PTerm::Op(o.clone(), args.iter().map(|a| a.rename(f)).collect()),
        }
    }
}

impl fmt::Display for PTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PTerm::Var(v) => f.write_str(v),
            PTerm::Op(o, args) if args.is_empty() => f.write_str(o),
            PTerm::Op(o, args) => write!(f, "{o}({})", args.iter().join(",")),
        }
    }
}

/// Operation symbols with arities and a list of equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub ops: Vec<(String, usize)>,
    pub equations: Vec<(PTerm, PTerm)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    Repetition,
    Deletion,
    Permutation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityWitness {
    pub equation: usize,
    pub text: String,
    pub kind: ViolationKind,
}

/// Verdict about a given presentation. A theory may have a strongly regular
/// presentation even when this one is not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityVerdict {
    pub strongly_regular: bool,
    pub witness: Option<RegularityWitness>,
}

impl Presentation {
    pub fn new(ops: Vec<(String, usize)>, equations: Vec<(PTerm, PTerm)>) -> Result<Self> {
        let p = Presentation { ops, equations };
        for (l, r) in &p.equations {
            p.check(l)?;
            p.check(r)?;
        }
        Ok(p)
    }

    fn arity(&self, op: &str) -> Option<usize> {
        self.ops.iter().find(|(o, _)| o == op).map(|(_, a)| *a)
    }

    fn check(&self, t: &PTerm) -> Result<()> {
        match t {
            PTerm::Var(_) => Ok(()),
            PTerm::Op(o, args) => {
                let want = self
                    .arity(o)
                    .ok_or_else(|| Error::Usage(format!("unknown operation `{o}`")))?;
                if want != args.len() {
                    return Err(Error::Usage(format!("`{o}` takes {want} arguments, given {}", args.len())));
                }
                args.iter().try_for_each(|a| self.check(a))
            }
        }
    }

    /// `op m : 2` declarations and `lhs = rhs` equations.
    pub fn parse(input: &str) -> Result<Self> {
        let mut ops = Vec::new();
        let mut raw = Vec::new();
        for (line, content) in text::lines(input) {
            if let Some(rest) = content.strip_prefix("op ") {
                let (name, arity) = text::split_once(line, rest, ":")?;
                if !text::is_identifier(name) {
                    return Err(Error::parse(line, format!("bad operation name `{name}`")));
                }
                ops.push((name.to_string(), text::parse_usize(line, arity)?));
            } else {
                let (l, r) = text::split_once(line, content, "=")?;
                raw.push((line, l.to_string(), r.to_string()));
            }
        }
        let mut equations = Vec::new();
        for (line, l, r) in raw {
            let parse = |s: &str| -> Result<PTerm> {
                let mut p = TermParser { s: s.as_bytes(), pos: 0, ops: &ops };
                let t = p.term().map_err(|m| Error::parse(line, m))?;
                p.ws();
                if p.pos != p.s.len() {
                    return Err(Error::parse(line, format!("trailing input in `{s}`")));
                }
                Ok(t)
            };
            equations.push((parse(&l)?, parse(&r)?));
        }
        Presentation::new(ops, equations).map_err(|e| Error::parse(0, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (o, a) in &self.ops {
            out.push_str(&format!("op {o} : {a}\n"));
        }
        for (l, r) in &self.equations {
            out.push_str(&format!("{l} = {r}\n"));
        }
        out
    }

    /// Checks every equation for repeated, deleted or permuted variables,
    /// in that order of precedence.
    pub fn is_strongly_regular(&self) -> RegularityVerdict {
        for (i, (l, r)) in self.equations.iter().enumerate() {
            let (vl, vr) = (l.variable_sequence(), r.variable_sequence());
            let repeated = |v: &[String]| v.iter().collect::<BTreeSet<_>>().len() != v.len();
            let kind = if repeated(&vl) || repeated(&vr) {
                Some(ViolationKind::Repetition)
            } else if vl.iter().collect::<BTreeSet<_>>() != vr.iter().collect::<BTreeSet<_>>() {
                Some(ViolationKind::Deletion)
            } else if vl != vr {
                Some(ViolationKind::Permutation)
            } else {
                None
            };
            if let Some(kind) = kind {
                return RegularityVerdict {
                    strongly_regular: false,
                    witness: Some(RegularityWitness {
                        equation: i,
                        text: format!("{l} = {r}"),
                        kind,
                    }),
                };
            }
        }
        RegularityVerdict {
            strongly_regular: true,
            witness: None,
        }
    }

    /// The same presentation with variables renamed.
    pub fn rename_variables(&self, f: &impl Fn(&str) -> String) -> Presentation {
        Presentation {
            ops: self.ops.clone(),
            equations: self.equations.iter().map(|(l, r)| (l.rename(f), r.rename(f))).collect(),
        }
    }
}

struct TermParser<'a> {
    s: &'a [u8],
    pos: usize,
    ops: &'a [(String, usize)],
}

impl TermParser<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn term(&mut self) -> std::result::Result<PTerm, String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_' || self.s[self.pos] >= 0x80) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected a term at offset {start}"));
        }
        let name = String::from_utf8_lossy(&self.s[start..self.pos]).to_string();
        self.ws();
        let is_op = self.ops.iter().any(|(o, _)| *o == name);
        if self.s.get(self.pos) == Some(&b'(') {
            self.pos += 1;
            let mut args = Vec::new();
            self.ws();
            if self.s.get(self.pos) == Some(&b')') {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    self.ws();
                    match self.s.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(format!("expected `,` or `)` at offset {}", self.pos)),
                    }
                }
            }
            if !is_op {
                return Err(format!("`{name}` is not a declared operation"));
            }
            Ok(PTerm::Op(name, args))
        } else if is_op {
            Ok(PTerm::Op(name, Vec::new()))
        } else {
            Ok(PTerm::Var(name))
        }
    }
}

/// Arity-graded sets indexed by pasting shapes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobularCollection {
    pub max_height: usize,
    pub fibres: BTreeMap<Tree, Vec<String>>,
}

impl GlobularCollection {
    pub fn new(max_height: usize, fibres: BTreeMap<Tree, Vec<String>>) -> Result<Self> {
        if let Some(t) = fibres.keys().find(|t| t.height() > max_height) {
            return Err(Error::InvalidCollection(format!("tree {t} exceeds height {max_height}")));
        }
        Ok(GlobularCollection { max_height, fibres })
    }

    /// The terminal collection: one operation over each tree within bounds.
    pub fn terminal(max_height: usize, max_width: usize) -> Self {
        let fibres = crate::pasting::enumerate_trees(max_height, max_width)
            .into_iter()
            .map(|t| (t, vec!["*".to_string()]))
            .collect();
        GlobularCollection { max_height, fibres }
    }

    pub fn size(&self) -> usize {
        self.fibres.values().map(Vec::len).sum()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Counts of cells of the free monoid on `x` letters, by length.
pub fn free_monoid_counts(x: usize, max_len: usize) -> Vec<usize> {
    (0..=max_len).map(|n| x.pow(n as u32)).collect()
}

/// Counts of multisets over `x` letters, by size.
pub fn multiset_counts(x: usize, max_size: usize) -> Vec<usize> {
    (0..=max_size)
        .map(|n| if x == 0 { usize::from(n == 0) } else { binomial(n + x - 1, n) })
        .collect()
}

/// n-ary operations of two monoid structures sharing a unit: normal forms
/// alternate between the two products.
fn double_monoid_counts(max_arity: usize) -> Vec<usize> {
    // rooted[n]: normal forms in n variables whose root is a fixed one of the two products
    let mut rooted = vec![0usize; max_arity + 1];
    // other[n]: forms usable as a factor under that product (a variable or the other product)
    let mut other = vec![0usize; max_arity + 1];
    for n in 1..=max_arity {
        // sequences of >= 2 factors with sizes summing to n
        let mut seq = vec![0usize; n + 1]; // seq[m][..]: at least one factor
        let mut ways = vec![0usize; n + 1];
        seq[0] = 1;
        // f[m] = number of sequences (any length >= 1) of factors summing to m
        for m in 1..=n {
            ways[m] = (1..=m).map(|k| other_val(&other, k, n) * seq[m - k]).sum();
            seq[m] = ways[m];
        }
        // subtract single-factor sequences
        rooted[n] = ways[n] - other_val(&other, n, n);
        other[n] = usize::from(n == 1) + rooted[n];
    }
    (0..=max_arity)
        .map(|n| match n {
            0 | 1 => 1,
            _ => 2 * rooted[n],
        })
        .collect()
}

/// Factor count, excluding the size-n entry while it is being computed.
fn other_val(other: &[usize], k: usize, n: usize) -> usize {
    if k == n {
        usize::from(k == 1)
    } else {
        other[k]
    }
}

/// n-ary operations of the free nonsymmetric operad on one nullary and one
/// binary operation, using at most `max_ops` operation symbols.
fn pointed_binary_counts(max_arity: usize, max_ops: usize) -> Vec<usize> {
    // t[o][n]: terms with exactly o operations and n variables
    let mut t = vec![vec![0usize; max_arity + 1]; max_ops + 1];
    t[0][1] = 1;
    if max_ops >= 1 {
        t[1][0] = 1;
    }
    for o in 1..=max_ops {
        for n in 0..=max_arity {
            let mut s = 0;
            for o1 in 0..o {
                let o2 = o - 1 - o1;
                for n1 in 0..=n {
                    s += t[o1][n1] * t[o2][n - n1];
                }
            }
            t[o][n] += s;
        }
    }
    (0..=max_arity).map(|n| (0..=max_ops).map(|o| t[o][n]).sum()).collect()
}

/// A catalog entry: a presentation plus arity counts of its operations.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub presentation: Presentation,
    /// Whether the operad is free symmetric on a nonsymmetric one.
    pub strongly_analytic: bool,
    /// Operations by arity (nonsymmetric case) up to the given bound.
    pub arity_counts: Vec<usize>,
}

impl CatalogEntry {
    /// Sizes of the value on a set with `x` elements, graded by arity.
    pub fn evaluate_counts(&self, x: usize) -> Vec<usize> {
        if self.strongly_analytic {
            self.arity_counts
                .iter()
                .enumerate()
                .map(|(n, &c)| c * x.pow(n as u32))
                .collect()
        } else {
            multiset_counts(x, self.arity_counts.len().saturating_sub(1))
        }
    }
}

pub const CATALOG: [&str; 5] = [
    "zero-slice-monoid",
    "free-monoid",
    "free-commutative-monoid",
    "double-monoid-shared-unit",
    "bicategory-first-slice",
];

const MONOID: &str = include_str!("../data/monoid.thy");
const COMMUTATIVE_MONOID: &str = include_str!("../data/commutative-monoid.thy");
const DOUBLE_MONOID: &str = include_str!("../data/gray-slice2.thy");

/// Looks up a catalog entry. `max_arity` bounds the counts; for the
/// bicategory entry the number of operation symbols is bounded by it too.
pub fn known_slice_oracle(name: &str, max_arity: usize) -> Result<CatalogEntry> {
    let p = |s: &str| Presentation::parse(s).expect("catalog presentations parse");
    Ok(match name {
        "zero-slice-monoid" => CatalogEntry {
            name: "zero-slice-monoid",
            presentation: p("op u : 1\nu(x) = x\n"),
            strongly_analytic: true,
            arity_counts: (0..=max_arity).map(|n| usize::from(n == 1)).collect(),
        },
        "free-monoid" => CatalogEntry {
            name: "free-monoid",
            presentation: p(MONOID),
            strongly_analytic: true,
            arity_counts: vec![1; max_arity + 1],
        },
        "free-commutative-monoid" => CatalogEntry {
            name: "free-commutative-monoid",
            presentation: p(COMMUTATIVE_MONOID),
            strongly_analytic: false,
            arity_counts: vec![1; max_arity + 1],
        },
        "double-monoid-shared-unit" => CatalogEntry {
            name: "double-monoid-shared-unit",
            presentation: p(DOUBLE_MONOID),
            strongly_analytic: true,
            arity_counts: double_monoid_counts(max_arity),
        },
        "bicategory-first-slice" => CatalogEntry {
            name: "bicategory-first-slice",
            presentation: p("op e : 0\nop m : 2\n"),
            strongly_analytic: true,
            arity_counts: pointed_binary_counts(max_arity, max_arity),
        },
        other => return Err(Error::UnknownCatalogEntry(other.to_string())),
    })
}

/// Top-dimensional cells of the free k-category on a (k−1)-terminal
/// computad with `x` generators of dimension k.
#[derive(Debug, Clone, Serialize)]
pub struct SliceReport {
    pub k: usize,
    pub generators: usize,
    pub size_bound: usize,
    pub counts_by_size: Vec<usize>,
    pub counts_by_multiset: BTreeMap<String, usize>,
    pub oracle: Vec<usize>,
    pub oracle_name: &'static str,
    pub matches_oracle: bool,
    pub unknown_pairs: usize,
    pub partial: bool,
}

pub fn slice_computad(k: usize, x: usize, bounds: Bounds) -> Result<Computad> {
    if k == 0 {
        return Err(Error::Usage("slices start at k = 1".into()));
    }
    let theta = theta_computad(k - 1, bounds)?;
    let mut layers = theta.layers().to_vec();
    let base = Term::identity_iter(Term::gen("o", 0), k - 1);
    layers.push(
        (0..x)
            .map(|i| GeneratorDecl {
                name: format!("x{i}"),
                boundary: Some((base.clone(), base.clone())),
            })
            .collect(),
    );
    Computad::from_layers(k, layers, bounds)
}

pub fn slice_of_strict(k: usize, x: usize, bounds: Bounds) -> Result<SliceReport> {
    let c = slice_computad(k, x, bounds)?;
    let e = c.free_algebra();
    let mut counts_by_size = vec![0; bounds.size + 1];
    let mut groups: BTreeMap<Vec<String>, Vec<u32>> = BTreeMap::new();
    for cls in 0..e.class_count(k) as u32 {
        counts_by_size[e.class_size(k, cls)] += 1;
        groups.entry(e.class_generators(k, cls)).or_default().push(cls);
    }
    let mut unknown_pairs = 0;
    for members in groups.values() {
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                let v = e.equal_cells(e.representative(k, a), e.representative(k, b))?;
                if matches!(v, Verdict::Unknown(_)) {
                    unknown_pairs += 1;
                }
            }
        }
    }
    let (oracle, oracle_name) = if k == 1 {
        (free_monoid_counts(x, bounds.size), "free-monoid")
    } else {
        (multiset_counts(x, bounds.size), "free-commutative-monoid")
    };
    Ok(SliceReport {
        k,
        generators: x,
        size_bound: bounds.size,
        matches_oracle: counts_by_size == oracle && unknown_pairs == 0,
        counts_by_size,
        counts_by_multiset: groups
            .into_iter()
            .map(|(g, m)| (format!("{{{}}}", g.join(",")), m.len()))
            .collect(),
        oracle,
        oracle_name,
        unknown_pairs,
        partial: e.truncated(k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_examples() {
        assert_eq!(eval_analytic(&SymCollection::commutative(2), 2, 2).len(), 6);
        assert_eq!(eval_analytic(&SymCollection::regular(2), 2, 2).len(), 7);
        assert_eq!(eval_analytic(&SymCollection::commutative(3), 0, 3).len(), 1);
    }

    #[test]
    fn strongly_analytic_examples() {
        assert_eq!(eval_strongly_analytic(&NonSymCollection::constant(&[1, 1, 1, 1]), 2, 3).len(), 15);
        assert_eq!(eval_strongly_analytic(&NonSymCollection::constant(&[1]), 5, 3).len(), 1);
        assert!(eval_strongly_analytic(&NonSymCollection::constant(&[0, 0, 0]), 2, 2).is_empty());
    }

    #[test]
    fn regular_collection_validates() {
        SymCollection::regular(3).validate().unwrap();
        SymCollection::free_on(&NonSymCollection::constant(&[2, 0, 3])).validate().unwrap();
    }

    #[test]
    fn bad_action_is_rejected() {
        // swap on arity 2 that is not an involution
        let bad = SymCollection::new(vec![vec![], vec![], vec!["a".into(), "b".into(), "c".into()]],
            vec![vec![vec![]], vec![vec![]], vec![vec![0, 1, 2], vec![1, 2, 0]]]);
        assert!(bad.is_err());
    }

    #[test]
    fn collection_file_closes_actions() {
        let c = SymCollection::parse("arity 0 : e\narity 2 : m mop\naction 2 1 0 : m -> mop, mop -> m\n").unwrap();
        assert_eq!(c.act(2, 1, 0), 1);
        let c3 = SymCollection::parse("arity 3 : p\n").unwrap();
        assert_eq!(c3.act(3, 5, 0), 0);
        assert!(SymCollection::parse("arity 2 : m mop\naction 2 1 0 : m -> mop\n").is_err());
    }

    #[test]
    fn regularity_verdicts() {
        let mon = Presentation::parse(MONOID).unwrap();
        assert!(mon.is_strongly_regular().strongly_regular);
        let com = Presentation::parse(COMMUTATIVE_MONOID).unwrap().is_strongly_regular();
        assert_eq!(com.witness.unwrap().kind, ViolationKind::Permutation);
        let dbl = Presentation::parse(DOUBLE_MONOID).unwrap();
        assert!(dbl.is_strongly_regular().strongly_regular);
        let idem = Presentation::parse("op m : 2\nm(x,x) = x").unwrap().is_strongly_regular();
        assert_eq!(idem.witness.unwrap().kind, ViolationKind::Repetition);
        let zero = Presentation::parse("op m : 2\nop z : 0\nm(x,z) = z").unwrap().is_strongly_regular();
        assert_eq!(zero.witness.unwrap().kind, ViolationKind::Deletion);
    }

    #[test]
    fn presentation_errors() {
        assert!(Presentation::parse("op m : 2\nm(x) = x").is_err());
        assert!(Presentation::parse("op m : 2\nq(x) = x").is_err());
        assert!(Presentation::parse("op m : 2\nm(x,y)").is_err());
    }

    #[test]
    fn catalog_counts() {
        let fm = known_slice_oracle("free-monoid", 3).unwrap();
        assert_eq!(fm.evaluate_counts(2).iter().sum::<usize>(), 15);
        let fcm = known_slice_oracle("free-commutative-monoid", 3).unwrap();
        assert_eq!(fcm.evaluate_counts(2).iter().sum::<usize>(), 10);
        let dm = known_slice_oracle("double-monoid-shared-unit", 4).unwrap();
        assert_eq!(dm.arity_counts, vec![1, 1, 2, 6, 22]);
        assert!(dm.presentation.is_strongly_regular().strongly_regular);
        assert!(known_slice_oracle("nope", 3).is_err());
        let bi = known_slice_oracle("bicategory-first-slice", 2).unwrap();
        // at most two symbols. arity 0: e; arity 1: x, m(e,x), m(x,e); arity 2: m(x,y)
        assert_eq!(bi.arity_counts, vec![1, 3, 1]);
    }

    #[test]
    fn small_slices() {
        let r = slice_of_strict(1, 2, Bounds::with_size(3)).unwrap();
        assert_eq!(r.counts_by_size, vec![1, 2, 4, 8]);
        assert!(r.matches_oracle);
        let r = slice_of_strict(2, 2, Bounds::with_size(3)).unwrap();
        assert_eq!(r.counts_by_size, vec![1, 2, 3, 4]);
        assert!(r.matches_oracle, "{r:?}");
        let r = slice_of_strict(1, 0, Bounds::with_size(3)).unwrap();
        assert_eq!(r.counts_by_size, vec![1, 0, 0, 0]);
        assert!(r.matches_oracle);
    }
}
