//! Composite syntax for free strict n-categories.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A composite of generators.
///
/// Well-formedness (boundary matching) is relative to a computad and is
/// checked by the engine, not by this type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Gen { name: String, dim: usize },
    Identity(Box<Term>),
    Compose { k: usize, left: Box<Term>, right: Box<Term> },
}

/// One step into a term, used to address subterms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Left,
    Right,
    Inner,
}

impl Term {
    pub fn gen(name: impl Into<String>, dim: usize) -> Term {
        Term::Gen {
            name: name.into(),
            dim,
        }
    }

    pub fn identity(body: Term) -> Term {
        Term::Identity(Box::new(body))
    }

    /// `body` wrapped in `times` identities.
    pub fn identity_iter(body: Term, times: usize) -> Term {
        (0..times).fold(body, |t, _| Term::identity(t))
    }

    pub fn compose(k: usize, left: Term, right: Term) -> Term {
        Term::Compose {
            k,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Term::Gen { dim, .. } => *dim,
            Term::Identity(body) => body.dim() + 1,
            Term::Compose { left, .. } => left.dim(),
        }
    }

    /// Names of the generators of dimension `dim` occurring in the term, sorted.
    pub fn generator_bag(&self, dim: usize) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_generators(dim, &mut out);
        out.sort();
        out
    }

    /// Generators of dimension `dim` in left-to-right order.
    pub fn generator_word(&self, dim: usize) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_generators(dim, &mut out);
        out
    }

    fn collect_generators(&self, dim: usize, out: &mut Vec<String>) {
        match self {
            Term::Gen { name, dim: d } => {
                if *d == dim {
                    out.push(name.clone());
                }
            }
            Term::Identity(body) => body.collect_generators(dim, out),
            Term::Compose { left, right, .. } => {
                left.collect_generators(dim, out);
                right.collect_generators(dim, out);
            }
        }
    }

    /// Number of generator leaves of any dimension.
    pub fn leaf_count(&self) -> usize {
        match self {
            Term::Gen { .. } => 1,
            Term::Identity(body) => body.leaf_count(),
            Term::Compose { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// True if no generator of the term's own dimension occurs in it.
    pub fn is_identity_like(&self) -> bool {
        self.generator_bag(self.dim()).is_empty()
    }

    /// Strips exactly `times` identity wrappers, if present.
    pub fn strip_identities(&self, times: usize) -> Option<&Term> {
        let mut t = self;
        for _ in 0..times {
            match t {
                Term::Identity(body) => t = body,
                _ => return None,
            }
        }
        Some(t)
    }

    pub fn at(&self, path: &[Side]) -> Option<&Term> {
        let mut t = self;
        for side in path {
            t = match (t, side) {
                (Term::Compose { left, .. }, Side::Left) => left,
                (Term::Compose { right, .. }, Side::Right) => right,
                (Term::Identity(body), Side::Inner) => body,
                _ => return None,
            };
        }
        Some(t)
    }

    /// Replaces the subterm at `path`; `None` if the path does not exist.
    pub fn replace_at(&self, path: &[Side], new: Term) -> Option<Term> {
        let Some((first, rest)) = path.split_first() else {
            return Some(new);
        };
        Some(match (self, first) {
            (Term::Compose { k, left, right }, Side::Left) => {
                Term::compose(*k, left.replace_at(rest, new)?, (**right).clone())
            }
            (Term::Compose { k, left, right }, Side::Right) => {
                Term::compose(*k, (**left).clone(), right.replace_at(rest, new)?)
            }
            (Term::Identity(body), Side::Inner) => Term::identity(body.replace_at(rest, new)?),
            _ => return None,
        })
    }

    /// Prefix syntax: `gen(f)`, `id1(t)`, `comp0(t,u)`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.write_into(&mut out);
        out
    }

    fn write_into(&self, out: &mut String) {
        match self {
            Term::Gen { name, .. } => {
                out.push_str("gen(");
                out.push_str(name);
                out.push(')');
            }
            Term::Identity(body) => {
                out.push_str("id1(");
                body.write_into(out);
                out.push(')');
            }
            Term::Compose { k, left, right } => {
                out.push_str("comp");
                out.push_str(&k.to_string());
                out.push('(');
                left.write_into(out);
                out.push(',');
                right.write_into(out);
                out.push(')');
            }
        }
    }

    /// Parses the prefix syntax. Bare identifiers are read as generators;
    /// `comp_0` and `comp0` are both accepted. Dimensions come from `signature`.
    pub fn parse(input: &str, signature: &Signature) -> Result<Term> {
        let mut p = Parser {
            src: input.as_bytes(),
            pos: 0,
            signature,
        };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&Term::serialize(self))
    }
}

/// Generator names and their dimensions.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    dims: HashMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, dim: usize) -> bool {
        self.dims.insert(name.into(), dim).is_none()
    }

    pub fn dim_of(&self, name: &str) -> Option<usize> {
        self.dims.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.dims.contains_key(name)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    signature: &'a Signature,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::parse(1, format!("{msg} at offset {} in term", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_alphanumeric() || matches!(c, b'_' | b'\'' | b'.' | b'-') {
                self.pos += 1;
            } else if c >= 0x80 {
                // multi-byte UTF-8 names such as Greek letters
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.error("expected identifier"));
        }
        String::from_utf8(self.src[start..self.pos].to_vec()).map_err(|_| self.error("bad UTF-8"))
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn term(&mut self) -> Result<Term> {
        let head = self.ident()?;
        if self.peek() != Some(b'(') {
            return self.generator(&head);
        }
        if head == "gen" {
            self.expect(b'(')?;
            let name = self.ident()?;
            self.expect(b')')?;
            return self.generator(&name);
        }
        if head == "id1" || head == "id" {
            self.expect(b'(')?;
            let body = self.term()?;
            self.expect(b')')?;
            return Ok(Term::identity(body));
        }
        if let Some(k) = head.strip_prefix("comp") {
            let k: usize = k
                .trim_start_matches('_')
                .parse()
                .map_err(|_| self.error("bad composition index"))?;
            self.expect(b'(')?;
            let left = self.term()?;
            self.expect(b',')?;
            let right = self.term()?;
            self.expect(b')')?;
            return Ok(Term::compose(k, left, right));
        }
        Err(self.error(&format!("unknown constructor `{head}`")))
    }

    fn generator(&self, name: &str) -> Result<Term> {
        let dim = self
            .signature
            .dim_of(name)
            .ok_or_else(|| self.error(&format!("unknown generator `{name}`")))?;
        Ok(Term::gen(name, dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.insert("a", 0);
        s.insert("f", 1);
        s.insert("α", 2);
        s
    }

    #[test]
    fn parse_serialize() {
        let s = sig();
        let t = Term::parse("comp_0(id1(f), gen(α))", &s).unwrap();
        assert_eq!(t.serialize(), "comp0(id1(gen(f)),gen(α))");
        assert_eq!(Term::parse(&t.serialize(), &s).unwrap(), t);
        assert_eq!(t.dim(), 2);
        assert_eq!(Term::parse("a", &s).unwrap(), Term::gen("a", 0));
        assert!(Term::parse("comp0(a)", &s).is_err());
        assert!(Term::parse("gen(zz)", &s).is_err());
        assert!(Term::parse("a b", &s).is_err());
    }

    #[test]
    fn paths_address_subterms() {
        let s = sig();
        let t = Term::parse("comp0(id1(f),α)", &s).unwrap();
        assert_eq!(t.at(&[Side::Left, Side::Inner]), Some(&Term::gen("f", 1)));
        let r = t.replace_at(&[Side::Right], Term::gen("α", 2)).unwrap();
        assert_eq!(r, t);
        assert!(t.at(&[Side::Inner]).is_none());
        assert_eq!(t.generator_bag(2), vec!["α".to_string()]);
        assert_eq!(t.leaf_count(), 2);
    }
}
