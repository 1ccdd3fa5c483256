//! Plane rooted trees as shapes of pasting diagrams.
//!
//! A tree of height at most `n` is an `n`-cell of the free strict
//! ω-category on the terminal globular set. Decorations follow the
//! sectors reading: a node at depth `d` with `m` children has `m + 1`
//! sectors, each labelled by a `d`-cell; the sectors of the `i`-th child
//! all run from sector `i` to sector `i + 1` of its parent.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::globular::GlobularSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Tree {
    children: Vec<Tree>,
}

impl Tree {
    /// The single-node tree, the unique tree of height 0.
    pub fn leaf() -> Tree {
        Tree::default()
    }

    pub fn node(children: Vec<Tree>) -> Tree {
        Tree { children }
    }

    /// A path of `len` edges.
    pub fn chain(len: usize) -> Tree {
        (0..len).fold(Tree::leaf(), |t, _| Tree::node(vec![t]))
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Largest number of children of any node.
    pub fn width(&self) -> usize {
        self.children
            .iter()
            .map(Tree::width)
            .max()
            .unwrap_or(0)
            .max(self.children.len())
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Tree::node_count).sum::<usize>()
    }

    /// Deletes every node deeper than `k`.
    pub fn truncate(&self, k: usize) -> Tree {
        if k == 0 {
            return Tree::leaf();
        }
        Tree::node(self.children.iter().map(|c| c.truncate(k - 1)).collect())
    }

    /// Balanced-parenthesis serialization in preorder.
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(2 * self.node_count());
        self.write_into(&mut out);
        out
    }

    fn write_into(&self, out: &mut String) {
        out.push('(');
        for c in &self.children {
            c.write_into(out);
        }
        out.push(')');
    }

    pub fn parse(s: &str) -> Result<Tree> {
        let mut stack: Vec<Vec<Tree>> = vec![Vec::new()];
        for (i, ch) in s.trim().chars().enumerate() {
            match ch {
                '(' => stack.push(Vec::new()),
                ')' => {
                    if stack.len() < 2 {
                        return Err(Error::parse(1, format!("unbalanced `)` at offset {i}")));
                    }
                    let children = stack.pop().expect("checked above");
                    stack.last_mut().expect("root frame").push(Tree::node(children));
                }
                c if c.is_whitespace() => {}
                c => return Err(Error::parse(1, format!("unexpected `{c}` in tree"))),
            }
        }
        if stack.len() != 1 {
            return Err(Error::parse(1, "unbalanced `(` in tree"));
        }
        let mut roots = stack.pop().expect("root frame");
        if roots.len() != 1 {
            return Err(Error::parse(1, format!("expected one tree, found {}", roots.len())));
        }
        Ok(roots.pop().expect("one root"))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for Tree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Tree> {
        Tree::parse(s)
    }
}

impl Serialize for Tree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&Tree::serialize(self))
    }
}

/// Every plane tree with height at most `max_height` whose nodes have at most
/// `max_width` children, each exactly once, in a canonical order.
pub fn enumerate_trees(max_height: usize, max_width: usize) -> Vec<Tree> {
    let mut level = vec![Tree::leaf()];
    for _ in 0..max_height {
        let mut next = Vec::new();
        next.push(Tree::leaf());
        for m in 1..=max_width {
            for choice in (0..m).map(|_| level.iter().cloned()).multi_cartesian_product() {
                next.push(Tree::node(choice));
            }
        }
        level = next;
    }
    level.sort_by_cached_key(|t| {
        let s = t.serialize();
        (s.len(), s)
    });
    level.dedup();
    level
}

/// A tree whose sectors carry cells of a globular set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DecoratedTree {
    /// Labels of this node's sectors (`children.len() + 1` of them).
    pub sectors: Vec<usize>,
    pub children: Vec<DecoratedTree>,
}

impl DecoratedTree {
    pub fn shape(&self) -> Tree {
        Tree::node(self.children.iter().map(DecoratedTree::shape).collect())
    }

    /// Number of sector labels at the given depth.
    pub fn labels_at(&self, depth: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_labels(depth, &mut out);
        out
    }

    fn collect_labels(&self, depth: usize, out: &mut Vec<usize>) {
        if depth == 0 {
            out.extend(&self.sectors);
        } else {
            for c in &self.children {
                c.collect_labels(depth - 1, out);
            }
        }
    }

    /// Checks the sector matching against `x`.
    pub fn is_compatible(&self, x: &GlobularSet) -> bool {
        self.check(x, 0, None)
    }

    fn check(&self, x: &GlobularSet, depth: usize, frame: Option<(usize, usize)>) -> bool {
        if self.sectors.len() != self.children.len() + 1 || depth > x.dim() {
            return false;
        }
        let labels_ok = self.sectors.iter().all(|&z| {
            z < x.cell_count(depth)
                && frame.is_none_or(|(s, t)| x.src(depth, z) == s && x.tgt(depth, z) == t)
        });
        labels_ok
            && self.children.iter().enumerate().all(|(i, c)| {
                c.check(x, depth + 1, Some((self.sectors[i], self.sectors[i + 1])))
            })
    }
}

/// Decorated trees of height at most `n` and node width at most `max_width`:
/// the `n`-cells of the free strict ω-category on `x` with those shapes.
pub fn pasting_cells(x: &GlobularSet, n: usize, max_width: usize) -> Result<Vec<DecoratedTree>> {
    if n > x.dim() {
        return Err(Error::Usage(format!(
            "pasting dimension {n} exceeds globular dimension {}",
            x.dim()
        )));
    }
    Ok(decorate(x, n, max_width, 0, None))
}

fn decorate(
    x: &GlobularSet,
    n: usize,
    max_width: usize,
    depth: usize,
    frame: Option<(usize, usize)>,
) -> Vec<DecoratedTree> {
    let candidates: Vec<usize> = (0..x.cell_count(depth))
        .filter(|&z| frame.is_none_or(|(s, t)| x.src(depth, z) == s && x.tgt(depth, z) == t))
        .collect();
    let max_children = if depth < n { max_width } else { 0 };
    let mut out = Vec::new();
    for m in 0..=max_children {
        for sectors in (0..=m).map(|_| candidates.iter().copied()).multi_cartesian_product() {
            let child_options: Vec<Vec<DecoratedTree>> = (0..m)
                .map(|i| decorate(x, n, max_width, depth + 1, Some((sectors[i], sectors[i + 1]))))
                .collect();
            if m == 0 {
                out.push(DecoratedTree {
                    sectors: sectors.clone(),
                    children: Vec::new(),
                });
                continue;
            }
            for children in child_options.into_iter().map(Vec::into_iter).multi_cartesian_product() {
                out.push(DecoratedTree {
                    sectors: sectors.clone(),
                    children,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_tree() -> impl Strategy<Value = Tree> {
        let leaf = Just(Tree::leaf());
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop::collection::vec(inner, 0..4).prop_map(Tree::node)
        })
    }

    #[test]
    fn height_examples() {
        assert_eq!(Tree::leaf().height(), 0);
        assert_eq!(Tree::node(vec![Tree::leaf(); 3]).height(), 1);
        assert_eq!(Tree::chain(2).height(), 2);
    }

    #[test]
    fn truncate_examples() {
        let t = Tree::parse("((())(()()))").unwrap();
        assert_eq!(t.truncate(t.height()), t);
        assert_eq!(t.truncate(0), Tree::leaf());
        assert_eq!(Tree::chain(2).truncate(1), Tree::chain(1));
    }

    #[test]
    fn parse_and_serialize() {
        assert_eq!(Tree::leaf().serialize(), "()");
        assert_eq!(Tree::parse("(()())").unwrap().children().len(), 2);
        assert!(Tree::parse("(()").is_err());
        assert!(Tree::parse("())").is_err());
        assert!(Tree::parse("()()").is_err());
        assert!(Tree::parse("").is_err());
        assert!(Tree::parse("(x)").is_err());
    }

    // Brute force over balanced strings, independent of the level-by-level
    // construction in `enumerate_trees`.
    fn brute_force_count(max_height: usize, max_width: usize, max_nodes: usize) -> usize {
        let mut count = 0;
        for nodes in 1..=max_nodes {
            for bits in 0u64..(1 << (2 * nodes)) {
                let s: String = (0..2 * nodes)
                    .map(|i| if bits >> i & 1 == 1 { '(' } else { ')' })
                    .collect();
                if let Ok(t) = Tree::parse(&s) {
                    if t.height() <= max_height && t.width() <= max_width {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_trees(0, 5), vec![Tree::leaf()]);
        assert_eq!(enumerate_trees(1, 3).len(), 4);
        assert_eq!(brute_force_count(1, 3, 4), 4);
        // 1 + 3 + 3^2 trees; the largest has 7 nodes.
        assert_eq!(brute_force_count(2, 2, 7), 13);
        assert_eq!(enumerate_trees(2, 2).len(), 13);
    }

    #[test]
    fn enumeration_is_duplicate_free_and_truncation_closed() {
        for (h, w) in [(2, 2), (3, 2), (2, 3)] {
            let trees = enumerate_trees(h, w);
            let mut keys: Vec<String> = trees.iter().map(Tree::serialize).collect();
            let n = keys.len();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), n);
            for t in &trees {
                for k in 0..=h {
                    assert!(trees.contains(&t.truncate(k)));
                }
            }
        }
    }

    #[test]
    fn terminal_decorations_match_shapes() {
        let x = GlobularSet::terminal(2);
        let cells = pasting_cells(&x, 2, 2).unwrap();
        let shapes: Vec<Tree> = cells.iter().map(DecoratedTree::shape).collect();
        let mut expected = enumerate_trees(2, 2);
        let mut got = shapes.clone();
        expected.sort();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn loop_decorations_are_paths() {
        let x = GlobularSet::parse("dim 1\ncells 0 a\ncell 1 f : a -> a").unwrap();
        assert_eq!(pasting_cells(&x, 1, 3).unwrap().len(), 4);
    }

    #[test]
    fn decorations_respect_endpoints() {
        let x = GlobularSet::parse("dim 1\ncells 0 a b c\ncell 1 f : a -> b\ncell 1 h : b -> c").unwrap();
        let cells = pasting_cells(&x, 1, 2).unwrap();
        let f = x.find(1, "f").unwrap();
        let h = x.find(1, "h").unwrap();
        let words: Vec<Vec<usize>> = cells.iter().map(|c| c.labels_at(1)).collect();
        assert!(words.contains(&vec![f, h]));
        assert!(!words.contains(&vec![h, f]));
        // three points, two edges, one chain of length two
        assert_eq!(cells.len(), 6);
        assert!(cells.iter().all(|c| c.is_compatible(&x)));
    }

    proptest! {
        #[test]
        fn truncation_composes(t in arb_tree(), j in 0usize..5, k in 0usize..5) {
            prop_assert_eq!(t.truncate(j).truncate(k), t.truncate(j.min(k)));
            prop_assert!(t.truncate(k).height() <= k);
            prop_assert_eq!(t.truncate(k) == t, t.height() <= k);
        }

        #[test]
        fn serialization_round_trips(t in arb_tree()) {
            prop_assert_eq!(Tree::parse(&t.serialize()).unwrap(), t);
        }
    }
}
