//! Complete rooted planar binary trees.
//!
//! A [`Tree`] is either a leaf or an internal node with exactly two children.
//! Internal nodes are addressed by their 1-based position in the infix
//! (left, root, right) visit order. Right rotations never change that order,
//! so a position names the same node everywhere in a Tamari lattice.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde_json::Value;

use crate::error::{Error, Result};

/// A complete rooted planar binary tree.
///
/// Subtrees are reference counted, so cloning is cheap and trees can be
/// shared between threads.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Tree {
    #[default]
    Leaf,
    Node(Arc<Tree>, Arc<Tree>),
}

impl Tree {
    pub fn leaf() -> Tree {
        Tree::Leaf
    }

    /// The tree `left ∧ right`.
    pub fn join(left: Tree, right: Tree) -> Tree {
        Tree::Node(Arc::new(left), Arc::new(right))
    }

    /// The tree with a single internal node.
    pub fn single() -> Tree {
        Tree::join(Tree::Leaf, Tree::Leaf)
    }

    /// Every internal node is the left child of its parent.
    pub fn left_comb(nodes: usize) -> Tree {
        (0..nodes).fold(Tree::Leaf, |acc, _| Tree::join(acc, Tree::Leaf))
    }

    /// Every internal node is the right child of its parent.
    pub fn right_comb(nodes: usize) -> Tree {
        (0..nodes).fold(Tree::Leaf, |acc, _| Tree::join(Tree::Leaf, acc))
    }

    /// The perfect tree of the given height (`2^height - 1` nodes).
    pub fn perfect(height: usize) -> Tree {
        (0..height).fold(Tree::Leaf, |acc, _| Tree::join(acc.clone(), acc))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf)
    }

    pub fn children(&self) -> Option<(&Tree, &Tree)> {
        match self {
            Tree::Leaf => None,
            Tree::Node(l, r) => Some((l, r)),
        }
    }

    pub fn left(&self) -> Option<&Tree> {
        self.children().map(|(l, _)| l)
    }

    pub fn right(&self) -> Option<&Tree> {
        self.children().map(|(_, r)| r)
    }

    /// Number of internal nodes.
    pub fn nodes(&self) -> usize {
        match self {
            Tree::Leaf => 0,
            Tree::Node(l, r) => l.nodes() + r.nodes() + 1,
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Node(l, r) => l.leaves() + r.leaves(),
        }
    }

    /// Length of the longest root-to-leaf path; a leaf has height 0.
    pub fn height(&self) -> usize {
        match self {
            Tree::Leaf => 0,
            Tree::Node(l, r) => 1 + l.height().max(r.height()),
        }
    }

    /// The subtree rooted at the node with the given infix position.
    pub fn subtree(&self, position: usize) -> Result<&Tree> {
        let nodes = self.nodes();
        if position == 0 || position > nodes {
            return Err(Error::NodeOutOfRange { position, nodes });
        }
        let mut current = self;
        let mut pos = position;
        loop {
            let (l, r) = current.children().expect("position checked against size");
            let k = l.nodes();
            match pos.cmp(&(k + 1)) {
                Ordering::Equal => return Ok(current),
                Ordering::Less => current = l,
                Ordering::Greater => {
                    pos -= k + 1;
                    current = r;
                }
            }
        }
    }

    /// `ht(right) - ht(left)` at the node with the given infix position.
    pub fn imbalance(&self, position: usize) -> Result<i64> {
        let (l, r) = self.subtree(position)?.children().expect("subtree at a node");
        Ok(r.height() as i64 - l.height() as i64)
    }

    /// Imbalance values of all internal nodes, in infix order.
    pub fn imbalances(&self) -> Vec<i64> {
        fn walk(t: &Tree, out: &mut Vec<i64>) -> usize {
            match t {
                Tree::Leaf => 0,
                Tree::Node(l, r) => {
                    let hl = walk(l, out);
                    let at = out.len();
                    out.push(0);
                    let hr = walk(r, out);
                    out[at] = hr as i64 - hl as i64;
                    1 + hl.max(hr)
                }
            }
        }
        let mut out = Vec::with_capacity(self.nodes());
        walk(self, &mut out);
        out
    }

    /// Heights of the subtrees rooted at each internal node, in infix order.
    pub fn subtree_heights(&self) -> Vec<usize> {
        fn walk(t: &Tree, out: &mut Vec<usize>) -> usize {
            match t {
                Tree::Leaf => 0,
                Tree::Node(l, r) => {
                    let hl = walk(l, out);
                    let at = out.len();
                    out.push(0);
                    let hr = walk(r, out);
                    out[at] = 1 + hl.max(hr);
                    out[at]
                }
            }
        }
        let mut out = Vec::with_capacity(self.nodes());
        walk(self, &mut out);
        out
    }

    /// Every internal node has imbalance in `{-1, 0, 1}`.
    pub fn is_balanced(&self) -> bool {
        fn check(t: &Tree) -> Option<usize> {
            match t {
                Tree::Leaf => Some(0),
                Tree::Node(l, r) => {
                    let hl = check(l)?;
                    let hr = check(r)?;
                    (hl.abs_diff(hr) <= 1).then_some(1 + hl.max(hr))
                }
            }
        }
        check(self).is_some()
    }

    /// Every internal node has imbalance 0.
    pub fn is_perfect(&self) -> bool {
        self.imbalances().iter().all(|&g| g == 0)
    }

    pub fn label_with_imbalance(&self) -> LabeledTree {
        match self {
            Tree::Leaf => LabeledTree::Leaf,
            Tree::Node(l, r) => LabeledTree::Node {
                label: r.height() as i64 - l.height() as i64,
                left: Box::new(l.label_with_imbalance()),
                right: Box::new(r.label_with_imbalance()),
            },
        }
    }

    /// Canonical JSON: a leaf is `null`, a node is `{"l":<tree>,"r":<tree>}`.
    pub fn to_json(&self) -> String {
        fn write(t: &Tree, out: &mut String) {
            match t {
                Tree::Leaf => out.push_str("null"),
                Tree::Node(l, r) => {
                    out.push_str("{\"l\":");
                    write(l, out);
                    out.push_str(",\"r\":");
                    write(r, out);
                    out.push('}');
                }
            }
        }
        let mut out = String::new();
        write(self, &mut out);
        out
    }

    /// Parses the JSON tree format. Whitespace is tolerated; anything other
    /// than `null` or an object with exactly the keys `l` and `r` is rejected.
    pub fn from_json(text: &str) -> Result<Tree> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::MalformedTree(e.to_string()))?;
        Tree::from_value(&value)
    }

    fn from_value(value: &Value) -> Result<Tree> {
        match value {
            Value::Null => Ok(Tree::Leaf),
            Value::Object(map) => {
                if map.len() != 2 {
                    return Err(Error::MalformedTree(format!(
                        "node must have exactly the keys \"l\" and \"r\", found {} keys",
                        map.len()
                    )));
                }
                let child = |key: &str| {
                    map.get(key)
                        .ok_or_else(|| Error::MalformedTree(format!("missing key \"{key}\"")))
                        .and_then(Tree::from_value)
                };
                Ok(Tree::join(child("l")?, child("r")?))
            }
            other => Err(Error::MalformedTree(format!("unexpected value {other}"))),
        }
    }

    /// Compares two trees in the enumeration order of [`all_trees`]:
    /// by size, then left size, then left subtree, then right subtree.
    pub fn generation_cmp(&self, other: &Tree) -> Ordering {
        match (self, other) {
            (Tree::Leaf, Tree::Leaf) => Ordering::Equal,
            (Tree::Leaf, _) => Ordering::Less,
            (_, Tree::Leaf) => Ordering::Greater,
            (Tree::Node(l1, r1), Tree::Node(l2, r2)) => self
                .nodes()
                .cmp(&other.nodes())
                .then_with(|| l1.nodes().cmp(&l2.nodes()))
                .then_with(|| l1.generation_cmp(l2))
                .then_with(|| r1.generation_cmp(r2)),
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn brackets(t: &Tree, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Tree::Leaf => f.write_str("."),
                Tree::Node(l, r) => {
                    f.write_str("(")?;
                    brackets(l, f)?;
                    brackets(r, f)?;
                    f.write_str(")")
                }
            }
        }
        brackets(self, f)
    }
}

impl FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tree> {
        Tree::from_json(s)
    }
}

/// A tree whose internal nodes carry their imbalance value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LabeledTree {
    Leaf,
    Node {
        label: i64,
        left: Box<LabeledTree>,
        right: Box<LabeledTree>,
    },
}

impl LabeledTree {
    /// The underlying unlabeled tree.
    pub fn shape(&self) -> Tree {
        match self {
            LabeledTree::Leaf => Tree::Leaf,
            LabeledTree::Node { left, right, .. } => Tree::join(left.shape(), right.shape()),
        }
    }

    pub fn label(&self) -> Option<i64> {
        match self {
            LabeledTree::Leaf => None,
            LabeledTree::Node { label, .. } => Some(*label),
        }
    }

    /// Labels in infix order.
    pub fn labels(&self) -> Vec<i64> {
        fn walk(t: &LabeledTree, out: &mut Vec<i64>) {
            if let LabeledTree::Node { label, left, right } = t {
                walk(left, out);
                out.push(*label);
                walk(right, out);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

/// Number of trees with `n` internal nodes.
pub fn catalan(n: usize) -> u128 {
    // C(2n, n) / (n + 1), built incrementally to stay exact.
    (0..n as u128).fold(1u128, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

/// All trees with `n` internal nodes, ordered by left-subtree size and then
/// recursively by left and right subtree.
pub fn all_trees(n: usize) -> Vec<Tree> {
    let mut table: Vec<Vec<Tree>> = vec![vec![Tree::Leaf]];
    for size in 1..=n {
        let mut level = Vec::new();
        for k in 0..size {
            for l in &table[k] {
                for r in &table[size - 1 - k] {
                    level.push(Tree::join(l.clone(), r.clone()));
                }
            }
        }
        table.push(level);
    }
    table.swap_remove(n)
}

/// Calls `f` on every tree with `n` internal nodes, in the order of
/// [`all_trees`], without holding them all in memory.
pub fn for_each_tree(n: usize, mut f: impl FnMut(Tree)) {
    fn visit(n: usize, f: &mut dyn FnMut(Tree)) {
        if n == 0 {
            return f(Tree::Leaf);
        }
        for k in 0..n {
            visit(k, &mut |l: Tree| visit(n - 1 - k, &mut |r: Tree| f(Tree::join(l.clone(), r))));
        }
    }
    visit(n, &mut f);
}

/// All balanced trees with `n` internal nodes, in the order of [`all_trees`].
///
/// Built from pairs of balanced subtrees whose heights differ by at most one,
/// so the cost is proportional to the output rather than to `catalan(n)`.
pub fn all_balanced_trees(n: usize) -> Vec<Tree> {
    let mut table: Vec<Vec<(Tree, usize)>> = vec![vec![(Tree::Leaf, 0)]];
    for size in 1..=n {
        let mut level = Vec::new();
        for k in 0..size {
            for (l, hl) in &table[k] {
                for (r, hr) in &table[size - 1 - k] {
                    if hl.abs_diff(*hr) <= 1 {
                        level.push((Tree::join(l.clone(), r.clone()), 1 + hl.max(hr)));
                    }
                }
            }
        }
        table.push(level);
    }
    table.swap_remove(n).into_iter().map(|(t, _)| t).collect()
}

/// A tree with at most [`PackedTree::MAX_NODES`] nodes packed into a `u64`.
///
/// The preorder word of the tree (1 for an internal node, 0 for a leaf) is
/// stored in the low bits behind a leading sentinel 1. Rotations act on the
/// word directly, which makes lattice traversals allocation free.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PackedTree(u64);

impl PackedTree {
    pub const MAX_NODES: usize = 31;

    pub fn from_tree(t: &Tree) -> Result<PackedTree> {
        let nodes = t.nodes();
        if nodes > Self::MAX_NODES {
            return Err(Error::TooLarge { what: "tree size", value: nodes, bound: Self::MAX_NODES });
        }
        fn push(t: &Tree, bits: &mut u64) {
            match t {
                Tree::Leaf => *bits <<= 1,
                Tree::Node(l, r) => {
                    *bits = (*bits << 1) | 1;
                    push(l, bits);
                    push(r, bits);
                }
            }
        }
        let mut bits = 1u64;
        push(t, &mut bits);
        Ok(PackedTree(bits))
    }

    pub fn to_tree(self) -> Tree {
        fn build(word: &[bool], at: &mut usize) -> Tree {
            let internal = word[*at];
            *at += 1;
            if internal {
                let l = build(word, at);
                let r = build(word, at);
                Tree::join(l, r)
            } else {
                Tree::Leaf
            }
        }
        let word = self.word();
        build(&word, &mut 0)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    fn len(self) -> usize {
        63 - self.0.leading_zeros() as usize
    }

    pub fn nodes(self) -> usize {
        (self.len() - 1) / 2
    }

    #[inline]
    fn symbol(self, i: usize) -> bool {
        (self.0 >> (self.len() - 1 - i)) & 1 == 1
    }

    fn word(self) -> Vec<bool> {
        (0..self.len()).map(|i| self.symbol(i)).collect()
    }

    /// For each preorder index, the index of the last symbol of the subtree
    /// starting there.
    fn subtree_ends(self) -> Vec<usize> {
        let len = self.len();
        let mut end = vec![0usize; len];
        for i in (0..len).rev() {
            end[i] = if self.symbol(i) { end[end[i + 1] + 1] } else { i };
        }
        end
    }

    #[inline]
    fn rotate_segment_left(self, from: usize, to: usize) -> PackedTree {
        // Segment [from, to] starts with a 1 that moves to its end.
        let shift = self.len() - 1 - to;
        let width = to - from + 1;
        let mask = (1u64 << width) - 1;
        let seg = (self.0 >> shift) & mask;
        let rotated = ((seg << 1) & mask) | 1;
        PackedTree((self.0 & !(mask << shift)) | (rotated << shift))
    }

    #[inline]
    fn rotate_segment_right(self, from: usize, to: usize) -> PackedTree {
        // Segment [from, to] ends with a 1 that moves to its start.
        let shift = self.len() - 1 - to;
        let width = to - from + 1;
        let mask = (1u64 << width) - 1;
        let seg = (self.0 >> shift) & mask;
        let rotated = (seg >> 1) | (1 << (width - 1));
        PackedTree((self.0 & !(mask << shift)) | (rotated << shift))
    }

    /// Trees reachable by one right rotation, each paired with the infix
    /// position of the rotation root.
    pub fn right_rotations(self) -> Vec<(usize, PackedTree)> {
        let end = self.subtree_ends();
        let len = self.len();
        let mut zeros_before = vec![0usize; len + 1];
        for i in 0..len {
            zeros_before[i + 1] = zeros_before[i] + usize::from(!self.symbol(i));
        }
        let mut out = Vec::new();
        for p in 0..len.saturating_sub(1) {
            if self.symbol(p) && self.symbol(p + 1) {
                let a_end = end[p + 2];
                let position = zeros_before[end[p + 1] + 1];
                out.push((position, self.rotate_segment_left(p + 1, a_end)));
            }
        }
        out
    }

    /// Trees from which this one is reached by a single right rotation, with
    /// the infix position of that rotation's root.
    pub fn left_rotations(self) -> Vec<(usize, PackedTree)> {
        let end = self.subtree_ends();
        let len = self.len();
        let mut zeros_before = vec![0usize; len + 1];
        for i in 0..len {
            zeros_before[i + 1] = zeros_before[i] + usize::from(!self.symbol(i));
        }
        let mut out = Vec::new();
        for p in 0..len {
            if self.symbol(p) {
                let a_end = end[p + 1];
                let y = a_end + 1;
                if self.symbol(y) {
                    // The old root y is the right child; its position is
                    // one past the leaves of x's left part and y's left part.
                    let position = zeros_before[end[y + 1] + 1];
                    out.push((position, self.rotate_segment_right(p + 1, y)));
                }
            }
        }
        out
    }

    pub fn is_balanced(self) -> bool {
        let mut stack: Vec<u32> = Vec::with_capacity(self.len());
        for i in (0..self.len()).rev() {
            if self.symbol(i) {
                let hl = stack.pop().expect("well formed");
                let hr = stack.pop().expect("well formed");
                if hl.abs_diff(hr) > 1 {
                    return false;
                }
                stack.push(1 + hl.max(hr));
            } else {
                stack.push(0);
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streaming_matches_collected() {
        for n in 0..=7 {
            let mut streamed = Vec::new();
            for_each_tree(n, |t| streamed.push(t));
            assert_eq!(streamed, all_trees(n));
        }
    }

    fn two_left() -> Tree {
        Tree::join(Tree::single(), Tree::Leaf)
    }

    #[test]
    fn join_and_height() {
        assert_eq!(Tree::single().height(), 1);
        assert_eq!(two_left().height(), 2);
        assert_eq!(two_left().nodes(), 2);
        assert_eq!(Tree::Leaf.height(), 0);
        assert_eq!(Tree::left_comb(3).height(), 3);

        let a = Tree::left_comb(3);
        let b = Tree::perfect(2);
        let j = Tree::join(a.clone(), b.clone());
        assert_eq!(j.height(), 4);
        assert_eq!(j.nodes(), a.nodes() + b.nodes() + 1);
    }

    #[test]
    fn imbalance_examples() {
        assert_eq!(Tree::single().imbalance(1), Ok(0));
        assert_eq!(Tree::join(Tree::Leaf, Tree::single()).imbalance(1), Ok(1));
        let t = Tree::join(Tree::perfect(2), Tree::Leaf);
        assert_eq!(t.imbalance(4), Ok(-2));
        assert_eq!(
            Tree::single().imbalance(2),
            Err(Error::NodeOutOfRange { position: 2, nodes: 1 })
        );
        assert!(Tree::Leaf.imbalance(1).is_err());
        assert!(Tree::single().imbalance(0).is_err());
    }

    #[test]
    fn imbalances_match_pointwise() {
        for t in all_trees(6) {
            let all = t.imbalances();
            for (i, g) in all.iter().enumerate() {
                assert_eq!(t.imbalance(i + 1).unwrap(), *g);
            }
        }
    }

    #[test]
    fn balance_examples() {
        assert!(Tree::Leaf.is_balanced());
        assert!(!Tree::left_comb(3).is_balanced());
        assert!(Tree::perfect(3).is_balanced());
        let b3 = all_balanced_trees(3);
        assert_eq!(b3, vec![Tree::perfect(2)]);
    }

    #[test]
    fn labels() {
        assert_eq!(Tree::Leaf.label_with_imbalance(), LabeledTree::Leaf);
        let l = two_left().label_with_imbalance();
        assert_eq!(l.label(), Some(-1));
        assert_eq!(l.labels(), vec![0, -1]);
        let rc = Tree::right_comb(3).label_with_imbalance();
        // infix order of a right comb runs from the root downwards
        assert_eq!(rc.labels(), vec![2, 1, 0]);
        assert_eq!(rc.shape(), Tree::right_comb(3));
    }

    #[test]
    fn json_format() {
        assert_eq!(Tree::Leaf.to_json(), "null");
        assert_eq!(Tree::single().to_json(), r#"{"l":null,"r":null}"#);
        assert_eq!(Tree::from_json(" { \"r\" : null, \"l\": null } "), Ok(Tree::single()));
        for bad in ["", "{}", r#"{"l":null}"#, r#"{"l":null,"r":null,"x":1}"#, "[]", "1", r#"{"l":null,"r":3}"#] {
            assert!(Tree::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn enumeration_order() {
        let t3 = all_trees(3);
        assert_eq!(t3.len(), 5);
        assert_eq!(t3[0], Tree::right_comb(3));
        assert_eq!(t3[4], Tree::left_comb(3));
        for w in t3.windows(2) {
            assert_eq!(w[0].generation_cmp(&w[1]), Ordering::Less);
        }
        assert_eq!(all_trees(0), vec![Tree::Leaf]);
    }

    #[test]
    fn catalan_numbers() {
        let expected = [1u128, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
        for (n, c) in expected.iter().enumerate() {
            assert_eq!(catalan(n), *c);
        }
    }

    #[test]
    fn packed_round_trip_and_rotations() {
        for n in 0..=6 {
            for t in all_trees(n) {
                let p = PackedTree::from_tree(&t).unwrap();
                assert_eq!(p.to_tree(), t);
                assert_eq!(p.nodes(), n);
                assert_eq!(p.is_balanced(), t.is_balanced());
                for (pos, q) in p.right_rotations() {
                    let back = q.left_rotations();
                    assert!(back.contains(&(pos, p)), "{t:?} at {pos}");
                }
            }
        }
    }
}
