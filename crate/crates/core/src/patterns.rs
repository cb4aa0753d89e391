//! Tree patterns matched against imbalance-labeled trees.
//!
//! A pattern is a labeled binary tree where a child may be absent; an absent
//! child matches anything. Patterns occur anchored at any node of the
//! labeled tree. Infinite families such as "a node whose label is outside
//! `{-1, 0, 1}`" are written with a [`LabelSpec`] instead of a fixed label.
//!
//! Text syntax, used by [`TreePattern::from_str`] and [`PatternSet::from_str`]:
//!
//! ```text
//! pattern := "(" label [ "L:" pattern ] [ "R:" pattern ] ")"
//! label   := int | "*" | "!" int | "!{" int ("," int)* "}"
//! set     := keyword | pattern (";" pattern)*
//! keyword := pmax | pmin | balanced | perfect | right-comb | empty
//! ```
//!
//! ```
//! use avl_tamari::patterns::{avoids, PatternSet};
//! use avl_tamari::Tree;
//!
//! let pmax: PatternSet = "pmax".parse().unwrap();
//! assert_eq!(pmax.to_string(), "(-1 L:(-1));(-1 L:(0))");
//! assert!(avoids(&Tree::right_comb(1), &pmax));
//! ```

use std::fmt;
use std::str::FromStr;

use crate::binary_tree::{all_balanced_trees, LabeledTree, PackedTree, Tree};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LabelSpec {
    Exactly(i64),
    NotIn(Vec<i64>),
    Any,
}

impl LabelSpec {
    pub fn matches(&self, label: i64) -> bool {
        match self {
            LabelSpec::Exactly(v) => *v == label,
            LabelSpec::NotIn(vs) => !vs.contains(&label),
            LabelSpec::Any => true,
        }
    }
}

impl fmt::Display for LabelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelSpec::Exactly(v) => write!(f, "{v}"),
            LabelSpec::Any => f.write_str("*"),
            LabelSpec::NotIn(vs) if vs.len() == 1 => write!(f, "!{}", vs[0]),
            LabelSpec::NotIn(vs) => {
                let parts: Vec<String> = vs.iter().map(i64::to_string).collect();
                write!(f, "!{{{}}}", parts.join(","))
            }
        }
    }
}

/// A nonempty, possibly incomplete, labeled binary tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreePattern {
    pub label: LabelSpec,
    pub left: Option<Box<TreePattern>>,
    pub right: Option<Box<TreePattern>>,
}

impl TreePattern {
    pub fn node(label: i64) -> TreePattern {
        TreePattern::spec(LabelSpec::Exactly(label))
    }

    pub fn spec(label: LabelSpec) -> TreePattern {
        TreePattern { label, left: None, right: None }
    }

    pub fn with_left(mut self, child: TreePattern) -> TreePattern {
        self.left = Some(Box::new(child));
        self
    }

    pub fn with_right(mut self, child: TreePattern) -> TreePattern {
        self.right = Some(Box::new(child));
        self
    }

    pub fn size(&self) -> usize {
        1 + self.left.as_ref().map_or(0, |p| p.size()) + self.right.as_ref().map_or(0, |p| p.size())
    }

    /// Whether every label is a single integer.
    pub fn is_concrete(&self) -> bool {
        matches!(self.label, LabelSpec::Exactly(_))
            && self.left.as_ref().is_none_or(|p| p.is_concrete())
            && self.right.as_ref().is_none_or(|p| p.is_concrete())
    }

    /// Whether `other` has the same shape and each of its labels is accepted
    /// here. For a concrete `other` this is membership in the family.
    pub fn covers(&self, other: &TreePattern) -> bool {
        let label_ok = match other.label {
            LabelSpec::Exactly(v) => self.label.matches(v),
            _ => self.label == other.label,
        };
        fn child(a: &Option<Box<TreePattern>>, b: &Option<Box<TreePattern>>) -> bool {
            match (a, b) {
                (None, None) => true,
                (Some(a), Some(b)) => a.covers(b),
                _ => false,
            }
        }
        label_ok && child(&self.left, &other.left) && child(&self.right, &other.right)
    }

    fn matches_at(&self, t: &LabeledTree) -> bool {
        let LabeledTree::Node { label, left, right } = t else {
            return false;
        };
        self.label.matches(*label)
            && self.left.as_ref().is_none_or(|p| p.matches_at(left))
            && self.right.as_ref().is_none_or(|p| p.matches_at(right))
    }
}

impl fmt::Display for TreePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        if let Some(l) = &self.left {
            write!(f, " L:{l}")?;
        }
        if let Some(r) = &self.right {
            write!(f, " R:{r}")?;
        }
        f.write_str(")")
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::PatternSyntax { offset: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .char_indices()
            .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+')))
            .count();
        match rest[..len].parse() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => self.err("expected an integer label"),
        }
    }

    fn label(&mut self) -> Result<LabelSpec> {
        if self.eat("*") {
            Ok(LabelSpec::Any)
        } else if self.eat("!") {
            if self.eat("{") {
                let mut vs = vec![self.int()?];
                while self.eat(",") {
                    vs.push(self.int()?);
                }
                self.expect("}")?;
                Ok(LabelSpec::NotIn(vs))
            } else {
                Ok(LabelSpec::NotIn(vec![self.int()?]))
            }
        } else {
            Ok(LabelSpec::Exactly(self.int()?))
        }
    }

    fn pattern(&mut self) -> Result<TreePattern> {
        self.expect("(")?;
        let mut p = TreePattern::spec(self.label()?);
        if self.eat("L:") {
            p.left = Some(Box::new(self.pattern()?));
        }
        if self.eat("R:") {
            p.right = Some(Box::new(self.pattern()?));
        }
        self.expect(")")?;
        Ok(p)
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.text.len() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }
}

impl FromStr for TreePattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<TreePattern> {
        let mut p = Parser { text: s, pos: 0 };
        let out = p.pattern()?;
        p.finish()?;
        Ok(out)
    }
}

/// A finite list of patterns, each possibly standing for a family.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<TreePattern>,
}

impl PatternSet {
    pub fn new(patterns: Vec<TreePattern>) -> PatternSet {
        PatternSet { patterns }
    }

    pub fn empty() -> PatternSet {
        PatternSet::default()
    }

    pub fn patterns(&self) -> &[TreePattern] {
        &self.patterns
    }

    /// Membership of a concrete pattern in the family.
    pub fn contains(&self, p: &TreePattern) -> bool {
        p.is_concrete() && self.patterns.iter().any(|q| q.covers(p))
    }

    /// Nodes labeled outside `{-1, 0, 1}`: avoided exactly by balanced trees.
    pub fn balanced() -> PatternSet {
        PatternSet::new(vec![TreePattern::spec(LabelSpec::NotIn(vec![-1, 0, 1]))])
    }

    /// Nodes labeled anything but `0`: avoided exactly by perfect trees.
    pub fn perfect() -> PatternSet {
        PatternSet::new(vec![TreePattern::spec(LabelSpec::NotIn(vec![0]))])
    }

    /// Any node with a left child: avoided exactly by right combs.
    pub fn right_comb() -> PatternSet {
        PatternSet::new(vec![TreePattern::spec(LabelSpec::Any).with_left(TreePattern::spec(LabelSpec::Any))])
    }

    /// A `-1` node whose left child is labeled `-1` or `0`.
    pub fn p_max() -> PatternSet {
        PatternSet::new(vec![
            TreePattern::node(-1).with_left(TreePattern::node(-1)),
            TreePattern::node(-1).with_left(TreePattern::node(0)),
        ])
    }

    /// A `1` node whose right child is labeled `1` or `0`.
    pub fn p_min() -> PatternSet {
        PatternSet::new(vec![
            TreePattern::node(1).with_right(TreePattern::node(1)),
            TreePattern::node(1).with_right(TreePattern::node(0)),
        ])
    }
}

impl fmt::Display for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.patterns.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for PatternSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<PatternSet> {
        match s.trim() {
            "pmax" => return Ok(PatternSet::p_max()),
            "pmin" => return Ok(PatternSet::p_min()),
            "balanced" => return Ok(PatternSet::balanced()),
            "perfect" => return Ok(PatternSet::perfect()),
            "right-comb" => return Ok(PatternSet::right_comb()),
            "empty" | "" => return Ok(PatternSet::empty()),
            _ => {}
        }
        let mut p = Parser { text: s, pos: 0 };
        let mut patterns = vec![p.pattern()?];
        while p.eat(";") {
            patterns.push(p.pattern()?);
        }
        p.finish()?;
        Ok(PatternSet::new(patterns))
    }
}

fn occurs_labeled(t: &LabeledTree, p: &TreePattern) -> bool {
    match t {
        LabeledTree::Leaf => false,
        LabeledTree::Node { left, right, .. } => {
            p.matches_at(t) || occurs_labeled(left, p) || occurs_labeled(right, p)
        }
    }
}

/// Whether `p` occurs anchored at some node of the imbalance-labeled `t`.
pub fn occurs(t: &Tree, p: &TreePattern) -> bool {
    occurs_labeled(&t.label_with_imbalance(), p)
}

pub fn avoids(t: &Tree, ps: &PatternSet) -> bool {
    let labeled = t.label_with_imbalance();
    !ps.patterns.iter().any(|p| occurs_labeled(&labeled, p))
}

fn require_balanced(t: &Tree) -> Result<()> {
    if t.is_balanced() {
        Ok(())
    } else {
        Err(Error::NotBalanced)
    }
}

/// A balanced tree is maximal when it avoids [`PatternSet::p_max`].
pub fn is_maximal_balanced(t: &Tree) -> Result<bool> {
    require_balanced(t)?;
    Ok(avoids(t, &PatternSet::p_max()))
}

/// A balanced tree is minimal when it avoids [`PatternSet::p_min`].
pub fn is_minimal_balanced(t: &Tree) -> Result<bool> {
    require_balanced(t)?;
    Ok(avoids(t, &PatternSet::p_min()))
}

/// Maximality from the definition: every right rotation leaves the
/// balanced trees.
pub fn is_maximal_by_rotation(t: &Tree) -> Result<bool> {
    require_balanced(t)?;
    let Ok(p) = PackedTree::from_tree(t) else {
        return Ok(crate::tamari::successors(t).iter().all(|s| !s.is_balanced()));
    };
    Ok(p.right_rotations().iter().all(|(_, q)| !q.is_balanced()))
}

/// Minimality from the definition: every left rotation leaves the balanced
/// trees.
pub fn is_minimal_by_rotation(t: &Tree) -> Result<bool> {
    require_balanced(t)?;
    let Ok(p) = PackedTree::from_tree(t) else {
        return Ok(crate::tamari::left_rotation_sites(t)
            .into_iter()
            .all(|s| !crate::tamari::rotate_left(t, s).expect("listed site").is_balanced()));
    };
    Ok(p.left_rotations().iter().all(|(_, q)| !q.is_balanced()))
}

pub fn maximal_balanced_trees(n: usize) -> Vec<Tree> {
    all_balanced_trees(n)
        .into_iter()
        .filter(|t| avoids(t, &PatternSet::p_max()))
        .collect()
}

pub fn minimal_balanced_trees(n: usize) -> Vec<Tree> {
    all_balanced_trees(n)
        .into_iter()
        .filter(|t| avoids(t, &PatternSet::p_min()))
        .collect()
}
