//! Right rotations and the Tamari order.
//!
//! The order is the reflexive-transitive closure of "one right rotation".
//! Comparisons and interval extraction run a breadth-first search over
//! [`PackedTree`] words, so no closed-form criterion is assumed.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::binary_tree::{all_trees, PackedTree, Tree};
use crate::error::{Error, Result};

/// A node whose left child is internal, so that a right rotation rooted
/// there is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RotationSite {
    /// Infix position of the rotation root.
    pub node: usize,
}

impl RotationSite {
    pub fn new(node: usize) -> RotationSite {
        RotationSite { node }
    }
}

/// Sites of all right rotations of `t`, in infix order.
pub fn rotation_sites(t: &Tree) -> Vec<RotationSite> {
    fn walk(t: &Tree, offset: usize, out: &mut Vec<RotationSite>) {
        if let Tree::Node(l, r) = t {
            let pos = offset + l.nodes() + 1;
            walk(l, offset, out);
            if !l.is_leaf() {
                out.push(RotationSite::new(pos));
            }
            walk(r, pos, out);
        }
    }
    let mut out = Vec::new();
    walk(t, 0, &mut out);
    out
}

/// Nodes whose right child is internal: the roots of the rotations that
/// lead *into* `t`, in infix order.
pub fn left_rotation_sites(t: &Tree) -> Vec<RotationSite> {
    fn walk(t: &Tree, offset: usize, out: &mut Vec<RotationSite>) {
        if let Tree::Node(l, r) = t {
            let pos = offset + l.nodes() + 1;
            walk(l, offset, out);
            if let Tree::Node(rl, _) = &**r {
                // the rotation root is the right child
                out.push(RotationSite::new(pos + rl.nodes() + 1));
            }
            walk(r, pos, out);
        }
    }
    let mut out = Vec::new();
    walk(t, 0, &mut out);
    out
}

/// Replaces the subtree `(A ∧ B) ∧ C` rooted at `site` by `A ∧ (B ∧ C)`.
pub fn rotate(t: &Tree, site: RotationSite) -> Result<Tree> {
    fn go(t: &Tree, pos: usize, site: usize) -> Result<Tree> {
        let (l, r) = t.children().ok_or(Error::InvalidRotationSite(site))?;
        let k = l.nodes();
        if pos == k + 1 {
            match l {
                Tree::Node(a, b) => Ok(Tree::join(
                    (**a).clone(),
                    Tree::join((**b).clone(), r.clone()),
                )),
                Tree::Leaf => Err(Error::InvalidRotationSite(site)),
            }
        } else if pos <= k {
            Ok(Tree::join(go(l, pos, site)?, r.clone()))
        } else {
            Ok(Tree::join(l.clone(), go(r, pos - k - 1, site)?))
        }
    }
    let nodes = t.nodes();
    if site.node == 0 || site.node > nodes {
        return Err(Error::NodeOutOfRange { position: site.node, nodes });
    }
    go(t, site.node, site.node)
}

/// Inverse of [`rotate`]: turns `A ∧ (B ∧ C)` back into `(A ∧ B) ∧ C`,
/// where `site` is the root of `B ∧ C` (the root of the undone rotation).
pub fn rotate_left(t: &Tree, site: RotationSite) -> Result<Tree> {
    fn go(t: &Tree, pos: usize, site: usize) -> Result<Tree> {
        let (l, r) = t.children().ok_or(Error::InvalidLeftRotationSite(site))?;
        let k = l.nodes();
        if let Tree::Node(b, c) = r {
            if pos == k + 1 + b.nodes() + 1 {
                return Ok(Tree::join(Tree::join(l.clone(), (**b).clone()), (**c).clone()));
            }
        }
        if pos == k + 1 {
            Err(Error::InvalidLeftRotationSite(site))
        } else if pos <= k {
            Ok(Tree::join(go(l, pos, site)?, r.clone()))
        } else {
            Ok(Tree::join(l.clone(), go(r, pos - k - 1, site)?))
        }
    }
    let nodes = t.nodes();
    if site.node == 0 || site.node > nodes {
        return Err(Error::NodeOutOfRange { position: site.node, nodes });
    }
    go(t, site.node, site.node)
}

/// All trees reachable from `t` by one right rotation.
pub fn successors(t: &Tree) -> Vec<Tree> {
    rotation_sites(t)
        .into_iter()
        .map(|s| rotate(t, s).expect("site listed by rotation_sites"))
        .collect()
}

fn packed(t: &Tree) -> Result<PackedTree> {
    PackedTree::from_tree(t)
}

fn check_sizes(t0: &Tree, t1: &Tree) -> Result<()> {
    let (a, b) = (t0.nodes(), t1.nodes());
    if a != b {
        return Err(Error::SizeMismatch { left: a, right: b });
    }
    Ok(())
}

/// Everything reachable from `start` by right rotations, `start` included.
pub(crate) fn up_set(start: PackedTree) -> HashSet<PackedTree> {
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for (_, s) in t.right_rotations() {
            if seen.insert(s) {
                queue.push_back(s);
            }
        }
    }
    seen
}

/// Elements of the up-set of the interval's lower end that lie below `upper`.
///
/// Walks left rotations backwards from `upper` and never leaves `within`;
/// every tree between the two ends is reached because every chain from it
/// to `upper` stays above the lower end.
pub(crate) fn down_set_within(
    upper: PackedTree,
    within: &HashSet<PackedTree>,
) -> HashSet<PackedTree> {
    let mut seen = HashSet::from([upper]);
    let mut queue = VecDeque::from([upper]);
    while let Some(t) = queue.pop_front() {
        for (_, s) in t.left_rotations() {
            if within.contains(&s) && seen.insert(s) {
                queue.push_back(s);
            }
        }
    }
    seen
}

/// `t0 ≼ t1` in the Tamari order.
pub fn tamari_le(t0: &Tree, t1: &Tree) -> Result<bool> {
    check_sizes(t0, t1)?;
    let (start, goal) = (packed(t0)?, packed(t1)?);
    if start == goal {
        return Ok(true);
    }
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for (_, s) in t.right_rotations() {
            if s == goal {
                return Ok(true);
            }
            if seen.insert(s) {
                queue.push_back(s);
            }
        }
    }
    Ok(false)
}

/// How posets are labeled in DOT output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DotLabels {
    /// Each vertex is labeled with its tree's canonical JSON.
    #[default]
    Json,
    /// Each vertex is labeled with its index; see [`TreePoset::index_table`].
    Index,
}

/// A finite poset of same-size trees given by its cover relation.
///
/// Elements are sorted by canonical JSON, so indices are stable. A cover
/// `(i, j)` means element `j` is obtained from element `i` by one rotation.
#[derive(Clone, Debug)]
pub struct TreePoset {
    elements: Vec<Tree>,
    covers: Vec<(usize, usize)>,
    index: HashMap<PackedTree, usize>,
}

/// The Tamari lattice on trees of a fixed size.
pub type TamariPoset = TreePoset;

impl TreePoset {
    /// Builds the poset on `members`, keeping the right rotations accepted
    /// by `keep` that stay inside the member set.
    pub(crate) fn from_packed<F>(mut members: Vec<PackedTree>, keep: F) -> TreePoset
    where
        F: Fn(PackedTree, usize, PackedTree) -> bool + Sync,
    {
        members.sort_unstable();
        members.dedup();
        let mut keyed: Vec<(String, PackedTree, Tree)> = members
            .par_iter()
            .map(|&p| {
                let t = p.to_tree();
                (t.to_json(), p, t)
            })
            .collect();
        keyed.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let index: HashMap<PackedTree, usize> =
            keyed.iter().enumerate().map(|(i, (_, p, _))| (*p, i)).collect();
        let covers: Vec<(usize, usize)> = keyed
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, (_, p, _))| {
                let mut out: Vec<(usize, usize)> = p
                    .right_rotations()
                    .into_iter()
                    .filter(|&(pos, q)| keep(*p, pos, q))
                    .filter_map(|(_, q)| index.get(&q).map(|&j| (i, j)))
                    .collect();
                out.sort_unstable();
                out
            })
            .collect();
        let elements = keyed.into_iter().map(|(_, _, t)| t).collect();
        TreePoset { elements, covers, index }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Tree] {
        &self.elements
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn index_of(&self, t: &Tree) -> Option<usize> {
        PackedTree::from_tree(t).ok().and_then(|p| self.index.get(&p).copied())
    }

    pub fn contains(&self, t: &Tree) -> bool {
        self.index_of(t).is_some()
    }

    /// Adjacency lists of the cover digraph.
    pub fn upper_covers(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(i, j) in &self.covers {
            adj[i].push(j);
        }
        adj
    }

    pub fn lower_covers(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(i, j) in &self.covers {
            adj[j].push(i);
        }
        adj
    }

    /// Elements covering nothing.
    pub fn minimal_elements(&self) -> Vec<usize> {
        let lower = self.lower_covers();
        (0..self.len()).filter(|&i| lower[i].is_empty()).collect()
    }

    /// Elements covered by nothing.
    pub fn maximal_elements(&self) -> Vec<usize> {
        let upper = self.upper_covers();
        (0..self.len()).filter(|&i| upper[i].is_empty()).collect()
    }

    /// A linear extension of the cover relation, or `None` if it has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let upper = self.upper_covers();
        let mut indegree = vec![0usize; self.len()];
        for &(_, j) in &self.covers {
            indegree[j] += 1;
        }
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &j in &upper[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        (order.len() == self.len()).then_some(order)
    }

    /// Up-sets of every element as bitsets (`reach[i]` has bit `j` iff `i ≼ j`).
    ///
    /// Panics if the cover relation has a cycle.
    pub fn up_sets(&self) -> Vec<Vec<u64>> {
        let words = self.len().div_ceil(64);
        let order = self.topological_order().expect("cover relation is acyclic");
        let upper = self.upper_covers();
        let mut reach = vec![vec![0u64; words]; self.len()];
        for &i in order.iter().rev() {
            let mut set = vec![0u64; words];
            set[i / 64] |= 1 << (i % 64);
            for &j in &upper[i] {
                for (w, r) in set.iter_mut().zip(&reach[j]) {
                    *w |= r;
                }
            }
            reach[i] = set;
        }
        reach
    }

    /// Connected components of the undirected cover graph, each sorted,
    /// ordered by smallest element.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for &(i, j) in &self.covers {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..self.len() {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Graphviz rendering; edges point from smaller to larger elements.
    pub fn to_dot(&self, name: &str, labels: DotLabels) -> String {
        let mut out = String::new();
        writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
        writeln!(out, "  rankdir=BT;").unwrap();
        for (i, t) in self.elements.iter().enumerate() {
            let label = match labels {
                DotLabels::Json => escape(&t.to_json()),
                DotLabels::Index => i.to_string(),
            };
            writeln!(out, "  n{i} [label=\"{label}\"];").unwrap();
        }
        for &(i, j) in &self.covers {
            writeln!(out, "  n{i} -> n{j};").unwrap();
        }
        out.push_str("}\n");
        out
    }

    /// Sidecar table for [`DotLabels::Index`]: `index<TAB>json` per line.
    pub fn index_table(&self) -> String {
        self.elements
            .iter()
            .enumerate()
            .map(|(i, t)| format!("{i}\t{}\n", t.to_json()))
            .collect()
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The Tamari lattice on trees with `n` nodes.
pub fn build_poset(n: usize) -> Result<TamariPoset> {
    if n > PackedTree::MAX_NODES {
        return Err(Error::TooLarge { what: "node count", value: n, bound: PackedTree::MAX_NODES });
    }
    let members = all_trees(n)
        .iter()
        .map(|t| PackedTree::from_tree(t).expect("size checked"))
        .collect();
    Ok(TreePoset::from_packed(members, |_, _, _| true))
}

/// The interval `[lower, upper]` of the Tamari order with its covers.
#[derive(Clone, Debug)]
pub struct Interval {
    pub lower: Tree,
    pub upper: Tree,
    pub poset: TreePoset,
}

impl Interval {
    pub fn elements(&self) -> &[Tree] {
        self.poset.elements()
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        self.poset.covers()
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }
}

/// All trees `t` with `t0 ≼ t ≼ t1`, computed as the up-set of `t0`
/// intersected with the down-set of `t1`.
pub fn interval(t0: &Tree, t1: &Tree) -> Result<Interval> {
    check_sizes(t0, t1)?;
    let (lo, hi) = (packed(t0)?, packed(t1)?);
    let up = up_set(lo);
    if !up.contains(&hi) {
        return Err(Error::NotComparable);
    }
    Ok(interval_from_up_set(lo, hi, &up))
}

/// Same as [`interval`], reusing an up-set of `lo` that contains `hi`.
pub(crate) fn interval_from_up_set(
    lo: PackedTree,
    hi: PackedTree,
    up: &HashSet<PackedTree>,
) -> Interval {
    let members: Vec<PackedTree> = down_set_within(hi, up).into_iter().collect();
    Interval {
        lower: lo.to_tree(),
        upper: hi.to_tree(),
        poset: TreePoset::from_packed(members, |_, _, _| true),
    }
}
