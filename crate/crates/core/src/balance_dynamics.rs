//! How rotations interact with balance.
//!
//! A rotation rooted at `y` (with left child `x`) only changes the imbalance
//! values of `x` and `y`. Starting from a balanced tree the nine possible
//! `(γ(x), γ(y))` pairs fall into the classes of [`ROTATION_TABLE`]; only
//! `B1` and `B2` keep the tree balanced. The rest of this module builds the
//! tooling used to show that an unbalancing rotation can never be undone by
//! further right rotations: admissible words, characteristic words and the
//! [`imb_property`] witness, and then the exhaustive closure and hypercube
//! verifiers.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use rayon::prelude::*;

use crate::binary_tree::{all_balanced_trees, PackedTree, Tree};
use crate::error::{Error, Result};
use crate::tamari::{self, Interval, RotationSite, TreePoset};

/// Largest node count accepted by the exhaustive verifiers.
pub const MAX_VERIFY_NODES: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RotationTag {
    B1,
    B2,
    U1,
    U2,
    U3,
    U4,
    U5,
    U6,
    U7,
}

impl fmt::Display for RotationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Imbalance values of the rotation's left child `x` and root `y`, before
/// and after the rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RotationClass {
    pub tag: RotationTag,
    pub before: (i64, i64),
    pub after: (i64, i64),
}

impl RotationClass {
    pub fn is_conservative(&self) -> bool {
        matches!(self.tag, RotationTag::B1 | RotationTag::B2)
    }
}

const fn class(tag: RotationTag, before: (i64, i64), after: (i64, i64)) -> RotationClass {
    RotationClass { tag, before, after }
}

/// The nine rotation classes on a tree balanced at `x` and `y`.
pub const ROTATION_TABLE: [RotationClass; 9] = [
    class(RotationTag::B1, (-1, -1), (1, 1)),
    class(RotationTag::U1, (-1, 0), (2, 2)),
    class(RotationTag::U2, (-1, 1), (3, 3)),
    class(RotationTag::B2, (0, -1), (1, 0)),
    class(RotationTag::U3, (0, 0), (2, 1)),
    class(RotationTag::U4, (0, 1), (3, 2)),
    class(RotationTag::U5, (1, -1), (2, 0)),
    class(RotationTag::U6, (1, 0), (3, 1)),
    class(RotationTag::U7, (1, 1), (4, 2)),
];

fn local_imbalances(t: &Tree, site: RotationSite) -> Result<(i64, i64)> {
    let (l, r) = t.subtree(site.node)?.children().expect("subtree at a node");
    let (a, b) = l.children().ok_or(Error::InvalidRotationSite(site.node))?;
    let gx = b.height() as i64 - a.height() as i64;
    let gy = r.height() as i64 - l.height() as i64;
    Ok((gx, gy))
}

/// Looks up the class of the rotation at `site` from the imbalance values
/// of its root and left child.
pub fn classify_rotation(t: &Tree, site: RotationSite) -> Result<RotationClass> {
    let (x, y) = local_imbalances(t, site)?;
    ROTATION_TABLE
        .iter()
        .find(|c| c.before == (x, y))
        .copied()
        .ok_or(Error::UnbalancedSite { site: site.node, x, y })
}

/// Whether the rotation at `site` of the balanced tree `t` yields a balanced
/// tree, decided from the local imbalance pair.
pub fn is_conservative(t: &Tree, site: RotationSite) -> Result<bool> {
    if !t.is_balanced() {
        return Err(Error::NotBalanced);
    }
    Ok(matches!(local_imbalances(t, site)?, (-1, -1) | (0, -1)))
}

/// Conservative balancing rotation sites of a balanced tree.
pub fn conservative_sites(t: &Tree) -> Result<Vec<RotationSite>> {
    if !t.is_balanced() {
        return Err(Error::NotBalanced);
    }
    Ok(tamari::rotation_sites(t)
        .into_iter()
        .filter(|&s| matches!(local_imbalances(t, s), Ok((-1, -1) | (0, -1))))
        .collect())
}

/// Rewrites the first two letters: `z1 z2 -> max(z1, z2) + 1` when they
/// differ by at most one, `z2` otherwise.
pub fn substitute(z1: u32, z2: u32) -> u32 {
    if z1.abs_diff(z2) <= 1 {
        z1.max(z2) + 1
    } else {
        z2
    }
}

/// One rewriting step on the leftmost pair, or `None` if the word has fewer
/// than two letters or its first two letters violate `z1 - 1 <= z2`.
pub fn rewrite_once(word: &[u32]) -> Option<Vec<u32>> {
    match word {
        [z1, z2, rest @ ..] if z1.saturating_sub(1) <= *z2 => {
            let mut out = Vec::with_capacity(word.len() - 1);
            out.push(substitute(*z1, *z2));
            out.extend_from_slice(rest);
            Some(out)
        }
        _ => None,
    }
}

/// Result of rewriting to a single letter: `Ok(letter)`, or `Err(())` if the
/// condition fails on the way. The empty word yields `Ok(None)`.
fn reduce(word: &[u32]) -> std::result::Result<Option<u32>, ()> {
    let Some((&first, rest)) = word.split_first() else {
        return Ok(None);
    };
    let mut acc = first;
    for &z in rest {
        if acc.saturating_sub(1) > z {
            return Err(());
        }
        acc = substitute(acc, z);
    }
    Ok(Some(acc))
}

pub fn is_admissible(word: &[u32]) -> bool {
    reduce(word).is_ok()
}

/// The letter left after rewriting an admissible word completely.
pub fn potential(word: &[u32]) -> Result<u32> {
    match reduce(word) {
        Ok(Some(p)) => Ok(p),
        Ok(None) => Err(Error::EmptyWord),
        Err(()) => Err(Error::NotAdmissible(word.to_vec())),
    }
}

/// A word known to be admissible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleWord(Vec<u32>);

impl AdmissibleWord {
    pub fn new(letters: Vec<u32>) -> Result<AdmissibleWord> {
        if is_admissible(&letters) {
            Ok(AdmissibleWord(letters))
        } else {
            Err(Error::NotAdmissible(letters))
        }
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn potential(&self) -> Result<u32> {
        potential(&self.0)
    }
}

/// The right subtrees `S_{x_1}, …, S_{x_ℓ}` hanging off `x` and off the
/// ancestors of `x` whose right child is not an ancestor of `x`, bottom to
/// top.
pub fn characteristic_subtrees(t: &Tree, position: usize) -> Result<Vec<&Tree>> {
    let nodes = t.nodes();
    if position == 0 || position > nodes {
        return Err(Error::NodeOutOfRange { position, nodes });
    }
    let mut out = Vec::new();
    let mut current = t;
    let mut pos = position;
    loop {
        let (l, r) = current.children().expect("position within range");
        let k = l.nodes();
        if pos == k + 1 {
            out.push(r);
            break;
        } else if pos <= k {
            out.push(r);
            current = l;
        } else {
            pos -= k + 1;
            current = r;
        }
    }
    out.reverse();
    Ok(out)
}

/// Heights of [`characteristic_subtrees`].
pub fn characteristic_word(t: &Tree, position: usize) -> Result<Vec<u32>> {
    Ok(characteristic_subtrees(t, position)?
        .into_iter()
        .map(|s| s.height() as u32)
        .collect())
}

/// The unbalance witness at node `x`: with `y` the leftmost node of the left
/// subtree of `x`, or `x` itself when that subtree is empty,
/// 1. `γ(x) >= 2`;
/// 2. the left subtree of `x` is balanced;
/// 3. every subtree lying entirely to the right of `y` is balanced;
/// 4. the characteristic word of `y` is admissible.
///
/// Balance is inherited by subtrees, so point 3 reduces to the subtrees
/// of [`characteristic_subtrees`] for `y`.
pub fn imb_property(t: &Tree, x: usize) -> Result<bool> {
    let sub = t.subtree(x)?;
    let (l, r) = sub.children().expect("subtree at a node");
    if (r.height() as i64 - l.height() as i64) < 2 || !l.is_balanced() {
        return Ok(false);
    }
    let y = x - l.nodes();
    let right_of_y = characteristic_subtrees(t, y)?;
    if !right_of_y.iter().all(|s| s.is_balanced()) {
        return Ok(false);
    }
    Ok(is_admissible(&characteristic_word(t, y)?))
}

/// Nodes of `t` at which [`imb_property`] holds.
pub fn imb_witnesses(t: &Tree) -> Vec<usize> {
    (1..=t.nodes())
        .filter(|&x| imb_property(t, x).unwrap_or(false))
        .collect()
}

/// The poset of balanced trees of size `n` under conservative rotations.
pub fn balanced_subposet(n: usize) -> Result<TreePoset> {
    check_bound(n)?;
    let members = all_balanced_trees(n)
        .iter()
        .map(|t| PackedTree::from_tree(t).expect("size checked"))
        .collect();
    // Covers are kept only when they land inside the member set, which is
    // exactly the set of conservative rotations.
    Ok(TreePoset::from_packed(members, |_, _, _| true))
}

fn check_bound(n: usize) -> Result<()> {
    if n > MAX_VERIFY_NODES {
        return Err(Error::TooLarge { what: "node count", value: n, bound: MAX_VERIFY_NODES });
    }
    Ok(())
}

/// Breadth-first distances from `upper` walking left rotations inside `within`.
fn down_distances(
    upper: PackedTree,
    within: &HashSet<PackedTree>,
) -> HashMap<PackedTree, usize> {
    let mut dist = HashMap::from([(upper, 0usize)]);
    let mut queue = VecDeque::from([upper]);
    while let Some(t) = queue.pop_front() {
        let d = dist[&t];
        for (_, s) in t.left_rotations() {
            if within.contains(&s) && !dist.contains_key(&s) {
                dist.insert(s, d + 1);
                queue.push_back(s);
            }
        }
    }
    dist
}

/// All pairs `(i, j)` of indices into `all_balanced_trees(n)` with
/// `trees[i] ≼ trees[j]`, found by exploring the full Tamari lattice upwards
/// from every balanced tree. The callback sees each pair together with the
/// up-set of the lower end.
fn sweep_balanced_pairs<R, F>(n: usize, per_pair: F) -> (Vec<Tree>, Vec<(usize, usize, R)>)
where
    R: Send,
    F: Fn(PackedTree, PackedTree, &HashSet<PackedTree>) -> R + Sync,
{
    let trees = all_balanced_trees(n);
    let packed: Vec<PackedTree> = trees
        .iter()
        .map(|t| PackedTree::from_tree(t).expect("size checked"))
        .collect();
    let results = packed
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &lo)| {
            let up = tamari::up_set(lo);
            packed
                .iter()
                .enumerate()
                .filter(|(_, hi)| up.contains(hi))
                .map(|(j, &hi)| (i, j, per_pair(lo, hi, &up)))
                .collect::<Vec<_>>()
        })
        .collect();
    (trees, results)
}

/// Ordered pairs of balanced trees `t0 ≼ t1` with `n` nodes, as indices
/// into [`all_balanced_trees`].
pub fn balanced_pairs(n: usize) -> Result<BalancedPairs> {
    check_bound(n)?;
    let (trees, pairs) = sweep_balanced_pairs(n, |_, _, _| ());
    Ok((trees, pairs.into_iter().map(|(i, j, ())| (i, j)).collect()))
}

/// Balanced trees in [`all_balanced_trees`] order, and the index pairs
/// `(i, j)` with `trees[i] ≼ trees[j]`.
pub type BalancedPairs = (Vec<Tree>, Vec<(usize, usize)>);

/// An interval with balanced ends that contains an unbalanced tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureCounterexample {
    pub lower: Tree,
    pub upper: Tree,
    pub unbalanced: Tree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    pub nodes: usize,
    pub balanced_trees: usize,
    pub balanced_pairs: usize,
    /// Largest rotation distance between the ends of a balanced pair.
    pub max_k: usize,
    pub counterexample: Option<ClosureCounterexample>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for ClosureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} balanced={} pairs={} max_k={} {}",
            self.nodes,
            self.balanced_trees,
            self.balanced_pairs,
            self.max_k,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        if let Some(c) = &self.counterexample {
            write!(f, " lower={} upper={} unbalanced={}", c.lower, c.upper, c.unbalanced)?;
        }
        Ok(())
    }
}

/// Checks that every interval of the full Tamari lattice between two
/// balanced trees with `n` nodes contains only balanced trees.
///
/// Intervals are computed in the full lattice, so an unbalanced tree
/// between two balanced ones would be found. The reported counterexample is
/// the first one in the order of [`all_balanced_trees`] and canonical JSON.
pub fn verify_closure(n: usize) -> Result<ClosureReport> {
    check_bound(n)?;
    let (trees, results) = sweep_balanced_pairs(n, |lo, hi, up| {
        let dist = down_distances(hi, up);
        let k = dist[&lo];
        let mut bad: Vec<Tree> = dist
            .keys()
            .filter(|p| !p.is_balanced())
            .map(|p| p.to_tree())
            .collect();
        bad.sort_by_key(|t| t.to_json());
        (k, bad.into_iter().next())
    });
    let counterexample = results.iter().find_map(|(i, j, (_, bad))| {
        bad.as_ref().map(|u| ClosureCounterexample {
            lower: trees[*i].clone(),
            upper: trees[*j].clone(),
            unbalanced: u.clone(),
        })
    });
    Ok(ClosureReport {
        nodes: n,
        balanced_trees: trees.len(),
        balanced_pairs: results.len(),
        max_k: results.iter().map(|(_, _, (k, _))| *k).max().unwrap_or(0),
        counterexample,
    })
}

/// The Boolean lattice of subsets of a `dimension`-element set, with
/// elements encoded as bitmasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hypercube {
    pub dimension: usize,
}

impl Hypercube {
    pub fn new(dimension: usize) -> Hypercube {
        assert!(dimension < 64, "hypercube dimension must fit a u64 mask");
        Hypercube { dimension }
    }

    pub fn len(&self) -> u64 {
        1 << self.dimension
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rank(&self, element: u64) -> usize {
        element.count_ones() as usize
    }

    /// Pairs `(s, s ∪ {e})` for every subset `s` and `e ∉ s`.
    pub fn covers(&self) -> Vec<(u64, u64)> {
        (0..self.len())
            .flat_map(|s| {
                (0..self.dimension)
                    .filter(move |e| s & (1 << e) == 0)
                    .map(move |e| (s, s | (1 << e)))
            })
            .collect()
    }
}

/// Infix positions of the rotation roots used to reach a tree of a balanced
/// interval from its lower end.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RotationSet(pub BTreeSet<usize>);

impl RotationSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, position: usize) -> bool {
        self.0.contains(&position)
    }

    pub fn is_subset(&self, other: &RotationSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

/// An isomorphism between a balanced interval and a hypercube.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypercubeLabeling {
    pub dimension: usize,
    /// Rotation set of the upper end: the hypercube's ground set.
    pub ground: RotationSet,
    /// Rotation set of each interval element, indexed like the interval.
    pub labels: Vec<RotationSet>,
}

/// Labels each element of a balanced interval by its rotation set and checks
/// that this is an isomorphism onto the hypercube over the upper end's set:
/// the labels are injective, there are `2^k` of them, and the covers are
/// exactly the single-position insertions.
pub fn hypercube_labeling(iv: &Interval) -> Result<HypercubeLabeling> {
    if !iv.lower.is_balanced() || !iv.upper.is_balanced() {
        return Err(Error::NotBalanced);
    }
    let fail = |msg: String| Err(Error::NotHypercube(msg));
    let elements = iv.elements();
    let packed: Vec<PackedTree> = elements
        .iter()
        .map(PackedTree::from_tree)
        .collect::<Result<_>>()?;
    let lower = iv.poset.index_of(&iv.lower).ok_or(Error::NotComparable)?;
    let upper = iv.poset.index_of(&iv.upper).ok_or(Error::NotComparable)?;

    let adj = iv.poset.upper_covers();
    let mut labels: Vec<Option<BTreeSet<usize>>> = vec![None; elements.len()];
    labels[lower] = Some(BTreeSet::new());
    let mut queue = VecDeque::from([lower]);
    while let Some(i) = queue.pop_front() {
        let here = labels[i].clone().expect("queued elements are labeled");
        let rotations = packed[i].right_rotations();
        for &j in &adj[i] {
            let root = rotations
                .iter()
                .find(|(_, q)| *q == packed[j])
                .map(|(p, _)| *p)
                .expect("cover is a rotation");
            if here.contains(&root) {
                return fail(format!("rotation at {root} applied twice"));
            }
            let mut next = here.clone();
            next.insert(root);
            match &labels[j] {
                Some(existing) if *existing != next => {
                    return fail(format!("element {} reached with two rotation sets", elements[j]));
                }
                Some(_) => {}
                None => {
                    labels[j] = Some(next);
                    queue.push_back(j);
                }
            }
        }
    }
    let labels: Vec<BTreeSet<usize>> = match labels.into_iter().collect::<Option<Vec<_>>>() {
        Some(l) => l,
        None => return fail("some element is not above the lower end".into()),
    };
    let ground = labels[upper].clone();
    let k = ground.len();
    if k >= 63 || elements.len() != 1usize << k {
        return fail(format!("{} elements for {} rotations", elements.len(), k));
    }
    if labels.iter().any(|l| !l.is_subset(&ground)) {
        return fail("a rotation set is not contained in the upper end's set".into());
    }
    let distinct: HashSet<&BTreeSet<usize>> = labels.iter().collect();
    if distinct.len() != labels.len() {
        return fail("rotation sets are not injective".into());
    }
    if iv.covers().len() != k * (1usize << k) / 2 {
        return fail(format!("{} covers, expected {}", iv.covers().len(), k << k.saturating_sub(1)));
    }
    for &(i, j) in iv.covers() {
        if labels[j].len() != labels[i].len() + 1 || !labels[i].is_subset(&labels[j]) {
            return fail("a cover is not a single insertion".into());
        }
    }
    // Disjointness: no root is the left child of another root in the lower end.
    for &y in &ground {
        let left = iv.lower.subtree(y)?.left().expect("subtree at a node");
        if let Some(b) = left.right() {
            let x = y - b.nodes() - 1;
            if ground.contains(&x) {
                return fail(format!("rotation roots {x} and {y} overlap"));
            }
        }
    }
    Ok(HypercubeLabeling {
        dimension: k,
        ground: RotationSet(ground),
        labels: labels.into_iter().map(RotationSet).collect(),
    })
}

/// The `k` for which the balanced interval is isomorphic to the hypercube
/// of dimension `k`.
pub fn hypercube_dimension(iv: &Interval) -> Result<usize> {
    hypercube_labeling(iv).map(|h| h.dimension)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypercubeReport {
    pub nodes: usize,
    pub balanced_trees: usize,
    pub balanced_pairs: usize,
    pub max_k: usize,
    pub failure: Option<(Tree, Tree, String)>,
}

impl HypercubeReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for HypercubeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} balanced={} pairs={} max_k={} {}",
            self.nodes,
            self.balanced_trees,
            self.balanced_pairs,
            self.max_k,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        if let Some((lo, hi, why)) = &self.failure {
            write!(f, " lower={lo} upper={hi} reason={why}")?;
        }
        Ok(())
    }
}

/// Runs [`hypercube_labeling`] on every interval between balanced trees
/// with `n` nodes.
pub fn hypercube_sweep(n: usize) -> Result<HypercubeReport> {
    check_bound(n)?;
    let (trees, results) = sweep_balanced_pairs(n, |lo, hi, up| {
        let iv = tamari::interval_from_up_set(lo, hi, up);
        hypercube_labeling(&iv).map(|h| h.dimension)
    });
    let failure = results.iter().find_map(|(i, j, r)| {
        r.as_ref()
            .err()
            .map(|e| (trees[*i].clone(), trees[*j].clone(), e.to_string()))
    });
    Ok(HypercubeReport {
        nodes: n,
        balanced_trees: trees.len(),
        balanced_pairs: results.len(),
        max_k: results
            .iter()
            .filter_map(|(_, _, r)| r.as_ref().ok().copied())
            .max()
            .unwrap_or(0),
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tamari::{interval, rotate};

    fn site(n: usize) -> RotationSite {
        RotationSite::new(n)
    }

    #[test]
    fn table_lookups() {
        // root y = 3 with left child x = 2; x has a left child, y's right is a leaf
        let b1 = Tree::join(Tree::join(Tree::single(), Tree::Leaf), Tree::Leaf);
        assert_eq!(classify_rotation(&b1, site(3)), Err(Error::UnbalancedSite { site: 3, x: -1, y: -2 }));

        let t = Tree::join(Tree::join(Tree::single(), Tree::Leaf), Tree::single());
        let c = classify_rotation(&t, site(3)).unwrap();
        assert_eq!((c.tag, c.before, c.after), (RotationTag::B1, (-1, -1), (1, 1)));

        let t = Tree::join(Tree::perfect(2), Tree::single());
        let c = classify_rotation(&t, site(4)).unwrap();
        assert_eq!((c.tag, c.after), (RotationTag::B2, (1, 0)));

        let t = Tree::join(Tree::join(Tree::Leaf, Tree::single()), Tree::perfect(3));
        let c = classify_rotation(&t, site(3)).unwrap();
        assert_eq!((c.tag, c.before, c.after), (RotationTag::U7, (1, 1), (4, 2)));

        assert_eq!(classify_rotation(&Tree::single(), site(1)), Err(Error::InvalidRotationSite(1)));
    }

    #[test]
    fn conservative_requires_balance() {
        assert_eq!(is_conservative(&Tree::left_comb(3), site(3)), Err(Error::NotBalanced));
        let t = Tree::perfect(2);
        assert_eq!(is_conservative(&t, site(2)), Ok(false));
        let t = Tree::join(Tree::single(), Tree::Leaf);
        assert_eq!(is_conservative(&t, site(2)), Ok(true));
        assert!(rotate(&t, site(2)).unwrap().is_balanced());
    }

    #[test]
    fn worked_words() {
        assert!(is_admissible(&[0, 0, 1, 2, 2]));
        assert_eq!(potential(&[0, 0, 1, 2, 2]), Ok(4));
        assert!(is_admissible(&[1, 2, 3, 4, 4, 8, 8]));
        assert_eq!(potential(&[1, 2, 3, 4, 4, 8, 8]), Ok(9));
        assert!(!is_admissible(&[3, 4, 4, 4]));
        assert_eq!(potential(&[3, 4, 4, 4]), Err(Error::NotAdmissible(vec![3, 4, 4, 4])));
        assert!(is_admissible(&[]));
        assert_eq!(potential(&[]), Err(Error::EmptyWord));
        assert_eq!(potential(&[7]), Ok(7));
    }

    #[test]
    fn rewrite_trace_matches_worked_example() {
        let mut w = vec![0, 0, 1, 2, 2];
        let mut trace = vec![w.clone()];
        while let Some(next) = rewrite_once(&w) {
            w = next;
            trace.push(w.clone());
        }
        assert_eq!(
            trace,
            vec![vec![0, 0, 1, 2, 2], vec![1, 1, 2, 2], vec![2, 2, 2], vec![3, 2], vec![4]]
        );
        let mut w = vec![3, 4, 4, 4];
        let mut last = w.clone();
        while let Some(next) = rewrite_once(&w) {
            w = next;
            last = w.clone();
        }
        assert_eq!(last, vec![6, 4]);
    }

    #[test]
    fn characteristic_words() {
        let t = Tree::perfect(3);
        assert_eq!(characteristic_word(&t, 4), Ok(vec![2]));
        assert_eq!(characteristic_word(&Tree::left_comb(3), 1), Ok(vec![0, 0, 0]));
        assert_eq!(characteristic_word(&t, 1), Ok(vec![0, 1, 2]));
        assert!(characteristic_word(&t, 8).is_err());
    }

    #[test]
    fn imb_examples() {
        for t in all_balanced_trees(6) {
            for x in 1..=6 {
                assert_eq!(imb_property(&t, x), Ok(false));
            }
        }
        // node 1 of the right comb has an empty left subtree
        assert_eq!(imb_property(&Tree::right_comb(3), 1), Ok(true));
        assert_eq!(imb_property(&Tree::single(), 2), Err(Error::NodeOutOfRange { position: 2, nodes: 1 }));
        // x = root with left single node and right perfect height 3
        let t = Tree::join(Tree::single(), Tree::perfect(3));
        assert_eq!(imb_property(&t, 2), Ok(true));
    }

    #[test]
    fn hypercube_counts() {
        let h = Hypercube::new(3);
        assert_eq!(h.len(), 8);
        assert_eq!(h.covers().len(), 12);
        for s in 0..h.len() {
            let up = h.covers().iter().filter(|(a, _)| *a == s).count();
            let down = h.covers().iter().filter(|(_, b)| *b == s).count();
            assert_eq!(down, h.rank(s));
            assert_eq!(up, 3 - h.rank(s));
        }
    }

    #[test]
    fn trivial_hypercubes() {
        let t = Tree::perfect(2);
        assert_eq!(hypercube_dimension(&interval(&t, &t).unwrap()), Ok(0));
        let lo = Tree::join(Tree::single(), Tree::Leaf);
        let hi = rotate(&lo, site(2)).unwrap();
        let h = hypercube_labeling(&interval(&lo, &hi).unwrap()).unwrap();
        assert_eq!(h.dimension, 1);
        assert_eq!(h.ground, RotationSet(BTreeSet::from([2])));
        let unbalanced = interval(&Tree::left_comb(3), &Tree::right_comb(3)).unwrap();
        assert_eq!(hypercube_dimension(&unbalanced), Err(Error::NotBalanced));
    }

    #[test]
    fn small_closure_reports() {
        let r = verify_closure(1).unwrap();
        assert!(r.passed());
        assert_eq!((r.balanced_trees, r.balanced_pairs), (1, 1));
        let r = verify_closure(5).unwrap();
        assert_eq!(r.to_string(), "n=5 balanced=6 pairs=12 max_k=2 PASS");
        assert!(verify_closure(MAX_VERIFY_NODES + 1).is_err());
    }
}
