//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use avl_tamari::Tree;
use num_bigint::BigInt;
use num_traits::Zero;

pub const BALANCED: [u64; 12] = [1, 1, 2, 1, 4, 6, 4, 17, 32, 44, 60, 70];

pub const MAXIMAL: [u64; 29] = [
    1, 1, 1, 1, 2, 2, 2, 4, 6, 9, 11, 13, 22, 38, 60, 89, 128, 183, 256, 353, 512, 805, 1336, 2221,
    3594, 5665, 8774, 13433, 20359,
];

pub const INTERVALS: [u64; 24] = [
    1, 1, 3, 1, 7, 12, 6, 52, 119, 137, 195, 231, 1019, 3503, 6593, 12616, 26178, 43500, 64157,
    94688, 232560, 817757, 2233757, 5179734,
];

pub const MAXIMAL_INTERVALS: [u64; 30] = [
    1, 1, 1, 1, 3, 2, 2, 6, 9, 15, 15, 17, 41, 77, 125, 178, 252, 376, 531, 740, 1192, 2179, 4273,
    7738, 13012, 20776, 32389, 49841, 75457, 113011,
];

/// `C_0 = 1`, `C_{n+1} = Σ C_i C_{n-i}`.
pub fn catalan_recurrence(n: usize) -> Vec<u128> {
    let mut c = vec![1u128];
    for k in 0..n {
        c.push((0..=k).map(|i| c[i] * c[k - i]).sum());
    }
    c
}

pub fn height(t: &Tree) -> usize {
    match t.children() {
        None => 0,
        Some((l, r)) => 1 + height(l).max(height(r)),
    }
}

pub fn balanced(t: &Tree) -> bool {
    match t.children() {
        None => true,
        Some((l, r)) => height(l).abs_diff(height(r)) <= 1 && balanced(l) && balanced(r),
    }
}

/// Subtrees in infix order of their roots.
pub fn subtrees(t: &Tree) -> Vec<&Tree> {
    let mut out = Vec::new();
    fn go<'a>(t: &'a Tree, out: &mut Vec<&'a Tree>) {
        if let Some((l, r)) = t.children() {
            go(l, out);
            out.push(t);
            go(r, out);
        }
    }
    go(t, &mut out);
    out
}

/// Imbalance of every node in infix order.
pub fn gammas(t: &Tree) -> Vec<i64> {
    subtrees(t)
        .iter()
        .map(|s| {
            let (l, r) = s.children().unwrap();
            height(r) as i64 - height(l) as i64
        })
        .collect()
}

/// A tree whose nodes carry identifiers, for following nodes across a
/// rotation.
#[derive(Clone, Debug, PartialEq)]
pub enum IdTree {
    Leaf,
    Node(Box<IdTree>, usize, Box<IdTree>),
}

pub fn with_ids(t: &Tree) -> IdTree {
    fn go(t: &Tree, next: &mut usize) -> IdTree {
        match t.children() {
            None => IdTree::Leaf,
            Some((l, r)) => {
                let l = go(l, next);
                *next += 1;
                let id = *next;
                IdTree::Node(Box::new(l), id, Box::new(go(r, next)))
            }
        }
    }
    go(t, &mut 0)
}

pub fn ids_infix(t: &IdTree) -> Vec<usize> {
    match t {
        IdTree::Leaf => vec![],
        IdTree::Node(l, id, r) => {
            let mut v = ids_infix(l);
            v.push(*id);
            v.extend(ids_infix(r));
            v
        }
    }
}

pub fn shape(t: &IdTree) -> Tree {
    match t {
        IdTree::Leaf => Tree::Leaf,
        IdTree::Node(l, _, r) => Tree::join(shape(l), shape(r)),
    }
}

/// Right rotation at the node with identifier `id`.
pub fn rotate_ids(t: &IdTree, id: usize) -> Option<IdTree> {
    match t {
        IdTree::Leaf => None,
        IdTree::Node(l, y, c) if *y == id => match &**l {
            IdTree::Node(a, x, b) => Some(IdTree::Node(
                a.clone(),
                *x,
                Box::new(IdTree::Node(b.clone(), *y, c.clone())),
            )),
            IdTree::Leaf => None,
        },
        IdTree::Node(l, y, r) => {
            if let Some(nl) = rotate_ids(l, id) {
                Some(IdTree::Node(Box::new(nl), *y, r.clone()))
            } else {
                rotate_ids(r, id).map(|nr| IdTree::Node(l.clone(), *y, Box::new(nr)))
            }
        }
    }
}

/// Reflexive-transitive closure of a cover relation, as bitsets of up-sets.
pub fn reachability(len: usize, covers: &[(usize, usize)]) -> Vec<Vec<u64>> {
    let mut adj = vec![Vec::new(); len];
    for &(i, j) in covers {
        adj[i].push(j);
    }
    let words = len.div_ceil(64);
    (0..len)
        .map(|s| {
            let mut bits = vec![0u64; words];
            let mut queue = VecDeque::from([s]);
            bits[s / 64] |= 1 << (s % 64);
            while let Some(i) = queue.pop_front() {
                for &j in &adj[i] {
                    if bits[j / 64] & (1 << (j % 64)) == 0 {
                        bits[j / 64] |= 1 << (j % 64);
                        queue.push_back(j);
                    }
                }
            }
            bits
        })
        .collect()
}

pub fn bit(set: &[u64], i: usize) -> bool {
    set[i / 64] & (1 << (i % 64)) != 0
}

/// A univariate truncated power series with big coefficients.
type Uni = Vec<BigInt>;

fn uni_mul(a: &Uni, b: &Uni, n: usize) -> Uni {
    let mut out = vec![BigInt::zero(); n + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `A(x, 0, …, 0)` for `A = x + A(σ)`, computed as the sum of the first
/// coordinates of the orbit of `(x, 0, …, 0)` under `σ`, over univariate
/// series. `sigma[j]` lists `(coefficient, exponents)` pairs.
pub fn series_by_orbit(sigma: &[Vec<(i64, Vec<u32>)>], n: usize) -> Vec<BigInt> {
    let m = sigma.len();
    let mut v: Vec<Uni> = vec![vec![BigInt::zero(); n + 1]; m];
    v[0][1] = BigInt::from(1);
    let mut total = vec![BigInt::zero(); n + 1];
    while v.iter().any(|s| s.iter().any(|c| !c.is_zero())) {
        for (t, c) in total.iter_mut().zip(&v[0]) {
            *t += c;
        }
        let mut powers: Vec<HashMap<u32, Uni>> = vec![HashMap::new(); m];
        let mut next = Vec::with_capacity(m);
        for poly in sigma {
            let mut acc = vec![BigInt::zero(); n + 1];
            for (coeff, exps) in poly {
                let mut term = vec![BigInt::zero(); n + 1];
                term[0] = BigInt::from(*coeff);
                for (k, &e) in exps.iter().enumerate() {
                    let p = powers[k]
                        .entry(e)
                        .or_insert_with(|| {
                            let mut p = vec![BigInt::zero(); n + 1];
                            p[0] = BigInt::from(1);
                            for _ in 0..e {
                                p = uni_mul(&p, &v[k], n);
                            }
                            p
                        })
                        .clone();
                    term = uni_mul(&term, &p, n);
                }
                for (a, b) in acc.iter_mut().zip(term) {
                    *a += b;
                }
            }
            next.push(acc);
        }
        v = next;
    }
    total.into_iter().skip(1).collect()
}

/// The four substitutions, written out term by term.
pub fn sigma_data(which: &str) -> Vec<Vec<(i64, Vec<u32>)>> {
    match which {
        "balanced" => vec![vec![(1, vec![2, 0]), (2, vec![1, 1])], vec![(1, vec![1, 0])]],
        "maximal" => vec![
            vec![(1, vec![2, 0, 0]), (1, vec![1, 1, 0]), (1, vec![0, 1, 1])],
            vec![(1, vec![1, 0, 0])],
            vec![(1, vec![1, 1, 0])],
        ],
        "intervals" => vec![
            vec![(1, vec![2, 0, 0]), (2, vec![1, 1, 0]), (1, vec![0, 0, 1])],
            vec![(1, vec![1, 0, 0])],
            vec![(1, vec![3, 0, 0]), (1, vec![2, 1, 0])],
        ],
        "maximal-intervals" => vec![
            vec![(1, vec![2, 0, 0, 0]), (2, vec![0, 1, 1, 0]), (1, vec![0, 0, 0, 1])],
            vec![(1, vec![1, 0, 0, 0])],
            vec![(1, vec![0, 1, 1, 0]), (1, vec![0, 0, 0, 1])],
            vec![(1, vec![3, 0, 0, 0]), (1, vec![2, 1, 0, 0])],
        ],
        _ => panic!("unknown family {which}"),
    }
}

/// All words over `0..alphabet` of length at most `max_len`.
pub fn words(alphabet: u32, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<u32>| {
                (0..alphabet).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Admissibility straight from the recursive definition.
pub fn admissible_by_definition(z: &[u32]) -> bool {
    if z.len() <= 1 {
        return true;
    }
    let (a, b) = (z[0] as i64, z[1] as i64);
    if a - 1 > b {
        return false;
    }
    let head = if (a - 1..=a + 1).contains(&b) { a.max(b) + 1 } else { b };
    let mut rest = vec![head as u32];
    rest.extend_from_slice(&z[2..]);
    admissible_by_definition(&rest)
}

/// Imb with point (3) read broadly: every subtree all of whose nodes come
/// after `y` in infix order is balanced.
pub fn imb_broad(t: &Tree, x: usize) -> bool {
    let subs = subtrees(t);
    let sx = subs[x - 1];
    let (l, r) = sx.children().unwrap();
    if (height(r) as i64 - height(l) as i64) < 2 || !balanced(l) {
        return false;
    }
    // with an empty left subtree, y is x itself
    let y = x - l.nodes();
    // the subtree rooted at position p spans [p - |left|, p + |right|]
    let all_right_balanced = subs.iter().enumerate().all(|(i, s)| {
        let p = i + 1;
        let first = p - s.left().unwrap().nodes();
        first <= y || balanced(s)
    });
    all_right_balanced && avl_tamari::balance_dynamics::is_admissible(&char_word_oracle(t, y))
}

/// Heights of the right subtrees met on the way up from node `pos`, taking
/// the node itself and every ancestor reached from its left side.
pub fn char_word_oracle(t: &Tree, pos: usize) -> Vec<u32> {
    fn go(t: &Tree, pos: usize, out: &mut Vec<u32>) {
        let (l, r) = t.children().unwrap();
        let k = l.nodes();
        if pos <= k {
            go(l, pos, out);
            out.push(height(r) as u32);
        } else if pos == k + 1 {
            out.push(height(r) as u32);
        } else {
            go(r, pos - k - 1, out);
        }
    }
    let mut out = Vec::new();
    go(t, pos, &mut out);
    out
}
