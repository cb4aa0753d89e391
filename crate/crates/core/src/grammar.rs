//! Synchronous grammars and the functional equations they induce.
//!
//! A bud tree grows by replacing all of its buds at once, each by one of
//! the alternatives of its rule. Counting the buds of each kind turns a
//! grammar into a substitution `σ` on polynomials, and the generating
//! series is the fixed point of `A = x + A(σ)`.
//!
//! ```
//! use avl_tamari::grammar::{builtin_equation, Family};
//!
//! let eq = builtin_equation(Family::Balanced);
//! let a = eq.iterates(2);
//! assert_eq!(a[1].to_string(), "x + 2*x*y + x^2");
//! let series = eq.iterate_fixed_point(7).unwrap();
//! assert_eq!(series.to_u64(), vec![1, 1, 2, 1, 4, 6, 4]);
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::balance_dynamics::{balanced_pairs, hypercube_labeling, is_conservative};
use crate::binary_tree::{all_balanced_trees, Tree};
use crate::error::{Error, Result};
use crate::patterns::{is_maximal_by_rotation, is_minimal_by_rotation};
use crate::tamari::{self, Interval, RotationSite};

/// Names of the variables, in order, for polynomials of arity up to four.
pub const VARIABLES: [&str; 4] = ["x", "y", "z", "t"];

/// A polynomial with integer coefficients in a fixed number of variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    arity: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl Polynomial {
    pub fn zero(arity: usize) -> Polynomial {
        Polynomial { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: impl Into<BigInt>) -> Polynomial {
        Polynomial::monomial(vec![0; arity], c)
    }

    pub fn one(arity: usize) -> Polynomial {
        Polynomial::constant(arity, 1)
    }

    /// The variable with index `i`.
    pub fn variable(arity: usize, i: usize) -> Polynomial {
        assert!(i < arity, "variable {i} out of range for arity {arity}");
        let mut e = vec![0; arity];
        e[i] = 1;
        Polynomial::monomial(e, 1)
    }

    pub fn monomial(exponents: Vec<u32>, c: impl Into<BigInt>) -> Polynomial {
        let mut p = Polynomial::zero(exponents.len());
        p.add_term(exponents, c.into());
        p
    }

    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Polynomial>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut p = Polynomial::zero(arity);
        for (e, c) in terms {
            if e.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Terms in lexicographic order of exponent vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> BigInt {
        self.terms.get(exponents).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&vec![0; self.arity])
    }

    /// Largest total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| degree(e)).max()
    }

    /// Smallest total degree, `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| degree(e)).min()
    }

    fn check_arity(&self, other: &Polynomial) -> Result<()> {
        if self.arity == other.arity {
            Ok(())
        } else {
            Err(Error::ArityMismatch { expected: self.arity, found: other.arity })
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }

    fn add_assign_ref(&mut self, other: &Polynomial) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        Ok(self.mul_limited(other, None))
    }

    /// Product with every term of total degree above `max_degree` dropped.
    pub fn mul_truncated(&self, other: &Polynomial, max_degree: u32) -> Result<Polynomial> {
        self.check_arity(other)?;
        Ok(self.mul_limited(other, Some(max_degree)))
    }

    fn mul_limited(&self, other: &Polynomial, limit: Option<u32>) -> Polynomial {
        let mut out = Polynomial::zero(self.arity);
        let rhs: Vec<(&Vec<u32>, &BigInt, u32)> =
            other.terms.iter().map(|(e, c)| (e, c, degree(e))).collect();
        for (a, ca) in &self.terms {
            let da = degree(a);
            for &(b, cb, db) in &rhs {
                if limit.is_some_and(|n| da + db > n) {
                    continue;
                }
                let e: Vec<u32> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Polynomial {
        let mut out = Polynomial::zero(self.arity);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    /// Drops every term of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Polynomial {
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| degree(e) <= max_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_substitution(&self, sigma: &[Polynomial]) -> Result<usize> {
        if sigma.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: sigma.len() });
        }
        let m = sigma.first().map_or(0, Polynomial::arity);
        for s in sigma {
            if s.arity != m {
                return Err(Error::ArityMismatch { expected: m, found: s.arity });
            }
        }
        Ok(m)
    }

    /// Substitutes `sigma[j]` for variable `j`, all at once.
    pub fn compose(&self, sigma: &[Polynomial]) -> Result<Polynomial> {
        let m = self.check_substitution(sigma)?;
        Ok(self.compose_limited(sigma, m, None))
    }

    /// [`compose`](Self::compose) modulo terms of total degree above
    /// `max_degree`. Every `sigma[j]` must have a zero constant term, so
    /// that substitution never lowers degrees and truncating early is exact.
    pub fn compose_truncated(&self, sigma: &[Polynomial], max_degree: u32) -> Result<Polynomial> {
        let m = self.check_substitution(sigma)?;
        if let Some(j) = sigma.iter().position(|s| !s.constant_term().is_zero()) {
            return Err(Error::ConstantTerm(j));
        }
        Ok(self.truncate(max_degree).compose_limited(sigma, m, Some(max_degree)))
    }

    fn compose_limited(&self, sigma: &[Polynomial], m: usize, limit: Option<u32>) -> Polynomial {
        let terms: Vec<(&[u32], &BigInt)> = self.terms().collect();
        if terms.is_empty() {
            return Polynomial::zero(m);
        }
        let min_degrees: Vec<u32> = sigma.iter().map(|s| s.min_degree().unwrap_or(0)).collect();
        horner(&terms, 0, sigma, &min_degrees, m, limit)
    }

    /// Coefficients of `x^0, …, x^max_degree` after setting every other
    /// variable to zero.
    pub fn univariate_coefficients(&self, max_degree: u32) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); max_degree as usize + 1];
        for (e, c) in &self.terms {
            match e.split_first() {
                Some((&d, rest)) if d <= max_degree && rest.iter().all(|&r| r == 0) => out[d as usize] += c,
                Some(_) => {}
                None => out[0] += c,
            }
        }
        out
    }

    /// Parses `2*x^2*y - z + 3`, with variables named from [`VARIABLES`].
    pub fn parse(text: &str, arity: usize) -> Result<Polynomial> {
        if arity > VARIABLES.len() {
            return Err(Error::TooLarge { what: "polynomial arity", value: arity, bound: VARIABLES.len() });
        }
        let err = |m: String| Error::PolynomialSyntax(m);
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty polynomial".into()));
        }
        let mut out = Polynomial::zero(arity);
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let negative = if let Some(r) = rest.strip_prefix('-') {
                rest = r;
                true
            } else if let Some(r) = rest.strip_prefix('+') {
                rest = r;
                false
            } else if first {
                false
            } else {
                return Err(err(format!("expected `+` or `-` before `{rest}`")));
            };
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(end);
            rest = tail;
            if term.is_empty() {
                return Err(err("empty term".into()));
            }
            let mut coeff = BigInt::one();
            let mut e = vec![0u32; arity];
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(err(format!("empty factor in `{term}`")));
                }
                if factor.starts_with(|c: char| c.is_ascii_digit()) {
                    let v: BigInt = factor.parse().map_err(|_| err(format!("bad coefficient `{factor}`")))?;
                    coeff *= v;
                    continue;
                }
                let (name, power) = match factor.split_once('^') {
                    Some((n, p)) => (n, p.parse::<u32>().map_err(|_| err(format!("bad exponent in `{factor}`")))?),
                    None => (factor, 1),
                };
                let i = VARIABLES[..arity]
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| err(format!("unknown variable `{name}` for arity {arity}")))?;
                e[i] += power;
            }
            if negative {
                coeff = -coeff;
            }
            out.add_term(e, coeff);
        }
        Ok(out)
    }
}

type Term<'a> = (&'a [u32], &'a BigInt);

/// Evaluates `Σ c_e Π σ_j^{e_j}` one variable at a time, by Horner's rule on
/// lexicographically sorted terms. With a limit, inner sums are truncated
/// to what can still contribute once multiplied by `σ_var^e`.
fn horner(
    terms: &[Term],
    var: usize,
    sigma: &[Polynomial],
    min_degrees: &[u32],
    m: usize,
    limit: Option<u32>,
) -> Polynomial {
    if var == sigma.len() {
        let mut c = BigInt::zero();
        for (_, v) in terms {
            c += *v;
        }
        return Polynomial::constant(m, c);
    }
    let mut groups: Vec<(u32, &[Term])> = Vec::new();
    let mut start = 0;
    while start < terms.len() {
        let e = terms[start].0[var];
        let len = terms[start..].iter().take_while(|t| t.0[var] == e).count();
        groups.push((e, &terms[start..start + len]));
        start += len;
    }
    let s = &sigma[var];
    let step = |acc: Polynomial| acc.mul_limited(s, limit);
    let mut acc = Polynomial::zero(m);
    let mut prev = groups.last().map_or(0, |g| g.0);
    for &(e, group) in groups.iter().rev() {
        for _ in e..prev {
            if !acc.is_zero() {
                acc = step(acc);
            }
        }
        let inner_limit = match limit {
            Some(n) => match n.checked_sub(e * min_degrees[var]) {
                Some(l) => Some(l),
                None => {
                    prev = e;
                    continue;
                }
            },
            None => None,
        };
        let inner = horner(group, var + 1, sigma, min_degrees, m, inner_limit);
        acc.add_assign_ref(&inner);
        prev = e;
    }
    for _ in 0..prev {
        if !acc.is_zero() {
            acc = step(acc);
        }
    }
    acc
}

impl Add for &Polynomial {
    type Output = Polynomial;

    /// Panics when the arities differ; see [`Polynomial::checked_add`].
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial arities differ")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    /// Panics when the arities differ; see [`Polynomial::checked_mul`].
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial arities differ")
    }
}

/// Terms by increasing total degree, then lexicographically, e.g.
/// `x + 2*x*y + x^2`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut order: Vec<(&Vec<u32>, &BigInt)> = self.terms.iter().collect();
        order.sort_by_key(|(e, _)| degree(e));
        for (i, (e, c)) in order.into_iter().enumerate() {
            let negative = c.sign() == num_bigint::Sign::Minus;
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = c.magnitude();
            let mut factors = Vec::new();
            if !magnitude.is_one() || e.iter().all(|&d| d == 0) {
                factors.push(magnitude.to_string());
            }
            for (j, &d) in e.iter().enumerate() {
                let name = VARIABLES.get(j).map_or_else(|| format!("v{j}"), |s| s.to_string());
                match d {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{d}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

/// `A = seed + A(σ_1, …, σ_m)`, solved by iteration from `A_0 = seed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalEquation {
    seed: Polynomial,
    sigma: Vec<Polynomial>,
}

impl FunctionalEquation {
    pub fn new(seed: Polynomial, sigma: Vec<Polynomial>) -> Result<FunctionalEquation> {
        let m = sigma.len();
        if m == 0 {
            return Err(Error::ArityMismatch { expected: 1, found: 0 });
        }
        for p in sigma.iter().chain([&seed]) {
            if p.arity() != m {
                return Err(Error::ArityMismatch { expected: m, found: p.arity() });
            }
        }
        if let Some(j) = sigma.iter().position(|s| !s.constant_term().is_zero()) {
            return Err(Error::ConstantTerm(j));
        }
        Ok(FunctionalEquation { seed, sigma })
    }

    /// The equation `A = x + A(σ)` with `σ` given in text form.
    pub fn parse(sigma: &[&str]) -> Result<FunctionalEquation> {
        let m = sigma.len();
        if m == 0 {
            return Err(Error::ArityMismatch { expected: 1, found: 0 });
        }
        let sigma = sigma.iter().map(|s| Polynomial::parse(s, m)).collect::<Result<Vec<_>>>()?;
        FunctionalEquation::new(Polynomial::variable(m, 0), sigma)
    }

    pub fn arity(&self) -> usize {
        self.sigma.len()
    }

    pub fn seed(&self) -> &Polynomial {
        &self.seed
    }

    pub fn sigma(&self) -> &[Polynomial] {
        &self.sigma
    }

    /// `A_0, …, A_k` without truncation.
    pub fn iterates(&self, k: usize) -> Vec<Polynomial> {
        let mut out = vec![self.seed.clone()];
        for _ in 0..k {
            let last = out.last().expect("nonempty");
            let next = &self.seed + &last.compose(&self.sigma).expect("arity checked");
            out.push(next);
        }
        out
    }

    /// Iterates modulo total degree above `n` until two successive iterates
    /// agree, then reads off the coefficients of `x^1, …, x^n` with the
    /// other variables set to zero.
    ///
    /// Since no `σ_j` has a constant term, two agreeing truncated iterates
    /// agree with every later one, so the returned coefficients are exact.
    pub fn iterate_fixed_point(&self, n: u32) -> Result<Series> {
        let bound = 2 * n as usize + 4;
        let seed = self.seed.truncate(n);
        let mut a = seed.clone();
        for i in 1..=bound {
            let next = &seed + &a.compose_truncated(&self.sigma, n)?;
            if next == a {
                let coefficients = a.univariate_coefficients(n).into_iter().skip(1).collect();
                return Ok(Series { coefficients, iterations: i });
            }
            a = next;
        }
        Err(Error::NoStabilization(bound))
    }
}

/// Coefficients of a generating series counted by leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    /// `coefficients[k - 1]` counts objects with `k` leaves.
    pub coefficients: Vec<BigInt>,
    /// Iterations performed before the truncated iterates agreed.
    pub iterations: usize,
}

impl Series {
    /// Coefficient of `x^leaves`.
    pub fn leaves(&self, leaves: usize) -> Option<&BigInt> {
        leaves.checked_sub(1).and_then(|i| self.coefficients.get(i))
    }

    /// The coefficients as `u64`. Panics if one does not fit.
    pub fn to_u64(&self) -> Vec<u64> {
        self.coefficients
            .iter()
            .map(|c| c.to_u64().expect("coefficient fits in u64"))
            .collect()
    }

    /// `leaves=<n> count=<c>` lines.
    pub fn to_lines(&self) -> String {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| format!("leaves={} count={c}\n", i + 1))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("leaves,count\n");
        for (i, c) in self.coefficients.iter().enumerate() {
            out.push_str(&format!("{},{c}\n", i + 1));
        }
        out
    }
}

/// The four tree families with a grammar and a generating series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Balanced,
    Maximal,
    Intervals,
    MaximalIntervals,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Balanced, Family::Maximal, Family::Intervals, Family::MaximalIntervals];

    pub fn name(self) -> &'static str {
        match self {
            Family::Balanced => "balanced",
            Family::Maximal => "maximal",
            Family::Intervals => "intervals",
            Family::MaximalIntervals => "maximal-intervals",
        }
    }

    /// Number of objects with `nodes` internal nodes, by exhaustive search
    /// over balanced trees and the Tamari order.
    pub fn count_by_enumeration(self, nodes: usize) -> Result<usize> {
        Ok(match self {
            Family::Balanced => all_balanced_trees(nodes).len(),
            Family::Maximal => all_balanced_trees(nodes)
                .iter()
                .filter(|t| is_maximal_by_rotation(t).expect("balanced"))
                .count(),
            Family::Intervals => balanced_pairs(nodes)?.1.len(),
            Family::MaximalIntervals => {
                let (trees, pairs) = balanced_pairs(nodes)?;
                let minimal: Vec<bool> = trees.iter().map(|t| is_minimal_by_rotation(t).expect("balanced")).collect();
                let maximal: Vec<bool> = trees.iter().map(|t| is_maximal_by_rotation(t).expect("balanced")).collect();
                pairs.iter().filter(|&&(i, j)| minimal[i] && maximal[j]).count()
            }
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Family, String> {
        match s {
            "balanced" => Ok(Family::Balanced),
            "maximal" => Ok(Family::Maximal),
            "intervals" => Ok(Family::Intervals),
            "maximal-intervals" | "maximal_intervals" => Ok(Family::MaximalIntervals),
            _ => Err(format!(
                "unknown family `{s}` (expected balanced, maximal, intervals or maximal-intervals)"
            )),
        }
    }
}

pub fn builtin_equation(family: Family) -> FunctionalEquation {
    let sigma: &[&str] = match family {
        Family::Balanced => &["x^2 + 2*x*y", "x"],
        Family::Maximal => &["x^2 + x*y + y*z", "x", "x*y"],
        Family::Intervals => &["x^2 + 2*x*y + z", "x", "x^3 + x^2*y"],
        Family::MaximalIntervals => &["x^2 + 2*y*z + t", "x", "y*z + t", "x^3 + x^2*y"],
    };
    FunctionalEquation::parse(sigma).expect("built-in equations are well formed")
}

/// A tree whose external positions are leaves or buds, with labeled and
/// possibly marked internal nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BudTree {
    Leaf,
    Bud(usize),
    Node { label: i64, marked: bool, left: Box<BudTree>, right: Box<BudTree> },
}

impl BudTree {
    pub fn node(label: i64, left: BudTree, right: BudTree) -> BudTree {
        BudTree::Node { label, marked: false, left: Box::new(left), right: Box::new(right) }
    }

    pub fn marked(label: i64, left: BudTree, right: BudTree) -> BudTree {
        BudTree::Node { label, marked: true, left: Box::new(left), right: Box::new(right) }
    }

    pub fn buds(&self) -> usize {
        match self {
            BudTree::Leaf => 0,
            BudTree::Bud(_) => 1,
            BudTree::Node { left, right, .. } => left.buds() + right.buds(),
        }
    }

    /// Leaves plus buds: the leaf count once finalized.
    pub fn external(&self) -> usize {
        match self {
            BudTree::Leaf | BudTree::Bud(_) => 1,
            BudTree::Node { left, right, .. } => left.external() + right.external(),
        }
    }

    /// The underlying tree, buds read as leaves.
    pub fn shape(&self) -> Tree {
        match self {
            BudTree::Leaf | BudTree::Bud(_) => Tree::Leaf,
            BudTree::Node { left, right, .. } => Tree::join(left.shape(), right.shape()),
        }
    }

    /// Node labels in infix order.
    pub fn labels(&self) -> Vec<i64> {
        let mut out = Vec::new();
        self.visit(&mut |label, _| out.push(label));
        out
    }

    /// Infix positions of the marked nodes.
    pub fn marks(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut pos = 0;
        self.visit(&mut |_, marked| {
            pos += 1;
            if marked {
                out.insert(pos);
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(i64, bool)) {
        if let BudTree::Node { label, marked, left, right } = self {
            left.visit(f);
            f(*label, *marked);
            right.visit(f);
        }
    }

    /// The marked tree read off a finalized bud tree.
    pub fn to_marked_tree(&self) -> Result<MarkedTree> {
        if self.buds() > 0 {
            return Err(Error::InvalidMarking("bud tree is not finalized".into()));
        }
        MarkedTree::new(self.shape(), self.marks())
    }
}

/// Rules of a synchronous grammar, one list of alternatives per bud.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynchronousGrammar {
    names: Vec<String>,
    axiom: usize,
    rules: Vec<Vec<BudTree>>,
    finalizable: Vec<bool>,
}

impl SynchronousGrammar {
    pub fn new(
        names: Vec<String>,
        axiom: usize,
        rules: Vec<Vec<BudTree>>,
        finalizable: Vec<bool>,
    ) -> Result<SynchronousGrammar> {
        let k = names.len();
        if rules.len() != k || finalizable.len() != k || axiom >= k {
            return Err(Error::InvalidGrammar("rule, name and finalizable lists disagree".into()));
        }
        fn max_bud(t: &BudTree) -> Option<usize> {
            match t {
                BudTree::Leaf => None,
                BudTree::Bud(b) => Some(*b),
                BudTree::Node { left, right, .. } => max_bud(left).max(max_bud(right)),
            }
        }
        for alt in rules.iter().flatten() {
            if max_bud(alt).is_some_and(|b| b >= k) {
                return Err(Error::InvalidGrammar("rule refers to an unknown bud".into()));
            }
            if alt.buds() == 0 {
                return Err(Error::InvalidGrammar("rule alternative without buds".into()));
            }
        }
        Ok(SynchronousGrammar { names, axiom, rules, finalizable })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn axiom(&self) -> BudTree {
        BudTree::Bud(self.axiom)
    }

    pub fn rules(&self) -> &[Vec<BudTree>] {
        &self.rules
    }

    pub fn bud(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parses a bud tree: `.` is a leaf, a bud is its name, `(L label R)` a
    /// node and `[L label R]` a marked node.
    pub fn parse_bud_tree(&self, text: &str) -> Result<BudTree> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let t = self.parse_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::InvalidGrammar(format!("trailing input in `{text}`")));
        }
        Ok(t)
    }

    fn parse_tokens(&self, tokens: &[String], pos: &mut usize) -> Result<BudTree> {
        let bad = |m: String| Error::InvalidGrammar(m);
        let tok = tokens.get(*pos).ok_or_else(|| bad("unexpected end of bud tree".into()))?;
        *pos += 1;
        match tok.as_str() {
            "." => Ok(BudTree::Leaf),
            "(" | "[" => {
                let close = if tok == "(" { ")" } else { "]" };
                let left = self.parse_tokens(tokens, pos)?;
                let label = tokens
                    .get(*pos)
                    .and_then(|l| l.parse::<i64>().ok())
                    .ok_or_else(|| bad("expected a node label".into()))?;
                *pos += 1;
                let right = self.parse_tokens(tokens, pos)?;
                if tokens.get(*pos).map(String::as_str) != Some(close) {
                    return Err(bad(format!("expected `{close}`")));
                }
                *pos += 1;
                Ok(BudTree::Node { label, marked: close == "]", left: Box::new(left), right: Box::new(right) })
            }
            name => self.bud(name).map(BudTree::Bud).ok_or_else(|| bad(format!("unknown bud `{name}`"))),
        }
    }

    /// Inverse of [`parse_bud_tree`](Self::parse_bud_tree).
    pub fn format_bud_tree(&self, t: &BudTree) -> String {
        match t {
            BudTree::Leaf => ".".into(),
            BudTree::Bud(b) => self.names[*b].clone(),
            BudTree::Node { label, marked, left, right } => {
                let (open, close) = if *marked { ('[', ']') } else { ('(', ')') };
                format!("{open}{} {label} {}{close}", self.format_bud_tree(left), self.format_bud_tree(right))
            }
        }
    }

    /// All bud trees obtained by replacing every bud of `t` at once.
    pub fn derive_step(&self, t: &BudTree) -> Vec<BudTree> {
        self.derive_within(t, usize::MAX)
    }

    /// Like [`derive_step`](Self::derive_step), keeping only results with at
    /// most `max_external` external positions.
    pub fn derive_step_within(&self, t: &BudTree, max_external: usize) -> Vec<BudTree> {
        self.derive_within(t, max_external)
    }

    fn min_external(&self, t: &BudTree) -> usize {
        match t {
            BudTree::Leaf => 1,
            BudTree::Bud(b) => self.rules[*b].iter().map(BudTree::external).min().unwrap_or(1),
            BudTree::Node { left, right, .. } => self.min_external(left) + self.min_external(right),
        }
    }

    fn derive_within(&self, t: &BudTree, budget: usize) -> Vec<BudTree> {
        match t {
            BudTree::Leaf => vec![BudTree::Leaf],
            BudTree::Bud(b) => self.rules[*b].iter().filter(|a| a.external() <= budget).cloned().collect(),
            BudTree::Node { label, marked, left, right } => {
                let (min_l, min_r) = (self.min_external(left), self.min_external(right));
                if min_l.saturating_add(min_r) > budget {
                    return Vec::new();
                }
                let ls = self.derive_within(left, budget - min_r);
                let rs = self.derive_within(right, budget - min_l);
                let mut out = Vec::new();
                for l in &ls {
                    let room = budget - l.external().min(budget);
                    for r in rs.iter().filter(|r| r.external() <= room) {
                        out.push(BudTree::Node {
                            label: *label,
                            marked: *marked,
                            left: Box::new(l.clone()),
                            right: Box::new(r.clone()),
                        });
                    }
                }
                out
            }
        }
    }

    /// Replaces the buds by leaves, if all of them are finalizable.
    pub fn finalize(&self, t: &BudTree) -> Option<BudTree> {
        match t {
            BudTree::Leaf => Some(BudTree::Leaf),
            BudTree::Bud(b) => self.finalizable[*b].then_some(BudTree::Leaf),
            BudTree::Node { label, marked, left, right } => Some(BudTree::Node {
                label: *label,
                marked: *marked,
                left: Box::new(self.finalize(left)?),
                right: Box::new(self.finalize(right)?),
            }),
        }
    }

    /// Finalized trees reachable from the axiom within `steps` derivation
    /// steps, sorted and without duplicates. Bud trees with more than
    /// `max_leaves` external positions are dropped; no rule lowers that
    /// count, so nothing smaller is lost.
    pub fn generate(&self, steps: usize, max_leaves: Option<usize>) -> Vec<BudTree> {
        let mut outputs = BTreeSet::new();
        let mut current = BTreeSet::from([self.axiom()]);
        for step in 0..=steps {
            outputs.extend(current.iter().filter_map(|t| self.finalize(t)));
            if step == steps {
                break;
            }
            let budget = max_leaves.unwrap_or(usize::MAX);
            current = current.iter().flat_map(|t| self.derive_within(t, budget)).collect();
        }
        outputs.into_iter().collect()
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if matches!(c, '(' | ')' | '[' | ']') || c.is_whitespace() {
            if !word.is_empty() {
                out.push(std::mem::take(&mut word));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        } else {
            word.push(c);
        }
    }
    if !word.is_empty() {
        out.push(word);
    }
    out
}

pub fn builtin_grammar(family: Family) -> SynchronousGrammar {
    use BudTree::Bud;
    let n = BudTree::node;
    // marked rotation root over an unmarked left child
    let marked_templates = |x: usize, y: usize| {
        vec![
            BudTree::marked(-1, n(0, Bud(x), Bud(x)), Bud(x)),
            BudTree::marked(-1, n(-1, Bud(x), Bud(y)), Bud(x)),
        ]
    };
    let (names, rules): (&[&str], Vec<Vec<BudTree>>) = match family {
        Family::Balanced => (
            &["x", "y"],
            vec![vec![n(-1, Bud(0), Bud(1)), n(0, Bud(0), Bud(0)), n(1, Bud(1), Bud(0))], vec![Bud(0)]],
        ),
        Family::Maximal => (
            &["x", "y", "z"],
            vec![
                vec![n(0, Bud(0), Bud(0)), n(1, Bud(1), Bud(0)), n(-1, Bud(2), Bud(1))],
                vec![Bud(0)],
                vec![n(1, Bud(1), Bud(0))],
            ],
        ),
        Family::Intervals => (
            &["x", "y", "z"],
            vec![
                vec![n(-1, Bud(0), Bud(1)), n(0, Bud(0), Bud(0)), n(1, Bud(1), Bud(0)), Bud(2)],
                vec![Bud(0)],
                marked_templates(0, 1),
            ],
        ),
        Family::MaximalIntervals => (
            &["x", "y", "z1", "z2", "t"],
            vec![
                vec![n(0, Bud(0), Bud(0)), n(1, Bud(1), Bud(2)), n(-1, Bud(3), Bud(1)), Bud(4)],
                vec![Bud(0)],
                vec![n(-1, Bud(3), Bud(1)), Bud(4)],
                vec![n(1, Bud(1), Bud(2)), Bud(4)],
                marked_templates(0, 1),
            ],
        ),
    };
    let finalizable = (0..names.len()).map(|i| i == 0).collect();
    SynchronousGrammar::new(names.iter().map(|s| s.to_string()).collect(), 0, rules, finalizable)
        .expect("built-in grammars are well formed")
}

/// A balanced tree with marked conservative rotation roots, encoding the
/// interval from the tree to the result of all the marked rotations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedTree {
    tree: Tree,
    marks: BTreeSet<usize>,
}

impl MarkedTree {
    pub fn new(tree: Tree, marks: BTreeSet<usize>) -> Result<MarkedTree> {
        if !tree.is_balanced() {
            return Err(Error::NotBalanced);
        }
        for &y in &marks {
            let conservative = is_conservative(&tree, RotationSite::new(y)).unwrap_or(false);
            if !conservative {
                return Err(Error::InvalidMarking(format!(
                    "node {y} is not the root of a conservative rotation"
                )));
            }
            let left = tree.subtree(y)?.left().expect("subtree at a node");
            let x = y - left.right().expect("rotation site has a left child").nodes() - 1;
            if marks.contains(&x) {
                return Err(Error::InvalidMarking(format!("node {y} and its left child {x} are both marked")));
            }
        }
        Ok(MarkedTree { tree, marks })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn marks(&self) -> &BTreeSet<usize> {
        &self.marks
    }

    /// The tree after applying every marked rotation.
    pub fn upper(&self) -> Result<Tree> {
        let mut t = self.tree.clone();
        for &y in &self.marks {
            t = tamari::rotate(&t, RotationSite::new(y))
                .map_err(|_| Error::InvalidMarking(format!("node {y} is no longer a rotation site")))?;
        }
        if !t.is_balanced() {
            return Err(Error::InvalidMarking("marked rotations do not keep the tree balanced".into()));
        }
        Ok(t)
    }
}

impl fmt::Display for MarkedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let marks: Vec<String> = self.marks.iter().map(usize::to_string).collect();
        write!(f, "{} marks=[{}]", self.tree, marks.join(","))
    }
}

/// The lower end marked at the rotation roots leading to the upper end.
pub fn interval_to_marked(iv: &Interval) -> Result<MarkedTree> {
    let labeling = hypercube_labeling(iv)?;
    MarkedTree::new(iv.lower.clone(), labeling.ground.0)
}

pub fn marked_to_interval(m: &MarkedTree) -> Result<Interval> {
    tamari::interval(&m.tree, &m.upper()?)
}
