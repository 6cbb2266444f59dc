//! Finite abelian groups in invariant-factor form `C_{n_1} + ... + C_{n_r}`
//! with `n_r | ... | n_1`, their elements, subgroups and quotients.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{snf, IntMat};

/// Default cap on `|G|` for subgroup enumeration.
pub const DEFAULT_SUBGROUP_CAP: u64 = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

/// A group element as its coordinate vector, each coordinate reduced modulo
/// the corresponding invariant factor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(Vec<u64>);

impl Element {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStats {
    pub rank: usize,
    pub exponent: u64,
    pub order: u64,
    pub dstar: u64,
    pub kappa: usize,
}

impl TryFrom<Vec<u64>> for AbelianGroup {
    type Error = Error;

    fn try_from(factors: Vec<u64>) -> Result<Self> {
        AbelianGroup::new(&factors)
    }
}

impl From<AbelianGroup> for Vec<u64> {
    fn from(g: AbelianGroup) -> Self {
        g.factors
    }
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "C1");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("C{n}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl AbelianGroup {
    /// Strict constructor: factors must be `>= 2` and already form a
    /// divisibility chain `n_{i+1} | n_i`.
    pub fn new(factors: &[u64]) -> Result<Self> {
        Self::make(factors, false)
    }

    /// Builds a group from a factor list. With `normalize` set the list may be
    /// any decomposition (e.g. a primary one such as `[2, 4]` or `[2, 3]`); it is
    /// brought to invariant-factor form via the Smith normal form of the
    /// diagonal relation matrix.
    pub fn make(factors: &[u64], normalize: bool) -> Result<Self> {
        if let Some(&bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::FactorTooSmall(bad));
        }
        let chain_ok = factors.windows(2).all(|w| w[0] % w[1] == 0);
        if chain_ok {
            return Ok(AbelianGroup {
                factors: factors.to_vec(),
            });
        }
        if !normalize {
            return Err(Error::NonDivisibleChain(factors.to_vec()));
        }
        let n = factors.len();
        let diag = IntMat::diagonal(factors, n, n);
        let mut invariants: Vec<u64> = snf(&diag)
            .diagonal
            .iter()
            .map(|d| d.abs().to_u64().expect("invariant factor fits in u64"))
            .filter(|&d| d > 1)
            .collect();
        invariants.reverse();
        Ok(AbelianGroup { factors: invariants })
    }

    pub fn trivial() -> Self {
        AbelianGroup { factors: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.first().copied().unwrap_or(1)
    }

    pub fn is_cyclic(&self) -> bool {
        self.rank() <= 1
    }

    pub fn is_p_group(&self) -> bool {
        let n = self.order();
        if n == 1 {
            return true;
        }
        let p = smallest_prime_factor(n);
        let mut m = n;
        while m.is_multiple_of(p) {
            m /= p;
        }
        m == 1
    }

    /// `d*(G) = sum (n_i - 1)`.
    pub fn dstar(&self) -> u64 {
        self.factors.iter().map(|n| n - 1).sum()
    }

    /// Helly dimension, `rank + 1`; the trivial group gets 1.
    pub fn kappa(&self) -> usize {
        if self.factors.is_empty() {
            1
        } else {
            self.rank() + 1
        }
    }

    pub fn stats(&self) -> GroupStats {
        GroupStats {
            rank: self.rank(),
            exponent: self.exponent(),
            order: self.order(),
            dstar: self.dstar(),
            kappa: self.kappa(),
        }
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    /// The `i`-th standard generator (0-based), of order `n_i`.
    pub fn generator(&self, i: usize) -> Element {
        let mut c = vec![0; self.rank()];
        c[i] = 1 % self.factors[i];
        Element(c)
    }

    pub fn contains(&self, g: &Element) -> bool {
        g.0.len() == self.rank() && g.0.iter().zip(&self.factors).all(|(c, n)| c < n)
    }

    /// Element with the given coordinates, which must already be reduced.
    pub fn element(&self, coords: &[u64]) -> Result<Element> {
        let e = Element(coords.to_vec());
        if self.contains(&e) {
            Ok(e)
        } else {
            Err(Error::ElementNotInGroup {
                element: coords.to_vec(),
                factors: self.factors.clone(),
            })
        }
    }

    /// Element from arbitrary integer coordinates, reduced modulo the factors.
    pub fn reduce(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: coords.len(),
            });
        }
        Ok(Element(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        ))
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        )
    }

    pub fn add_assign(&self, a: &mut Element, b: &Element) {
        for ((x, y), n) in a.0.iter_mut().zip(&b.0).zip(&self.factors) {
            *x = (*x + y) % n;
        }
    }

    pub fn neg(&self, a: &Element) -> Element {
        Element(a.0.iter().zip(&self.factors).map(|(x, n)| (n - x) % n).collect())
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    /// `k * a` for any integer `k`.
    pub fn scale(&self, k: i64, a: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &n)| {
                    let r = (k as i128 * x as i128).rem_euclid(n as i128);
                    r as u64
                })
                .collect(),
        )
    }

    /// All elements in mixed-radix order (first coordinate fastest).
    pub fn elements(&self) -> Vec<Element> {
        (0..self.order() as usize).map(|i| self.element_at(i)).collect()
    }

    pub fn index_of(&self, g: &Element) -> usize {
        let mut idx = 0usize;
        let mut radix = 1usize;
        for (c, n) in g.0.iter().zip(&self.factors) {
            idx += *c as usize * radix;
            radix *= *n as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> Element {
        let mut c = Vec::with_capacity(self.rank());
        for &n in &self.factors {
            c.push((idx % n as usize) as u64);
            idx /= n as usize;
        }
        Element(c)
    }

    /// Smallest `d >= 1` with `d g = 0`.
    pub fn element_order(&self, g: &Element) -> u64 {
        g.0.iter()
            .zip(&self.factors)
            .fold(1, |acc, (&c, &n)| acc.lcm(&(n / c.gcd(&n))))
    }

    /// Every group in invariant-factor form with `|G| <= max_order` and
    /// `rank <= max_rank`, sorted by order then factors. Includes the trivial
    /// group when `include_trivial` is set.
    pub fn all_up_to(max_order: u64, max_rank: usize, include_trivial: bool) -> Vec<AbelianGroup> {
        fn extend(prefix: &mut Vec<u64>, prod: u64, max_order: u64, max_rank: usize, out: &mut Vec<AbelianGroup>) {
            if prefix.len() == max_rank {
                return;
            }
            let limit = prefix.last().copied().unwrap_or(max_order);
            for n in 2..=limit {
                if prod * n > max_order {
                    break;
                }
                if prefix.last().is_none_or(|&last| last % n == 0) {
                    prefix.push(n);
                    out.push(AbelianGroup {
                        factors: prefix.clone(),
                    });
                    extend(prefix, prod * n, max_order, max_rank, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        if include_trivial {
            out.push(AbelianGroup::trivial());
        }
        extend(&mut Vec::new(), 1, max_order, max_rank, &mut out);
        out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| b.factors.cmp(&a.factors)));
        out
    }
}

pub(crate) fn smallest_prime_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 2;
    }
    n
}

/// `d*` of the factor list, also for lists that are not in invariant form.
pub fn dstar_of(factors: &[u64]) -> u64 {
    factors.iter().map(|n| n - 1).sum()
}

pub fn group_stats(group: &AbelianGroup) -> GroupStats {
    group.stats()
}

pub fn element_order(group: &AbelianGroup, g: &Element) -> u64 {
    group.element_order(g)
}

/// A subgroup materialized as its member set, together with the generators it
/// was built from.
#[derive(Clone, Debug)]
pub struct Subgroup {
    members: BTreeSet<Element>,
    generators: Vec<Element>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    /// Wraps a member set without checking closure; use
    /// [`Subgroup::validate`] before relying on it.
    pub fn from_members_unchecked<I: IntoIterator<Item = Element>>(members: I) -> Self {
        let members: BTreeSet<Element> = members.into_iter().collect();
        let generators = members.iter().cloned().collect();
        Subgroup { members, generators }
    }

    pub fn trivial(group: &AbelianGroup) -> Self {
        Subgroup {
            members: [group.zero()].into_iter().collect(),
            generators: Vec::new(),
        }
    }

    pub fn members(&self) -> &BTreeSet<Element> {
        &self.members
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.members.contains(g)
    }

    /// Closure check: contains zero and is closed under addition and
    /// negation, all members lying in `group`.
    pub fn validate(&self, group: &AbelianGroup) -> Result<()> {
        if !self.members.contains(&group.zero()) || !self.members.iter().all(|m| group.contains(m)) {
            return Err(Error::NotASubgroup);
        }
        for a in &self.members {
            if !self.members.contains(&group.neg(a)) {
                return Err(Error::NotASubgroup);
            }
            for b in &self.members {
                if !self.members.contains(&group.add(a, b)) {
                    return Err(Error::NotASubgroup);
                }
            }
        }
        Ok(())
    }

    /// The subgroup generated by this one and `g`, as a union of cosets.
    pub fn join_element(&self, group: &AbelianGroup, g: &Element) -> Subgroup {
        let mut members = self.members.clone();
        let mut shift = g.clone();
        while !self.members.contains(&shift) {
            for m in &self.members {
                members.insert(group.add(m, &shift));
            }
            group.add_assign(&mut shift, g);
        }
        let mut generators = self.generators.clone();
        generators.push(g.clone());
        Subgroup { members, generators }
    }
}

/// Smallest subgroup containing `gens` (breadth-first closure under addition).
pub fn subgroup_closure(group: &AbelianGroup, gens: &[Element]) -> Subgroup {
    let mut members: HashSet<Element> = HashSet::new();
    let zero = group.zero();
    members.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = group.add(&x, g);
            if members.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    Subgroup {
        members: members.into_iter().collect(),
        generators: gens.to_vec(),
    }
}

/// Smallest `d >= 1` with `d g` in `h`.
pub fn order_mod_subgroup(group: &AbelianGroup, g: &Element, h: &Subgroup) -> Result<u64> {
    h.validate(group)?;
    Ok(order_mod_members(group, g, h))
}

pub(crate) fn order_mod_members(group: &AbelianGroup, g: &Element, h: &Subgroup) -> u64 {
    let mut d = 1;
    let mut x = g.clone();
    while !h.contains(&x) {
        group.add_assign(&mut x, g);
        d += 1;
    }
    d
}

/// Every subgroup exactly once, sorted by order and then member set.
///
/// Round `t` holds the subgroups generated by at most `t` elements; since
/// every subgroup needs at most `rank(G)` generators, `rank(G)` rounds of
/// joining single elements reach all of them.
pub fn all_subgroups(group: &AbelianGroup, cap: u64) -> Result<Vec<Subgroup>> {
    if group.order() > cap {
        return Err(Error::GroupTooLarge {
            order: group.order(),
            cap,
        });
    }
    let elements = group.elements();
    let mut seen: HashSet<Vec<Element>> = HashSet::new();
    let trivial = Subgroup::trivial(group);
    seen.insert(trivial.members.iter().cloned().collect());
    let mut all = vec![trivial.clone()];
    let mut frontier = vec![trivial];
    for _ in 0..group.rank() {
        let mut next = Vec::new();
        for h in &frontier {
            for g in &elements {
                if h.contains(g) {
                    continue;
                }
                let joined = h.join_element(group, g);
                if seen.insert(joined.members.iter().cloned().collect()) {
                    next.push(joined);
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.cmp(&b.members)));
    Ok(all)
}

/// Invariant factors of `G / K`, via the Smith normal form of the relation
/// matrix whose columns are `diag(n_1, ..., n_r)` and lifts of the
/// generators of `K`.
pub fn quotient_invariants(group: &AbelianGroup, k: &Subgroup) -> Result<AbelianGroup> {
    k.validate(group)?;
    let r = group.rank();
    let gens = k.generators();
    let mut rel = IntMat::zeros(r, r + gens.len());
    for (i, &n) in group.factors().iter().enumerate() {
        rel.set(i, i, BigInt::from(n));
    }
    for (j, g) in gens.iter().enumerate() {
        for (i, &c) in g.coords().iter().enumerate() {
            rel.set(i, r + j, BigInt::from(c));
        }
    }
    let mut factors: Vec<u64> = snf(&rel)
        .diagonal
        .iter()
        .map(|d| d.abs().to_u64().expect("invariant factor fits in u64"))
        .filter(|&d| d > 1)
        .collect();
    factors.reverse();
    AbelianGroup::new(&factors)
}
