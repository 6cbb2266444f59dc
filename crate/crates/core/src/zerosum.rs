//! Zero-sum vectors over a sequence of group elements: bounded enumeration of
//! the monoid `B(a_1, ..., a_k)`, atoms and the Davenport constant, normal
//! forms along the subgroup chain, and constructive bounded generation of the
//! kernel lattice.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::abelian_group::{order_mod_members, AbelianGroup, Element, Subgroup};
use crate::error::{Error, Result};

/// Default cap on `|G|` for the Davenport search.
pub const DEFAULT_DAVENPORT_CAP: u64 = 32;

/// An ordered sequence of elements of one group; repetition is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GSequence {
    group: AbelianGroup,
    elems: Vec<Element>,
}

impl GSequence {
    pub fn new(group: &AbelianGroup, elems: Vec<Element>) -> Result<Self> {
        if let Some(bad) = elems.iter().find(|e| !group.contains(e)) {
            return Err(Error::ElementNotInGroup {
                element: bad.coords().to_vec(),
                factors: group.factors().to_vec(),
            });
        }
        Ok(GSequence {
            group: group.clone(),
            elems,
        })
    }

    pub fn from_coords(group: &AbelianGroup, coords: &[Vec<u64>]) -> Result<Self> {
        let elems = coords.iter().map(|c| group.element(c)).collect::<Result<Vec<_>>>()?;
        Ok(GSequence {
            group: group.clone(),
            elems,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn elems(&self) -> &[Element] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// The subsequence at the given positions, in the order given.
    pub fn select(&self, positions: &[usize]) -> GSequence {
        GSequence {
            group: self.group.clone(),
            elems: positions.iter().map(|&i| self.elems[i].clone()).collect(),
        }
    }

    pub fn prefix(&self, len: usize) -> GSequence {
        GSequence {
            group: self.group.clone(),
            elems: self.elems[..len].to_vec(),
        }
    }

    /// `sum m_i a_i` for an integer coefficient vector.
    pub fn weighted_sum(&self, m: &[i64]) -> Element {
        let mut acc = self.group.zero();
        for (a, &c) in self.elems.iter().zip(m) {
            let t = self.group.scale(c, a);
            self.group.add_assign(&mut acc, &t);
        }
        acc
    }

    pub fn weighted_sum_u(&self, m: &[u64]) -> Element {
        let mut acc = self.group.zero();
        for (a, &c) in self.elems.iter().zip(m) {
            let t = self.group.scale(c as i64, a);
            self.group.add_assign(&mut acc, &t);
        }
        acc
    }

    pub fn is_zero_sum(&self, m: &[u64]) -> bool {
        m.len() == self.len() && self.weighted_sum_u(m).is_zero()
    }
}

/// A vector `m` in `N_0^k` with `sum m_i a_i = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZeroSumVec(Vec<u64>);

impl ZeroSumVec {
    pub fn new(seq: &GSequence, m: Vec<u64>) -> Result<Self> {
        if m.len() != seq.len() {
            return Err(Error::DimensionMismatch {
                expected: seq.len(),
                got: m.len(),
            });
        }
        if !seq.is_zero_sum(&m) {
            return Err(Error::NotZeroSum(m));
        }
        Ok(ZeroSumVec(m))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u64> {
        self.0
    }

    pub fn length(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&c| c as i64).collect()
    }
}

/// Normal form `b = sum l_i a_i`, `0 <= l_i < d_i`, along the subgroup chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalForm {
    pub coefficients: Vec<u64>,
    pub chain_orders: Vec<u64>,
    pub deficit: u64,
}

/// The chain `{0} = H_0 <= H_1 <= ... <= H_k` with `H_i = <a_1, ..., a_i>`.
#[derive(Clone, Debug)]
pub struct SubgroupChain {
    seq: GSequence,
    subgroups: Vec<Subgroup>,
    orders: Vec<u64>,
}

impl SubgroupChain {
    pub fn new(seq: &GSequence) -> Self {
        let group = seq.group();
        let mut h = Subgroup::trivial(group);
        let mut subgroups = vec![h.clone()];
        let mut orders = Vec::with_capacity(seq.len());
        for a in seq.elems() {
            orders.push(order_mod_members(group, a, &h));
            h = h.join_element(group, a);
            subgroups.push(h.clone());
        }
        SubgroupChain {
            seq: seq.clone(),
            subgroups,
            orders,
        }
    }

    /// `d_i`: order of `a_i` modulo `<a_1, ..., a_{i-1}>`.
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// `<a_1, ..., a_i>`.
    pub fn subgroup(&self, i: usize) -> &Subgroup {
        &self.subgroups[i]
    }

    pub fn span(&self) -> &Subgroup {
        self.subgroups.last().expect("chain has at least H_0")
    }

    pub fn normal_form(&self, b: &Element) -> Result<NormalForm> {
        let group = self.seq.group();
        if !self.span().contains(b) {
            return Err(Error::NotInSpan);
        }
        let k = self.seq.len();
        let mut coefficients = vec![0; k];
        let mut rest = b.clone();
        for i in (0..k).rev() {
            let a = &self.seq.elems()[i];
            let below = &self.subgroups[i];
            let mut l = 0;
            while !below.contains(&rest) {
                rest = group.sub(&rest, a);
                l += 1;
                debug_assert!(l < self.orders[i], "coset search overran d_i");
            }
            coefficients[i] = l;
        }
        let deficit = coefficients.iter().zip(&self.orders).map(|(l, d)| d - 1 - l).sum();
        Ok(NormalForm {
            coefficients,
            chain_orders: self.orders.clone(),
            deficit,
        })
    }
}

pub fn chain_orders(seq: &GSequence) -> Vec<u64> {
    SubgroupChain::new(seq).orders
}

pub fn normal_form(seq: &GSequence, b: &Element) -> Result<NormalForm> {
    SubgroupChain::new(seq).normal_form(b)
}

/// `g_i`: order of `a_i` modulo the subgroup generated by all other entries.
pub fn orders_mod_others(seq: &GSequence) -> Vec<u64> {
    let group = seq.group();
    (0..seq.len())
        .map(|i| {
            let mut h = Subgroup::trivial(group);
            for (j, a) in seq.elems().iter().enumerate() {
                if j != i && !h.contains(a) {
                    h = h.join_element(group, a);
                }
            }
            order_mod_members(group, &seq.elems()[i], &h)
        })
        .collect()
}

/// Calls `visit` on every `m` in `B(seq)` with `|m| <= bound` (or the
/// span-sufficient part of it, see [`enumerate_b`]) in lexicographic order.
pub fn for_each_zero_sum<F: FnMut(&[u64])>(seq: &GSequence, bound: u64, span_only: bool, mut visit: F) {
    let group = seq.group();
    let k = seq.len();
    let orders: Vec<u64> = seq.elems().iter().map(|a| group.element_order(a)).collect();
    let mut m = vec![0u64; k];

    // In span-only mode the pure powers ord(a_i) e_i have to be merged into
    // the lexicographic stream; they sort after every vector sharing their
    // zero prefix, i.e. right after the coordinate-i loop finishes with
    // m_1 = ... = m_{i-1} = 0.
    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(&[u64])>(
        i: usize,
        remaining: u64,
        sum: &Element,
        prefix_zero: bool,
        seq: &GSequence,
        orders: &[u64],
        span_only: bool,
        m: &mut Vec<u64>,
        visit: &mut F,
    ) {
        let group = seq.group();
        let k = m.len();
        if i == k {
            if sum.is_zero() {
                visit(m);
            }
            return;
        }
        let a = &seq.elems()[i];
        let cap = if span_only {
            remaining.min(orders[i] - 1)
        } else {
            remaining
        };
        let mut s = sum.clone();
        for c in 0..=cap {
            m[i] = c;
            rec(
                i + 1,
                remaining - c,
                &s,
                prefix_zero && c == 0,
                seq,
                orders,
                span_only,
                m,
                visit,
            );
            group.add_assign(&mut s, a);
        }
        m[i] = 0;
        if span_only && prefix_zero && orders[i] <= remaining {
            // emitted only at the top of an all-zero prefix, so `sum` is zero
            m[i] = orders[i];
            visit(m);
            m[i] = 0;
        }
    }

    let zero = group.zero();
    rec(0, bound, &zero, true, seq, &orders, span_only, &mut m, &mut visit);
}

/// `{m in B(a_1..a_k) : |m| <= bound}` in lexicographic order.
///
/// With `span_only` the result is restricted to `{m : m_i < ord(a_i)}` plus
/// the pure powers `ord(a_i) e_i` of length `<= bound`. Any `m` with
/// `m_i >= ord(a_i)` splits as `ord(a_i) e_i + m'` with both parts in `B` and
/// no longer than `m`, so the restricted set spans the same lattice.
pub fn enumerate_b(seq: &GSequence, bound: u64, span_only: bool) -> Vec<ZeroSumVec> {
    let mut out = Vec::new();
    for_each_zero_sum(seq, bound, span_only, |m| out.push(ZeroSumVec(m.to_vec())));
    out
}

/// `m = (l_1, ..., l_{k-1}, d_k)` where `(l_i)` is the normal form of
/// `-d_k a_k` with respect to `a_1, ..., a_{k-1}`. Lies in `B`, has
/// `m_k = d_k` and `|m| <= d*(G) + 1`.
pub fn construct_relation(seq: &GSequence) -> Result<ZeroSumVec> {
    if seq.is_empty() {
        return Err(Error::InvalidSubset(
            "construct_relation needs a nonempty sequence".into(),
        ));
    }
    let k = seq.len();
    let group = seq.group();
    let prefix = seq.prefix(k - 1);
    let chain = SubgroupChain::new(&prefix);
    let last = &seq.elems()[k - 1];
    let dk = order_mod_members(group, last, chain.span());
    let target = group.neg(&group.scale(dk as i64, last));
    let nf = chain.normal_form(&target)?;
    let mut m = nf.coefficients;
    m.push(dk);
    Ok(ZeroSumVec(m))
}

/// Result of the Davenport search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DavenportResult {
    pub value: u64,
    /// An atom of maximal length, as element -> multiplicity.
    pub witness_atom: BTreeMap<Element, u64>,
}

impl DavenportResult {
    /// JSON object keyed by coordinate tuples such as `"(1,0)"`.
    pub fn witness_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .witness_atom
            .iter()
            .map(|(e, &c)| (e.to_string(), serde_json::Value::from(c)))
            .collect();
        serde_json::Value::Object(map)
    }
}

#[derive(Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// Davenport constant: the maximal length of an atom of `B(G)`.
///
/// Searches zero-sum free sequences (nondecreasing in element index) while
/// tracking the set of nonempty subsequence sums; a sequence stays zero-sum
/// free iff the negative of the next element is not already a subsequence
/// sum. A maximal zero-sum free `T` completes to the atom `T (-sigma(T))`.
pub fn davenport(group: &AbelianGroup, cap: u64) -> Result<DavenportResult> {
    let order = group.order();
    if order > cap {
        return Err(Error::GroupTooLarge { order, cap });
    }
    let n = order as usize;
    let add: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let a = group.element_at(i);
            (0..n)
                .map(|j| group.index_of(&group.add(&a, &group.element_at(j))))
                .collect()
        })
        .collect();
    let neg: Vec<usize> = (0..n)
        .map(|i| group.index_of(&group.neg(&group.element_at(i))))
        .collect();

    struct Search<'a> {
        n: usize,
        add: &'a [Vec<usize>],
        neg: &'a [usize],
        best_len: usize,
        best: Vec<usize>,
        current: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, start: usize, sums: &BitSet) {
            if self.current.len() > self.best_len {
                self.best_len = self.current.len();
                self.best = self.current.clone();
            }
            // each further element adds at least one new subsequence sum; bit 0 is a sentinel
            if self.current.len() + (self.n - sums.count()) <= self.best_len {
                return;
            }
            for g in start..self.n {
                if sums.get(self.neg[g]) {
                    continue;
                }
                let mut next = sums.clone();
                next.set(g);
                for s in sums.ones() {
                    next.set(self.add[s][g]);
                }
                self.current.push(g);
                self.run(g, &next);
                self.current.pop();
            }
        }
    }

    let mut search = Search {
        n,
        add: &add,
        neg: &neg,
        best_len: 0,
        best: Vec::new(),
        current: Vec::new(),
    };
    // zero is never part of a zero-sum free sequence: mark it as a sum
    let mut sums = BitSet::new(n);
    sums.set(0);
    search.run(1, &sums);

    let mut witness_atom = BTreeMap::new();
    let mut total = group.zero();
    for &g in &search.best {
        let e = group.element_at(g);
        group.add_assign(&mut total, &e);
        *witness_atom.entry(e).or_insert(0) += 1;
    }
    *witness_atom.entry(group.neg(&total)).or_insert(0) += 1;
    Ok(DavenportResult {
        value: search.best_len as u64 + 1,
        witness_atom,
    })
}

/// Whether a multiset over `G` (element -> multiplicity) is an atom of
/// `B(G)`: nonempty, zero-sum, and without a proper nonempty zero-sum
/// subsequence.
pub fn is_atom(group: &AbelianGroup, multiset: &BTreeMap<Element, u64>) -> bool {
    let seq: Vec<Element> = multiset
        .iter()
        .flat_map(|(e, &c)| std::iter::repeat_n(e.clone(), c as usize))
        .collect();
    if seq.is_empty() {
        return false;
    }
    let mut total = group.zero();
    for e in &seq {
        group.add_assign(&mut total, e);
    }
    if !total.is_zero() {
        return false;
    }
    // subsequence sums of everything but the last entry must avoid zero
    let mut sums: HashSet<Element> = HashSet::new();
    for e in &seq[..seq.len() - 1] {
        let mut next: HashSet<Element> = sums.iter().map(|s| group.add(s, e)).collect();
        next.insert(e.clone());
        if next.contains(&group.zero()) {
            return false;
        }
        sums.extend(next);
    }
    true
}

/// Checked integer combination `u - l m`.
/// Coefficient and exponent vector pairs.
type Terms = Vec<(i64, Vec<u64>)>;

fn sub_scaled(u: &mut [i64], l: i64, m: &[u64]) -> Result<()> {
    for (x, &c) in u.iter_mut().zip(m) {
        *x = (c as i64)
            .checked_mul(l)
            .and_then(|t| x.checked_sub(t))
            .ok_or_else(|| Error::NotInKernel(vec![*x]))?;
    }
    Ok(())
}

/// Writes `u` in the kernel lattice as `sum l_j m^(j)` with every `m^(j)` in
/// `B(seq)` of length at most `bound`, where `bound` is `d*(G)` or
/// `d*(G) + 1`.
///
/// With `d*(G) + 1` the last coordinate is peeled off prefix by prefix using
/// [`construct_relation`]. With `d*(G)` each step looks, over the remaining
/// coordinates (last one first), for either a bounded `m` hitting the order
/// of that coordinate modulo the others, or a bounded pair with
/// coordinate values 2 and 3 whose difference has that coordinate equal to 1.
pub fn decompose(seq: &GSequence, u: &[i64], bound: u64) -> Result<Vec<(i64, ZeroSumVec)>> {
    let group = seq.group();
    let k = seq.len();
    if u.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: u.len(),
        });
    }
    if !seq.weighted_sum(u).is_zero() {
        return Err(Error::NotInKernel(u.to_vec()));
    }
    let dstar = group.dstar();
    let mut rest = u.to_vec();
    let mut out: Vec<(i64, ZeroSumVec)> = Vec::new();

    if bound == dstar + 1 {
        for i in (1..=k).rev() {
            let prefix = seq.prefix(i);
            let m = construct_relation(&prefix)?;
            let di = m.as_slice()[i - 1] as i64;
            let ui = rest[i - 1];
            debug_assert_eq!(ui % di, 0, "u_i must be a multiple of d_i");
            let l = ui / di;
            if l != 0 {
                let mut full = m.into_inner();
                full.resize(k, 0);
                sub_scaled(&mut rest, l, &full)?;
                out.push((l, ZeroSumVec(full)));
            }
        }
        debug_assert!(rest.iter().all(|&x| x == 0));
        return Ok(out);
    }
    if bound != dstar {
        return Err(Error::UnsupportedBound { bound, dstar });
    }

    let mut active: Vec<usize> = (0..k).collect();
    while !active.is_empty() {
        let sub = seq.select(&active);
        let g_orders = orders_mod_others(&sub);
        let bounded = enumerate_b(&sub, bound, false);
        let mut step: Option<(usize, Terms)> = None;
        for pos in (0..active.len()).rev() {
            let uj = rest[active[pos]];
            if uj == 0 {
                step = Some((pos, Vec::new()));
                break;
            }
            let gj = g_orders[pos];
            if let Some(m) = bounded.iter().find(|m| m.0[pos] == gj) {
                step = Some((pos, vec![(uj / gj as i64, m.0.clone())]));
                break;
            }
            let two = bounded.iter().find(|m| m.0[pos] == 2);
            let three = bounded.iter().find(|m| m.0[pos] == 3);
            if let (Some(m2), Some(m3)) = (two, three) {
                // m'' - m' has coordinate 1 here, hence g_j = 1
                step = Some((pos, vec![(uj, m3.0.clone()), (-uj, m2.0.clone())]));
                break;
            }
        }
        let Some((pos, terms)) = step else {
            return Err(Error::DecompositionFailed {
                remaining: active,
                bound,
            });
        };
        for (l, m_sub) in terms {
            let mut full = vec![0u64; k];
            for (p, &c) in active.iter().zip(&m_sub) {
                full[*p] = c;
            }
            sub_scaled(&mut rest, l, &full)?;
            out.push((l, ZeroSumVec(full)));
        }
        debug_assert_eq!(rest[active[pos]], 0);
        active.remove(pos);
    }
    Ok(out)
}
