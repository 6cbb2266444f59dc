//! Separating sets of invariant monomials and the separating Noether number.
//!
//! A set `M` of zero-sum vectors for characters `chi_1, ..., chi_k` gives a
//! separating set of monomials `{x^m : m in M}` exactly when, for every
//! subset `J` of the variables, the kernel lattice of `(chi_j)_{j in J}` is
//! generated by the members of `M` supported in `J`; it suffices to check
//! `|J| <= kappa(G)`. The separating Noether number is then the least `d`
//! such that for every set of at most `kappa(G)` distinct elements, the
//! zero-sum vectors of length `<= d` generate the kernel lattice.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian_group::{order_mod_members, AbelianGroup, Element, Subgroup};
use crate::error::{Error, Result};
use crate::lattice::{kernel_lattice, sublattice_index, to_bigint_vec, LatticeBasis};
use crate::zerosum::{davenport, for_each_zero_sum, GSequence, DEFAULT_DAVENPORT_CAP};

/// Characters of `G`, identified with group elements through the standard
/// coordinatewise pairing `<a, x> = sum a_i x_i / n_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSequence(GSequence);

impl CharacterSequence {
    pub fn new(seq: GSequence) -> Self {
        CharacterSequence(seq)
    }

    pub fn from_coords(group: &AbelianGroup, coords: &[Vec<u64>]) -> Result<Self> {
        Ok(CharacterSequence(GSequence::from_coords(group, coords)?))
    }

    pub fn as_sequence(&self) -> &GSequence {
        &self.0
    }
}

impl Deref for CharacterSequence {
    type Target = GSequence;

    fn deref(&self) -> &GSequence {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every nonempty subset of the variables.
    #[default]
    Full,
    /// Only subsets of size at most `kappa(G)`.
    Helly,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(Mode::Full),
            "helly" => Ok(Mode::Helly),
            other => Err(format!("unknown mode `{other}` (expected full or helly)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Helly => "helly",
        })
    }
}

/// A subset `J` (0-based positions) and a vector of the kernel lattice of
/// `chi_J`, in the coordinates of `J`, that is not in the span of `M_J`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub subset: Vec<usize>,
    pub vector: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatingVerdict {
    pub separating: bool,
    pub witness: Option<SeparationWitness>,
    #[serde(rename = "subsetsChecked")]
    pub subsets_checked: usize,
}

/// Positions of `{0..k}` as subsets, by size and then lexicographically.
pub(crate) fn subsets_up_to(k: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for s in 1..=max_size.min(k) {
        let mut c: Vec<usize> = (0..s).collect();
        loop {
            out.push(c.clone());
            if !next_combination(&mut c, k) {
                break;
            }
        }
    }
    out
}

/// Advances a strictly increasing index vector to the next combination of
/// `[0, n)` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let s = c.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if c[i] < n - s + i {
            c[i] += 1;
            for j in i + 1..s {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The members of `monomials` supported in `subset`, restricted to those
/// coordinates.
pub fn restrict_to_subset(monomials: &[Vec<u64>], subset: &[usize]) -> Vec<Vec<u64>> {
    monomials
        .iter()
        .filter(|m| m.iter().enumerate().all(|(i, &c)| c == 0 || subset.contains(&i)))
        .map(|m| subset.iter().map(|&i| m[i]).collect())
        .collect()
}

fn validate_monomials(chars: &CharacterSequence, monomials: &[Vec<u64>]) -> Result<()> {
    for m in monomials {
        if m.len() != chars.len() {
            return Err(Error::DimensionMismatch {
                expected: chars.len(),
                got: m.len(),
            });
        }
        if !chars.is_zero_sum(m) {
            return Err(Error::NotZeroSum(m.clone()));
        }
    }
    Ok(())
}

/// Checks the lattice-generation criterion on one subset; returns a witness
/// vector when `M_J` fails to generate the kernel lattice.
pub fn check_subset(
    chars: &CharacterSequence,
    monomials: &[Vec<u64>],
    subset: &[usize],
) -> Result<Option<SeparationWitness>> {
    let group = chars.group();
    let sub = chars.select(subset);
    let lattice = kernel_lattice(group, &sub)?;
    let gens: Vec<Vec<BigInt>> = restrict_to_subset(monomials, subset)
        .iter()
        .map(|m| to_bigint_vec(m))
        .collect();
    if sublattice_index(&gens, &lattice)?.is_one() {
        return Ok(None);
    }
    let span = LatticeBasis::from_generators(subset.len(), gens)?;
    let row = lattice
        .rows()
        .iter()
        .find(|r| !span.contains(r))
        .expect("a proper sublattice misses some basis vector");
    Ok(Some(SeparationWitness {
        subset: subset.to_vec(),
        vector: row
            .iter()
            .map(|x| x.to_i64().expect("kernel basis entries are small"))
            .collect(),
    }))
}

/// Decides whether `{x^m : m in M}` is a separating set of invariants for the
/// diagonal action given by `chars`.
pub fn check_separating_monomials(
    chars: &CharacterSequence,
    monomials: &[Vec<u64>],
    mode: Mode,
) -> Result<SeparatingVerdict> {
    validate_monomials(chars, monomials)?;
    let k = chars.len();
    let max = match mode {
        Mode::Full => k,
        Mode::Helly => chars.group().kappa(),
    };
    let subsets = subsets_up_to(k, max);
    for (n, subset) in subsets.iter().enumerate() {
        if let Some(w) = check_subset(chars, monomials, subset)? {
            return Ok(SeparatingVerdict {
                separating: false,
                witness: Some(w),
                subsets_checked: n + 1,
            });
        }
    }
    Ok(SeparatingVerdict {
        separating: true,
        witness: None,
        subsets_checked: subsets.len(),
    })
}

/// Least `d >= 1` such that `{m in B(seq) : |m| <= d}` generates the kernel
/// lattice of `seq`, searching up to `cap`. Works for any sequence,
/// including ones with zeros or repeated entries.
///
/// Generators are accumulated length by length into one Hermite basis and the
/// index against the kernel lattice is read off the pivot products.
pub fn min_generating_bound(seq: &GSequence, cap: u64, span_only: bool) -> Result<Option<u64>> {
    let k = seq.len();
    if k == 0 {
        return Ok(Some(1));
    }
    let lattice = kernel_lattice(seq.group(), seq)?;
    let target = lattice.pivot_product();
    let mut buckets: Vec<Vec<Vec<BigInt>>> = vec![Vec::new(); cap as usize + 1];
    for_each_zero_sum(seq, cap, span_only, |m| {
        let len: u64 = m.iter().sum();
        if len > 0 {
            buckets[len as usize].push(to_bigint_vec(m));
        }
    });
    let mut span = LatticeBasis::zero(k);
    for (d, bucket) in buckets.into_iter().enumerate().skip(1) {
        let mut grew = false;
        for v in bucket {
            grew |= span.insert(v)?;
        }
        if grew && span.is_full_rank() && span.pivot_product() == target {
            return Ok(Some(d as u64));
        }
    }
    Ok(None)
}

/// Least `d` such that the zero-sum vectors of length `<= d` over the given
/// distinct nonzero elements generate their kernel lattice. Exceeding
/// `d*(G) + 1` is reported as [`Error::BoundExceeded`].
pub fn min_separating_bound_for_subset(group: &AbelianGroup, subset: &[Element]) -> Result<u64> {
    if subset.is_empty() {
        return Err(Error::InvalidSubset("empty subset".into()));
    }
    if subset.len() > group.kappa() {
        return Err(Error::InvalidSubset(format!(
            "{} elements exceed kappa(G) = {}",
            subset.len(),
            group.kappa()
        )));
    }
    for (i, a) in subset.iter().enumerate() {
        if a.is_zero() {
            return Err(Error::InvalidSubset("zero element".into()));
        }
        if subset[..i].contains(a) {
            return Err(Error::InvalidSubset(format!("repeated element {a}")));
        }
    }
    let seq = GSequence::new(group, subset.to_vec())?;
    bound_with_cap(group, &seq, true)
}

fn bound_with_cap(group: &AbelianGroup, seq: &GSequence, span_only: bool) -> Result<u64> {
    let cap = group.dstar() + 1;
    min_generating_bound(seq, cap, span_only)?.ok_or_else(|| Error::BoundExceeded {
        cap,
        subset: seq.elems().iter().map(|e| e.coords().to_vec()).collect(),
    })
}

pub const DEFAULT_BETA_SEP_MAX_ORDER: u64 = 32;
pub const DEFAULT_BETA_SEP_MAX_RANK: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaSepOptions {
    pub max_order: u64,
    pub max_rank: usize,
    /// Worker threads; `None` uses the machine's available parallelism.
    pub workers: Option<usize>,
    /// Evaluate one subset per orbit of `Aut(G)`.
    pub aut_reduction: bool,
    /// Enumerate only `m_i < ord(a_i)` plus pure powers; same lattice span.
    pub span_only: bool,
}

impl Default for BetaSepOptions {
    fn default() -> Self {
        BetaSepOptions {
            max_order: DEFAULT_BETA_SEP_MAX_ORDER,
            max_rank: DEFAULT_BETA_SEP_MAX_RANK,
            workers: None,
            aut_reduction: false,
            span_only: true,
        }
    }
}

impl BetaSepOptions {
    pub fn check_caps(&self, group: &AbelianGroup) -> Result<()> {
        if group.order() > self.max_order {
            return Err(Error::GroupTooLarge {
                order: group.order(),
                cap: self.max_order,
            });
        }
        if group.rank() > self.max_rank {
            return Err(Error::RankTooLarge {
                rank: group.rank(),
                cap: self.max_rank,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaSepResult {
    pub group: AbelianGroup,
    pub value: u64,
    /// First evaluated subset (by size, then lexicographically by element
    /// index) attaining the maximum.
    pub witness_subset: Vec<Element>,
    /// Minimal bound per evaluated subset; with automorphism reduction only
    /// orbit representatives appear.
    pub per_subset_min_bound: Vec<(Vec<Element>, u64)>,
    pub orbit_reduced: bool,
}

/// Automorphisms of `G` as permutations of element indices (see
/// [`AbelianGroup::index_of`]). The images `g_1, ..., g_r` of the standard
/// generators are chosen so that `g_i` has order exactly `n_i` modulo
/// `<g_1, ..., g_{i-1}>`, which is equivalent to the induced endomorphism
/// being bijective.
pub fn automorphisms(group: &AbelianGroup) -> Vec<Vec<usize>> {
    fn rec(
        group: &AbelianGroup,
        elements: &[Element],
        images: &mut Vec<Element>,
        h: &Subgroup,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = images.len();
        if i == group.rank() {
            out.push(permutation_of(group, elements, images));
            return;
        }
        for g in independent_images(group, elements, h, group.factors()[i]) {
            let next = h.join_element(group, &g);
            images.push(g);
            rec(group, elements, images, &next, out);
            images.pop();
        }
    }

    let elements = group.elements();
    let mut out = Vec::new();
    rec(group, &elements, &mut Vec::new(), &Subgroup::trivial(group), &mut out);
    out
}

/// Elements `g` with `n g = 0` whose order modulo `h` is exactly `n`.
fn independent_images(group: &AbelianGroup, elements: &[Element], h: &Subgroup, n: u64) -> Vec<Element> {
    elements
        .iter()
        .filter(|g| group.scale(n as i64, g).is_zero() && order_mod_members(group, g, h) == n)
        .cloned()
        .collect()
}

/// The index permutation of the endomorphism sending `e_i` to `images[i]`.
fn permutation_of(group: &AbelianGroup, elements: &[Element], images: &[Element]) -> Vec<usize> {
    elements
        .iter()
        .map(|x| {
            let mut acc = group.zero();
            for (c, g) in x.coords().iter().zip(images) {
                group.add_assign(&mut acc, &group.scale(*c as i64, g));
            }
            group.index_of(&acc)
        })
        .collect()
}

fn binomial_table(n: usize, k: usize) -> Vec<Vec<u64>> {
    let mut c = vec![vec![0u64; k + 2]; n + 1];
    for (i, row) in c.iter_mut().enumerate() {
        row[0] = 1;
        let _ = i;
    }
    for i in 1..=n {
        for j in 1..=k + 1 {
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
        }
    }
    c
}

/// Colexicographic rank of a strictly increasing combination.
fn colex_rank(c: &[usize], binom: &[Vec<u64>]) -> usize {
    c.iter().enumerate().map(|(i, &x)| binom[x][i + 1] as usize).sum()
}

/// Seeded random automorphisms used as generators for orbit marking. They
/// need not generate all of `Aut(G)`: orbits of any subgroup still yield a
/// complete set of representatives, only a less reduced one.
pub fn random_automorphisms(group: &AbelianGroup, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let elements = group.elements();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut images = Vec::with_capacity(group.rank());
            let mut h = Subgroup::trivial(group);
            for i in 0..group.rank() {
                let options = independent_images(group, &elements, &h, group.factors()[i]);
                let g = options[rng.gen_range(0..options.len())].clone();
                h = h.join_element(group, &g);
                images.push(g);
            }
            permutation_of(group, &elements, &images)
        })
        .collect()
}

const ORBIT_GENERATORS: usize = 4;

/// Subsets of nonzero elements (as 0-based positions among them) of each
/// size up to `kappa`, one per orbit of a subgroup of `Aut(G)` when `reduce`
/// is set. Orbits are swept breadth-first under a few generators.
fn candidate_subsets(group: &AbelianGroup, reduce: bool) -> Vec<Vec<usize>> {
    let n = group.order() as usize - 1;
    let kappa = group.kappa();
    if !reduce {
        return subsets_up_to(n, kappa);
    }
    // positions among nonzero elements are index - 1
    let gens: Vec<Vec<usize>> = random_automorphisms(group, ORBIT_GENERATORS, 0)
        .into_iter()
        .map(|p| p[1..].iter().map(|&x| x - 1).collect())
        .collect();
    let binom = binomial_table(n, kappa);
    let mut reps = Vec::new();
    for s in 1..=kappa.min(n) {
        let mut seen = vec![false; binom[n][s] as usize];
        let mut c: Vec<usize> = (0..s).collect();
        let mut stack = Vec::new();
        loop {
            let rank = colex_rank(&c, &binom);
            if !seen[rank] {
                seen[rank] = true;
                reps.push(c.clone());
                stack.push(c.clone());
                while let Some(x) = stack.pop() {
                    for p in &gens {
                        let mut image: Vec<usize> = x.iter().map(|&i| p[i]).collect();
                        image.sort_unstable();
                        let r = colex_rank(&image, &binom);
                        if !seen[r] {
                            seen[r] = true;
                            stack.push(image);
                        }
                    }
                }
            }
            if !next_combination(&mut c, n) {
                break;
            }
        }
    }
    reps
}

pub(crate) fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let threads = workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// `beta_sep(G)`: the maximum over all sets of at most `kappa(G)` distinct
/// nonzero elements of their minimal generating bound.
///
/// The zero element is left out: a zero entry contributes the length-one
/// vector `e_i` and splits the kernel lattice as `Z e_i + (rest)`. Results
/// are independent of the worker count.
pub fn beta_sep(group: &AbelianGroup, opts: &BetaSepOptions) -> Result<BetaSepResult> {
    opts.check_caps(group)?;
    if group.order() == 1 {
        return Ok(BetaSepResult {
            group: group.clone(),
            value: 1,
            witness_subset: Vec::new(),
            per_subset_min_bound: Vec::new(),
            orbit_reduced: opts.aut_reduction,
        });
    }
    let subsets = candidate_subsets(group, opts.aut_reduction);
    let values: Vec<Result<u64>> = with_workers(opts.workers, || {
        subsets
            .par_iter()
            .map(|positions| {
                let elems: Vec<Element> = positions.iter().map(|&p| group.element_at(p + 1)).collect();
                let seq = GSequence::new(group, elems)?;
                bound_with_cap(group, &seq, opts.span_only)
            })
            .collect()
    });
    let mut per_subset = Vec::with_capacity(subsets.len());
    let mut best: Option<(u64, usize)> = None;
    for (i, (positions, v)) in subsets.iter().zip(values).enumerate() {
        let v = v?;
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, i));
        }
        per_subset.push((
            positions.iter().map(|&p| group.element_at(p + 1)).collect::<Vec<_>>(),
            v,
        ));
    }
    let (value, at) = best.expect("a nontrivial group has a nonzero element");
    Ok(BetaSepResult {
        group: group.clone(),
        value,
        witness_subset: per_subset[at].0.clone(),
        per_subset_min_bound: per_subset,
        orbit_reduced: opts.aut_reduction,
    })
}

/// Whether `beta_sep(G) = d*(G) + 1`: `G` cyclic, or `n_{s+1} = ... = n_r = 2`
/// where `r = 2s - 1` or `r = 2s`. Equivalently at least `floor(r/2)`
/// factors equal 2.
pub fn equality_case(group: &AbelianGroup) -> bool {
    let r = group.rank();
    if r <= 1 {
        return true;
    }
    let s = r.div_ceil(2);
    group.factors()[s..].iter().all(|&n| n == 2)
}

/// `(s, r)` for a group in the non-cyclic equality family.
fn family_shape(group: &AbelianGroup) -> Option<(usize, usize)> {
    let r = group.rank();
    (r >= 2 && equality_case(group)).then(|| (r.div_ceil(2), r))
}

/// The length-`(r+1)` sequence whose kernel lattice is not generated by
/// zero-sum vectors of length `<= d*(G)`:
/// `a_1 = e_1`, `a_{2i} = e_i + f_i`, `a_{2i+1} = f_i + e_{i+1}` for
/// `i < s`, then `a_{2s} = e_s` when `r = 2s - 1`, or
/// `a_{2s} = e_s + f_s`, `a_{2s+1} = f_s` when `r = 2s`. Here `e_i`
/// generates the `i`-th factor and `f_j` the `(s+j)`-th, of order 2.
pub fn extremal_sequence(group: &AbelianGroup) -> Result<GSequence> {
    let (s, r) = family_shape(group).ok_or_else(|| Error::WrongShape(group.factors().to_vec()))?;
    let e = |i: usize| group.generator(i - 1);
    let f = |j: usize| group.generator(s + j - 1);
    let mut elems = vec![e(1)];
    for i in 1..s {
        elems.push(group.add(&e(i), &f(i)));
        elems.push(group.add(&f(i), &e(i + 1)));
    }
    if r == 2 * s - 1 {
        elems.push(e(s));
    } else {
        elems.push(group.add(&e(s), &f(s)));
        elems.push(f(s));
    }
    debug_assert_eq!(elems.len(), r + 1);
    GSequence::new(group, elems)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DstarInequality {
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
    pub equality: bool,
    /// Largest `j` in `0..=r` with `m_i = n_i` for `i <= j` and
    /// `m_i = n_{i+1}` for `i > j` (1-based, `n_{r+1} = 1`), if any. The
    /// shape `j = 0` drops the first factor, e.g. `n = (4, 2)`, `m = (2, 1)`.
    pub equality_shape_index: Option<usize>,
}

/// Evaluates `sum (n_i - 1) >= sum (m_i - 1) + prod (n_i / m_i) - 1` for
/// tuples with `m_i | n_i` and `n_{i+1} | m_i`.
pub fn dstar_inequality(n: &[u64], m: &[u64]) -> Result<DstarInequality> {
    let violated = || Error::DivisibilityViolated {
        n: n.to_vec(),
        m: m.to_vec(),
    };
    if n.len() != m.len() || n.iter().chain(m).any(|&x| x == 0) {
        return Err(violated());
    }
    let r = n.len();
    for i in 0..r {
        if !n[i].is_multiple_of(m[i]) || (i + 1 < r && !m[i].is_multiple_of(n[i + 1])) {
            return Err(violated());
        }
    }
    let lhs: u64 = n.iter().map(|x| x - 1).sum();
    let index: u64 = n.iter().zip(m).map(|(a, b)| a / b).product();
    let rhs = m.iter().map(|x| x - 1).sum::<u64>() + index - 1;
    let next = |i: usize| if i + 1 < r { n[i + 1] } else { 1 };
    let equality_shape_index = (0..=r)
        .rev()
        .find(|&j| (0..r).all(|i| if i < j { m[i] == n[i] } else { m[i] == next(i) }));
    Ok(DstarInequality {
        lhs,
        rhs,
        holds: lhs >= rhs,
        equality: lhs == rhs,
        equality_shape_index,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StrictnessReport {
    pub group: AbelianGroup,
    pub beta_sep: u64,
    pub davenport: u64,
    pub dstar: u64,
    pub equality_case: bool,
    pub strict: bool,
}

/// Compares `beta_sep(G)` with `D(G) = beta(G)`.
pub fn strictness_report(group: &AbelianGroup, opts: &BetaSepOptions, davenport_cap: u64) -> Result<StrictnessReport> {
    let b = beta_sep(group, opts)?;
    let d = davenport(group, davenport_cap)?;
    Ok(StrictnessReport {
        group: group.clone(),
        beta_sep: b.value,
        davenport: d.value,
        dstar: group.dstar(),
        equality_case: equality_case(group),
        strict: b.value < d.value,
    })
}

/// Machine-readable summary of a `beta_sep` computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroupReport {
    pub group: AbelianGroup,
    pub dstar: u64,
    pub beta_sep: u64,
    pub davenport: Option<u64>,
    pub equality_case: bool,
    pub witness_subset: Vec<Element>,
}

impl GroupReport {
    pub fn new(result: &BetaSepResult, davenport: Option<u64>) -> Self {
        GroupReport {
            group: result.group.clone(),
            dstar: result.group.dstar(),
            beta_sep: result.value,
            davenport,
            equality_case: equality_case(&result.group),
            witness_subset: result.witness_subset.clone(),
        }
    }
}

/// `beta_sep` together with `D(G)` when the group is within the Davenport cap.
pub fn group_report(group: &AbelianGroup, opts: &BetaSepOptions, davenport_cap: Option<u64>) -> Result<GroupReport> {
    let b = beta_sep(group, opts)?;
    let cap = davenport_cap.unwrap_or(DEFAULT_DAVENPORT_CAP);
    let d = if group.order() <= cap {
        Some(davenport(group, cap)?.value)
    } else {
        None
    };
    Ok(GroupReport::new(&b, d))
}
