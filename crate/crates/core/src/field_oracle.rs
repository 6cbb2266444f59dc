//! Brute-force check of point separation over a finite field.
//!
//! The characters are realized in `F_q^*` for a prime `q = 1 mod exp(G)`,
//! which makes `G` act diagonally on `F_q^k`. Orbits are found by applying
//! every group element, and a monomial set separates when no two points of
//! distinct orbits share all monomial values.

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian_group::AbelianGroup;
use crate::error::{Error, Result};
use crate::lattice::{snf, to_bigint_vec, IntMat};
use crate::separating::{
    check_separating_monomials, restrict_to_subset, with_workers, CharacterSequence, Mode, SeparatingVerdict,
};

pub const DEFAULT_POINT_CAP: u64 = 100_000;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn pow_mod(base: u64, mut exp: u64, q: u64) -> u64 {
    let mut result = 1 % q;
    let mut b = base % q;
    while exp > 0 {
        if exp & 1 == 1 {
            result = (result as u128 * b as u128 % q as u128) as u64;
        }
        b = (b as u128 * b as u128 % q as u128) as u64;
        exp >>= 1;
    }
    result
}

/// Smallest generator of `F_q^*`.
pub fn primitive_root(q: u64) -> u64 {
    if q == 2 {
        return 1;
    }
    let mut m = q - 1;
    let mut primes = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            primes.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    (2..q)
        .find(|&g| primes.iter().all(|&p| pow_mod(g, (q - 1) / p, q) != 1))
        .expect("F_q^* is cyclic")
}

/// Primes `q = 1 mod modulus`, ascending.
pub fn admissible_primes(modulus: u64) -> impl Iterator<Item = u64> {
    (1..).map(move |t| t * modulus + 1).filter(|&q| is_prime(q))
}

#[derive(Clone, Debug)]
pub struct DiagonalAction {
    group: AbelianGroup,
    chars: CharacterSequence,
    q: u64,
    /// `diagonals[g][j] = chi_j(g)` for `g` in element-index order.
    diagonals: Vec<Vec<u64>>,
}

impl DiagonalAction {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn chars(&self) -> &CharacterSequence {
        &self.chars
    }

    pub fn dim(&self) -> usize {
        self.chars.len()
    }

    pub fn diagonals(&self) -> &[Vec<u64>] {
        &self.diagonals
    }

    pub fn point_count(&self) -> usize {
        (self.q as usize).pow(self.dim() as u32)
    }

    /// Mixed-radix decoding, first coordinate fastest.
    pub fn point(&self, mut idx: usize) -> Vec<u64> {
        let q = self.q as usize;
        (0..self.dim())
            .map(|_| {
                let c = idx % q;
                idx /= q;
                c as u64
            })
            .collect()
    }

    pub fn encode(&self, x: &[u64]) -> usize {
        x.iter().rev().fold(0, |acc, &c| acc * self.q as usize + c as usize)
    }

    /// Index of `g . x` for the group element with index `g`.
    fn act(&self, g: usize, x: usize) -> usize {
        let q = self.q as usize;
        let mut rest = x;
        let mut out = 0;
        let mut place = 1;
        for &d in &self.diagonals[g] {
            let c = rest % q;
            rest /= q;
            out += (c * d as usize % q) * place;
            place *= q;
        }
        out
    }
}

/// Realizes `chars` over `F_q`, with `q` the smallest admissible prime unless
/// given.
pub fn build_diagonal_action(chars: &CharacterSequence, q: Option<u64>, point_cap: u64) -> Result<DiagonalAction> {
    let group = chars.group().clone();
    let e = group.exponent();
    let q = match q {
        Some(q) if is_prime(q) && (q - 1) % e == 0 => q,
        Some(q) => return Err(Error::BadPrime { q, exponent: e }),
        None => admissible_primes(e).next().expect("infinitely many primes"),
    };
    let points = q.checked_pow(chars.len() as u32).unwrap_or(u64::MAX);
    if points > point_cap {
        return Err(Error::StateSpaceTooLarge { points, cap: point_cap });
    }
    let zeta = pow_mod(primitive_root(q), (q - 1) / e, q);
    let diagonals = group
        .elements()
        .iter()
        .map(|g| {
            chars
                .elems()
                .iter()
                .map(|a| {
                    let t: u64 = a
                        .coords()
                        .iter()
                        .zip(g.coords())
                        .zip(group.factors())
                        .map(|((&aj, &xj), &nj)| aj * xj % nj * (e / nj))
                        .sum();
                    pow_mod(zeta, t % e, q)
                })
                .collect()
        })
        .collect();
    Ok(DiagonalAction {
        group,
        chars: chars.clone(),
        q,
        diagonals,
    })
}

/// Every point mapped to the least encoded point of its orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    representative: Vec<usize>,
}

impl OrbitPartition {
    pub fn representative(&self, point: usize) -> usize {
        self.representative[point]
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representative
    }

    pub fn orbit_count(&self) -> usize {
        self.representative.iter().enumerate().filter(|&(i, &r)| i == r).count()
    }

    /// Orbit sizes keyed by representative.
    pub fn orbit_sizes(&self) -> HashMap<usize, usize> {
        let mut sizes = HashMap::new();
        for &r in &self.representative {
            *sizes.entry(r).or_insert(0) += 1;
        }
        sizes
    }
}

pub fn orbit_partition(act: &DiagonalAction) -> OrbitPartition {
    let order = act.diagonals.len();
    let representative = (0..act.point_count())
        .into_par_iter()
        .map(|x| (0..order).map(|g| act.act(g, x)).min().expect("G is nonempty"))
        .collect();
    OrbitPartition { representative }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub v: Vec<u64>,
    pub w: Vec<u64>,
    /// The common values of the monomials at `v` and `w`.
    pub values: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub separating: bool,
    pub q: u64,
    pub counterexample: Option<Counterexample>,
}

fn eval_monomial(x: &[u64], m: &[u64], q: u64) -> u64 {
    x.iter().zip(m).fold(1 % q, |acc, (&xi, &mi)| {
        (acc as u128 * pow_mod(xi, mi, q) as u128 % q as u128) as u64
    })
}

/// Whether the monomials `x^m`, `m in M`, separate the orbits of `act`.
pub fn monomials_separate(act: &DiagonalAction, monomials: &[Vec<u64>]) -> Result<OracleVerdict> {
    for m in monomials {
        if m.len() != act.dim() || !act.chars.is_zero_sum(m) {
            return Err(Error::NotInvariantMonomial(m.clone()));
        }
    }
    let orbits = orbit_partition(act);
    let q = act.q;
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for x in 0..act.point_count() {
        let point = act.point(x);
        let values: Vec<u64> = monomials.iter().map(|m| eval_monomial(&point, m, q)).collect();
        let rep = orbits.representative(x);
        match seen.get(&values) {
            Some(&other) if other != rep => {
                return Ok(OracleVerdict {
                    separating: false,
                    q,
                    counterexample: Some(Counterexample {
                        v: act.point(other),
                        w: point,
                        values,
                    }),
                });
            }
            Some(_) => {}
            None => {
                seen.insert(values, rep);
            }
        }
    }
    Ok(OracleVerdict {
        separating: true,
        q,
        counterexample: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossValidation {
    pub criterion_verdict: SeparatingVerdict,
    pub oracle_verdict: OracleVerdict,
    pub primes_tried: Vec<u64>,
    pub agree: bool,
}

/// Exponent of the torsion part of `Z^J / Z M_J`, the group through which
/// the characters trivial on `M_J` factor.
fn quotient_torsion_exponent(dim: usize, rows: &[Vec<u64>]) -> u64 {
    if rows.is_empty() {
        return 1;
    }
    let mat = IntMat::from_bigint_rows(dim, rows.iter().map(|r| to_bigint_vec(r)).collect());
    snf(&mat)
        .diagonal
        .iter()
        .filter(|d| !d.is_zero())
        .map(|d| d.abs().to_u64().expect("torsion of a desk-scale quotient"))
        .fold(1, num_integer::lcm)
}

const RETRY_PRIMES: usize = 2;
const GUIDED_PRIMES: usize = 4;

/// Runs the lattice criterion and the field oracle on the same input.
///
/// When the criterion rejects but the oracle at the smallest prime finds no
/// unseparated pair, the next admissible primes are tried, then primes
/// `q = 1 mod lcm(exp G, exp tors(Z^J / Z M_J))` on the coordinate subspace
/// `V_J` of the criterion's witness subset `J`. An unseparated pair in `V_J`
/// is one in `V`, since monomials involving other variables vanish on both.
pub fn cross_validate(
    chars: &CharacterSequence,
    monomials: &[Vec<u64>],
    point_cap: u64,
    workers: Option<usize>,
) -> Result<CrossValidation> {
    with_workers(workers, || cross_validate_inner(chars, monomials, point_cap))
}

fn cross_validate_inner(chars: &CharacterSequence, monomials: &[Vec<u64>], point_cap: u64) -> Result<CrossValidation> {
    let criterion = check_separating_monomials(chars, monomials, Mode::Full)?;
    let e = chars.group().exponent();
    let mut primes_tried = Vec::new();
    let mut primes = admissible_primes(e);
    let first = primes.next().expect("infinitely many primes");
    let mut oracle = monomials_separate(&build_diagonal_action(chars, Some(first), point_cap)?, monomials)?;
    primes_tried.push(first);

    if !criterion.separating && oracle.separating {
        for q in primes.take(RETRY_PRIMES) {
            let act = match build_diagonal_action(chars, Some(q), point_cap) {
                Ok(act) => act,
                Err(Error::StateSpaceTooLarge { .. }) => break,
                Err(err) => return Err(err),
            };
            primes_tried.push(q);
            oracle = monomials_separate(&act, monomials)?;
            if !oracle.separating {
                break;
            }
        }
    }

    if !criterion.separating && oracle.separating {
        let witness = criterion.witness.as_ref().expect("rejection carries a witness");
        let subset = &witness.subset;
        let restricted = restrict_to_subset(monomials, subset);
        let sub = CharacterSequence::new(chars.select(subset));
        let modulus = num_integer::lcm(e, quotient_torsion_exponent(subset.len(), &restricted));
        for q in admissible_primes(modulus).take(GUIDED_PRIMES) {
            if primes_tried.contains(&q) {
                continue;
            }
            let act = match build_diagonal_action(&sub, Some(q), point_cap) {
                Ok(act) => act,
                Err(Error::StateSpaceTooLarge { .. }) => break,
                Err(err) => return Err(err),
            };
            primes_tried.push(q);
            let local = monomials_separate(&act, &restricted)?;
            if !local.separating {
                let cx = local.counterexample.expect("non-separation carries a pair");
                let lift = |p: &[u64]| {
                    let mut full = vec![0; chars.len()];
                    for (&i, &c) in subset.iter().zip(p) {
                        full[i] = c;
                    }
                    full
                };
                let values = monomials.iter().map(|m| eval_monomial(&lift(&cx.v), m, q)).collect();
                oracle = OracleVerdict {
                    separating: false,
                    q,
                    counterexample: Some(Counterexample {
                        v: lift(&cx.v),
                        w: lift(&cx.w),
                        values,
                    }),
                };
                break;
            }
        }
    }

    let agree = criterion.separating == oracle.separating;
    Ok(CrossValidation {
        criterion_verdict: criterion,
        oracle_verdict: oracle,
        primes_tried,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zerosum::enumerate_b;

    fn chars(f: &[u64], coords: &[&[u64]]) -> CharacterSequence {
        let group = AbelianGroup::new(f).unwrap();
        let v: Vec<Vec<u64>> = coords.iter().map(|c| c.to_vec()).collect();
        CharacterSequence::from_coords(&group, &v).unwrap()
    }

    #[test]
    fn primes_and_roots() {
        assert_eq!(admissible_primes(2).next(), Some(3));
        assert_eq!(admissible_primes(3).next(), Some(7));
        assert_eq!(admissible_primes(8).take(3).collect::<Vec<_>>(), vec![17, 41, 73]);
        for q in [3, 5, 7, 11, 13, 17, 29, 31] {
            let g = primitive_root(q);
            let mut x = 1;
            let mut seen = std::collections::BTreeSet::new();
            for _ in 0..q - 1 {
                x = x * g % q;
                seen.insert(x);
            }
            assert_eq!(seen.len() as u64, q - 1, "q = {q}");
        }
    }

    #[test]
    fn action_examples() {
        let c2 = chars(&[2], &[&[1]]);
        let act = build_diagonal_action(&c2, None, DEFAULT_POINT_CAP).unwrap();
        assert_eq!(act.q(), 3);
        assert_eq!(act.diagonals(), &[vec![1], vec![2]]);
        let part = orbit_partition(&act);
        assert_eq!(part.representatives(), &[0, 1, 1]);

        let v4 = chars(&[2, 2], &[&[1, 0], &[1, 1], &[0, 1]]);
        let act = build_diagonal_action(&v4, None, DEFAULT_POINT_CAP).unwrap();
        assert_eq!((act.q(), act.point_count()), (3, 27));
        let part = orbit_partition(&act);
        assert_eq!(part.orbit_sizes()[&part.representative(act.encode(&[1, 1, 1]))], 4);
        assert_eq!(part.representative(0), 0);

        assert_eq!(
            build_diagonal_action(&chars(&[3], &[&[1]]), None, DEFAULT_POINT_CAP)
                .unwrap()
                .q(),
            7
        );
        assert_eq!(
            build_diagonal_action(&c2, Some(5), DEFAULT_POINT_CAP)
                .unwrap()
                .diagonals(),
            &[vec![1], vec![4]]
        );
        assert_eq!(
            build_diagonal_action(&chars(&[3], &[&[1]]), Some(5), DEFAULT_POINT_CAP).unwrap_err(),
            Error::BadPrime { q: 5, exponent: 3 }
        );
        assert!(matches!(
            build_diagonal_action(&v4, Some(3), 10),
            Err(Error::StateSpaceTooLarge { points: 27, cap: 10 })
        ));
    }

    #[test]
    fn separation_examples() {
        let c2 = chars(&[2], &[&[1]]);
        let at5 = build_diagonal_action(&c2, Some(5), DEFAULT_POINT_CAP).unwrap();
        let v = monomials_separate(&at5, &[vec![4]]).unwrap();
        assert!(!v.separating);
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.values, vec![1]);
        assert!(monomials_separate(&at5, &[vec![2]]).unwrap().separating);
        assert!(!monomials_separate(&at5, &[]).unwrap().separating);
        assert_eq!(
            monomials_separate(&at5, &[vec![3]]).unwrap_err(),
            Error::NotInvariantMonomial(vec![3])
        );

        let v4 = chars(&[2, 2], &[&[1, 0], &[1, 1], &[0, 1]]);
        let act = build_diagonal_action(&v4, None, DEFAULT_POINT_CAP).unwrap();
        let all: Vec<Vec<u64>> = enumerate_b(&v4, 4, false).into_iter().map(|m| m.into_inner()).collect();
        assert!(monomials_separate(&act, &all).unwrap().separating);
    }

    #[test]
    fn cross_validate_examples() {
        let v4 = chars(&[2, 2], &[&[1, 0], &[1, 1], &[0, 1]]);
        for (bound, expected) in [(2, false), (3, true)] {
            let m: Vec<Vec<u64>> = enumerate_b(&v4, bound, false)
                .into_iter()
                .map(|m| m.into_inner())
                .collect();
            let cv = cross_validate(&v4, &m, DEFAULT_POINT_CAP, Some(1)).unwrap();
            assert!(cv.agree);
            assert_eq!(cv.criterion_verdict.separating, expected);
        }
        let c2 = chars(&[2], &[&[1]]);
        assert!(
            cross_validate(&c2, &[vec![2]], DEFAULT_POINT_CAP, Some(1))
                .unwrap()
                .agree
        );
    }

    /// `x^4` over `F_3` agrees with `x^2` on every point, so only a larger
    /// prime exposes the gap between `4Z` and `2Z`.
    #[test]
    fn cross_validate_needs_retry() {
        let c2 = chars(&[2], &[&[1]]);
        let cv = cross_validate(&c2, &[vec![4]], DEFAULT_POINT_CAP, Some(1)).unwrap();
        assert!(cv.agree);
        assert!(!cv.oracle_verdict.separating);
        assert_eq!(cv.primes_tried, vec![3, 5]);
    }

    /// The only relation on the first variable is `x_1^5`, which is
    /// injective on `F_q` unless `5 | q - 1`.
    #[test]
    fn cross_validate_needs_guided_prime() {
        let c2 = chars(&[2], &[&[0], &[1]]);
        let m = vec![vec![5, 0], vec![0, 2]];
        let cv = cross_validate(&c2, &m, DEFAULT_POINT_CAP, Some(1)).unwrap();
        assert!(cv.agree, "{cv:?}");
        assert_eq!(*cv.primes_tried.last().unwrap() % 10, 1);
    }
}
