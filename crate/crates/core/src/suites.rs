//! Seeded random instances for the randomized agreement suites.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abelian_group::{AbelianGroup, Element};
use crate::error::Result;
use crate::lattice::kernel_lattice;
use crate::separating::CharacterSequence;
use crate::zerosum::{enumerate_b, GSequence};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_element<R: Rng>(rng: &mut R, group: &AbelianGroup) -> Element {
    group.element_at(rng.gen_range(0..group.order() as usize))
}

/// `k` independent uniform elements; repeats and zeros allowed.
pub fn random_sequence<R: Rng>(rng: &mut R, group: &AbelianGroup, k: usize) -> GSequence {
    let elems = (0..k).map(|_| random_element(rng, group)).collect();
    GSequence::new(group, elems).expect("elements drawn from the group")
}

/// A random integer vector in the kernel lattice: a combination of the
/// Hermite basis rows with coefficients in `[-spread, spread]`.
pub fn random_kernel_vector<R: Rng>(rng: &mut R, seq: &GSequence, spread: i64) -> Result<Vec<i64>> {
    let lattice = kernel_lattice(seq.group(), seq)?;
    let mut v = vec![BigInt::from(0); seq.len()];
    for row in lattice.rows() {
        let c = BigInt::from(rng.gen_range(-spread..=spread));
        for (x, y) in v.iter_mut().zip(row) {
            *x += &c * y;
        }
    }
    Ok(v.iter().map(|x| x.to_i64().expect("small combination")).collect())
}

/// A character sequence with a random subset of its zero-sum vectors of
/// length `<= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialInstance {
    pub group: AbelianGroup,
    pub chars: Vec<Element>,
    pub monomials: Vec<Vec<u64>>,
}

impl MonomialInstance {
    pub fn characters(&self) -> CharacterSequence {
        CharacterSequence::new(GSequence::new(&self.group, self.chars.clone()).expect("instance elements"))
    }
}

/// Keeps each zero-sum vector of length `<= bound` with a per-instance
/// probability drawn from `[0.5, 1]`, so both separating and non-separating
/// sets occur.
pub fn random_monomial_instance<R: Rng>(rng: &mut R, group: &AbelianGroup, k: usize, bound: u64) -> MonomialInstance {
    let seq = random_sequence(rng, group, k);
    let keep: f64 = rng.gen_range(0.5..=1.0);
    let mut monomials: Vec<Vec<u64>> = enumerate_b(&seq, bound, false)
        .into_iter()
        .map(|m| m.into_inner())
        .filter(|m| m.iter().any(|&c| c > 0))
        .filter(|_| rng.gen_bool(keep))
        .collect();
    monomials.shuffle(rng);
    MonomialInstance {
        group: group.clone(),
        chars: seq.elems().to_vec(),
        monomials,
    }
}

/// `count` instances over groups with `|G| <= max_order`, sequence length
/// `1..=max_k`, monomials of length `<= d*(G) + 1`.
pub fn random_monomial_suite(seed: u64, count: usize, max_order: u64, max_k: usize) -> Vec<MonomialInstance> {
    let mut rng = rng(seed);
    let groups = AbelianGroup::all_up_to(max_order, usize::MAX, false);
    (0..count)
        .map(|_| {
            let group = groups.choose(&mut rng).expect("nonempty family").clone();
            let k = rng.gen_range(1..=max_k);
            random_monomial_instance(&mut rng, &group, k, group.dstar() + 1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_are_reproducible() {
        assert_eq!(random_monomial_suite(7, 20, 16, 5), random_monomial_suite(7, 20, 16, 5));
        assert_ne!(random_monomial_suite(7, 20, 16, 5), random_monomial_suite(8, 20, 16, 5));
    }

    #[test]
    fn instances_are_zero_sum() {
        for inst in random_monomial_suite(1, 50, 16, 5) {
            let chars = inst.characters();
            assert!(inst.monomials.iter().all(|m| chars.is_zero_sum(m)));
        }
    }

    #[test]
    fn kernel_vectors_are_relations() {
        let mut r = rng(3);
        let group = AbelianGroup::new(&[6, 2]).unwrap();
        for _ in 0..50 {
            let seq = random_sequence(&mut r, &group, 4);
            let v = random_kernel_vector(&mut r, &seq, 3).unwrap();
            assert!(seq.weighted_sum(&v).is_zero());
        }
    }
}
