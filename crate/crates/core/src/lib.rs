//! Separating monomial invariants of finite abelian groups.
//!
//! The crate works with a finite abelian group `G = C_{n_1} + ... + C_{n_r}`
//! given by its invariant factors, sequences over `G` (interpreted as the
//! characters of a diagonal representation), the lattice of exponent vectors
//! of invariant Laurent monomials, and bounded zero-sum vectors.
//!
//! The main quantities are the separating Noether number `beta_sep(G)`,
//! the Davenport constant `D(G)` and `d*(G) = sum (n_i - 1)`; in general
//! `beta_sep(G) <= d*(G) + 1`, with equality exactly when `G` is cyclic or
//! at least half (rounded down) of its invariant factors equal 2.

pub mod abelian_group;
pub mod error;
pub mod field_oracle;
pub mod lattice;
pub mod separating;
pub mod suites;
pub mod verify;
pub mod zerosum;

pub use abelian_group::{AbelianGroup, Element, GroupStats, Subgroup};
pub use error::{Error, ErrorClass, Result};
pub use lattice::{IntMat, LatticeBasis, LatticeIndex};
pub use separating::{beta_sep, BetaSepOptions, BetaSepResult, CharacterSequence, Mode};
pub use zerosum::{davenport, GSequence, ZeroSumVec};
