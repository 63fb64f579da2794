//! Divisibility witnesses for sums of the form
//! `1 + 2^(2^n) + 2^(2^(n+1)) + ... + 2^(2^(n+m))` modulo odd integers.
//!
//! Given an odd modulus `N`, the [`witness`] module constructs a certificate
//! `(s, a, l, b, k_l, k_b, d, r)` from which an infinite family of exponent
//! counts `m = l + r*a + i*N*a` is generated, every member of which makes the
//! sum divisible by `N`. The [`tower`] module provides two independent
//! oracles for checking such claims, [`mersenne`] specializes the
//! construction to double Mersenne chains `q -> 2^q - 1 -> 2^(2^q - 1) - 1`,
//! and [`fermat`] covers the matching Fermat-number sum congruences.
//!
//! All modular arithmetic runs on a 128-bit kernel that is exact for odd
//! moduli up to `2^127 - 1`.

pub mod fermat;
pub mod mersenne;
pub mod modmath;
pub mod tower;
pub mod witness;

pub use modmath::{CongruenceClass, Residue};
pub use tower::{SumSpec, TowerContext, DEFAULT_TERM_BUDGET};
pub use witness::{Inapplicability, OrderChain, VerificationReport, Witness, WitnessOutcome};

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("modulus {0} out of range (need 2 <= modulus <= 2^127 - 1)")]
    InvalidModulus(u128),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("base {base} is not coprime to modulus {modulus}")]
    NotCoprime { base: u128, modulus: u128 },
    #[error("term count {terms} exceeds budget {budget}; use block verification")]
    BudgetExceeded { terms: u128, budget: u64 },
    #[error("tower height n + m = {0} exceeds the exact-oracle cap of 16")]
    TowerTooTall(u64),
    #[error("q = {0} is unsupported: the Mersenne chain exceeds 128-bit arithmetic")]
    UnsupportedWidth(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
