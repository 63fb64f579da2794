//! Fermat-number sums modulo odd integers.
//!
//! `F_k = 2^(2^k) + 1`, so a run of Fermat numbers differs from the tower
//! sum `I_{n,m}` only by the count of terms: whenever `I_{n,m}` is divisible
//! by `N`, the matching sum `F_n + ... + F_{n+m}` is congruent to `m`. The
//! sums here are evaluated term-wise on their own, so that identity stays a
//! checkable fact rather than a definition.

use num_bigint::BigUint;

use crate::mersenne::MersenneWitness;
use crate::modmath::{mul_mod, Residue};
use crate::tower::{block_sum_check, tower_residue, TowerContext};
use crate::{Error, Result};

/// The sum `F_n + F_{n+1} + ... + F_{n+m}` (m + 1 terms) modulo `modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermatSumSpec {
    pub n: u128,
    pub m: u64,
    pub modulus: u128,
}

/// `F_k mod N`, one more than the tower residue.
pub fn fermat_number_mod(k: u128, ctx: &TowerContext) -> Result<Residue> {
    let t = tower_residue(k, ctx)?;
    Residue::new(t.value + 1, ctx.modulus)
}

/// Term-wise sum of Fermat numbers mod N.
pub fn fermat_sum_mod(spec: &FermatSumSpec, ctx: &TowerContext, budget: u64) -> Result<Residue> {
    if ctx.modulus != spec.modulus {
        return Err(Error::InvalidInput(format!(
            "context modulus {} does not match spec modulus {}",
            ctx.modulus, spec.modulus
        )));
    }
    let terms = spec.m as u128 + 1;
    if terms > budget as u128 {
        return Err(Error::BudgetExceeded { terms, budget });
    }
    let n_mod = ctx.modulus;
    let s = ctx.order;
    let mut exponent = if s == 1 {
        0
    } else {
        crate::modmath::pow_mod(2, spec.n, s)?.value
    };
    let mut acc: u128 = 0;
    for _ in 0..=spec.m {
        let term = crate::modmath::pow_mod(2, exponent, n_mod)?.value;
        acc = (acc + term + 1) % n_mod;
        exponent = exponent + exponent;
        if exponent >= s {
            exponent -= s;
        }
    }
    Residue::new(acc, n_mod)
}

/// Checks the Mersenne-chain congruence: for `n = k*q` and
/// `m = (q-1) + r*q + i*q*N`, the Fermat sum `F_n + ... + F_{n+m}` must be
/// congruent to `(q-1) + r*q` modulo `N`.
pub fn verify_corollary3(w: &MersenneWitness, k: u32, i: u64, budget: u64) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let n_mod = w.chain.n;
    let q = w.a as u128;
    let expected = ((q - 1) % n_mod + mul_mod(w.r % n_mod, q, n_mod)?.value) % n_mod;
    let m = &w.m0 + BigUint::from(i) * &w.period;
    let ctx = TowerContext::with_order(n_mod, w.s)?;
    let term_count = &m + 1u32;
    let computed = if term_count <= BigUint::from(budget) {
        let m_small: u64 = (&m).try_into().expect("m fits u64 within budget");
        let spec = FermatSumSpec { n: k as u128 * q, m: m_small, modulus: n_mod };
        fermat_sum_mod(&spec, &ctx, budget)?.value
    } else {
        // fermat sum = tower sum + m; the tower sum follows the block law
        let t = w.r % n_mod;
        let tower = block_sum_check(w.kl_mod, w.kb_mod, t, n_mod)?.value;
        let m_mod_n: u128 = (&m % BigUint::from(n_mod))
            .try_into()
            .expect("reduced value fits u128");
        (tower + m_mod_n) % n_mod
    };
    Ok(computed == expected)
}
