//! Residues of the double-exponential terms `2^(2^j) mod N` and oracles for
//! the sums `I_{n,m} = 1 + 2^(2^n) + ... + 2^(2^(n+m))`.
//!
//! Two independent evaluation routes exist on purpose: `i_sum_mod` reduces
//! each tower exponent modulo the order of 2 and never leaves 128-bit
//! arithmetic, while `i_sum_exact_mod` materializes the sum as an exact big
//! integer (feasible up to 65536-bit summands) and reduces it once at the
//! end. Agreement between the two is the ground truth every certificate in
//! this crate is checked against.

use num_bigint::BigUint;
use num_traits::One;

use crate::modmath::{mul_mod, pow_mod, Residue};
use crate::{Error, Result};

/// Default cap on the number of summands for term-wise evaluation.
pub const DEFAULT_TERM_BUDGET: u64 = 10_000_000;

/// Tower exponents larger than this have no exact-oracle route.
pub const EXACT_ORACLE_CAP: u64 = 16;

/// Precomputing a table of powers of 2 mod N pays off below this order.
const POWER_TABLE_CAP: u128 = 1 << 22;

/// An odd modulus together with the multiplicative order of 2 modulo it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TowerContext {
    pub modulus: u128,
    pub order: u128,
}

impl TowerContext {
    /// Derives the order of 2 generically; the modulus must stay below 2^63.
    pub fn new(modulus: u128) -> Result<Self> {
        let order = crate::modmath::multiplicative_order(2, modulus)?;
        Ok(TowerContext { modulus, order })
    }

    /// Accepts a caller-supplied order, for moduli where generic order
    /// computation is out of reach. Checks 2^order = 1 (mod modulus) but
    /// cannot check minimality.
    pub fn with_order(modulus: u128, order: u128) -> Result<Self> {
        if modulus < 3 || modulus % 2 == 0 {
            return Err(Error::InvalidInput(format!("modulus must be odd >= 3, got {modulus}")));
        }
        if order == 0 || pow_mod(2, order, modulus)?.value != 1 {
            return Err(Error::InvalidInput(format!(
                "2^{order} is not 1 modulo {modulus}"
            )));
        }
        Ok(TowerContext { modulus, order })
    }
}

/// The sum `I_{n,m}`: it has m + 2 summands, the leading 1 plus the terms
/// `2^(2^(n+j))` for j = 0..=m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumSpec {
    pub n: u128,
    pub m: u64,
}

/// `2^(2^j) mod N`, via exponent reduction: 2^j is reduced modulo the order
/// of 2 before the final modular power.
pub fn tower_residue(j: u128, ctx: &TowerContext) -> Result<Residue> {
    let exponent = if ctx.order == 1 {
        0
    } else {
        pow_mod(2, j, ctx.order)?.value
    };
    pow_mod(2, exponent, ctx.modulus)
}

/// Lookup table of 2^x mod N for x in 0..order, used when the order is small
/// enough that one table beats a modular power per term.
fn power_table(ctx: &TowerContext) -> Vec<u128> {
    let s = ctx.order as usize;
    let mut table = Vec::with_capacity(s);
    let mut value: u128 = 1 % ctx.modulus;
    for _ in 0..s {
        table.push(value);
        value = mul_mod(value, 2, ctx.modulus).expect("modulus checked").value;
    }
    table
}

/// Term-wise oracle: `(1 + sum of 2^(2^(n+j)) for j = 0..=m) mod N`.
///
/// The exponent 2^(n+j) is carried modulo the order and doubled once per
/// term, so the loop does O(m) work independent of the true tower height.
pub fn i_sum_mod(spec: &SumSpec, ctx: &TowerContext, budget: u64) -> Result<Residue> {
    let terms = spec.m as u128 + 2;
    if terms > budget as u128 {
        return Err(Error::BudgetExceeded { terms, budget });
    }
    let n_mod = ctx.modulus;
    let s = ctx.order;
    let mut exponent = if s == 1 { 0 } else { pow_mod(2, spec.n, s)?.value };
    let mut acc: u128 = 1 % n_mod;
    if s <= POWER_TABLE_CAP && spec.m > 64 {
        let table = power_table(ctx);
        for _ in 0..=spec.m {
            acc += table[exponent as usize];
            if acc >= n_mod {
                acc -= n_mod;
            }
            exponent <<= 1;
            if exponent >= s {
                exponent -= s;
            }
        }
    } else {
        for _ in 0..=spec.m {
            let term = pow_mod(2, exponent, n_mod)?.value;
            acc += term;
            if acc >= n_mod {
                acc -= n_mod;
            }
            // double the tower exponent modulo the order
            exponent = exponent + exponent;
            if exponent >= s {
                exponent -= s;
            }
        }
    }
    Residue::new(acc, n_mod)
}

/// Exact-integer oracle: builds `I_{n,m}` as a big integer by repeated exact
/// squaring, then reduces once. Makes no use of the order of 2.
pub fn i_sum_exact_mod(spec: &SumSpec, modulus: u128) -> Result<Residue> {
    if modulus < 3 || modulus % 2 == 0 {
        return Err(Error::InvalidInput(format!("modulus must be odd >= 3, got {modulus}")));
    }
    let total = spec.n.saturating_add(spec.m as u128);
    if total > EXACT_ORACLE_CAP as u128 {
        return Err(Error::TowerTooTall(total.min(u64::MAX as u128) as u64));
    }
    let mut term = BigUint::one() << (1u64 << (spec.n as u32)); // 2^(2^n)
    let mut sum = BigUint::one();
    for _ in 0..=spec.m {
        sum += &term;
        term = &term * &term;
    }
    let value = sum % BigUint::from(modulus);
    let digits = value.to_u64_digits();
    let reduced = digits
        .iter()
        .rev()
        .fold(0u128, |acc, &d| (acc << 64) | d as u128);
    Residue::new(reduced, modulus)
}

/// Block-law prediction `(k_l + t * k_b) mod N` for the residue of
/// `I_{n, l + t*a}`, with `t` reduced modulo `N`. This is the route used
/// when `m` is far beyond any term-wise budget.
pub fn block_sum_check(k_l: Residue, k_b: Residue, t: u128, modulus: u128) -> Result<Residue> {
    if k_l.modulus != modulus || k_b.modulus != modulus {
        return Err(Error::InvalidInput(
            "block constants must be residues modulo the target modulus".into(),
        ));
    }
    let scaled = mul_mod(t % modulus, k_b.value, modulus)?.value;
    Residue::new(k_l.value + scaled, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u128) -> TowerContext {
        TowerContext::new(n).unwrap()
    }

    #[test]
    fn tower_residue_cases() {
        // 2^16 mod 31 = 65536 mod 31 = 2
        assert_eq!(tower_residue(4, &ctx(31)).unwrap().value, 2);
        assert_eq!(tower_residue(0, &ctx(9)).unwrap().value, 2);
        assert_eq!(tower_residue(2, &ctx(21)).unwrap().value, 16);
    }

    #[test]
    fn sierpinski_21() {
        let c = ctx(21);
        for n in 1..=20u128 {
            let spec = SumSpec { n, m: 1 };
            assert_eq!(i_sum_mod(&spec, &c, DEFAULT_TERM_BUDGET).unwrap().value, 0);
        }
    }

    #[test]
    fn small_sums() {
        // 1 + 16 + 256 = 273 = 7 * 39
        let spec = SumSpec { n: 2, m: 1 };
        assert_eq!(i_sum_mod(&spec, &ctx(7), DEFAULT_TERM_BUDGET).unwrap().value, 0);
        // Example 1 family member m = 94
        let spec = SumSpec { n: 4, m: 94 };
        assert_eq!(i_sum_mod(&spec, &ctx(31), DEFAULT_TERM_BUDGET).unwrap().value, 0);
    }

    #[test]
    fn exact_oracle_cases() {
        let spec = SumSpec { n: 1, m: 1 };
        assert_eq!(i_sum_exact_mod(&spec, 21).unwrap().value, 0); // 1 + 4 + 16
        let spec = SumSpec { n: 2, m: 0 };
        assert_eq!(i_sum_exact_mod(&spec, 17).unwrap().value, 0); // 1 + 16
        let spec = SumSpec { n: 3, m: 2 };
        assert_eq!(
            i_sum_exact_mod(&spec, 13).unwrap(),
            i_sum_mod(&spec, &ctx(13), DEFAULT_TERM_BUDGET).unwrap()
        );
    }

    #[test]
    fn exact_oracle_range_cap() {
        let spec = SumSpec { n: 10, m: 7 };
        assert!(matches!(i_sum_exact_mod(&spec, 21), Err(Error::TowerTooTall(_))));
    }

    #[test]
    fn budget_error() {
        let spec = SumSpec { n: 1, m: 100 };
        assert!(matches!(
            i_sum_mod(&spec, &ctx(21), 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn block_check_cases() {
        let kl = Residue::new(23, 31).unwrap();
        let kb = Residue::new(30, 31).unwrap();
        assert_eq!(block_sum_check(kl, kb, 23, 31).unwrap().value, 0);
        assert_eq!(block_sum_check(kl, kb, 0, 31).unwrap().value, 23);

        let kl = Residue::new(62, 217).unwrap();
        let kb = Residue::new(61, 217).unwrap();
        assert_eq!(block_sum_check(kl, kb, 31, 217).unwrap().value, 0);
    }

    #[test]
    fn base_reduction_at_multiples_of_a() {
        // for n a multiple of a = ord_s(2), 2^n = 1 (mod s), so the tower
        // term at j = n reduces to 2
        for (n_mod, a) in [(31u128, 4u128), (217, 4), (889, 6)] {
            let c = ctx(n_mod);
            for k in 1..=3 {
                assert_eq!(tower_residue(a * k, &c).unwrap().value, 2);
            }
        }
    }
}
