//! Double Mersenne chains `q -> p = 2^q - 1 -> N = 2^p - 1` and the
//! closed-form certificate they admit.
//!
//! When both `p` and `N` are prime, the order of 2 modulo `N` is `p` and the
//! order of 2 modulo `p` is `q`, so the generic construction collapses to
//! `s = p`, `a = q`, `l = q - 1`, `b = 1`, with the exact block constants
//! `k_b = 2 + 4 + 2^4 + ... + 2^(2^(q-1))` and `k_l = k_b + 1`.

use num_bigint::BigUint;
use num_traits::One;

use crate::modmath::{inv_mod, mul_mod, Residue};
use crate::tower::{block_sum_check, i_sum_mod, SumSpec, TowerContext};
use crate::witness::{CheckMethod, CheckRecord, VerificationReport};
use crate::{Error, Result};

/// Largest Mersenne exponent the Lucas-Lehmer routine accepts.
pub const LUCAS_LEHMER_CAP: u32 = 521;

/// Largest chain index: q = 7 gives N = 2^127 - 1, the kernel cap.
pub const CHAIN_CAP: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MersenneChain {
    pub q: u32,
    pub p: u32,
    pub n: u128,
    pub p_prime: bool,
    pub n_prime: bool,
}

impl MersenneChain {
    pub fn admissible(&self) -> bool {
        self.p_prime && self.n_prime
    }
}

/// The specialized certificate, with exact (not just reduced) block constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MersenneWitness {
    pub chain: MersenneChain,
    /// Order of 2 mod N, equal to p.
    pub s: u128,
    /// Order of 2 mod s, equal to q.
    pub a: u32,
    pub l: u32,
    pub b: u128,
    /// Exact `1 + 2 + 2^2 + 2^4 + ... + 2^(2^(q-1))`.
    pub kl: u128,
    /// Exact `2 + 2^2 + 2^4 + ... + 2^(2^(q-1))`; always `kl - 1`.
    pub kb: u128,
    pub kl_mod: Residue,
    pub kb_mod: Residue,
    pub r: u128,
    pub m0: BigUint,
    pub period: BigUint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainInapplicabilityReason {
    PComposite,
    NComposite,
    /// `k_b = 0 (mod N)`: the defining congruence is unsolvable.
    KbDivisibleByN,
}

impl ChainInapplicabilityReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChainInapplicabilityReason::PComposite => "p_composite",
            ChainInapplicabilityReason::NComposite => "n_composite",
            ChainInapplicabilityReason::KbDivisibleByN => "kb_divisible_by_n",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainInapplicability {
    pub chain: MersenneChain,
    pub reason: ChainInapplicabilityReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MersenneOutcome {
    Applicable(MersenneWitness),
    Inapplicable(ChainInapplicability),
}

impl MersenneOutcome {
    pub fn witness(&self) -> Option<&MersenneWitness> {
        match self {
            MersenneOutcome::Applicable(w) => Some(w),
            MersenneOutcome::Inapplicable(_) => None,
        }
    }
}

fn is_small_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Lucas-Lehmer test: `2^p - 1` is prime iff the recurrence
/// `s_0 = 4, s_{k+1} = s_k^2 - 2 (mod 2^p - 1)` hits 0 after p - 2 steps.
///
/// Uses the 128-bit kernel for p <= 127 and big integers up to the cap.
pub fn lucas_lehmer(p: u32) -> Result<bool> {
    if p > LUCAS_LEHMER_CAP {
        return Err(Error::InvalidInput(format!(
            "p = {p} exceeds the Lucas-Lehmer cap of {LUCAS_LEHMER_CAP}"
        )));
    }
    if p < 3 || !is_small_prime(p as u64) {
        return Err(Error::InvalidInput(format!(
            "Lucas-Lehmer needs an odd prime exponent >= 3, got {p}"
        )));
    }
    if p <= 127 {
        let m = (1u128 << p) - 1;
        let mut s: u128 = 4 % m;
        for _ in 0..p - 2 {
            s = (mul_mod(s, s, m)?.value + m - 2) % m;
        }
        Ok(s == 0)
    } else {
        let m = (BigUint::one() << p) - BigUint::one();
        let two = BigUint::from(2u32);
        let mut s = BigUint::from(4u32);
        for _ in 0..p - 2 {
            s = (&s * &s + &m - &two) % &m;
        }
        Ok(s == BigUint::from(0u32))
    }
}

/// Builds the chain q -> p -> N with primality verdicts.
pub fn mersenne_chain(q: u32) -> Result<MersenneChain> {
    if q < 2 {
        return Err(Error::InvalidInput(format!("chain index q must be >= 2, got {q}")));
    }
    if q > CHAIN_CAP {
        return Err(Error::UnsupportedWidth(q));
    }
    let p = (1u32 << q) - 1;
    let p_prime = is_small_prime(p as u64);
    let n = (1u128 << p) - 1;
    // p composite forces 2^p - 1 composite; Lucas-Lehmer decides the rest
    let n_prime = p_prime && lucas_lehmer(p)?;
    Ok(MersenneChain { q, p, n, p_prime, n_prime })
}

/// Exact `k_b = sum of 2^(2^j) for j = 0..q-1`; at most 2^65 for q <= 7.
fn exact_kb(q: u32) -> u128 {
    (0..q).map(|j| 1u128 << (1u64 << j)).sum()
}

/// The closed-form certificate for an admissible chain.
pub fn mersenne_witness(q: u32) -> Result<MersenneOutcome> {
    let chain = mersenne_chain(q)?;
    if !chain.p_prime {
        return Ok(MersenneOutcome::Inapplicable(ChainInapplicability {
            chain,
            reason: ChainInapplicabilityReason::PComposite,
        }));
    }
    if !chain.n_prime {
        return Ok(MersenneOutcome::Inapplicable(ChainInapplicability {
            chain,
            reason: ChainInapplicabilityReason::NComposite,
        }));
    }
    let n = chain.n;
    let kb = exact_kb(q);
    let kl = kb + 1;
    let kb_mod = Residue::new(kb, n)?;
    let kl_mod = Residue::new(kl, n)?;
    if kb_mod.is_zero() {
        return Ok(MersenneOutcome::Inapplicable(ChainInapplicability {
            chain,
            reason: ChainInapplicabilityReason::KbDivisibleByN,
        }));
    }
    // N is prime and kb != 0 mod N, so kb is invertible: r = -kl * kb^-1
    let target = (n - kl_mod.value) % n;
    let r = mul_mod(target, inv_mod(kb_mod.value, n)?, n)?.value;
    let m0 = BigUint::from(q - 1) + BigUint::from(r) * BigUint::from(q);
    let period = BigUint::from(q) * BigUint::from(n);
    Ok(MersenneOutcome::Applicable(MersenneWitness {
        chain,
        s: chain.p as u128,
        a: q,
        l: q - 1,
        b: 1,
        kl,
        kb,
        kl_mod,
        kb_mod,
        r,
        m0,
        period,
    }))
}

/// Checks family members over `n = q, 2q, ..., k_max*q` and `i = 0..=i_max`,
/// term-wise when the member fits the budget and by the block law otherwise.
pub fn mersenne_verify(
    w: &MersenneWitness,
    k_max: u32,
    i_max: u32,
    budget: u64,
) -> Result<VerificationReport> {
    let n_mod = w.chain.n;
    let ctx = TowerContext::with_order(n_mod, w.s)?;
    let mut checks = Vec::new();
    for k in 1..=k_max as u128 {
        let n = k * w.a as u128;
        for i in 0..=i_max {
            let m = &w.m0 + BigUint::from(i) * &w.period;
            let term_count = &m + 2u32;
            let (residue, method) = if term_count <= BigUint::from(budget) {
                let m_small: u64 = (&m).try_into().expect("m fits u64 within budget");
                let spec = SumSpec { n, m: m_small };
                (i_sum_mod(&spec, &ctx, budget)?.value, CheckMethod::TermWise)
            } else {
                // t = (r + i*N) mod N; the i*N part vanishes
                let t = w.r % n_mod;
                (
                    block_sum_check(w.kl_mod, w.kb_mod, t, n_mod)?.value,
                    CheckMethod::Block,
                )
            };
            checks.push(CheckRecord {
                n,
                m,
                residue,
                pass: residue == 0,
                method,
            });
        }
    }
    Ok(VerificationReport { checks })
}
