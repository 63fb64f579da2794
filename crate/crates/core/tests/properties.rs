//! Property tests: the 128-bit kernel against big-integer arithmetic, the
//! congruence solvers against brute force, and the two tower oracles
//! against each other.

use num_bigint::BigUint;
use proptest::prelude::*;

use towersum::modmath::{
    crt, gcd, mul_mod, multiplicative_order, pow_mod, solve_linear_congruence, CongruenceClass,
    MODULUS_CAP,
};
use towersum::tower::{
    block_sum_check, i_sum_exact_mod, i_sum_mod, tower_residue, SumSpec, TowerContext,
    DEFAULT_TERM_BUDGET,
};
use towersum::witness::{build_witness, WitnessOutcome};

fn big(x: u128) -> BigUint {
    BigUint::from(x)
}

proptest! {
    #[test]
    fn mul_mod_matches_bigint(x in any::<u128>(), y in any::<u128>(), m in 2u128..=MODULUS_CAP) {
        let x = x % m;
        let y = y % m;
        let got = mul_mod(x, y, m).unwrap().value;
        let want = big(x) * big(y) % big(m);
        prop_assert_eq!(big(got), want);
    }

    #[test]
    fn mul_mod_identity(x in any::<u128>(), m in 2u128..=MODULUS_CAP) {
        let x = x % m;
        prop_assert_eq!(mul_mod(x, 1, m).unwrap().value, x);
    }

    #[test]
    fn pow_mod_exponent_additivity(
        b in 0u128..1000,
        e1 in 0u128..200,
        e2 in 0u128..200,
        m in 2u128..100_000,
    ) {
        let lhs = pow_mod(b, e1 + e2, m).unwrap().value;
        let rhs = mul_mod(
            pow_mod(b, e1, m).unwrap().value,
            pow_mod(b, e2, m).unwrap().value,
            m,
        )
        .unwrap()
        .value;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn linear_congruence_matches_brute_force(
        coeff in 0u128..500,
        target in 0u128..500,
        m in 2u128..500,
    ) {
        let coeff = coeff % m;
        let target = target % m;
        let brute: Option<u128> = (0..m).find(|&r| mul_mod(coeff, r, m).unwrap().value == target);
        match solve_linear_congruence(coeff, target, m).unwrap() {
            Some(class) => {
                prop_assert_eq!(Some(class.offset), brute);
                prop_assert_eq!(mul_mod(coeff, class.offset, m).unwrap().value, target);
                // the whole class solves the congruence
                let next = class.offset + class.modulus;
                if next < m {
                    prop_assert_eq!(mul_mod(coeff, next, m).unwrap().value, target);
                }
            }
            None => prop_assert_eq!(brute, None),
        }
    }

    #[test]
    fn crt_matches_brute_force(
        a1 in 0u128..60, m1 in 2u128..60,
        a2 in 0u128..60, m2 in 2u128..60,
    ) {
        let c1 = CongruenceClass::new(a1 % m1, m1).unwrap();
        let c2 = CongruenceClass::new(a2 % m2, m2).unwrap();
        let brute: Option<u128> =
            (0..m1 * m2).find(|&x| c1.contains(x) && c2.contains(x));
        match crt(&[c1, c2]).unwrap() {
            Some(merged) => {
                prop_assert_eq!(Some(merged.offset), brute);
                prop_assert!(c1.contains(merged.offset));
                prop_assert!(c2.contains(merged.offset));
                prop_assert_eq!(merged.modulus, m1 / gcd(m1, m2) * m2);
            }
            None => prop_assert_eq!(brute, None),
        }
    }

    #[test]
    fn oracles_agree(n in 1u128..13, m in 0u64..13, half in 1u128..5000) {
        let modulus = 2 * half + 1;
        prop_assume!(n + m as u128 <= 14);
        let ctx = TowerContext::new(modulus).unwrap();
        let fast = i_sum_mod(&SumSpec { n, m }, &ctx, DEFAULT_TERM_BUDGET).unwrap();
        let exact = i_sum_exact_mod(&SumSpec { n, m }, modulus).unwrap();
        prop_assert_eq!(fast, exact);
    }

    #[test]
    fn tower_residue_matches_bigint(j in 0u128..14, half in 1u128..5000) {
        let modulus = 2 * half + 1;
        let ctx = TowerContext::new(modulus).unwrap();
        let got = tower_residue(j, &ctx).unwrap().value;
        let want = (BigUint::from(2u32).pow(1u32 << j) % big(modulus))
            .try_into()
            .unwrap();
        prop_assert_eq!(got, want);
    }
}

#[test]
fn block_law_on_paper_moduli() {
    for modulus in [31u128, 217, 889] {
        let w = match build_witness(modulus).unwrap() {
            WitnessOutcome::Applicable(w) => w,
            other => panic!("{modulus} must be applicable: {other:?}"),
        };
        let a = w.a();
        let ctx = TowerContext { modulus, order: w.chain.s };
        let n = a; // n = 0 (mod a)
        for t in 0u64..=10 {
            let m = w.l as u64 + t * a as u64;
            let sum = i_sum_mod(&SumSpec { n, m }, &ctx, DEFAULT_TERM_BUDGET).unwrap();
            let predicted = block_sum_check(w.kl, w.kb, t as u128, modulus).unwrap();
            assert_eq!(sum, predicted, "block law broke at N={modulus}, t={t}");
        }
    }
}

#[test]
fn period_law_small_grid() {
    // I_{n, m} = I_{n, m + N*a} (mod N)
    for modulus in [7u128, 23, 31] {
        let w = match build_witness(modulus).unwrap() {
            WitnessOutcome::Applicable(w) => w,
            other => panic!("{modulus} must be applicable: {other:?}"),
        };
        let a = w.a() as u64;
        let period = (modulus as u64) * a;
        let ctx = TowerContext { modulus, order: w.chain.s };
        for n in [w.a(), 2 * w.a()] {
            for m in 0u64..6 {
                let lhs = i_sum_mod(&SumSpec { n, m }, &ctx, DEFAULT_TERM_BUDGET).unwrap();
                let rhs =
                    i_sum_mod(&SumSpec { n, m: m + period }, &ctx, DEFAULT_TERM_BUDGET).unwrap();
                assert_eq!(lhs, rhs, "period law broke at N={modulus}, n={n}, m={m}");
            }
        }
    }
}

#[test]
fn witness_structural_invariants_under_10k() {
    let records = towersum::witness::scan(3, 2001).unwrap();
    for rec in &records {
        let Some(w) = rec.outcome.witness() else { continue };
        let n_mod = rec.modulus;
        let s = w.chain.s;
        let a = w.a();
        assert_eq!(pow_mod(2, s, n_mod).unwrap().value, 1);
        assert_eq!(pow_mod(2, a, s).unwrap().value, 1);
        assert!((1u128 << w.l) < s && s <= (1u128 << (w.l + 1)));
        assert!(1 <= w.b && w.b < s);
        let combo = (w.kl.value + mul_mod(w.r, w.kb.value, n_mod).unwrap().value) % n_mod;
        assert_eq!(combo, 0);
        assert_eq!(w.period, BigUint::from(n_mod) * BigUint::from(a));
        assert_eq!(w.d, gcd(w.kb.value, n_mod));
        // hypothesis equivalence: a witness exists iff d | k_l
        assert_eq!(w.kl.value % w.d, 0);
    }
    // inapplicable d-cases really have no solution
    for rec in &records {
        if let WitnessOutcome::Inapplicable(i) = &rec.outcome {
            if i.reason == towersum::witness::InapplicabilityReason::DNotDividingKl {
                let chain = towersum::witness::derive_order_chain(rec.modulus).unwrap();
                assert!(chain.s_odd());
            }
        }
    }
}

#[test]
fn r_is_minimal_under_1000() {
    for rec in towersum::witness::scan(3, 999).unwrap() {
        let Some(w) = rec.outcome.witness() else { continue };
        let n_mod = rec.modulus;
        for r_smaller in 0..w.r {
            let combo =
                (w.kl.value + mul_mod(r_smaller, w.kb.value, n_mod).unwrap().value) % n_mod;
            assert_ne!(combo, 0, "smaller r={r_smaller} works for N={n_mod}");
        }
    }
}

#[test]
fn order_stripping_matches_brute_force() {
    for n in (3u128..2000).step_by(2) {
        let s = multiplicative_order(2, n).unwrap();
        let mut x = 1u128;
        let mut brute = 0u128;
        for e in 1..=s {
            x = x * 2 % n;
            if x == 1 {
                brute = e;
                break;
            }
        }
        assert_eq!(s, brute, "order mismatch at {n}");
    }
}
