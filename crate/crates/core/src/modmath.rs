//! Exact modular arithmetic for odd moduli up to `2^127 - 1`.
//!
//! Multiplication dispatches on the modulus width: for moduli fitting in
//! 64 bits a single `u128` product suffices; above that a shift-and-add
//! ladder keeps every intermediate below `2^128`.

use crate::{Error, Result};

/// Largest supported modulus, `2^127 - 1`.
pub const MODULUS_CAP: u128 = (1u128 << 127) - 1;

/// A value reduced modulo its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Residue {
    pub value: u128,
    pub modulus: u128,
}

impl Residue {
    pub fn new(value: u128, modulus: u128) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Residue { value: value % modulus, modulus })
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

/// The arithmetic progression `{offset + i*modulus : i >= 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongruenceClass {
    pub offset: u128,
    pub modulus: u128,
}

impl CongruenceClass {
    pub fn new(offset: u128, modulus: u128) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidInput("congruence modulus must be positive".into()));
        }
        Ok(CongruenceClass { offset: offset % modulus, modulus })
    }

    pub fn contains(&self, x: u128) -> bool {
        x % self.modulus == self.offset
    }
}

fn check_modulus(modulus: u128) -> Result<()> {
    if modulus < 2 || modulus > MODULUS_CAP {
        return Err(Error::InvalidModulus(modulus));
    }
    Ok(())
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

pub fn lcm(a: u128, b: u128) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// (a + b) mod m for reduced a, b. Safe: a + b < 2*m <= 2^128.
fn add_mod_raw(a: u128, b: u128, m: u128) -> u128 {
    let s = a.wrapping_add(b);
    if s >= m || s < a {
        s.wrapping_sub(m)
    } else {
        s
    }
}

fn mul_mod_raw(a: u128, b: u128, m: u128) -> u128 {
    let mut a = a % m;
    let mut b = b % m;
    if m <= u64::MAX as u128 {
        return a * b % m;
    }
    // shift-and-add ladder; all intermediates stay below 2^128 for m <= 2^127 - 1
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut acc: u128 = 0;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod_raw(acc, a, m);
        }
        a = add_mod_raw(a, a, m);
        b >>= 1;
    }
    acc
}

/// (x * y) mod modulus, exact for any modulus up to the cap.
pub fn mul_mod(x: u128, y: u128, modulus: u128) -> Result<Residue> {
    check_modulus(modulus)?;
    Ok(Residue { value: mul_mod_raw(x, y, modulus), modulus })
}

/// base^exponent mod modulus by square-and-multiply; `pow_mod(b, 0, m) = 1 mod m`.
pub fn pow_mod(base: u128, exponent: u128, modulus: u128) -> Result<Residue> {
    check_modulus(modulus)?;
    let mut base = base % modulus;
    let mut exp = exponent;
    let mut acc: u128 = 1 % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_raw(acc, base, modulus);
        }
        base = mul_mod_raw(base, base, modulus);
        exp >>= 1;
    }
    Ok(Residue { value: acc, modulus })
}

/// Extended Euclid: returns (g, x, y) with g = gcd(|a|, |b|) >= 1 and a*x + b*y = g.
pub fn egcd(a: i128, b: i128) -> Result<(i128, i128, i128)> {
    if a == 0 && b == 0 {
        return Err(Error::InvalidInput("egcd(0, 0) is undefined".into()));
    }
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        Ok((-r0, -x0, -y0))
    } else {
        Ok((r0, x0, y0))
    }
}

/// Inverse of a modulo m, when gcd(a, m) = 1.
pub fn inv_mod(a: u128, modulus: u128) -> Result<u128> {
    check_modulus(modulus)?;
    let a = a % modulus;
    let (g, x, _) = egcd(a as i128, modulus as i128)?;
    if g != 1 {
        return Err(Error::NotCoprime { base: a, modulus });
    }
    Ok(x.rem_euclid(modulus as i128) as u128)
}

/// Solves coeff * r = target (mod modulus).
///
/// Returns the full solution class `r = x0 (mod modulus / g)` with
/// `g = gcd(coeff, modulus)` and `x0` the least nonnegative representative,
/// or `None` when `g` does not divide `target`.
pub fn solve_linear_congruence(
    coeff: u128,
    target: u128,
    modulus: u128,
) -> Result<Option<CongruenceClass>> {
    check_modulus(modulus)?;
    let coeff = coeff % modulus;
    let target = target % modulus;
    let g = gcd(coeff, modulus);
    if g == 0 {
        // coeff = 0: solvable iff target = 0, and then every r works
        return Ok(if target == 0 {
            Some(CongruenceClass { offset: 0, modulus: 1 })
        } else {
            None
        });
    }
    if target % g != 0 {
        return Ok(None);
    }
    let m = modulus / g;
    if m == 1 {
        return Ok(Some(CongruenceClass { offset: 0, modulus: 1 }));
    }
    let inv = inv_mod(coeff / g, m)?;
    let offset = mul_mod_raw(target / g % m, inv, m);
    Ok(Some(CongruenceClass { offset, modulus: m }))
}

fn merge_classes(a: &CongruenceClass, b: &CongruenceClass) -> Result<Option<CongruenceClass>> {
    let g = gcd(a.modulus, b.modulus);
    let diff = b.offset as i128 - a.offset as i128;
    if diff.unsigned_abs() % g != 0 {
        return Ok(None);
    }
    let merged_modulus = a
        .modulus
        .checked_div(g)
        .and_then(|q| q.checked_mul(b.modulus))
        .filter(|&m| m <= MODULUS_CAP)
        .ok_or_else(|| Error::InvalidInput("crt modulus product exceeds 128-bit cap".into()))?;
    if merged_modulus == 1 {
        return Ok(Some(CongruenceClass { offset: 0, modulus: 1 }));
    }
    let m2 = b.modulus / g;
    let step = if m2 == 1 {
        0
    } else {
        let inv = inv_mod(a.modulus / g % m2, m2)?;
        let d = (diff / g as i128).rem_euclid(m2 as i128) as u128;
        mul_mod_raw(d, inv, m2)
    };
    // offset = a.offset + a.modulus * step < a.modulus * m2 = merged_modulus
    let offset = a.offset + a.modulus * step;
    Ok(Some(CongruenceClass { offset: offset % merged_modulus, modulus: merged_modulus }))
}

/// Combines simultaneous congruences into one class.
///
/// Handles non-coprime moduli: inconsistent systems yield `None`,
/// consistent ones merge to a class modulo the lcm of the moduli.
pub fn crt(classes: &[CongruenceClass]) -> Result<Option<CongruenceClass>> {
    if classes.is_empty() {
        return Err(Error::InvalidInput("crt needs at least one congruence".into()));
    }
    let mut acc = classes[0];
    for class in &classes[1..] {
        match merge_classes(&acc, class)? {
            Some(merged) => acc = merged,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}

/// Trial-division factorization into (prime, multiplicity) pairs, ascending.
pub fn factor(n: u128) -> Vec<(u128, u32)> {
    let mut n = n;
    let mut out = Vec::new();
    let mut push = |p: u128, n: &mut u128| {
        let mut k = 0;
        while *n % p == 0 {
            *n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p: u128 = 5;
    while p * p <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Carmichael function of an odd n > 1: lcm over p^k || n of p^(k-1)*(p-1).
fn carmichael_odd(n: u128) -> u128 {
    let mut lam: u128 = 1;
    for (p, k) in factor(n) {
        let mut comp = p - 1;
        for _ in 1..k {
            comp *= p;
        }
        lam = lcm(lam, comp);
    }
    lam
}

/// Least positive s with base^s = 1 (mod modulus), for odd moduli up to 2^63.
///
/// Works by factoring the modulus, forming the Carmichael function as a
/// multiple of the order, and stripping prime factors.
pub fn multiplicative_order(base: u128, modulus: u128) -> Result<u128> {
    check_modulus(modulus)?;
    if modulus % 2 == 0 || modulus < 3 {
        return Err(Error::InvalidInput(format!(
            "multiplicative_order needs an odd modulus >= 3, got {modulus}"
        )));
    }
    if modulus > (1u128 << 63) {
        return Err(Error::InvalidInput(format!(
            "modulus {modulus} exceeds 2^63; supply a known order instead"
        )));
    }
    if gcd(base % modulus, modulus) != 1 {
        return Err(Error::NotCoprime { base: base % modulus, modulus });
    }
    let mut order = carmichael_odd(modulus);
    for (p, _) in factor(order) {
        while order % p == 0 && pow_mod(base, order / p, modulus)?.value == 1 {
            order /= p;
        }
    }
    debug_assert_eq!(pow_mod(base, order, modulus)?.value, 1);
    Ok(order)
}
