//! Exact integer, rational and modular arithmetic shared by the rest of the crate.
//!
//! Word-sized residues (`u64` with a modulus below `2^63`) carry the hot paths;
//! [`Residue`] and [`Rat`] carry everything that has to be reconstructed exactly.

mod primes;

pub use primes::{
    factor_u64, is_prime, is_prime_u64, next_prime_above, primes_in_range, primitive_root,
};

use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// Bit size of a rational: `⌈log2(|a|+1)⌉ + ⌈log2(b+1)⌉ + 1` for `a/b` in lowest terms.
pub fn size_of(q: &Rat) -> u64 {
    q.numer().bits() + q.denom().bits() + 1
}

/// Representative of `a` modulo `m` in `{1, …, m}`.
pub fn remo(a: i128, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidInput("remo modulus must be positive".into()));
    }
    let r = a.rem_euclid(m as i128) as u64;
    Ok(if r == 0 { m } else { r })
}

/// Representative of `a` modulo `m` in `{0, …, m-1}`.
pub fn rem(a: i128, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidInput("rem modulus must be positive".into()));
    }
    Ok(a.rem_euclid(m as i128) as u64)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= 1 << 32 {
        (a * b) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Image of a rational in `Z_m`, or `None` when its denominator is not invertible.
pub fn rat_mod(q: &Rat, m: u64) -> Option<u64> {
    let big_m = BigInt::from(m);
    let num = q.numer().mod_floor(&big_m).to_u64()?;
    let den = q.denom().mod_floor(&big_m).to_u64()?;
    Some(mul_mod(num, inv_mod(den, m)?, m))
}

/// Image of a rational modulo an arbitrary-precision modulus.
pub fn rat_mod_big(q: &Rat, m: &BigUint) -> Option<BigUint> {
    let big_m = BigInt::from(m.clone());
    let num = q.numer().mod_floor(&big_m);
    let den = q.denom().mod_floor(&big_m);
    let inv = inv_mod_big(&den, &big_m)?;
    (num * inv).mod_floor(&big_m).to_biguint()
}

/// Inverse modulo a big modulus, in `[0, m)`.
pub fn inv_mod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Element of `Z/mZ`, stored as its least non-negative representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    value: BigInt,
    modulus: BigInt,
}

impl Residue {
    /// Reduces `value` modulo `modulus`; the modulus must be at least 2.
    pub fn new(value: impl Into<BigInt>, modulus: impl Into<BigInt>) -> Result<Self> {
        let modulus = modulus.into();
        if modulus < BigInt::from(2) {
            return Err(Error::InvalidInput(format!(
                "residue modulus {modulus} must be at least 2"
            )));
        }
        let value = value.into().mod_floor(&modulus);
        Ok(Residue { value, modulus })
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Symmetric representative in `[-⌊m/2⌋, ⌊m/2⌋]`.
    pub fn signed_lift(&self) -> BigInt {
        let half: BigInt = &self.modulus >> 1;
        if self.value > half {
            &self.value - &self.modulus
        } else {
            self.value.clone()
        }
    }
}

/// Chinese remaindering for two congruences whose moduli need not be coprime.
///
/// The result lives modulo `lcm(m_a, m_b)`.
pub fn crt_pair(a: &Residue, b: &Residue) -> Result<Residue> {
    let e = a.modulus.extended_gcd(&b.modulus);
    let g = e.gcd;
    let diff = &b.value - &a.value;
    if !diff.is_multiple_of(&g) {
        return Err(Error::Inconsistent(format!(
            "{} mod {} vs {} mod {}",
            a.value, a.modulus, b.value, b.modulus
        )));
    }
    let mb_g = &b.modulus / &g;
    let lcm = &a.modulus * &mb_g;
    // e.x * m_a ≡ g (mod m_b), so x = a + m_a * (diff/g) * e.x solves both.
    let k = ((&diff / &g) * &e.x).mod_floor(&mb_g);
    let value = (&a.value + &a.modulus * k).mod_floor(&lcm);
    Ok(Residue {
        value,
        modulus: lcm,
    })
}

/// Folds any number of congruences with [`crt_pair`].
pub fn crt_all<'a>(residues: impl IntoIterator<Item = &'a Residue>) -> Result<Option<Residue>> {
    let mut acc: Option<Residue> = None;
    for r in residues {
        acc = Some(match acc {
            None => r.clone(),
            Some(prev) => crt_pair(&prev, r)?,
        });
    }
    Ok(acc)
}

/// Recovers `a/b` with `|a| ≤ bound`, `1 ≤ b ≤ bound` and `a ≡ b·u` from the residue `u`.
///
/// Uniqueness needs `modulus ≥ 2·bound² + 1`, which callers arrange.
pub fn rational_reconstruct(u: &Residue, bound: &BigInt) -> Result<Rat> {
    let fail = || Error::NoReconstruction {
        value: u.value.to_string(),
        modulus: u.modulus.to_string(),
        bound: bound.to_string(),
    };
    let (mut r0, mut r1) = (u.modulus.clone(), u.value.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.abs() > *bound || t1.is_zero() {
        return Err(fail());
    }
    if !r1.gcd(&t1).is_one() || !t1.gcd(&u.modulus).is_one() {
        return Err(fail());
    }
    let (num, den) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    Ok(Rat::new(num, den))
}

/// `2^bits` as a big integer.
pub fn pow2(bits: u64) -> BigInt {
    BigInt::one() << bits
}

/// `log2` of a positive big integer as a float (exact to well within a bit).
pub fn log2_big(x: &BigInt) -> f64 {
    if x.sign() != Sign::Plus {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 53;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().log2() + shift as f64
}

/// Parses `"a"` or `"a/b"` into a normalized rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(num, den))
}

/// Formats as `"a"` when integral and `"a/b"` otherwise.
pub fn format_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
