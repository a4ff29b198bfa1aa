//! Deterministic primality, sieving and small factorizations.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{mul_mod, pow_mod};

const SMALL_PRIMES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

// Jaeschke / Sinclair witness set, exact for every n < 2^64.
const WITNESSES_U64: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

// The first 13 primes as Miller–Rabin bases are exact below this bound (Sorenson–Webster).
const PSI_13: u128 = 3_317_044_064_679_887_385_961_981;

fn strong_probable_prime(n: u64, a: u64, d: u64, s: u32) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality test for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    WITNESSES_U64
        .iter()
        .all(|&a| strong_probable_prime(n, a, d, s))
}

fn strong_probable_prime_big(n: &BigUint, a: &BigUint, d: &BigUint, s: u64) -> bool {
    let n1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
    }
    false
}

fn miller_rabin_big(n: &BigUint, bases: &[u64]) -> bool {
    let n1: BigUint = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    bases
        .iter()
        .all(|&a| strong_probable_prime_big(n, &BigUint::from(a), &d, s))
}

/// Deterministic primality test for integers of any size.
///
/// Witness-set Miller–Rabin settles every `n` below `3.3·10^24`; larger `n`
/// that survive it are certified with a Pocklington proof built from a
/// factorization of `n - 1`.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(w) = n.to_u64() {
        return is_prime_u64(w);
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return false;
        }
    }
    if !miller_rabin_big(n, &SMALL_PRIMES) {
        return false;
    }
    if n.to_u128().is_some_and(|w| w < PSI_13) {
        return true;
    }
    pocklington(n)
}

/// Pocklington–Lehmer certificate: `n - 1 = F·R` with `F > √n` fully factored.
fn pocklington(n: &BigUint) -> bool {
    let n1: BigUint = n - 1u32;
    let factors = factor_big(&n1);
    let mut covered = BigUint::one();
    let mut proven: Vec<BigUint> = Vec::new();
    for q in factors {
        if proven.contains(&q) {
            continue;
        }
        let mut m = n1.clone();
        while (&m % &q).is_zero() {
            m /= &q;
            covered *= &q;
        }
        let e = &n1 / &q;
        let mut witnessed = false;
        for a in 2u64..200 {
            let a = BigUint::from(a);
            if !a.modpow(&n1, n).is_one() {
                return false;
            }
            let y = a.modpow(&e, n);
            let g = (y + n - 1u32).gcd(n);
            if g.is_one() {
                witnessed = true;
                break;
            }
            if &g != n {
                return false;
            }
        }
        if !witnessed {
            return false;
        }
        proven.push(q);
        if &covered * &covered > *n {
            return true;
        }
    }
    &covered * &covered > *n
}

/// Full factorization into primes (with multiplicity, unordered).
fn factor_big(n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut m = n.clone();
    let mut p = 2u64;
    while p < 1 << 16 {
        let bp = BigUint::from(p);
        while (&m % &bp).is_zero() {
            out.push(bp.clone());
            m /= &bp;
        }
        if m.is_one() {
            return out;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![m];
    while let Some(x) = stack.pop() {
        if x.is_one() {
            continue;
        }
        if is_prime(&x) {
            out.push(x);
            continue;
        }
        let d = brent_rho(&x);
        stack.push(&x / &d);
        stack.push(d);
    }
    out
}

fn brent_rho(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut g = BigUint::one();
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m = 128u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

/// Least prime strictly greater than `n`.
pub fn next_prime_above(n: &BigUint) -> BigUint {
    let mut c = n + 1u32;
    if c <= BigUint::from(2u32) {
        return BigUint::from(2u32);
    }
    if c.is_even() {
        c += 1u32;
    }
    while !is_prime(&c) {
        c += 2u32;
    }
    c
}

/// All primes in `[lo, hi)` by a segmented, bit-packed sieve of Eratosthenes.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo.max(2) {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = small_sieve(root);
    let len = (hi - lo) as usize;
    let mut composite = vec![0u64; len.div_ceil(64)];
    for &p in &base {
        let mut m = ((lo + p - 1) / p).max(p) * p;
        while m < hi {
            let i = (m - lo) as usize;
            composite[i / 64] |= 1 << (i % 64);
            m += p;
        }
    }
    (0..len)
        .filter(|&i| composite[i / 64] >> (i % 64) & 1 == 0)
        .map(|i| lo + i as u64)
        .collect()
}

fn small_sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut is = vec![true; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if is[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                is[j] = false;
                j += i;
            }
        }
    }
    out
}

/// Prime factorization by trial division, as `(prime, multiplicity)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest generator of the multiplicative group modulo the prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = factor_u64(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("prime modulus has a primitive root")
}
