//! Roots of univariate polynomials over a prime field `Z_r` with `r < 2^63`.
//!
//! Polynomials are coefficient vectors in ascending degree, kept trimmed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{add_mod, inv_mod, mul_mod, sub_mod};

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mul(a: &[u64], b: &[u64], r: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, r), r);
        }
    }
    trim(out)
}

/// Remainder of `a` modulo a nonzero `m`.
fn rem(a: &[u64], m: &[u64], r: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let inv_lead = inv_mod(m[dm], r).expect("nonzero leading coefficient");
    while a.len() > dm {
        let top = a.len() - 1;
        let factor = mul_mod(a[top], inv_lead, r);
        let shift = top - dm;
        for (i, &c) in m.iter().enumerate() {
            a[shift + i] = sub_mod(a[shift + i], mul_mod(factor, c, r), r);
        }
        a = trim(a);
    }
    a
}

fn monic(a: Vec<u64>, r: u64) -> Vec<u64> {
    match a.last() {
        None => a,
        Some(&lead) => {
            let inv = inv_mod(lead, r).expect("nonzero leading coefficient");
            a.into_iter().map(|c| mul_mod(c, inv, r)).collect()
        }
    }
}

fn gcd(a: &[u64], b: &[u64], r: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let t = rem(&a, &b, r);
        a = b;
        b = t;
    }
    monic(a, r)
}

/// `base^e mod m`.
fn powmod(base: &[u64], mut e: u64, m: &[u64], r: u64) -> Vec<u64> {
    let mut acc = rem(&[1], m, r);
    let mut b = rem(base, m, r);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(&mul(&acc, &b, r), m, r);
        }
        b = rem(&mul(&b, &b, r), m, r);
        e >>= 1;
    }
    acc
}

fn sub(a: &[u64], b: &[u64], r: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            sub_mod(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
                r,
            )
        })
        .collect();
    trim(out)
}

fn div_exact(a: &[u64], m: &[u64], r: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let inv_lead = inv_mod(m[dm], r).expect("nonzero leading coefficient");
    let mut q = vec![0u64; a.len().saturating_sub(dm)];
    while a.len() > dm {
        let top = a.len() - 1;
        let factor = mul_mod(a[top], inv_lead, r);
        let shift = top - dm;
        q[shift] = factor;
        for (i, &c) in m.iter().enumerate() {
            a[shift + i] = sub_mod(a[shift + i], mul_mod(factor, c, r), r);
        }
        a.pop();
        a = trim(a);
    }
    trim(q)
}

/// Distinct roots in `Z_r` of `f`, ascending. Coefficients must be reduced mod the prime `r`.
///
/// The zero polynomial has no listed roots. Splitting is randomized but seeded,
/// so results are deterministic; the output itself does not depend on the seed.
pub fn roots_mod_prime(f: &[u64], r: u64, seed: u64) -> Vec<u64> {
    let f = monic(trim(f.to_vec()), r);
    if f.len() <= 1 {
        return Vec::new();
    }
    if r < 64 || f.len() == 2 {
        if f.len() == 2 {
            return vec![sub_mod(0, f[0], r)];
        }
        return (0..r)
            .filter(|&x| eval_mod(&f, x, r) == 0)
            .collect();
    }
    // product of the distinct linear factors
    let xr = powmod(&[0, 1], r, &f, r);
    let g = gcd(&f, &sub(&xr, &[0, 1], r), r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut stack = vec![g];
    while let Some(h) = stack.pop() {
        match h.len() {
            0 | 1 => {}
            2 => out.push(sub_mod(0, h[0], r)),
            _ => loop {
                let a = rng.gen_range(0..r);
                let w = powmod(&[a, 1], (r - 1) / 2, &h, r);
                let d = gcd(&h, &sub(&w, &[1], r), r);
                if d.len() > 1 && d.len() < h.len() {
                    let other = div_exact(&h, &d, r);
                    stack.push(d);
                    stack.push(other);
                    break;
                }
            },
        }
    }
    out.sort_unstable();
    out
}

/// `f(x)` over `Z_r`.
fn eval_mod(f: &[u64], x: u64, r: u64) -> u64 {
    f.iter()
        .rev()
        .fold(0, |acc, &c| add_mod(mul_mod(acc, x, r), c, r))
}
