//! Number-theoretic transforms over three word-sized NTT primes, combined by
//! Garner's algorithm into exact convolutions modulo any `p < 2^31`.

const M1: u64 = 998_244_353;
const M2: u64 = 167_772_161;
const M3: u64 = 469_762_049;
const ROOT: u64 = 3;

/// Largest transform length supported by all three primes.
pub(crate) const MAX_LEN: usize = 1 << 23;

fn pow_const<const M: u64>(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    b %= M;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % M;
        }
        b = b * b % M;
        e >>= 1;
    }
    acc
}

fn transform<const M: u64>(a: &mut [u64], invert: bool) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut twiddles = Vec::with_capacity(n / 2);
    let mut len = 2;
    while len <= n {
        let mut w = pow_const::<M>(ROOT, (M - 1) / len as u64);
        if invert {
            w = pow_const::<M>(w, M - 2);
        }
        let half = len / 2;
        twiddles.clear();
        let mut cur = 1u64;
        for _ in 0..half {
            twiddles.push(cur);
            cur = cur * w % M;
        }
        for chunk in a.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), &t) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let x = *u;
                let y = *v * t % M;
                *u = if x + y >= M { x + y - M } else { x + y };
                *v = if x >= y { x - y } else { x + M - y };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pow_const::<M>(n as u64, M - 2);
        for x in a.iter_mut() {
            *x = *x * inv_n % M;
        }
    }
}

fn cyclic<const M: u64>(a: &[u64], b: &[u64], len: usize) -> Vec<u64> {
    let mut fa = vec![0u64; len];
    let mut fb = vec![0u64; len];
    for (i, &x) in a.iter().enumerate() {
        let k = i % len;
        fa[k] = (fa[k] + x % M) % M;
    }
    for (i, &x) in b.iter().enumerate() {
        let k = i % len;
        fb[k] = (fb[k] + x % M) % M;
    }
    transform::<M>(&mut fa, false);
    transform::<M>(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % M;
    }
    transform::<M>(&mut fa, true);
    fa
}

/// Cyclic convolution of length `len` (a power of two) of `a` and `b`, reduced mod `p`.
///
/// Exact as long as every true output is below `M1·M2·M3 ≈ 2^86`, which holds
/// for `p < 2^31` and `len ≤ 2^23`. When the outputs stay below `M1·M2` the
/// third transform is skipped.
pub(crate) fn cyclic_convolution_mod(a: &[u64], b: &[u64], len: usize, p: u64) -> Vec<u64> {
    debug_assert!(len.is_power_of_two() && len <= MAX_LEN);
    let terms = a.len().min(b.len()).min(len) as u128;
    let worst = (p as u128 - 1) * (p as u128 - 1) * terms;
    let m1m2 = M1 as u128 * M2 as u128;
    let r1 = cyclic::<M1>(a, b, len);
    let r2 = cyclic::<M2>(a, b, len);
    let inv_m1_m2 = pow_const::<M2>(M1 % M2, M2 - 2);
    if worst < m1m2 {
        return r1
            .iter()
            .zip(&r2)
            .map(|(&x1, &x2)| {
                let t2 = (x2 + M2 - x1 % M2) % M2 * inv_m1_m2 % M2;
                ((x1 as u128 + M1 as u128 * t2 as u128) % p as u128) as u64
            })
            .collect();
    }
    let r3 = cyclic::<M3>(a, b, len);
    let m1m2_m3 = (M1 % M3) * (M2 % M3) % M3;
    let inv_m1m2_m3 = pow_const::<M3>(m1m2_m3, M3 - 2);
    r1.iter()
        .zip(&r2)
        .zip(&r3)
        .map(|((&x1, &x2), &x3)| {
            let t2 = (x2 + M2 - x1 % M2) % M2 * inv_m1_m2 % M2;
            let partial = x1 as u128 + M1 as u128 * t2 as u128;
            let partial_m3 = (partial % M3 as u128) as u64;
            let t3 = (x3 + M3 - partial_m3) % M3 * inv_m1m2_m3 % M3;
            let value = partial + m1m2 * t3 as u128;
            (value % p as u128) as u64
        })
        .collect()
}
