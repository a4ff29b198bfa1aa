//! Dense polynomials over `Z_m` for word-sized `m`.
//!
//! Most of the work here happens over a prime field `Z_p`: interpolation from
//! the full grid `{0, …, p-1}`, Taylor shifts, and the exhaustive search for the
//! shift that leaves the fewest non-constant terms.

use crate::arith::{add_mod, inv_mod, is_prime_u64, mul_mod, primitive_root, sub_mod};
use crate::error::{Error, Result};
use crate::ntt;

/// Above this many points, grid interpolation switches from Newton's
/// divided differences to the transform-based method.
pub const DEFAULT_INTERPOLATION_THRESHOLD: usize = 512;

/// Polynomial over `Z_m` as a coefficient vector indexed by degree, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DensePolyMod {
    modulus: u64,
    coeffs: Vec<u64>,
}

impl DensePolyMod {
    /// Builds a polynomial, reducing every coefficient modulo `modulus`.
    ///
    /// Panics if `modulus < 2` or `modulus ≥ 2^63`.
    pub fn new(modulus: u64, coeffs: Vec<u64>) -> Self {
        assert!(
            (2..1 << 63).contains(&modulus),
            "modulus {modulus} out of range"
        );
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % modulus).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        DensePolyMod { modulus, coeffs }
    }

    /// Builds from signed coefficients.
    pub fn from_signed(modulus: u64, coeffs: &[i64]) -> Self {
        let m = modulus as i128;
        Self::new(
            modulus,
            coeffs
                .iter()
                .map(|&c| (c as i128).rem_euclid(m) as u64)
                .collect(),
        )
    }

    pub fn zero(modulus: u64) -> Self {
        Self::new(modulus, Vec::new())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus;
        let x = x % m;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| add_mod(mul_mod(acc, x, m), c, m))
    }

    /// `(k, c_k)` for every nonzero coefficient with `k ≥ 1`.
    pub fn nonconstant_terms(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| (k, c))
    }
}

/// Number of nonzero, non-constant terms.
pub fn tau(f: &DensePolyMod) -> usize {
    f.nonconstant_terms().count()
}

/// The polynomial `g(x) = f(x + γ)`.
pub fn taylor_shift(f: &DensePolyMod, gamma: u64) -> DensePolyMod {
    let m = f.modulus;
    let gamma = gamma % m;
    let mut c = f.coeffs.clone();
    if gamma != 0 && c.len() > 1 {
        let d = c.len() - 1;
        for i in 0..d {
            for j in (i..d).rev() {
                c[j] = add_mod(c[j], mul_mod(gamma, c[j + 1], m), m);
            }
        }
    }
    DensePolyMod::new(m, c)
}

fn check_grid(values: &[u64], p: u64) -> Result<()> {
    if !is_prime_u64(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if p >= 1 << 32 {
        return Err(Error::InvalidInput(format!(
            "grid prime {p} exceeds 2^32"
        )));
    }
    if values.len() as u64 != p {
        return Err(Error::InvalidInput(format!(
            "expected {p} grid values, got {}",
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|&&v| v >= p) {
        return Err(Error::InvalidInput(format!("grid value {v} not reduced mod {p}")));
    }
    Ok(())
}

/// The unique polynomial of degree `< p` taking `values[i]` at `x = i` for every `i ∈ Z_p`.
pub fn interpolate_range(values: &[u64], p: u64) -> Result<DensePolyMod> {
    interpolate_range_with(values, p, DEFAULT_INTERPOLATION_THRESHOLD)
}

/// As [`interpolate_range`], choosing the fast method once `p` exceeds `threshold`.
pub fn interpolate_range_with(values: &[u64], p: u64, threshold: usize) -> Result<DensePolyMod> {
    check_grid(values, p)?;
    let fast_ok = p < 1 << 31 && 2 * (p as usize) <= ntt::MAX_LEN;
    let coeffs = if p as usize > threshold && fast_ok {
        grid_transform(values, p)
    } else {
        newton_grid(values, p)
    };
    Ok(DensePolyMod::new(p, coeffs))
}

/// Newton's divided differences on the equally spaced nodes `0, 1, …, p-1`.
pub(crate) fn newton_grid(values: &[u64], p: u64) -> Vec<u64> {
    let n = values.len();
    let mut inv = vec![0u64; n.max(2)];
    for k in 1..n {
        inv[k] = inv_mod(k as u64, p).expect("k < p is invertible");
    }
    let mut dd = values.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            dd[i] = mul_mod(sub_mod(dd[i], dd[i - 1], p), inv[k], p);
        }
    }
    // expand Σ dd[k] Π_{j<k} (x - j) by Horner from the top
    let mut poly = vec![0u64; n];
    let mut len = 0;
    for k in (0..n).rev() {
        // poly *= (x - k)
        if len > 0 {
            let kk = k as u64 % p;
            for i in (0..=len).rev() {
                let shifted = if i > 0 { poly[i - 1] } else { 0 };
                let scaled = if i < len { mul_mod(poly[i], kk, p) } else { 0 };
                poly[i] = sub_mod(shifted, scaled, p);
            }
        }
        poly[0] = add_mod(poly[0], dd[k], p);
        len = (len + 1).min(n);
    }
    poly
}

/// Interpolation on the whole field via the identity
/// `f(x) = Σ_i v_i (1 - (x - i)^{p-1})`, so `c_0 = v_0` and
/// `c_{p-1-j} = -(Σ_{i≠0} v_i i^j + [j = 0] v_0)`.
///
/// The power sums are a length-`(p-1)` DFT over `Z_p^*`, evaluated with the
/// chirp substitution `mj = C(m+j,2) - C(m,2) - C(j,2)` and one convolution.
pub(crate) fn grid_transform(values: &[u64], p: u64) -> Vec<u64> {
    let n = (p - 1) as usize;
    let g = primitive_root(p);
    let g_inv = inv_mod(g, p).unwrap();

    // a_m = v[g^m] g^{-C(m,2)}, stored reversed; b_s = g^{C(s,2)}
    let mut a_rev = vec![0u64; n];
    let mut b = vec![0u64; 2 * n - 1];
    let (mut gm, mut chirp, mut chirp_inv) = (1u64, 1u64, 1u64);
    let (mut gm_inv, mut node) = (1u64, 1u64);
    for s in 0..2 * n - 1 {
        b[s] = chirp;
        if s < n {
            a_rev[n - 1 - s] = mul_mod(values[node as usize], chirp_inv, p);
            node = mul_mod(node, g, p);
        }
        chirp = mul_mod(chirp, gm, p);
        chirp_inv = mul_mod(chirp_inv, gm_inv, p);
        gm = mul_mod(gm, g, p);
        gm_inv = mul_mod(gm_inv, g_inv, p);
    }
    let len = (2 * n - 1).next_power_of_two();
    let conv = ntt::cyclic_convolution_mod(&a_rev, &b, len, p);

    let mut coeffs = vec![0u64; p as usize];
    coeffs[0] = values[0];
    let (mut chirp_inv, mut gj_inv) = (1u64, 1u64);
    for j in 0..n {
        let mut x = mul_mod(conv[n - 1 + j], chirp_inv, p);
        if j == 0 {
            x = add_mod(x, values[0], p);
        }
        coeffs[n - j] = sub_mod(0, x, p);
        chirp_inv = mul_mod(chirp_inv, gj_inv, p);
        gj_inv = mul_mod(gj_inv, g_inv, p);
    }
    coeffs
}

/// `f(x + γ)` recomputed from the evaluation grid of `f` by re-indexing the
/// points, without touching the coefficients of `f`.
pub fn shift_from_grid(values: &[u64], p: u64, gamma: u64) -> Result<DensePolyMod> {
    check_grid(values, p)?;
    let n = p as usize;
    let g = (gamma % p) as usize;
    let rotated: Vec<u64> = (0..n).map(|i| values[(i + g) % n]).collect();
    interpolate_range(&rotated, p)
}

/// Outcome of the sparsest-shift search over `Z_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinShift {
    /// Smallest `γ` attaining the minimum.
    pub gamma: u64,
    /// Minimal number of nonzero non-constant terms of `f(x + γ)`.
    pub tau: usize,
    /// More than one `γ` attains the minimum.
    pub tie: bool,
}

/// Exhaustive search over `γ ∈ Z_p` for the shift minimising `τ(f(x + γ))`.
pub fn min_shift(f: &DensePolyMod) -> MinShift {
    let p = f.modulus;
    let d = match f.degree() {
        None | Some(0) => {
            return MinShift {
                gamma: 0,
                tau: 0,
                tie: p > 1,
            }
        }
        Some(d) => d,
    };
    let mut cap = 1;
    loop {
        let found = shifts_within(f, cap);
        if let Some(best) = found.iter().map(|&(_, t)| t).min() {
            let mut winners = found.iter().filter(|&&(_, t)| t == best);
            let gamma = winners.next().unwrap().0;
            return MinShift {
                gamma,
                tau: best,
                tie: winners.next().is_some(),
            };
        }
        debug_assert!(cap < d);
        cap *= 2;
    }
}

/// Every `γ ∈ Z_p` with `τ(f(x + γ)) ≤ cap`, paired with that count, ascending in `γ`.
///
/// Coefficients of `f(x + γ)` are produced from the top down and the scan for
/// a given `γ` stops as soon as `cap` is exceeded, so shifts far from sparse
/// cost `O(cap²)` each.
pub fn shifts_within(f: &DensePolyMod, cap: usize) -> Vec<(u64, usize)> {
    let p = f.modulus;
    let d = match f.degree() {
        None => return (0..p).map(|g| (g, 0)).collect(),
        Some(d) => d,
    };
    if d as u64 >= p || !is_prime_u64(p) {
        return (0..p)
            .filter_map(|g| {
                let t = tau(&taylor_shift(f, g));
                (t <= cap).then_some((g, t))
            })
            .collect();
    }

    // b_k k! = Σ_{m=0}^{d-k} (a_{k+m} (k+m)!) (γ^m / m!)
    let mut fact = vec![1u64; d + 1];
    for i in 1..=d {
        fact[i] = mul_mod(fact[i - 1], i as u64, p);
    }
    let scaled: Vec<u64> = (0..=d).map(|j| mul_mod(f.coeffs[j], fact[j], p)).collect();
    let inv: Vec<u64> = (0..=d)
        .map(|i| if i == 0 { 1 } else { inv_mod(i as u64, p).unwrap() })
        .collect();

    let mut out = Vec::new();
    let mut w: Vec<u64> = Vec::with_capacity(d + 1);
    for gamma in 0..p {
        w.clear();
        w.push(1);
        let mut count = 0usize;
        let mut exceeded = false;
        for k in (1..=d).rev() {
            let i = d - k;
            while w.len() <= i {
                let m = w.len();
                let next = mul_mod(mul_mod(w[m - 1], gamma, p), inv[m], p);
                w.push(next);
            }
            let mut acc = 0u64;
            for (m, &wm) in w.iter().enumerate().take(i + 1) {
                acc = add_mod(acc, mul_mod(scaled[k + m], wm, p), p);
            }
            if acc != 0 {
                count += 1;
                if count > cap {
                    exceeded = true;
                    break;
                }
            }
        }
        if !exceeded {
            out.push((gamma, count));
        }
    }
    out
}

/// Values of `f` at every point of the grid `{0, …, p-1}`.
pub fn evaluate_grid(f: &DensePolyMod) -> Vec<u64> {
    (0..f.modulus).map(|x| f.eval(x)).collect()
}

/// `x^e` reduced in `Z_p[x]/(x^p - x)`: exponent `e ≥ 1` becomes `e remo (p-1)`.
pub fn fermat_exponent(e: u64, p: u64) -> u64 {
    if e == 0 {
        0
    } else {
        (e - 1) % (p - 1) + 1
    }
}

#[cfg(test)]
/// `(x - a)^e` over `Z_p` as a dense coefficient vector.
pub(crate) fn binomial_power(a: u64, e: usize, p: u64) -> Vec<u64> {
    // C(e, k) (-a)^{e-k}, built incrementally with exact inverses (e < p)
    let neg_a = sub_mod(0, a % p, p);
    let mut out = vec![0u64; e + 1];
    let mut binom = 1u64;
    for k in 0..=e {
        out[k] = mul_mod(binom, crate::arith::pow_mod(neg_a, (e - k) as u64, p), p);
        if k < e {
            binom = mul_mod(
                mul_mod(binom, (e - k) as u64, p),
                inv_mod((k + 1) as u64, p).unwrap(),
                p,
            );
        }
    }
    out
}
