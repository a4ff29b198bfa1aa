//! Sparsest shift of a black-box polynomial over `Q`.
//!
//! Primes with `deg f^(p) ≥ 2B_T + 1` determine `α rem p` uniquely; enough of
//! them pin down `α` by Chinese remaindering and rational reconstruction. When
//! no such prime can exist the polynomial has low degree and is recovered
//! densely instead.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    crt_all, inv_mod_big, log2_big, next_prime_above, pow2, rational_reconstruct,
    size_of, Rat, Residue,
};
use crate::blackbox::{eval_at, reduce_mod_with, ModularBlackBox};
use crate::densepoly::shifts_within;
use crate::error::{Error, Result};
use crate::modroots::roots_mod_prime;
use crate::options::Options;
use crate::oracle::{OracleConfig, PrimeStream};
use crate::poly::{taylor_shift_rat, tau_rat};

/// Size bounds on the unknown `f = c_0 + Σ_{i≤t} c_i (x - α)^{e_i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// `size(α) ≤ ba`.
    pub ba: u64,
    /// `t ≤ bt`.
    pub bt: u64,
    /// `size(c_i) ≤ bh`.
    pub bh: u64,
    /// `log2 e_t ≤ bn`.
    pub bn: u64,
}

impl Bounds {
    /// Zero bounds are lifted to one.
    pub fn new(ba: u64, bt: u64, bh: u64, bn: u64) -> Self {
        Bounds {
            ba: ba.max(1),
            bt: bt.max(1),
            bh: bh.max(1),
            bn: bn.max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftPath {
    Modular,
    DenseFallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftResult {
    pub alpha: Rat,
    /// `(α rem p, p)` for every good prime used, in delivery order.
    pub residues: Vec<(u64, u64)>,
    pub path: ShiftPath,
    /// Monomial coefficients of `f` when the dense fallback ran.
    pub dense: Option<Vec<Rat>>,
}

/// Oracle parameters for the sparsest-shift loop.
pub fn shift_oracle_config(b: &Bounds) -> OracleConfig {
    OracleConfig::new(2 * b.bh, b.bn * (3 * b.bt - 1), 2 * b.ba + 1)
}

/// A sparsest shift of the polynomial behind `bb`.
pub fn sparsest_shift(bb: &dyn ModularBlackBox, bounds: Bounds, opts: &Options) -> Result<ShiftResult> {
    let mut stream = PrimeStream::generate(shift_oracle_config(&bounds).with_mu(opts.mu))?
        .with_max_regenerations(opts.max_regenerations);
    let target = (2 * bounds.ba + 1) as f64;
    let good_degree = 2 * bounds.bt as usize + 1;
    let mut product = BigInt::one();
    let mut residues = Vec::new();
    while log2_big(&product) < target {
        let p = stream.next_prime()?;
        let fp = match reduce_mod_with(bb, p, opts.threshold) {
            Ok(fp) => fp,
            Err(Error::DenominatorVanished { .. }) => {
                stream.discard(p);
                continue;
            }
            Err(e) => return Err(e),
        };
        if fp.degree().is_some_and(|d| d >= good_degree) {
            let found = shifts_within(&fp, bounds.bt as usize);
            match found.as_slice() {
                [] => {
                    return Err(Error::BoundsViolated(format!(
                        "no shift of f mod {p} has at most {} terms",
                        bounds.bt
                    )))
                }
                [(gamma, _)] => {
                    residues.push((*gamma, p));
                    product *= p;
                }
                // two sparse shifts of a high-degree image: not a good prime
                _ => {}
            }
        } else if residues.is_empty() && stream.guarantee_reached(1) {
            let dense = dense_case_recover(bb, bounds)?;
            let alpha = dense_sparsest_shift(&dense, bounds.ba)?;
            return Ok(ShiftResult {
                alpha,
                residues,
                path: ShiftPath::DenseFallback,
                dense: Some(dense),
            });
        }
    }
    let alpha = reconstruct_shift(&residues, bounds.ba)?;
    Ok(ShiftResult {
        alpha,
        residues,
        path: ShiftPath::Modular,
        dense: None,
    })
}

/// The unique `a/b` with `|a|, b ≤ 2^ba` congruent to each `α_p mod p`.
pub fn reconstruct_shift(residues: &[(u64, u64)], ba: u64) -> Result<Rat> {
    let rs = residues
        .iter()
        .map(|&(a, p)| Residue::new(a, p))
        .collect::<Result<Vec<_>>>()?;
    let combined = crt_all(&rs)?
        .ok_or_else(|| Error::InvalidInput("no residues to reconstruct from".into()))?;
    rational_reconstruct(&combined, &pow2(ba))
}

/// Bit bound on numerators and denominators of the monomial coefficients of a
/// polynomial of degree at most `2B_T` within `bounds`.
fn dense_coefficient_bits(b: &Bounds) -> u64 {
    let log_terms = 64 - b.bt.leading_zeros() as u64;
    (b.bt + 1) * b.bh + 2 * b.bt * b.ba + 2 * b.bt + log_terms
}

/// Exact monomial coefficients of `f`, assuming `deg f ≤ 2B_T`.
///
/// Works modulo one prime `q > 2^{2X+1}` where `2^X` bounds every numerator and
/// denominator, which also satisfies `log2 q > 2B_T·B_A + B_H`.
pub fn dense_case_recover(bb: &dyn ModularBlackBox, bounds: Bounds) -> Result<Vec<Rat>> {
    Ok(dense_case_recover_with_prime(bb, bounds)?.0)
}

/// [`dense_case_recover`], also reporting the prime that was used.
pub fn dense_case_recover_with_prime(
    bb: &dyn ModularBlackBox,
    bounds: Bounds,
) -> Result<(Vec<Rat>, BigUint)> {
    let x_bits = dense_coefficient_bits(&bounds);
    let npoints = 2 * bounds.bt + 1;
    let bound = pow2(x_bits);
    let mut q = next_prime_above(&(BigUint::one() << (2 * x_bits + 1)));
    loop {
        let values = (0..npoints)
            .map(|t| eval_at(bb, &q, t))
            .collect::<Result<Vec<_>>>();
        let values = match values {
            Ok(v) => v,
            Err(Error::DenominatorVanished { .. }) => {
                q = next_prime_above(&q);
                continue;
            }
            Err(e) => return Err(e),
        };
        let qi = BigInt::from(q.clone());
        let coeffs = interpolate_small_grid(&values, &qi);
        let mut out = coeffs
            .iter()
            .map(|c| rational_reconstruct(&Residue::new(c.clone(), qi.clone())?, &bound))
            .collect::<Result<Vec<_>>>()?;
        while out.len() > 1 && out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        return Ok((out, q));
    }
}

/// Monomial coefficients of the polynomial through `(i, values[i])` over `Z_q`.
fn interpolate_small_grid(values: &[BigUint], q: &BigInt) -> Vec<BigInt> {
    let n = values.len();
    let mut dd: Vec<BigInt> = values.iter().map(|v| BigInt::from(v.clone())).collect();
    for level in 1..n {
        let inv = inv_mod_big(&BigInt::from(level), q).expect("q exceeds the grid");
        for i in (level..n).rev() {
            dd[i] = ((&dd[i] - &dd[i - 1]) * &inv).mod_floor(q);
        }
    }
    // Newton form: Σ dd[k] Π_{j<k} (x - j)
    let mut coeffs = vec![BigInt::zero(); n];
    for k in (0..n).rev() {
        // coeffs ← coeffs·(x - k) + dd[k]
        let mut next = vec![BigInt::zero(); n];
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i + 1 < n {
                next[i + 1] += c;
            }
            next[i] -= c * BigInt::from(k);
        }
        next[0] += &dd[k];
        coeffs = next.into_iter().map(|c| c.mod_floor(q)).collect();
    }
    coeffs
}

/// Shift of a dense `f ∈ Q[x]` minimising the nonconstant-term count, among
/// rationals `a/b` with `|a|, b ≤ 2^ba`.
///
/// Any shift that beats the generic count zeroes some coefficient of
/// `f(x + y)`, so the candidates are `0` and the rational roots of those
/// coefficients as polynomials in `y`. Ties go to the smaller size, then the
/// smaller value.
pub fn dense_sparsest_shift(f: &[Rat], ba: u64) -> Result<Rat> {
    let mut f = f.to_vec();
    while f.len() > 1 && f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    let d = f.len().saturating_sub(1);
    let mut candidates = vec![Rat::zero()];
    if d >= 2 {
        for k in 1..d {
            candidates.extend(coefficient_roots(&f, k, ba)?);
        }
    }
    candidates.sort();
    candidates.dedup();
    let best = candidates
        .into_iter()
        .map(|a| (tau_rat(&taylor_shift_rat(&f, &a)), size_of(&a), a))
        .min()
        .expect("zero is always a candidate");
    Ok(best.2)
}

/// Rational roots within the box of `c_k(y) = Σ_{j≥k} C(j,k) a_j y^{j-k}`.
fn coefficient_roots(f: &[Rat], k: usize, ba: u64) -> Result<Vec<Rat>> {
    let d = f.len() - 1;
    let mut binom = BigInt::one();
    let mut ck = Vec::with_capacity(d - k + 1);
    for j in k..=d {
        ck.push(&f[j] * Rat::from_integer(binom.clone()));
        // C(j+1, k) = C(j, k)·(j+1)/(j+1-k)
        binom = binom * BigInt::from(j + 1) / BigInt::from(j + 1 - k);
    }
    while ck.last().is_some_and(|c| c.is_zero()) {
        ck.pop();
    }
    if ck.len() <= 1 {
        return Ok(Vec::new());
    }
    let lcm = ck.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = ck.iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect();

    if 2 * ba + 1 > 62 {
        return Err(Error::InvalidInput(format!(
            "shift bound {ba} too large for the dense fallback"
        )));
    }
    let lead = ints.last().unwrap();
    let mut r = next_prime_above(&(BigUint::one() << (2 * ba + 1)));
    while (lead % BigInt::from(r.clone())).is_zero() {
        r = next_prime_above(&r);
    }
    let rw = r.to_u64().unwrap();
    let rb = BigInt::from(rw);
    let reduced: Vec<u64> = ints
        .iter()
        .map(|c| c.mod_floor(&rb).to_u64().unwrap())
        .collect();
    let bound = pow2(ba);
    let mut out = Vec::new();
    for root in roots_mod_prime(&reduced, rw, k as u64) {
        let Ok(cand) = rational_reconstruct(&Residue::new(root, rw)?, &bound) else {
            continue;
        };
        if cand.numer().abs() > bound || cand.denom() > &bound {
            continue;
        }
        let value = ck
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * &cand + c);
        if value.is_zero() {
            out.push(cand);
        }
    }
    Ok(out)
}
