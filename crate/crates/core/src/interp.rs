//! Sparse interpolation over `Q` from a modular black box.
//!
//! Each good prime `p` exposes the exponents of `f` only modulo `p - 1`. The
//! images of `g(z) = Π (z - e_i)` modulo the various `p - 1` are combined into
//! `g ∈ Z[z]`, whose integer roots are the exponents. Coefficients then follow
//! by matching exponent residues and rational reconstruction.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{
    crt_pair, log2_big, next_prime_above, pow2, rational_reconstruct, remo, Rat, Residue,
};
use crate::blackbox::{reduce_mod_with, shifted_blackbox, BlackBoxRef, ModularBlackBox};
use crate::densepoly::DensePolyMod;
use crate::error::{Error, Result};
use crate::modroots::roots_mod_prime;
use crate::options::Options;
use crate::oracle::{OracleConfig, PrimeStream};
use crate::poly::{lacunary_from_dense, ShiftedLacunary};
use crate::shift::{sparsest_shift, Bounds, ShiftPath, ShiftResult};

/// `f^(p)` read as `c_0 + Σ c_j x^{e_j}` with `1 ≤ e_j ≤ p - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeImage {
    pub p: u64,
    pub reduced: DensePolyMod,
    /// Exponents, ascending.
    pub exponents: Vec<u64>,
    /// Coefficient residues aligned with `exponents`.
    pub coeffs: Vec<u64>,
    pub constant: u64,
}

impl PrimeImage {
    pub fn new(reduced: DensePolyMod) -> Self {
        let (exponents, coeffs) = reduced
            .nonconstant_terms()
            .map(|(k, c)| (k as u64, c))
            .unzip();
        PrimeImage {
            p: reduced.modulus(),
            constant: reduced.coeff(0),
            reduced,
            exponents,
            coeffs,
        }
    }

    pub fn tau(&self) -> usize {
        self.exponents.len()
    }
}

/// Monic `g ∈ Z[z]`, coefficients ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymPoly {
    pub coeffs: Vec<BigInt>,
}

impl SymPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * z + c)
    }
}

/// Oracle parameters for the interpolation loop.
pub fn interp_oracle_config(b: &Bounds) -> OracleConfig {
    OracleConfig::new(
        2 * b.bh * b.bt,
        b.bn * b.bt * (b.bt - 1) / 2,
        (2 * b.bh + 1).max(b.bn),
    )
}

/// Bits of `Q = lcm(p_i - 1)` needed for a signed lift of `g`.
pub fn q_target(b: &Bounds) -> u64 {
    b.bt * (b.bn + 1) + 1
}

/// `Π (z - e) mod m`, monic.
pub fn build_g_image(exponents: &[u64], m: u64) -> DensePolyMod {
    let mut g = vec![1 % m];
    for &e in exponents {
        let root = e % m;
        let mut next = vec![0u64; g.len() + 1];
        for (i, &c) in g.iter().enumerate() {
            next[i + 1] = (next[i + 1] + c) % m;
            next[i] = ((next[i] as u128 + m as u128 * m as u128 - c as u128 * root as u128)
                % m as u128) as u64;
        }
        g = next;
    }
    DensePolyMod::new(m, g)
}

fn g_residues(g: &DensePolyMod) -> Result<Vec<Residue>> {
    g.coeffs()
        .iter()
        .map(|&c| Residue::new(c, g.modulus()))
        .collect()
}

fn combine(acc: &[Residue], next: &[Residue]) -> Result<Vec<Residue>> {
    if acc.len() != next.len() {
        return Err(Error::Inconsistent(format!(
            "g images of degree {} and {}",
            acc.len() as i64 - 1,
            next.len() as i64 - 1
        )));
    }
    acc.iter().zip(next).map(|(a, b)| crt_pair(a, b)).collect()
}

fn lift(residues: &[Residue]) -> SymPoly {
    SymPoly {
        coeffs: residues.iter().map(Residue::signed_lift).collect(),
    }
}

/// `g` over `Z` from its images modulo several `p - 1`, by generalized Chinese remaindering.
pub fn recover_g(images: &[DensePolyMod]) -> Result<SymPoly> {
    let mut iter = images.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidInput("no g images".into()))?;
    let mut acc = g_residues(first)?;
    for img in iter {
        acc = combine(&acc, &g_residues(img)?)?;
    }
    Ok(lift(&acc))
}

/// Images sharing the largest `τ` seen, with their running CRT state.
#[derive(Debug)]
pub struct Collected {
    pub images: Vec<PrimeImage>,
    pub g: SymPoly,
    /// `lcm(p_i - 1)`.
    pub lcm: BigInt,
    /// `Π p_i`.
    pub product: BigInt,
    /// Primes handed out by the oracle, including rejected ones.
    pub primes_drawn: u64,
}

/// Draws primes until the kept images determine `g` and the coefficients.
pub fn collect_images(bb: &dyn ModularBlackBox, bounds: Bounds, opts: &Options) -> Result<Collected> {
    let mut stream = PrimeStream::generate(interp_oracle_config(&bounds).with_mu(opts.mu))?
        .with_max_regenerations(opts.max_regenerations);
    let lcm_bits = q_target(&bounds) as f64;
    let prod_bits = (2 * bounds.bh + 1) as f64;
    let mut images: Vec<PrimeImage> = Vec::new();
    let mut g_acc: Vec<Residue> = Vec::new();
    let mut lcm = BigInt::one();
    let mut product = BigInt::one();
    let mut drawn = 0u64;
    while images.is_empty()
        || log2_big(&lcm) < lcm_bits
        || log2_big(&product) < prod_bits
        || !stream.guarantee_reached(1)
    {
        let p = stream.next_prime()?;
        drawn += 1;
        let image = match reduce_mod_with(bb, p, opts.threshold) {
            Ok(fp) => PrimeImage::new(fp),
            Err(Error::DenominatorVanished { .. }) => {
                stream.discard(p);
                continue;
            }
            Err(e) => return Err(e),
        };
        let tau = image.tau();
        let best = images.first().map_or(0, PrimeImage::tau);
        if tau > bounds.bt as usize {
            return Err(Error::BoundsViolated(format!(
                "f mod {p} has {tau} nonconstant terms, more than {}",
                bounds.bt
            )));
        }
        if tau < best {
            continue;
        }
        if tau > best {
            images.clear();
            lcm = BigInt::one();
            product = BigInt::one();
        }
        let g_img = g_residues(&build_g_image(&image.exponents, p - 1))?;
        let merged = if images.is_empty() {
            Ok(g_img)
        } else {
            combine(&g_acc, &g_img)
        };
        match merged {
            Ok(acc) => g_acc = acc,
            // an image that disagrees with the kept ones is not good
            Err(Error::Inconsistent(_)) => continue,
            Err(e) => return Err(e),
        }
        lcm = lcm.lcm(&BigInt::from(p - 1));
        product *= p;
        images.push(image);
    }
    Ok(Collected {
        images,
        g: lift(&g_acc),
        lcm,
        product,
        primes_drawn: drawn,
    })
}

/// The distinct integer roots of `g` in `[1, bound]`, ascending; all `deg g` of them or an error.
pub fn integer_roots(g: &SymPoly, bound_bits: u64, seed: u64) -> Result<Vec<u64>> {
    let d = g.degree();
    let bound = pow2(bound_bits);
    let in_range = |e: &BigInt| e.is_positive() && *e <= bound;
    let candidates: Vec<BigInt> = match d {
        0 => return Ok(Vec::new()),
        1 => vec![-&g.coeffs[0]],
        _ => {
            if bound_bits + 2 > 62 {
                return Err(Error::InvalidInput(format!(
                    "exponent bound 2^{bound_bits} too large for root finding"
                )));
            }
            let r = next_prime_above(&(BigUint::one() << (bound_bits + 2)))
                .to_u64()
                .unwrap();
            let rb = BigInt::from(r);
            let reduced: Vec<u64> = g
                .coeffs
                .iter()
                .map(|c| c.mod_floor(&rb).to_u64().unwrap())
                .collect();
            roots_mod_prime(&reduced, r, seed)
                .into_iter()
                .map(BigInt::from)
                .collect()
        }
    };
    let mut roots: Vec<u64> = candidates
        .iter()
        .filter(|e| in_range(e) && g.eval(e).is_zero())
        .map(|e| e.to_u64().unwrap())
        .collect();
    roots.sort_unstable();
    roots.dedup();
    if roots.len() != d {
        return Err(Error::NotSplitting(format!(
            "found {} of {d} roots in [1, 2^{bound_bits}]",
            roots.len()
        )));
    }
    Ok(roots)
}

/// Coefficients of `f = c_0 + Σ c_e x^e` from its exponents and good images.
pub fn match_and_recover(roots: &[u64], images: &[PrimeImage], bh: u64) -> Result<ShiftedLacunary> {
    let bound = pow2(bh);
    let mut per_term: Vec<Vec<Residue>> = vec![Vec::with_capacity(images.len()); roots.len()];
    let mut constants = Vec::with_capacity(images.len());
    for img in images {
        let m = img.p - 1;
        let mut used = vec![false; img.exponents.len()];
        for (i, &e) in roots.iter().enumerate() {
            let r = remo(e as i128, m)?;
            let j = img
                .exponents
                .binary_search(&r)
                .map_err(|_| Error::NoMatch {
                    exponent: e,
                    modulus: m,
                })?;
            if std::mem::replace(&mut used[j], true) {
                return Err(Error::AmbiguousMatch {
                    exponent: e,
                    modulus: m,
                });
            }
            per_term[i].push(Residue::new(img.coeffs[j], img.p)?);
        }
        constants.push(Residue::new(img.constant, img.p)?);
    }
    let reconstruct = |rs: &[Residue]| -> Result<Rat> {
        let mut acc = rs[0].clone();
        for r in &rs[1..] {
            acc = crt_pair(&acc, r)?;
        }
        rational_reconstruct(&acc, &bound)
    };
    if images.is_empty() {
        return Err(Error::InvalidInput("no images to recover from".into()));
    }
    let coeffs = per_term
        .par_iter()
        .map(|rs| reconstruct(rs))
        .collect::<Result<Vec<_>>>()?;
    let constant = reconstruct(&constants)?;
    let terms = coeffs
        .into_iter()
        .zip(roots.iter().copied())
        .filter(|(c, _)| !c.is_zero())
        .collect::<Vec<_>>();
    if terms.len() != roots.len() {
        return Err(Error::BoundsViolated(
            "a recovered coefficient vanished".into(),
        ));
    }
    ShiftedLacunary::new(Rat::zero(), constant, terms)
}

/// The sparse `f` behind `bb`, with shift zero.
pub fn sparse_interpolate(bb: &dyn ModularBlackBox, bounds: Bounds, opts: &Options) -> Result<ShiftedLacunary> {
    let collected = collect_images(bb, bounds, opts)?;
    let coefficient_bound = (BigInt::one() + pow2(bounds.bn)).pow(bounds.bt as u32);
    if collected.g.coeffs.iter().any(|c| c.abs() > coefficient_bound) {
        return Err(Error::BoundsViolated(
            "exponent polynomial has a coefficient beyond the bound".into(),
        ));
    }
    let roots = integer_roots(&collected.g, bounds.bn, opts.seed)?;
    match_and_recover(&roots, &collected.images, bounds.bh)
}

/// Sparse interpolation of `f(x + α)`, reported in the basis `(x - α)^e`.
pub fn interpolate_with_shift(
    bb: BlackBoxRef,
    alpha: &Rat,
    bounds: Bounds,
    opts: &Options,
) -> Result<ShiftedLacunary> {
    let shifted = shifted_blackbox(bb, alpha.clone());
    let g = sparse_interpolate(shifted.as_ref(), bounds, opts)?;
    ShiftedLacunary::new(alpha.clone(), g.constant_term().clone(), g.terms().to_vec())
}

/// Sparsest shift followed by sparse interpolation in the shifted basis.
pub fn full_interpolate(bb: BlackBoxRef, bounds: Bounds, opts: &Options) -> Result<(ShiftedLacunary, ShiftResult)> {
    let shift = sparsest_shift(bb.as_ref(), bounds, opts)?;
    let f = match (&shift.path, &shift.dense) {
        (ShiftPath::DenseFallback, Some(dense)) => lacunary_from_dense(dense, &shift.alpha),
        _ => interpolate_with_shift(bb, &shift.alpha, bounds, opts)?,
    };
    Ok((f, shift))
}
