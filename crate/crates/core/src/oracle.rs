//! Deterministic generation of primes `p` whose `p - 1` carries a large prime factor.
//!
//! Each reservoir prime is `S(q)`, the least prime `kq + 1`, for a prime `q` in
//! `[n, 2n)`. Among any `β1 + β2 + k` delivered primes at least `k` avoid both a
//! fixed `C1` with `log2 C1 ≤ β1` and, through `p - 1`, a fixed `C2` with
//! `log2 C2 ≤ β2`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime_u64, primes_in_range};
use crate::error::{Error, Result};

/// Exponent in the cap `p < q^CAP_EXP`.
pub const CAP_EXP: f64 = 1.89;

/// Regenerations a stream allows before giving up.
pub const DEFAULT_MAX_REGENERATIONS: usize = 10;

/// Largest `n` the oracle will use; keeps every `kq + 1` inside a machine word.
const MAX_N: u64 = 1 << 30;

/// `Υ(x) = 3x / (5 ln x) - μx / ln² x`.
pub fn upsilon(x: f64, mu: f64) -> f64 {
    let l = x.ln();
    0.6 * x / l - mu * x / (l * l)
}

/// Least integer `n > 21`, `n > μ` with `Υ(n) > target`, or `None` if it exceeds the word-safe range.
pub fn choose_n(target: u64, mu: f64) -> Option<u64> {
    let target = target as f64;
    // Υ > 0 forces ln x > 5μ/3, and Υ is increasing on that whole region.
    let floor_ln = 5.0 * mu / 3.0;
    if floor_ln > (MAX_N as f64).ln() {
        return None;
    }
    let lo = 22u64.max(mu.floor() as u64 + 1).max(floor_ln.exp().floor() as u64);
    let above = |x: u64| upsilon(x as f64, mu) > target;
    if above(lo) {
        return Some(lo);
    }
    let mut hi = lo;
    while !above(hi) {
        hi = hi.checked_mul(2).filter(|&h| h <= MAX_N)?;
    }
    let mut lo = hi / 2;
    // invariant: !above(lo) && above(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Least prime `p = kq + 1` with `k ≥ 1` and `p < q^cap_exp`, as `(p, k)`.
pub fn s_of_q(q: u64, cap_exp: f64) -> Option<(u64, u64)> {
    let cap = (q as f64).powf(cap_exp);
    let mut k = 1u64;
    loop {
        let p = k.checked_mul(q)?.checked_add(1)?;
        if p as f64 >= cap {
            return None;
        }
        if is_prime_u64(p) {
            return Some((p, k));
        }
        k += 1;
    }
}

/// `2 q ln² q`, the empirical ceiling on `S(q)`.
pub fn conjecture_bound(q: u64) -> f64 {
    let l = (q as f64).ln();
    2.0 * q as f64 * l * l
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub beta1: u64,
    pub beta2: u64,
    pub ell: u64,
    pub mu: f64,
}

impl OracleConfig {
    pub fn new(beta1: u64, beta2: u64, ell: u64) -> Self {
        OracleConfig {
            beta1,
            beta2,
            ell: ell.max(1),
            mu: 1.0,
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu.max(1.0);
        self
    }

    pub fn total(&self) -> u64 {
        self.beta1 + self.beta2 + self.ell
    }
}

/// A reservoir entry: `p = k·q + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OraclePrime {
    pub p: u64,
    pub q: u64,
    pub k: u64,
}

/// Ascending supply of oracle primes with useful-prime accounting.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    config: OracleConfig,
    n: u64,
    mu: f64,
    reservoir: Vec<OraclePrime>,
    cursor: usize,
    handed_out: HashSet<u64>,
    delivered: u64,
    regenerations: usize,
    max_regenerations: usize,
    memo: HashMap<u64, Option<(u64, u64)>>,
}

impl PrimeStream {
    /// Fills a reservoir of `β1 + β2 + ℓ` primes, doubling `μ` on shortfall.
    pub fn generate(config: OracleConfig) -> Result<Self> {
        let mut stream = PrimeStream {
            config,
            n: 0,
            mu: config.mu,
            reservoir: Vec::new(),
            cursor: 0,
            handed_out: HashSet::new(),
            delivered: 0,
            regenerations: 0,
            max_regenerations: DEFAULT_MAX_REGENERATIONS,
            memo: HashMap::new(),
        };
        stream.fill(config.total())?;
        Ok(stream)
    }

    pub fn with_max_regenerations(mut self, limit: usize) -> Self {
        self.max_regenerations = limit;
        self
    }

    fn fill(&mut self, total: u64) -> Result<()> {
        let mut mu = self.mu;
        loop {
            let n = choose_n(total, mu).ok_or_else(|| {
                Error::OracleInfeasible(format!(
                    "no admissible n for {total} primes at mu = {mu}"
                ))
            })?;
            if let Some(res) = self.try_interval(n, total) {
                self.n = n;
                self.mu = mu;
                let mut res = res;
                res.sort_by_key(|e| e.p);
                self.reservoir = res;
                self.cursor = 0;
                return Ok(());
            }
            mu *= 2.0;
        }
    }

    fn try_interval(&mut self, n: u64, total: u64) -> Option<Vec<OraclePrime>> {
        let qs = primes_in_range(n, 2 * n);
        let mut out = Vec::with_capacity(total as usize);
        let mut seen = HashSet::new();
        let mut idx = 0;
        while (out.len() as u64) < total && idx < qs.len() {
            let want = (total - out.len() as u64) as usize;
            let chunk = &qs[idx..(idx + want).min(qs.len())];
            idx += chunk.len();
            let fresh: Vec<u64> = chunk
                .iter()
                .copied()
                .filter(|q| !self.memo.contains_key(q))
                .collect();
            let computed: Vec<(u64, Option<(u64, u64)>)> = fresh
                .par_iter()
                .map(|&q| (q, s_of_q(q, CAP_EXP)))
                .collect();
            self.memo.extend(computed);
            for &q in chunk {
                if let Some((p, k)) = self.memo[&q] {
                    if seen.insert(p) {
                        out.push(OraclePrime { p, q, k });
                    }
                }
            }
        }
        ((out.len() as u64) == total).then_some(out)
    }

    /// Next unused prime in ascending order, regenerating with `ℓ` doubled when exhausted.
    pub fn next_prime(&mut self) -> Result<u64> {
        loop {
            while self.cursor < self.reservoir.len() {
                let p = self.reservoir[self.cursor].p;
                self.cursor += 1;
                if self.handed_out.insert(p) {
                    self.delivered += 1;
                    return Ok(p);
                }
            }
            if self.regenerations >= self.max_regenerations {
                return Err(Error::BlackBoxFailure(format!(
                    "prime reservoir exhausted after {} regenerations",
                    self.regenerations
                )));
            }
            self.regenerations += 1;
            self.config.ell *= 2;
            self.fill(self.config.total())?;
        }
    }

    /// Withdraws a delivered prime from the guarantee count; used when the black box failed on it.
    pub fn discard(&mut self, p: u64) {
        if self.handed_out.contains(&p) && self.delivered > 0 {
            self.delivered -= 1;
        }
    }

    /// True once at least `k` useful primes must be among those delivered.
    pub fn guarantee_reached(&self, k: u64) -> bool {
        self.delivered >= self.config.beta1 + self.config.beta2 + k
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn regenerations(&self) -> usize {
        self.regenerations
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    /// Current reservoir, ascending by `p`.
    pub fn reservoir(&self) -> &[OraclePrime] {
        &self.reservoir
    }
}
