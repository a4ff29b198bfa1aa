use crate::densepoly::DEFAULT_INTERPOLATION_THRESHOLD;
use crate::oracle::DEFAULT_MAX_REGENERATIONS;

/// Environment variable that seeds the oracle's `μ`.
pub const MU_ENV: &str = "LACUNA_MU";

/// Tuning knobs shared by both algorithms. None of them change results, only cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    /// Initial estimate of the constant in the prime-gap bound; `≥ 1`.
    pub mu: f64,
    /// Primes above this use the transform-based grid interpolation.
    pub threshold: usize,
    pub max_regenerations: usize,
    /// Seed for the randomized root splitting.
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            mu: 1.0,
            threshold: DEFAULT_INTERPOLATION_THRESHOLD,
            max_regenerations: DEFAULT_MAX_REGENERATIONS,
            seed: 0,
        }
    }
}

impl Options {
    /// Defaults, with `μ` taken from `LACUNA_MU` when it parses.
    pub fn from_env() -> Self {
        let mut o = Options::default();
        if let Some(mu) = std::env::var(MU_ENV).ok().and_then(|s| s.parse::<f64>().ok()) {
            if mu.is_finite() && mu >= 1.0 {
                o.mu = mu;
            }
        }
        o
    }
}
