use thiserror::Error;

/// Errors raised anywhere in the interpolation pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The modulus divides a denominator needed by the black box.
    #[error("denominator vanished modulo {modulus}")]
    DenominatorVanished { modulus: String },

    /// Two residues cannot be combined: gcd of the moduli does not divide their difference.
    #[error("inconsistent residues: {0}")]
    Inconsistent(String),

    /// No fraction within the requested bound maps to the residue.
    #[error("no rational reconstruction of {value} mod {modulus} within bound {bound}")]
    NoReconstruction {
        value: String,
        modulus: String,
        bound: String,
    },

    /// The exponent polynomial did not split into distinct integer roots.
    #[error("exponent polynomial does not split over the integers: {0}")]
    NotSplitting(String),

    #[error("no exponent matching {exponent} modulo {modulus}")]
    NoMatch { exponent: u64, modulus: u64 },

    #[error("several exponents match {exponent} modulo {modulus}")]
    AmbiguousMatch { exponent: u64, modulus: u64 },

    /// The black box failed on too many primes.
    #[error("black box failure: {0}")]
    BlackBoxFailure(String),

    /// The observed data contradicts the supplied bounds.
    #[error("bounds violated: {0}")]
    BoundsViolated(String),

    /// The prime generator cannot meet its target with representable parameters.
    #[error("prime oracle infeasible: {0}")]
    OracleInfeasible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn vanished(modulus: impl ToString) -> Self {
        Error::DenominatorVanished {
            modulus: modulus.to_string(),
        }
    }

    /// True for the failures that indicate bounds too small for the unknown polynomial.
    pub fn is_reconstruction_failure(&self) -> bool {
        matches!(
            self,
            Error::Inconsistent(_)
                | Error::NoReconstruction { .. }
                | Error::NotSplitting(_)
                | Error::NoMatch { .. }
                | Error::AmbiguousMatch { .. }
                | Error::BoundsViolated(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
