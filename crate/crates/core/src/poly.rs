//! Exact polynomials over `Q`: the shifted-lacunary form and its JSON encoding.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rat, parse_rat, size_of, Rat};
use crate::error::{Error, Result};

/// `c_0 + Σ c_i (x - α)^{e_i}` with nonzero `c_i` and distinct exponents `e_i ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftedLacunary {
    shift: Rat,
    constant: Rat,
    terms: Vec<(Rat, u64)>,
}

impl ShiftedLacunary {
    /// Validates and normalizes: terms are sorted by ascending exponent.
    pub fn new(shift: Rat, constant: Rat, mut terms: Vec<(Rat, u64)>) -> Result<Self> {
        terms.sort_by_key(|&(_, e)| e);
        for w in terms.windows(2) {
            if w[0].1 == w[1].1 {
                return Err(Error::InvalidInput(format!("repeated exponent {}", w[0].1)));
            }
        }
        if let Some((c, e)) = terms.iter().find(|(c, e)| c.is_zero() || *e == 0) {
            return Err(Error::InvalidInput(format!(
                "term {}·(x-α)^{} must have a nonzero coefficient and positive exponent",
                format_rat(c),
                e
            )));
        }
        Ok(ShiftedLacunary {
            shift,
            constant,
            terms,
        })
    }

    /// A constant polynomial.
    pub fn constant(c: Rat) -> Self {
        ShiftedLacunary {
            shift: Rat::zero(),
            constant: c,
            terms: Vec::new(),
        }
    }

    pub fn shift(&self) -> &Rat {
        &self.shift
    }

    pub fn constant_term(&self) -> &Rat {
        &self.constant
    }

    /// `(c_i, e_i)` in ascending exponent order.
    pub fn terms(&self) -> &[(Rat, u64)] {
        &self.terms
    }

    /// Number of non-constant terms `t`.
    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    /// `e_t`, the degree (0 for constants).
    pub fn degree(&self) -> u64 {
        self.terms.last().map_or(0, |&(_, e)| e)
    }

    /// `size(α) + Σ size(c_i) + Σ size(e_i)`.
    pub fn size(&self) -> u64 {
        size_of(&self.shift)
            + size_of(&self.constant)
            + self
                .terms
                .iter()
                .map(|(c, e)| size_of(c) + size_of(&Rat::from_integer(BigInt::from(*e))))
                .sum::<u64>()
    }

    /// Largest coefficient size, `max_{0≤i≤t} size(c_i)`.
    pub fn height(&self) -> u64 {
        self.terms
            .iter()
            .map(|(c, _)| size_of(c))
            .chain(std::iter::once(size_of(&self.constant)))
            .max()
            .unwrap()
    }

    /// Same polynomial re-expressed with shift `α` replaced by zero offset, i.e. `f(x + α)`.
    pub fn unshifted(&self) -> ShiftedLacunary {
        ShiftedLacunary {
            shift: Rat::zero(),
            constant: self.constant.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Exact value at a rational point.
    pub fn eval(&self, x: &Rat) -> Rat {
        let y = x - &self.shift;
        self.terms
            .iter()
            .fold(self.constant.clone(), |acc, (c, e)| acc + c * Pow::pow(&y, *e))
    }

    /// Expansion in the monomial basis, ascending degree. Only sensible for small degree.
    pub fn to_dense(&self) -> Vec<Rat> {
        let n = self.degree() as usize;
        let mut out = vec![Rat::zero(); n + 1];
        out[0] = self.constant.clone();
        let neg_alpha = -self.shift.clone();
        for (c, e) in &self.terms {
            let e = *e as usize;
            // c · Σ_k C(e,k) x^k (-α)^{e-k}
            let mut binom = BigInt::one();
            for (k, slot) in out.iter_mut().enumerate().take(e + 1) {
                let term = c * Rat::from_integer(binom.clone()) * Pow::pow(&neg_alpha, e - k);
                *slot += term;
                binom = binom * BigInt::from(e - k) / BigInt::from(k + 1);
            }
        }
        out
    }

    /// Canonical compact JSON: keys sorted, exponents ascending.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("serializable")
    }

    pub(crate) fn to_json_value(&self) -> PolyJson {
        PolyJson {
            constant: format_rat(&self.constant),
            shift: format_rat(&self.shift),
            terms: self
                .terms
                .iter()
                .map(|(c, e)| TermJson {
                    coeff: format_rat(c),
                    exp: *e,
                })
                .collect(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        match PolySource::from_json(s)? {
            PolySource::Lacunary(f) => Ok(f),
            PolySource::Dense(_) => Err(Error::InvalidInput(
                "expected a shifted-lacunary polynomial, found a dense one".into(),
            )),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct PolyJson {
    #[serde(default = "zero_string")]
    constant: String,
    #[serde(default = "zero_string")]
    shift: String,
    #[serde(default)]
    terms: Vec<TermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    coeff: String,
    exp: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DenseJson {
    dense: Vec<String>,
}

fn zero_string() -> String {
    "0".into()
}

/// A polynomial as it arrives from a user: shifted-lacunary or dense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolySource {
    Lacunary(ShiftedLacunary),
    /// Monomial coefficients in ascending degree.
    Dense(Vec<Rat>),
}

impl PolySource {
    pub fn from_json(s: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if value.get("dense").is_some() {
            let d: DenseJson =
                serde_json::from_value(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let coeffs = d.dense.iter().map(|c| parse_rat(c)).collect::<Result<_>>()?;
            return Ok(PolySource::Dense(coeffs));
        }
        let p: PolyJson =
            serde_json::from_value(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let terms = p
            .terms
            .iter()
            .map(|t| Ok((parse_rat(&t.coeff)?, t.exp)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolySource::Lacunary(ShiftedLacunary::new(
            parse_rat(&p.shift)?,
            parse_rat(&p.constant)?,
            terms,
        )?))
    }
}

/// `f(x + α)` for a dense rational polynomial, by exact Taylor shift.
pub fn taylor_shift_rat(coeffs: &[Rat], alpha: &Rat) -> Vec<Rat> {
    let mut c = coeffs.to_vec();
    if c.len() > 1 && !alpha.is_zero() {
        let d = c.len() - 1;
        for i in 0..d {
            for j in (i..d).rev() {
                let add = alpha * &c[j + 1];
                c[j] += add;
            }
        }
    }
    c
}

/// Number of nonzero coefficients of degree at least one.
pub fn tau_rat(coeffs: &[Rat]) -> usize {
    coeffs.iter().skip(1).filter(|c| !c.is_zero()).count()
}

/// Reads the shifted-lacunary form off a dense polynomial and a chosen shift.
pub fn lacunary_from_dense(coeffs: &[Rat], alpha: &Rat) -> ShiftedLacunary {
    let shifted = taylor_shift_rat(coeffs, alpha);
    let constant = shifted.first().cloned().unwrap_or_else(Rat::zero);
    let terms = shifted
        .into_iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (c, k as u64))
        .collect();
    ShiftedLacunary::new(alpha.clone(), constant, terms).expect("distinct positive exponents")
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str =
        r#"{"shift":"3","constant":"0","terms":[{"coeff":"1","exp":15},{"coeff":"-2","exp":5}]}"#;

    #[test]
    fn json_round_trip_is_canonical() {
        let f = ShiftedLacunary::from_json(GOLDEN).unwrap();
        assert_eq!(f.sparsity(), 2);
        assert_eq!(f.degree(), 15);
        assert_eq!(
            f.to_json(),
            r#"{"constant":"0","shift":"3","terms":[{"coeff":"-2","exp":5},{"coeff":"1","exp":15}]}"#
        );
        assert_eq!(ShiftedLacunary::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn rejects_malformed() {
        assert!(ShiftedLacunary::from_json(r#"{"terms":[{"coeff":"0","exp":3}]}"#).is_err());
        assert!(ShiftedLacunary::from_json(r#"{"terms":[{"coeff":"1","exp":0}]}"#).is_err());
        assert!(ShiftedLacunary::from_json(
            r#"{"terms":[{"coeff":"1","exp":2},{"coeff":"1","exp":2}]}"#
        )
        .is_err());
        assert!(ShiftedLacunary::from_json(r#"{"shift":"1/0"}"#).is_err());
        assert!(ShiftedLacunary::from_json(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn dense_source() {
        let src = PolySource::from_json(r#"{"dense":["-1/2","1","3"]}"#).unwrap();
        let PolySource::Dense(c) = src else { panic!() };
        assert_eq!(c, vec![parse_rat("-1/2").unwrap(), Rat::one(), parse_rat("3").unwrap()]);
    }

    #[test]
    fn expansion_matches_golden_coefficients() {
        let f = ShiftedLacunary::from_json(GOLDEN).unwrap();
        let dense = f.to_dense();
        let expect: [i64; 16] = [
            -14348421, 71743725, -167403375, 241805475, -241805625, 177324145, -98513415,
            42220035, -14073345, 3648645, -729729, 110565, -12285, 945, -45, 1,
        ];
        let expect: Vec<Rat> = expect.iter().map(|&c| Rat::from_integer(c.into())).collect();
        assert_eq!(dense, expect);
        let back = lacunary_from_dense(&dense, &parse_rat("3").unwrap());
        assert_eq!(back, f);
        assert_eq!(tau_rat(&dense), 15);
    }

    #[test]
    fn exact_eval_and_size() {
        let f = ShiftedLacunary::from_json(GOLDEN).unwrap();
        assert_eq!(f.eval(&parse_rat("4").unwrap()), parse_rat("-1").unwrap());
        assert_eq!(f.eval(&parse_rat("3").unwrap()), Rat::zero());
        // size(3) + size(0) + size(1) + size(15) + size(-2) + size(5)
        assert_eq!(f.size(), 4 + 2 + 3 + 6 + 4 + 5);
        assert_eq!(f.height(), 4);
    }
}
