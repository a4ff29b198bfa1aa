//! Modular black boxes: `(p, θ) ↦ f(θ) mod p` for an otherwise unknown `f ∈ Q[x]`.
//!
//! A box may fail only when `p` divides a denominator it needs. Failures are
//! per prime: one failing point makes the whole reduction modulo `p` fail.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{add_mod, mul_mod, pow_mod, rat_mod, rat_mod_big, sub_mod, Rat};
use crate::densepoly::{
    fermat_exponent, interpolate_range_with, DensePolyMod, DEFAULT_INTERPOLATION_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::poly::ShiftedLacunary;

/// Evaluation of an unknown polynomial modulo caller-chosen primes.
///
/// Implementations must be pure: the same `(p, θ)` always gives the same answer.
pub trait ModularBlackBox: Send + Sync {
    /// `f(θ) mod p` for a prime `p < 2^63` and `θ < p`.
    fn eval(&self, p: u64, theta: u64) -> Result<u64>;

    /// `f(θ) mod p` for a prime of any size.
    fn eval_big(&self, p: &BigUint, theta: &BigUint) -> Result<BigUint>;

    /// Batch evaluation; boxes override this to reuse per-prime setup.
    fn eval_many(&self, p: u64, points: &[u64]) -> Result<Vec<u64>> {
        points.iter().map(|&t| self.eval(p, t)).collect()
    }

    /// Upper bound on field operations per call, `κ_f`.
    fn cost_hint(&self) -> usize {
        1
    }
}

pub type BlackBoxRef = Arc<dyn ModularBlackBox>;

/// Arithmetic in a prime field, either word-sized or arbitrary precision.
trait Field {
    type E: Clone;
    fn rat(&self, q: &Rat) -> Result<Self::E>;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// `a^e`, free to reduce `e ≥ 1` modulo `p - 1` as the modulus is prime.
    fn pow(&self, a: &Self::E, e: u64) -> Self::E;
}

struct Word(u64);

impl Field for Word {
    type E = u64;
    fn rat(&self, q: &Rat) -> Result<u64> {
        rat_mod(q, self.0).ok_or_else(|| Error::vanished(self.0))
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.0)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        sub_mod(*a, *b, self.0)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.0)
    }
    fn pow(&self, a: &u64, e: u64) -> u64 {
        pow_mod(*a, fermat_exponent(e, self.0), self.0)
    }
}

struct Big(BigUint);

impl Field for Big {
    type E = BigUint;
    fn rat(&self, q: &Rat) -> Result<BigUint> {
        rat_mod_big(q, &self.0).ok_or_else(|| Error::vanished(&self.0))
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.0
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + &self.0 - b) % &self.0
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.0
    }
    fn pow(&self, a: &BigUint, e: u64) -> BigUint {
        a.modpow(&BigUint::from(e), &self.0)
    }
}

fn check_word(p: u64, theta: u64) -> Result<()> {
    if p < 2 || p >= 1 << 63 || theta >= p {
        return Err(Error::InvalidInput(format!(
            "evaluation point {theta} outside Z_{p}"
        )));
    }
    Ok(())
}

/// Black box backed by an explicit shifted-lacunary polynomial.
#[derive(Debug, Clone)]
pub struct LacunaryBox {
    poly: ShiftedLacunary,
}

impl LacunaryBox {
    pub fn new(poly: ShiftedLacunary) -> Self {
        LacunaryBox { poly }
    }

    fn eval_in<F: Field>(&self, field: &F, points: &[F::E]) -> Result<Vec<F::E>> {
        let alpha = field.rat(self.poly.shift())?;
        let c0 = field.rat(self.poly.constant_term())?;
        let terms = self
            .poly
            .terms()
            .iter()
            .map(|(c, e)| Ok((field.rat(c)?, *e)))
            .collect::<Result<Vec<_>>>()?;
        Ok(points
            .iter()
            .map(|x| {
                let y = field.sub(x, &alpha);
                terms.iter().fold(c0.clone(), |acc, (c, e)| {
                    field.add(&acc, &field.mul(c, &field.pow(&y, *e)))
                })
            })
            .collect())
    }
}

/// Black box that evaluates the given polynomial; the classic test fixture.
pub fn make_blackbox(f: ShiftedLacunary) -> BlackBoxRef {
    Arc::new(LacunaryBox::new(f))
}

impl ModularBlackBox for LacunaryBox {
    fn eval(&self, p: u64, theta: u64) -> Result<u64> {
        check_word(p, theta)?;
        Ok(self.eval_in(&Word(p), &[theta])?[0])
    }
    fn eval_big(&self, p: &BigUint, theta: &BigUint) -> Result<BigUint> {
        Ok(self.eval_in(&Big(p.clone()), &[theta % p])?.remove(0))
    }
    fn eval_many(&self, p: u64, points: &[u64]) -> Result<Vec<u64>> {
        if let Some(&t) = points.iter().find(|&&t| t >= p) {
            check_word(p, t)?;
        }
        self.eval_in(&Word(p), points)
    }
    fn cost_hint(&self) -> usize {
        let bits: u64 = self
            .poly
            .terms()
            .iter()
            .map(|&(_, e)| 64 - e.leading_zeros() as u64)
            .sum();
        (2 * bits as usize + 3 * self.poly.sparsity()).max(1)
    }
}

/// Black box backed by monomial coefficients (ascending degree), evaluated by Horner's rule.
#[derive(Debug, Clone)]
pub struct DenseBox {
    coeffs: Vec<Rat>,
}

impl DenseBox {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        DenseBox { coeffs }
    }

    fn eval_in<F: Field>(&self, field: &F, points: &[F::E]) -> Result<Vec<F::E>> {
        let c = self
            .coeffs
            .iter()
            .map(|q| field.rat(q))
            .collect::<Result<Vec<_>>>()?;
        let zero = field.rat(&Rat::zero())?;
        Ok(points
            .iter()
            .map(|x| {
                c.iter()
                    .rev()
                    .fold(zero.clone(), |acc, ci| field.add(&field.mul(&acc, x), ci))
            })
            .collect())
    }
}

impl ModularBlackBox for DenseBox {
    fn eval(&self, p: u64, theta: u64) -> Result<u64> {
        check_word(p, theta)?;
        Ok(self.eval_in(&Word(p), &[theta])?[0])
    }
    fn eval_big(&self, p: &BigUint, theta: &BigUint) -> Result<BigUint> {
        Ok(self.eval_in(&Big(p.clone()), &[theta % p])?.remove(0))
    }
    fn eval_many(&self, p: u64, points: &[u64]) -> Result<Vec<u64>> {
        if let Some(&t) = points.iter().find(|&&t| t >= p) {
            check_word(p, t)?;
        }
        self.eval_in(&Word(p), points)
    }
    fn cost_hint(&self) -> usize {
        2 * self.coeffs.len()
    }
}

/// One step of a straight-line program; operands index earlier registers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instr {
    Const(Rat),
    Var,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Pow(usize, u64),
}

/// Black box that runs a straight-line program; the last register is the output.
#[derive(Debug, Clone)]
pub struct ProgramBox {
    program: Vec<Instr>,
}

impl ProgramBox {
    pub fn new(program: Vec<Instr>) -> Result<Self> {
        if program.is_empty() {
            return Err(Error::InvalidInput("empty program".into()));
        }
        for (i, ins) in program.iter().enumerate() {
            let ok = match *ins {
                Instr::Const(_) | Instr::Var => true,
                Instr::Add(a, b) | Instr::Sub(a, b) | Instr::Mul(a, b) => a < i && b < i,
                Instr::Pow(a, _) => a < i,
            };
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "instruction {i} reads a register that is not yet defined"
                )));
            }
        }
        Ok(ProgramBox { program })
    }

    fn run<F: Field>(&self, field: &F, x: &F::E) -> Result<F::E> {
        let mut regs: Vec<F::E> = Vec::with_capacity(self.program.len());
        for ins in &self.program {
            let v = match ins {
                Instr::Const(q) => field.rat(q)?,
                Instr::Var => x.clone(),
                Instr::Add(a, b) => field.add(&regs[*a], &regs[*b]),
                Instr::Sub(a, b) => field.sub(&regs[*a], &regs[*b]),
                Instr::Mul(a, b) => field.mul(&regs[*a], &regs[*b]),
                Instr::Pow(a, e) => field.pow(&regs[*a], *e),
            };
            regs.push(v);
        }
        Ok(regs.pop().unwrap())
    }
}

impl ModularBlackBox for ProgramBox {
    fn eval(&self, p: u64, theta: u64) -> Result<u64> {
        check_word(p, theta)?;
        self.run(&Word(p), &theta)
    }
    fn eval_big(&self, p: &BigUint, theta: &BigUint) -> Result<BigUint> {
        self.run(&Big(p.clone()), &(theta % p))
    }
    fn cost_hint(&self) -> usize {
        self.program
            .iter()
            .map(|i| match i {
                Instr::Pow(_, e) => 2 * (64 - e.leading_zeros() as usize),
                _ => 1,
            })
            .sum()
    }
}

/// The box `θ ↦ f(θ + α)`.
pub struct ShiftedBox {
    inner: BlackBoxRef,
    alpha: Rat,
}

impl ModularBlackBox for ShiftedBox {
    fn eval(&self, p: u64, theta: u64) -> Result<u64> {
        check_word(p, theta)?;
        let a = rat_mod(&self.alpha, p).ok_or_else(|| Error::vanished(p))?;
        self.inner.eval(p, add_mod(theta, a, p))
    }
    fn eval_big(&self, p: &BigUint, theta: &BigUint) -> Result<BigUint> {
        let a = rat_mod_big(&self.alpha, p).ok_or_else(|| Error::vanished(p))?;
        self.inner.eval_big(p, &((theta + a) % p))
    }
    fn eval_many(&self, p: u64, points: &[u64]) -> Result<Vec<u64>> {
        let a = rat_mod(&self.alpha, p).ok_or_else(|| Error::vanished(p))?;
        let moved: Vec<u64> = points.iter().map(|&t| add_mod(t % p, a, p)).collect();
        self.inner.eval_many(p, &moved)
    }
    fn cost_hint(&self) -> usize {
        self.inner.cost_hint() + 1
    }
}

/// Black box for `f(x + α)` built from one for `f`.
pub fn shifted_blackbox(bb: BlackBoxRef, alpha: Rat) -> BlackBoxRef {
    if alpha.is_zero() {
        return bb;
    }
    Arc::new(ShiftedBox { inner: bb, alpha })
}

/// Wrapper that counts evaluated points.
pub struct CountingBox {
    inner: BlackBoxRef,
    calls: AtomicU64,
}

impl CountingBox {
    pub fn new(inner: BlackBoxRef) -> Arc<Self> {
        Arc::new(CountingBox {
            inner,
            calls: AtomicU64::new(0),
        })
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl ModularBlackBox for CountingBox {
    fn eval(&self, p: u64, theta: u64) -> Result<u64> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.eval(p, theta)
    }
    fn eval_big(&self, p: &BigUint, theta: &BigUint) -> Result<BigUint> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.eval_big(p, theta)
    }
    fn eval_many(&self, p: u64, points: &[u64]) -> Result<Vec<u64>> {
        self.calls.fetch_add(points.len() as u64, Ordering::Relaxed);
        self.inner.eval_many(p, points)
    }
    fn cost_hint(&self) -> usize {
        self.inner.cost_hint()
    }
}

/// Points per parallel evaluation task.
const GRID_CHUNK: u64 = 1 << 12;

/// `f(0), …, f(p-1)` modulo `p`: exactly `p` black-box calls.
pub fn eval_grid(bb: &dyn ModularBlackBox, p: u64) -> Result<Vec<u64>> {
    if p <= GRID_CHUNK {
        let points: Vec<u64> = (0..p).collect();
        return bb.eval_many(p, &points);
    }
    let chunks = (0..p.div_ceil(GRID_CHUNK))
        .into_par_iter()
        .map(|c| {
            let points: Vec<u64> = (c * GRID_CHUNK..((c + 1) * GRID_CHUNK).min(p)).collect();
            bb.eval_many(p, &points)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.concat())
}

/// `f^(p)`: the unique polynomial of degree `< p` agreeing with `f` on all of `Z_p`.
pub fn reduce_mod(bb: &dyn ModularBlackBox, p: u64) -> Result<DensePolyMod> {
    reduce_mod_with(bb, p, DEFAULT_INTERPOLATION_THRESHOLD)
}

pub fn reduce_mod_with(bb: &dyn ModularBlackBox, p: u64, threshold: usize) -> Result<DensePolyMod> {
    let grid = eval_grid(bb, p)?;
    interpolate_range_with(&grid, p, threshold)
}

/// Evaluates at a big prime, converting a word-sized answer when possible.
pub(crate) fn eval_at(bb: &dyn ModularBlackBox, q: &BigUint, theta: u64) -> Result<BigUint> {
    match q.to_u64() {
        Some(w) if w < 1 << 63 => Ok(BigUint::from(bb.eval(w, theta % w)?)),
        _ => bb.eval_big(q, &BigUint::from(theta)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rat;

    fn q(s: &str) -> Rat {
        parse_rat(s).unwrap()
    }

    fn golden() -> ShiftedLacunary {
        ShiftedLacunary::new(q("3"), q("0"), vec![(q("1"), 15), (q("-2"), 5)]).unwrap()
    }

    #[test]
    fn lacunary_eval_examples() {
        let bb = make_blackbox(golden());
        assert_eq!(bb.eval(7, 4).unwrap(), 6);
        let five = make_blackbox(ShiftedLacunary::constant(q("5")));
        for p in [7u64, 11, 101] {
            for t in [0, 1, p - 1] {
                assert_eq!(five.eval(p, t).unwrap(), 5);
            }
        }
        let third = make_blackbox(
            ShiftedLacunary::new(q("0"), q("0"), vec![(q("1/3"), 1)]).unwrap(),
        );
        assert!(matches!(
            third.eval(3, 1),
            Err(Error::DenominatorVanished { .. })
        ));
        assert!(bb.eval(7, 9).is_err());
    }

    #[test]
    fn reduce_examples() {
        let bb = make_blackbox(golden());
        assert_eq!(
            reduce_mod(bb.as_ref(), 7).unwrap(),
            DensePolyMod::new(7, vec![4, 1, 6, 3, 2, 5])
        );
        let five = make_blackbox(ShiftedLacunary::constant(q("5")));
        assert_eq!(reduce_mod(five.as_ref(), 13).unwrap(), DensePolyMod::new(13, vec![5]));
        let unshifted = make_blackbox(golden().unshifted());
        assert_eq!(
            reduce_mod(unshifted.as_ref(), 7).unwrap(),
            DensePolyMod::new(7, vec![0, 0, 0, 1, 0, 5])
        );
    }

    #[test]
    fn shifted_examples() {
        let bb = make_blackbox(golden());
        let g = shifted_blackbox(bb.clone(), q("3"));
        assert_eq!(g.eval(7, 0).unwrap(), 0);
        for t in 0..7 {
            assert_eq!(g.eval(7, t).unwrap(), bb.eval(7, (t + 3) % 7).unwrap());
        }
        let same = shifted_blackbox(bb.clone(), q("0"));
        assert_eq!(eval_grid(same.as_ref(), 11).unwrap(), eval_grid(bb.as_ref(), 11).unwrap());

        let x = make_blackbox(ShiftedLacunary::new(q("0"), q("0"), vec![(q("1"), 1)]).unwrap());
        let half = shifted_blackbox(x, q("1/2"));
        assert_eq!(half.eval(5, 0).unwrap(), 3);
        assert!(half.eval(2, 0).is_err());
    }

    #[test]
    fn boxes_agree() {
        let f = golden();
        let dense = DenseBox::new(f.to_dense());
        let prog = ProgramBox::new(vec![
            Instr::Var,
            Instr::Const(q("3")),
            Instr::Sub(0, 1),
            Instr::Pow(2, 15),
            Instr::Pow(2, 5),
            Instr::Const(q("2")),
            Instr::Mul(4, 5),
            Instr::Sub(3, 6),
        ])
        .unwrap();
        let lac = LacunaryBox::new(f);
        for p in [7u64, 31, 101] {
            let g = eval_grid(&lac, p).unwrap();
            assert_eq!(eval_grid(&dense, p).unwrap(), g);
            assert_eq!(eval_grid(&prog, p).unwrap(), g);
        }
        let big = BigUint::from(2u32).pow(89) - 1u32;
        let theta = BigUint::from(123_456_789u64);
        let a = lac.eval_big(&big, &theta).unwrap();
        assert_eq!(dense.eval_big(&big, &theta).unwrap(), a);
        assert_eq!(prog.eval_big(&big, &theta).unwrap(), a);
        assert!(ProgramBox::new(vec![Instr::Add(0, 1)]).is_err());
    }

    #[test]
    fn counting_and_purity() {
        let c = CountingBox::new(make_blackbox(golden()));
        let first = reduce_mod(c.as_ref(), 101).unwrap();
        assert_eq!(c.calls(), 101);
        let second = reduce_mod(c.as_ref(), 101).unwrap();
        assert_eq!(first, second);
        assert_eq!(c.calls(), 202);
        assert_eq!(c.eval(13, 5).unwrap(), c.eval(13, 5).unwrap());
    }

    #[test]
    fn failure_is_per_prime() {
        let f = ShiftedLacunary::new(q("0"), q("1/7"), vec![(q("1"), 2)]).unwrap();
        let bb = make_blackbox(f);
        assert!(matches!(
            reduce_mod(bb.as_ref(), 7),
            Err(Error::DenominatorVanished { .. })
        ));
        assert!(reduce_mod(bb.as_ref(), 11).is_ok());
    }
}
