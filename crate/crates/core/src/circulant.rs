//! Circulant matrices and the square-witness factorization of symmetric
//! (palindromic) circulant determinants.
//!
//! For a tuple with `a_i = a_{n-i}`, the determinant of `C(a_0, ..., a_{n-1})`
//! over the integers factors as `(sum a_i) (sum (-1)^i a_i) u^2` for even `n`
//! and as `(sum a_i) v^2` for odd `n`. [`factor_symmetric`] computes the
//! determinant exactly and recovers the nonnegative witness.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{det_exact_with, exact_div, BigMatrix, DetConfig};
use crate::modular::is_perfect_square;

/// The first column `(b_0, ..., b_{n-1})` of a circulant matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CirculantSpec {
    tuple: Vec<BigInt>,
}

impl CirculantSpec {
    pub fn new(tuple: Vec<BigInt>) -> Result<Self> {
        if tuple.is_empty() {
            return Err(Error::EmptyTuple);
        }
        Ok(CirculantSpec { tuple })
    }

    pub fn from_i64s(tuple: &[i64]) -> Result<Self> {
        Self::new(tuple.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn n(&self) -> usize {
        self.tuple.len()
    }

    pub fn tuple(&self) -> &[BigInt] {
        &self.tuple
    }

    /// `(b_0, b_{n-1}, ..., b_1)`, whose circulant is the transpose.
    pub fn reversed(&self) -> Self {
        let n = self.n();
        CirculantSpec { tuple: (0..n).map(|i| self.tuple[(n - i) % n].clone()).collect() }
    }

    /// First index `i` violating `a_i = a_{n-i}`, if any.
    fn palindrome_violation(&self) -> Option<usize> {
        let n = self.n();
        (1..n).find(|&i| self.tuple[i] != self.tuple[n - i])
    }
}

/// `n x n` matrix with entry `(i, j) = b_{(i - j) mod n}`.
pub fn circulant(spec: &CirculantSpec) -> BigMatrix {
    let n = spec.n();
    BigMatrix::from_fn(n, |i, j| spec.tuple[(i + n - j) % n].clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricFactorization {
    /// `sum a_i`
    pub s_plus: BigInt,
    /// `sum (-1)^i a_i`, present for even `n` only.
    pub s_minus: Option<BigInt>,
    /// Nonnegative `u` (even `n`) or `v` (odd `n`).
    pub witness: BigInt,
    pub det: BigInt,
}

impl SymmetricFactorization {
    /// `s_plus * s_minus` (even `n`) or `s_plus` (odd `n`).
    pub fn predicted_factor(&self) -> BigInt {
        match &self.s_minus {
            Some(s) => &self.s_plus * s,
            None => self.s_plus.clone(),
        }
    }

    /// Recomputes the determinant from the factors and the witness.
    pub fn reconstruct(&self) -> BigInt {
        self.predicted_factor() * &self.witness * &self.witness
    }
}

pub fn factor_symmetric(spec: &CirculantSpec) -> Result<SymmetricFactorization> {
    factor_symmetric_with(spec, &DetConfig::default())
}

/// Factors a palindromic circulant determinant.
///
/// [`Error::Indivisible`] and [`Error::NotSquareQuotient`] can only arise from
/// an arithmetic bug; callers treat them as fatal.
pub fn factor_symmetric_with(spec: &CirculantSpec, cfg: &DetConfig) -> Result<SymmetricFactorization> {
    if let Some(index) = spec.palindrome_violation() {
        return Err(Error::NotPalindromic { index, mirror: spec.n() - index });
    }
    let det = det_exact_with(&circulant(spec), cfg);
    let s_plus: BigInt = spec.tuple.iter().sum();
    let s_minus = spec
        .n()
        .is_multiple_of(2)
        .then(|| spec.tuple.iter().enumerate().map(|(i, a)| if i % 2 == 0 { a.clone() } else { -a }).sum::<BigInt>());
    let mut out = SymmetricFactorization { s_plus, s_minus, witness: BigInt::zero(), det };
    let factor = out.predicted_factor();
    if factor.is_zero() {
        if !out.det.is_zero() {
            return Err(Error::Indivisible { det: out.det, factor });
        }
        return Ok(out);
    }
    let quotient = exact_div(&out.det, &factor)
        .ok_or_else(|| Error::Indivisible { det: out.det.clone(), factor: factor.clone() })?;
    out.witness =
        is_perfect_square(&quotient).ok_or_else(|| Error::NotSquareQuotient { quotient: quotient.clone() })?;
    Ok(out)
}
