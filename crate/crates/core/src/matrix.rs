//! Exact linear algebra over the integers and over prime fields.
//!
//! Integer determinants come from one of two routes. Small matrices use
//! fraction-free (Bareiss) elimination on big integers. Larger ones are
//! reduced modulo enough word-size primes that their product exceeds twice
//! the Hadamard bound; each residue determinant is found by Gaussian
//! elimination with word arithmetic and the balanced CRT lift recovers the
//! signed integer.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modular::{inv_mod_u64, is_prime, mul_mod, reduce_big, PrimeModulus};
use crate::poly::IntPoly;

/// Square matrix of arbitrary-precision integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl BigMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        BigMatrix { n, entries }
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if let Some((bad_row, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::NotSquare { rows: n, bad_row, len: row.len() });
        }
        if n == 0 {
            return Err(Error::NotSquare { rows: 0, bad_row: 0, len: 0 });
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j].clone().into()))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| BigInt::from((i == j) as i32))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &BigMatrix) -> BigMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self::from_fn(self.n, |i, j| (0..self.n).map(|l| self.get(i, l) * other.get(l, j)).sum())
    }

    /// `self - c * I`
    pub fn shift_diagonal(&self, c: &BigInt) -> BigMatrix {
        Self::from_fn(self.n, |i, j| if i == j { self.get(i, j) - c } else { self.get(i, j).clone() })
    }

    pub fn reduce_mod(&self, p: PrimeModulus) -> ModMatrix {
        ModMatrix { n: self.n, p, entries: self.entries.iter().map(|e| reduce_big(e, p.get())).collect() }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Entries as machine words when every entry fits.
    fn small_entries(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(ToPrimitive::to_i64).collect()
    }
}

/// Square matrix over `F_p` with entries reduced into `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMatrix {
    n: usize,
    p: PrimeModulus,
    entries: Vec<u64>,
}

impl ModMatrix {
    pub fn from_fn(n: usize, p: PrimeModulus, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j) % p.get());
            }
        }
        ModMatrix { n, p, entries }
    }

    pub fn from_rows(rows: &[Vec<u64>], p: PrimeModulus) -> Result<Self> {
        let n = rows.len();
        if let Some((bad_row, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::NotSquare { rows: n, bad_row, len: row.len() });
        }
        if n == 0 {
            return Err(Error::NotSquare { rows: 0, bad_row: 0, len: 0 });
        }
        Ok(Self::from_fn(n, p, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.n).map(<[u64]>::to_vec).collect()
    }
}

/// Strategy knobs for [`det_exact_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetConfig {
    /// Matrices with `n` at or below this use Bareiss; larger ones use CRT.
    pub crt_threshold: usize,
}

impl Default for DetConfig {
    fn default() -> Self {
        DetConfig { crt_threshold: 8 }
    }
}

pub fn det_exact(m: &BigMatrix) -> BigInt {
    det_exact_with(m, &DetConfig::default())
}

pub fn det_exact_with(m: &BigMatrix, cfg: &DetConfig) -> BigInt {
    if m.n <= cfg.crt_threshold {
        det_bareiss(m)
    } else {
        det_crt(m)
    }
}

/// Fraction-free Gaussian elimination. Every division is exact.
pub fn det_bareiss(m: &BigMatrix) -> BigInt {
    let n = m.n;
    let mut a = m.entries.clone();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, r * n + j);
            }
            negate = !negate;
        }
        let (upper, lower) = a.split_at_mut((k + 1) * n);
        let pivot_row = &upper[k * n..];
        let pivot = &pivot_row[k];
        for row in lower.chunks_mut(n) {
            let factor = std::mem::take(&mut row[k]);
            for j in k + 1..n {
                let mut t = &row[j] * pivot;
                if !factor.is_zero() {
                    t -= &factor * &pivot_row[j];
                }
                row[j] = t / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    let det = a[n * n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// `prod_i ||row_i||^2`, the square of the Hadamard bound.
pub fn hadamard_bound_sq(m: &BigMatrix) -> BigInt {
    (0..m.n).map(|i| m.row(i).iter().map(|e| e * e).sum::<BigInt>()).product()
}

static CRT_PRIMES: Mutex<Vec<u64>> = Mutex::new(Vec::new());

/// The first `count` primes descending from `2^62`.
pub fn crt_primes(count: usize) -> Vec<u64> {
    let mut cache = CRT_PRIMES.lock().unwrap_or_else(|e| e.into_inner());
    let mut candidate = cache.last().map_or(1u64 << 62, |&q| q - 1);
    if candidate.is_multiple_of(2) {
        candidate -= 1;
    }
    while cache.len() < count {
        if is_prime(candidate) {
            cache.push(candidate);
        }
        candidate -= 2;
    }
    cache[..count].to_vec()
}

/// Multi-modular determinant with balanced CRT reconstruction.
pub fn det_crt(m: &BigMatrix) -> BigInt {
    let bound_sq = hadamard_bound_sq(m);
    if bound_sq.is_zero() {
        return BigInt::zero();
    }
    // Need prod(q) > 2 * sqrt(bound_sq), i.e. prod(q)^2 > 4 * bound_sq.
    let target = &bound_sq * 4u32;
    let mut count = 0;
    let mut product = BigInt::one();
    while &product * &product <= target {
        count += 1;
        product *= crt_primes(count)[count - 1];
    }
    let moduli = crt_primes(count);

    let small = m.small_entries();
    let residues: Vec<u64> = moduli
        .par_iter()
        .map(|&q| {
            let reduced: Vec<u64> = match &small {
                Some(v) => v.iter().map(|&e| (e as i128).rem_euclid(q as i128) as u64).collect(),
                None => m.entries.iter().map(|e| reduce_big(e, q)).collect(),
            };
            det_mod_word(reduced, m.n, q)
        })
        .collect();

    let det = crt_balanced(&residues, &moduli);
    assert!(&det * &det <= bound_sq, "CRT determinant {det} exceeds the Hadamard bound");
    det
}

/// Balanced lift of the residues to the symmetric interval around zero.
fn crt_balanced(residues: &[u64], moduli: &[u64]) -> BigInt {
    let mut x = BigInt::zero();
    let mut modulus = BigInt::one();
    for (&r, &q) in residues.iter().zip(moduli) {
        let x_mod_q = reduce_big(&x, q);
        let m_mod_q = reduce_big(&modulus, q);
        let m_inv = inv_mod_u64(m_mod_q, q).expect("CRT moduli are distinct primes");
        let diff = (r + q - x_mod_q) % q;
        let t = ((diff as u128 * m_inv as u128) % q as u128) as u64;
        x += &modulus * t;
        modulus *= q;
    }
    if &x * 2u32 > modulus {
        x - modulus
    } else {
        x
    }
}

/// Determinant over `F_p` by Gaussian elimination (first nonzero pivot).
pub fn det_mod(m: &ModMatrix) -> u64 {
    det_mod_word(m.entries.clone(), m.n, m.p.get())
}

/// Multiplication by a fixed residue using a precomputed quotient
/// approximation (Shoup); valid for any modulus below 2^63.
#[derive(Clone, Copy)]
struct FixedMul {
    w: u64,
    w_shoup: u64,
}

impl FixedMul {
    #[inline]
    fn new(w: u64, q: u64) -> Self {
        FixedMul { w, w_shoup: (((w as u128) << 64) / q as u128) as u64 }
    }

    #[inline]
    fn apply(self, y: u64, q: u64) -> u64 {
        let approx = ((self.w_shoup as u128 * y as u128) >> 64) as u64;
        // r < 2q; min() picks r - q exactly when it did not wrap.
        let r = self.w.wrapping_mul(y).wrapping_sub(approx.wrapping_mul(q));
        r.min(r.wrapping_sub(q))
    }
}

/// Determinant of an `n x n` matrix modulo `q < 2^63`; entries must already
/// be reduced. Pivots are the first nonzero entry in each column.
pub(crate) fn det_mod_word(mut a: Vec<u64>, n: usize, q: u64) -> u64 {
    assert!((2..1 << 63).contains(&q), "word modulus out of range");
    let mut det = 1 % q;
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| a[r * n + k] != 0) else {
            return 0;
        };
        if r != k {
            for j in k..n {
                a.swap(k * n + j, r * n + j);
            }
            det = (q - det) % q;
        }
        let pivot = a[k * n + k];
        det = mul_mod(det, pivot, q);
        let pivot_inv = inv_mod_u64(pivot, q).expect("nonzero pivot is invertible");
        let (upper, lower) = a.split_at_mut((k + 1) * n);
        let pivot_row = &upper[k * n + k + 1..(k + 1) * n];
        for row in lower.chunks_mut(n) {
            if row[k] == 0 {
                continue;
            }
            let factor = FixedMul::new(mul_mod(row[k], pivot_inv, q), q);
            for (x, &y) in row[k + 1..].iter_mut().zip(pivot_row) {
                let d = x.wrapping_sub(factor.apply(y, q));
                *x = d.min(d.wrapping_add(q));
            }
        }
    }
    det
}

/// Characteristic polynomial `det(t I - M)` by the division-free
/// Samuelson-Berkowitz recurrence.
pub fn char_poly(m: &BigMatrix) -> IntPoly {
    let n = m.n;
    // Coefficients highest degree first, starting from the empty trailing block.
    let mut poly = vec![BigInt::one()];
    for i in (0..n).rev() {
        let s = n - i;
        let tail = i + 1..n;
        // Toeplitz column: 1, -a, -R C, -R A C, ..., -R A^{s-2} C.
        let mut col = Vec::with_capacity(s + 1);
        col.push(BigInt::one());
        col.push(-m.get(i, i));
        let mut v: Vec<BigInt> = tail.clone().map(|r| m.get(r, i).clone()).collect();
        for _ in 2..=s {
            let dot: BigInt = tail.clone().zip(&v).map(|(c, x)| m.get(i, c) * x).sum();
            col.push(-dot);
            v = tail.clone().map(|r| tail.clone().zip(&v).map(|(c, x)| m.get(r, c) * x).sum()).collect();
        }
        let mut next = vec![BigInt::zero(); s + 1];
        for (r, slot) in next.iter_mut().enumerate() {
            for (c, coef) in poly.iter().enumerate().take(r + 1) {
                *slot += &col[r - c] * coef;
            }
        }
        poly = next;
    }
    IntPoly::from_descending(poly)
}

/// `true` when `d` divides `n` exactly, with the quotient.
pub(crate) fn exact_div(n: &BigInt, d: &BigInt) -> Option<BigInt> {
    if d.is_zero() {
        return None;
    }
    let (q, r) = n.div_rem(d);
    r.is_zero().then_some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[Vec<i64>]) -> BigMatrix {
        BigMatrix::from_rows(rows).unwrap()
    }

    /// Laplace expansion along the first row.
    fn det_laplace(m: &[Vec<i64>]) -> BigInt {
        let n = m.len();
        if n == 1 {
            return BigInt::from(m[0][0]);
        }
        let mut acc = BigInt::zero();
        for c in 0..n {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect())
                .collect();
            let term = BigInt::from(m[0][c]) * det_laplace(&minor);
            if c % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn det_examples() {
        assert_eq!(det_exact(&BigMatrix::identity(3)), BigInt::from(1));
        let w = vec![vec![1, -1, -1], vec![-1, 1, -1], vec![-1, -1, 1]];
        assert_eq!(det_laplace(&w), BigInt::from(-4));
        assert_eq!(det_exact(&big(&w)), BigInt::from(-4));
        assert_eq!(det_crt(&big(&w)), BigInt::from(-4));
        let rot = vec![vec![0, -1], vec![1, 0]];
        assert_eq!(det_exact(&big(&rot)), BigInt::from(1));
        assert_eq!(det_crt(&big(&rot)), BigInt::from(1));
        assert_eq!(det_exact(&big(&[vec![-7]])), BigInt::from(-7));
        assert_eq!(det_crt(&big(&[vec![0, 0], vec![0, 0]])), BigInt::zero());
    }

    #[test]
    fn bareiss_needs_row_swaps() {
        let m = vec![vec![0, 2, 1], vec![0, 3, 4], vec![5, 1, 1]];
        assert_eq!(det_bareiss(&big(&m)), det_laplace(&m));
        let singular = vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6]];
        assert_eq!(det_bareiss(&big(&singular)), BigInt::zero());
    }

    #[test]
    fn det_mod_examples() {
        let p7 = PrimeModulus::new(7).unwrap();
        let id = ModMatrix::from_fn(4, p7, |i, j| (i == j) as u64);
        assert_eq!(det_mod(&id), 1);
        let i7 = ModMatrix::from_rows(&[vec![4, 5, 3], vec![5, 2, 6], vec![3, 6, 1]], p7).unwrap();
        assert_eq!(det_mod(&i7), 1);
        assert_eq!(
            det_laplace(&[vec![4, 5, 3], vec![5, 2, 6], vec![3, 6, 1]]).mod_floor(&BigInt::from(7)),
            BigInt::from(1)
        );
        let p5 = PrimeModulus::new(5).unwrap();
        assert_eq!(det_mod(&ModMatrix::from_rows(&[vec![1, 1], vec![1, 1]], p5).unwrap()), 0);
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&big(&[vec![0, -1], vec![1, 0]])), IntPoly::from_i64s(&[1, 0, 1]));
        assert_eq!(char_poly(&BigMatrix::identity(2)), IntPoly::from_i64s(&[1, -2, 1]));
        assert_eq!(char_poly(&big(&[vec![1, 0], vec![2, 1]])), IntPoly::from_i64s(&[1, -2, 1]));
        assert_eq!(char_poly(&big(&[vec![5]])), IntPoly::from_i64s(&[-5, 1]));
    }

    #[test]
    fn char_poly_matches_determinant_at_sample_points() {
        let m = big(&[vec![2, -1, 0, 3], vec![1, 4, -2, 0], vec![0, 5, 1, -1], vec![-3, 0, 2, 2]]);
        let f = char_poly(&m);
        assert_eq!(f.degree(), Some(4));
        for t in -6i64..=6 {
            let t = BigInt::from(t);
            // det(tI - M) = (-1)^n det(M - tI), n = 4
            let direct = det_exact(&m.shift_diagonal(&t));
            assert_eq!(f.eval(&t), direct, "t = {t}");
        }
    }

    #[test]
    fn word_kernel_matches_laplace_for_tiny_and_huge_moduli() {
        let m = vec![vec![3, -1, 4, 1], vec![-5, 9, 2, -6], vec![5, 3, -5, 8], vec![9, -7, 9, 3]];
        let exact = det_laplace(&m);
        for q in [3u64, 7, 65537, (1 << 61) - 1, crt_primes(1)[0]] {
            let reduced = m.iter().flatten().map(|&e| (e as i128).rem_euclid(q as i128) as u64).collect();
            let want = exact.mod_floor(&BigInt::from(q));
            assert_eq!(BigInt::from(det_mod_word(reduced, 4, q)), want, "q = {q}");
        }
    }

    #[test]
    fn crt_prime_cache_is_descending_and_prime() {
        let ps = crt_primes(5);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(ps.iter().all(|&q| is_prime(q) && q < 1 << 62));
        assert_eq!(crt_primes(3), ps[..3]);
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = BigMatrix::from_rows(&[vec![1i64, 2], vec![3]]).unwrap_err();
        assert!(matches!(err, Error::NotSquare { bad_row: 1, .. }));
        assert!(BigMatrix::from_rows::<i64>(&[]).is_err());
    }
}
