//! Trace terms of the curves `y^2 = x^k + 1`, `y^2 = x (x^k + 1)`,
//! `y^2 = x (x^{2k} + 1)` and `y^2 = x (x^{2k} + g^k)` over `F_p`.
//!
//! With one point at infinity, `p + 1 - trace = #affine + 1` and
//! `#affine = p + sum_x (f(x)/p)`, so each trace is the negated quadratic
//! character sum of the defining polynomial. [`count_naive`] counts affine
//! points directly and serves as an independent backend.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::modular::{jacobi, kth_power_residues, mul_mod, pow_mod, reduce_big, PrimeModulus, ResidueSystem};
use crate::poly::{eval_sparse_mod, IntPoly};

/// Above this size the Legendre symbol is evaluated term by term instead of
/// through a table.
pub const TABLE_LIMIT: u64 = 10_000_000;

/// `(x/p)` for every `x` in `[0, p)`.
pub struct LegendreTable {
    p: u64,
    table: Option<Vec<i8>>,
}

impl LegendreTable {
    pub fn new(p: PrimeModulus) -> Self {
        let p = p.get();
        let table = (p <= TABLE_LIMIT).then(|| (0..p).map(|x| jacobi(x, p)).collect());
        LegendreTable { p, table }
    }

    #[inline]
    pub fn get(&self, x: u64) -> i8 {
        match &self.table {
            Some(t) => t[x as usize],
            None => jacobi(x, self.p),
        }
    }
}

/// `sum_{x in F_p} (f(x)/p)`.
pub fn char_sum(f: &IntPoly, p: PrimeModulus) -> i64 {
    char_sum_with(f, &LegendreTable::new(p))
}

pub fn char_sum_with(f: &IntPoly, table: &LegendreTable) -> i64 {
    let p = table.p;
    let terms = f.sparse_mod(p);
    (0..p).map(|x| table.get(eval_sparse_mod(&terms, x, p)) as i64).sum()
}

/// Number of `(x, y)` in `F_p x F_p` with `y^2 = f(x)`, by a table of square
/// multiplicities and termwise polynomial evaluation.
pub fn count_naive(f: &IntPoly, p: PrimeModulus) -> u64 {
    let p = p.get();
    let mut roots = vec![0u32; p as usize];
    for y in 0..p {
        roots[mul_mod(y, y, p) as usize] += 1;
    }
    let terms: Vec<(u64, u64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as u64, reduce_big(c, p)))
        .collect();
    (0..p)
        .map(|x| {
            let v = terms.iter().fold(0u64, |acc, &(e, c)| (acc + mul_mod(c, pow_mod(x, e, p), p)) % p);
            roots[v as usize] as u64
        })
        .sum()
}

/// The four curve families, named after their trace terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CurveFamily {
    /// `y^2 = x^k + 1`
    A,
    /// `y^2 = x (x^k + 1)`
    B,
    /// `y^2 = x (x^{2k} + 1)`
    C,
    /// `y^2 = x (x^{2k} + g^k)`
    D,
}

impl CurveFamily {
    pub const ALL: [CurveFamily; 4] = [CurveFamily::A, CurveFamily::B, CurveFamily::C, CurveFamily::D];

    /// Defining polynomial; `g` only matters for [`CurveFamily::D`].
    pub fn poly(self, k: u64, g: u64, p: PrimeModulus) -> IntPoly {
        let k = k as usize;
        let x = IntPoly::x();
        match self {
            CurveFamily::A => IntPoly::monomial(1, k).add(&IntPoly::constant(1)),
            CurveFamily::B => x.mul(&IntPoly::monomial(1, k).add(&IntPoly::constant(1))),
            CurveFamily::C => x.mul(&IntPoly::monomial(1, 2 * k).add(&IntPoly::constant(1))),
            CurveFamily::D => {
                let gk = pow_mod(g, k as u64, p.get());
                x.mul(&IntPoly::monomial(1, 2 * k).add(&IntPoly::constant(gk)))
            }
        }
    }

    /// Whether the family is defined for this `k` (C and D need `k` odd).
    pub fn admits(self, k: u64) -> bool {
        match self {
            CurveFamily::A | CurveFamily::B => true,
            CurveFamily::C | CurveFamily::D => k % 2 == 1,
        }
    }
}

/// Weil-type sanity check for a squarefree monic `f` of the given degree.
///
/// Odd degree `2g + 1` has one point at infinity, so `|t| <= 2 g sqrt(p)`.
/// Even degree `2g + 2` has two, and the single-point convention shifts the
/// trace by one: `|t - 1| <= 2 g sqrt(p)`.
pub fn within_weil_bound(trace: i64, degree: u64, p: PrimeModulus) -> bool {
    let (genus, centered) =
        if degree % 2 == 1 { ((degree - 1) / 2, trace) } else { ((degree.max(2) - 2) / 2, trace - 1) };
    let lhs = (centered as i128).pow(2);
    let rhs = 4 * (genus as i128).pow(2) * p.get() as i128;
    lhs <= rhs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveCounts {
    pub a: i64,
    pub b: i64,
    /// Only for odd `k`.
    pub c: Option<i64>,
    /// Only for odd `k`.
    pub d: Option<i64>,
    pub g_used: u64,
}

impl CurveCounts {
    /// Traces from character sums over a shared Legendre table.
    pub fn compute(rs: &ResidueSystem) -> Self {
        let table = LegendreTable::new(rs.p());
        Self::from_backend(rs, |f| -char_sum_with(&f, &table))
    }

    /// Traces from literal point counts.
    pub fn compute_naive(rs: &ResidueSystem) -> Self {
        let p = rs.p();
        Self::from_backend(rs, |f| p.get() as i64 - count_naive(&f, p) as i64)
    }

    fn from_backend(rs: &ResidueSystem, mut trace: impl FnMut(IntPoly) -> i64) -> Self {
        let (p, k, g) = (rs.p(), rs.k(), rs.g());
        let mut get = |fam: CurveFamily| fam.admits(k).then(|| trace(fam.poly(k, g, p)));
        CurveCounts {
            a: get(CurveFamily::A).expect("family A is always defined"),
            b: get(CurveFamily::B).expect("family B is always defined"),
            c: get(CurveFamily::C),
            d: get(CurveFamily::D),
            g_used: g,
        }
    }

    pub fn get(&self, family: CurveFamily) -> Option<i64> {
        match family {
            CurveFamily::A => Some(self.a),
            CurveFamily::B => Some(self.b),
            CurveFamily::C => self.c,
            CurveFamily::D => self.d,
        }
    }

    /// `c^2 + d^2` for odd `k`.
    pub fn c2_plus_d2(&self) -> Option<BigInt> {
        let (c, d) = (self.c?, self.d?);
        Some(BigInt::from(c) * c + BigInt::from(d) * d)
    }
}

fn trace_of(p: PrimeModulus, k: u64, family: CurveFamily) -> Result<i64> {
    let rs = kth_power_residues(p, k)?;
    if !family.admits(k) {
        return Err(Error::WrongParity { k, expected: "odd" });
    }
    Ok(-char_sum(&family.poly(k, rs.g(), p), p))
}

/// `a_p(k)` from `y^2 = x^k + 1`.
pub fn trace_a(p: PrimeModulus, k: u64) -> Result<i64> {
    trace_of(p, k, CurveFamily::A)
}

/// `b_p(k)` from `y^2 = x (x^k + 1)`.
pub fn trace_b(p: PrimeModulus, k: u64) -> Result<i64> {
    trace_of(p, k, CurveFamily::B)
}

/// `c_p(k)` from `y^2 = x (x^{2k} + 1)`; `k` must be odd.
pub fn trace_c(p: PrimeModulus, k: u64) -> Result<i64> {
    trace_of(p, k, CurveFamily::C)
}

/// `d_p(k)` from `y^2 = x (x^{2k} + g^k)` with the smallest primitive root `g`.
pub fn trace_d(p: PrimeModulus, k: u64) -> Result<i64> {
    trace_of(p, k, CurveFamily::D)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    /// Literal double loop over `F_p x F_p`.
    fn count_double_loop(f: &IntPoly, p: u64) -> u64 {
        let mut n = 0;
        for x in 0..p {
            let fx = crate::modular::reduce_big(&f.eval(&BigInt::from(x)), p);
            n += (0..p).filter(|y| y * y % p == fx).count() as u64;
        }
        n
    }

    #[test]
    fn char_sum_examples() {
        assert_eq!(char_sum(&IntPoly::x(), pm(7)), 0);
        assert_eq!(char_sum(&IntPoly::from_i64s(&[1, 0, 1]), pm(7)), -1);
        assert_eq!(char_sum(&IntPoly::constant(1), pm(7)), 7);
    }

    #[test]
    fn count_naive_examples() {
        let cube = IntPoly::from_i64s(&[1, 0, 0, 1]);
        assert_eq!(count_naive(&cube, pm(5)) as i64, 5 + char_sum(&cube, pm(5)));
        assert_eq!(count_naive(&IntPoly::from_i64s(&[1, 0, 1]), pm(7)), 6);
        assert_eq!(count_naive(&IntPoly::default(), pm(5)), 5);
        for p in [3u64, 5, 7, 11, 13] {
            for f in [cube.clone(), IntPoly::from_i64s(&[2, -1, 0, 0, 3])] {
                assert_eq!(count_naive(&f, pm(p)), count_double_loop(&f, p));
            }
        }
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace_a(pm(7), 2).unwrap(), 1);
        assert_eq!(trace_a(pm(13), 2).unwrap(), 1);
        assert_eq!(trace_a(pm(5), 4).unwrap(), 3);
        assert_eq!(trace_b(pm(13), 2).unwrap(), -6);
        assert_eq!(trace_b(pm(5), 2).unwrap(), 2);
        // y^2 = x^3 + x over F_7: x -> -x flips the symbol since (-1/7) = -1.
        assert_eq!(trace_b(pm(7), 2).unwrap(), 0);
        assert_eq!(7 - count_double_loop(&IntPoly::from_i64s(&[0, 1, 0, 1]), 7) as i64, 0);
        assert_eq!(trace_c(pm(13), 3).unwrap().pow(2), 36);
        assert_eq!(trace_d(pm(13), 3).unwrap().pow(2), 144);
        assert!(matches!(trace_c(pm(13), 2), Err(Error::WrongParity { k: 2, .. })));
        assert!(matches!(trace_c(pm(5), 1), Err(Error::DegenerateK(1))));
        assert!(matches!(trace_a(pm(11), 4), Err(Error::NotADivisor { .. })));
    }

    #[test]
    fn backends_agree_for_p29_k7() {
        let rs = kth_power_residues(pm(29), 7).unwrap();
        let fast = CurveCounts::compute(&rs);
        assert_eq!(fast, CurveCounts::compute_naive(&rs));
        for fam in CurveFamily::ALL {
            let f = fam.poly(7, rs.g(), rs.p());
            assert_eq!(fast.get(fam).unwrap(), 29 - count_double_loop(&f, 29) as i64);
        }
    }

    #[test]
    fn weil_bound_holds_for_small_primes() {
        for p in (3..200).filter(|&p| crate::modular::is_prime(p)) {
            for k in crate::modular::divisors(p - 1).into_iter().filter(|&k| k >= 2) {
                let rs = kth_power_residues(pm(p), k).unwrap();
                let cc = CurveCounts::compute(&rs);
                assert!(within_weil_bound(cc.a, k, rs.p()), "a, p = {p}, k = {k}");
                assert!(within_weil_bound(cc.b, k + 1, rs.p()), "b, p = {p}, k = {k}");
                if let (Some(c), Some(d)) = (cc.c, cc.d) {
                    assert!(within_weil_bound(c, 2 * k + 1, rs.p()));
                    assert!(within_weil_bound(d, 2 * k + 1, rs.p()));
                }
            }
        }
    }
}
