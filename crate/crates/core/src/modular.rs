//! Modular arithmetic over odd prime moduli: quadratic symbols, powers,
//! inverses, primitive roots, power-residue enumeration, perfect squares and
//! representations `p = x^2 + D y^2`.
//!
//! Everything here is a pure function of its arguments. Moduli are `u64`;
//! products are formed in `u128` so any 64-bit modulus is safe.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Roots;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// An odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    /// Validates that `p` is an odd prime (deterministic Miller-Rabin).
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::EvenPrime(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    /// Skips the primality test but still rejects even numbers and `p < 3`.
    /// Results computed with a composite modulus are meaningless.
    pub fn new_unchecked(p: u64) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// `p mod n`, convenient for congruence-class hypotheses.
    #[inline]
    pub fn residue_class(self, n: u64) -> u64 {
        self.0 % n
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Reduces a signed integer into `[0, m)`.
#[inline]
pub fn reduce_signed(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

/// Reduces an arbitrary-precision integer into `[0, m)`.
pub fn reduce_big(a: &BigInt, m: u64) -> u64 {
    let r = a % BigInt::from(m);
    let r = if r.sign() == Sign::Minus { r + m } else { r };
    r.to_u64().expect("residue fits in u64")
}

/// `base^exp mod m` by square-and-multiply.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    assert!(m >= 1, "modulus must be positive");
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm, if it exists.
pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Inverse of `a` modulo the prime `p`, in `(0, p)`.
///
/// Fails with [`Error::NotInvertible`] when `p | a`.
pub fn inv_mod(a: i64, p: PrimeModulus) -> Result<u64> {
    inv_mod_u64(reduce_signed(a, p.get()), p.get()).ok_or(Error::NotInvertible { a, p: p.get() })
}

/// Jacobi symbol `(a/n)` for odd `n`, by the reciprocity chain.
pub fn jacobi(a: u64, n: u64) -> i8 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd modulus");
    let mut a = a % n;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Legendre symbol `(a/p)`: `0` when `p | a`, otherwise `+1` for quadratic
/// residues and `-1` for non-residues.
pub fn legendre(a: i64, p: PrimeModulus) -> i8 {
    jacobi(reduce_signed(a, p.get()), p.get())
}

pub fn legendre_big(a: &BigInt, p: PrimeModulus) -> i8 {
    jacobi(reduce_big(a, p.get()), p.get())
}

/// Euler's criterion, `a^((p-1)/2) mod p`, mapped to `{-1, 0, 1}`.
pub fn euler_criterion(a: i64, p: PrimeModulus) -> i8 {
    let p = p.get();
    match pow_mod(reduce_signed(a, p), (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        r if r == p - 1 => -1,
        r => panic!("Euler criterion gave {r} modulo {p}; modulus is not prime"),
    }
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin; the first twelve prime bases are a proven
/// witness set for every 64-bit integer.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n` by trial division, ascending.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn is_primitive_root(g: u64, p: PrimeModulus, factors: &[u64]) -> bool {
    let p = p.get();
    !g.is_multiple_of(p) && factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)
}

/// The smallest positive primitive root modulo `p`.
pub fn primitive_root(p: PrimeModulus) -> u64 {
    let factors = distinct_prime_factors(p.get() - 1);
    (2..p.get()).find(|&g| is_primitive_root(g, p, &factors)).expect("a prime modulus always has a primitive root")
}

/// All primitive roots modulo `p`, ascending.
pub fn all_primitive_roots(p: PrimeModulus) -> Vec<u64> {
    let factors = distinct_prime_factors(p.get() - 1);
    (1..p.get()).filter(|&g| is_primitive_root(g, p, &factors)).collect()
}

/// The `k`-th power residues modulo `p` together with the data they are
/// built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSystem {
    p: PrimeModulus,
    k: u64,
    m: u64,
    g: u64,
    alphas: Vec<u64>,
}

impl ResidueSystem {
    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Number of residues, `(p - 1) / k`.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// The canonical (smallest) primitive root.
    pub fn g(&self) -> u64 {
        self.g
    }

    /// The residues `0 < alpha_1 < ... < alpha_m < p`.
    pub fn alphas(&self) -> &[u64] {
        &self.alphas
    }

    pub fn contains(&self, x: u64) -> bool {
        self.alphas.binary_search(&(x % self.p.get())).is_ok()
    }

    /// `-1` is a `k`-th power residue iff `k | (p - 1) / 2`, i.e. iff `m` is even.
    pub fn minus_one_is_residue(&self) -> bool {
        self.m.is_multiple_of(2)
    }
}

/// Enumerates the `k`-th power residues modulo `p` as the powers `g^(k i)`.
pub fn kth_power_residues(p: PrimeModulus, k: u64) -> Result<ResidueSystem> {
    if k < 2 {
        return Err(Error::DegenerateK(k));
    }
    let pm = p.get();
    if !(pm - 1).is_multiple_of(k) {
        return Err(Error::NotADivisor { p: pm, k });
    }
    let m = (pm - 1) / k;
    let g = primitive_root(p);
    let step = pow_mod(g, k, pm);
    let mut alphas = Vec::with_capacity(m as usize);
    let mut x = 1u64;
    for _ in 0..m {
        alphas.push(x);
        x = mul_mod(x, step, pm);
    }
    alphas.sort_unstable();
    Ok(ResidueSystem { p, k, m, g, alphas })
}

/// Returns `r >= 0` with `r^2 = n` when `n` is a perfect square.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    // Squares are 0, 1, 4 or 9 modulo 16.
    let low = n.iter_u32_digits().next().unwrap_or(0) & 15;
    if !matches!(low, 0 | 1 | 4 | 9) {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Square root of `a` modulo the prime `p` (Tonelli-Shanks), if one exists.
pub fn sqrt_mod(a: u64, p: PrimeModulus) -> Option<u64> {
    let pm = p.get();
    let a = a % pm;
    if a == 0 {
        return Some(0);
    }
    if jacobi(a, pm) != 1 {
        return None;
    }
    if pm % 4 == 3 {
        return Some(pow_mod(a, (pm + 1) / 4, pm));
    }
    let s = (pm - 1).trailing_zeros();
    let q = (pm - 1) >> s;
    let z = (2..pm).find(|&z| jacobi(z, pm) == -1).expect("non-residue exists");
    let mut m = s;
    let mut c = pow_mod(z, q, pm);
    let mut t = pow_mod(a, q, pm);
    let mut r = pow_mod(a, q.div_ceil(2), pm);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, pm);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), pm);
        m = i;
        c = mul_mod(b, b, pm);
        t = mul_mod(t, c, pm);
        r = mul_mod(r, b, pm);
    }
    Some(r)
}

/// Cornacchia's algorithm: nonnegative `(x, y)` with `x^2 + d y^2 = p`, or
/// `None` when no representation exists.
pub fn two_square_decompose(p: PrimeModulus, d: u64) -> Option<(u64, u64)> {
    assert!(d >= 1, "D must be positive");
    let pm = p.get();
    if d.is_multiple_of(pm) {
        // x^2 + D y^2 = p with p | D forces x = 0 and D = p.
        return (d == pm).then_some((0, 1));
    }
    let minus_d = (pm - d % pm) % pm;
    let mut r0 = sqrt_mod(minus_d, p)?;
    if 2 * r0 < pm {
        r0 = pm - r0;
    }
    let bound = pm.sqrt();
    let (mut a, mut b) = (pm, r0);
    while b > bound {
        (a, b) = (b, a % b);
    }
    let rest = pm - b * b;
    if !rest.is_multiple_of(d) {
        return None;
    }
    let c = (rest / d).sqrt();
    (c * c == rest / d).then_some((b, c))
}

/// For `p = a^2 + 4 b^2`, the sign-normalized `a` with `a = 1 (mod 4)`.
/// `None` when `p = 3 (mod 4)`.
pub fn normalized_a(p: PrimeModulus) -> Option<i64> {
    let (x, _) = two_square_decompose(p, 4)?;
    let x = x as i64;
    Some(if x % 4 == 1 { x } else { -x })
}
