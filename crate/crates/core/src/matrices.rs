//! Builders for the Legendre-symbol and reciprocal matrices attached to a
//! prime: `W_p(k)`, `I_p(k)`, `S(d, p)`, `A_p`, `B_p` and the `mu`-shifted
//! Legendre matrix of Carlitz.
//!
//! Row and column `i` correspond to the `i`-th residue in ascending order.
//! Reciprocal matrices live over `F_p` directly.

use num_bigint::BigInt;

use crate::circulant::CirculantSpec;
use crate::error::{Error, Result};
use crate::matrix::{det_exact_with, BigMatrix, DetConfig, ModMatrix};
use crate::modular::{inv_mod_u64, legendre, mul_mod, pow_mod, PrimeModulus, ResidueSystem};

/// Square matrix with entries in `{-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> i8) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let e = f(i, j);
                assert!((-1..=1).contains(&e), "sign matrix entry {e} out of range");
                entries.push(e);
            }
        }
        SignMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i8>> {
        self.entries.chunks(self.n).map(<[i8]>::to_vec).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn contains_zero(&self) -> bool {
        self.entries.contains(&0)
    }

    pub fn to_big(&self) -> BigMatrix {
        BigMatrix::from_fn(self.n, |i, j| BigInt::from(self.get(i, j)))
    }

    pub fn reduce_mod(&self, p: PrimeModulus) -> ModMatrix {
        let q = p.get();
        ModMatrix::from_fn(self.n, p, |i, j| match self.get(i, j) {
            -1 => q - 1,
            e => e as u64,
        })
    }

    pub fn det(&self, cfg: &DetConfig) -> BigInt {
        det_exact_with(&self.to_big(), cfg)
    }
}

/// `W_p(k) = [((alpha_i + alpha_j)/p)]`.
pub fn build_w(rs: &ResidueSystem) -> SignMatrix {
    let a = rs.alphas();
    let p = rs.p();
    SignMatrix::from_fn(a.len(), |i, j| legendre((a[i] + a[j]) as i64, p))
}

/// `I_p(k) = [1/(alpha_i + alpha_j)]` over `F_p`.
///
/// Fails with [`Error::ZeroDenominator`] when `-1` is a `k`-th power residue.
pub fn build_i(rs: &ResidueSystem) -> Result<ModMatrix> {
    let p = rs.p();
    let q = p.get();
    if rs.minus_one_is_residue() {
        return Err(Error::ZeroDenominator {
            p: q,
            what: format!("alpha_i + alpha_j (-1 is a {}-th power residue)", rs.k()),
        });
    }
    let a = rs.alphas();
    Ok(ModMatrix::from_fn(a.len(), p, |i, j| {
        inv_mod_u64((a[i] + a[j]) % q, q).expect("denominators are nonzero once -1 is excluded")
    }))
}

/// `[((i^2 + d j^2)/p)]` for `1 <= i, j <= (p - 1)/2`.
pub fn build_s(d: i64, p: PrimeModulus) -> Result<SignMatrix> {
    if d.rem_euclid(p.get() as i64) == 0 {
        return Err(Error::ModulusDividesD { p: p.get(), d });
    }
    let n = ((p.get() - 1) / 2) as usize;
    Ok(SignMatrix::from_fn(n, |i, j| {
        let (i, j) = (i as i128 + 1, j as i128 + 1);
        let v = (i * i + d as i128 * j * j).rem_euclid(p.get() as i128);
        legendre(v as i64, p)
    }))
}

fn reciprocal_matrix(n: usize, p: PrimeModulus, label: &str, denom: impl Fn(u64, u64) -> u64) -> Result<ModMatrix> {
    let q = p.get();
    let mut rows = Vec::with_capacity(n);
    for i in 1..=n as u64 {
        let mut row = Vec::with_capacity(n);
        for j in 1..=n as u64 {
            let v = denom(i, j) % q;
            let inv = inv_mod_u64(v, q)
                .ok_or_else(|| Error::ZeroDenominator { p: q, what: format!("{label} at (i, j) = ({i}, {j})") })?;
            row.push(inv);
        }
        rows.push(row);
    }
    ModMatrix::from_rows(&rows, p)
}

/// `[1/(i^2 + j^2)]` for `1 <= i, j <= (p - 1)/2`, over `F_p`.
pub fn build_a(p: PrimeModulus) -> Result<ModMatrix> {
    let q = p.get();
    reciprocal_matrix(((q - 1) / 2) as usize, p, "i^2 + j^2", |i, j| (mul_mod(i, i, q) + mul_mod(j, j, q)) % q)
}

/// `[1/(i^2 - i j + j^2)]` for `1 <= i, j <= p - 1`, over `F_p`.
pub fn build_b(p: PrimeModulus) -> Result<ModMatrix> {
    let q = p.get();
    reciprocal_matrix((q - 1) as usize, p, "i^2 - ij + j^2", |i, j| {
        (mul_mod(i, i, q) + mul_mod(j, j, q) + q - mul_mod(i, j, q)) % q
    })
}

/// `[mu + ((i - j)/p)]` for `1 <= i, j <= p - 1`.
pub fn build_carlitz(p: PrimeModulus, mu: i64) -> BigMatrix {
    BigMatrix::from_fn((p.get() - 1) as usize, |i, j| BigInt::from(mu) + legendre(i as i64 - j as i64, p))
}

/// `(e_0, ..., e_{m-1})` with `e_i = ((1 + g^{k i})/p)`.
///
/// For even `k`, `W_p(k)` is this circulant with rows and columns permuted
/// simultaneously (see [`w_circulant_order`]).
pub fn w_circulant_tuple(rs: &ResidueSystem) -> CirculantSpec {
    let (p, q) = (rs.p(), rs.p().get());
    let step = pow_mod(rs.g(), rs.k(), q);
    let mut x = 1u64;
    let mut tuple = Vec::with_capacity(rs.m() as usize);
    for _ in 0..rs.m() {
        tuple.push(BigInt::from(legendre((1 + x) as i64, p)));
        x = mul_mod(x, step, q);
    }
    CirculantSpec::new(tuple).expect("m >= 1")
}

/// Position of `g^{k i}` in the sorted residue list, for each `i`.
pub fn w_circulant_order(rs: &ResidueSystem) -> Vec<usize> {
    let q = rs.p().get();
    let step = pow_mod(rs.g(), rs.k(), q);
    let mut x = 1u64;
    (0..rs.m())
        .map(|_| {
            let pos = rs.alphas().binary_search(&x).expect("g^k generates the residues");
            x = mul_mod(x, step, q);
            pos
        })
        .collect()
}

/// `(s_0, ..., s_{n-1})` with `s_i = ((g^{2i} + 1)/p)`, `n = (p - 1)/2`.
pub fn s_circulant_tuple(p: PrimeModulus, g: u64) -> CirculantSpec {
    let q = p.get();
    let g2 = mul_mod(g, g, q);
    let mut x = 1u64;
    let tuple = (0..(q - 1) / 2)
        .map(|_| {
            let s = BigInt::from(legendre((x + 1) as i64, p));
            x = mul_mod(x, g2, q);
            s
        })
        .collect();
    CirculantSpec::new(tuple).expect("p >= 3")
}
