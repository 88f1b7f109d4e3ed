use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use proptest::prelude::*;
use residue_det::circulant::{circulant, factor_symmetric, CirculantSpec};
use residue_det::curves::{char_sum, CurveFamily};
use residue_det::matrices::build_w;
use residue_det::matrix::{char_poly, det_bareiss, det_crt, det_exact, det_mod, BigMatrix};
use residue_det::modular::{
    all_primitive_roots, is_perfect_square, is_prime, kth_power_residues, legendre, reduce_big, PrimeModulus,
};

const SMALL_PRIMES: [u64; 12] = [3, 5, 7, 11, 13, 17, 19, 23, 101, 257, 65537, 1_000_000_007];

fn prime() -> impl Strategy<Value = PrimeModulus> {
    prop::sample::select(SMALL_PRIMES.to_vec()).prop_map(|p| PrimeModulus::new(p).unwrap())
}

fn matrix(max_n: usize, bound: i64) -> impl Strategy<Value = BigMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(-bound..=bound, n * n)
            .prop_map(move |e| BigMatrix::from_fn(n, |i, j| e[i * n + j].into()))
    })
}

fn sign_matrix(max_n: usize) -> impl Strategy<Value = BigMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::bool::ANY, n * n)
            .prop_map(move |e| BigMatrix::from_fn(n, |i, j| if e[i * n + j] { 1 } else { -1 }.into()))
    })
}

/// Floor square root by bisection, independent of the library routine.
fn floor_sqrt(n: &BigUint) -> BigUint {
    let (mut lo, mut hi) = (BigUint::zero(), BigUint::one() << (n.bits() / 2 + 1));
    while &lo + 1u32 < hi {
        let mid = (&lo + &hi) >> 1;
        if &mid * &mid <= *n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn palindrome() -> impl Strategy<Value = Vec<i64>> {
    (1..=12usize).prop_flat_map(|n| {
        prop::collection::vec(-9i64..=9, n / 2 + 1).prop_map(move |half| (0..n).map(|i| half[i.min(n - i)]).collect())
    })
}

proptest! {
    #[test]
    fn legendre_is_multiplicative(p in prime(), a in any::<i64>(), b in any::<i64>()) {
        let q = p.get() as i128;
        let ab = ((a as i128).rem_euclid(q) * (b as i128).rem_euclid(q) % q) as i64;
        prop_assert_eq!(legendre(ab, p), legendre(a, p) * legendre(b, p));
    }

    #[test]
    fn perfect_square_matches_bisection(words in prop::collection::vec(any::<u32>(), 1..=8), offset in 0u32..3) {
        let base = BigUint::new(words);
        for n in [base.clone(), &base * &base + offset] {
            let root = floor_sqrt(&n);
            let expected = (&root * &root == n).then(|| BigInt::from(root));
            let n = BigInt::from_biguint(Sign::Plus, n);
            prop_assert_eq!(is_perfect_square(&n), expected);
            if !n.is_zero() {
                prop_assert_eq!(is_perfect_square(&-n), None);
            }
        }
    }

    #[test]
    fn det_is_multiplicative(a in matrix(6, 20), seed in prop::collection::vec(-20i64..=20, 36)) {
        let n = a.n();
        let b = BigMatrix::from_fn(n, |i, j| seed[i * n + j].into());
        prop_assert_eq!(det_exact(&a.mul(&b)), det_exact(&a) * det_exact(&b));
        prop_assert_eq!(det_exact(&a.transpose()), det_exact(&a));
    }

    #[test]
    fn det_exact_reduces_to_det_mod(m in matrix(12, 1000), p in prime()) {
        prop_assert_eq!(reduce_big(&det_exact(&m), p.get()), det_mod(&m.reduce_mod(p)));
    }

    #[test]
    fn char_poly_constant_term(m in matrix(7, 9)) {
        let sign = if m.n() % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        prop_assert_eq!(char_poly(&m).coeff(0), sign * det_exact(&m));
        prop_assert_eq!(char_poly(&m).coeff(m.n() - 1), -m.trace());
    }

    #[test]
    fn palindromic_circulants_factor(t in palindrome()) {
        let spec = CirculantSpec::from_i64s(&t).unwrap();
        let f = factor_symmetric(&spec).unwrap();
        prop_assert_eq!(f.reconstruct(), f.det.clone());
        prop_assert_eq!(f.det, det_bareiss(&circulant(&spec)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bareiss_agrees_with_crt(m in sign_matrix(60)) {
        prop_assert_eq!(det_bareiss(&m), det_crt(&m));
    }
}

#[test]
fn w_is_symmetric_with_det_congruent_mod_p() {
    for p in (3..200u64).filter(|&p| is_prime(p)) {
        let p = PrimeModulus::new(p).unwrap();
        for k in residue_det::modular::divisors(p.get() - 1).into_iter().filter(|&k| k >= 2) {
            let w = build_w(&kth_power_residues(p, k).unwrap());
            assert!(w.is_symmetric());
            assert_eq!(reduce_big(&det_bareiss(&w.to_big()), p.get()), det_mod(&w.reduce_mod(p)));
        }
    }
}

/// `c` and `d` depend on the primitive root, but `c^2 + d^2` must not.
#[test]
fn c2_plus_d2_is_independent_of_primitive_root() {
    for p in (3..=200u64).filter(|&p| is_prime(p)) {
        let p = PrimeModulus::new(p).unwrap();
        for k in residue_det::modular::divisors(p.get() - 1).into_iter().filter(|&k| k >= 3 && k % 2 == 1) {
            let c = -char_sum(&CurveFamily::C.poly(k, 0, p), p);
            let norms: Vec<i64> = all_primitive_roots(p)
                .into_iter()
                .map(|g| {
                    let d = -char_sum(&CurveFamily::D.poly(k, g, p), p);
                    c * c + d * d
                })
                .collect();
            assert!(norms.windows(2).all(|w| w[0] == w[1]), "p = {p}, k = {k}: {norms:?}");
        }
    }
}
