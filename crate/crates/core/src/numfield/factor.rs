//! Factorization of integer polynomials over the rationals.
//!
//! Squarefree decomposition, factorization modulo a small prime, Hensel
//! lifting along a binary factor tree, and recombination of lifted factors
//! by trial division.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fp::{self, Fp, FpPoly};
use super::poly::IntPolynomial;

const PRIME_TRIALS: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// Signed content of the input.
    pub unit: BigInt,
    /// Primitive irreducible factors with positive leading coefficient and
    /// their multiplicities, sorted by degree then coefficients.
    pub factors: Vec<(IntPolynomial, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> IntPolynomial {
        self.factors
            .iter()
            .fold(IntPolynomial::constant(self.unit.clone()), |acc, (f, e)| {
                &acc * &f.pow(*e)
            })
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

pub fn factor_rational(f: &IntPolynomial) -> Factorization {
    assert!(!f.is_zero(), "factoring the zero polynomial");
    let mut unit = f.content();
    if f.lc().is_negative() {
        unit = -unit;
    }
    let prim = f.primitive_part();
    let mut factors = Vec::new();
    for (a, mult) in prim.squarefree_decomposition() {
        for g in factor_squarefree(&a) {
            factors.push((g, mult));
        }
    }
    factors.sort_by(|(a, _), (b, _)| poly_order(a, b));
    Factorization { unit, factors }
}

/// Distinct irreducible factors of the squarefree part, sorted.
pub fn irreducible_factors(f: &IntPolynomial) -> Vec<IntPolynomial> {
    factor_rational(f)
        .factors
        .into_iter()
        .map(|(g, _)| g)
        .collect()
}

pub fn is_irreducible(f: &IntPolynomial) -> bool {
    f.deg() >= 1 && factor_rational(f).is_irreducible()
}

fn poly_order(a: &IntPolynomial, b: &IntPolynomial) -> std::cmp::Ordering {
    a.deg()
        .cmp(&b.deg())
        .then_with(|| a.coeffs().iter().rev().cmp(b.coeffs().iter().rev()))
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&n| {
        let mut d = 3;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 2;
        }
        true
    })
}

/// Irreducible factors of a primitive squarefree polynomial.
fn factor_squarefree(f: &IntPolynomial) -> Vec<IntPolynomial> {
    let f = f.primitive_part();
    let n = f.deg();
    if n <= 1 {
        return vec![f];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    let lc = f.lc();
    let mut best: Option<(Fp, Vec<FpPoly>)> = None;
    let mut tried = 0;
    for p in small_primes() {
        let fp = Fp::new(p);
        if fp.reduce_int(&lc) == 0 {
            continue;
        }
        let fbar = fp.from_int(&f);
        if !fp.is_squarefree(&fbar) {
            continue;
        }
        let facs = fp.factor_squarefree(&fbar, &mut rng);
        if facs.len() == 1 {
            return vec![f];
        }
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((fp, facs));
        }
        tried += 1;
        if tried >= PRIME_TRIALS {
            break;
        }
    }
    let (fp, facs) = best.expect("no usable prime");
    let p = BigInt::from(fp.p);

    // lifted factors determine coefficients up to 2 |lc| 2^n ||f||_2
    let norm2 = f
        .coeffs()
        .iter()
        .map(|c| c * c)
        .fold(BigInt::zero(), |a, b| a + b)
        .sqrt()
        + 1;
    let bound = BigInt::from(2) * lc.abs() * (BigInt::one() << n) * norm2;
    let mut e = 1u32;
    let mut pe = p.clone();
    while pe <= bound {
        pe *= &p;
        e += 1;
    }
    let lifted = hensel_lift_all(&fp, &f, &facs, e);
    recombine(&f, lifted, &pe)
}

fn centered(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn reduce_poly(f: &IntPolynomial, m: &BigInt) -> IntPolynomial {
    IntPolynomial::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let ext = a.mod_floor(m).extended_gcd(m);
    assert!(ext.gcd.is_one(), "not invertible");
    ext.x.mod_floor(m)
}

/// Lifts `f = lc * prod(facs) mod p` to monic factors modulo `p^e`.
fn hensel_lift_all(fp: &Fp, f: &IntPolynomial, facs: &[FpPoly], e: u32) -> Vec<IntPolynomial> {
    let p = BigInt::from(fp.p);
    let pe = p.pow(e);
    if facs.len() == 1 {
        let inv = mod_inverse(&f.lc(), &pe);
        return vec![reduce_poly(&f.scale(&inv), &pe)];
    }
    let (left, right) = facs.split_at(facs.len() / 2);
    let lcp = fp.reduce_int(&f.lc());
    let g0 = left.iter().fold(vec![lcp], |acc, g| fp.mul(&acc, g));
    let h0 = right.iter().fold(vec![1u64], |acc, g| fp.mul(&acc, g));
    let (g, h) = hensel_lift_pair(fp, f, &g0, &h0, e);
    let mut out = hensel_lift_all(fp, &g, left, e);
    out.extend(hensel_lift_all(fp, &h, right, e));
    out
}

/// Given `f = g0 h0 mod p` with `h0` monic and coprime to `g0`, returns
/// `(g, h)` with `f = g h mod p^e`, `h` monic, lifting one power at a time.
fn hensel_lift_pair(
    fp: &Fp,
    f: &IntPolynomial,
    g0: &[u64],
    h0: &[u64],
    e: u32,
) -> (IntPolynomial, IntPolynomial) {
    let p = BigInt::from(fp.p);
    let (one, s, t) = fp.ext_gcd(g0, h0);
    assert_eq!(one, vec![1u64], "factors not coprime modulo p");
    let mut g = fp::to_int(g0);
    let mut h = fp::to_int(h0);
    let mut m = p.clone();
    for _ in 1..e {
        let diff = f - &(&g * &h);
        let err: IntPolynomial = IntPolynomial::new(
            diff.coeffs()
                .iter()
                .map(|c| {
                    debug_assert!((c % &m).is_zero());
                    c / &m
                })
                .collect(),
        );
        let err = fp.from_int(&err);
        // err = (err s mod h) g + (q g + err t) h
        let (q, r) = fp.div_rem(&fp.mul(&err, &s), h0);
        let dh = r;
        let dg = fp.add(&fp.mul(&q, g0), &fp.mul(&err, &t));
        g = &g + &fp::to_int(&dg).scale(&m);
        h = &h + &fp::to_int(&dh).scale(&m);
        m *= &p;
    }
    (reduce_poly(&g, &m), reduce_poly(&h, &m))
}

fn recombine(f: &IntPolynomial, lifted: Vec<IntPolynomial>, pe: &BigInt) -> Vec<IntPolynomial> {
    let mut remaining = lifted;
    let mut f = f.clone();
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut hit = None;
        let r = remaining.len();
        for subset in subsets(r, size) {
            let lc = f.lc();
            let prod = subset
                .iter()
                .fold(IntPolynomial::constant(lc.clone()), |acc, &i| {
                    reduce_poly(&(&acc * &remaining[i]), pe)
                });
            let cand = IntPolynomial::new(prod.coeffs().iter().map(|c| centered(c, pe)).collect())
                .primitive_part();
            if cand.deg() == 0 {
                continue;
            }
            let (c0, f0) = (cand.coeff(0), f.coeff(0));
            if !c0.is_zero() && !(f0 % c0).is_zero() {
                continue;
            }
            if let Some(q) = f.div_exact(&cand) {
                hit = Some((subset, cand, q));
                break;
            }
        }
        match hit {
            Some((subset, cand, q)) => {
                found.push(cand);
                f = q.primitive_part();
                remaining = remaining
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, g)| g)
                    .collect();
            }
            None => size += 1,
        }
    }
    if f.deg() > 0 {
        found.push(f);
    }
    found
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn irreducible_quadratic() {
        let fz = factor_rational(&p(&[-2, 0, 1]));
        assert_eq!(fz.factors, vec![(p(&[-2, 0, 1]), 1)]);
        assert!(fz.is_irreducible());
    }

    #[test]
    fn biquadratic_splits() {
        let fz = factor_rational(&p(&[6, 0, -5, 0, 1]));
        assert_eq!(fz.factors, vec![(p(&[-3, 0, 1]), 1), (p(&[-2, 0, 1]), 1)]);
        assert_eq!(fz.expand(), p(&[6, 0, -5, 0, 1]));
    }

    #[test]
    fn repeated_linear() {
        let fz = factor_rational(&p(&[1, -2, 1]));
        assert_eq!(fz.factors, vec![(p(&[-1, 1]), 2)]);
    }

    #[test]
    fn swinnerton_dyer_quartic_is_irreducible() {
        // splits into linear or quadratic factors modulo every prime
        assert!(is_irreducible(&p(&[1, 0, -10, 0, 1])));
    }

    #[test]
    fn unit_and_content() {
        let fz = factor_rational(&p(&[4, 0, -2]));
        assert_eq!(fz.unit, BigInt::from(-2));
        assert_eq!(fz.factors, vec![(p(&[-2, 0, 1]), 1)]);
    }

    #[test]
    fn non_monic_factors() {
        let f = &(&p(&[1, 3]) * &p(&[-5, 0, 2])) * &p(&[7, 1, 0, 4]);
        let fz = factor_rational(&f);
        assert_eq!(fz.factors.len(), 3);
        assert_eq!(fz.expand(), f);
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(3, 1), vec![vec![0], vec![1], vec![2]]);
    }

    fn irreducible_pool() -> Vec<IntPolynomial> {
        vec![
            p(&[-1, 1]),
            p(&[2, 1]),
            p(&[1, 3]),
            p(&[-2, 0, 1]),
            p(&[1, 0, 1]),
            p(&[1, 1, 1]),
            p(&[-3, 0, 5]),
            p(&[-2, 0, 0, 1]),
            p(&[1, 1, 0, 1]),
            p(&[1, 0, -10, 0, 1]),
            p(&[-1, -1, 0, 0, 1]),
            p(&[2, 0, 0, 0, 1]),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn factorization_round_trip(picks in prop::collection::vec((0usize..12, 1usize..3), 1..4),
                                    unit in prop::sample::select(vec![-3i64, -1, 1, 2, 6])) {
            let pool = irreducible_pool();
            let f = picks.iter().fold(p(&[unit]), |acc, &(i, e)| &acc * &pool[i].pow(e));
            let fz = factor_rational(&f);
            prop_assert_eq!(fz.expand(), f);
            for (g, _) in &fz.factors {
                prop_assert!(g.lc().is_positive());
                prop_assert!(g.content().is_one());
                prop_assert!(pool.contains(g));
            }
        }
    }
}
