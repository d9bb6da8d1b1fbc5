//! Integer factorization by trial division and Pollard's rho.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin with the first twelve prime bases; deterministic below
/// 3.3e24 and overwhelmingly reliable beyond.
pub fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    for &w in &WITNESSES {
        let w = BigInt::from(w);
        if *n == w {
            return true;
        }
        if (n % &w).is_zero() {
            return false;
        }
    }
    let nm1: BigInt = n - 1;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &w in &WITNESSES {
        let mut x = BigInt::from(w).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigInt) -> BigInt {
    if n.is_even() {
        return BigInt::from(2);
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut x, mut y, mut d) = (BigInt::from(2), BigInt::from(2), BigInt::one());
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of `|n|` as sorted `(prime, exponent)` pairs.
pub fn factor_integer(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut primes: Vec<BigInt> = Vec::new();
    if n.is_zero() {
        return Vec::new();
    }
    let mut p = 2u64;
    while p < 10_000 && BigInt::from(p * p) <= n {
        let bp = BigInt::from(p);
        while (&n % &bp).is_zero() {
            primes.push(bp.clone());
            n /= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if m.to_u64().is_some_and(|v| v < 100_000_000) || is_probable_prime(&m) {
            primes.push(m);
            continue;
        }
        let d = pollard_rho(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    primes.sort();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    let mut n = n.abs();
    let mut v = 0;
    if n.is_zero() {
        return 0;
    }
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn small_factorizations() {
        assert_eq!(factor_integer(&b(1)), vec![]);
        assert_eq!(
            factor_integer(&b(360)),
            vec![(b(2), 3), (b(3), 2), (b(5), 1)]
        );
        assert_eq!(factor_integer(&b(97)), vec![(b(97), 1)]);
    }

    #[test]
    fn large_semiprime() {
        let p = b(1_000_000_007);
        let q = b(998_244_353);
        let f = factor_integer(&(&p * &q * &q));
        assert_eq!(f, vec![(q, 2), (p, 1)]);
    }

    #[test]
    fn primality() {
        assert!(is_probable_prime(&b(2_305_843_009_213_693_951)));
        assert!(!is_probable_prime(&b(3_215_031_751)));
        assert_eq!(valuation(&b(48), &b(2)), 4);
    }
}
