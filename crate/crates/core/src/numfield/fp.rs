//! Polynomials over a prime field `Z/pZ` with a word-sized odd prime.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use super::poly::IntPolynomial;

/// Ascending coefficients in `[0, p)`, trimmed.
pub type FpPoly = Vec<u64>;

#[derive(Clone, Copy, Debug)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 32));
        Fp { p }
    }

    pub fn mulm(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn addm(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn subm(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn powm(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mulm(r, a);
            }
            a = self.mulm(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero");
        self.powm(a, self.p - 2)
    }

    pub fn reduce_int(&self, c: &BigInt) -> u64 {
        c.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }

    pub fn from_int(&self, f: &IntPolynomial) -> FpPoly {
        let mut out: FpPoly = f.coeffs().iter().map(|c| self.reduce_int(c)).collect();
        trim(&mut out);
        out
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> FpPoly {
        let n = a.len().max(b.len());
        let mut out: FpPoly = (0..n)
            .map(|i| self.addm(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(&mut out);
        out
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> FpPoly {
        let n = a.len().max(b.len());
        let mut out: FpPoly = (0..n)
            .map(|i| self.subm(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(&mut out);
        out
    }

    pub fn scale(&self, a: &[u64], s: u64) -> FpPoly {
        let mut out: FpPoly = a.iter().map(|&c| self.mulm(c, s)).collect();
        trim(&mut out);
        out
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> FpPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % self.p;
            }
        }
        trim(&mut out);
        out
    }

    pub fn div_rem(&self, a: &[u64], b: &[u64]) -> (FpPoly, FpPoly) {
        assert!(!b.is_empty(), "division by zero polynomial");
        if a.len() < b.len() {
            return (Vec::new(), a.to_vec());
        }
        let db = b.len() - 1;
        let inv = self.inv(b[db]);
        let mut r = a.to_vec();
        let mut q = vec![0u64; a.len() - db];
        for shift in (0..q.len()).rev() {
            let c = self.mulm(r[shift + db], inv);
            if c == 0 {
                continue;
            }
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = self.subm(r[shift + i], self.mulm(c, bc));
            }
            q[shift] = c;
        }
        r.truncate(db);
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    pub fn rem(&self, a: &[u64], b: &[u64]) -> FpPoly {
        self.div_rem(a, b).1
    }

    pub fn monic(&self, a: &[u64]) -> FpPoly {
        match a.last() {
            None => Vec::new(),
            Some(&l) => self.scale(a, self.inv(l)),
        }
    }

    pub fn gcd(&self, a: &[u64], b: &[u64]) -> FpPoly {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Returns `(g, s, t)` with `s*a + t*b = g` and `g` monic.
    pub fn ext_gcd(&self, a: &[u64], b: &[u64]) -> (FpPoly, FpPoly, FpPoly) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        let (mut s0, mut s1) = (vec![1u64], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = self.div_rem(&r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = self.sub(&s0, &self.mul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = self.sub(&t0, &self.mul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = self.inv(*r0.last().expect("gcd of two zero polynomials"));
        (
            self.scale(&r0, inv),
            self.scale(&s0, inv),
            self.scale(&t0, inv),
        )
    }

    pub fn derivative(&self, a: &[u64]) -> FpPoly {
        let mut out: FpPoly = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mulm(c, i as u64 % self.p))
            .collect();
        trim(&mut out);
        out
    }

    pub fn powmod(&self, base: &[u64], e: &BigUint, m: &[u64]) -> FpPoly {
        let mut result = vec![1u64];
        let b = self.rem(base, m);
        for i in (0..e.bits()).rev() {
            result = self.rem(&self.mul(&result, &result), m);
            if e.bit(i) {
                result = self.rem(&self.mul(&result, &b), m);
            }
        }
        self.rem(&result, m)
    }

    pub fn is_squarefree(&self, f: &[u64]) -> bool {
        let g = self.gcd(f, &self.derivative(f));
        g.len() == 1
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    fn ddf(&self, f: &[u64]) -> Vec<(FpPoly, usize)> {
        let mut out = Vec::new();
        let mut f = f.to_vec();
        let x = vec![0u64, 1];
        let p = BigUint::from(self.p);
        let mut h = x.clone();
        let mut i = 0;
        while f.len() > 1 {
            i += 1;
            if 2 * i > f.len() - 1 {
                out.push((f.clone(), f.len() - 1));
                break;
            }
            h = self.powmod(&h, &p, &f);
            let g = self.gcd(&f, &self.sub(&h, &x));
            if g.len() > 1 {
                f = self.div_rem(&f, &g).0;
                h = self.rem(&h, &f);
                out.push((g, i));
            }
        }
        out
    }

    /// Equal-degree splitting of a monic squarefree product of degree-`i`
    /// irreducibles.
    fn edf<R: Rng>(&self, g: &[u64], i: usize, rng: &mut R, out: &mut Vec<FpPoly>) {
        let n = g.len() - 1;
        if n == i {
            out.push(g.to_vec());
            return;
        }
        let e = (BigUint::from(self.p).pow(i as u32) - 1u32) / 2u32;
        loop {
            let mut a: FpPoly = (0..n).map(|_| rng.gen_range(0..self.p)).collect();
            trim(&mut a);
            if a.len() < 2 {
                continue;
            }
            let b = self.sub(&self.powmod(&a, &e, g), &[1]);
            let d = self.gcd(g, &b);
            if d.len() > 1 && d.len() < g.len() {
                let other = self.div_rem(g, &d).0;
                self.edf(&d, i, rng, out);
                self.edf(&other, i, rng, out);
                return;
            }
        }
    }

    /// Monic irreducible factors of a squarefree polynomial, sorted.
    pub fn factor_squarefree<R: Rng>(&self, f: &[u64], rng: &mut R) -> Vec<FpPoly> {
        let f = self.monic(f);
        let mut out = Vec::new();
        for (g, i) in self.ddf(&f) {
            self.edf(&g, i, rng, &mut out);
        }
        out.sort();
        out
    }
}

pub fn trim(v: &mut FpPoly) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub fn to_int(v: &[u64]) -> IntPolynomial {
    IntPolynomial::new(v.iter().map(|&c| BigInt::from(c)).collect())
}

pub fn is_zero(v: &[u64]) -> bool {
    v.iter().all(Zero::is_zero)
}
