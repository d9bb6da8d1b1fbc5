//! Dense univariate polynomials over an exact coefficient ring.
//!
//! Coefficients are stored in ascending degree order; the vector is empty for
//! the zero polynomial and otherwise ends in a nonzero coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rat::Rat;

/// Commutative ring with exact arithmetic.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Integral domain in which divisions known to be exact can be carried out.
pub trait ExactDiv: Ring {
    fn exact_div(&self, divisor: &Self) -> Self;
}

impl ExactDiv for BigInt {
    fn exact_div(&self, divisor: &Self) -> Self {
        debug_assert!((self % divisor).is_zero(), "inexact integer division");
        self / divisor
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type IntPolynomial = Poly<BigInt>;
pub type RatPoly = Poly<Rat>;

impl<T: Ring> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Poly {
            coeffs: vec![T::zero(), T::one()],
        }
    }

    pub fn monomial(c: T, deg: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); deg + 1];
        coeffs[deg] = c;
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn mul_xn(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn map<U: Ring, F: Fn(&T) -> U>(&self, f: F) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// `p(q(x))`.
    pub fn compose(&self, q: &Self) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            acc * q.clone() + Self::constant(c.clone())
        })
    }

    pub fn pow(&self, e: usize) -> Self {
        num_traits::pow(self.clone(), e)
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        assert!(!b.is_zero(), "pseudo-remainder by zero");
        let db = b.deg();
        if self.is_zero() || self.deg() < db {
            return self.clone();
        }
        let lb = b.lc();
        let mut r = self.clone();
        let mut e = self.deg() - db + 1;
        while !r.is_zero() && r.deg() >= db {
            let shift = r.deg() - db;
            let lr = r.lc();
            r = r.scale(&lb) - b.scale(&lr).mul_xn(shift);
            e -= 1;
        }
        if e > 0 {
            r = r.scale(&num_traits::pow(lb, e));
        }
        r
    }
}

impl<T: Ring> Zero for Poly<T> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Ring> One for Poly<T> {
    fn one() -> Self {
        Poly {
            coeffs: vec![T::one()],
        }
    }
}

impl<T: Ring> Add for Poly<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<T: Ring> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: Self) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Ring> Sub for Poly<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl<T: Ring> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: Self) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Ring> Mul for Poly<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<T: Ring> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: Self) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Ring> Neg for Poly<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<T: ExactDiv> ExactDiv for Poly<T> {
    fn exact_div(&self, divisor: &Self) -> Self {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Self::zero();
        }
        let db = divisor.deg();
        let lb = divisor.lc();
        let mut r = self.clone();
        let mut q = vec![T::zero(); self.deg().saturating_sub(db) + 1];
        while !r.is_zero() && r.deg() >= db {
            let shift = r.deg() - db;
            let c = r.lc().exact_div(&lb);
            r = &r - &divisor.scale(&c).mul_xn(shift);
            q[shift] = c;
        }
        debug_assert!(r.is_zero(), "inexact polynomial division");
        Poly::new(q)
    }
}

impl IntPolynomial {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.lc().is_negative() {
            c = -c;
        }
        Poly::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    /// Naive height: largest absolute value of a coefficient.
    pub fn height(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn to_rat(&self) -> RatPoly {
        self.map(|c| Rat::from_integer(c.clone()))
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        self.to_rat().eval(x)
    }

    /// Sign of `p(n/d)`, computed in integers from the homogenized form.
    pub fn sign_at(&self, x: &Rat) -> i32 {
        let n = x.numer();
        let d = x.denom();
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        // sum c_i n^i d^(deg-i), Horner in n with running powers of d
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c * &dpow;
            dpow *= d;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let g = self.to_rat().gcd(&other.to_rat());
        g.to_primitive_int()
    }

    pub fn is_squarefree(&self) -> bool {
        self.deg() == 0 || self.gcd(&self.derivative()).deg() == 0
    }

    /// Exact quotient over the integers, or `None` if `d` does not divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero());
        let db = d.deg();
        let lb = d.lc();
        let mut r = self.clone();
        let mut q = vec![BigInt::zero(); self.deg().saturating_sub(db) + 1];
        while !r.is_zero() && r.deg() >= db {
            let (c, rem) = r.lc().div_rem(&lb);
            if !rem.is_zero() {
                return None;
            }
            let shift = r.deg() - db;
            r = &r - &d.scale(&c).mul_xn(shift);
            q[shift] = c;
        }
        r.is_zero().then(|| Poly::new(q))
    }

    /// Yun's squarefree decomposition of a primitive polynomial:
    /// `f = prod a_i^i` with each `a_i` squarefree and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let f = self.to_rat();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            a = b.gcd(&d);
            if a.deg() > 0 {
                out.push((a.to_primitive_int(), i));
            }
            b = b.div_rem(&a).0;
            if b.deg() == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// `p(x + s)`.
    pub fn shift(&self, s: &BigInt) -> Self {
        self.compose(&Poly::new(vec![s.clone(), BigInt::one()]))
    }
}

impl RatPoly {
    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.lc();
        Poly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn div_rem(&self, b: &Self) -> (Self, Self) {
        assert!(!b.is_zero(), "division by zero polynomial");
        if self.is_zero() || self.deg() < b.deg() {
            return (Self::zero(), self.clone());
        }
        let db = b.deg();
        let lb = b.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rat::zero(); self.deg() - db + 1];
        for shift in (0..=self.deg() - db).rev() {
            let c = &r[shift + db] / &lb;
            if c.is_zero() {
                continue;
            }
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[shift + i] -= &c * bc;
            }
            q[shift] = c;
        }
        r.truncate(db);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, b: &Self) -> Self {
        self.div_rem(b).1
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = Poly::constant(r0.lc().recip());
        (&r0 * &l, &s0 * &l, &t0 * &l)
    }

    /// Clears denominators and returns the primitive integer multiple with
    /// positive leading coefficient.
    pub fn to_primitive_int(&self) -> IntPolynomial {
        let den = crate::rat::lcm_denominators(self.coeffs.iter());
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
            .collect();
        Poly::new(ints).primitive_part()
    }
}

fn fmt_terms<T, F>(coeffs: &[T], f: &mut fmt::Formatter<'_>, var: &str, show: F) -> fmt::Result
where
    F: Fn(&T) -> (bool, String, bool),
{
    // show(c) -> (negative, |c| as string, |c| == 1)
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        let (neg, mag, unit) = show(c);
        if mag == "0" {
            continue;
        }
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let body = match i {
            0 => mag,
            1 if unit => var.to_string(),
            1 => format!("{mag}*{var}"),
            _ if unit => format!("{var}^{i}"),
            _ => format!("{mag}*{var}^{i}"),
        };
        write!(f, "{body}")?;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(&self.coeffs, f, "x", |c| {
            (c.is_negative(), c.abs().to_string(), c.abs().is_one())
        })
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(&self.coeffs, f, "x", |c| {
            (
                c.is_negative(),
                crate::rat::fmt_rat(&c.abs()),
                c.abs().is_one(),
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn arithmetic_and_trim() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(&a * &b, p(&[-1, 0, 1]));
        assert_eq!(&a - &a, IntPolynomial::zero());
        assert_eq!(p(&[3, 0, 0]).degree(), Some(0));
        assert_eq!(p(&[]).degree(), None);
    }

    #[test]
    fn pseudo_remainder_matches_rational_remainder() {
        let a = p(&[1, 2, 3, 4]);
        let b = p(&[5, 0, 2]);
        let pr = a.pseudo_rem(&b).to_rat();
        let r = a.to_rat().rem(&b.to_rat());
        // prem = lc(b)^2 * rem
        assert_eq!(pr, r.scale(&int(4)));
    }

    #[test]
    fn gcd_and_squarefree() {
        let f = &p(&[-1, 1]).pow(2) * &p(&[2, 0, 1]);
        assert_eq!(f.gcd(&f.derivative()), p(&[-1, 1]));
        assert!(!f.is_squarefree());
        let sq = f.squarefree_decomposition();
        assert_eq!(sq, vec![(p(&[2, 0, 1]), 1), (p(&[-1, 1]), 2)]);
    }

    #[test]
    fn sign_at_rational() {
        let f = p(&[-2, 0, 1]);
        assert_eq!(f.sign_at(&rat(3, 2)), 1);
        assert_eq!(f.sign_at(&rat(7, 5)), -1);
        assert_eq!(p(&[-3, 2]).sign_at(&rat(3, 2)), 0);
    }

    #[test]
    fn ext_gcd_bezout() {
        let a = p(&[-2, 0, 1]).to_rat();
        let b = p(&[1, 1]).to_rat();
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g, RatPoly::one());
        assert_eq!(&(&s * &a) + &(&t * &b), g);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, 0, -10, 0, 1]).to_string(), "x^4 - 10*x^2 + 1");
        assert_eq!(p(&[0, -1]).to_string(), "-x");
    }
}
