//! Arithmetic in a simple extension `Q(a)` given by the minimal polynomial of
//! a real generator.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::algebraic::RealAlgebraic;
use super::poly::{IntPolynomial, RatPoly};
use crate::bounds::Enclosure;
use crate::error::Result;
use crate::rat::{fmt_rat, Rat};

#[derive(Debug, PartialEq, Eq)]
pub struct NumberField {
    generator: RealAlgebraic,
    modulus: RatPoly,
}

impl NumberField {
    pub fn new(generator: RealAlgebraic) -> Arc<Self> {
        let modulus = generator.minpoly().to_rat().monic();
        Arc::new(NumberField { generator, modulus })
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    pub fn generator(&self) -> &RealAlgebraic {
        &self.generator
    }

    pub fn minpoly(&self) -> &IntPolynomial {
        self.generator.minpoly()
    }

    pub fn modulus(&self) -> &RatPoly {
        &self.modulus
    }
}

/// Element of a number field in the power basis `1, a, ..., a^(d-1)`.
#[derive(Clone, Debug)]
pub struct FieldElement {
    coords: Vec<Rat>,
    field: Arc<NumberField>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
            && (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
    }
}

impl FieldElement {
    pub fn from_coords(field: &Arc<NumberField>, mut coords: Vec<Rat>) -> Self {
        assert!(coords.len() <= field.degree(), "too many coordinates");
        coords.resize(field.degree(), Rat::zero());
        FieldElement {
            coords,
            field: field.clone(),
        }
    }

    /// Reduces a polynomial in the generator modulo the minimal polynomial.
    pub fn from_poly(field: &Arc<NumberField>, p: &RatPoly) -> Self {
        let r = p.rem(field.modulus());
        Self::from_coords(field, r.coeffs().to_vec())
    }

    pub fn from_rat(field: &Arc<NumberField>, c: Rat) -> Self {
        Self::from_coords(field, vec![c])
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_coords(field, Vec::new())
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rat(field, Rat::one())
    }

    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, &RatPoly::x())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// Ascending coordinates (coefficient of `a^0` first).
    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn to_poly(&self) -> RatPoly {
        RatPoly::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| a + b)
            .collect();
        Self::from_coords(&self.field, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let c = self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| a - b)
            .collect();
        Self::from_coords(&self.field, c)
    }

    pub fn neg(&self) -> Self {
        Self::from_coords(&self.field, self.coords.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Self::from_coords(&self.field, self.coords.iter().map(|a| a * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_poly(&self.field, &(&self.to_poly() * &o.to_poly()))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let (g, s, _) = self.to_poly().ext_gcd(self.field.modulus());
        debug_assert!(g.is_one());
        Some(Self::from_poly(&self.field, &s))
    }

    /// Evaluates a rational polynomial at this element.
    pub fn eval_poly(&self, p: &RatPoly) -> Self {
        p.coeffs()
            .iter()
            .rev()
            .fold(Self::zero(&self.field), |acc, c| {
                acc.mul(self).add(&Self::from_rat(&self.field, c.clone()))
            })
    }

    /// Interval enclosure of the real value under the generator's embedding,
    /// with the generator refined to `width`.
    pub fn enclose(&self, width: &Rat, cap: u64) -> Result<Enclosure> {
        let g = self.field.generator().refine(width, cap)?;
        let a = Enclosure::new(g.lo().clone(), g.hi().clone());
        let mut acc = Enclosure::exact(Rat::zero());
        for c in self.coords.iter().rev() {
            acc = acc.mul(&a).add(&Enclosure::exact(c.clone()));
        }
        Ok(acc)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(fmt_rat).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Monic gcd of two polynomials with coefficients in a number field, given
/// as ascending coefficient vectors.
pub fn field_poly_gcd(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let trim = |mut v: Vec<FieldElement>| {
        while v.last().is_some_and(FieldElement::is_zero) {
            v.pop();
        }
        v
    };
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let inv = b.last().unwrap().inverse().unwrap();
        let db = b.len() - 1;
        while a.len() >= b.len() {
            let c = a.last().unwrap().mul(&inv);
            let shift = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                a[shift + i] = a[shift + i].sub(&c.mul(bc));
            }
            a.pop();
            a = trim(a);
            if a.len() < db + 1 {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(l) = a.last() {
        let inv = l.inverse().unwrap();
        a = a.iter().map(|c| c.mul(&inv)).collect();
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn q_sqrt2_sqrt3() -> Arc<NumberField> {
        let g = RealAlgebraic::new(&IntPolynomial::from_i64(&[1, 0, -10, 0, 1]), int(3), int(4))
            .unwrap();
        NumberField::new(g)
    }

    #[test]
    fn square_roots_in_biquadratic_field() {
        let k = q_sqrt2_sqrt3();
        let s2 = FieldElement::from_coords(&k, vec![int(0), rat(-9, 2), int(0), rat(1, 2)]);
        let s3 = FieldElement::from_coords(&k, vec![int(0), rat(11, 2), int(0), rat(-1, 2)]);
        assert_eq!(s2.mul(&s2), FieldElement::from_rat(&k, int(2)));
        assert_eq!(s3.mul(&s3), FieldElement::from_rat(&k, int(3)));
        assert_eq!(s2.add(&s3), FieldElement::generator(&k));
        let e = s2.enclose(&rat(1, 1 << 20), 1000).unwrap();
        assert!(e.contains(&rat(14142, 10000)) || e.lo > rat(14142, 10000));
        assert!(e.hi < rat(14143, 10000));
    }

    #[test]
    fn inverse_round_trip() {
        let k = q_sqrt2_sqrt3();
        let x = FieldElement::from_coords(&k, vec![int(1), int(2), int(0), int(-1)]);
        let y = x.inverse().unwrap();
        assert_eq!(x.mul(&y), FieldElement::one(&k));
        assert!(FieldElement::zero(&k).inverse().is_none());
    }

    #[test]
    fn gcd_over_field() {
        // gcd(Y^2 - 2, (g - Y)^2 - 3) = Y - sqrt2 in Q(sqrt2 + sqrt3)
        let k = q_sqrt2_sqrt3();
        let g = FieldElement::generator(&k);
        let c = |x: i64| FieldElement::from_rat(&k, int(x));
        let f1 = vec![c(-2), c(0), c(1)];
        let f2 = vec![g.mul(&g).sub(&c(3)), g.scale(&int(-2)), c(1)];
        let d = field_poly_gcd(&f1, &f2);
        assert_eq!(d.len(), 2);
        let s2 = d[0].neg();
        assert_eq!(s2.mul(&s2), c(2));
    }
}
