//! Resultants by the subresultant pseudo-remainder sequence.

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::{ExactDiv, IntPolynomial, Poly};

fn pow<T: ExactDiv>(base: &T, e: usize) -> T {
    num_traits::pow(base.clone(), e)
}

/// Resultant of two polynomials over an integral domain with exact division.
pub fn resultant<T: ExactDiv>(a: &Poly<T>, b: &Poly<T>) -> T {
    if a.is_zero() || b.is_zero() {
        return T::zero();
    }
    let (da, db) = (a.deg(), b.deg());
    if da == 0 {
        return pow(&a.lc(), db);
    }
    if db == 0 {
        return pow(&b.lc(), da);
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut s = T::one();
    if da < db {
        std::mem::swap(&mut a, &mut b);
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
    }
    let mut g = T::one();
    let mut h = T::one();
    loop {
        let (na, nb) = (a.deg(), b.deg());
        let delta = na - nb;
        if na % 2 == 1 && nb % 2 == 1 {
            s = -s;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        if r.is_zero() {
            return T::zero();
        }
        let div = g.clone() * pow(&h, delta);
        b = r.map(|c| c.exact_div(&div));
        g = a.lc();
        h = if delta == 0 {
            h
        } else {
            pow(&g, delta).exact_div(&pow(&h, delta - 1))
        };
        if b.deg() == 0 {
            break;
        }
    }
    let na = a.deg();
    let lb = b.lc();
    let h = if na == 0 {
        T::one()
    } else {
        pow(&lb, na).exact_div(&pow(&h, na - 1))
    };
    s * h
}

/// `Res_Y(f(X, Y), g(Y))` where `f` is given as a polynomial in `Y` with
/// coefficients in `Z[X]`.
pub fn resultant_y(f: &Poly<IntPolynomial>, g: &IntPolynomial) -> IntPolynomial {
    let g_lift: Poly<IntPolynomial> = g.map(|c| IntPolynomial::constant(c.clone()));
    resultant(f, &g_lift)
}

/// `Res_Y(m1(X - c*Y), m2(Y))`, whose roots are the sums `a + c*b` over roots
/// `a` of `m1` and `b` of `m2`.
pub fn shifted_sum_resultant(m1: &IntPolynomial, m2: &IntPolynomial, c: &BigInt) -> IntPolynomial {
    let lin: Poly<IntPolynomial> = Poly::new(vec![
        IntPolynomial::x(),
        IntPolynomial::constant(-c.clone()),
    ]);
    let f = m1.map(|a| IntPolynomial::constant(a.clone())).compose(&lin);
    resultant_y(&f, m2)
}

/// Convenience for integer polynomials.
pub fn int_resultant(a: &IntPolynomial, b: &IntPolynomial) -> BigInt {
    resultant(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    fn from_roots(roots: &[i64]) -> IntPolynomial {
        roots
            .iter()
            .fold(IntPolynomial::one(), |acc, &r| &acc * &p(&[-r, 1]))
    }

    #[test]
    fn substitution_case() {
        // Res_Y(X - Y, Y^2 - 2)
        let f: Poly<IntPolynomial> = Poly::new(vec![p(&[0, 1]), p(&[-1])]);
        assert_eq!(resultant_y(&f, &p(&[-2, 0, 1])), p(&[-2, 0, 1]));
    }

    #[test]
    fn sum_of_square_roots() {
        let r = shifted_sum_resultant(&p(&[-2, 0, 1]), &p(&[-3, 0, 1]), &BigInt::from(-1));
        // with c = -1 the roots are a - b; still x^4 - 10x^2 + 1 by symmetry
        assert_eq!(r, p(&[1, 0, -10, 0, 1]));
        let r = shifted_sum_resultant(&p(&[-2, 0, 1]), &p(&[-3, 0, 1]), &BigInt::one());
        assert_eq!(r, p(&[1, 0, -10, 0, 1]));
    }

    #[test]
    fn same_square_root_twice() {
        let r = shifted_sum_resultant(&p(&[-2, 0, 1]), &p(&[-2, 0, 1]), &BigInt::one());
        assert_eq!(r, p(&[0, 0, -8, 0, 1]));
        let r = shifted_sum_resultant(&p(&[-2, 0, 1]), &p(&[-2, 0, 1]), &BigInt::from(2));
        assert_eq!(r, &p(&[-18, 0, 1]) * &p(&[-2, 0, 1]));
    }

    #[test]
    fn constant_argument() {
        assert_eq!(int_resultant(&p(&[3]), &p(&[1, 2, 1])), BigInt::from(9));
        assert_eq!(int_resultant(&p(&[1, 2, 1]), &p(&[3])), BigInt::from(9));
        assert!(int_resultant(&p(&[-1, 1]), &p(&[-1, 0, 1])).is_zero());
    }

    proptest! {
        #[test]
        fn split_polynomials(a in prop::collection::vec(-6i64..=6, 1..5),
                             b in prop::collection::vec(-6i64..=6, 1..5)) {
            let f = from_roots(&a);
            let g = from_roots(&b);
            let mut expected = BigInt::one();
            for x in &a {
                for y in &b {
                    expected *= BigInt::from(x - y);
                }
            }
            prop_assert_eq!(int_resultant(&f, &g), expected);
        }
    }
}
