//! Exact arithmetic with real algebraic numbers and the field they generate.

pub mod algebraic;
pub mod factor;
pub mod field;
pub mod fp;
pub mod intfactor;
pub mod poly;
pub mod primitive;
pub mod resultant;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

pub use algebraic::{count_roots, RealAlgebraic, DEFAULT_REFINE_CAP};
pub use factor::{factor_rational, Factorization};
pub use field::{FieldElement, NumberField};
pub use poly::{IntPolynomial, Poly, RatPoly};
pub use primitive::{
    compute_n_m, default_m0_cap, find_primitive_shift, integer_scaling, power_basis_expansion,
    power_reduce, scaling_factor, PrimitiveShift,
};
pub use resultant::{resultant, resultant_y, shifted_sum_resultant};

use crate::error::{Error, Result};
use crate::polyops::{BivarPoly, FieldPoint};
use crate::rat::Rat;

/// Everything about `Q(a1, a2)` that the constant pipeline needs.
#[derive(Clone, Debug)]
pub struct FieldContext {
    pub alpha1: RealAlgebraic,
    pub alpha2: RealAlgebraic,
    /// Primitive algebraic integer `M1 (a1 + M0 a2)`.
    pub alpha: RealAlgebraic,
    pub d: usize,
    pub m0: u64,
    pub m1: BigInt,
    pub field: Arc<NumberField>,
    pub x1: FieldElement,
    pub x2: FieldElement,
    pub n: BigInt,
    pub m: BigInt,
    /// `N` times the coordinates of `a1` and `a2`, leading power first.
    pub c_table: [Vec<BigInt>; 2],
    pub m_alpha_height: BigInt,
}

impl FieldContext {
    pub fn build(
        a1: &RealAlgebraic,
        a2: &RealAlgebraic,
        m0_cap: u64,
        refine_cap: u64,
    ) -> Result<Self> {
        let shift = find_primitive_shift(a1, a2, m0_cap, refine_cap)?;
        let (m1, alpha) = integer_scaling(&shift.gamma);
        if !alpha.minpoly().lc().is_one() {
            return Err(Error::Internal("scaled generator is not integral".into()));
        }
        let field = NumberField::new(alpha.clone());
        // a = M1 g, so g^i = a^i / M1^i
        let m1r = Rat::from_integer(m1.clone());
        let rescale = |x: &FieldElement| {
            let mut f = Rat::one();
            let coords = x
                .coords()
                .iter()
                .map(|c| {
                    let v = c / &f;
                    f *= &m1r;
                    v
                })
                .collect();
            FieldElement::from_coords(&field, coords)
        };
        let x1 = rescale(&shift.alpha1);
        let x2 = rescale(&shift.alpha2);
        let back = x1
            .add(&x2.scale(&Rat::from_integer(BigInt::from(shift.m0))))
            .scale(&m1r);
        if back != FieldElement::generator(&field) {
            return Err(Error::Internal(
                "generator identity fails after scaling".into(),
            ));
        }
        let (n, m, c_table) = compute_n_m(&x1, &x2);
        Ok(FieldContext {
            alpha1: a1.clone(),
            alpha2: a2.clone(),
            d: field.degree(),
            m_alpha_height: alpha.minpoly().height(),
            alpha,
            m0: shift.m0,
            m1,
            field,
            x1,
            x2,
            n,
            m,
            c_table,
        })
    }

    pub fn m_alpha(&self) -> &IntPolynomial {
        self.alpha.minpoly()
    }

    pub fn point(&self, k: u32) -> FieldPoint {
        FieldPoint::new(&self.x1, &self.x2, k)
    }

    /// `N * a_i` as a field element, `i` in `{1, 2}`.
    pub fn scaled(&self, i: usize) -> FieldElement {
        let x = if i == 1 { &self.x1 } else { &self.x2 };
        x.scale(&Rat::from_integer(self.n.clone()))
    }

    pub fn abs_max_height(&self) -> BigInt {
        self.c_table
            .iter()
            .flatten()
            .map(Signed::abs)
            .max()
            .unwrap_or_default()
    }
}

/// `P(x1, x2)` in the common field.
pub fn field_eval(p: &BivarPoly, x1: &FieldElement, x2: &FieldElement) -> FieldElement {
    FieldPoint::new(x1, x2, p.k()).eval(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    fn sqrt(n: i64) -> RealAlgebraic {
        RealAlgebraic::new(&IntPolynomial::from_i64(&[-n, 0, 1]), int(1), int(n)).unwrap()
    }

    #[test]
    fn reference_context() {
        let ctx = FieldContext::build(&sqrt(2), &sqrt(3), 160, DEFAULT_REFINE_CAP).unwrap();
        assert_eq!(ctx.d, 4);
        assert_eq!(ctx.m0, 1);
        assert_eq!(ctx.m1, BigInt::from(1));
        assert_eq!(ctx.m_alpha(), &IntPolynomial::from_i64(&[1, 0, -10, 0, 1]));
        assert_eq!(ctx.m_alpha_height, BigInt::from(10));
        assert_eq!(ctx.n, BigInt::from(2));
        assert_eq!(ctx.m, BigInt::from(11));
        assert_eq!(ctx.abs_max_height(), ctx.m);
    }

    #[test]
    fn rational_pair_context() {
        let a1 = RealAlgebraic::rational(&crate::rat::rat(2, 3));
        let a2 = RealAlgebraic::rational(&crate::rat::rat(1, 2));
        let ctx = FieldContext::build(&a1, &a2, 10, DEFAULT_REFINE_CAP).unwrap();
        assert_eq!(ctx.d, 1);
        // a0 = 2/3 + 1/2 = 7/6, M1 = 6, a = 7
        assert_eq!(ctx.m1, BigInt::from(6));
        assert_eq!(ctx.alpha.as_rational(), Some(int(7)));
        assert_eq!(ctx.n, BigInt::from(6));
    }

    #[test]
    fn field_eval_examples() {
        let ctx = FieldContext::build(&sqrt(2), &sqrt(3), 160, DEFAULT_REFINE_CAP).unwrap();
        let p = BivarPoly::monomial(2, 2, 0, int(1)).unwrap();
        assert_eq!(
            field_eval(&p, &ctx.x1, &ctx.x2),
            FieldElement::from_rat(&ctx.field, int(2))
        );
        let one = BivarPoly::monomial(0, 0, 0, int(1)).unwrap();
        assert_eq!(
            field_eval(&one, &ctx.x1, &ctx.x2),
            FieldElement::one(&ctx.field)
        );
    }
}
