//! Primitive element of `Q(a1, a2)` of the form `a1 + M0 a2`, its scaling to
//! an algebraic integer, and power-basis expansions of the inputs.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::algebraic::{select_root, RealAlgebraic};
use super::field::{field_poly_gcd, FieldElement, NumberField};
use super::intfactor::{factor_integer, valuation};
use super::poly::{IntPolynomial, RatPoly};
use super::resultant::shifted_sum_resultant;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rat::{int, Rat};

#[derive(Clone, Debug)]
pub struct PrimitiveShift {
    /// Least `c >= 1` with `a1 + c a2` primitive.
    pub m0: u64,
    /// Least `c >= 1` at which all sums of conjugates are distinct.
    pub cstar: u64,
    /// `a1 + m0 a2`.
    pub gamma: RealAlgebraic,
    /// `Q(gamma)`.
    pub field: Arc<NumberField>,
    pub alpha1: FieldElement,
    pub alpha2: FieldElement,
}

pub fn default_m0_cap(d1: usize, d2: usize) -> u64 {
    10 * ((d1 * d2) as u64).pow(2)
}

/// Polynomials in `Y` with number-field coefficients, ascending.
type FieldPoly = Vec<FieldElement>;

fn fpoly_mul(a: &[FieldElement], b: &[FieldElement], k: &Arc<NumberField>) -> FieldPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![FieldElement::zero(k); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

fn lift(p: &IntPolynomial, k: &Arc<NumberField>) -> FieldPoly {
    p.coeffs()
        .iter()
        .map(|c| FieldElement::from_rat(k, Rat::from_integer(c.clone())))
        .collect()
}

/// `m(u + v Y)` for field elements `u`, `v`.
fn compose_linear(m: &IntPolynomial, u: &FieldElement, v: &FieldElement) -> FieldPoly {
    let k = u.field();
    let lin = vec![u.clone(), v.clone()];
    let mut acc: FieldPoly = Vec::new();
    for c in m.coeffs().iter().rev() {
        acc = fpoly_mul(&acc, &lin, k);
        let c = FieldElement::from_rat(k, Rat::from_integer(c.clone()));
        if acc.is_empty() {
            acc.push(c);
        } else {
            acc[0] = acc[0].add(&c);
        }
    }
    acc
}

/// Expansion of a number in `Q(a)` as the unique common root of its minimal
/// polynomial and a relation polynomial over `Q(a)`. Fails with
/// [`Error::NotInField`] unless the gcd is linear, and verifies the result
/// by substitution into the minimal polynomial.
pub fn power_basis_expansion(
    minpoly: &IntPolynomial,
    relation: &[FieldElement],
) -> Result<FieldElement> {
    let k = relation
        .first()
        .ok_or_else(|| Error::Precondition("empty relation polynomial".into()))?
        .field()
        .clone();
    let g = field_poly_gcd(&lift(minpoly, &k), relation);
    if g.len() != 2 {
        return Err(Error::NotInField(format!(
            "gcd with {minpoly} has degree {}",
            g.len().saturating_sub(1)
        )));
    }
    let root = g[0].neg();
    if !root.eval_poly(&minpoly.to_rat()).is_zero() {
        return Err(Error::Internal(
            "expansion fails its minimal polynomial".into(),
        ));
    }
    Ok(root)
}

fn sum_enclosure(
    a1: &RealAlgebraic,
    a2: &RealAlgebraic,
    c: &Rat,
    round: u64,
    cap: u64,
) -> Result<(Rat, Rat)> {
    let w = Rat::new(BigInt::one(), BigInt::one() << (round as usize + 1));
    let r1 = a1.refine(&w, cap)?;
    let r2 = a2.refine(&w, cap)?;
    let (x, y) = (r2.lo() * c, r2.hi() * c);
    let (lo2, hi2) = if x <= y { (x, y) } else { (y, x) };
    Ok((r1.lo() + lo2, r1.hi() + hi2))
}

/// Rows are the coordinates of `x^0, ..., x^(d-1)`.
fn power_rows(x: &FieldElement) -> Vec<Vec<Rat>> {
    let d = x.field().degree();
    let mut rows = Vec::with_capacity(d);
    let mut p = FieldElement::one(x.field());
    for _ in 0..d {
        rows.push(p.coords().to_vec());
        p = p.mul(x);
    }
    rows
}

fn transpose(m: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = m.first().map_or(0, Vec::len);
    (0..n)
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Coordinates of `y` in the basis of powers of `x` (which must be primitive).
fn rebase(x_powers_t: &[Vec<Rat>], y: &FieldElement) -> Result<Vec<Rat>> {
    linalg::solve(x_powers_t, y.coords())
        .ok_or_else(|| Error::Internal("power matrix of a primitive element is singular".into()))
}

pub fn find_primitive_shift(
    a1: &RealAlgebraic,
    a2: &RealAlgebraic,
    cap: u64,
    refine_cap: u64,
) -> Result<PrimitiveShift> {
    let (m1, m2) = (a1.minpoly(), a2.minpoly());
    let mut found = None;
    for c in 1..=cap {
        let r = shifted_sum_resultant(m1, m2, &BigInt::from(c));
        if r.is_squarefree() {
            found = Some((c, r));
            break;
        }
    }
    let (cstar, res) = found.ok_or(Error::CapExceeded {
        what: "primitive element search",
        cap,
    })?;
    let cs = int(cstar as i64);
    let gstar = select_root(
        &res,
        |round| sum_enclosure(a1, a2, &cs, round, refine_cap),
        256,
    )?;
    let f = NumberField::new(gstar);
    let d = f.degree();

    // a2 is the unique common root of m2(Y) and m1(g* - c* Y)
    let gen = FieldElement::generator(&f);
    let rel = compose_linear(m1, &gen, &FieldElement::from_rat(&f, -cs.clone()));
    let x2 = power_basis_expansion(m2, &rel)?;
    let x1 = gen.sub(&x2.scale(&cs));

    let mut m0 = cstar;
    for c in 1..cstar {
        let g = x1.add(&x2.scale(&int(c as i64)));
        if linalg::rat_rank(&power_rows(&g)) == d {
            m0 = c;
            break;
        }
    }

    let (gamma, field, e1, e2) = if m0 == cstar {
        (f.generator().clone(), f.clone(), x1, x2)
    } else {
        let g = x1.add(&x2.scale(&int(m0 as i64)));
        let pt = transpose(&power_rows(&g));
        let top = g.pow(d as u64);
        let low = rebase(&pt, &top)?;
        let mut coeffs: Vec<Rat> = low.into_iter().map(|c| -c).collect();
        coeffs.push(Rat::one());
        let minpoly = RatPoly::new(coeffs).to_primitive_int();
        let c0 = int(m0 as i64);
        let gamma = select_root(
            &minpoly,
            |round| sum_enclosure(a1, a2, &c0, round, refine_cap),
            256,
        )?;
        let k = NumberField::new(gamma.clone());
        let y1 = FieldElement::from_coords(&k, rebase(&pt, &x1)?);
        let y2 = FieldElement::from_coords(&k, rebase(&pt, &x2)?);
        (gamma, k, y1, y2)
    };

    let out = PrimitiveShift {
        m0,
        cstar,
        gamma,
        field,
        alpha1: e1,
        alpha2: e2,
    };
    verify_shift(&out, a1, a2, refine_cap)?;
    Ok(out)
}

fn verify_shift(
    s: &PrimitiveShift,
    a1: &RealAlgebraic,
    a2: &RealAlgebraic,
    cap: u64,
) -> Result<()> {
    let k = &s.field;
    let fail = |what: &str| {
        Err(Error::Internal(format!(
            "primitive element check failed: {what}"
        )))
    };
    if !s.alpha1.eval_poly(&a1.minpoly().to_rat()).is_zero() {
        return fail("first minimal polynomial");
    }
    if !s.alpha2.eval_poly(&a2.minpoly().to_rat()).is_zero() {
        return fail("second minimal polynomial");
    }
    let g = s.alpha1.add(&s.alpha2.scale(&int(s.m0 as i64)));
    if g != FieldElement::generator(k) {
        return fail("generator identity");
    }
    // the expansions must pick out the given real roots
    let w = Rat::new(BigInt::one(), BigInt::one() << 40);
    for (x, a) in [(&s.alpha1, a1), (&s.alpha2, a2)] {
        let e = x.enclose(&w, cap)?;
        if e.hi < *a.lo() || e.lo > *a.hi() {
            return fail("real embedding");
        }
    }
    Ok(())
}

/// Least `k >= 1` such that `k^(e-i) a_i` is integral for every coefficient
/// `a_i` of the monic rational polynomial `x^e + sum a_i x^i`.
pub fn scaling_factor(monic: &RatPoly) -> BigInt {
    let e = monic.deg();
    let mut primes: Vec<BigInt> = Vec::new();
    for c in monic.coeffs() {
        for (p, _) in factor_integer(c.denom()) {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    let mut k = BigInt::one();
    for p in primes {
        let mut v = 0u32;
        for (i, c) in monic.coeffs().iter().enumerate().take(e) {
            let vp = valuation(c.denom(), &p);
            let need = vp.div_ceil((e - i) as u32);
            v = v.max(need);
        }
        k *= p.pow(v);
    }
    k
}

/// `(M1, M1 * a0)` with `M1 * a0` an algebraic integer and `M1` least.
pub fn integer_scaling(a0: &RealAlgebraic) -> (BigInt, RealAlgebraic) {
    let monic = a0.minpoly().to_rat().monic();
    let k = scaling_factor(&monic);
    (k.clone(), a0.scale(&Rat::from_integer(k)))
}

/// `(N, M, c)` where `N` is the lcm of all coordinate denominators, `c[i]`
/// lists `N` times the coordinates of the `i`-th element from the
/// coefficient of `a^(d-1)` down to the constant, and `M = max |c|`.
pub fn compute_n_m(x1: &FieldElement, x2: &FieldElement) -> (BigInt, BigInt, [Vec<BigInt>; 2]) {
    let n = crate::rat::lcm_denominators(x1.coords().iter().chain(x2.coords()));
    let nr = Rat::from_integer(n.clone());
    let table = |x: &FieldElement| -> Vec<BigInt> {
        x.coords()
            .iter()
            .rev()
            .map(|c| (c * &nr).to_integer())
            .collect()
    };
    let c = [table(x1), table(x2)];
    let m = c
        .iter()
        .flatten()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(BigInt::zero);
    (n, m, c)
}

/// Integer coordinates of `a^l` for a root `a` of the monic integer
/// polynomial `m`, from the coefficient of `a^(d-1)` down to the constant.
pub fn power_reduce(l: u64, m: &IntPolynomial) -> Vec<BigInt> {
    assert!(m.lc().is_one(), "power reduction needs a monic polynomial");
    let d = m.deg();
    let mut v = vec![BigInt::zero(); d];
    if d == 0 {
        return v;
    }
    v[0] = BigInt::one();
    // v ascending; multiply by a and reduce
    for _ in 0..l {
        let top = v[d - 1].clone();
        for i in (1..d).rev() {
            v[i] = v[i - 1].clone() - &top * m.coeff(i);
        }
        v[0] = -&top * m.coeff(0);
    }
    v.reverse();
    v
}
