//! Bivariate polynomials with exact rational coefficients, Hasse
//! derivatives and the weighted vanishing index.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::{self, Enclosure};
use crate::error::{Error, Result};
use crate::numfield::FieldElement;
use crate::rat::{binomial, fmt_rat, int, Rat};

/// Exponent pair `(j1, j2)`, ordered by total degree and then by `j1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub j1: u32,
    pub j2: u32,
}

impl MultiIndex {
    pub fn new(j1: u32, j2: u32) -> Self {
        MultiIndex { j1, j2 }
    }

    pub fn total(&self) -> u32 {
        self.j1 + self.j2
    }

    /// All indices with `j1 + j2 <= k` in the canonical order.
    pub fn up_to(k: u32) -> Vec<MultiIndex> {
        let mut out = Vec::with_capacity(((k + 1) * (k + 2) / 2) as usize);
        for t in 0..=k {
            for j1 in 0..=t {
                out.push(MultiIndex::new(j1, t - j1));
            }
        }
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.total(), self.j1).cmp(&(other.total(), other.j1))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Weights {
    r1: u32,
    r2: u32,
}

impl Weights {
    pub fn new(r1: u32, r2: u32) -> Result<Self> {
        if r1 == 0 || r2 == 0 {
            return Err(Error::Precondition("weights must be positive".into()));
        }
        Ok(Weights { r1, r2 })
    }

    pub fn equal(k: u32) -> Self {
        Weights::new(k.max(1), k.max(1)).unwrap()
    }

    pub fn r1(&self) -> u32 {
        self.r1
    }

    pub fn r2(&self) -> u32 {
        self.r2
    }

    pub fn weigh(&self, j: &MultiIndex) -> Rat {
        Rat::new(BigInt::from(j.j1), BigInt::from(self.r1))
            + Rat::new(BigInt::from(j.j2), BigInt::from(self.r2))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivarPoly {
    terms: BTreeMap<MultiIndex, Rat>,
    k: u32,
}

impl BivarPoly {
    pub fn zero(k: u32) -> Self {
        BivarPoly {
            terms: BTreeMap::new(),
            k,
        }
    }

    pub fn from_terms<I>(k: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rat)>,
    {
        let mut p = Self::zero(k);
        for (j, c) in terms {
            if j.total() > k {
                return Err(Error::InvalidInput(format!(
                    "term X1^{} X2^{} exceeds degree bound {k}",
                    j.j1, j.j2
                )));
            }
            let e = p.terms.entry(j).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                p.terms.remove(&j);
            }
        }
        Ok(p)
    }

    pub fn monomial(k: u32, j1: u32, j2: u32, c: Rat) -> Result<Self> {
        Self::from_terms(k, [(MultiIndex::new(j1, j2), c)])
    }

    /// Polynomial whose coefficient of the `i`-th monomial of
    /// [`MultiIndex::up_to`] is `coeffs[i]`.
    pub fn from_dense(k: u32, coeffs: &[BigInt]) -> Self {
        let idx = MultiIndex::up_to(k);
        assert_eq!(idx.len(), coeffs.len(), "coefficient vector length");
        Self::from_terms(
            k,
            idx.into_iter()
                .zip(coeffs)
                .map(|(j, c)| (j, Rat::from_integer(c.clone()))),
        )
        .unwrap()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, j: &MultiIndex) -> Rat {
        self.terms.get(j).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn naive_height(&self) -> Rat {
        self.terms
            .values()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(Rat::is_integer)
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.k.max(other.k);
        Self::from_terms(
            k,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(j, c)| (*j, c.clone())),
        )
        .unwrap()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = self.k + other.k;
        let mut out = Vec::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.push((MultiIndex::new(a.j1 + b.j1, a.j2 + b.j2), x * y));
            }
        }
        Self::from_terms(k, out).unwrap()
    }

    /// Hasse derivative: the coefficient of `X1^a X2^b` is
    /// `C(a+j1, j1) C(b+j2, j2)` times that of `X1^(a+j1) X2^(b+j2)`.
    pub fn hasse_derivative(&self, j: &MultiIndex) -> Self {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.j1 < j.j1 || m.j2 < j.j2 {
                continue;
            }
            let f = binomial(m.j1, j.j1) * binomial(m.j2, j.j2);
            out.insert(
                MultiIndex::new(m.j1 - j.j1, m.j2 - j.j2),
                c * Rat::from_integer(f),
            );
        }
        BivarPoly {
            terms: out,
            k: self.k,
        }
    }

    pub fn eval_at(&self, x1: &Rat, x2: &Rat) -> Rat {
        let max1 = self.terms.keys().map(|j| j.j1).max().unwrap_or(0);
        let max2 = self.terms.keys().map(|j| j.j2).max().unwrap_or(0);
        let p1 = powers(x1, max1);
        let p2 = powers(x2, max2);
        self.terms
            .iter()
            .map(|(j, c)| c * &p1[j.j1 as usize] * &p2[j.j2 as usize])
            .fold(Rat::zero(), |a, b| a + b)
    }

    /// `P(p1/q, p2/q)` in lowest terms.
    pub fn eval_rational(&self, p1: &BigInt, p2: &BigInt, q: &BigInt) -> Rat {
        assert!(q.is_positive(), "denominator must be positive");
        let qr = Rat::from_integer(q.clone());
        self.eval_at(
            &(Rat::from_integer(p1.clone()) / &qr),
            &(Rat::from_integer(p2.clone()) / &qr),
        )
    }

    /// `Q(Y1, Y2) = P(Y1 + c1, Y2 + c2)` by binomial expansion.
    pub fn taylor_shift(&self, c1: &Rat, c2: &Rat) -> Self {
        let max1 = self.terms.keys().map(|j| j.j1).max().unwrap_or(0);
        let max2 = self.terms.keys().map(|j| j.j2).max().unwrap_or(0);
        let p1 = powers(c1, max1);
        let p2 = powers(c2, max2);
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            for i1 in 0..=m.j1 {
                for i2 in 0..=m.j2 {
                    let f = Rat::from_integer(binomial(m.j1, i1) * binomial(m.j2, i2));
                    let v = c * f * &p1[(m.j1 - i1) as usize] * &p2[(m.j2 - i2) as usize];
                    out.push((MultiIndex::new(i1, i2), v));
                }
            }
        }
        Self::from_terms(self.k, out).unwrap()
    }
}

fn powers(x: &Rat, n: u32) -> Vec<Rat> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut p = Rat::one();
    for _ in 0..=n {
        out.push(p.clone());
        p *= x;
    }
    out
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(j, c)| format!("({})*X1^{}*X2^{}", fmt_rat(c), j.j1, j.j2))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A point at which polynomials can be tested for vanishing.
pub trait EvalPoint {
    fn vanishes(&self, p: &BivarPoly) -> bool;
}

#[derive(Clone, Debug)]
pub struct RationalPoint {
    pub x1: Rat,
    pub x2: Rat,
}

impl RationalPoint {
    pub fn new(x1: Rat, x2: Rat) -> Self {
        RationalPoint { x1, x2 }
    }
}

impl EvalPoint for RationalPoint {
    fn vanishes(&self, p: &BivarPoly) -> bool {
        p.eval_at(&self.x1, &self.x2).is_zero()
    }
}

/// A pair of number-field elements with cached powers.
#[derive(Clone, Debug)]
pub struct FieldPoint {
    p1: Vec<FieldElement>,
    p2: Vec<FieldElement>,
}

impl FieldPoint {
    pub fn new(x1: &FieldElement, x2: &FieldElement, k: u32) -> Self {
        let pw = |x: &FieldElement| {
            let mut v = vec![FieldElement::one(x.field())];
            for i in 0..k as usize {
                let n = v[i].mul(x);
                v.push(n);
            }
            v
        };
        FieldPoint {
            p1: pw(x1),
            p2: pw(x2),
        }
    }

    pub fn eval(&self, p: &BivarPoly) -> FieldElement {
        let k = self.p1[0].field();
        let mut acc = FieldElement::zero(k);
        for (j, c) in p.terms() {
            let t = self.p1[j.j1 as usize].mul(&self.p2[j.j2 as usize]);
            acc = acc.add(&t.scale(c));
        }
        acc
    }
}

impl EvalPoint for FieldPoint {
    fn vanishes(&self, p: &BivarPoly) -> bool {
        self.eval(p).is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Index {
    Finite(Rat),
    Infinite,
}

impl Index {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Index::Finite(r) => Some(r),
            Index::Infinite => None,
        }
    }

    /// `self >= t`, with the infinite index above everything.
    pub fn at_least(&self, t: &Rat) -> bool {
        match self {
            Index::Finite(r) => r >= t,
            Index::Infinite => true,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(r) => write!(f, "{}", fmt_rat(r)),
            Index::Infinite => write!(f, "inf"),
        }
    }
}

/// Multi-indices with `j1 + j2 <= k` ordered by weighted sum, then by the
/// canonical order.
pub fn index_scan_order(k: u32, w: &Weights) -> Vec<MultiIndex> {
    let mut js = MultiIndex::up_to(k);
    js.sort_by(|a, b| w.weigh(a).cmp(&w.weigh(b)).then(a.cmp(b)));
    js
}

/// Weighted index at a point, with the first non-vanishing derivative in
/// scan order as witness.
pub fn index_with_witness<P: EvalPoint>(
    p: &BivarPoly,
    point: &P,
    w: &Weights,
) -> (Index, Option<MultiIndex>) {
    if p.is_zero() {
        return (Index::Infinite, None);
    }
    for j in index_scan_order(p.k(), w) {
        if !point.vanishes(&p.hasse_derivative(&j)) {
            return (Index::Finite(w.weigh(&j)), Some(j));
        }
    }
    unreachable!("a nonzero polynomial has a non-vanishing derivative of order <= k")
}

pub fn index_at<P: EvalPoint>(p: &BivarPoly, point: &P, w: &Weights) -> Index {
    index_with_witness(p, point, w).0
}

/// Inputs of the evaluation bound for `|d_j P(p1/q, p2/q)|`.
#[derive(Clone, Debug)]
pub struct NormdiffInput {
    pub k: u32,
    pub height: Rat,
    pub maxabs: Rat,
    pub nmult: Rat,
    pub q: Rat,
    pub delta: Rat,
    pub theta: Rat,
    pub theta0: Rat,
}

impl NormdiffInput {
    pub fn exponent(&self) -> Rat {
        int(self.k as i64) * &self.delta * (&self.theta - &self.theta0)
    }

    fn check(&self) -> Result<()> {
        if self.k < 6 {
            return Err(Error::Precondition(format!("k = {} < 6", self.k)));
        }
        if self.q < int(2) {
            return Err(Error::Precondition("q must be at least 2".into()));
        }
        for (name, v) in [
            ("height", &self.height),
            ("maxabs", &self.maxabs),
            ("multiplier", &self.nmult),
            ("delta", &self.delta),
        ] {
            if !v.is_positive() {
                return Err(Error::Precondition(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    fn prefactor(&self) -> Rat {
        let k = self.k as usize;
        num_traits::pow(int(64), k)
            * &self.height
            * num_traits::pow(self.maxabs.clone(), k)
            * num_traits::pow(self.nmult.clone(), 2 * k)
    }
}

/// Enclosure of `64^k |P| maxabs^k N^(2k) q^(-k delta (theta - theta0))` at
/// the given working precision; exact when the exponent is an integer.
pub fn normdiff_bound_at(inp: &NormdiffInput, prec: u32) -> Result<Enclosure> {
    inp.check()?;
    let e = inp.exponent();
    let qp = bounds::pow(&inp.q, &-e, prec)?;
    Ok(qp.scale(&inp.prefactor()))
}

/// The right-hand side as an upper bound, without the `k >= 6` and `q >= 2`
/// hypotheses.
pub(crate) fn normdiff_rhs(inp: &NormdiffInput) -> Result<Rat> {
    let e = inp.exponent();
    if e.is_integer() {
        return Ok(bounds::pow(&inp.q, &-e, bounds::MIN_PRECISION)?.hi * inp.prefactor());
    }
    let (v, _) = bounds::evaluate_until_stable(
        |p| Ok(bounds::pow(&inp.q, &-e.clone(), p)?.scale(&inp.prefactor())),
        20,
    )?;
    Ok(v.hi)
}

/// Upper bound for the evaluation bound: exact for an integer exponent,
/// otherwise rounded up after precision doubling to 20 stable digits.
pub fn normdiff_bound(inp: &NormdiffInput) -> Result<Rat> {
    inp.check()?;
    if inp.exponent().is_integer() {
        return Ok(normdiff_bound_at(inp, bounds::MIN_PRECISION)?.hi);
    }
    let (e, _) = bounds::evaluate_until_stable(|p| normdiff_bound_at(inp, p), 20)?;
    Ok(e.hi)
}
