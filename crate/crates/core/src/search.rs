//! Exhaustive enumeration of simultaneous approximations
//! `|a_i - p_i / q| <= N q^(-delta)` with exact certificates, and a check of
//! the lower-bound chain for an auxiliary polynomial at a hit.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::effectivity::ProblemInstance;
use crate::error::{Error, Result};
use crate::io::{big_str, opt_rat_str, rat_str};
use crate::numfield::{RatPoly, RealAlgebraic};
use crate::polyops::{
    self, index_with_witness, BivarPoly, Index, MultiIndex, NormdiffInput, Weights,
};
use crate::rat::{floor_int, int, Rat};

/// Number of consecutive denominators handled by one parallel task.
pub const BLOCK: u64 = 256;

#[derive(Clone, Debug)]
pub struct SearchQuery {
    pub instance: ProblemInstance,
    pub multiplier: BigInt,
    pub q_min: u64,
    pub q_max: u64,
    pub refine_cap: u64,
}

impl SearchQuery {
    pub fn new(
        instance: ProblemInstance,
        multiplier: BigInt,
        q_min: u64,
        q_max: u64,
        refine_cap: u64,
    ) -> Result<Self> {
        if q_min == 0 || q_min > q_max {
            return Err(Error::InvalidInput(format!(
                "bad denominator range {q_min}..={q_max}"
            )));
        }
        if !multiplier.is_positive() {
            return Err(Error::InvalidInput("multiplier must be positive".into()));
        }
        Ok(SearchQuery {
            instance,
            multiplier,
            q_min,
            q_max,
            refine_cap,
        })
    }

    fn with_range(&self, q_min: u64, q_max: u64) -> Self {
        SearchQuery {
            q_min,
            q_max,
            ..self.clone()
        }
    }
}

/// Rational enclosure of `N^v q^(-u) - |a - p/q|^v` where `delta = u / v`.
/// The inequality holds iff the true value is nonnegative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Margin {
    #[serde(with = "rat_str")]
    pub lo: Rat,
    #[serde(with = "rat_str")]
    pub hi: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchHit {
    #[serde(with = "big_str")]
    pub p1: BigInt,
    #[serde(with = "big_str")]
    pub p2: BigInt,
    pub q: u64,
    pub margins: [Margin; 2],
}

impl SearchHit {
    pub fn key(&self) -> (u64, &BigInt, &BigInt) {
        (self.q, &self.p1, &self.p2)
    }
}

/// Decides `|a - c|^v <= r` exactly. Returns the certifying margin
/// enclosure of `r - |a - c|^v` and the verdict.
fn power_margin(a: &RealAlgebraic, c: &Rat, r: &Rat, v: u32, cap: u64) -> Result<(Margin, bool)> {
    let pw = |x: &Rat| num_traits::pow(x.abs(), v as usize);
    if let Some(x) = a.as_rational() {
        let m = r - pw(&(x - c));
        let ok = !m.is_negative();
        return Ok((
            Margin {
                lo: m.clone(),
                hi: m,
            },
            ok,
        ));
    }
    let mut cur = a.clone();
    let mut equality_checked = false;
    let mut steps = 0u64;
    loop {
        let (lo, hi) = (cur.lo() - c, cur.hi() - c);
        if lo.is_positive() || hi.is_negative() {
            let (small, large) = if lo.is_positive() {
                (lo, hi)
            } else {
                (-hi, -lo)
            };
            let m = Margin {
                lo: r - pw(&large),
                hi: r - pw(&small),
            };
            if !m.lo.is_negative() {
                return Ok((m, true));
            }
            if m.hi.is_negative() {
                return Ok((m, false));
            }
            if !equality_checked {
                equality_checked = true;
                let sign = if cur.lo() > c { int(1) } else { int(-1) };
                if hits_exactly(a, c, r, v, &sign) {
                    let z = Margin {
                        lo: Rat::zero(),
                        hi: Rat::zero(),
                    };
                    return Ok((z, true));
                }
            }
        }
        if steps >= cap {
            return Err(Error::CapExceeded {
                what: "interval refinement",
                cap,
            });
        }
        cur = cur.refine(&(cur.width() / int(2)), cap)?;
        steps += 1;
    }
}

/// Whether `s (a - c)^v = r`, by divisibility of `s (x - c)^v - r` by the
/// minimal polynomial of `a`.
fn hits_exactly(a: &RealAlgebraic, c: &Rat, r: &Rat, v: u32, s: &Rat) -> bool {
    let lin = RatPoly::new(vec![-c.clone(), int(1)]);
    let h = lin.pow(v as usize).scale(s) - RatPoly::constant(r.clone());
    h.rem(&a.minpoly().to_rat()).is_zero()
}

fn split_delta(delta: &Rat) -> Result<(u32, u32)> {
    let u: u32 = delta
        .numer()
        .try_into()
        .map_err(|_| Error::InvalidInput("delta numerator too large".into()))?;
    let v: u32 = delta
        .denom()
        .try_into()
        .map_err(|_| Error::InvalidInput("delta denominator too large".into()))?;
    Ok((u, v))
}

/// `N^v / q^u`.
fn power_bound(n: &BigInt, q: u64, u: u32, v: u32) -> Rat {
    Rat::new(
        num_traits::pow(n.clone(), v as usize),
        num_traits::pow(BigInt::from(q), u as usize),
    )
}

/// Certified check of one coordinate.
pub fn verify_coordinate(
    a: &RealAlgebraic,
    p: &BigInt,
    q: u64,
    n: &BigInt,
    delta: &Rat,
    cap: u64,
) -> Result<(Margin, bool)> {
    let (u, v) = split_delta(delta)?;
    let c = Rat::new(p.clone(), BigInt::from(q));
    power_margin(a, &c, &power_bound(n, q, u, v), v, cap)
}

/// Whether both inequalities hold for `(p1, p2, q)`.
pub fn verify_hit(
    p1: &BigInt,
    p2: &BigInt,
    q: u64,
    inst: &ProblemInstance,
    n: &BigInt,
    cap: u64,
) -> Result<bool> {
    Ok(
        verify_coordinate(&inst.alpha1, p1, q, n, &inst.delta, cap)?.1
            && verify_coordinate(&inst.alpha2, p2, q, n, &inst.delta, cap)?.1,
    )
}

/// Candidates `p` with `p/q` inside `[lo - b, hi + b]`.
fn candidate_range(a: &RealAlgebraic, q: u64, b: &Rat) -> (BigInt, BigInt) {
    let qr = int(q as i64);
    let lo = floor_int(&((a.lo() - b) * &qr));
    let hi = crate::rat::ceil_int(&((a.hi() + b) * &qr));
    (lo, hi)
}

/// All integers `p` with `|a - p/q| <= bound`.
pub fn best_candidates(a: &RealAlgebraic, q: u64, bound: &Rat, cap: u64) -> Result<Vec<BigInt>> {
    if q == 0 || bound.is_negative() {
        return Err(Error::Precondition("need q >= 1 and bound >= 0".into()));
    }
    let a = if bound.is_positive() && !a.is_rational() && a.width() >= bound / int(2) {
        a.refine(&(bound / int(4)), cap)?
    } else {
        a.clone()
    };
    let (lo, hi) = candidate_range(&a, q, bound);
    let mut out = Vec::new();
    let mut p = lo;
    while p <= hi {
        let c = Rat::new(p.clone(), BigInt::from(q));
        if power_margin(&a, &c, bound, 1, cap)?.1 {
            out.push(p.clone());
        }
        p += 1;
    }
    Ok(out)
}

/// Rational upper bound for `N q^(-delta)`, for candidate generation only.
fn loose_bound(n: &BigInt, q: u64, delta: &Rat) -> Rat {
    let e = floor_int(delta);
    let e: u32 = (&e).try_into().unwrap_or(0);
    Rat::new(n.clone(), num_traits::pow(BigInt::from(q), e as usize))
}

fn coordinate_hits(
    a: &RealAlgebraic,
    q: u64,
    n: &BigInt,
    delta: &Rat,
    cap: u64,
) -> Result<Vec<(BigInt, Margin)>> {
    let (lo, hi) = candidate_range(a, q, &loose_bound(n, q, delta));
    let mut out = Vec::new();
    let mut p = lo;
    while p <= hi {
        let (m, ok) = verify_coordinate(a, &p, q, n, delta, cap)?;
        if ok {
            out.push((p.clone(), m));
        }
        p += 1;
    }
    Ok(out)
}

fn scan(
    query: &SearchQuery,
    a1: &RealAlgebraic,
    a2: &RealAlgebraic,
    qs: std::ops::RangeInclusive<u64>,
) -> Result<Vec<SearchHit>> {
    let inst = &query.instance;
    let mut hits = Vec::new();
    for q in qs {
        let h1 = coordinate_hits(a1, q, &query.multiplier, &inst.delta, query.refine_cap)?;
        if h1.is_empty() {
            continue;
        }
        let h2 = coordinate_hits(a2, q, &query.multiplier, &inst.delta, query.refine_cap)?;
        for (p1, m1) in &h1 {
            for (p2, m2) in &h2 {
                hits.push(SearchHit {
                    p1: p1.clone(),
                    p2: p2.clone(),
                    q,
                    margins: [m1.clone(), m2.clone()],
                });
            }
        }
    }
    Ok(hits)
}

/// Working width for the interval of each coordinate. Fixed, so that
/// margins do not depend on how the range is split.
fn prepare(a: &RealAlgebraic, cap: u64) -> Result<RealAlgebraic> {
    if a.is_rational() {
        return Ok(a.clone());
    }
    a.refine(&Rat::new(BigInt::one(), BigInt::one() << 32), cap)
}

/// Every certified hit with `q_min <= q <= q_max`, sorted by `(q, p1, p2)`.
pub fn search(query: &SearchQuery) -> Result<Vec<SearchHit>> {
    let a1 = prepare(&query.instance.alpha1, query.refine_cap)?;
    let a2 = prepare(&query.instance.alpha2, query.refine_cap)?;
    let starts: Vec<u64> = (query.q_min..=query.q_max)
        .step_by(BLOCK as usize)
        .collect();
    let blocks = starts
        .par_iter()
        .map(|&s| scan(query, &a1, &a2, s..=(s + BLOCK - 1).min(query.q_max)))
        .collect::<Result<Vec<_>>>()?;
    let mut hits: Vec<SearchHit> = blocks.into_iter().flatten().collect();
    hits.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(hits)
}

/// Runs [`search`] on `parts` contiguous sub-ranges and concatenates.
pub fn search_partitioned(query: &SearchQuery, parts: u64) -> Result<Vec<SearchHit>> {
    let total = query.q_max - query.q_min + 1;
    let step = total.div_ceil(parts.max(1));
    let mut out = Vec::new();
    let mut s = query.q_min;
    while s <= query.q_max {
        let e = (s + step - 1).min(query.q_max);
        out.extend(search(&query.with_range(s, e))?);
        s = e + 1;
    }
    Ok(out)
}

/// Data about the instance the chain needs beyond the polynomial.
#[derive(Clone, Debug)]
pub struct ChainContext {
    pub delta: Rat,
    pub b: BigInt,
    pub maxabs: Rat,
    pub multiplier: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ChainReport {
    /// Index at the hit is below `theta0`.
    pub applicable: bool,
    pub index_at_hit: String,
    pub witness: Option<MultiIndex>,
    #[serde(with = "opt_rat_str", default)]
    pub value: Option<Rat>,
    /// The reduced denominator divides `q^k`.
    pub denominator_ok: Option<bool>,
    /// `|value| <= 64^k |P| maxabs^k N^(2k) q^(-k delta (theta - theta0))`.
    pub normdiff_ok: Option<bool>,
    /// `q^(delta (theta - theta0) - 1) <= 64 B maxabs N^2`, when `|P| <= B^k`.
    pub derived_ok: Option<bool>,
}

/// Evaluates the chain of inequalities at a hit.
pub fn check_lower_chain(
    p: &BivarPoly,
    hit: (&BigInt, &BigInt, u64),
    cx: &ChainContext,
    theta: &Rat,
    theta0: &Rat,
) -> Result<ChainReport> {
    if !p.is_integral() || p.k() < 6 {
        return Err(Error::Precondition(
            "need an integral polynomial with k >= 6".into(),
        ));
    }
    let (p1, p2, q) = hit;
    let k = p.k();
    let qb = BigInt::from(q);
    let x = polyops::RationalPoint::new(
        Rat::new(p1.clone(), qb.clone()),
        Rat::new(p2.clone(), qb.clone()),
    );
    let (ind, witness) = index_with_witness(p, &x, &Weights::equal(k));
    let mut report = ChainReport {
        applicable: false,
        index_at_hit: ind.to_string(),
        witness,
        value: None,
        denominator_ok: None,
        normdiff_ok: None,
        derived_ok: None,
    };
    let j = match (&ind, witness) {
        (Index::Finite(i), Some(j)) if i < theta0 => j,
        _ => return Ok(report),
    };
    report.applicable = true;
    let value = p.hasse_derivative(&j).eval_rational(p1, p2, &qb);
    let qk = num_traits::pow(qb.clone(), k as usize);
    report.denominator_ok = Some((&qk % value.denom()).is_zero());
    let height = p.naive_height();
    let inp = NormdiffInput {
        k,
        height: height.clone(),
        maxabs: cx.maxabs.clone(),
        nmult: Rat::from_integer(cx.multiplier.clone()),
        q: Rat::from_integer(qb.clone()),
        delta: cx.delta.clone(),
        theta: theta.clone(),
        theta0: theta0.clone(),
    };
    report.normdiff_ok = Some(value.abs() <= polyops::normdiff_rhs(&inp)?);
    let bk = Rat::from_integer(num_traits::pow(cx.b.clone(), k as usize));
    if height <= bk {
        let e = &cx.delta * (theta - theta0) - int(1);
        let rhs = int(64)
            * Rat::from_integer(cx.b.clone() * &cx.multiplier * &cx.multiplier)
            * &cx.maxabs;
        report.derived_ok = Some(rational_power_le(&qb, &e, &rhs)?);
    }
    report.value = Some(value);
    Ok(report)
}

/// `q^e <= r` for a positive rational `e = u / v`, via `q^u <= r^v`.
fn rational_power_le(q: &BigInt, e: &Rat, r: &Rat) -> Result<bool> {
    let u: usize = e
        .numer()
        .try_into()
        .map_err(|_| Error::Precondition("exponent too large".into()))?;
    let v: usize = e
        .denom()
        .try_into()
        .map_err(|_| Error::Precondition("exponent too large".into()))?;
    Ok(Rat::from_integer(num_traits::pow(q.clone(), u)) <= num_traits::pow(r.clone(), v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{IntPolynomial, DEFAULT_REFINE_CAP};
    use crate::rat::rat;

    fn sqrt(n: i64) -> RealAlgebraic {
        RealAlgebraic::new(&IntPolynomial::from_i64(&[-n, 0, 1]), int(1), int(n)).unwrap()
    }

    fn reference(delta: Rat) -> ProblemInstance {
        ProblemInstance::new(sqrt(2), sqrt(3), 2, delta).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn candidates() {
        assert_eq!(
            best_candidates(&sqrt(2), 1, &int(1), 100).unwrap(),
            big(&[1, 2])
        );
        let half = RealAlgebraic::rational(&rat(3, 2));
        assert_eq!(
            best_candidates(&half, 2, &Rat::zero(), 100).unwrap(),
            big(&[3])
        );
        assert!(best_candidates(&sqrt(2), 10, &rat(1, 1000), 100)
            .unwrap()
            .is_empty());
        assert_eq!(
            best_candidates(&sqrt(2), 5, &rat(1, 10), 100).unwrap(),
            big(&[7])
        );
    }

    #[test]
    fn verification() {
        let inst = reference(int(3));
        let one = BigInt::one();
        assert!(verify_hit(&BigInt::from(1), &BigInt::from(2), 1, &inst, &one, 100).unwrap());
        assert!(!verify_hit(&BigInt::from(3), &BigInt::from(4), 2, &inst, &one, 100).unwrap());
        let r = ProblemInstance::new(
            RealAlgebraic::rational(&rat(1, 2)),
            RealAlgebraic::rational(&rat(1, 2)),
            1,
            int(40),
        )
        .unwrap();
        assert!(verify_hit(&BigInt::from(3), &BigInt::from(3), 6, &r, &one, 100).unwrap());
    }

    #[test]
    fn boundary_equality_is_a_hit() {
        // |sqrt2 - 0| = 2 * 2^(-1/2)
        let (m, ok) = verify_coordinate(
            &sqrt(2),
            &BigInt::zero(),
            2,
            &BigInt::from(2),
            &rat(1, 2),
            100,
        )
        .unwrap();
        assert!(ok);
        assert!(m.lo.is_zero() && m.hi.is_zero());
        let (_, ok) = verify_coordinate(
            &sqrt(2),
            &BigInt::zero(),
            2,
            &BigInt::one(),
            &rat(1, 2),
            100,
        )
        .unwrap();
        assert!(!ok);
    }

    #[test]
    fn small_search() {
        let q =
            SearchQuery::new(reference(int(3)), BigInt::one(), 1, 10, DEFAULT_REFINE_CAP).unwrap();
        let hits = search(&q).unwrap();
        let keys: Vec<_> = hits
            .iter()
            .map(|h| (h.q, h.p1.clone(), h.p2.clone()))
            .collect();
        let b = |x: i64| BigInt::from(x);
        assert_eq!(
            keys,
            vec![
                (1, b(1), b(1)),
                (1, b(1), b(2)),
                (1, b(2), b(1)),
                (1, b(2), b(2))
            ]
        );
        assert_eq!(search_partitioned(&q, 3).unwrap(), hits);
        let q =
            SearchQuery::new(reference(int(50)), BigInt::one(), 2, 40, DEFAULT_REFINE_CAP).unwrap();
        assert!(search(&q).unwrap().is_empty());
    }

    #[test]
    fn rational_search() {
        let half = RealAlgebraic::rational(&rat(1, 2));
        let inst = ProblemInstance::new(half.clone(), half, 1, int(2)).unwrap();
        let q = SearchQuery::new(inst, BigInt::one(), 1, 12, DEFAULT_REFINE_CAP).unwrap();
        let hits = search(&q).unwrap();
        for q in (2..=12).step_by(2) {
            assert!(hits
                .iter()
                .any(|h| h.q == q && h.p1 == BigInt::from(q / 2) && h.p2 == h.p1));
        }
        for h in &hits {
            assert!(verify_hit(&h.p1, &h.p2, h.q, &q.instance, &BigInt::one(), 100).unwrap());
        }
    }

    #[test]
    fn chain_on_monomial() {
        let p = BivarPoly::monomial(6, 3, 0, int(1)).unwrap();
        let cx = ChainContext {
            delta: int(3),
            b: BigInt::from(16),
            maxabs: int(1),
            multiplier: BigInt::one(),
        };
        let one = BigInt::one();
        let r = check_lower_chain(&p, (&one, &one, 1), &cx, &rat(1, 2), &rat(1, 6)).unwrap();
        assert!(r.applicable);
        assert_eq!(r.denominator_ok, Some(true));
        assert_eq!(r.normdiff_ok, Some(true));
        assert_eq!(r.derived_ok, Some(true));
        let zero = BigInt::zero();
        let r = check_lower_chain(&p, (&zero, &zero, 1), &cx, &rat(1, 2), &rat(1, 6)).unwrap();
        assert!(!r.applicable);
        assert_eq!(r.index_at_hit, "1/2");
    }
}
