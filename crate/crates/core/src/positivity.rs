//! Intersection numbers on the blowup of the projective plane at `n` points
//! and the explicit positivity thresholds for the family
//! `L - t(E_1 + ... + E_d) - mu E_(d+1)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{opt_rat_str, rat_str};
use crate::numfield::FieldContext;
use crate::polyops::{FieldPoint, MultiIndex};
use crate::rat::{ceil_int, floor_int, fmt_rat, int, min_rat, Rat};
use crate::{linalg, polyops::BivarPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlowupSurface {
    /// Number of blown-up points, `d` or `d + 1`.
    pub n: usize,
    /// Degree of the curve through the first `d` points.
    pub m: u32,
    pub d: usize,
}

impl BlowupSurface {
    pub fn new(n: usize, m: u32, d: usize) -> Result<Self> {
        if d == 0 || m == 0 || (n != d && n != d + 1) {
            return Err(Error::Precondition(format!(
                "invalid blowup: n = {n}, m = {m}, d = {d}"
            )));
        }
        Ok(BlowupSurface { n, m, d })
    }

    pub fn line(&self) -> DivisorClass {
        DivisorClass::new(int(1), vec![Rat::zero(); self.n])
    }

    /// `E_i` for `i` in `0..n`.
    pub fn exceptional(&self, i: usize) -> DivisorClass {
        let mut e = vec![Rat::zero(); self.n];
        e[i] = int(-1);
        DivisorClass::new(Rat::zero(), e)
    }

    /// `L - t (E_1 + ... + E_d)`.
    pub fn l_t(&self, t: &Rat) -> DivisorClass {
        let mut e = vec![t.clone(); self.d];
        e.resize(self.n, Rat::zero());
        DivisorClass::new(int(1), e)
    }

    /// Class of the degree-`m` curve through the first `d` points.
    pub fn curve(&self) -> DivisorClass {
        let mut e = vec![int(1); self.d];
        e.resize(self.n, Rat::zero());
        DivisorClass::new(int(self.m as i64), e)
    }
}

/// The class `a L - sum e_i E_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorClass {
    pub a: Rat,
    pub e: Vec<Rat>,
}

impl DivisorClass {
    pub fn new(a: Rat, e: Vec<Rat>) -> Self {
        DivisorClass { a, e }
    }

    pub fn n(&self) -> usize {
        self.e.len()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        same_surface(self, o)?;
        Ok(DivisorClass::new(
            &self.a + &o.a,
            self.e.iter().zip(&o.e).map(|(x, y)| x + y).collect(),
        ))
    }

    pub fn scale(&self, s: &Rat) -> Self {
        DivisorClass::new(&self.a * s, self.e.iter().map(|x| x * s).collect())
    }
}

fn same_surface(a: &DivisorClass, b: &DivisorClass) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SurfaceMismatch(a.n(), b.n()));
    }
    Ok(())
}

pub fn intersect(d1: &DivisorClass, d2: &DivisorClass) -> Result<Rat> {
    same_surface(d1, d2)?;
    let mut s = &d1.a * &d2.a;
    for (x, y) in d1.e.iter().zip(&d2.e) {
        s -= x * y;
    }
    Ok(s)
}

/// `K = -3L + sum E_i`.
pub fn canonical_class(s: &BlowupSurface) -> DivisorClass {
    DivisorClass::new(int(-3), vec![int(-1); s.n])
}

/// `min{1/m, m/d}`. Also checks that the minimum with `1/sqrt(d)` adjoined is
/// unchanged, using only the integer comparison `d <= m^2`.
pub fn nef_threshold(d: u64, m: u64) -> Rat {
    assert!(d >= 1 && m >= 1);
    let inv_m = Rat::new(BigInt::one(), BigInt::from(m));
    let m_d = Rat::new(BigInt::from(m), BigInt::from(d));
    let t = min_rat(&inv_m, &m_d);
    let sq = d <= m * m;
    // 1/m <= m/d  iff  d <= m^2  iff  1/m <= 1/sqrt(d)
    assert_eq!(inv_m <= m_d, sq);
    // when d > m^2 the minimum is m/d, and m/d < 1/sqrt(d) iff m^2 < d
    debug_assert!(sq || m * m < d);
    t
}

/// Whether `L - t(E_1 + ... + E_d)` lies strictly inside the certified ample
/// range `0 <= t < min{1/m, m/d}`.
pub fn is_ample_family(t: &Rat, d: usize, m: u32) -> Result<bool> {
    if t.is_negative() {
        return Err(Error::Precondition("t must be nonnegative".into()));
    }
    let ok = *t < nef_threshold(d as u64, m as u64);
    if ok {
        let s = BlowupSurface::new(d, m, d)?;
        let lt = s.l_t(t);
        for i in 0..d {
            let v = intersect(&lt, &s.exceptional(i))?;
            if v != *t || (t.is_positive() && !v.is_positive()) {
                return Err(Error::Internal("L_t . E_i != t".into()));
            }
        }
        if intersect(&lt, &s.curve())?.is_negative() || !intersect(&lt, &lt)?.is_positive() {
            return Err(Error::Internal(
                "ample family fails its intersection checks".into(),
            ));
        }
    }
    Ok(ok)
}

/// `(1/2) floor((A(K + 4A) + 1)^2 / A^2 + 3)`.
pub fn fernandez_threshold(a: &DivisorClass, s: &BlowupSurface) -> Result<Rat> {
    let k = canonical_class(s);
    fernandez_with_canonical(a, &k)
}

fn fernandez_with_canonical(a: &DivisorClass, k: &DivisorClass) -> Result<Rat> {
    let a2 = intersect(a, a)?;
    if !a2.is_positive() {
        return Err(Error::Precondition(format!(
            "self-intersection {} is not positive",
            fmt_rat(&a2)
        )));
    }
    let ak = intersect(a, k)?;
    let num = &ak + int(4) * &a2 + int(1);
    let inner = &num * &num / &a2 + int(3);
    Ok(Rat::from_integer(floor_int(&inner)) / int(2))
}

/// Same formula on the plane itself (`K = -3L`).
pub fn fernandez_threshold_plane(a: &Rat) -> Result<Rat> {
    let d = DivisorClass::new(a.clone(), Vec::new());
    fernandez_with_canonical(&d, &DivisorClass::new(int(-3), Vec::new()))
}

fn check_theta_q(theta: &Rat, d: usize, q: u64) -> Result<Rat> {
    let r = int(1) - int(d as i64) * theta * theta;
    if !r.is_positive() {
        return Err(Error::Precondition(format!(
            "1 - d theta^2 = {} is not positive",
            fmt_rat(&r)
        )));
    }
    if q == 0 || BigInt::from(q) < *theta.denom() {
        return Err(Error::Precondition(format!(
            "Q = {q} is below the denominator of theta = {}",
            fmt_rat(theta)
        )));
    }
    Ok(r)
}

/// `l(theta) = (1/2) ceil(((-3 + d theta) Q + 4 Q^2 (1 - d theta^2) + 1)^2
/// / (Q^2 (1 - d theta^2)) + 3)`.
pub fn matsusaka_l(theta: &Rat, d: usize, q: u64) -> Result<Rat> {
    Ok(matsusaka_inner(theta, d, q)?.1)
}

/// The exact rational inside the ceiling, and `l(theta)`.
pub fn matsusaka_inner(theta: &Rat, d: usize, q: u64) -> Result<(Rat, Rat)> {
    let r = check_theta_q(theta, d, q)?;
    let qr = int(q as i64);
    let num = (int(-3) + int(d as i64) * theta) * &qr + int(4) * &qr * &qr * &r + int(1);
    let inner = &num * &num / (&qr * &qr * &r) + int(3);
    let l = Rat::from_integer(ceil_int(&inner)) / int(2);
    Ok((inner, l))
}

/// `1 / (Q l(theta))`.
pub fn extra_point_seshadri_bound(theta: &Rat, d: usize, q: u64) -> Result<Rat> {
    let l = matsusaka_l(theta, d, q)?;
    Ok((int(q as i64) * l).recip())
}

/// Self-intersection of a class in the certified nef chamber
/// `L - theta sum_(i<=d) E_i - mu E_(d+1)` (with `mu` absent when `n = d`).
pub fn volume_nef(dc: &DivisorClass, s: &BlowupSurface, q: u64) -> Result<Rat> {
    if dc.n() != s.n {
        return Err(Error::SurfaceMismatch(dc.n(), s.n));
    }
    let outside = |why: &str| {
        Err(Error::Precondition(format!(
            "outside the certified nef chamber: {why}"
        )))
    };
    if !dc.a.is_one() {
        return outside("coefficient of L is not 1");
    }
    let theta = dc.e[0].clone();
    if dc.e[..s.d].iter().any(|x| *x != theta) {
        return outside("unequal multiplicities at the conjugate points");
    }
    if theta.is_negative() || theta > nef_threshold(s.d as u64, s.m as u64) {
        return outside("theta beyond the nef threshold");
    }
    if s.n == s.d + 1 {
        let mu = &dc.e[s.d];
        if mu.is_negative() {
            return outside("negative mu");
        }
        if !mu.is_zero() && *mu > extra_point_seshadri_bound(&theta, s.d, q)? {
            return outside("mu beyond the Seshadri bound at the extra point");
        }
    }
    intersect(dc, dc)
}

/// `mu^2`, checked against the difference of the two volumes.
pub fn volume_drop(theta: &Rat, mu: &Rat, d: usize, m: u32, q: u64) -> Result<Rat> {
    if *theta >= nef_threshold(d as u64, m as u64) {
        return Err(Error::Precondition(
            "theta must be below min{1/m, m/d}".into(),
        ));
    }
    let s = BlowupSurface::new(d + 1, m, d)?;
    let base = s.l_t(theta);
    let mut e = base.e.clone();
    e[d] = mu.clone();
    let lowered = DivisorClass::new(int(1), e);
    let diff = volume_nef(&base, &s, q)? - volume_nef(&lowered, &s, q)?;
    let mu2 = mu * mu;
    if diff != mu2 {
        return Err(Error::Internal("volume drop differs from mu^2".into()));
    }
    Ok(mu2)
}

/// Whether some nonzero polynomial of degree at most `m` vanishes at
/// `(a1, a2)`, hence at every conjugate pair.
pub fn curve_existence_check(ctx: &FieldContext, m: u32) -> bool {
    let monos = MultiIndex::up_to(m);
    let pt = FieldPoint::new(&ctx.x1, &ctx.x2, m);
    // rows: field coordinates; columns: monomials
    let mut rows = vec![Vec::with_capacity(monos.len()); ctx.d];
    for j in &monos {
        let v = pt.eval(&BivarPoly::monomial(m, j.j1, j.j2, int(1)).expect("j1 + j2 <= m"));
        for (h, c) in v.coords().iter().enumerate() {
            rows[h].push(c.clone());
        }
    }
    linalg::rat_rank(&rows) < monos.len()
}

/// Everything the `positivity` subcommand prints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PositivityReport {
    pub d: usize,
    pub m: u32,
    #[serde(with = "rat_str")]
    pub theta: Rat,
    pub q: u64,
    #[serde(with = "rat_str")]
    pub threshold: Rat,
    pub ample: bool,
    #[serde(with = "rat_str")]
    pub l_theta: Rat,
    #[serde(with = "rat_str")]
    pub seshadri_bound: Rat,
    #[serde(with = "opt_rat_str", default)]
    pub volume: Option<Rat>,
    #[serde(with = "opt_rat_str", default)]
    pub mu: Option<Rat>,
    #[serde(with = "opt_rat_str", default)]
    pub volume_with_mu: Option<Rat>,
    #[serde(with = "opt_rat_str", default)]
    pub volume_drop: Option<Rat>,
}

/// Thresholds and volumes for `L - theta (E_1 + ... + E_d) - mu E_(d+1)`.
/// `q` defaults to the denominator of `theta`.
pub fn positivity_report(
    d: usize,
    m: u32,
    theta: &Rat,
    mu: Option<&Rat>,
    q: Option<u64>,
) -> Result<PositivityReport> {
    let q = match q {
        Some(q) => q,
        None => theta
            .denom()
            .try_into()
            .map_err(|_| Error::InvalidInput("denominator of theta too large".into()))?,
    };
    let s = BlowupSurface::new(d + 1, m, d)?;
    let threshold = nef_threshold(d as u64, m as u64);
    let ample = is_ample_family(theta, d, m)?;
    let l_theta = matsusaka_l(theta, d, q)?;
    let seshadri_bound = extra_point_seshadri_bound(theta, d, q)?;
    let volume = volume_nef(&s.l_t(theta), &s, q).ok();
    let (mut volume_with_mu, mut drop) = (None, None);
    if let Some(mu) = mu {
        let mut e = vec![theta.clone(); d];
        e.push(mu.clone());
        volume_with_mu = Some(volume_nef(&DivisorClass::new(int(1), e), &s, q)?);
        drop = Some(volume_drop(theta, mu, d, m, q)?);
    }
    Ok(PositivityReport {
        d,
        m,
        theta: theta.clone(),
        q,
        threshold,
        ample,
        l_theta,
        seshadri_bound,
        volume,
        mu: mu.cloned(),
        volume_with_mu,
        volume_drop: drop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use proptest::prelude::*;

    #[test]
    fn intersection_numbers() {
        let t = rat(2, 7);
        let s = BlowupSurface::new(4, 2, 4).unwrap();
        let lt = s.l_t(&t);
        assert_eq!(intersect(&lt, &s.exceptional(0)).unwrap(), t);
        assert_eq!(intersect(&lt, &s.curve()).unwrap(), int(2) - int(4) * &t);
        assert_eq!(intersect(&lt, &lt).unwrap(), int(1) - int(4) * &t * &t);
        let other = BlowupSurface::new(5, 2, 4).unwrap().line();
        assert!(matches!(
            intersect(&lt, &other),
            Err(Error::SurfaceMismatch(4, 5))
        ));
    }

    #[test]
    fn canonical_numbers() {
        let s = BlowupSurface::new(5, 2, 4).unwrap();
        let k = canonical_class(&s);
        assert_eq!(intersect(&k, &s.line()).unwrap(), int(-3));
        assert_eq!(intersect(&k, &s.exceptional(2)).unwrap(), int(-1));
        let th = rat(5, 12);
        assert_eq!(intersect(&k, &s.l_t(&th)).unwrap(), int(-3) + int(4) * &th);
    }

    #[test]
    fn thresholds() {
        assert_eq!(nef_threshold(4, 2), rat(1, 2));
        assert_eq!(nef_threshold(1, 1), int(1));
        assert_eq!(nef_threshold(9, 2), rat(2, 9));
        assert!(is_ample_family(&rat(5, 12), 4, 2).unwrap());
        assert!(!is_ample_family(&rat(1, 2), 4, 2).unwrap());
        assert!(is_ample_family(&int(0), 3, 1).unwrap());
    }

    #[test]
    fn matsusaka_values() {
        let (inner, l) = matsusaka_inner(&rat(5, 12), 4, 12).unwrap();
        assert_eq!(inner, rat(25921, 44) + int(3));
        assert_eq!(l, rat(593, 2));
        let (inner, l) = matsusaka_inner(&rat(3, 8), 2, 8).unwrap();
        assert_eq!(inner, rat(27889, 46) + int(3));
        assert_eq!(l, int(305));
        assert_eq!(matsusaka_l(&int(0), 1, 1).unwrap(), rat(7, 2));
        assert_eq!(
            extra_point_seshadri_bound(&rat(5, 12), 4, 12).unwrap(),
            rat(1, 3558)
        );
        assert_eq!(
            extra_point_seshadri_bound(&rat(3, 8), 2, 8).unwrap(),
            rat(1, 2440)
        );
        assert!(matsusaka_l(&rat(5, 12), 4, 6).is_err());
        assert!(matsusaka_l(&int(1), 1, 1).is_err());
    }

    #[test]
    fn fernandez_values() {
        assert_eq!(fernandez_threshold_plane(&int(1)).unwrap(), rat(7, 2));
        let s = BlowupSurface::new(5, 2, 4).unwrap();
        let a = s.l_t(&rat(5, 12)).scale(&int(12));
        let f = fernandez_threshold(&a, &s).unwrap();
        let l = matsusaka_l(&rat(5, 12), 4, 12).unwrap();
        assert!(l >= f && &l - &f <= rat(3, 2));
        let flat = DivisorClass::new(int(1), vec![int(1), int(0), int(0), int(0), int(0)]);
        assert!(fernandez_threshold(&flat, &s).is_err());
    }

    #[test]
    fn volumes() {
        let s = BlowupSurface::new(4, 2, 4).unwrap();
        assert_eq!(
            volume_nef(&s.l_t(&rat(5, 12)), &s, 12).unwrap(),
            rat(11, 36)
        );
        assert_eq!(volume_nef(&s.line(), &s, 1).unwrap(), int(1));
        assert!(volume_nef(&s.l_t(&rat(3, 5)), &s, 5).is_err());
        assert_eq!(
            volume_drop(&rat(5, 12), &Rat::zero(), 4, 2, 12).unwrap(),
            Rat::zero()
        );
        assert_eq!(
            volume_drop(&rat(5, 12), &rat(1, 3558), 4, 2, 12).unwrap(),
            rat(1, 12659364)
        );
        assert!(volume_drop(&rat(5, 12), &rat(1, 3557), 4, 2, 12).is_err());
    }

    fn arb_rat(max: i64) -> impl Strategy<Value = Rat> {
        (-max..=max, 1..=max).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_class(n: usize) -> impl Strategy<Value = DivisorClass> {
        (arb_rat(20), proptest::collection::vec(arb_rat(20), n))
            .prop_map(|(a, e)| DivisorClass::new(a, e))
    }

    proptest! {
        #[test]
        fn intersection_is_bilinear_and_symmetric(
            (x, y, z) in (1usize..6).prop_flat_map(|n| (arb_class(n), arb_class(n), arb_class(n))),
            s in arb_rat(9),
        ) {
            prop_assert_eq!(intersect(&x, &y).unwrap(), intersect(&y, &x).unwrap());
            let lhs = intersect(&x.scale(&s).add(&y).unwrap(), &z).unwrap();
            let rhs = &s * intersect(&x, &z).unwrap() + intersect(&y, &z).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn volume_drop_is_mu_squared(
            d in 1usize..12,
            m in 1u32..5,
            num in 0i64..1000,
            mu_num in 0i64..=1000,
        ) {
            let t = nef_threshold(d as u64, m as u64);
            let theta = &t * rat(num, 1000);
            let q: u64 = theta.denom().try_into().unwrap();
            prop_assume!(int(1) - int(d as i64) * &theta * &theta > Rat::zero());
            let mu = extra_point_seshadri_bound(&theta, d, q).unwrap() * rat(mu_num, 1000);
            prop_assert_eq!(volume_drop(&theta, &mu, d, m, q).unwrap(), &mu * &mu);
        }

        #[test]
        fn ceiling_l_dominates_floor_threshold(d in 1usize..10, m in 1u32..5, num in 1i64..100) {
            let theta = nef_threshold(d as u64, m as u64) * rat(num, 100);
            let q: u64 = theta.denom().try_into().unwrap();
            let l = matsusaka_l(&theta, d, q).unwrap();
            let s = BlowupSurface::new(d + 1, m, d).unwrap();
            let a = s.l_t(&theta).scale(&int(q as i64));
            let f = fernandez_threshold(&a, &s).unwrap();
            prop_assert!(l >= f);
            prop_assert!(&l - &f <= rat(3, 2));
        }
    }

    #[test]
    fn min_identity_grid() {
        for m in 1..=10u64 {
            for d in 1..=100u64 {
                let t = nef_threshold(d, m);
                // t <= 1/sqrt(d) iff t^2 d <= 1
                assert!(&t * &t * int(d as i64) <= int(1));
            }
        }
    }

    #[test]
    fn curve_existence() {
        use crate::numfield::{IntPolynomial, RealAlgebraic, DEFAULT_REFINE_CAP};
        let sqrt = |n: i64| {
            RealAlgebraic::new(&IntPolynomial::from_i64(&[-n, 0, 1]), int(1), int(n)).unwrap()
        };
        let ctx = FieldContext::build(&sqrt(2), &sqrt(3), 160, DEFAULT_REFINE_CAP).unwrap();
        assert!(curve_existence_check(&ctx, 2));
        assert!(!curve_existence_check(&ctx, 1));
        let r = RealAlgebraic::rational(&rat(2, 3));
        let ctx = FieldContext::build(&r, &r, 10, DEFAULT_REFINE_CAP).unwrap();
        assert!(curve_existence_check(&ctx, 1));
    }

    #[test]
    fn report_for_reference_family() {
        let r = positivity_report(4, 2, &rat(5, 12), Some(&rat(1, 3558)), None).unwrap();
        assert_eq!(r.threshold, rat(1, 2));
        assert_eq!(r.l_theta, rat(593, 2));
        assert_eq!(r.seshadri_bound, rat(1, 3558));
        assert_eq!(r.volume, Some(rat(11, 36)));
        assert_eq!(r.volume_drop, Some(rat(1, 12659364)));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<PositivityReport>(&json).unwrap(), r);
    }
}
