//! The constant pipeline: hypotheses, the exponents `theta` and `theta0`, and
//! the bounds `C` and `C0` as exact records with certified logarithms.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::{self, Enclosure};
use crate::error::{Error, Result};
use crate::io::{big_str, big_vec_str, rat_str, AlgebraicLiteral};
use crate::numfield::{default_m0_cap, FieldContext, RealAlgebraic, DEFAULT_REFINE_CAP};
use crate::positivity::{curve_existence_check, matsusaka_l, nef_threshold};
use crate::rat::{fmt_rat, int, max_rat, min_rat, Rat};

/// Significant digits on which the two finest log evaluations must agree.
pub const LOG_DIGITS: u32 = 12;
/// Fractional digits printed for decimal logarithms.
pub const LOG_FRAC_DIGITS: usize = 10;

#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub alpha1: RealAlgebraic,
    pub alpha2: RealAlgebraic,
    /// Degree of the curve through the conjugate points.
    pub m: u32,
    pub delta: Rat,
}

impl ProblemInstance {
    pub fn new(alpha1: RealAlgebraic, alpha2: RealAlgebraic, m: u32, delta: Rat) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("curve degree must be positive".into()));
        }
        if !delta.is_positive() {
            return Err(Error::InvalidInput("delta must be positive".into()));
        }
        Ok(ProblemInstance {
            alpha1,
            alpha2,
            m,
            delta,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Overrides `10 (d1 d2)^2`.
    pub m0_cap: Option<u64>,
    pub refine_cap: u64,
    /// Slack allowed in the upper bound for `max |a_i|`.
    pub slack: Rat,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            m0_cap: None,
            refine_cap: DEFAULT_REFINE_CAP,
            slack: Rat::new(BigInt::one(), BigInt::one() << 20),
        }
    }
}

/// A validated instance and the non-fatal warnings raised on the way.
#[derive(Clone, Debug)]
pub struct Validated {
    pub ctx: FieldContext,
    pub curve_exists: bool,
    pub warnings: Vec<String>,
}

pub fn validate(inst: &ProblemInstance, cfg: &Config) -> Result<Validated> {
    let cap = cfg
        .m0_cap
        .unwrap_or_else(|| default_m0_cap(inst.alpha1.degree(), inst.alpha2.degree()));
    let ctx = FieldContext::build(&inst.alpha1, &inst.alpha2, cap, cfg.refine_cap)?;
    let m = int(inst.m as i64);
    let bound = max_rat(&m, &(int(ctx.d as i64) / &m));
    if inst.delta <= bound {
        return Err(Error::DeltaTooSmall {
            delta: Box::new(inst.delta.clone()),
            bound: Box::new(bound),
        });
    }
    let curve_exists = curve_existence_check(&ctx, inst.m);
    let mut warnings = Vec::new();
    if !curve_exists {
        warnings.push(format!(
            "no nonzero polynomial of degree <= {} vanishes at (alpha1, alpha2)",
            inst.m
        ));
    }
    Ok(Validated {
        ctx,
        curve_exists,
        warnings,
    })
}

fn threshold(d: usize, m: u32) -> Rat {
    nef_threshold(d as u64, m as u64)
}

/// `theta = (1/delta + min{1/m, m/d}) / 2` and its denominator `Q`.
pub fn compute_theta(delta: &Rat, m: u32, d: usize) -> (Rat, BigInt) {
    let theta = (delta.recip() + threshold(d, m)) / int(2);
    let q = theta.denom().clone();
    (theta, q)
}

/// `min{(min{1/m, m/d} - 1/delta) / 4, 1 / (Q l(theta))}`.
pub fn compute_theta0(theta: &Rat, q: &BigInt, d: usize, m: u32, delta: &Rat) -> Result<Rat> {
    let t = threshold(d, m);
    if *theta >= t {
        return Err(Error::Internal(
            "theta is not below the nef threshold".into(),
        ));
    }
    let qq: u64 = q
        .try_into()
        .map_err(|_| Error::Precondition("Q does not fit in 64 bits".into()))?;
    let l = matsusaka_l(theta, d, qq)?;
    let first = (&t - delta.recip()) / int(4);
    let second = (Rat::from_integer(q.clone()) * l).recip();
    let theta0 = min_rat(&first, &second);
    let e = delta * (theta - &theta0);
    let floor = delta * &t / int(4) + Rat::new(BigInt::from(3), BigInt::from(4));
    if theta0 >= *theta || e < floor || e <= Rat::one() {
        return Err(Error::Internal("exponent inequality fails".into()));
    }
    Ok(theta0)
}

/// `8 d M (|m_a| + 1)^d`.
pub fn compute_b(d: usize, big_m: &BigInt, height: &BigInt) -> BigInt {
    BigInt::from(8 * d) * big_m * num_traits::pow(height + 1, d)
}

fn exponent_denominator(delta: &Rat, theta: &Rat, theta0: &Rat) -> Result<Rat> {
    let e = delta * (theta - theta0) - int(1);
    if !e.is_positive() {
        return Err(Error::Precondition(format!(
            "delta (theta - theta0) - 1 = {} is not positive",
            fmt_rat(&e)
        )));
    }
    Ok(e)
}

/// `C = (64 B maxabs N^2)^(1 / (delta (theta - theta0) - 1))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ConstantC {
    #[serde(with = "rat_str")]
    pub base: Rat,
    #[serde(with = "rat_str")]
    pub exponent: Rat,
    pub log10_upper: String,
    pub rounding: String,
}

impl ConstantC {
    pub fn log10_at(&self, prec: u32) -> Result<Enclosure> {
        Ok(bounds::log10(&self.base, prec)?.scale(&self.exponent))
    }
}

pub fn compute_c(
    b: &BigInt,
    maxabs: &Rat,
    nmult: &BigInt,
    delta: &Rat,
    theta: &Rat,
    theta0: &Rat,
) -> Result<ConstantC> {
    let exponent = exponent_denominator(delta, theta, theta0)?.recip();
    let base = int(64) * Rat::from_integer(b * nmult * nmult) * maxabs;
    let mut c = ConstantC {
        base,
        exponent,
        log10_upper: String::new(),
        rounding: "up".into(),
    };
    let (e, _) = bounds::evaluate_until_stable(|p| c.log10_at(p), LOG_DIGITS)?;
    c.log10_upper = bounds::fmt_decimal_up(&e.hi, LOG_FRAC_DIGITS);
    Ok(c)
}

/// `C0 = (outer_factor * inner_base^inner_exponent)^outer_exponent` with
/// `inner_base = 2^10 (d M (|m_a| + 1)^d)^3`, `inner_exponent = 1/theta0^2`
/// and `outer_factor = 64 maxabs N^3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct C0Record {
    #[serde(with = "big_str")]
    pub inner_base: BigInt,
    #[serde(with = "rat_str")]
    pub inner_exponent: Rat,
    #[serde(with = "rat_str")]
    pub outer_factor: Rat,
    #[serde(with = "rat_str")]
    pub outer_exponent: Rat,
    pub log10_upper: String,
    pub rounding: String,
}

impl C0Record {
    pub fn new(
        inner_base: BigInt,
        inner_exponent: Rat,
        outer_factor: Rat,
        outer_exponent: Rat,
    ) -> Self {
        C0Record {
            inner_base,
            inner_exponent,
            outer_factor,
            outer_exponent,
            log10_upper: String::new(),
            rounding: "up".into(),
        }
    }

    pub fn log10_at(&self, prec: u32) -> Result<Enclosure> {
        let inner = bounds::log10(&Rat::from_integer(self.inner_base.clone()), prec + 32)?
            .scale(&self.inner_exponent);
        let outer = bounds::log10(&self.outer_factor, prec + 32)?;
        Ok(inner
            .add(&outer)
            .scale(&self.outer_exponent)
            .round_out(prec))
    }

    fn certify(mut self) -> Result<Self> {
        let (e, _) = bounds::evaluate_until_stable(|p| self.log10_at(p), LOG_DIGITS)?;
        self.log10_upper = bounds::fmt_decimal_up(&e.hi, LOG_FRAC_DIGITS);
        Ok(self)
    }
}

/// Inputs of [`compute_c0`].
#[derive(Clone, Debug)]
pub struct C0Input {
    pub d: usize,
    pub big_m: BigInt,
    pub height: BigInt,
    pub theta0: Rat,
    pub maxabs: Rat,
    pub nmult: BigInt,
    pub delta: Rat,
    pub theta: Rat,
}

pub fn compute_c0(inp: &C0Input) -> Result<C0Record> {
    let outer_exponent = exponent_denominator(&inp.delta, &inp.theta, &inp.theta0)?.recip();
    if !inp.theta0.is_positive() {
        return Err(Error::Precondition("theta0 must be positive".into()));
    }
    let inner_base = BigInt::from(1024)
        * num_traits::pow(
            BigInt::from(inp.d) * &inp.big_m * num_traits::pow(&inp.height + 1, inp.d),
            3,
        );
    let inner_exponent = (&inp.theta0 * &inp.theta0).recip();
    let outer_factor =
        int(64) * &inp.maxabs * Rat::from_integer(num_traits::pow(inp.nmult.clone(), 3));
    C0Record::new(inner_base, inner_exponent, outer_factor, outer_exponent).certify()
}

/// Echo of the instance the constant belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InstanceKey {
    pub alpha1: AlgebraicLiteral,
    pub alpha2: AlgebraicLiteral,
    #[serde(with = "rat_str")]
    pub delta: Rat,
    pub curve_degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EffectivityReport {
    pub instance: InstanceKey,
    pub d: usize,
    #[serde(rename = "M0")]
    pub m0: u64,
    #[serde(rename = "M1", with = "big_str")]
    pub m1: BigInt,
    /// Ascending coefficients of the minimal polynomial of the generator.
    #[serde(with = "big_vec_str")]
    pub m_alpha: Vec<BigInt>,
    #[serde(with = "big_str")]
    pub m_alpha_height: BigInt,
    #[serde(rename = "N", with = "big_str")]
    pub n: BigInt,
    #[serde(rename = "M", with = "big_str")]
    pub big_m: BigInt,
    #[serde(with = "rat_str")]
    pub theta: Rat,
    #[serde(rename = "Q", with = "big_str")]
    pub q: BigInt,
    #[serde(with = "rat_str")]
    pub l_theta: Rat,
    #[serde(with = "rat_str")]
    pub theta0: Rat,
    #[serde(rename = "B", with = "big_str")]
    pub b: BigInt,
    #[serde(with = "rat_str")]
    pub max_abs_upper: Rat,
    #[serde(with = "rat_str")]
    pub exponent_denominator: Rat,
    #[serde(rename = "C")]
    pub c: ConstantC,
    #[serde(rename = "C0Log10Upper")]
    pub c0_log10_upper: String,
    #[serde(rename = "C0Expression")]
    pub c0_expression: C0Record,
    pub curve_exists: bool,
    pub warnings: Vec<String>,
}

pub fn max_abs_upper(a1: &RealAlgebraic, a2: &RealAlgebraic, cfg: &Config) -> Result<Rat> {
    Ok(max_rat(
        &a1.abs_upper_bound(&cfg.slack, cfg.refine_cap)?,
        &a2.abs_upper_bound(&cfg.slack, cfg.refine_cap)?,
    ))
}

/// The full pipeline on a validated instance.
pub fn report_for(
    inst: &ProblemInstance,
    v: &Validated,
    cfg: &Config,
) -> Result<EffectivityReport> {
    let ctx = &v.ctx;
    let (theta, q) = compute_theta(&inst.delta, inst.m, ctx.d);
    let theta0 = compute_theta0(&theta, &q, ctx.d, inst.m, &inst.delta)?;
    let qq: u64 = (&q)
        .try_into()
        .map_err(|_| Error::Precondition("Q too large".into()))?;
    let l_theta = matsusaka_l(&theta, ctx.d, qq)?;
    let b = compute_b(ctx.d, &ctx.m, &ctx.m_alpha_height);
    let maxabs = max_abs_upper(&inst.alpha1, &inst.alpha2, cfg)?;
    let maxabs = if maxabs.is_zero() { int(1) } else { maxabs };
    let exponent_denominator = exponent_denominator(&inst.delta, &theta, &theta0)?;
    let c = compute_c(&b, &maxabs, &ctx.n, &inst.delta, &theta, &theta0)?;
    let c0 = compute_c0(&C0Input {
        d: ctx.d,
        big_m: ctx.m.clone(),
        height: ctx.m_alpha_height.clone(),
        theta0: theta0.clone(),
        maxabs: maxabs.clone(),
        nmult: ctx.n.clone(),
        delta: inst.delta.clone(),
        theta: theta.clone(),
    })?;
    Ok(EffectivityReport {
        instance: InstanceKey {
            alpha1: AlgebraicLiteral::from_number(&inst.alpha1),
            alpha2: AlgebraicLiteral::from_number(&inst.alpha2),
            delta: inst.delta.clone(),
            curve_degree: inst.m,
        },
        d: ctx.d,
        m0: ctx.m0,
        m1: ctx.m1.clone(),
        m_alpha: ctx.m_alpha().coeffs().to_vec(),
        m_alpha_height: ctx.m_alpha_height.clone(),
        n: ctx.n.clone(),
        big_m: ctx.m.clone(),
        theta,
        q,
        l_theta,
        theta0,
        b,
        max_abs_upper: maxabs,
        exponent_denominator,
        c,
        c0_log10_upper: c0.log10_upper.clone(),
        c0_expression: c0,
        curve_exists: v.curve_exists,
        warnings: v.warnings.clone(),
    })
}

pub fn run(inst: &ProblemInstance, cfg: &Config) -> Result<EffectivityReport> {
    let v = validate(inst, cfg)?;
    report_for(inst, &v, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::IntPolynomial;
    use crate::rat::rat;

    fn sqrt(n: i64) -> RealAlgebraic {
        RealAlgebraic::new(&IntPolynomial::from_i64(&[-n, 0, 1]), int(1), int(n)).unwrap()
    }

    fn reference() -> ProblemInstance {
        ProblemInstance::new(sqrt(2), sqrt(3), 2, int(3)).unwrap()
    }

    #[test]
    fn theta_examples() {
        assert_eq!(compute_theta(&int(3), 2, 4), (rat(5, 12), BigInt::from(12)));
        assert_eq!(compute_theta(&int(4), 1, 2), (rat(3, 8), BigInt::from(8)));
        assert_eq!(compute_theta(&int(2), 1, 1), (rat(3, 4), BigInt::from(4)));
    }

    #[test]
    fn theta0_examples() {
        let t = compute_theta0(&rat(5, 12), &BigInt::from(12), 4, 2, &int(3)).unwrap();
        assert_eq!(t, rat(1, 3558));
        let t = compute_theta0(&rat(3, 8), &BigInt::from(8), 2, 1, &int(4)).unwrap();
        assert_eq!(t, rat(1, 2440));
    }

    #[test]
    fn b_examples() {
        let b = compute_b(4, &BigInt::from(11), &BigInt::from(10));
        assert_eq!(b, BigInt::from(5_153_632));
        assert_eq!(
            compute_b(1, &BigInt::from(1), &BigInt::from(1)),
            BigInt::from(16)
        );
        assert_eq!(
            compute_b(4, &BigInt::from(22), &BigInt::from(10)),
            BigInt::from(2 * 5_153_632)
        );
    }

    #[test]
    fn c_base_and_exponent() {
        let c = compute_c(
            &BigInt::from(16),
            &int(1),
            &BigInt::from(1),
            &int(3),
            &int(1),
            &Rat::zero(),
        )
        .unwrap();
        assert_eq!(c.base, int(1024));
        assert_eq!(c.exponent, rat(1, 2));
        assert!(compute_c(
            &BigInt::from(16),
            &int(1),
            &BigInt::from(1),
            &int(1),
            &int(1),
            &Rat::zero()
        )
        .is_err());
        let e = exponent_denominator(&int(3), &rat(5, 12), &rat(1, 3558)).unwrap();
        assert_eq!(e.recip(), rat(2372, 591));
    }

    #[test]
    fn c0_trivial_case() {
        let c0 = compute_c0(&C0Input {
            d: 1,
            big_m: BigInt::from(1),
            height: BigInt::from(1),
            theta0: int(1),
            maxabs: int(1),
            nmult: BigInt::from(1),
            delta: int(3),
            theta: rat(5, 3),
        })
        .unwrap();
        assert_eq!(c0.inner_base, BigInt::from(1024 * 8));
        assert_eq!(c0.inner_exponent, int(1));
        assert_eq!(c0.outer_factor, int(64));
        assert_eq!(c0.outer_exponent, int(1));
        // 2^19
        let l = c0.log10_at(128).unwrap();
        let expected = bounds::log10(&int(1 << 19), 128).unwrap();
        assert!(l.lo <= expected.hi && expected.lo <= l.hi);
    }

    #[test]
    fn validation() {
        let v = validate(&reference(), &Config::default()).unwrap();
        assert_eq!(v.ctx.d, 4);
        assert!(v.curve_exists);
        let low = ProblemInstance::new(sqrt(2), sqrt(3), 2, int(2)).unwrap();
        assert!(matches!(
            validate(&low, &Config::default()),
            Err(Error::DeltaTooSmall { .. })
        ));
        let r = ProblemInstance::new(
            RealAlgebraic::rational(&rat(2, 3)),
            RealAlgebraic::rational(&rat(1, 2)),
            1,
            rat(3, 2),
        )
        .unwrap();
        assert_eq!(validate(&r, &Config::default()).unwrap().ctx.d, 1);
    }

    #[test]
    fn reference_report() {
        let r = run(&reference(), &Config::default()).unwrap();
        assert_eq!(r.theta, rat(5, 12));
        assert_eq!(r.q, BigInt::from(12));
        assert_eq!(r.l_theta, rat(593, 2));
        assert_eq!(r.theta0, rat(1, 3558));
        assert_eq!(r.b, BigInt::from(5_153_632));
        assert_eq!(r.exponent_denominator, rat(591, 2372));
        let lc = bounds::parse_decimal(&r.c.log10_upper).unwrap();
        assert!((lc - bounds::parse_decimal("37.5623417941").unwrap()).abs() < rat(1, 1_000_000));
        let l0 = bounds::parse_decimal(&r.c0_log10_upper).unwrap();
        let oracle = bounds::parse_decimal("1038398634.0905408604").unwrap();
        assert!((l0 - oracle).abs() < rat(1, 1000));
        let json = serde_json::to_string(&r).unwrap();
        let back: EffectivityReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(run(&reference(), &Config::default()).unwrap(), r);
    }

    #[test]
    fn c0_monotone() {
        let base = C0Input {
            d: 4,
            big_m: BigInt::from(11),
            height: BigInt::from(10),
            theta0: rat(1, 3558),
            maxabs: rat(7, 4),
            nmult: BigInt::from(2),
            delta: int(3),
            theta: rat(5, 12),
        };
        let l = |i: &C0Input| bounds::parse_decimal(&compute_c0(i).unwrap().log10_upper).unwrap();
        let l0 = l(&base);
        let mut bigger = base.clone();
        bigger.maxabs = int(2);
        assert!(l(&bigger) > l0);
        let mut bigger = base.clone();
        bigger.big_m = BigInt::from(12);
        assert!(l(&bigger) >= l0);
        let mut bigger = base;
        bigger.nmult = BigInt::from(3);
        assert!(l(&bigger) >= l0);
    }
}
