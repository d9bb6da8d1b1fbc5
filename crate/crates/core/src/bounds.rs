//! Certified enclosures of logarithms, exponentials and real powers of
//! positive rationals.
//!
//! Every result is a pair of exact rationals `lo <= x <= hi`. Internally the
//! series are summed in binary fixed point with floor rounding for the lower
//! end and ceiling rounding for the upper end, and the truncated tail is
//! bounded explicitly, so the enclosures are rigorous at any precision.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Smallest working precision, in bits.
pub const MIN_PRECISION: u32 = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rat,
    pub hi: Rat,
}

impl Enclosure {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi, "inverted enclosure");
        Enclosure { lo, hi }
    }

    pub fn exact(r: Rat) -> Self {
        Enclosure {
            lo: r.clone(),
            hi: r,
        }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, r: &Rat) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn scale(&self, s: &Rat) -> Enclosure {
        if s.is_negative() {
            Enclosure::new(&self.hi * s, &self.lo * s)
        } else {
            Enclosure::new(&self.lo * s, &self.hi * s)
        }
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        hull(&c)
    }

    /// Division by an enclosure that does not contain zero.
    pub fn div(&self, other: &Enclosure) -> Enclosure {
        assert!(
            other.lo.is_positive() || other.hi.is_negative(),
            "division by an enclosure containing zero"
        );
        let c = [
            &self.lo / &other.lo,
            &self.lo / &other.hi,
            &self.hi / &other.lo,
            &self.hi / &other.hi,
        ];
        hull(&c)
    }

    /// Widens both ends outward to dyadic rationals with about `prec`
    /// significant bits.
    pub fn round_out(&self, prec: u32) -> Enclosure {
        Enclosure::new(
            round_rel(&self.lo, prec, false),
            round_rel(&self.hi, prec, true),
        )
    }
}

fn hull(c: &[Rat]) -> Enclosure {
    let lo = c.iter().min().unwrap().clone();
    let hi = c.iter().max().unwrap().clone();
    Enclosure::new(lo, hi)
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

/// Approximate `floor(log2 |x|)`, exact up to one.
fn approx_log2(x: &Rat) -> i64 {
    x.numer().bits() as i64 - x.denom().bits() as i64
}

/// Rounds `x` to a dyadic rational with roughly `prec` significant bits,
/// upward when `up`, downward otherwise.
pub fn round_rel(x: &Rat, prec: u32, up: bool) -> Rat {
    if x.is_zero() {
        return x.clone();
    }
    let shift = prec as i64 - approx_log2(x);
    let scaled = if shift >= 0 {
        x * Rat::from_integer(pow2(shift as u64))
    } else {
        x / Rat::from_integer(pow2((-shift) as u64))
    };
    let m = if up { scaled.ceil() } else { scaled.floor() };
    if shift >= 0 {
        m / Rat::from_integer(pow2(shift as u64))
    } else {
        m * Rat::from_integer(pow2((-shift) as u64))
    }
}

fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn to_fixed(x: &Rat, w: u32, up: bool) -> BigInt {
    let scaled = x.numer() << w as usize;
    if up {
        div_ceil(&scaled, x.denom())
    } else {
        div_floor(&scaled, x.denom())
    }
}

fn from_fixed(m: BigInt, w: u32) -> Rat {
    Rat::new(m, pow2(w as u64))
}

/// Encloses `2 * atanh(t)` for `t` in `[t_lo, t_hi]`, `0 <= t <= 1/3`.
fn twice_atanh(t_lo: &Rat, t_hi: &Rat, w: u32, prec: u32) -> Enclosure {
    let f = pow2(w as u64);
    let stop = &f >> (prec as usize + 8);

    let tl = to_fixed(t_lo, w, false);
    let th = to_fixed(t_hi, w, true);
    let tl2 = div_floor(&(&tl * &tl), &f);
    let th2 = div_ceil(&(&th * &th), &f);

    let mut pow_lo = tl;
    let mut pow_hi = th;
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut n: u64 = 0;
    loop {
        let odd = BigInt::from(2 * n + 1);
        if pow_hi <= stop {
            // remaining terms: t^(2n+1)/(2n+1) * 1/(1-t^2) <= 9/8 * pow/(2n+1)
            let tail = div_ceil(&(&pow_hi * BigInt::from(9)), &(odd * BigInt::from(8)));
            sum_hi += tail;
            break;
        }
        sum_lo += div_floor(&pow_lo, &odd);
        sum_hi += div_ceil(&pow_hi, &odd);
        pow_lo = div_floor(&(&pow_lo * &tl2), &f);
        pow_hi = div_ceil(&(&pow_hi * &th2), &f);
        n += 1;
    }
    Enclosure::new(from_fixed(sum_lo * 2, w), from_fixed(sum_hi * 2, w))
}

/// Enclosure of `ln 2`.
pub fn ln2(prec: u32) -> Enclosure {
    let w = prec + 24;
    let third = Rat::new(BigInt::one(), BigInt::from(3));
    twice_atanh(&third, &third, w, prec + 8)
}

/// Enclosure of `ln x` for a positive rational `x`.
pub fn ln(x: &Rat, prec: u32) -> Result<Enclosure> {
    if !x.is_positive() {
        return Err(Error::Precondition(format!(
            "logarithm of non-positive {x}"
        )));
    }
    if x.is_one() {
        return Ok(Enclosure::exact(Rat::zero()));
    }
    // x = 2^e * y with 1 <= y < 2
    let mut e = approx_log2(x);
    let scale = |e: i64| -> Rat {
        if e >= 0 {
            Rat::from_integer(pow2(e as u64))
        } else {
            Rat::new(BigInt::one(), pow2((-e) as u64))
        }
    };
    let mut y = x / scale(e);
    while y < Rat::one() {
        e -= 1;
        y *= Rat::from_integer(BigInt::from(2));
    }
    let two = Rat::from_integer(BigInt::from(2));
    while y >= two {
        e += 1;
        y /= &two;
    }
    let ebits = 64 - e.unsigned_abs().leading_zeros();
    let w = prec + 24 + ebits;
    let t = (&y - Rat::one()) / (&y + Rat::one());
    let ln_y = twice_atanh(&t, &t, w, prec + 8 + ebits);
    let ln_2 = ln2(prec + 8 + ebits);
    let total = ln_2.scale(&Rat::from_integer(BigInt::from(e))).add(&ln_y);
    Ok(total.round_out(prec + 4))
}

pub fn ln_int(n: &BigInt, prec: u32) -> Result<Enclosure> {
    ln(&Rat::from_integer(n.clone()), prec)
}

/// Enclosure of `log10 x`.
pub fn log10(x: &Rat, prec: u32) -> Result<Enclosure> {
    let num = ln(x, prec + 8)?;
    let den = ln(&Rat::from_integer(BigInt::from(10)), prec + 8)?;
    Ok(num.div(&den).round_out(prec))
}

/// Enclosure of `e^x`.
pub fn exp(x: &Rat, prec: u32) -> Enclosure {
    match x.cmp(&Rat::zero()) {
        Ordering::Equal => Enclosure::exact(Rat::one()),
        Ordering::Less => {
            let e = exp(&-x, prec + 2);
            Enclosure::new(e.hi.recip(), e.lo.recip()).round_out(prec)
        }
        Ordering::Greater => exp_positive(x, prec),
    }
}

fn exp_positive(x: &Rat, prec: u32) -> Enclosure {
    // r = x / 2^s <= 1/2
    let s = (x.ceil().to_integer().bits() + 1) as u32;
    let w = prec + 2 * s + 24;
    let f = pow2(w as u64);
    let r = x / Rat::from_integer(pow2(s as u64));
    let rl = to_fixed(&r, w, false);
    let rh = to_fixed(&r, w, true);

    let mut term_lo = f.clone();
    let mut term_hi = f.clone();
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut n: u64 = 0;
    loop {
        if term_hi <= BigInt::one() {
            // sum_{m>=n} term_m <= term_n / (1 - r/(n+1)) <= 2 term_n
            sum_hi += &term_hi * 2;
            break;
        }
        sum_lo += &term_lo;
        sum_hi += &term_hi;
        let k = BigInt::from(n + 1);
        term_lo = div_floor(&(&term_lo * &rl), &(&f * &k));
        term_hi = div_ceil(&(&term_hi * &rh), &(&f * &k));
        n += 1;
    }
    for _ in 0..s {
        sum_lo = div_floor(&(&sum_lo * &sum_lo), &f);
        sum_hi = div_ceil(&(&sum_hi * &sum_hi), &f);
    }
    Enclosure::new(from_fixed(sum_lo, w), from_fixed(sum_hi, w)).round_out(prec)
}

/// Enclosure of `base^exponent` for `base > 0`; exact when the exponent is
/// an integer.
pub fn pow(base: &Rat, exponent: &Rat, prec: u32) -> Result<Enclosure> {
    if !base.is_positive() {
        return Err(Error::Precondition(format!(
            "real power of non-positive {base}"
        )));
    }
    if exponent.is_integer() {
        let e = exponent.to_integer();
        let mag: u64 = e
            .magnitude()
            .try_into()
            .map_err(|_| Error::Precondition("integer exponent too large".into()))?;
        let p = num_traits::pow(base.clone(), mag as usize);
        let v = if e.sign() == Sign::Minus {
            p.recip()
        } else {
            p
        };
        return Ok(Enclosure::exact(v));
    }
    let extra = exponent.numer().bits() as u32 + 16;
    let l = ln(base, prec + extra)?;
    let z = l.scale(exponent);
    let lo = exp(&z.lo, prec + 4).lo;
    let hi = exp(&z.hi, prec + 4).hi;
    Ok(Enclosure::new(lo, hi).round_out(prec))
}

/// True when the upper ends of `a` and `b` agree to `digits` significant
/// decimal digits.
pub fn agree_to_digits(a: &Enclosure, b: &Enclosure, digits: u32) -> bool {
    let scale = if b.hi.is_zero() {
        Rat::one()
    } else {
        b.hi.abs()
    };
    let tol = Rat::new(
        BigInt::one(),
        num_traits::pow(BigInt::from(10), digits as usize),
    );
    (&a.hi - &b.hi).abs() <= tol * scale
}

/// Evaluates `f` at 128 bits and doubles the precision until two consecutive
/// evaluations agree to `digits` significant digits. Returns the finer one.
pub fn evaluate_until_stable<F>(f: F, digits: u32) -> Result<(Enclosure, u32)>
where
    F: Fn(u32) -> Result<Enclosure>,
{
    let mut prec = MIN_PRECISION;
    let mut prev = f(prec)?;
    for _ in 0..8 {
        let next_prec = prec * 2;
        let next = f(next_prec)?;
        if agree_to_digits(&prev, &next, digits) {
            return Ok((next, next_prec));
        }
        prec = next_prec;
        prev = next;
    }
    Err(Error::CapExceeded {
        what: "precision doubling",
        cap: prec as u64,
    })
}

/// Decimal string of `x` rounded up (toward +inf) to `frac_digits` places.
pub fn fmt_decimal_up(x: &Rat, frac_digits: usize) -> String {
    fmt_decimal(x, frac_digits, true)
}

pub fn fmt_decimal_down(x: &Rat, frac_digits: usize) -> String {
    fmt_decimal(x, frac_digits, false)
}

fn fmt_decimal(x: &Rat, frac_digits: usize, up: bool) -> String {
    let scale = num_traits::pow(BigInt::from(10), frac_digits);
    let scaled = x * Rat::from_integer(scale.clone());
    let m = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let neg = m.is_negative();
    let (ip, fp) = m.abs().div_rem(&scale);
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&ip.to_string());
    if frac_digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", fp.to_string(), width = frac_digits));
    }
    s
}

/// Parses a plain decimal string such as `"-12.0450"` exactly.
pub fn parse_decimal(s: &str) -> Result<Rat> {
    let bad = || Error::InvalidInput(format!("not a decimal literal: {s:?}"));
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty()
        || !ip.bytes().all(|b| b.is_ascii_digit())
        || !fp.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}").parse().map_err(|_| bad())?;
    let v = Rat::new(digits, num_traits::pow(BigInt::from(10), fp.len()));
    Ok(if neg { -v } else { v })
}
