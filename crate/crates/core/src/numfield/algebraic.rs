//! Real algebraic numbers as a minimal polynomial plus an isolating interval.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::factor::irreducible_factors;
use super::poly::IntPolynomial;
use crate::error::{Error, Result};
use crate::rat::{fmt_rat, int, max_rat, Rat};

/// Default cap on bisection steps in a single refinement.
pub const DEFAULT_REFINE_CAP: u64 = 100_000;

/// Sturm sequence of a squarefree polynomial, with each remainder scaled by
/// a positive factor so that signs are preserved.
pub fn sturm_sequence(f: &IntPolynomial) -> Vec<IntPolynomial> {
    let mut seq = vec![divide_content(f), divide_content(&f.derivative())];
    loop {
        let n = seq.len();
        let (a, b) = (&seq[n - 2], &seq[n - 1]);
        if b.deg() == 0 {
            break;
        }
        let mut r = a.pseudo_rem(b);
        let e = a.deg() - b.deg() + 1;
        // prem = lc(b)^e a mod b; the Sturm step wants -(a mod b)
        if !(b.lc().is_negative() && e % 2 == 1) {
            r = -r;
        }
        if r.is_zero() {
            break;
        }
        seq.push(divide_content(&r));
    }
    seq
}

fn divide_content(f: &IntPolynomial) -> IntPolynomial {
    let c = f.content();
    IntPolynomial::new(f.coeffs().iter().map(|x| x / &c).collect())
}

fn sign_variations(seq: &[IntPolynomial], x: &Rat) -> usize {
    let signs: Vec<i32> = seq
        .iter()
        .map(|p| p.sign_at(x))
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of a squarefree `f` in the closed interval.
pub fn count_roots(f: &IntPolynomial, lo: &Rat, hi: &Rat) -> usize {
    if f.deg() == 0 || lo > hi {
        return 0;
    }
    let seq = sturm_sequence(f);
    let closed_lo = usize::from(f.sign_at(lo) == 0);
    if lo == hi {
        return closed_lo;
    }
    sign_variations(&seq, lo) - sign_variations(&seq, hi) + closed_lo
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RealAlgebraic {
    minpoly: IntPolynomial,
    lo: Rat,
    hi: Rat,
}

impl RealAlgebraic {
    /// The unique root of `poly` in `[lo, hi]`. The polynomial may be
    /// reducible; the irreducible factor carrying the root is kept.
    pub fn new(poly: &IntPolynomial, lo: Rat, hi: Rat) -> Result<Self> {
        if poly.deg() == 0 {
            return Err(Error::InvalidInput(
                "minimal polynomial must have positive degree".into(),
            ));
        }
        if lo > hi {
            return Err(Error::InvalidInput(format!(
                "empty interval [{}, {}]",
                fmt_rat(&lo),
                fmt_rat(&hi)
            )));
        }
        let mut found = Vec::new();
        for g in irreducible_factors(poly) {
            let n = count_roots(&g, &lo, &hi);
            if n > 0 {
                found.push((g, n));
            }
        }
        match found.as_slice() {
            [(g, 1)] => Ok(Self::from_irreducible(g.clone(), lo, hi)),
            [] => Err(Error::InvalidInput(format!(
                "{poly} has no real root in [{}, {}]",
                fmt_rat(&lo),
                fmt_rat(&hi)
            ))),
            _ => Err(Error::InvalidInput(format!(
                "{poly} has more than one real root in [{}, {}]",
                fmt_rat(&lo),
                fmt_rat(&hi)
            ))),
        }
    }

    /// Caller guarantees that `g` is irreducible with exactly one root in
    /// `[lo, hi]`.
    pub(crate) fn from_irreducible(g: IntPolynomial, lo: Rat, hi: Rat) -> Self {
        let g = g.primitive_part();
        if g.deg() == 1 {
            let r = Rat::new(-g.coeff(0), g.coeff(1));
            return RealAlgebraic {
                minpoly: g,
                lo: r.clone(),
                hi: r,
            };
        }
        RealAlgebraic { minpoly: g, lo, hi }
    }

    pub fn rational(r: &Rat) -> Self {
        let g = IntPolynomial::new(vec![-r.numer().clone(), r.denom().clone()]);
        Self::from_irreducible(g, r.clone(), r.clone())
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(&int(n))
    }

    pub fn minpoly(&self) -> &IntPolynomial {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.deg()
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn is_rational(&self) -> bool {
        self.minpoly.deg() == 1
    }

    pub fn as_rational(&self) -> Option<Rat> {
        self.is_rational().then(|| self.lo.clone())
    }

    /// One bisection step.
    fn bisect(&mut self) {
        if self.lo == self.hi {
            return;
        }
        let mid = (&self.lo + &self.hi) / int(2);
        let s_mid = self.minpoly.sign_at(&mid);
        if s_mid == 0 {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        let s_lo = self.minpoly.sign_at(&self.lo);
        if s_lo == 0 {
            self.hi = self.lo.clone();
        } else if s_lo != s_mid {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
    }

    /// Narrows the interval to width at most `width`.
    pub fn refine(&self, width: &Rat, cap: u64) -> Result<Self> {
        assert!(width.is_positive(), "refinement width must be positive");
        let mut out = self.clone();
        let mut steps = 0;
        while out.width() > *width {
            if steps >= cap {
                return Err(Error::CapExceeded {
                    what: "interval refinement",
                    cap,
                });
            }
            out.bisect();
            steps += 1;
        }
        Ok(out)
    }

    /// Rational `u` with `|a| <= u <= |a| + slack`.
    pub fn abs_upper_bound(&self, slack: &Rat, cap: u64) -> Result<Rat> {
        let r = self.refine(slack, cap)?;
        Ok(max_rat(&r.lo.abs(), &r.hi.abs()))
    }

    /// Sign of the number, refining until the interval avoids zero.
    pub fn sign(&self, cap: u64) -> Result<i32> {
        self.compare(&Rat::zero(), cap)
    }

    /// Compares the number with a rational: -1, 0 or 1.
    pub fn compare(&self, x: &Rat, cap: u64) -> Result<i32> {
        if self.is_rational() {
            return Ok(match self.lo.cmp(x) {
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => 1,
            });
        }
        let mut a = self.clone();
        let mut steps = 0;
        loop {
            if a.hi < *x {
                return Ok(-1);
            }
            if a.lo > *x {
                return Ok(1);
            }
            if steps >= cap {
                return Err(Error::CapExceeded {
                    what: "interval refinement",
                    cap,
                });
            }
            a.bisect();
            steps += 1;
        }
    }

    /// Midpoint of the current interval.
    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / int(2)
    }

    /// `c * self` for a nonzero rational `c`.
    pub fn scale(&self, c: &Rat) -> Self {
        assert!(!c.is_zero());
        // m(x / c) cleared of denominators
        let (n, d) = (c.numer().clone(), c.denom().clone());
        let deg = self.minpoly.deg();
        let coeffs: Vec<BigInt> = self
            .minpoly
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, a)| a * d.pow(i as u32) * n.pow((deg - i) as u32))
            .collect();
        let g = IntPolynomial::new(coeffs).primitive_part();
        let (a, b) = (&self.lo * c, &self.hi * c);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Self::from_irreducible(g, lo, hi)
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "root of {} in [{}, {}]",
            self.minpoly,
            fmt_rat(&self.lo),
            fmt_rat(&self.hi)
        )
    }
}

/// Isolates the root of some irreducible factor of `poly` that lies in every
/// interval produced by `enclose`, which must return nested enclosures of a
/// fixed real root whose width tends to zero.
pub fn select_root<F>(poly: &IntPolynomial, mut enclose: F, cap: u64) -> Result<RealAlgebraic>
where
    F: FnMut(u64) -> Result<(Rat, Rat)>,
{
    let factors = irreducible_factors(poly);
    for round in 0..cap {
        let (lo, hi) = enclose(round)?;
        let mut hits = Vec::new();
        let mut total = 0;
        for g in &factors {
            let n = count_roots(g, &lo, &hi);
            if n > 0 {
                hits.push(g.clone());
                total += n;
            }
        }
        if total == 1 {
            return Ok(RealAlgebraic::from_irreducible(hits.pop().unwrap(), lo, hi));
        }
        if total == 0 {
            return Err(Error::Internal(
                "enclosure contains no root of the candidate polynomial".into(),
            ));
        }
    }
    Err(Error::CapExceeded {
        what: "root selection",
        cap,
    })
}
