//! The vanishing-condition map at the conjugate locus, its dimension counts,
//! an integer kernel basis, and the Faltings-Siegel norm bound.
//!
//! A condition `d_j P = 0` is imposed for every `j` with `(j1 + j2) / k <
//! theta`. With the strict inequality the kernel is exactly the set of `P`
//! with index at least `theta`; when `k theta` is an integer, order `k theta`
//! itself is not imposed.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, Enclosure};
use crate::error::{Error, Result};
use crate::io::{big_str, opt_rat_str, rat_str};
use crate::linalg;
use crate::numfield::{FieldContext, FieldElement};
use crate::polyops::{index_at, BivarPoly, FieldPoint, Index, MultiIndex, RationalPoint, Weights};
use crate::positivity::{volume_nef, BlowupSurface, DivisorClass};
use crate::rat::{binomial, ceil_int, int, Rat};

pub const DEFAULT_MAX_K: u32 = 36;

/// The rational point `(p1 / q, p2 / q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatPoint {
    #[serde(with = "big_str")]
    pub p1: BigInt,
    #[serde(with = "big_str")]
    pub p2: BigInt,
    #[serde(with = "big_str")]
    pub q: BigInt,
}

impl RatPoint {
    pub fn new(p1: BigInt, p2: BigInt, q: BigInt) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InvalidInput("denominator must be positive".into()));
        }
        Ok(RatPoint { p1, p2, q })
    }

    pub fn from_rats(x1: &Rat, x2: &Rat) -> Self {
        let q = num_integer::Integer::lcm(x1.denom(), x2.denom());
        let p1 = (x1 * Rat::from_integer(q.clone())).to_integer();
        let p2 = (x2 * Rat::from_integer(q.clone())).to_integer();
        RatPoint { p1, p2, q }
    }

    pub fn x1(&self) -> Rat {
        Rat::new(self.p1.clone(), self.q.clone())
    }

    pub fn x2(&self) -> Rat {
        Rat::new(self.p2.clone(), self.q.clone())
    }

    pub fn as_point(&self) -> RationalPoint {
        RationalPoint::new(self.x1(), self.x2())
    }
}

/// Multi-indices with `j1 + j2 < k theta`.
pub fn conditions(k: u32, theta: &Rat) -> Vec<MultiIndex> {
    match count_order(k, theta) {
        0 => Vec::new(),
        t => MultiIndex::up_to(t - 1),
    }
}

/// `T = max(0, ceil(k theta))`, so that `j1 + j2 < k theta` iff `j1 + j2 < T`.
fn count_order(k: u32, theta: &Rat) -> u32 {
    let t = ceil_int(&(int(k as i64) * theta)).max(BigInt::zero());
    (&t).try_into().expect("condition order fits in 32 bits")
}

/// `#{j : j1 + j2 < k theta} = T (T + 1) / 2` with `T = ceil(k theta)`.
pub fn count_conditions(k: u32, theta: &Rat) -> u64 {
    let t = count_order(k, theta) as u64;
    t * (t + 1) / 2
}

pub fn b_k(k: u32) -> u64 {
    let k = k as u64;
    (k + 1) * (k + 2) / 2
}

/// Rows expressing `d_j P` at a point as linear forms in the monomial
/// coefficients of `P`, one row per field coordinate.
#[derive(Clone, Debug)]
pub struct VanishingSystem {
    pub k: u32,
    pub theta: Rat,
    pub theta0: Option<Rat>,
    pub rat_point: Option<RatPoint>,
    pub columns: Vec<MultiIndex>,
    /// Number of conditions at the conjugate locus.
    pub l_k: usize,
    /// Number of conditions at the rational point.
    pub l_prime: usize,
    pub d: usize,
    pub rows: Vec<Vec<Rat>>,
}

impl VanishingSystem {
    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    /// Rows belonging to the conjugate locus.
    pub fn locus_rows(&self) -> &[Vec<Rat>] {
        &self.rows[..self.d * self.l_k]
    }

    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        linalg::rows_to_integers(&self.rows)
    }
}

/// `binom(a, j)` with zero when `j > a`.
fn choose(a: u32, j: u32) -> BigInt {
    if j > a {
        BigInt::zero()
    } else {
        binomial(a, j)
    }
}

/// Table of `x1^i x2^j` for `i + j <= k`, indexed like [`MultiIndex::up_to`].
fn field_products(pt: &FieldPoint, k: u32) -> Vec<FieldElement> {
    MultiIndex::up_to(k)
        .into_iter()
        .map(|j| pt.eval(&BivarPoly::monomial(k, j.j1, j.j2, int(1)).expect("within bound")))
        .collect()
}

fn position(j1: u32, j2: u32) -> usize {
    let t = (j1 + j2) as usize;
    t * (t + 1) / 2 + j1 as usize
}

fn locus_rows(
    k: u32,
    ctx: &FieldContext,
    conds: &[MultiIndex],
    columns: &[MultiIndex],
) -> Vec<Vec<Rat>> {
    let products = field_products(&ctx.point(k), k);
    let d = ctx.d;
    let blocks: Vec<Vec<Vec<Rat>>> = conds
        .par_iter()
        .map(|j| {
            let mut block = vec![Vec::with_capacity(columns.len()); d];
            for c in columns {
                let coef = choose(c.j1, j.j1) * choose(c.j2, j.j2);
                if coef.is_zero() {
                    for row in block.iter_mut() {
                        row.push(Rat::zero());
                    }
                    continue;
                }
                let v = &products[position(c.j1 - j.j1, c.j2 - j.j2)];
                let coef = Rat::from_integer(coef);
                for (h, row) in block.iter_mut().enumerate() {
                    row.push(&v.coords()[h] * &coef);
                }
            }
            block
        })
        .collect();
    blocks.into_iter().flatten().collect()
}

fn rational_rows(
    pt: &RatPoint,
    conds: &[MultiIndex],
    columns: &[MultiIndex],
    k: u32,
) -> Vec<Vec<Rat>> {
    let (x1, x2) = (pt.x1(), pt.x2());
    let p1: Vec<Rat> = std::iter::successors(Some(int(1)), |v| Some(v * &x1))
        .take(k as usize + 1)
        .collect();
    let p2: Vec<Rat> = std::iter::successors(Some(int(1)), |v| Some(v * &x2))
        .take(k as usize + 1)
        .collect();
    conds
        .iter()
        .map(|j| {
            columns
                .iter()
                .map(|c| {
                    let coef = choose(c.j1, j.j1) * choose(c.j2, j.j2);
                    if coef.is_zero() {
                        return Rat::zero();
                    }
                    Rat::from_integer(coef)
                        * &p1[(c.j1 - j.j1) as usize]
                        * &p2[(c.j2 - j.j2) as usize]
                })
                .collect()
        })
        .collect()
}

/// Conditions `d_j P (a1, a2) = 0` for `j1 + j2 < k theta`.
pub fn build_phi(k: u32, ctx: &FieldContext, theta: &Rat) -> VanishingSystem {
    build_system(k, ctx, theta, None)
}

/// [`build_phi`] plus `d_j P (p1/q, p2/q) = 0` for `j1 + j2 < k theta0`.
pub fn build_system(
    k: u32,
    ctx: &FieldContext,
    theta: &Rat,
    rat: Option<(&RatPoint, &Rat)>,
) -> VanishingSystem {
    let columns = MultiIndex::up_to(k);
    let conds = conditions(k, theta);
    let mut rows = locus_rows(k, ctx, &conds, &columns);
    let mut l_prime = 0;
    if let Some((pt, theta0)) = rat {
        let c0 = conditions(k, theta0);
        l_prime = c0.len();
        rows.extend(rational_rows(pt, &c0, &columns, k));
    }
    VanishingSystem {
        k,
        theta: theta.clone(),
        theta0: rat.map(|(_, t)| t.clone()),
        rat_point: rat.map(|(p, _)| p.clone()),
        columns,
        l_k: conds.len(),
        l_prime,
        d: ctx.d,
        rows,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Targets {
    #[serde(with = "rat_str")]
    pub full: Rat,
    #[serde(with = "rat_str")]
    pub locus: Rat,
    #[serde(with = "rat_str")]
    pub with_point: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DimensionReport {
    pub k: u32,
    pub b_k: u64,
    pub l_k: u64,
    pub rank: u64,
    pub a_k: u64,
    pub i_k: Option<u64>,
    #[serde(with = "rat_str")]
    pub ratio_a: Rat,
    #[serde(with = "opt_rat_str", default)]
    pub ratio_i: Option<Rat>,
    pub targets: Option<Targets>,
    /// `a_k > i_k` at this `k`.
    pub aux_guaranteed: Option<bool>,
}

/// Rank, `a_k` and, with a rational point, `i_k` for one `k`.
pub fn dim_counts(
    k: u32,
    ctx: &FieldContext,
    theta: &Rat,
    rat: Option<(&RatPoint, &Rat)>,
) -> Result<DimensionReport> {
    let sys = build_system(k, ctx, theta, rat);
    let ints = sys.integer_rows();
    let locus = &ints[..sys.d * sys.l_k];
    let rank = linalg::exact_rank(locus) as u64;
    let b = b_k(k);
    let a = b - rank;
    let half_k2 = Rat::new(BigInt::from(k as u64 * k as u64), BigInt::from(2));
    let i = if rat.is_some() {
        Some(b - linalg::exact_rank(&ints) as u64)
    } else {
        None
    };
    let l_k = count_conditions(k, theta);
    if l_k != sys.l_k as u64 || a + (sys.d as u64) * l_k < b {
        return Err(Error::Internal("dimension invariants fail".into()));
    }
    Ok(DimensionReport {
        k,
        b_k: b,
        l_k,
        rank,
        a_k: a,
        i_k: i,
        ratio_a: Rat::from_integer(BigInt::from(a)) / &half_k2,
        ratio_i: i.map(|i| Rat::from_integer(BigInt::from(i)) / &half_k2),
        targets: None,
        aux_guaranteed: i.map(|i| a > i),
    })
}

/// `(1, 1 - d theta^2, 1 - d theta^2 - theta0^2)`, each a volume in the
/// certified nef chamber.
pub fn asymptotic_targets(theta: &Rat, theta0: &Rat, d: usize, m: u32, q: u64) -> Result<Targets> {
    let s = BlowupSurface::new(d + 1, m, d)?;
    let full = volume_nef(&s.line(), &s, q)?;
    let locus = volume_nef(&s.l_t(theta), &s, q)?;
    let mut e = vec![theta.clone(); d];
    e.push(theta0.clone());
    let with_point = volume_nef(&DivisorClass::new(int(1), e), &s, q)?;
    Ok(Targets {
        full,
        locus,
        with_point,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelLattice {
    pub basis: Vec<Vec<BigInt>>,
    pub sup_norms: Vec<BigInt>,
}

impl KernelLattice {
    pub fn polys(&self, k: u32) -> Vec<BivarPoly> {
        self.basis
            .iter()
            .map(|v| BivarPoly::from_dense(k, v))
            .collect()
    }
}

/// Integer basis of the kernel, each vector checked against every row.
pub fn kernel_integer_basis(sys: &VanishingSystem) -> Result<KernelLattice> {
    let ints = sys.integer_rows();
    let basis = linalg::integer_kernel(&ints, sys.ncols());
    for v in &basis {
        if ints.iter().any(|r| !linalg::dot(r, v).is_zero()) {
            return Err(Error::Internal("kernel vector is not annihilated".into()));
        }
    }
    let sup_norms = basis.iter().map(|v| linalg::sup_norm(v)).collect();
    Ok(KernelLattice { basis, sup_norms })
}

/// Enclosure of `ln (C^(3b) b!)^(1 / (a - i))`.
pub fn siegel_norm_bound(c: &Rat, b: u64, a: u64, i: u64, prec: u32) -> Result<Enclosure> {
    if *c < int(2) || i >= a || b < a {
        return Err(Error::Precondition("need C >= 2, a > i and b >= a".into()));
    }
    let ln_c = bounds::ln(c, prec + 16)?;
    let fact: BigInt = (1..=b).map(BigInt::from).product();
    let ln_f = bounds::ln_int(&fact, prec + 16)?;
    let total = ln_c.scale(&int(3 * b as i64)).add(&ln_f);
    Ok(total
        .scale(&Rat::new(BigInt::one(), BigInt::from(a - i)))
        .round_out(prec))
}

/// Auxiliary polynomial with its certified indices.
#[derive(Clone, Debug)]
pub struct AuxPoly {
    pub poly: BivarPoly,
    pub height: BigInt,
    pub index_locus: Index,
    pub index_point: Index,
}

/// A kernel vector of minimal sup-norm whose index at the rational point is
/// below `theta0`.
pub fn find_aux_poly(
    k: u32,
    ctx: &FieldContext,
    theta: &Rat,
    pt: &RatPoint,
    theta0: &Rat,
) -> Result<Option<AuxPoly>> {
    let sys = build_phi(k, ctx, theta);
    let lattice = kernel_integer_basis(&sys)?;
    let w = Weights::equal(k);
    let rp = pt.as_point();
    let mut order: Vec<usize> = (0..lattice.basis.len()).collect();
    order.sort_by(|&a, &b| {
        lattice.sup_norms[a]
            .cmp(&lattice.sup_norms[b])
            .then(a.cmp(&b))
    });
    for i in order {
        let p = BivarPoly::from_dense(k, &lattice.basis[i]);
        let ip = index_at(&p, &rp, &w);
        if ip.at_least(theta0) {
            continue;
        }
        let il = index_at(&p, &ctx.point(k), &w);
        if !il.at_least(theta) {
            return Err(Error::Internal(
                "kernel vector has index below theta".into(),
            ));
        }
        return Ok(Some(AuxPoly {
            height: lattice.sup_norms[i].clone(),
            poly: p,
            index_locus: il,
            index_point: ip,
        }));
    }
    let dims = dim_counts(k, ctx, theta, Some((pt, theta0)))?;
    if dims.aux_guaranteed == Some(true) {
        return Err(Error::Internal(
            "a_k > i_k but every basis vector lies in U_k".into(),
        ));
    }
    Ok(None)
}
