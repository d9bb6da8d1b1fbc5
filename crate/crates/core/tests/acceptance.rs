//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any of them fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use effdio_core::bounds::{self, agree_to_digits, parse_decimal};
use effdio_core::effectivity::{self, C0Record, Config, EffectivityReport, ProblemInstance};
use effdio_core::linalg;
use effdio_core::numfield::intfactor::is_probable_prime;
use effdio_core::numfield::{FieldContext, IntPolynomial, RealAlgebraic, DEFAULT_REFINE_CAP};
use effdio_core::polyops::{index_at, BivarPoly, Index, MultiIndex, RationalPoint, Weights};
use effdio_core::positivity::{
    extra_point_seshadri_bound, intersect, matsusaka_l, nef_threshold, volume_drop, volume_nef,
    BlowupSurface, DivisorClass,
};
use effdio_core::rat::{int, rat, Rat};
use effdio_core::search::{search, search_partitioned, verify_hit, SearchQuery};
use effdio_core::siegel::{build_phi, dim_counts, kernel_integer_basis, siegel_norm_bound};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const SEED: u64 = 0x5eed_0fe4_4d10;

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ stream)
}

fn algebraic(coeffs: &[i64], lo: i64, hi: i64) -> RealAlgebraic {
    RealAlgebraic::new(&IntPolynomial::from_i64(coeffs), int(lo), int(hi)).unwrap()
}

fn reference_instance(delta: i64) -> ProblemInstance {
    ProblemInstance::new(
        algebraic(&[-2, 0, 1], 1, 2),
        algebraic(&[-3, 0, 1], 1, 2),
        2,
        int(delta),
    )
    .unwrap()
}

fn reference_report() -> EffectivityReport {
    effectivity::run(&reference_instance(3), &Config::default()).unwrap()
}

fn reference_ctx() -> FieldContext {
    effectivity::validate(&reference_instance(3), &Config::default())
        .unwrap()
        .ctx
}

fn random_integral_poly(r: &mut ChaCha8Rng, k: u32, max_c: i64) -> BivarPoly {
    let n = ((k + 1) * (k + 2) / 2) as usize;
    let cs: Vec<BigInt> = (0..n)
        .map(|_| {
            if r.gen_bool(0.6) {
                BigInt::from(r.gen_range(-max_c..=max_c))
            } else {
                BigInt::zero()
            }
        })
        .collect();
    BivarPoly::from_dense(k, &cs)
}

fn linear(k1: bool, c: i64) -> BivarPoly {
    let x = if k1 {
        MultiIndex::new(1, 0)
    } else {
        MultiIndex::new(0, 1)
    };
    BivarPoly::from_terms(1, vec![(x, int(1)), (MultiIndex::new(0, 0), int(c))]).unwrap()
}

/// A random integral polynomial of degree bound `k` vanishing to a random
/// order at `(1, -2)`.
fn random_vanishing_poly(r: &mut ChaCha8Rng, k: u32) -> BivarPoly {
    let e1 = r.gen_range(0..k);
    let e2 = r.gen_range(0..k - e1);
    let mut p = random_integral_poly(r, k - e1 - e2, 9);
    if p.is_zero() {
        p = BivarPoly::monomial(k - e1 - e2, 0, 0, int(1)).unwrap();
    }
    for _ in 0..e1 {
        p = p.mul(&linear(true, -1));
    }
    for _ in 0..e2 {
        p = p.mul(&linear(false, 2));
    }
    p
}

fn c1_reference_regression() -> Check {
    let r = reference_report();
    let m_alpha: Vec<BigInt> = [1, 0, -10, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
    ensure!(r.d == 4, "d = {}", r.d);
    ensure!(r.m0 == 1, "M0 = {}", r.m0);
    ensure!(r.m1.is_one(), "M1 = {}", r.m1);
    ensure!(r.m_alpha == m_alpha, "m_alpha = {:?}", r.m_alpha);
    ensure!(
        r.m_alpha_height == BigInt::from(10),
        "|m_alpha| = {}",
        r.m_alpha_height
    );
    ensure!(r.n == BigInt::from(2), "N = {}", r.n);
    ensure!(r.big_m == BigInt::from(11), "M = {}", r.big_m);
    ensure!(r.b == BigInt::from(5_153_632), "B = {}", r.b);
    ensure!(r.theta == rat(5, 12), "theta = {}", r.theta);
    ensure!(r.q == BigInt::from(12), "Q = {}", r.q);
    ensure!(r.l_theta == rat(593, 2), "l = {}", r.l_theta);
    ensure!(r.theta0 == rat(1, 3558), "theta0 = {}", r.theta0);
    Ok(())
}

fn c2_second_instance() -> Check {
    let inst = ProblemInstance::new(
        algebraic(&[-2, 0, 1], 1, 2),
        algebraic(&[-1, -2, 1], 2, 3),
        1,
        int(4),
    )
    .unwrap();
    let r = effectivity::run(&inst, &Config::default()).map_err(|e| e.to_string())?;
    ensure!(r.d == 2, "d = {}", r.d);
    ensure!(r.theta == rat(3, 8), "theta = {}", r.theta);
    ensure!(r.q == BigInt::from(8), "Q = {}", r.q);
    ensure!(r.l_theta == int(305), "l = {}", r.l_theta);
    ensure!(r.theta0 == rat(1, 2440), "theta0 = {}", r.theta0);
    Ok(())
}

fn c3_intersection_identities() -> Check {
    let mut r = rng(3);
    for _ in 0..1000 {
        let d = r.gen_range(1..=20usize);
        let m = r.gen_range(1..=5u32);
        let t = rat(r.gen_range(-200..=200), r.gen_range(1..=60));
        let s = BlowupSurface::new(d, m, d).unwrap();
        let lt = s.l_t(&t);
        for i in 0..d {
            ensure!(
                intersect(&lt, &s.exceptional(i)).unwrap() == t,
                "L_t.E_{i} at t = {t}"
            );
        }
        let dd = int(d as i64);
        ensure!(
            intersect(&lt, &s.curve()).unwrap() == int(m as i64) - &dd * &t,
            "L_t.C at t = {t}"
        );
        ensure!(
            intersect(&lt, &lt).unwrap() == int(1) - &dd * &t * &t,
            "L_t^2 at t = {t}"
        );
    }
    Ok(())
}

fn c4_min_identity() -> Check {
    for m in 1..=10u64 {
        for d in 1..=100u64 {
            let inv_m = rat(1, m as i64);
            let m_d = rat(m as i64, d as i64);
            let two = if inv_m <= m_d {
                inv_m.clone()
            } else {
                m_d.clone()
            };
            ensure!(nef_threshold(d, m) == two, "threshold at d = {d}, m = {m}");
            // adjoining 1/sqrt(d) leaves the minimum unchanged iff two^2 <= 1/d
            ensure!(
                &two * &two * int(d as i64) <= int(1),
                "1/sqrt(d) smaller at d = {d}, m = {m}"
            );
            ensure!((inv_m <= m_d) == (d <= m * m), "branch at d = {d}, m = {m}");
        }
    }
    Ok(())
}

fn c5_volume_drop() -> Check {
    let mut r = rng(5);
    for _ in 0..10 {
        let d = r.gen_range(1..=20usize);
        let m = r.gen_range(1..=5u32);
        let thr = nef_threshold(d as u64, m as u64);
        for _ in 0..100 {
            let theta = &thr * rat(r.gen_range(0..1000), 1000);
            let q: u64 = theta.denom().to_u64().unwrap();
            let mu = extra_point_seshadri_bound(&theta, d, q).unwrap()
                * rat(r.gen_range(0..=1000), 1000);
            let drop = volume_drop(&theta, &mu, d, m, q).map_err(|e| e.to_string())?;
            ensure!(drop == &mu * &mu, "drop at theta = {theta}, mu = {mu}");
            let s = BlowupSurface::new(d + 1, m, d).unwrap();
            let mut e = vec![theta.clone(); d];
            e.push(Rat::zero());
            let before = volume_nef(&DivisorClass::new(int(1), e.clone()), &s, q).unwrap();
            e[d] = mu.clone();
            let after = volume_nef(&DivisorClass::new(int(1), e), &s, q).unwrap();
            ensure!(
                before - after == &mu * &mu,
                "direct difference at theta = {theta}, mu = {mu}"
            );
        }
    }
    Ok(())
}

fn c6_hasse_suite() -> Check {
    let mut r = rng(6);
    for _ in 0..200 {
        let k = r.gen_range(1..=12u32);
        let p = random_vanishing_poly(&mut r, k);
        let w = Weights::equal(k);
        let pt = RationalPoint::new(int(1), int(-2));
        let base = index_at(&p, &pt, &w);
        let bound =
            Rat::from_integer(num_traits::pow(BigInt::from(4), k as usize)) * p.naive_height();
        let c1 = rat(r.gen_range(-7..=7), r.gen_range(1..=5));
        let c2 = rat(r.gen_range(-7..=7), r.gen_range(1..=5));
        let shifted = p.taylor_shift(&c1, &c2);
        for j in MultiIndex::up_to(k) {
            let dp = p.hasse_derivative(&j);
            ensure!(dp.is_integral(), "non-integral derivative at {j:?}");
            ensure!(dp.naive_height() <= bound, "height bound fails at {j:?}");
            let drop = rat(j.total() as i64, k as i64);
            match (&base, index_at(&dp, &pt, &w)) {
                (_, Index::Infinite) => {}
                (Index::Finite(b), Index::Finite(i)) => {
                    ensure!(i >= b - &drop, "index drop at {j:?}: {i} < {b} - {drop}")
                }
                (Index::Infinite, Index::Finite(_)) => {
                    return Err("derivative of zero is nonzero".into())
                }
            }
            ensure!(
                shifted.coeff(&j) == dp.eval_at(&c1, &c2),
                "taylor coefficient at {j:?}"
            );
        }
    }
    Ok(())
}

fn c7_denominators() -> Check {
    let mut r = rng(7);
    for _ in 0..200 {
        let k = r.gen_range(1..=12u32);
        let p = random_integral_poly(&mut r, k, 50);
        let p1 = BigInt::from(r.gen_range(-100..=100));
        let p2 = BigInt::from(r.gen_range(-100..=100));
        let q = BigInt::from(r.gen_range(1..=100));
        let qk = num_traits::pow(q.clone(), k as usize);
        for j in MultiIndex::up_to(k) {
            let v = p.hasse_derivative(&j).eval_rational(&p1, &p2, &q);
            ensure!(
                qk.is_multiple_of(v.denom()),
                "denominator {} does not divide {q}^{k}",
                v.denom()
            );
        }
    }
    Ok(())
}

fn random_prime(r: &mut ChaCha8Rng) -> u64 {
    loop {
        let c = r.gen_range((1u64 << 40)..(1u64 << 61)) | 1;
        if is_probable_prime(&BigInt::from(c)) {
            return c;
        }
    }
}

fn c8_dimension_counts() -> Check {
    let mut r = rng(8);
    let x = RealAlgebraic::rational(&rat(1, 2));
    let y = RealAlgebraic::rational(&rat(-3, 4));
    let ctx = FieldContext::build(&x, &y, 10, DEFAULT_REFINE_CAP).map_err(|e| e.to_string())?;
    ensure!(ctx.d == 1, "rational point gives d = {}", ctx.d);
    for k in [6, 12, 24] {
        for theta in [rat(1, 3), rat(1, 2)] {
            let dims = dim_counts(k, &ctx, &theta, None).map_err(|e| e.to_string())?;
            ensure!(
                dims.a_k == dims.b_k - dims.l_k,
                "k = {k}, theta = {theta}: a = {}",
                dims.a_k
            );
            let rows = build_phi(k, &ctx, &theta).integer_rows();
            for _ in 0..3 {
                let p = random_prime(&mut r);
                let mr = linalg::modular_rank(&rows, p) as u64;
                ensure!(mr == dims.rank, "rank mod {p} is {mr}, exact {}", dims.rank);
            }
        }
    }

    let ctx = reference_ctx();
    let target = rat(11, 36);
    for k in [12, 24, 36] {
        let dims = dim_counts(k, &ctx, &rat(5, 12), None).map_err(|e| e.to_string())?;
        ensure!(
            dims.a_k + 4 * dims.l_k >= dims.b_k,
            "k = {k}: a below b - 4l"
        );
        let dev = (&dims.ratio_a - &target).abs();
        ensure!(
            dev <= rat(3, k as i64),
            "k = {k}: |a/(k^2/2) - 11/36| = {dev}"
        );
    }
    Ok(())
}

fn c9_kernel_round_trip() -> Check {
    let ctx = reference_ctx();
    let theta = rat(5, 12);
    for k in 1..=12 {
        let lat = kernel_integer_basis(&build_phi(k, &ctx, &theta)).map_err(|e| e.to_string())?;
        let pt = ctx.point(k);
        let w = Weights::equal(k);
        for p in lat.polys(k) {
            ensure!(
                index_at(&p, &pt, &w).at_least(&theta),
                "k = {k}: kernel vector below theta"
            );
        }
    }
    Ok(())
}

fn c10_siegel_sanity() -> Check {
    let ctx = reference_ctx();
    let theta = rat(5, 12);
    let b_const = Rat::from_integer(reference_report().b);
    for k in 1..=12u32 {
        let sys = build_phi(k, &ctx, &theta);
        let dims = dim_counts(k, &ctx, &theta, None).map_err(|e| e.to_string())?;
        if dims.a_k == 0 {
            continue;
        }
        let c = effdio_core::rat::pow_i(&b_const, k as i64);
        let bound = siegel_norm_bound(&c, dims.b_k, dims.a_k, 0, 128).map_err(|e| e.to_string())?;
        let lat = kernel_integer_basis(&sys).map_err(|e| e.to_string())?;
        for n in &lat.sup_norms {
            let ln = bounds::ln_int(n, 128).map_err(|e| e.to_string())?;
            ensure!(ln.hi <= bound.lo, "k = {k}: ln |P| above the Siegel bound");
        }
    }
    Ok(())
}

/// Hits `(q, p1, p2)` of the independent 50-digit scan, `q <= 10^4`.
const ORACLE_HITS: [(u64, i64, i64); 4] = [(1, 1, 1), (1, 1, 2), (1, 2, 1), (1, 2, 2)];

fn c11_search() -> Check {
    let inst = reference_instance(3);
    let query = SearchQuery::new(inst.clone(), BigInt::one(), 1, 10_000, DEFAULT_REFINE_CAP)
        .map_err(|e| e.to_string())?;
    let hits = search(&query).map_err(|e| e.to_string())?;
    let keys: Vec<(u64, BigInt, BigInt)> = hits
        .iter()
        .map(|h| (h.q, h.p1.clone(), h.p2.clone()))
        .collect();
    let oracle: Vec<(u64, BigInt, BigInt)> = ORACLE_HITS
        .iter()
        .map(|&(q, a, b)| (q, BigInt::from(a), BigInt::from(b)))
        .collect();
    ensure!(keys == oracle, "hits {keys:?}");
    ensure!(
        keys.contains(&(1, BigInt::from(2), BigInt::from(1))),
        "missing (1, 2, 1)"
    );
    for (q, p1, p2) in &keys {
        ensure!(
            verify_hit(p1, p2, *q, &inst, &BigInt::one(), DEFAULT_REFINE_CAP)
                .map_err(|e| e.to_string())?,
            "hit ({q}, {p1}, {p2}) fails exact verification"
        );
    }
    let merged = search_partitioned(&query, 8).map_err(|e| e.to_string())?;
    ensure!(merged == hits, "partitioned search differs");
    Ok(())
}

fn c12_c0_logarithm() -> Check {
    let r = reference_report();
    let rec = &r.c0_expression;
    let lo = rec.log10_at(128).map_err(|e| e.to_string())?;
    let hi = rec.log10_at(256).map_err(|e| e.to_string())?;
    ensure!(agree_to_digits(&lo, &hi, 6), "128/256-bit values disagree");
    ensure!(
        lo.lo <= hi.lo && hi.hi <= lo.hi,
        "256-bit enclosure not inside the 128-bit one"
    );
    let reported = parse_decimal(&r.c0_log10_upper).map_err(|e| e.to_string())?;
    ensure!(reported >= hi.hi, "reported log10 C0 is not an upper bound");
    ensure!(rec.rounding == "up", "rounding {}", rec.rounding);

    // 1024 (d M (h+1)^d)^3 with d = 4, M = 11, h = 10
    let dmh = BigInt::from(4 * 11 * 11 * 11 * 11 * 11);
    let maxabs = &r.max_abs_upper;
    let slack = Config::default().slack;
    ensure!(maxabs * maxabs >= int(3), "max |alpha| bound below sqrt 3");
    ensure!(
        (maxabs - &slack) * (maxabs - &slack) <= int(3),
        "max |alpha| bound too loose"
    );
    let expected = C0Record::new(
        BigInt::from(1024) * &dmh * &dmh * &dmh,
        int(3558 * 3558),
        int(64) * maxabs * int(8),
        Rat::one() / (int(3) * (rat(5, 12) - rat(1, 3558)) - int(1)),
    );
    ensure!(
        rec.inner_base == expected.inner_base,
        "inner base {}",
        rec.inner_base
    );
    ensure!(
        rec.inner_exponent == expected.inner_exponent,
        "inner exponent {}",
        rec.inner_exponent
    );
    ensure!(
        rec.outer_factor == expected.outer_factor,
        "outer factor {}",
        rec.outer_factor
    );
    ensure!(
        rec.outer_exponent == expected.outer_exponent,
        "outer exponent {}",
        rec.outer_exponent
    );
    ensure!(
        rec.outer_exponent == rat(2372, 591),
        "outer exponent {}",
        rec.outer_exponent
    );
    ensure!(
        matsusaka_l(&rat(5, 12), 4, 12).unwrap() == r.l_theta,
        "l(theta) mismatch"
    );
    Ok(())
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            name: "reference-instance regression",
            limit: secs(5),
            run: c1_reference_regression,
        },
        Criterion {
            name: "second instance",
            limit: secs(5),
            run: c2_second_instance,
        },
        Criterion {
            name: "intersection-form identities",
            limit: secs(5),
            run: c3_intersection_identities,
        },
        Criterion {
            name: "min identity",
            limit: secs(1),
            run: c4_min_identity,
        },
        Criterion {
            name: "volume-drop identity",
            limit: secs(5),
            run: c5_volume_drop,
        },
        Criterion {
            name: "Hasse-derivative properties",
            limit: secs(30),
            run: c6_hasse_suite,
        },
        Criterion {
            name: "denominator bound",
            limit: secs(30),
            run: c7_denominators,
        },
        Criterion {
            name: "dimension counts",
            limit: secs(300),
            run: c8_dimension_counts,
        },
        Criterion {
            name: "kernel round-trip",
            limit: secs(120),
            run: c9_kernel_round_trip,
        },
        Criterion {
            name: "Siegel bound sanity",
            limit: secs(60),
            run: c10_siegel_sanity,
        },
        Criterion {
            name: "search correctness",
            limit: secs(60),
            run: c11_search,
        },
        Criterion {
            name: "C0 logarithm",
            limit: secs(5),
            run: c12_c0_logarithm,
        },
    ];
    let only: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if took <= c.limit {
                Ok(())
            } else {
                Err(format!("took {took:.2?}, limit {:?}", c.limit))
            }
        });
        match outcome {
            Ok(()) => println!(
                "PASS {:>2} {} ({took:.2?}, limit {:?})",
                i + 1,
                c.name,
                c.limit
            ),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {}: {e}", i + 1, c.name);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
