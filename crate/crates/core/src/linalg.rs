//! Exact linear algebra over the rationals and the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rat::{lcm_denominators, Rat};

/// Multiplies each row by the lcm of its denominators.
pub fn rows_to_integers(rows: &[Vec<Rat>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let den = lcm_denominators(row.iter());
            row.iter()
                .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Row-reduces a copy of `rows` over the rationals and returns the pivot
/// columns of the echelon form.
pub fn rat_pivots(rows: &[Vec<Rat>]) -> Vec<usize> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        clear_column(&mut m, r, c);
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

/// Scales row `r` to a unit entry in column `c` and clears that column in
/// every other row.
fn clear_column(m: &mut [Vec<Rat>], r: usize, c: usize) {
    let inv = m[r][c].recip();
    for x in &mut m[r][c..] {
        *x = &*x * &inv;
    }
    let pivot = m[r].clone();
    for (i, row) in m.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, y) in row[c..].iter_mut().zip(&pivot[c..]) {
            *x -= &f * y;
        }
    }
}

pub fn rat_rank(rows: &[Vec<Rat>]) -> usize {
    rat_pivots(rows).len()
}

/// Solves `A x = b` for square nonsingular `A` given by rows.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        clear_column(&mut m, c, c);
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Fraction-free Gaussian elimination; returns the rank.
pub fn bareiss_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Rank of the reduction modulo a prime `p < 2^63`.
pub fn modular_rank(rows: &[Vec<BigInt>], p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| c.mod_floor(&pb).to_u64().unwrap())
                .collect()
        })
        .collect();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(piv) = (r..nrows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = powmod(m[r][c], p - 2, p);
        for x in &mut m[r][c..] {
            *x = mulmod(*x, inv, p);
        }
        let pivot_row = m[r].clone();
        for row in m.iter_mut().skip(r + 1) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = (*x + p - mulmod(f, y, p)) % p;
            }
        }
        r += 1;
    }
    r
}

/// Largest prime below 2^61 used for the modular fast path.
pub const RANK_PRIME: u64 = 2_305_843_009_213_693_951;

/// Exact rank over the rationals. A modular rank equal to the smaller matrix
/// dimension is already certified, since reduction can only lower the rank.
pub fn exact_rank(rows: &[Vec<BigInt>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let full = rows.len().min(ncols);
    if modular_rank(rows, RANK_PRIME) == full {
        return full;
    }
    bareiss_rank(rows)
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(target: &mut [BigInt], q: &BigInt, v: &[BigInt]) {
    for (t, x) in target.iter_mut().zip(v) {
        *t -= q * x;
    }
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest integer to a/b for b > 0
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

/// Basis of the lattice `{x in Z^n : rows . x = 0}`, built by unimodular
/// column operations row by row.
pub fn integer_kernel(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut basis: Vec<Vec<BigInt>> = (0..ncols)
        .map(|i| {
            let mut v = vec![BigInt::zero(); ncols];
            v[i] = BigInt::one();
            v
        })
        .collect();
    for row in rows {
        let mut vals: Vec<BigInt> = basis.iter().map(|v| dot(row, v)).collect();
        loop {
            let nonzero: Vec<usize> = (0..vals.len()).filter(|&i| !vals[i].is_zero()).collect();
            if nonzero.len() <= 1 {
                if let Some(&i) = nonzero.first() {
                    basis.remove(i);
                }
                break;
            }
            let piv = *nonzero
                .iter()
                .min_by(|&&a, &&b| vals[a].abs().cmp(&vals[b].abs()))
                .unwrap();
            let pv = vals[piv].clone();
            let pvec = basis[piv].clone();
            for &i in &nonzero {
                if i == piv {
                    continue;
                }
                let q = vals[i].div_floor(&pv);
                if q.is_zero() {
                    continue;
                }
                vals[i] -= &q * &pv;
                axpy(&mut basis[i], &q, &pvec);
            }
        }
        if basis.len() <= 64 || basis.len() * ncols <= 40_000 {
            size_reduce(&mut basis);
        }
    }
    size_reduce(&mut basis);
    basis
}

/// Pairwise size reduction: repeatedly subtracts the nearest-integer multiple
/// of one vector from another while that shortens it.
pub fn size_reduce(basis: &mut [Vec<BigInt>]) {
    let n = basis.len();
    let mut norms: Vec<BigInt> = basis.iter().map(|v| dot(v, v)).collect();
    for _ in 0..32 {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || norms[j].is_zero() {
                    continue;
                }
                let q = round_div(&dot(&basis[i], &basis[j]), &norms[j]);
                if q.is_zero() {
                    continue;
                }
                let bj = basis[j].clone();
                let mut cand = basis[i].clone();
                axpy(&mut cand, &q, &bj);
                let nn = dot(&cand, &cand);
                if nn < norms[i] {
                    basis[i] = cand;
                    norms[i] = nn;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

pub fn sup_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(Signed::abs).max().unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use proptest::prelude::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn rank_examples() {
        let m = ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(bareiss_rank(&m), 2);
        assert_eq!(exact_rank(&m), 2);
        assert_eq!(exact_rank(&ints(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn solve_small_system() {
        let a = vec![vec![rat(2, 1), rat(1, 1)], vec![rat(1, 1), rat(3, 1)]];
        let x = solve(&a, &[rat(3, 1), rat(5, 2)]).unwrap();
        assert_eq!(x, vec![rat(13, 10), rat(2, 5)]);
        let sing = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        assert!(solve(&sing, &[rat(1, 1), rat(1, 1)]).is_none());
    }

    #[test]
    fn kernel_of_single_row() {
        let k = integer_kernel(&ints(&[&[2, 4, 6]]), 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(dot(&ints(&[&[2, 4, 6]])[0], v).is_zero());
        }
    }

    #[test]
    fn kernel_is_saturated() {
        // 3x + 6y = 0 has kernel generated by (2, -1), not (4, -2)
        let k = integer_kernel(&ints(&[&[3, 6]]), 2);
        assert_eq!(k.len(), 1);
        assert_eq!(sup_norm(&k[0]), BigInt::from(2));
    }

    proptest! {
        #[test]
        fn bareiss_matches_rational_rank(m in prop::collection::vec(
            prop::collection::vec(-3i64..=3, 5), 1..6)) {
            let rows: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let rrows: Vec<Vec<Rat>> = m.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
            prop_assert_eq!(bareiss_rank(&rows), rat_rank(&rrows));
            prop_assert_eq!(exact_rank(&rows), rat_rank(&rrows));
        }

        #[test]
        fn kernel_dimension_and_annihilation(m in prop::collection::vec(
            prop::collection::vec(-4i64..=4, 6), 1..5)) {
            let rows: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let k = integer_kernel(&rows, 6);
            prop_assert_eq!(k.len(), 6 - bareiss_rank(&rows));
            for v in &k {
                for r in &rows {
                    prop_assert!(dot(r, v).is_zero());
                }
            }
            prop_assert_eq!(bareiss_rank(&k), k.len());
        }
    }
}
