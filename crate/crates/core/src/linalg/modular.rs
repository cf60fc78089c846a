//! Ranks modulo word-sized primes, promoted to exact answers by certificate.
//!
//! A rank `r` observed modulo a prime is a lower bound for the rational rank
//! (a nonvanishing minor mod p is a nonvanishing integer minor). The upper
//! bound comes from a witness: every column outside the pivot set is written
//! as a rational combination of pivot columns, recovered by CRT and rational
//! reconstruction, and checked in exact arithmetic. If the witness cannot be
//! completed the computation falls back to pure rational elimination.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use super::{merge_axpy, rank_of_columns, SparseMatrix};
use crate::budget::Budget;
use crate::error::Result;
use crate::rational::Rational;

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "zero has no inverse");
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The largest primes below 2^31, in decreasing order.
pub fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut n: u64 = (1 << 31) - 1;
        while out.len() < 16 {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

/// Column data reduced modulo `p`, with row indices compressed to `0..rows`.
struct ModColumns {
    p: u64,
    rows: usize,
    cols: Vec<Vec<(usize, u64)>>,
}

fn reduce_columns(cols: &[Vec<(usize, Rational)>], row_map: &FxHashMap<usize, usize>, p: u64) -> Option<ModColumns> {
    let mut out = Vec::with_capacity(cols.len());
    for c in cols {
        let mut v = Vec::with_capacity(c.len());
        for (i, x) in c {
            let r = x.mod_p(p)?;
            if r != 0 {
                v.push((row_map[i], r));
            }
        }
        v.sort_unstable_by_key(|e| e.0);
        out.push(v);
    }
    Some(ModColumns { p, rows: row_map.len(), cols: out })
}

/// Result of elimination modulo one prime.
struct ModElimination {
    rank: usize,
    /// Columns that were independent of their predecessors.
    pivots: Vec<usize>,
    /// For each other column, its coefficients on `pivots` (dense, mod p).
    combos: Vec<(usize, Vec<u64>)>,
}

fn eliminate_mod(data: &ModColumns, track: bool) -> ModElimination {
    let p = data.p;
    let mut pivot_row = vec![usize::MAX; data.rows];
    let mut rows: Vec<Vec<(usize, u64)>> = Vec::new();
    let mut row_combo: Vec<Vec<(usize, u64)>> = Vec::new();
    let mut pivots = Vec::new();
    let mut combos = Vec::new();
    let mut work = vec![0u64; data.rows];
    let mut removed = vec![0u64; if track { data.cols.len() } else { 0 }];
    let mut pivot_pos = vec![usize::MAX; if track { data.cols.len() } else { 0 }];
    for (j, col) in data.cols.iter().enumerate() {
        let Some(start) = col.first().map(|e| e.0) else {
            if track {
                combos.push((j, Vec::new()));
            }
            continue;
        };
        for &(i, x) in col {
            work[i] = x;
        }
        let mut rest: Vec<(usize, u64)> = Vec::new();
        let mut touched: Vec<usize> = Vec::new();
        for k in start..data.rows {
            let c = work[k];
            if c == 0 {
                continue;
            }
            work[k] = 0;
            let r = pivot_row[k];
            if r == usize::MAX {
                rest.push((k, c));
                continue;
            }
            for &(i, x) in &rows[r][1..] {
                work[i] = sub_mod(work[i], mul_mod(c, x, p), p);
            }
            if track {
                for &(t, x) in &row_combo[r] {
                    if removed[t] == 0 {
                        touched.push(t);
                    }
                    removed[t] = add_mod(removed[t], mul_mod(c, x, p), p);
                }
            }
        }
        if rest.is_empty() {
            if track {
                let mut dense = vec![0u64; pivots.len()];
                for t in touched {
                    if removed[t] != 0 {
                        dense[pivot_pos[t]] = removed[t];
                    }
                    removed[t] = 0;
                }
                combos.push((j, dense));
            }
            continue;
        }
        let inv = inv_mod(rest[0].1, p);
        let row: Vec<(usize, u64)> = rest.iter().map(|&(i, x)| (i, mul_mod(x, inv, p))).collect();
        if track {
            let mut c: Vec<(usize, u64)> = Vec::new();
            for t in touched {
                if removed[t] != 0 {
                    c.push((t, mul_mod(p - removed[t], inv, p)));
                }
                removed[t] = 0;
            }
            c.push((j, inv));
            row_combo.push(c);
            pivot_pos[j] = pivots.len();
        }
        pivot_row[row[0].0] = rows.len();
        rows.push(row);
        pivots.push(j);
    }
    ModElimination { rank: rows.len(), pivots, combos }
}

fn column_data(m: &SparseMatrix) -> (Vec<Vec<(usize, Rational)>>, FxHashMap<usize, usize>) {
    let cols: Vec<Vec<(usize, Rational)>> = m.columns().iter().map(|c| c.entries().to_vec()).collect();
    let mut used: Vec<usize> = cols.iter().flat_map(|c| c.iter().map(|e| e.0)).collect();
    used.sort_unstable();
    used.dedup();
    let row_map = used.into_iter().enumerate().map(|(a, b)| (b, a)).collect();
    (cols, row_map)
}

/// Rank modulo a single prime, or `None` if the prime divides a denominator.
pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> Option<usize> {
    let (cols, row_map) = column_data(m);
    reduce_columns(&cols, &row_map, p).map(|d| eliminate_mod(&d, false).rank)
}

/// Rational number congruent to `a` modulo `m` with numerator and
/// denominator bounded by `sqrt(m/2)`, if one exists.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    let (n, d) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    Some(Rational::from_big(num_rational::BigRational::new(n, d)))
}

fn crt(residues: &[(u64, u64)]) -> (BigInt, BigInt) {
    let mut a = BigInt::zero();
    let mut m = BigInt::one();
    for &(r, p) in residues {
        let pb = BigInt::from(p);
        let a_mod = (&a % &pb).to_u64_digits().1.first().copied().unwrap_or(0);
        let m_mod = (&m % &pb).to_u64_digits().1.first().copied().unwrap_or(0);
        let k = mul_mod(sub_mod(r, a_mod, p), inv_mod(m_mod, p), p);
        a += &m * BigInt::from(k);
        m *= pb;
    }
    (a, m)
}

/// Exact rank with the default budget, computed modularly and certified.
pub fn rank_modular_certified(m: &SparseMatrix) -> Result<usize> {
    rank_modular_certified_with(m, &Budget::default())
}

pub fn rank_modular_certified_with(m: &SparseMatrix, budget: &Budget) -> Result<usize> {
    let (cols, row_map) = column_data(m);
    let all_primes = primes();
    let batch = 3;
    let mut runs: Vec<(u64, ModElimination)> = Vec::new();
    let mut next = 0;
    let mut best: Option<(usize, Vec<usize>)> = None;
    while next < all_primes.len() {
        budget.check_time("modular rank")?;
        let chunk = &all_primes[next..(next + batch).min(all_primes.len())];
        next += chunk.len();
        let results = crate::exec::map_slice(chunk, |&p| {
            reduce_columns(&cols, &row_map, p).map(|d| (p, eliminate_mod(&d, true)))
        });
        runs.extend(results.into_iter().flatten());
        let Some(top) = runs.iter().map(|(_, e)| e.rank).max() else { continue };
        let leader = runs.iter().find(|(_, e)| e.rank == top).expect("rank present");
        best = Some((top, leader.1.pivots.clone()));
        let (rank, pivots) = best.as_ref().expect("set above");
        let agreeing: Vec<&(u64, ModElimination)> = runs.iter().filter(|(_, e)| e.pivots == *pivots).collect();
        if let Some(ok) = certify(&cols, pivots, &agreeing) {
            if ok {
                return Ok(*rank);
            }
        }
    }
    log::debug!("modular certificate incomplete (best {:?}); exact fallback", best.map(|b| b.0));
    rank_of_columns(cols, budget)
}

/// Tries to reconstruct and verify every dependency. `None` means more
/// primes are needed.
fn certify(cols: &[Vec<(usize, Rational)>], pivots: &[usize], runs: &[&(u64, ModElimination)]) -> Option<bool> {
    if runs.is_empty() {
        return None;
    }
    let deps = &runs[0].1.combos;
    let checks = crate::exec::map_range(deps.len(), |d| {
        let (j, _) = deps[d];
        let mut acc: Vec<(usize, Rational)> = Vec::new();
        for (t, &pc) in pivots.iter().enumerate() {
            let residues: Vec<(u64, u64)> = runs.iter().map(|(p, e)| (e.combos[d].1.get(t).copied().unwrap_or(0), *p)).collect();
            let (a, m) = crt(&residues);
            let coeff = rational_reconstruct(&a, &m)?;
            if !coeff.is_zero() {
                acc = merge_axpy(&acc, &coeff, &cols[pc]);
            }
        }
        Some(acc == cols[j])
    });
    let mut all = true;
    for c in checks {
        match c {
            None | Some(false) => all = false,
            Some(true) => {}
        }
    }
    if all {
        Some(true)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank, SparseVector};

    #[test]
    fn arithmetic_helpers() {
        let p = primes()[0];
        assert_eq!(p, 2147483647);
        for a in [1u64, 2, 12345, p - 1] {
            assert_eq!(mul_mod(a, inv_mod(a, p), p), 1);
        }
        assert!(primes().iter().all(|&q| is_prime(q) && q < (1 << 31)));
    }

    #[test]
    fn reconstruct_fractions() {
        let p = BigInt::from(primes()[0]) * BigInt::from(primes()[1]);
        for (n, d) in [(3i64, 7i64), (-22, 5), (0, 1), (123456, 1)] {
            let r = Rational::new(n, d);
            let res: Vec<(u64, u64)> = primes()[..2].iter().map(|&q| (r.mod_p(q).unwrap(), q)).collect();
            let (a, m) = crt(&res);
            assert_eq!(m, p);
            assert_eq!(rational_reconstruct(&a, &m), Some(r));
        }
    }

    #[test]
    fn certified_rank_matches_exact() {
        let m = SparseMatrix::from_int_rows(&[
            vec![1, 2, 3, 4],
            vec![2, 4, 6, 8],
            vec![0, 1, 0, 1],
            vec![3, 7, 9, 13],
        ]);
        assert_eq!(rank_modular_certified(&m).unwrap(), rank(&m).unwrap());
        let half = Rational::new(1, 2);
        let c = SparseVector::from_dense(&[half.clone(), Rational::from_int(3)]);
        let m2 = SparseMatrix::from_columns(2, vec![c.clone(), c.scale(&Rational::new(-5, 3))]).unwrap();
        assert_eq!(rank_modular_certified(&m2).unwrap(), 1);
    }

    #[test]
    fn zero_and_entries_vanishing_mod_p() {
        let p = primes()[0] as i64;
        let m = SparseMatrix::from_int_rows(&[vec![p, 0], vec![0, 0]]);
        assert_eq!(rank_modular_certified(&m).unwrap(), 1);
        assert_eq!(rank_modular_certified(&SparseMatrix::zero(3, 3)).unwrap(), 0);
    }
}
