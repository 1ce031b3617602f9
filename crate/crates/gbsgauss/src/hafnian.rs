//! Two independent hafnian algorithms.
//!
//! `hafnian_dense` enumerates perfect matchings directly and serves as the
//! exact oracle at small sizes. `hafnian_repeated` evaluates Haf(B_I) for a
//! repeated-index submatrix without materializing it, by extracting the
//! z^I coefficient of exp(z^T B z / 2): the pair weights are c_mm = B_mm/2
//! and c_mn = B_mn (m < n), and
//!
//!   Haf(B_I) = I! * sum over pair exponents e with degree(e) = I of
//!              prod_p c_p^{e_p} / e_p!
//!
//! The sum runs in signed log arithmetic throughout, so degrees far past
//! the range where (2k)! overflows an f64 still evaluate; the linear-space
//! entry point reports overflow only when the final value itself cannot be
//! represented.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::logdomain::{ln_factorial, LogSumAcc, SignedLog};
use crate::matrix::SymMatrix;

/// Hard cap for the matching enumeration; (n-1)!! growth makes anything
/// larger pointless on a workstation.
pub const DENSE_DIM_CAP: usize = 24;

/// Hafnian by recursive pairing enumeration: fix the lowest unmatched row,
/// branch over its partners. 1 for the empty matrix, 0 for odd dimension.
pub fn hafnian_dense(m: &SymMatrix) -> Result<f64> {
    let n = m.dim();
    if n > DENSE_DIM_CAP {
        return Err(Error::DimensionTooLarge {
            n,
            cap: DENSE_DIM_CAP,
        });
    }
    if n == 0 {
        return Ok(1.0);
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let mut used = vec![false; n];
    Ok(pair_rec(m, &mut used))
}

fn pair_rec(m: &SymMatrix, used: &mut [bool]) -> f64 {
    let n = used.len();
    let Some(i) = (0..n).find(|&i| !used[i]) else {
        return 1.0;
    };
    used[i] = true;
    let mut acc = 0.0;
    for j in i + 1..n {
        if used[j] {
            continue;
        }
        let w = m.get(i, j);
        if w != 0.0 {
            used[j] = true;
            acc += w * pair_rec(m, used);
            used[j] = false;
        }
    }
    used[i] = false;
    acc
}

/// Haf(B_I) in signed log form; zero for odd |I|.
pub fn hafnian_repeated_log(b: &SymMatrix, index: &MultiIndex) -> Result<SignedLog> {
    let n = b.dim();
    if index.len() != n {
        return Err(Error::LengthMismatch {
            dim: n,
            len: index.len(),
        });
    }
    if index.degree() % 2 == 1 {
        return Ok(SignedLog::ZERO);
    }
    if index.degree() == 0 {
        return Ok(SignedLog::from_f64(1.0));
    }

    let mut rem: Vec<u32> = index.entries().to_vec();
    let mut memo: HashMap<(usize, Vec<u32>), SignedLog> = HashMap::new();
    let coeff = mode_rec(b, 0, &mut rem, &mut memo);
    Ok(coeff.mul(SignedLog::new(1.0, index.ln_factorial())))
}

/// Haf(B_I) in linear space; errors if the value leaves the f64 range.
pub fn hafnian_repeated(b: &SymMatrix, index: &MultiIndex) -> Result<f64> {
    let log = hafnian_repeated_log(b, index)?;
    let v = log.to_f64();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow)
    }
}

/// Sum over ways to spend the remaining degree of mode `mode` on pairs
/// (mode, n) with n >= mode, then recurse into the next mode. Memoized on
/// the remaining degree vector from `mode` onward.
fn mode_rec(
    b: &SymMatrix,
    mode: usize,
    rem: &mut Vec<u32>,
    memo: &mut HashMap<(usize, Vec<u32>), SignedLog>,
) -> SignedLog {
    let n = b.dim();
    if mode == n {
        return SignedLog::from_f64(1.0);
    }
    let key = (mode, rem[mode..].to_vec());
    if let Some(v) = memo.get(&key) {
        return *v;
    }
    let mut acc = LogSumAcc::new();
    distribute(
        b,
        mode,
        mode + 1,
        rem[mode],
        SignedLog::from_f64(1.0),
        rem,
        memo,
        &mut acc,
    );
    let total = acc.total();
    memo.insert(key, total);
    total
}

/// Chooses the exponent of pair (mode, partner); `left` is the degree of
/// `mode` still unassigned. When partners are exhausted the rest must fall
/// on the diagonal pair (mode, mode), consuming two units of degree each.
#[allow(clippy::too_many_arguments)]
fn distribute(
    b: &SymMatrix,
    mode: usize,
    partner: usize,
    left: u32,
    prefix: SignedLog,
    rem: &mut Vec<u32>,
    memo: &mut HashMap<(usize, Vec<u32>), SignedLog>,
    acc: &mut LogSumAcc,
) {
    let n = b.dim();
    if partner == n {
        if left % 2 == 1 {
            return;
        }
        let e = (left / 2) as u64;
        let c = b.get(mode, mode) / 2.0;
        if c == 0.0 && e > 0 {
            return;
        }
        let diag = pow_over_factorial(c, e);
        let saved = rem[mode];
        rem[mode] = 0;
        let tail = mode_rec(b, mode + 1, rem, memo);
        rem[mode] = saved;
        acc.add(prefix.mul(diag).mul(tail));
        return;
    }
    let c = b.get(mode, partner);
    let cap = left.min(rem[partner]);
    let top = if c == 0.0 { 0 } else { cap };
    for e in 0..=top {
        let w = prefix.mul(pow_over_factorial(c, e as u64));
        rem[partner] -= e;
        distribute(b, mode, partner + 1, left - e, w, rem, memo, acc);
        rem[partner] += e;
    }
}

/// c^e / e! as a signed log value.
fn pow_over_factorial(c: f64, e: u64) -> SignedLog {
    if e == 0 {
        return SignedLog::from_f64(1.0);
    }
    if c == 0.0 {
        return SignedLog::ZERO;
    }
    let sign = if c < 0.0 && e % 2 == 1 { -1.0 } else { 1.0 };
    SignedLog::new(sign, e as f64 * c.abs().ln() - ln_factorial(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ones(n: usize) -> SymMatrix {
        SymMatrix::from_rows(&vec![vec![1.0; n]; n]).unwrap()
    }

    fn double_factorial_odd(m: u64) -> f64 {
        // (2m - 1)!!
        (0..m).map(|i| (2 * i + 1) as f64).product()
    }

    #[test]
    fn empty_matrix_is_one() {
        assert_eq!(hafnian_dense(&SymMatrix::zeros(0)).unwrap(), 1.0);
    }

    #[test]
    fn odd_dimension_is_zero() {
        let m = SymMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 5.0, 4.0],
            vec![3.0, 4.0, 9.0],
        ])
        .unwrap();
        assert_eq!(hafnian_dense(&m).unwrap(), 0.0);
    }

    #[test]
    fn two_by_two_is_offdiagonal() {
        let m = SymMatrix::from_rows(&[vec![5.0, 7.0], vec![7.0, 11.0]]).unwrap();
        assert_eq!(hafnian_dense(&m).unwrap(), 7.0);
    }

    #[test]
    fn all_ones_counts_matchings() {
        assert_eq!(hafnian_dense(&ones(4)).unwrap(), 3.0);
        for m in 1..=5u64 {
            let h = hafnian_dense(&ones(2 * m as usize)).unwrap();
            assert!((h - double_factorial_odd(m)).abs() < 1e-9);
        }
    }

    #[test]
    fn dimension_cap_is_enforced() {
        match hafnian_dense(&SymMatrix::zeros(26)) {
            Err(Error::DimensionTooLarge { n: 26, cap: 24 }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    /// Independent oracle: the raw permutation sum
    /// sum_{sigma in S_{2m}} prod_j M[sigma(2j-1)][sigma(2j)] / (m! 2^m).
    fn hafnian_permutation_oracle(m: &SymMatrix) -> f64 {
        let n = m.dim();
        assert!(n % 2 == 0 && n > 0);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = 0.0;
        // Heap's algorithm, iterative
        let mut c = vec![0usize; n];
        let eval = |p: &[usize]| {
            let mut prod = 1.0;
            for j in 0..n / 2 {
                prod *= m.get(p[2 * j], p[2 * j + 1]);
            }
            prod
        };
        total += eval(&perm);
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                total += eval(&perm);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        let half = n as u64 / 2;
        let mut denom = 1.0;
        for j in 1..=half {
            denom *= j as f64;
        }
        total / (denom * 2f64.powi(half as i32))
    }

    #[test]
    fn dense_matches_permutation_sum_on_random_8x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|_| (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let m = SymMatrix::from_rows(&rows).unwrap();
        let fast = hafnian_dense(&m).unwrap();
        let oracle = hafnian_permutation_oracle(&m);
        assert!(
            (fast - oracle).abs() <= 1e-12 * oracle.abs().max(1.0),
            "fast={fast} oracle={oracle}"
        );
    }

    #[test]
    fn repeated_single_mode_closed_form() {
        // N = 1, B = [lambda], I = (2k): Haf = lambda^k (2k-1)!!
        let lam = 0.7;
        let b = SymMatrix::from_rows(&[vec![lam]]).unwrap();
        assert!((hafnian_repeated(&b, &MultiIndex::new(vec![2])).unwrap() - lam).abs() < 1e-15);
        for k in 1..=10u64 {
            let h = hafnian_repeated(&b, &MultiIndex::new(vec![2 * k as u32])).unwrap();
            let expect = lam.powi(k as i32) * double_factorial_odd(k);
            assert!(
                ((h - expect) / expect).abs() < 1e-12,
                "k={k} h={h} expect={expect}"
            );
        }
    }

    #[test]
    fn repeated_agrees_with_dense_on_submatrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let n = rng.gen_range(1..=4usize);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect())
                .collect();
            let b = SymMatrix::from_rows(&rows).unwrap();
            let mut entries = vec![0u32; n];
            // random even total degree <= 8
            loop {
                for e in entries.iter_mut() {
                    *e = rng.gen_range(0..=4u32);
                }
                let d: u32 = entries.iter().sum();
                if d % 2 == 0 && d <= 8 {
                    break;
                }
            }
            let idx = MultiIndex::new(entries);
            let via_dp = hafnian_repeated(&b, &idx).unwrap();
            let via_dense = hafnian_dense(&b.submatrix(&idx).unwrap()).unwrap();
            let scale = via_dense.abs().max(1e-30);
            assert!(
                (via_dp - via_dense).abs() <= 1e-12 * scale,
                "trial {trial}: dp={via_dp} dense={via_dense} I={:?}",
                idx.entries()
            );
        }
    }

    #[test]
    fn repeated_handles_signed_entries() {
        let b = SymMatrix::from_rows(&[
            vec![0.4, -0.3, 0.1],
            vec![-0.3, 0.5, -0.2],
            vec![0.1, -0.2, 0.6],
        ])
        .unwrap();
        for entries in [vec![2, 2, 0], vec![1, 2, 1], vec![2, 2, 2], vec![4, 1, 1]] {
            let idx = MultiIndex::new(entries);
            let via_dp = hafnian_repeated(&b, &idx).unwrap();
            let via_dense = hafnian_dense(&b.submatrix(&idx).unwrap()).unwrap();
            assert!(
                (via_dp - via_dense).abs() <= 1e-12 * via_dense.abs().max(1e-15),
                "I={:?}",
                idx.entries()
            );
        }
    }

    #[test]
    fn repeated_reaches_degree_one_hundred() {
        let b = SymMatrix::from_rows(&[
            vec![0.3421, 0.3364, 0.3244],
            vec![0.3364, 0.3392, 0.3225],
            vec![0.3244, 0.3225, 0.3520],
        ])
        .unwrap();
        let idx = MultiIndex::new(vec![34, 33, 33]);
        let log = hafnian_repeated_log(&b, &idx).unwrap();
        assert_eq!(log.sign, 1.0);
        assert!(log.ln_abs.is_finite());
        let lin = hafnian_repeated(&b, &idx).unwrap();
        assert!(lin.is_finite() && lin > 0.0);
    }

    #[test]
    fn odd_degree_repeated_is_zero() {
        let b = SymMatrix::from_rows(&[vec![0.5, 0.2], vec![0.2, 0.5]]).unwrap();
        assert_eq!(
            hafnian_repeated(&b, &MultiIndex::new(vec![2, 1])).unwrap(),
            0.0
        );
    }

    #[test]
    fn length_mismatch_is_reported() {
        let b = SymMatrix::from_rows(&[vec![0.5]]).unwrap();
        assert!(hafnian_repeated(&b, &MultiIndex::new(vec![2, 0])).is_err());
    }
}
