//! Multi-indices, degree enumeration, and the balanced degree profile.

use crate::logdomain::ln_factorial;

/// A photon pattern / monomial exponent: a tuple of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    entries: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        let degree = entries.iter().sum();
        MultiIndex { entries, degree }
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex {
            entries: vec![0; n],
            degree: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// |I| = sum of entries (cached at construction).
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// I! as an exact integer; `None` once the product leaves `u128`.
    pub fn factorial(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for &e in &self.entries {
            for i in 2..=e as u128 {
                acc = acc.checked_mul(i)?;
            }
        }
        Some(acc)
    }

    /// ln(I!), always finite.
    pub fn ln_factorial(&self) -> f64 {
        self.entries.iter().map(|&e| ln_factorial(e as u64)).sum()
    }

    /// Entrywise sum I + J. Panics on length mismatch.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.len(), other.len());
        MultiIndex::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Compact display form, entries joined by semicolons.
    pub fn label(&self) -> String {
        self.entries
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// All I in N^N with |I| = 2k, in strictly descending lexicographic order.
///
/// The count is C(N + 2k - 1, 2k).
pub fn enumerate_indices(n: usize, k: u32) -> Vec<MultiIndex> {
    assert!(n >= 1);
    let m = 2 * k;
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    cur[0] = m;
    loop {
        out.push(MultiIndex::new(cur.clone()));
        // successor in descending lex order: decrement the rightmost
        // positive entry before the last and pile the tail just after it
        let Some(p) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] > 0) else {
            break;
        };
        let tail: u32 = cur[p + 1..].iter().sum::<u32>() + 1;
        cur[p] -= 1;
        for e in cur[p + 1..].iter_mut() {
            *e = 0;
        }
        cur[p + 1] = tail;
    }
    out
}

/// Number of multi-indices of length `n` and degree `m`: C(n + m - 1, m).
pub fn index_count(n: usize, m: u32) -> u128 {
    binomial(n as u128 + m as u128 - 1, m as u128)
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The balanced degree profile: 2k = N*s_k + r_k with 1 <= r_k <= N, and
/// m_k = (s_k!)^N (s_k + 1)^{r_k}, the factorial of the most balanced
/// index of degree 2k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeProfile {
    pub n: usize,
    pub k: u32,
    pub s_k: u32,
    pub r_k: u32,
}

pub fn degree_profile(n: usize, k: u32) -> DegreeProfile {
    assert!(n >= 1 && k >= 1);
    let two_k = 2 * k;
    let s = (two_k - 1) / n as u32;
    let r = two_k - n as u32 * s;
    debug_assert!(r >= 1 && r <= n as u32);
    DegreeProfile {
        n,
        k,
        s_k: s,
        r_k: r,
    }
}

impl DegreeProfile {
    /// m_k as an exact integer; `None` once it leaves `u128`.
    pub fn m_exact(&self) -> Option<u128> {
        self.canonical().factorial()
    }

    /// ln(m_k) = N ln(s_k!) + r_k ln(s_k + 1).
    pub fn ln_m(&self) -> f64 {
        self.n as f64 * ln_factorial(self.s_k as u64)
            + self.r_k as f64 * ((self.s_k + 1) as f64).ln()
    }

    /// The lexicographically largest index with I! = m_k: r_k entries of
    /// s_k + 1 followed by N - r_k entries of s_k.
    pub fn canonical(&self) -> MultiIndex {
        let mut v = vec![self.s_k; self.n];
        for e in v.iter_mut().take(self.r_k as usize) {
            *e = self.s_k + 1;
        }
        MultiIndex::new(v)
    }

    /// Every index of degree 2k whose factorial equals m_k: the distinct
    /// permutations of the canonical index. There are C(N, r_k) of them
    /// (one value when r_k = N).
    pub fn balanced_indices(&self) -> Vec<MultiIndex> {
        let n = self.n;
        let r = self.r_k as usize;
        let mut out = Vec::new();
        let mut positions: Vec<usize> = (0..r).collect();
        loop {
            let mut v = vec![self.s_k; n];
            for &p in &positions {
                v[p] = self.s_k + 1;
            }
            out.push(MultiIndex::new(v));
            // next combination of r positions out of n
            let mut i = r;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if positions[i] != i + n - r {
                    break;
                }
                if i == 0 {
                    return out;
                }
            }
            positions[i] += 1;
            for j in i + 1..r {
                positions[j] = positions[j - 1] + 1;
            }
        }
    }
}
