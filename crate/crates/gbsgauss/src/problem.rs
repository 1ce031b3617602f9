//! Gaussian expectation problems: sparse even-degree coefficient families
//! over a covariance matrix, with exact evaluation of the mean via the
//! repeated-index hafnian.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eigen::eigenvalues;
use crate::error::{Error, Result};
use crate::hafnian::hafnian_repeated_log;
use crate::index::MultiIndex;
use crate::logdomain::{LogSumAcc, SignedLog};
use crate::matrix::SymMatrix;

/// Which integrand the problem carries: sum of a_I x^I against one
/// Gaussian factor, or sum of a_I p^I q^I against two independent copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Haf,
    HafSq,
}

/// Sparse even-degree coefficients a_I, bucketed by half-degree k.
///
/// Odd-degree indices are dropped at construction: they integrate to zero
/// against a centered Gaussian, so the mean never sees them.
#[derive(Debug, Clone)]
pub struct CoefficientFamily {
    n: usize,
    k_max: u32,
    a0: f64,
    by_degree: BTreeMap<u32, BTreeMap<MultiIndex, f64>>,
    all_nonnegative: bool,
}

impl CoefficientFamily {
    pub fn new(n: usize, a0: f64) -> Self {
        CoefficientFamily {
            n,
            k_max: 0,
            a0,
            by_degree: BTreeMap::new(),
            all_nonnegative: a0 >= 0.0,
        }
    }

    /// Inserts (or accumulates into) the coefficient of x^I. Odd-degree
    /// indices are ignored; the zero index updates a0.
    pub fn insert(&mut self, index: MultiIndex, a: f64) -> Result<()> {
        if index.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: index.len(),
            });
        }
        if !a.is_finite() {
            return Err(Error::ParameterOutOfRange(format!(
                "coefficient for {} is not finite",
                index.label()
            )));
        }
        let d = index.degree();
        if d == 0 {
            self.a0 += a;
        } else if d % 2 == 0 {
            let k = d / 2;
            self.k_max = self.k_max.max(k);
            *self
                .by_degree
                .entry(k)
                .or_default()
                .entry(index)
                .or_insert(0.0) += a;
        }
        self.recompute_sign_summary();
        Ok(())
    }

    fn recompute_sign_summary(&mut self) {
        self.all_nonnegative = self.a0 >= 0.0
            && self
                .by_degree
                .values()
                .all(|m| m.values().all(|&a| a >= 0.0));
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The truncation degree K: the largest k with a stored coefficient.
    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn all_nonnegative(&self) -> bool {
        self.all_nonnegative
    }

    pub fn coefficient(&self, index: &MultiIndex) -> f64 {
        if index.degree() == 0 {
            return self.a0;
        }
        if index.degree() % 2 == 1 {
            return 0.0;
        }
        self.by_degree
            .get(&(index.degree() / 2))
            .and_then(|m| m.get(index))
            .copied()
            .unwrap_or(0.0)
    }

    /// Nonzero coefficients of positive degree, ascending by (k, index).
    pub fn support(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.by_degree
            .values()
            .flat_map(|m| m.iter().map(|(i, &a)| (i, a)))
    }

    /// Sum of a_I over |I| = 2k.
    pub fn degree_sum(&self, k: u32) -> f64 {
        self.by_degree
            .get(&k)
            .map(|m| m.values().sum())
            .unwrap_or(0.0)
    }

    pub fn scale(&mut self, c: f64) {
        self.a0 *= c;
        for m in self.by_degree.values_mut() {
            for a in m.values_mut() {
                *a *= c;
            }
        }
        self.recompute_sign_summary();
    }

    pub fn support_len(&self) -> usize {
        self.by_degree.values().map(|m| m.len()).sum()
    }
}

/// A Gaussian expectation problem: coefficients, covariance, and kind.
///
/// The covariance spectrum must lie strictly inside (0, 1); this is the
/// admissible set for both the exact reduction and the sampling paths.
#[derive(Debug, Clone)]
pub struct GEProblem {
    coeffs: CoefficientFamily,
    b: SymMatrix,
    kind: Kind,
    bmax: f64,
    bmin: f64,
    spectrum: Vec<f64>,
}

impl GEProblem {
    pub fn new(coeffs: CoefficientFamily, b: SymMatrix, kind: Kind) -> Result<Self> {
        if coeffs.n() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: b.dim(),
                got: coeffs.n(),
            });
        }
        let spectrum = eigenvalues(&b)?;
        if let Some(&lo) = spectrum.last() {
            let hi = spectrum[0];
            if lo <= 0.0 || hi >= 1.0 {
                return Err(Error::SpectrumViolation(format!(
                    "covariance spectrum [{lo:.6}, {hi:.6}] must lie strictly inside (0, 1)"
                )));
            }
        }
        let bmax = b.max_abs();
        let bmin = b.min_entry();
        Ok(GEProblem {
            coeffs,
            b,
            kind,
            bmax,
            bmin,
            spectrum,
        })
    }

    pub fn coeffs(&self) -> &CoefficientFamily {
        &self.coeffs
    }

    pub fn b(&self) -> &SymMatrix {
        &self.b
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.b.dim()
    }

    pub fn k_max(&self) -> u32 {
        self.coeffs.k_max()
    }

    /// Max |B_ij|.
    pub fn bmax(&self) -> f64 {
        self.bmax
    }

    /// Min B_ij (signed).
    pub fn bmin(&self) -> f64 {
        self.bmin
    }

    /// Eigenvalues of B, descending.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Restricts the coefficients to half-degree <= k.
    pub fn truncated(&self, k: u32) -> GEProblem {
        let mut coeffs = CoefficientFamily::new(self.coeffs.n(), self.coeffs.a0());
        for (i, a) in self.coeffs.support() {
            if i.degree() / 2 <= k {
                coeffs.insert(i.clone(), a).unwrap();
            }
        }
        GEProblem {
            coeffs,
            b: self.b.clone(),
            kind: self.kind,
            bmax: self.bmax,
            bmin: self.bmin,
            spectrum: self.spectrum.clone(),
        }
    }

    /// Exact mean: sum over the support of a_I Haf(B_I) (or its square),
    /// accumulated in signed log arithmetic.
    pub fn mu_exact(&self) -> Result<f64> {
        let mut acc = LogSumAcc::new();
        acc.add_f64(self.coeffs.a0());
        for (index, a) in self.coeffs.support() {
            let h = hafnian_repeated_log(&self.b, index)?;
            let term = match self.kind {
                Kind::Haf => h,
                Kind::HafSq => h.square(),
            };
            acc.add(term.mul(SignedLog::from_f64(a)));
        }
        let v = acc.total().to_f64();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow)
        }
    }

    /// Evaluates the integrand at a point: x of length N for the plain
    /// kind, (u, v) concatenated to length 2N for the squared kind.
    pub fn eval_f(&self, point: &[f64]) -> Result<f64> {
        let n = self.n();
        match self.kind {
            Kind::Haf => {
                if point.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: point.len(),
                    });
                }
                let mut acc = self.coeffs.a0();
                for (index, a) in self.coeffs.support() {
                    acc += a * monomial(point, index);
                }
                Ok(acc)
            }
            Kind::HafSq => {
                if point.len() != 2 * n {
                    return Err(Error::DimensionMismatch {
                        expected: 2 * n,
                        got: point.len(),
                    });
                }
                let (u, v) = point.split_at(n);
                let mut acc = self.coeffs.a0();
                for (index, a) in self.coeffs.support() {
                    acc += a * monomial(u, index) * monomial(v, index);
                }
                Ok(acc)
            }
        }
    }
}

fn monomial(x: &[f64], index: &MultiIndex) -> f64 {
    let mut p = 1.0;
    for (xi, &e) in x.iter().zip(index.entries()) {
        if e > 0 {
            p *= xi.powi(e as i32);
        }
    }
    p
}

// ---------------------------------------------------------------------------
// Problem-file schema

/// On-disk problem description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: u32,
    pub kind: Kind,
    #[serde(rename = "B")]
    pub b: CovarianceSpec,
    pub coefficients: CoefficientSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceSpec {
    Explicit(Vec<Vec<f64>>),
    TwoLevel {
        b1: f64,
        b2: f64,
    },
    Spectral {
        b1: f64,
        b2: f64,
        p: f64,
        seed: u64,
        noise: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSpec {
    /// The balanced-index family: a_0 = 1 and weight k^q gamma^k spread
    /// uniformly over the indices with I! = m_k, with the divisor keyed
    /// off the problem kind ((2k)! for hafsq, k! for haf).
    Example { q: f64, gamma: f64 },
    Explicit(Vec<ExplicitCoefficient>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplicitCoefficient {
    #[serde(rename = "I")]
    pub index: Vec<u32>,
    pub a: f64,
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_problem(&self) -> Result<GEProblem> {
        let b = match &self.b {
            CovarianceSpec::Explicit(rows) => {
                if rows.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        got: rows.len(),
                    });
                }
                SymMatrix::from_rows(rows)?
            }
            CovarianceSpec::TwoLevel { b1, b2 } => {
                crate::families::make_b_two_level(self.n, *b1, *b2)?
            }
            CovarianceSpec::Spectral {
                b1,
                b2,
                p,
                seed,
                noise,
            } => crate::families::make_b_spectral(self.n, *b1, *b2, *p, *seed, *noise)?,
        };
        let coeffs = match &self.coefficients {
            CoefficientSpec::Example { q, gamma } => {
                let style = match self.kind {
                    Kind::Haf => crate::families::CoefficientStyle::Haf,
                    Kind::HafSq => crate::families::CoefficientStyle::HafSq,
                };
                crate::families::make_example_coefficients(self.n, self.k, *q, *gamma, style)?
            }
            CoefficientSpec::Explicit(list) => {
                let mut c = CoefficientFamily::new(self.n, 0.0);
                for item in list {
                    c.insert(MultiIndex::new(item.index.clone()), item.a)?;
                }
                c
            }
        };
        GEProblem::new(coeffs, b, self.kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_problem(a0: f64) -> GEProblem {
        let b = SymMatrix::from_rows(&[vec![0.5, 0.1], vec![0.1, 0.5]]).unwrap();
        GEProblem::new(CoefficientFamily::new(2, a0), b, Kind::Haf).unwrap()
    }

    #[test]
    fn constant_mean_is_a0() {
        assert!((constant_problem(7.5).mu_exact().unwrap() - 7.5).abs() < 1e-15);
    }

    #[test]
    fn single_quadratic_term_gives_variance() {
        // N = 1, a_(2) = 1, B = [0.4]: E[x^2] = 0.4
        let b = SymMatrix::from_rows(&[vec![0.4]]).unwrap();
        let mut c = CoefficientFamily::new(1, 0.0);
        c.insert(MultiIndex::new(vec![2]), 1.0).unwrap();
        let p = GEProblem::new(c, b, Kind::Haf).unwrap();
        assert!((p.mu_exact().unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn odd_degree_coefficients_are_inert() {
        let b = SymMatrix::from_rows(&[vec![0.5, 0.1], vec![0.1, 0.5]]).unwrap();
        let mut c = CoefficientFamily::new(2, 1.0);
        c.insert(MultiIndex::new(vec![1, 1]), 0.25).unwrap();
        let mu_before = GEProblem::new(c.clone(), b.clone(), Kind::Haf)
            .unwrap()
            .mu_exact()
            .unwrap();
        c.insert(MultiIndex::new(vec![1, 0]), 123.0).unwrap();
        c.insert(MultiIndex::new(vec![2, 1]), -55.0).unwrap();
        let mu_after = GEProblem::new(c, b, Kind::Haf).unwrap().mu_exact().unwrap();
        assert_eq!(mu_before, mu_after);
    }

    #[test]
    fn eval_f_monomials() {
        let b = SymMatrix::from_rows(&[
            vec![0.3, 0.0, 0.0],
            vec![0.0, 0.3, 0.0],
            vec![0.0, 0.0, 0.3],
        ])
        .unwrap();
        let mut c = CoefficientFamily::new(3, 0.0);
        c.insert(MultiIndex::new(vec![1, 1, 0]), 2.0).unwrap();
        let p = GEProblem::new(c, b, Kind::HafSq).unwrap();
        // u = (1,2,3), v = (4,5,6): 2 * (1*2) * (4*5) = 80
        let v = p.eval_f(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!((v - 80.0).abs() < 1e-12);

        let cst = constant_problem(3.25);
        assert!((cst.eval_f(&[9.0, -2.0]).unwrap() - 3.25).abs() < 1e-15);
        assert!(cst.eval_f(&[1.0]).is_err());
    }

    #[test]
    fn spectrum_gate_rejects_bad_covariance() {
        let c = CoefficientFamily::new(1, 1.0);
        let too_big = SymMatrix::from_rows(&[vec![1.5]]).unwrap();
        assert!(GEProblem::new(c.clone(), too_big, Kind::Haf).is_err());
        let negative = SymMatrix::from_rows(&[vec![-0.2]]).unwrap();
        assert!(GEProblem::new(c, negative, Kind::Haf).is_err());
    }

    #[test]
    fn hafsq_factorizes_termwise() {
        let b = SymMatrix::from_rows(&[vec![0.5, 0.2], vec![0.2, 0.4]]).unwrap();
        let mut c = CoefficientFamily::new(2, 1.0);
        c.insert(MultiIndex::new(vec![2, 0]), 0.3).unwrap();
        c.insert(MultiIndex::new(vec![1, 1]), 0.7).unwrap();
        c.insert(MultiIndex::new(vec![2, 2]), -0.1).unwrap();
        let p = GEProblem::new(c.clone(), b.clone(), Kind::HafSq).unwrap();
        let mut direct = 1.0;
        for (i, a) in c.support() {
            let h = crate::hafnian::hafnian_repeated(&b, i).unwrap();
            direct += a * h * h;
        }
        assert!((p.mu_exact().unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn json_roundtrip_explicit() {
        let text = r#"{
            "N": 2, "K": 2, "kind": "haf",
            "B": {"explicit": [[0.5, 0.1], [0.1, 0.5]]},
            "coefficients": {"explicit": [{"I": [2, 0], "a": 1.0}, {"I": [1, 1], "a": 0.5}]}
        }"#;
        let spec = ProblemSpec::from_json(text).unwrap();
        let p = spec.to_problem().unwrap();
        assert_eq!(p.n(), 2);
        // mu = 1.0 * Haf(B_(2,0)) + 0.5 * Haf(B_(1,1)) = 0.5 + 0.5*0.1
        assert!((p.mu_exact().unwrap() - 0.55).abs() < 1e-14);
    }
}
