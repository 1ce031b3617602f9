//! Classical simulation of the photon-count distribution of a Gaussian
//! boson sampler programmed with a covariance B, plus the squeezed-state
//! preparation that realizes it on hardware.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigen::{eigenvalues, sym_eigen};
use crate::error::{Error, Result};
use crate::hafnian::hafnian_repeated_log;
use crate::index::{enumerate_indices, index_count, MultiIndex};
use crate::matrix::{Matrix, SymMatrix};

/// Default cap on the number of tabulated outcomes.
pub const INDEX_CAP: usize = 1_000_000;

/// Normalization from a spectrum: d = prod sqrt(1 - lambda_j^2).
pub fn d_from_spectrum(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|l| (1.0 - l * l).sqrt()).product()
}

/// d for a covariance with spectrum in (-1, 1); cross-checked against
/// sqrt(det(I - B^2)).
pub fn compute_d(b: &SymMatrix) -> Result<f64> {
    let lam = eigenvalues(b)?;
    if lam.iter().any(|l| l.abs() >= 1.0) {
        return Err(Error::SpectrumViolation(
            "eigenvalues must lie strictly inside (-1, 1)".into(),
        ));
    }
    let d = d_from_spectrum(&lam);

    let n = b.dim();
    let mut i_minus_b2 = Matrix::identity(n);
    let bm = Matrix::from_sym(b);
    let b2 = bm.matmul(&bm);
    for i in 0..n {
        for j in 0..n {
            let v = i_minus_b2.get(i, j) - b2.get(i, j);
            i_minus_b2.set(i, j, v);
        }
    }
    let det = i_minus_b2.det();
    if det <= 0.0 || ((det.sqrt() - d) / d).abs() > 1e-6 {
        return Err(Error::DomainViolation(format!(
            "normalization cross-check failed: eigen route {d:.12e}, det route {:.12e}",
            det.max(0.0).sqrt()
        )));
    }
    Ok(d)
}

/// Where a draw landed: a tabulated pattern, or the lumped tail mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pattern(usize),
    Residual,
}

/// The truncated photon-count distribution: p_I = (d / I!) Haf(B_I)^2 for
/// every even pattern with |I| <= 2 K_max, plus the lumped residual.
#[derive(Debug, Clone)]
pub struct GbsDistribution {
    d: f64,
    k_max: u32,
    patterns: Vec<MultiIndex>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    residual: f64,
}

impl GbsDistribution {
    /// Tabulates the distribution. Requires spectrum(B) in [0, 1); the
    /// index count is capped (`INDEX_CAP` by default) to bound the work.
    pub fn build(b: &SymMatrix, k_max: u32) -> Result<Self> {
        Self::build_capped(b, k_max, INDEX_CAP)
    }

    pub fn build_capped(b: &SymMatrix, k_max: u32, cap: usize) -> Result<Self> {
        let lam = eigenvalues(b)?;
        if lam.iter().any(|&l| l >= 1.0 || l < 0.0) {
            return Err(Error::SpectrumViolation(
                "sampling requires eigenvalues in [0, 1)".into(),
            ));
        }
        let n = b.dim();
        let mut total_count: u128 = 0;
        for k in 0..=k_max {
            total_count += index_count(n, 2 * k);
        }
        if total_count > cap as u128 {
            return Err(Error::CostGuard(format!(
                "{total_count} outcomes exceed the cap of {cap}"
            )));
        }
        let d = d_from_spectrum(&lam);
        let ln_d = d.ln();
        let mut patterns = Vec::with_capacity(total_count as usize);
        let mut probs = Vec::with_capacity(total_count as usize);
        for k in 0..=k_max {
            for idx in enumerate_indices(n, k) {
                let haf = hafnian_repeated_log(b, &idx)?;
                let ln_p = ln_d - idx.ln_factorial() + 2.0 * haf.ln_abs;
                let p = if haf.is_zero() { 0.0 } else { ln_p.exp() };
                patterns.push(idx);
                probs.push(p);
            }
        }
        let mass: f64 = probs.iter().sum();
        let residual = (1.0 - mass).max(0.0);
        if mass > 1.0 + 1e-9 {
            return Err(Error::DomainViolation(format!(
                "tabulated mass {mass} exceeds 1"
            )));
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        Ok(GbsDistribution {
            d,
            k_max,
            patterns,
            probs,
            cumulative,
            residual,
        })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn pattern(&self, i: usize) -> &MultiIndex {
        &self.patterns[i]
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.patterns.iter().zip(self.probs.iter().copied())
    }

    /// Mass lumped past the truncation: 1 - sum of tabulated p_I.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn tabulated_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// One inverse-CDF draw from the provided generator.
    pub fn draw_one(&self, rng: &mut ChaCha8Rng) -> Outcome {
        let u: f64 = rng.gen();
        let i = self.cumulative.partition_point(|&c| c <= u);
        if i >= self.cumulative.len() {
            Outcome::Residual
        } else {
            Outcome::Pattern(i)
        }
    }

    /// n i.i.d. draws, deterministic in (seed, n).
    pub fn draw(&self, seed: u64, n: usize) -> Vec<Outcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.draw_one(&mut rng)).collect()
    }

    /// CSV dump: `index,p` rows with semicolon-joined patterns, final row
    /// RESIDUAL.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,p")?;
        for (idx, p) in self.iter() {
            writeln!(w, "{},{:.16e}", idx.label(), p)?;
        }
        writeln!(w, "RESIDUAL,{:.16e}", self.residual)?;
        Ok(())
    }
}

/// Squeezed-state preparation encoding a covariance B on N modes.
#[derive(Debug, Clone)]
pub struct StatePrep {
    /// Orthogonal frame diagonalizing B.
    pub u: Matrix,
    /// Per-mode squeezing parameters r_n = atanh(lambda_n).
    pub squeezings: Vec<f64>,
    /// 2N x 2N second-moment matrix of the prepared Gaussian state.
    pub sigma: Matrix,
}

impl StatePrep {
    /// Sigma_Q = Sigma + I/2.
    pub fn sigma_q(&self) -> Matrix {
        let n2 = self.sigma.n;
        let mut m = self.sigma.clone();
        for i in 0..n2 {
            m.set(i, i, m.get(i, i) + 0.5);
        }
        m
    }

    /// Max |Sigma_Q^{-1} - [[I, -B], [-B, I]]| entrywise.
    pub fn inverse_residual(&self, b: &SymMatrix) -> Result<f64> {
        let n = b.dim();
        let inv = self.sigma_q().inverse()?;
        let mut worst = 0.0f64;
        for i in 0..2 * n {
            for j in 0..2 * n {
                let target = match (i < n, j < n) {
                    (true, true) | (false, false) => {
                        if i == j {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    (true, false) => -b.get(i, j - n),
                    (false, true) => -b.get(i - n, j),
                };
                worst = worst.max((inv.get(i, j) - target).abs());
            }
        }
        Ok(worst)
    }
}

/// Diagonalizes B = U D U^T and builds the squeezed state with
/// r_n = atanh(d_n); the state's Sigma_Q inverts to [[I, -B], [-B, I]].
pub fn prepare_state(b: &SymMatrix) -> Result<StatePrep> {
    let n = b.dim();
    let (lam, vecs) = sym_eigen(b)?;
    if lam.iter().any(|&l| l >= 1.0 || l < 0.0) {
        return Err(Error::SpectrumViolation(
            "state preparation requires eigenvalues in [0, 1)".into(),
        ));
    }
    let squeezings: Vec<f64> = lam.iter().map(|&l| l.atanh()).collect();

    let mut u = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            u.set(i, j, vecs[i][j]);
        }
    }

    // Sigma is half the conjugated R R^T block matrix:
    //   [[U diag(cosh^2 r - 1/2) U^T, U diag(cosh r sinh r) U^T],
    //    [U diag(cosh r sinh r) U^T,  U diag(cosh^2 r - 1/2) U^T]]
    // so that Sigma_Q = Sigma + I/2 has cosh^2 diagonal blocks and inverts
    // to [[I, -B], [-B, I]].
    let mut sigma = Matrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let mut diag_block = 0.0;
            let mut off_block = 0.0;
            for (k, &r) in squeezings.iter().enumerate() {
                let (sh, ch) = (r.sinh(), r.cosh());
                diag_block += u.get(i, k) * (ch * ch - 0.5) * u.get(j, k);
                off_block += u.get(i, k) * ch * sh * u.get(j, k);
            }
            sigma.set(i, j, diag_block);
            sigma.set(n + i, n + j, diag_block);
            sigma.set(i, n + j, off_block);
            sigma.set(n + i, j, off_block);
        }
    }

    Ok(StatePrep {
        u,
        squeezings,
        sigma,
    })
}
