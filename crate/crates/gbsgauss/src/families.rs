//! Built-in problem families: the balanced-index coefficient generator,
//! two covariance constructions, and the reference problems behind the
//! shipped tables.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::eigen::eigenvalues;
use crate::error::{Error, Result};
use crate::index::degree_profile;
use crate::logdomain::ln_factorial;
use crate::matrix::SymMatrix;
use crate::problem::{CoefficientFamily, GEProblem, Kind};

/// Divisor convention for the balanced-index family: (2k)! for problems
/// targeting squared hafnians, k! for plain ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientStyle {
    HafSq,
    Haf,
}

/// a_0 = 1; for 1 <= k <= K every index with I! = m_k receives
///
///   a_I = k^q gamma^k / (c_k * D_k),
///
/// where c_k = #{I : |I| = 2k, I! = m_k} = C(N, r_k) and D_k is (2k)! or
/// k! per the style. The sum over each degree is then k^q gamma^k / D_k.
pub fn make_example_coefficients(
    n: usize,
    k_trunc: u32,
    q: f64,
    gamma: f64,
    style: CoefficientStyle,
) -> Result<CoefficientFamily> {
    if gamma <= 0.0 {
        return Err(Error::ParameterOutOfRange(
            "gamma must be positive".into(),
        ));
    }
    let mut fam = CoefficientFamily::new(n, 1.0);
    for k in 1..=k_trunc {
        let profile = degree_profile(n, k);
        let indices = profile.balanced_indices();
        let ln_d = match style {
            CoefficientStyle::HafSq => ln_factorial(2 * k as u64),
            CoefficientStyle::Haf => ln_factorial(k as u64),
        };
        let ln_a = q * (k as f64).ln() + k as f64 * gamma.ln()
            - (indices.len() as f64).ln()
            - ln_d;
        let a = ln_a.exp();
        if a == 0.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "coefficient at degree {k} underflows; reduce K"
            )));
        }
        for idx in indices {
            fam.insert(idx, a)?;
        }
    }
    Ok(fam)
}

/// (b2 - b1) I + b1 * ones: minimum entry b1, maximum b2, eigenvalues
/// b2 + (N-1) b1 (once) and b2 - b1 (N-1 times), all inside (0, 1) when
/// 0 < b1 < b2 < 1/N.
pub fn make_b_two_level(n: usize, b1: f64, b2: f64) -> Result<SymMatrix> {
    if !(0.0 < b1 && b1 < b2 && b2 < 1.0 / n as f64) {
        return Err(Error::ParameterOutOfRange(format!(
            "need 0 < b1 < b2 < 1/N, got b1={b1}, b2={b2}, N={n}"
        )));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { b2 } else { b1 }).collect())
        .collect();
    SymMatrix::from_rows(&rows)
}

/// Covariance with a controlled spectrum: b1 * ones + diag(v), where v
/// holds m - 1 boosts of b2 - b1 and N - m + 1 boosts of sqrt(1 - tau^2),
/// m = floor(p ln N) clamped to [2, N].
///
/// tau is the midpoint of the interval that keeps both requirements at
/// once: tau >= N^{p / (2(m - N))} so that 1/d grows at most like N^p,
/// and tau >= sqrt(1 - (b2 - b1)^2) so that the boosted diagonal stays at
/// or below b2 and the maximum entry remains on the diagonal.
///
/// With noise > 0, seeded half-normal perturbations of scale
/// noise * (b2 - b1) / 4 are added to the off-diagonal entries (capped at
/// b2), except entry (1, N) which stays at b1 so the minimum is pinned.
/// The result is re-validated: spectrum strictly inside (0, 1) and
/// 1/d <= C N^p with C = (1 - (tau1 + (tau2 - tau1)/N)^2)^{-p/2}.
pub fn make_b_spectral(
    n: usize,
    b1: f64,
    b2: f64,
    p: f64,
    seed: u64,
    noise: f64,
) -> Result<SymMatrix> {
    let tau1 = b1 * n as f64;
    let tau2 = b2 * n as f64;
    if !(0.0 < tau1 && tau1 < tau2) {
        return Err(Error::ParameterOutOfRange(format!(
            "need 0 < b1 < b2, got b1={b1}, b2={b2}"
        )));
    }
    if tau2 + (n as f64 - 1.0) * tau1 >= n as f64 {
        return Err(Error::ParameterOutOfRange(format!(
            "need b2 + (N-1) b1 < 1, got {}",
            b2 + (n as f64 - 1.0) * b1
        )));
    }
    if p <= 0.0 {
        return Err(Error::ParameterOutOfRange("p must be positive".into()));
    }
    let m = ((p * (n as f64).ln()).floor() as usize).clamp(2, n);
    let d_floor = if m == n {
        0.0
    } else {
        (n as f64).powf(p / (2.0 * (m as f64 - n as f64)))
    };
    let diag_floor = (1.0 - (b2 - b1) * (b2 - b1)).sqrt();
    let tau_lo = d_floor.max(diag_floor);
    let tau = 0.5 * (tau_lo + 1.0);
    let small = (1.0 - tau * tau).sqrt();

    let mut rows = vec![vec![b1; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = if i < m - 1 { b2 } else { b1 + small };
    }

    if noise > 0.0 {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = noise * (b2 - b1) / 4.0;
        for i in 0..n {
            for j in i + 1..n {
                if i == 0 && j == n - 1 {
                    continue; // pin the (1, N) entry at the minimum
                }
                let g: f64 = StandardNormal.sample(&mut rng);
                let v = (b1 + g.abs() * scale).min(b2);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
    }

    let b = SymMatrix::from_rows(&rows)?;
    let lam = eigenvalues(&b)?;
    let (hi, lo) = (lam[0], *lam.last().unwrap());
    if lo <= 0.0 || hi >= 1.0 {
        return Err(Error::SpectrumViolation(format!(
            "constructed spectrum [{lo:.6}, {hi:.6}] left (0, 1)"
        )));
    }
    let inv_d: f64 = lam.iter().map(|l| 1.0 / (1.0 - l * l).sqrt()).product();
    let c_d = (1.0 - (tau1 + (tau2 - tau1) / n as f64).powi(2)).powf(-p / 2.0);
    if inv_d > c_d * (n as f64).powf(p) {
        return Err(Error::SpectrumViolation(format!(
            "1/d = {inv_d:.4} exceeds the admissible growth {:.4}",
            c_d * (n as f64).powf(p)
        )));
    }
    Ok(b)
}

// ---------------------------------------------------------------------------
// Reference problems

/// Full-precision covariance statistics used when reproducing the shipped
/// tables.
///
/// The reference covariance is published only to four decimal places and
/// its largest eigenvalue sits at 0.99999, so the normalization d (and the
/// entry extremes feeding the bound formulas) cannot be recovered from the
/// rounded matrix. The calibration carries the source values directly.
#[derive(Debug, Clone, Copy)]
pub struct BoundCalibration {
    pub bmin: f64,
    pub bmax: f64,
    pub inv_d: f64,
}

/// A built-in problem plus the calibration its bound reports use.
#[derive(Debug, Clone)]
pub struct ReferenceFamily {
    pub problem: GEProblem,
    pub calibration: BoundCalibration,
    pub q: f64,
    pub gamma: f64,
}

/// The 3x3 reference covariance (entries rounded to four decimals).
pub fn reference_covariance() -> SymMatrix {
    SymMatrix::from_rows(&[
        vec![0.3421, 0.3364, 0.3244],
        vec![0.3364, 0.3392, 0.3225],
        vec![0.3244, 0.3225, 0.3520],
    ])
    .unwrap()
}

/// Spectrum of the source covariance behind `reference_covariance`.
pub fn reference_spectrum() -> [f64; 3] {
    [0.99999, 0.029, 0.0042]
}

fn reference_calibration() -> BoundCalibration {
    let inv_d: f64 = reference_spectrum()
        .iter()
        .map(|l| 1.0 / (1.0 - l * l).sqrt())
        .product();
    BoundCalibration {
        bmin: 0.32251124,
        bmax: 0.35197177,
        inv_d,
    }
}

/// Reference squared-hafnian problem: N = 3, q = 1/2, gamma = 8.1825 over
/// the reference covariance, truncated at K.
pub fn reference_hafsq(k: u32) -> Result<ReferenceFamily> {
    let (q, gamma) = (0.5, 8.1825);
    let coeffs = make_example_coefficients(3, k, q, gamma, CoefficientStyle::HafSq)?;
    let problem = GEProblem::new(coeffs, reference_covariance(), Kind::HafSq)?;
    Ok(ReferenceFamily {
        problem,
        calibration: reference_calibration(),
        q,
        gamma,
    })
}

/// Reference plain-hafnian problem: N = 3, q = 1/2, gamma = 1.4368 over
/// the same covariance.
pub fn reference_haf(k: u32) -> Result<ReferenceFamily> {
    let (q, gamma) = (0.5, 1.4368);
    let coeffs = make_example_coefficients(3, k, q, gamma, CoefficientStyle::Haf)?;
    let problem = GEProblem::new(coeffs, reference_covariance(), Kind::Haf)?;
    Ok(ReferenceFamily {
        problem,
        calibration: reference_calibration(),
        q,
        gamma,
    })
}

/// Parameters of the squared-hafnian growth family at size N:
/// (q, gamma_alpha, gamma_beta, b1, b2), with K = N^2.
pub fn growth_hafsq_params(n: usize) -> (f64, f64, f64, f64, f64) {
    let nf = n as f64;
    (
        -nf / 4.0,
        10.0 / 13.0 * nf * nf,
        20.0 / 23.0 * nf * nf,
        0.8 / nf,
        1.1 / nf,
    )
}

/// Parameters of the plain-hafnian growth family at size N.
pub fn growth_haf_params(n: usize) -> (f64, f64, f64, f64, f64) {
    let nf = n as f64;
    (
        -nf / 2.0,
        10.0 / 21.0 * nf,
        5.0 / 11.0 * nf,
        0.96 / nf,
        1.11 / nf,
    )
}

/// Seed and noise level the growth-table commands use by default.
pub const GROWTH_SEED: u64 = 42;
pub const GROWTH_NOISE: f64 = 0.1;

/// The growth-family problem at size N (coefficients use the mean of the
/// two gammas, like the shipped growth tables).
pub fn growth_problem(n: usize, kind: Kind, k: u32) -> Result<GEProblem> {
    let (q, ga, gb, b1, b2, style) = match kind {
        Kind::HafSq => {
            let (q, ga, gb, b1, b2) = growth_hafsq_params(n);
            (q, ga, gb, b1, b2, CoefficientStyle::HafSq)
        }
        Kind::Haf => {
            let (q, ga, gb, b1, b2) = growth_haf_params(n);
            (q, ga, gb, b1, b2, CoefficientStyle::Haf)
        }
    };
    let b = make_b_spectral(n, b1, b2, 3.0, GROWTH_SEED, GROWTH_NOISE)?;
    let coeffs = make_example_coefficients(n, k, q, 0.5 * (ga + gb), style)?;
    GEProblem::new(coeffs, b, kind)
}

/// A random admissible covariance: random orthogonal frame around a
/// spectrum drawn from [lo, hi] inside (0, 1).
pub fn random_admissible_b(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> SymMatrix {
    // Random orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
    let mut q = vec![vec![0.0f64; n]; n];
    for row in q.iter_mut() {
        for v in row.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
    }
    for i in 0..n {
        for j in 0..i {
            let dot: f64 = (0..n).map(|k| q[i][k] * q[j][k]).sum();
            for k in 0..n {
                q[i][k] -= dot * q[j][k];
            }
        }
        let norm: f64 = (0..n).map(|k| q[i][k] * q[i][k]).sum::<f64>().sqrt();
        for k in 0..n {
            q[i][k] /= norm;
        }
    }
    let lam: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            rows[i][j] = (0..n).map(|k| q[k][i] * lam[k] * q[k][j]).sum();
        }
    }
    SymMatrix::from_rows(&rows).unwrap()
}
