//! Statistical and ordering invariants that tie the exact second moments,
//! the bound factors, and the estimators together.

use gbsgauss::bounds::{self, BoundParams};
use gbsgauss::cli::growth_table;
use gbsgauss::cli::TableKind;
use gbsgauss::estimators::{mc_estimate, q_gbs_i, q_gbs_p, q_mc, EstimatorKind, Session};
use gbsgauss::families::{reference_haf, reference_hafsq};
use gbsgauss::problem::Kind;

fn params_for(q: f64, gamma: f64, eps: f64, delta: f64) -> BoundParams {
    BoundParams {
        q_alpha: q,
        q_beta: q,
        gamma_alpha: gamma,
        gamma_beta: gamma,
        c_alpha: Some(1.0),
        c_beta: Some(1.0),
        mu0: None,
        eps,
        delta,
        s1: 1e-9,
        s2: 1e-9,
        zeta: None,
        p: None,
        infinite_k: false,
    }
}

/// U dominates the exact Q/mu^2 (evaluated with the problem's own d and
/// entry extremes) for every tabulated truncation; L is dominated by the
/// exact MC moment where that moment is affordable.
#[test]
fn factors_bracket_exact_moments() {
    for k in (5..=50).step_by(5) {
        let fam = reference_hafsq(k).unwrap();
        let p = &fam.problem;
        let mu = p.mu_exact().unwrap();
        let d = gbsgauss::gbs::compute_d(p.b()).unwrap();
        let params = params_for(fam.q, fam.gamma, 0.1, 0.1);
        let u = bounds::u_factor_gbs_i(&params, 3, k, p.bmin(), p.bmax(), d, 0.0).unwrap();
        let q_exact = q_gbs_i(p).unwrap();
        assert!(
            q_exact / (mu * mu) <= u,
            "K={k}: exact {} vs U {u}",
            q_exact / (mu * mu)
        );

        let fam2 = reference_haf(k).unwrap();
        let p2 = &fam2.problem;
        let mu2 = p2.mu_exact().unwrap();
        let d2 = gbsgauss::gbs::compute_d(p2.b()).unwrap();
        let params2 = params_for(fam2.q, fam2.gamma, 0.1, 0.1);
        let u2 = bounds::u_factor_gbs_p(&params2, 3, k, p2.bmin(), p2.bmax(), d2).unwrap();
        let q2_exact = q_gbs_p(p2).unwrap();
        assert!(
            q2_exact / (mu2 * mu2) <= u2,
            "K={k}: exact {} vs U {u2}",
            q2_exact / (mu2 * mu2)
        );
    }

    // exact MC moment affordable up to K = 10
    for k in [5u32, 10] {
        let fam = reference_hafsq(k).unwrap();
        let p = &fam.problem;
        let mu = p.mu_exact().unwrap();
        let params = params_for(fam.q, fam.gamma, 0.1, 0.1);
        let l = bounds::l_factor_mc(&params, k, p.bmin(), p.bmax(), Kind::HafSq);
        let q_exact = q_mc(p).unwrap();
        assert!(
            q_exact / (mu * mu) >= l,
            "K={k}: exact {} vs L {l}",
            q_exact / (mu * mu)
        );

        let fam2 = reference_haf(k).unwrap();
        let p2 = &fam2.problem;
        let mu2 = p2.mu_exact().unwrap();
        let params2 = params_for(fam2.q, fam2.gamma, 0.1, 0.1);
        let l2 = bounds::l_factor_mc(&params2, k, p2.bmin(), p2.bmax(), Kind::Haf);
        let q2_exact = q_mc(p2).unwrap();
        assert!(q2_exact / (mu2 * mu2) >= l2, "K={k}");
    }
}

/// The mean sits between the polylog envelopes c1 <= mu <= c2 for the
/// balanced families (with the problem's own entry extremes).
#[test]
fn mean_sandwiched_by_envelopes() {
    for k in (5..=30).step_by(5) {
        let fam = reference_hafsq(k).unwrap();
        let p = &fam.problem;
        let mu = p.mu_exact().unwrap();
        let params = params_for(fam.q, fam.gamma, 0.1, 0.1);
        let (c1, c2) = params.c1_c2(Kind::HafSq, k, p.bmin(), p.bmax());
        assert!(c1 <= mu && mu <= c2, "K={k}: {c1} <= {mu} <= {c2}");

        let fam = reference_haf(k).unwrap();
        let p = &fam.problem;
        let mu = p.mu_exact().unwrap();
        let params = params_for(fam.q, fam.gamma, 0.1, 0.1);
        let (c1, c2) = params.c1_c2(Kind::Haf, k, p.bmin(), p.bmax());
        assert!(c1 <= mu && mu <= c2, "K={k}: {c1} <= {mu} <= {c2}");
    }
}

/// Empirical MC variance sits inside [0.5, 2.0] times (Q_MC - mu^2)/n.
#[test]
fn mc_variance_window() {
    let fam = reference_hafsq(3).unwrap();
    let p = &fam.problem;
    let mu = p.mu_exact().unwrap();
    let q = q_mc(p).unwrap();
    let n = 4000usize;
    let predicted = (q - mu * mu) / n as f64;
    let runs = 200usize;
    let mut mean = 0.0;
    let mut estimates = Vec::with_capacity(runs);
    for seed in 0..runs as u64 {
        let e = mc_estimate(p, n, seed).unwrap();
        mean += e;
        estimates.push(e);
    }
    mean /= runs as f64;
    let var: f64 =
        estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (runs as f64 - 1.0);
    assert!(
        var >= 0.5 * predicted && var <= 2.0 * predicted,
        "empirical {var} vs predicted {predicted}"
    );
}

/// Seeded importance runs stay within four standard errors of the exact
/// mean in at least 19 of 20 runs, with the standard error taken from the
/// exact second moment.
#[test]
fn importance_runs_stay_within_four_sigma() {
    let fam = reference_hafsq(10).unwrap();
    let p = &fam.problem;
    let mu = p.mu_exact().unwrap();
    let n = 1_000_000usize;
    let var = q_gbs_i(p).unwrap() - mu * mu;
    let gate = 4.0 * (var / n as f64).sqrt();
    let session = Session::new(p, EstimatorKind::GbsI).unwrap();
    let hits = (1..=20u64)
        .filter(|&seed| (session.estimate(n, seed, 2).unwrap() - mu).abs() <= gate)
        .count();
    assert!(hits >= 19, "only {hits}/20 runs inside the 4-sigma band");
}

/// Convergence races: the importance estimator lands closer than MC at the
/// same budget in nearly every seeded run (exact moments predict a large
/// gap at this truncation).
#[test]
fn importance_beats_mc_at_fixed_budget() {
    let fam = reference_hafsq(15).unwrap();
    let p = &fam.problem;
    let mu = p.mu_exact().unwrap();
    let n = 100_000usize;
    let gbsi = Session::new(p, EstimatorKind::GbsI).unwrap();
    let mc = Session::new(p, EstimatorKind::Mc).unwrap();
    let mut wins = 0;
    let seeds = 20u64;
    for seed in 0..seeds {
        let e1 = (gbsi.estimate(n, seed, 1).unwrap() - mu).abs();
        let e2 = (mc.estimate(n, seed, 1).unwrap() - mu).abs();
        if e1 < e2 {
            wins += 1;
        }
    }
    assert!(wins >= 18, "importance won only {wins}/{seeds}");
}

/// The growth construction keeps U' polynomial and L' super-exponential on
/// the ranges it robustly guarantees (the acceptance suite pins the wider
/// published ranges, which the construction cannot meet at N=2,3 and 7).
#[test]
fn growth_ranges_guaranteed_by_construction() {
    let rows = growth_table(TableKind::GrowthHafSq, &(4..=15).collect::<Vec<_>>()).unwrap();
    for r in &rows {
        assert!(
            r.u_factor <= (r.n as f64).powi(3),
            "hafsq U'({}) = {}",
            r.n,
            r.u_factor
        );
        if r.n >= 8 {
            assert!(
                r.l_factor >= 1.3f64.powi((r.n * r.n) as i32),
                "hafsq L'({}) = {}",
                r.n,
                r.l_factor
            );
        }
    }
    let rows = growth_table(TableKind::GrowthHaf, &(8..=20).collect::<Vec<_>>()).unwrap();
    for r in &rows {
        if r.n <= 15 {
            assert!(
                r.u_factor <= (r.n as f64).powi(3),
                "haf U'({}) = {}",
                r.n,
                r.u_factor
            );
        }
        if r.n >= 16 {
            assert!(
                r.l_factor >= 1.25f64.powi((r.n * r.n) as i32),
                "haf L'({}) = {}",
                r.n,
                r.l_factor
            );
        }
    }
}

/// Exact mean against an independent tensor-product quadrature of the
/// integrand times the Gaussian density over [-10 sigma, 10 sigma]^N.
#[test]
fn wick_reduction_matches_quadrature() {
    use gbsgauss::index::MultiIndex;
    use gbsgauss::matrix::{Matrix, SymMatrix};
    use gbsgauss::problem::{CoefficientFamily, GEProblem};

    // Simpson weights on a uniform grid
    fn simpson(points: usize) -> (Vec<f64>, Vec<f64>) {
        let m = points | 1; // odd count
        let (a, b) = (-10.0f64, 10.0f64);
        let h = (b - a) / (m as f64 - 1.0);
        let mut xs = Vec::with_capacity(m);
        let mut ws = Vec::with_capacity(m);
        for i in 0..m {
            xs.push(a + h * i as f64);
            let w = if i == 0 || i + 1 == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            ws.push(w * h / 3.0);
        }
        (xs, ws)
    }

    let cases: Vec<(Vec<Vec<f64>>, Vec<(Vec<u32>, f64)>)> = vec![
        (vec![vec![0.55]], vec![(vec![2], 1.0), (vec![4], 0.25)]),
        (
            vec![vec![0.5, 0.2], vec![0.2, 0.62]],
            vec![
                (vec![1, 1], 2.0),
                (vec![2, 0], -0.7),
                (vec![2, 2], 0.3),
                (vec![0, 4], 0.11),
            ],
        ),
    ];

    for (rows, coeffs) in cases {
        let n = rows.len();
        let b = SymMatrix::from_rows(&rows).unwrap();
        let mut fam = CoefficientFamily::new(n, 0.5);
        for (idx, a) in &coeffs {
            fam.insert(MultiIndex::new(idx.clone()), *a).unwrap();
        }
        let problem = GEProblem::new(fam, b.clone(), Kind::Haf).unwrap();
        let mu = problem.mu_exact().unwrap();

        // density normalization: (2 pi)^{-N/2} det(B)^{-1/2}
        let bm = Matrix::from_sym(&b);
        let det = bm.det();
        let inv = bm.inverse().unwrap();
        let norm = (2.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0) / det.sqrt();

        let (xs, ws) = simpson(501);
        let mut total = 0.0;
        match n {
            1 => {
                for (x, w) in xs.iter().zip(&ws) {
                    let q = x * x * inv.get(0, 0);
                    total += w * problem.eval_f(&[*x]).unwrap() * (-0.5 * q).exp();
                }
            }
            2 => {
                for (x, wx) in xs.iter().zip(&ws) {
                    for (y, wy) in xs.iter().zip(&ws) {
                        let q = x * x * inv.get(0, 0)
                            + 2.0 * x * y * inv.get(0, 1)
                            + y * y * inv.get(1, 1);
                        total +=
                            wx * wy * problem.eval_f(&[*x, *y]).unwrap() * (-0.5 * q).exp();
                    }
                }
            }
            _ => unreachable!(),
        }
        total *= norm;
        assert!(
            (total - mu).abs() <= 1e-6 * mu.abs(),
            "quadrature {total} vs exact {mu}"
        );
    }
}
