//! Sizes a run from the exact second moment, then estimates the mean with
//! the importance estimator at the guaranteed sample size.
//!
//! Run with: cargo run --release --example estimate_once

use gbsgauss::cli::exact_guaranteed_n;
use gbsgauss::estimators::{EstimatorKind, Session};
use gbsgauss::families::reference_hafsq;

fn main() {
    let fam = reference_hafsq(5).expect("reference family");
    let mu = fam.problem.mu_exact().expect("mean");
    let (eps, delta) = (0.3, 0.2);
    let n_star = exact_guaranteed_n(&fam.problem, EstimatorKind::GbsI, eps, delta)
        .expect("second moment") as usize
        + 1;
    println!("exact mean {mu:.6}; guaranteed n at (eps={eps}, delta={delta}): {n_star}");

    let session = Session::new(&fam.problem, EstimatorKind::GbsI).expect("session");
    for seed in 1..=5u64 {
        let est = session.estimate(n_star, seed, 1).expect("estimate");
        let rel = (est - mu).abs() / mu;
        let ok = if rel <= eps { "within" } else { "OUTSIDE" };
        println!("seed {seed}: estimate {est:.6} (rel err {rel:.4}, {ok} the eps band)");
    }
}
