//! Convergence race: the importance estimator against plain Monte Carlo
//! on the reference squared-hafnian problem. The importance estimator
//! closes in on the exact mean while MC wanders.
//!
//! Run with: cargo run --release --example convergence

use gbsgauss::cli::converge_traces;
use gbsgauss::estimators::EstimatorKind;
use gbsgauss::families::reference_hafsq;

fn main() {
    let fam = reference_hafsq(10).expect("reference family");
    let mu = fam.problem.mu_exact().expect("mean");
    println!("exact mean: {mu:.6}");

    let checkpoints: Vec<usize> = vec![100, 1_000, 10_000, 100_000, 1_000_000];
    let traces = converge_traces(
        &fam.problem,
        &[EstimatorKind::GbsI, EstimatorKind::Mc],
        1_000_000,
        &checkpoints,
        &[1, 2, 3],
    )
    .expect("traces");

    println!(
        "{:>8} {:>6} {:>10} {:>12} {:>10}",
        "est", "seed", "n", "estimate", "rel_err"
    );
    for t in &traces {
        for p in &t.points {
            println!(
                "{:>8} {:>6} {:>10} {:>12.6} {:>10.4}",
                t.estimator.label(),
                t.seed,
                p.n,
                p.estimate,
                (p.estimate - mu).abs() / mu
            );
        }
    }
}
