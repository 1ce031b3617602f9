//! Hardware recipe for a covariance: the orthogonal frame and per-mode
//! squeezing parameters whose Gaussian state samples from it, plus the
//! numerical residual of the moment-matrix identity.
//!
//! Run with: cargo run --release --example state_preparation

use gbsgauss::families::reference_covariance;
use gbsgauss::gbs::prepare_state;

fn main() {
    let b = reference_covariance();
    let prep = prepare_state(&b).expect("spectrum admissible");
    println!("squeezing parameters r_n = atanh(lambda_n):");
    for (i, r) in prep.squeezings.iter().enumerate() {
        println!("  mode {i}: r = {r:.6}");
    }
    let residual = prep.inverse_residual(&b).expect("invertible");
    println!("\nmax |Sigma_Q^-1 - [[I, -B], [-B, I]]| = {residual:.3e}");
}
