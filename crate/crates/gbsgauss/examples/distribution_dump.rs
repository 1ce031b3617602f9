//! Tabulates the photon-count distribution of a sampler programmed with
//! the reference covariance, prints the heaviest outcomes and the lumped
//! tail mass, and shows how the tabulated mass grows with the truncation.
//!
//! Run with: cargo run --release --example distribution_dump

use gbsgauss::families::reference_covariance;
use gbsgauss::gbs::GbsDistribution;

fn main() {
    let b = reference_covariance();
    for k in [2u32, 5, 10] {
        let dist = GbsDistribution::build(&b, k).expect("admissible");
        println!(
            "K = {k:>2}: {} outcomes, tabulated mass {:.9}, residual {:.3e}",
            dist.len(),
            dist.tabulated_mass(),
            dist.residual()
        );
    }

    let dist = GbsDistribution::build(&b, 5).expect("admissible");
    let mut heaviest: Vec<(usize, f64)> = (0..dist.len()).map(|i| (i, dist.prob(i))).collect();
    heaviest.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    println!("\nheaviest outcomes at K = 5:");
    for (i, p) in heaviest.into_iter().take(8) {
        println!("  {:>10}  {p:.6e}", dist.pattern(i).label());
    }
    println!("  {:>10}  {:.6e}", "RESIDUAL", dist.residual());
}
