//! Scaling of the guaranteed-sample-size factors with the mode count N on
//! the seeded spectral covariance family: the GBS factor U' stays
//! polynomial while the MC floor L' grows like an exponential in N^2.
//!
//! Run with: cargo run --release --example growth_scaling

use gbsgauss::cli::{growth_table, TableKind};

fn main() {
    let ns: Vec<usize> = (2..=15).collect();
    let rows = growth_table(TableKind::GrowthHafSq, &ns).expect("construction is admissible");
    println!(
        "{:>3} {:>10} {:>10} {:>12} {:>12} {:>8} {:>10}",
        "N", "u1", "u2", "U'", "L'", "U'<=N^3", "L'/1.3^N2"
    );
    for r in &rows {
        let target = 1.3f64.powi((r.n * r.n) as i32);
        println!(
            "{:>3} {:>10.6} {:>10.6} {:>12.4e} {:>12.4e} {:>8} {:>10.3e}",
            r.n,
            r.mu_lower,
            r.mu_upper,
            r.u_factor,
            r.l_factor,
            r.u_within_cubic,
            r.l_factor / target
        );
    }
}
