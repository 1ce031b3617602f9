//! Full bound report for a problem: guaranteed sample sizes along both
//! routes, U/L factors, problem-space membership verdicts, and the
//! exponential-speedup certificate, as JSON.
//!
//! Run with: cargo run --release --example bound_report

use gbsgauss::cli::{cmd_bounds, default_bound_params, reference_problem_json};
use gbsgauss::problem::{Kind, ProblemSpec};

fn main() {
    let spec = ProblemSpec::from_json(&reference_problem_json(Kind::HafSq, 20))
        .expect("built-in problem parses");
    let problem = spec.to_problem().expect("admissible");
    let params = default_bound_params(&spec, 0.1, 0.05).expect("example family has defaults");
    let report = cmd_bounds(&problem, &params).expect("report");
    println!("{}", report.to_json().expect("serializes"));
}
