//! Thin command-line front end; all logic lives in the library.
//! Exit codes: 0 ok, 2 usage, 3 domain or numeric error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gbsgauss::cli::{
    self, default_bound_params, load_problem, parse_list, OutputFormat, TableKind,
};
use gbsgauss::error::Error;
use gbsgauss::estimators::EstimatorKind;

#[derive(Parser)]
#[command(name = "gbsgauss", version, about = "Gaussian expectations via hafnian sums and simulated boson-sampling estimators")]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for sampling (results are identical for any count).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce the built-in tables (1, 2, growth-hafsq, growth-haf).
    Table {
        /// Which table: 1, 2, growth-hafsq, growth-haf.
        which: String,
        /// Truncations for tables 1/2, comma separated (default 5,10,...,50).
        #[arg(long, value_name = "K1,K2,...")]
        k_list: Option<String>,
        /// Sizes for the growth tables (default 2..=15).
        #[arg(long, value_name = "N1,N2,...")]
        n_list: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Convergence traces for one or more estimators.
    Converge {
        #[arg(long)]
        problem: PathBuf,
        /// Estimators: gbs-i, gbs-p, mc (comma separated).
        #[arg(long, default_value = "mc")]
        estimators: String,
        #[arg(long, default_value_t = 100_000)]
        n_max: usize,
        /// Checkpoints, comma separated (default: decades 1,10,100,...).
        #[arg(long)]
        checkpoints: Option<String>,
        #[arg(long, default_value = "1")]
        seeds: String,
        /// Truncate the problem to this degree before running.
        #[arg(long, value_name = "K")]
        k: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bound report: guaranteed sample sizes, U/L factors, membership.
    Bounds {
        #[arg(long)]
        problem: PathBuf,
        /// Bound parameters as JSON (defaults derive from example families).
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the truncated photon-count distribution as CSV.
    Dist {
        #[arg(long)]
        problem: PathBuf,
        /// Tabulate outcomes with |I| <= 2K (default: the problem's K).
        #[arg(long, value_name = "K")]
        k: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Squeezing parameters and state moments encoding the covariance.
    StatePrep {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-shot estimates across seeds.
    Estimate {
        #[arg(long)]
        problem: PathBuf,
        /// gbs-i, gbs-p, or mc.
        #[arg(long)]
        estimator: String,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value = "1")]
        seeds: String,
        /// Truncate the problem to this degree before running.
        #[arg(long, value_name = "K")]
        k: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also dump the sampling distribution to this CSV path.
        #[arg(long)]
        dump_dist: Option<PathBuf>,
    },
    /// Print a built-in problem file (hafsq or haf) to stdout.
    Problem {
        /// hafsq or haf.
        kind: String,
        #[arg(long, default_value_t = 10)]
        k: u32,
    },
}

fn run(args: Args) -> Result<(), Error> {
    match args.command {
        Command::Table {
            which,
            k_list,
            n_list,
            out,
            format,
        } => {
            let which = TableKind::parse(&which)?;
            let format = OutputFormat::parse(&format)?;
            let content = match which {
                TableKind::RefHafSq | TableKind::RefHaf => {
                    let ks: Vec<u32> = match k_list {
                        Some(s) => parse_list(&s)?,
                        None => (1..=10).map(|i| 5 * i).collect(),
                    };
                    let rows = cli::reference_table(which, &ks)?;
                    cli::render_ref_table(&rows, format)?
                }
                TableKind::GrowthHafSq | TableKind::GrowthHaf => {
                    let ns: Vec<usize> = match n_list {
                        Some(s) => parse_list(&s)?,
                        None => (2..=15).collect(),
                    };
                    let rows = cli::growth_table(which, &ns)?;
                    cli::render_growth_table(&rows, format)?
                }
            };
            cli::emit(out.as_deref(), &content)
        }
        Command::Converge {
            problem,
            estimators,
            n_max,
            checkpoints,
            seeds,
            k,
            out,
        } => {
            let (_, mut prob) = load_problem(&problem)?;
            if let Some(k) = k {
                prob = prob.truncated(k);
            }
            let ests: Vec<EstimatorKind> = estimators
                .split(',')
                .map(EstimatorKind::parse)
                .collect::<Result<_, _>>()?;
            let marks: Vec<usize> = match checkpoints {
                Some(s) => parse_list(&s)?,
                None => decades_up_to(n_max),
            };
            let seeds: Vec<u64> = parse_list(&seeds)?;
            cli::cmd_converge(&prob, &ests, n_max, &marks, &seeds, out.as_deref())?;
            Ok(())
        }
        Command::Bounds {
            problem,
            params,
            eps,
            delta,
            out,
        } => {
            let (spec, prob) = load_problem(&problem)?;
            let params = match params {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    serde_json::from_str(&text)?
                }
                None => default_bound_params(&spec, eps, delta).ok_or(Error::MissingMuBound)?,
            };
            let report = cli::cmd_bounds(&prob, &params)?;
            cli::emit(out.as_deref(), &(report.to_json()? + "\n"))
        }
        Command::Dist { problem, k, out } => {
            let (_, prob) = load_problem(&problem)?;
            let k = k.unwrap_or_else(|| prob.k_max());
            cli::cmd_dist(&prob, k, out.as_deref())
        }
        Command::StatePrep { problem, out } => {
            let (_, prob) = load_problem(&problem)?;
            cli::cmd_state_prep(&prob, out.as_deref())?;
            Ok(())
        }
        Command::Estimate {
            problem,
            estimator,
            n,
            seeds,
            k,
            out,
            dump_dist,
        } => {
            let (_, mut prob) = load_problem(&problem)?;
            if let Some(k) = k {
                prob = prob.truncated(k);
            }
            let est = EstimatorKind::parse(&estimator)?;
            let seeds: Vec<u64> = parse_list(&seeds)?;
            cli::cmd_estimate(
                &prob,
                est,
                n,
                &seeds,
                args.threads.max(1),
                out.as_deref(),
                dump_dist.as_deref(),
            )?;
            Ok(())
        }
        Command::Problem { kind, k } => {
            let kind = match kind.as_str() {
                "hafsq" => gbsgauss::problem::Kind::HafSq,
                "haf" => gbsgauss::problem::Kind::Haf,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown problem kind {other}"
                    )))
                }
            };
            print!("{}", cli::reference_problem_json(kind, k));
            Ok(())
        }
    }
}

fn decades_up_to(n_max: usize) -> Vec<usize> {
    let mut v = Vec::new();
    let mut base = 1usize;
    while base <= n_max {
        for m in [1, 2, 5] {
            let x = base.saturating_mul(m);
            if x <= n_max {
                v.push(x);
            }
        }
        base = base.saturating_mul(10);
    }
    v
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::InvalidConfig(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
