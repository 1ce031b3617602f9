//! Command layer shared by the binary and the runnable examples: table
//! reproduction, convergence experiments, bound reports, distribution
//! dumps, state preparation, and one-shot estimates, all with
//! deterministic seeding and CSV/JSON output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bounds::{
    self, check_problem_space, BoundParams, BoundReport, ProblemSpaceKind,
};
use crate::error::{Error, Result};
use crate::estimators::{
    guaranteed_n, q_mc_work_estimate, write_trace_csv, EstimateTrace, EstimatorKind, Session,
};
use crate::families::{
    self, growth_haf_params, growth_hafsq_params, make_b_spectral, reference_haf,
    reference_hafsq, GROWTH_NOISE, GROWTH_SEED,
};
use crate::gbs::{compute_d, prepare_state, GbsDistribution};
use crate::problem::{CoefficientSpec, GEProblem, Kind, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown format {other}"))),
        }
    }
}

/// Writes to the path, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(p) => {
            std::fs::write(p, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn load_problem(path: &Path) -> Result<(ProblemSpec, GEProblem)> {
    let text = std::fs::read_to_string(path)?;
    let spec = ProblemSpec::from_json(&text)?;
    let problem = spec.to_problem()?;
    Ok((spec, problem))
}

/// Default bound parameters for a problem: available when the coefficient
/// family is the built-in balanced-index one (its envelopes are tight with
/// c = 1); explicit coefficient lists need a parameter file.
pub fn default_bound_params(spec: &ProblemSpec, eps: f64, delta: f64) -> Option<BoundParams> {
    match &spec.coefficients {
        CoefficientSpec::Example { q, gamma } => Some(BoundParams {
            q_alpha: *q,
            q_beta: *q,
            gamma_alpha: *gamma,
            gamma_beta: *gamma,
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
        }),
        CoefficientSpec::Explicit(_) => None,
    }
}

// ---------------------------------------------------------------------------
// table

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    RefHafSq,
    RefHaf,
    GrowthHafSq,
    GrowthHaf,
}

impl TableKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1" | "hafsq" => Ok(TableKind::RefHafSq),
            "2" | "haf" => Ok(TableKind::RefHaf),
            "growth-hafsq" | "growthhafsq" => Ok(TableKind::GrowthHafSq),
            "growth-haf" | "growthhaf" => Ok(TableKind::GrowthHaf),
            other => Err(Error::InvalidConfig(format!(
                "unknown table {other}; expected 1, 2, growth-hafsq, or growth-haf"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RefTableRow {
    pub k: u32,
    pub mu: f64,
    pub u_factor: f64,
    pub l_factor: f64,
}

/// mu, U, L per truncation K for one of the two reference families.
pub fn reference_table(kind: TableKind, k_list: &[u32]) -> Result<Vec<RefTableRow>> {
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let (fam, problem_kind) = match kind {
            TableKind::RefHafSq => (reference_hafsq(k)?, Kind::HafSq),
            TableKind::RefHaf => (reference_haf(k)?, Kind::Haf),
            _ => return Err(Error::InvalidConfig("not a reference table".into())),
        };
        let cal = fam.calibration;
        let params = BoundParams {
            q_alpha: fam.q,
            q_beta: fam.q,
            gamma_alpha: fam.gamma,
            gamma_beta: fam.gamma,
            c_alpha: Some(1.0),
            c_beta: Some(1.0),
            mu0: None,
            eps: 0.1,
            delta: 0.1,
            s1: 1e-9,
            s2: 1e-9,
            zeta: None,
            p: None,
            infinite_k: false,
        };
        let d = 1.0 / cal.inv_d;
        let u_factor = match problem_kind {
            Kind::HafSq => {
                bounds::u_factor_gbs_i(&params, 3, k, cal.bmin, cal.bmax, d, 0.0)?
            }
            Kind::Haf => bounds::u_factor_gbs_p(&params, 3, k, cal.bmin, cal.bmax, d)?,
        };
        let l_factor = bounds::l_factor_mc(&params, k, cal.bmin, cal.bmax, problem_kind);
        rows.push(RefTableRow {
            k,
            mu: fam.problem.mu_exact()?,
            u_factor,
            l_factor,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthTableRow {
    pub n: usize,
    pub mu_lower: f64,
    pub mu_upper: f64,
    pub u_factor: f64,
    pub l_factor: f64,
    pub u_within_cubic: bool,
}

/// u1, u2, U', L' per size N for a growth family, built on the seeded
/// spectral covariance.
pub fn growth_table(kind: TableKind, n_list: &[usize]) -> Result<Vec<GrowthTableRow>> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let (problem_kind, q, ga, gb, b1, b2) = match kind {
            TableKind::GrowthHafSq => {
                let (q, ga, gb, b1, b2) = growth_hafsq_params(n);
                (Kind::HafSq, q, ga, gb, b1, b2)
            }
            TableKind::GrowthHaf => {
                let (q, ga, gb, b1, b2) = growth_haf_params(n);
                (Kind::Haf, q, ga, gb, b1, b2)
            }
            _ => return Err(Error::InvalidConfig("not a growth table".into())),
        };
        let k = (n * n) as u32;
        let b = make_b_spectral(n, b1, b2, 3.0, GROWTH_SEED, GROWTH_NOISE)?;
        let d = compute_d(&b)?;
        let params = BoundParams {
            q_alpha: q,
            q_beta: q,
            gamma_alpha: ga,
            gamma_beta: gb,
            c_alpha: Some(1.0),
            c_beta: Some(1.0),
            mu0: None,
            eps: 0.1,
            delta: 0.1,
            s1: 1e-9,
            s2: 1e-9,
            zeta: Some(1.0),
            p: Some(3.0),
            infinite_k: false,
        };
        let (bmin, bmax) = (b.min_entry(), b.max_abs());
        let (u_factor, l_factor) =
            bounds::growth_factors(&params, n, k, bmin, bmax, d, problem_kind)?;
        let (c1, c2) = params.c1_c2(problem_kind, k, bmin, bmax);
        rows.push(GrowthTableRow {
            n,
            mu_lower: c1,
            mu_upper: c2,
            u_factor,
            l_factor,
            u_within_cubic: u_factor <= (n as f64).powi(3),
        });
    }
    Ok(rows)
}

pub fn render_ref_table(rows: &[RefTableRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut s = String::from("K,mu,U,L\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{:.16e},{:.16e},{:.16e}",
                    r.k, r.mu, r.u_factor, r.l_factor
                );
            }
            Ok(s)
        }
        OutputFormat::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
    }
}

pub fn render_growth_table(rows: &[GrowthTableRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut s = String::from("N,u1,u2,U,L,u_within_cubic\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                    r.n, r.mu_lower, r.mu_upper, r.u_factor, r.l_factor, r.u_within_cubic
                );
            }
            Ok(s)
        }
        OutputFormat::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
    }
}

// ---------------------------------------------------------------------------
// converge

/// One trace per (estimator, seed), written as
/// `<stem>_<estimator>_seed<seed>.csv` next to the given output path.
/// Returns the written paths (or the rendered CSVs when out is None).
pub fn cmd_converge(
    problem: &GEProblem,
    estimators: &[EstimatorKind],
    n_max: usize,
    checkpoints: &[usize],
    seeds: &[u64],
    out: Option<&Path>,
) -> Result<Vec<PathBuf>> {
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("at least one seed is required".into()));
    }
    let mu = problem.mu_exact()?;
    let mut written = Vec::new();
    for &est in estimators {
        let session = Session::new(problem, est)?;
        for &seed in seeds {
            let trace = session.convergence_run(n_max, checkpoints, seed)?;
            let mut buf = Vec::new();
            write_trace_csv(&mut buf, std::slice::from_ref(&trace), mu)?;
            let content = String::from_utf8(buf).expect("csv is utf8");
            match out {
                Some(path) => {
                    let p = suffixed_path(path, &format!("{}_seed{}", est.label(), seed));
                    std::fs::write(&p, content)?;
                    written.push(p);
                }
                None => print!("{content}"),
            }
        }
    }
    Ok(written)
}

fn suffixed_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

/// Traces collected in memory (used by the examples and tests).
pub fn converge_traces(
    problem: &GEProblem,
    estimators: &[EstimatorKind],
    n_max: usize,
    checkpoints: &[usize],
    seeds: &[u64],
) -> Result<Vec<EstimateTrace>> {
    let mut traces = Vec::new();
    for &est in estimators {
        let session = Session::new(problem, est)?;
        for &seed in seeds {
            traces.push(session.convergence_run(n_max, checkpoints, seed)?);
        }
    }
    Ok(traces)
}

// ---------------------------------------------------------------------------
// bounds

/// The full bound report for a problem: theorem-level guaranteed n for the
/// applicable estimators, U/L factors, membership verdicts, and the
/// speedup certificate.
pub fn cmd_bounds(
    problem: &GEProblem,
    params: &BoundParams,
) -> Result<BoundReport> {
    params.validate()?;
    let k = problem.k_max();
    let n = problem.n();
    let (bmin, bmax) = (problem.bmin(), problem.bmax());
    let d = compute_d(problem.b())?;
    let a0 = problem.coeffs().a0();

    let mut report = check_problem_space(
        match problem.kind() {
            Kind::HafSq => ProblemSpaceKind::HafSqFixed,
            Kind::Haf => ProblemSpaceKind::HafFixed,
        },
        params,
        n,
        k,
        bmin,
        bmax,
        d,
    );

    let (c1, c2) = params.c1_c2(problem.kind(), k, bmin, bmax);
    report.values.insert("c1".into(), c1);
    report.values.insert("c2".into(), c2);
    report.values.insert("d".into(), d);
    report.values.insert("bmin".into(), bmin);
    report.values.insert("bmax".into(), bmax);

    let mu_lb = bounds::mu_lower_bound(params, a0, bmin, k, problem.kind());
    if let Ok(lb) = &mu_lb {
        report.values.insert("mu_lower_bound".into(), *lb);
    }

    // Two guarantee routes are reported. The envelope route evaluates the
    // plain three-polylog theorems and is valid when the user's (c, q,
    // gamma) actually bound the coefficient sums. The factor route goes
    // through U and L, whose m_k-weighted envelope holds for the built-in
    // balanced families.
    let e2d = params.eps * params.eps * params.delta;
    let u_factor = match problem.kind() {
        Kind::HafSq => {
            let nb = bounds::bound_n_gbs_i(params, bmin, bmax, d, a0, k)?;
            report.values.insert("n_gbs_i_envelope".into(), nb);
            bounds::u_factor_gbs_i(params, n, k, bmin, bmax, d, 0.0)?
        }
        Kind::Haf => {
            let nb = bounds::bound_n_gbs_p(params, bmin, d, a0, k)?;
            report.values.insert("n_gbs_p_envelope".into(), nb);
            bounds::u_factor_gbs_p(params, n, k, bmin, bmax, d)?
        }
    };
    let l_factor = bounds::l_factor_mc(params, k, bmin, bmax, problem.kind());
    report.values.insert("u_factor".into(), u_factor);
    report.values.insert("l_factor".into(), l_factor);
    let n_gbs_factor = ((u_factor - 1.0) / e2d).max(0.0);
    let name = match problem.kind() {
        Kind::HafSq => "n_gbs_i",
        Kind::Haf => "n_gbs_p",
    };
    report.values.insert(name.into(), n_gbs_factor);
    report
        .values
        .insert(format!("{name}_ceil"), n_gbs_factor.ceil());
    report
        .values
        .insert("n_mc_floor".into(), ((l_factor - 1.0) / e2d).max(0.0));

    let n_mc = bounds::bound_n_mc(params, bmin, bmax, a0, k, problem.kind())?;
    report.values.insert("n_mc_envelope".into(), n_mc);
    report.values.insert("n_mc_envelope_ceil".into(), n_mc.ceil());

    report.conditions.insert(
        "speedup_certificate".into(),
        bounds::check_speedup_certificate(
            params.s1,
            params.s2,
            u_factor,
            l_factor,
            params.eps,
            params.delta,
        ),
    );
    Ok(report)
}

// ---------------------------------------------------------------------------
// dist / state-prep / estimate

pub fn cmd_dist(problem: &GEProblem, k_max: u32, out: Option<&Path>) -> Result<()> {
    let dist = GbsDistribution::build(problem.b(), k_max)?;
    let mut buf = Vec::new();
    dist.write_csv(&mut buf)?;
    emit(out, &String::from_utf8(buf).expect("csv is utf8"))
}

#[derive(Debug, Clone, Serialize)]
pub struct StatePrepOutput {
    pub frame: Vec<Vec<f64>>,
    pub squeezings: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub inverse_residual: f64,
}

pub fn cmd_state_prep(problem: &GEProblem, out: Option<&Path>) -> Result<StatePrepOutput> {
    let prep = prepare_state(problem.b())?;
    let n = problem.n();
    let output = StatePrepOutput {
        frame: (0..n)
            .map(|i| (0..n).map(|j| prep.u.get(i, j)).collect())
            .collect(),
        squeezings: prep.squeezings.clone(),
        sigma: (0..2 * n)
            .map(|i| (0..2 * n).map(|j| prep.sigma.get(i, j)).collect())
            .collect(),
        inverse_residual: prep.inverse_residual(problem.b())?,
    };
    emit(out, &(serde_json::to_string_pretty(&output)? + "\n"))?;
    Ok(output)
}

/// One row per seed: estimator, seed, n, estimate, mu_exact, rel_error.
pub fn cmd_estimate(
    problem: &GEProblem,
    estimator: EstimatorKind,
    n: usize,
    seeds: &[u64],
    threads: usize,
    out: Option<&Path>,
    dump_dist: Option<&Path>,
) -> Result<String> {
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("at least one seed is required".into()));
    }
    let session = Session::new(problem, estimator)?;
    if let (Some(path), Some(dist)) = (dump_dist, session.dist()) {
        let mut buf = Vec::new();
        dist.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
    }
    let mu = problem.mu_exact()?;
    let mut csv = String::from("estimator,seed,n,estimate,mu_exact,rel_error\n");
    for &seed in seeds {
        let est = session.estimate(n, seed, threads)?;
        let rel = if mu != 0.0 {
            (est - mu).abs() / mu.abs()
        } else {
            f64::NAN
        };
        let _ = writeln!(
            csv,
            "{},{},{},{:.16e},{:.16e},{:.16e}",
            estimator.label(),
            seed,
            n,
            est,
            mu,
            rel
        );
    }
    emit(out, &csv)?;
    Ok(csv)
}

/// The guaranteed sample size from the exact second moment of the chosen
/// estimator (used by `estimate --guaranteed` and the examples).
pub fn exact_guaranteed_n(
    problem: &GEProblem,
    estimator: EstimatorKind,
    eps: f64,
    delta: f64,
) -> Result<f64> {
    let mu = problem.mu_exact()?;
    let q = match estimator {
        EstimatorKind::GbsI => crate::estimators::q_gbs_i(problem)?,
        EstimatorKind::GbsP => crate::estimators::q_gbs_p(problem)?,
        EstimatorKind::Mc => {
            let work = q_mc_work_estimate(problem);
            if work > 1_000_000 {
                eprintln!(
                    "note: the exact MC second moment sums {work} support pairs; this may take a while"
                );
            }
            crate::estimators::q_mc(problem)?
        }
    };
    guaranteed_n(q, mu, eps, delta)
}

/// Parses "a,b,c" into numbers.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidConfig(format!("cannot parse list item {p}")))
        })
        .collect()
}

/// The built-in reference problems as JSON problem files.
pub fn reference_problem_json(kind: Kind, k: u32) -> String {
    let (gamma, kind_str) = match kind {
        Kind::HafSq => (8.1825, "hafsq"),
        Kind::Haf => (1.4368, "haf"),
    };
    let rows = families::reference_covariance().rows();
    let b_json = serde_json::to_string(&rows).unwrap();
    format!(
        "{{\n  \"N\": 3, \"K\": {k}, \"kind\": \"{kind_str}\",\n  \"B\": {{\"explicit\": {b_json}}},\n  \"coefficients\": {{\"example\": {{\"q\": 0.5, \"gamma\": {gamma}}}}}\n}}\n"
    )
}
