//! The three estimators (GBS importance, GBS probability, plain Monte
//! Carlo), their exact second moments, guaranteed sample sizes, and
//! checkpointed convergence runs.
//!
//! Determinism contract: samples are processed in fixed-size chunks; chunk
//! c draws from a generator seeded with `seed + c`, and per-chunk partial
//! results are combined in chunk order. Results are therefore
//! bit-reproducible for a given (seed, chunk size) regardless of the
//! worker count.

use std::collections::BTreeMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gbs::{GbsDistribution, Outcome};
use crate::hafnian::hafnian_repeated_log;
use crate::index::MultiIndex;
use crate::logdomain::{LogSumAcc, SignedLog};
use crate::problem::{GEProblem, Kind};

/// Fixed chunk size of the deterministic sample streams.
pub const CHUNK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    GbsI,
    GbsP,
    Mc,
}

impl EstimatorKind {
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorKind::GbsI => "gbs-i",
            EstimatorKind::GbsP => "gbs-p",
            EstimatorKind::Mc => "mc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gbs-i" | "gbsi" => Ok(EstimatorKind::GbsI),
            "gbs-p" | "gbsp" => Ok(EstimatorKind::GbsP),
            "mc" => Ok(EstimatorKind::Mc),
            other => Err(Error::InvalidConfig(format!("unknown estimator {other}"))),
        }
    }

    pub fn compatible_with(&self, kind: Kind) -> bool {
        match self {
            EstimatorKind::GbsI => kind == Kind::HafSq,
            EstimatorKind::GbsP => kind == Kind::Haf,
            EstimatorKind::Mc => true,
        }
    }
}

/// Occurrence counts of photon patterns across a run.
#[derive(Debug, Clone)]
pub struct SampleCounts {
    counts: BTreeMap<MultiIndex, u64>,
    total: u64,
    residual: u64,
}

impl SampleCounts {
    pub fn new() -> Self {
        SampleCounts {
            counts: BTreeMap::new(),
            total: 0,
            residual: 0,
        }
    }

    pub fn record(&mut self, pattern: &MultiIndex) {
        *self.counts.entry(pattern.clone()).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn record_residual(&mut self) {
        self.residual += 1;
        self.total += 1;
    }

    pub fn count(&self, pattern: &MultiIndex) -> u64 {
        self.counts.get(pattern).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn residual(&self) -> u64 {
        self.residual
    }

    pub fn merge(&mut self, other: &SampleCounts) {
        for (k, v) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += v;
        }
        self.total += other.total;
        self.residual += other.residual;
    }

    /// Counts plus residual always account for every draw.
    pub fn consistent(&self) -> bool {
        self.counts.values().sum::<u64>() + self.residual == self.total
    }
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self::new()
    }
}

/// The importance estimate from raw outcomes: (1/n) sum I_i! a_{I_i} / d,
/// residual draws contributing zero.
pub fn gbs_i_estimate(
    outcomes: &[Outcome],
    dist: &GbsDistribution,
    problem: &GEProblem,
) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let payload = importance_payloads(dist, problem);
    let sum: f64 = outcomes
        .iter()
        .map(|o| match o {
            Outcome::Pattern(i) => payload[*i],
            Outcome::Residual => 0.0,
        })
        .sum();
    Ok(sum / outcomes.len() as f64)
}

/// The probability estimate from occurrence counts:
/// sum_J a_J sqrt(J!/d) sqrt(count_J / n).
pub fn gbs_p_estimate(counts: &SampleCounts, problem: &GEProblem, d: f64) -> Result<f64> {
    if counts.total() == 0 {
        return Err(Error::EmptySampleSet);
    }
    check_gbs_p_preconditions(problem)?;
    let n = counts.total() as f64;
    let mut acc = problem.coeffs().a0() * (1.0 / d).sqrt()
        * (counts.count(&MultiIndex::zeros(problem.n())) as f64 / n).sqrt();
    for (index, a) in problem.coeffs().support() {
        let c = counts.count(index);
        if c == 0 {
            continue;
        }
        let ln_alpha = 0.5 * (index.ln_factorial() - d.ln());
        acc += a * ln_alpha.exp() * ((c as f64 / n).sqrt());
    }
    Ok(acc)
}

fn check_gbs_p_preconditions(problem: &GEProblem) -> Result<()> {
    if !problem.coeffs().all_nonnegative() {
        return Err(Error::NegativeCoefficients);
    }
    if problem.bmin() <= 0.0 {
        return Err(Error::NonPositiveB);
    }
    Ok(())
}

/// Plain Monte Carlo: the mean of f over n Gaussian draws (single thread).
pub fn mc_estimate(problem: &GEProblem, n: usize, seed: u64) -> Result<f64> {
    Session::new(problem, EstimatorKind::Mc)?.estimate(n, seed, 1)
}

// ---------------------------------------------------------------------------
// Exact second moments

/// Q for the importance estimator: (1/d) sum a_I^2 I! Haf(B_I)^2.
pub fn q_gbs_i(problem: &GEProblem) -> Result<f64> {
    let d = crate::gbs::compute_d(problem.b())?;
    let mut acc = LogSumAcc::new();
    acc.add_f64(problem.coeffs().a0().powi(2));
    for (index, a) in problem.coeffs().support() {
        let h = hafnian_repeated_log(problem.b(), index)?;
        if h.is_zero() {
            continue;
        }
        acc.add(SignedLog::new(1.0, 2.0 * h.ln_abs + index.ln_factorial()).scale_f64(a * a));
    }
    let v = acc.total().to_f64() / d;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow)
    }
}

/// Q for the probability estimator: (mu/d) sum_J a_J J! / Haf(B_J).
/// Every supported pattern must have a strictly positive hafnian.
pub fn q_gbs_p(problem: &GEProblem) -> Result<f64> {
    let d = crate::gbs::compute_d(problem.b())?;
    let mu = problem.mu_exact()?;
    let mut acc = LogSumAcc::new();
    acc.add_f64(problem.coeffs().a0());
    for (index, a) in problem.coeffs().support() {
        if a == 0.0 {
            continue;
        }
        let h = hafnian_repeated_log(problem.b(), index)?;
        if h.is_zero() {
            return Err(Error::ZeroHafnianDivision(index.label()));
        }
        acc.add(SignedLog::new(h.sign, index.ln_factorial() - h.ln_abs).scale_f64(a));
    }
    let v = mu / d * acc.total().to_f64();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow)
    }
}

/// Q for plain MC: sum over support pairs of a_I a_J Haf(B_{I+J})^(2 or 1).
///
/// Quadratic in the support size with hafnians of degree |I| + |J|; check
/// `q_mc_work_estimate` before calling on large problems.
pub fn q_mc(problem: &GEProblem) -> Result<f64> {
    let zero = MultiIndex::zeros(problem.n());
    let mut terms: Vec<(&MultiIndex, f64)> = vec![(&zero, problem.coeffs().a0())];
    terms.extend(problem.coeffs().support());
    let mut acc = LogSumAcc::new();
    for (i, &(idx_i, a_i)) in terms.iter().enumerate() {
        // diagonal term once, off-diagonal pairs doubled
        for &(idx_j, a_j) in terms.iter().skip(i) {
            let weight = if std::ptr::eq(idx_i, idx_j) { 1.0 } else { 2.0 };
            let sum_idx = idx_i.add(idx_j);
            let h = hafnian_repeated_log(problem.b(), &sum_idx)?;
            if h.is_zero() {
                continue;
            }
            let hpow = match problem.kind() {
                Kind::Haf => h,
                Kind::HafSq => h.square(),
            };
            acc.add(hpow.scale_f64(weight * a_i * a_j));
        }
    }
    let v = acc.total().to_f64();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow)
    }
}

/// Support-pair count driving the q_mc cost.
pub fn q_mc_work_estimate(problem: &GEProblem) -> u64 {
    let s = problem.coeffs().support_len() as u64 + 1;
    s * s
}

/// The Chebyshev/Markov guaranteed sample size (Q - mu^2)/(delta eps^2 mu^2),
/// returned unrounded.
pub fn guaranteed_n(q: f64, mu: f64, eps: f64, delta: f64) -> Result<f64> {
    if mu == 0.0 {
        return Err(Error::ZeroMean);
    }
    if !(0.0 < eps && eps < 1.0 && 0.0 < delta && delta < 1.0) {
        return Err(Error::ParameterOutOfRange(
            "eps and delta must lie in (0, 1)".into(),
        ));
    }
    Ok(((q - mu * mu) / (delta * eps * eps * mu * mu)).max(0.0))
}

// ---------------------------------------------------------------------------
// Runs

/// A prepared estimator run: distribution tables, payloads, and Cholesky
/// factor are built once and shared across seeds.
pub struct Session<'a> {
    problem: &'a GEProblem,
    kind: EstimatorKind,
    dist: Option<GbsDistribution>,
    payloads: Vec<f64>,
    chol: Vec<f64>,
}

fn importance_payloads(dist: &GbsDistribution, problem: &GEProblem) -> Vec<f64> {
    let ln_d = dist.d().ln();
    dist.iter()
        .map(|(idx, _)| {
            let a = problem.coeffs().coefficient(idx);
            if a == 0.0 {
                0.0
            } else {
                a * (idx.ln_factorial() - ln_d).exp()
            }
        })
        .collect()
}

impl<'a> Session<'a> {
    pub fn new(problem: &'a GEProblem, kind: EstimatorKind) -> Result<Self> {
        if !kind.compatible_with(problem.kind()) {
            return Err(Error::DomainViolation(format!(
                "estimator {} is incompatible with a {:?} problem",
                kind.label(),
                problem.kind()
            )));
        }
        let (dist, payloads) = match kind {
            EstimatorKind::Mc => (None, Vec::new()),
            EstimatorKind::GbsI => {
                let dist = GbsDistribution::build(problem.b(), problem.k_max())?;
                let payloads = importance_payloads(&dist, problem);
                (Some(dist), payloads)
            }
            EstimatorKind::GbsP => {
                check_gbs_p_preconditions(problem)?;
                let dist = GbsDistribution::build(problem.b(), problem.k_max())?;
                (Some(dist), Vec::new())
            }
        };
        let chol = if kind == EstimatorKind::Mc {
            problem.b().cholesky()?
        } else {
            Vec::new()
        };
        Ok(Session {
            problem,
            kind,
            dist,
            payloads,
            chol,
        })
    }

    pub fn dist(&self) -> Option<&GbsDistribution> {
        self.dist.as_ref()
    }

    fn mc_draw(&self, rng: &mut ChaCha8Rng, point: &mut [f64]) {
        let n = self.problem.n();
        let copies = point.len() / n;
        for c in 0..copies {
            let x = &mut point[c * n..(c + 1) * n];
            let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
            for i in 0..n {
                let mut s = 0.0;
                for (j, gj) in g.iter().enumerate().take(i + 1) {
                    s += self.chol[i * n + j] * gj;
                }
                x[i] = s;
            }
        }
    }

    fn chunk_sum(&self, chunk_idx: u64, len: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(chunk_idx));
        match self.kind {
            EstimatorKind::Mc => {
                let dims = match self.problem.kind() {
                    Kind::Haf => self.problem.n(),
                    Kind::HafSq => 2 * self.problem.n(),
                };
                let mut point = vec![0.0; dims];
                let mut acc = 0.0;
                for _ in 0..len {
                    self.mc_draw(&mut rng, &mut point);
                    acc += self.problem.eval_f(&point).expect("dims fixed above");
                }
                acc
            }
            EstimatorKind::GbsI => {
                let dist = self.dist.as_ref().unwrap();
                let mut acc = 0.0;
                for _ in 0..len {
                    if let Outcome::Pattern(i) = dist.draw_one(&mut rng) {
                        acc += self.payloads[i];
                    }
                }
                acc
            }
            EstimatorKind::GbsP => unreachable!("GBS-P accumulates counts, not sums"),
        }
    }

    fn chunk_counts(&self, chunk_idx: u64, len: usize, seed: u64) -> SampleCounts {
        let dist = self.dist.as_ref().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(chunk_idx));
        let mut counts = SampleCounts::new();
        for _ in 0..len {
            match dist.draw_one(&mut rng) {
                Outcome::Pattern(i) => counts.record(dist.pattern(i)),
                Outcome::Residual => counts.record_residual(),
            }
        }
        counts
    }

    /// The one-shot estimate at n samples. Parallel execution over chunks
    /// reproduces the single-thread result bit for bit.
    pub fn estimate(&self, n: usize, seed: u64, threads: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::EmptySampleSet);
        }
        match self.kind {
            EstimatorKind::GbsP => {
                let counts = self.sample_counts(n, seed, threads);
                gbs_p_estimate(&counts, self.problem, self.dist.as_ref().unwrap().d())
            }
            _ => {
                let sums = self.run_chunks(n, seed, threads, |c, len| self.chunk_sum(c, len, seed));
                Ok(sums.iter().sum::<f64>() / n as f64)
            }
        }
    }

    /// Draws n samples and tallies pattern occurrences.
    pub fn sample_counts(&self, n: usize, seed: u64, threads: usize) -> SampleCounts {
        let maps = self.run_chunks(n, seed, threads, |c, len| self.chunk_counts(c, len, seed));
        let mut merged = SampleCounts::new();
        for m in &maps {
            merged.merge(m);
        }
        merged
    }

    fn run_chunks<T: Send, F>(&self, n: usize, _seed: u64, threads: usize, f: F) -> Vec<T>
    where
        F: Fn(u64, usize) -> T + Sync,
    {
        let n_chunks = n.div_ceil(CHUNK);
        let len_of = |c: usize| {
            if c + 1 == n_chunks && n % CHUNK != 0 {
                n % CHUNK
            } else {
                CHUNK
            }
        };
        if threads <= 1 || n_chunks == 1 {
            return (0..n_chunks).map(|c| f(c as u64, len_of(c))).collect();
        }
        let mut slots: Vec<Option<T>> = (0..n_chunks).map(|_| None).collect();
        let counter = std::sync::atomic::AtomicUsize::new(0);
        let slots_ref = std::sync::Mutex::new(&mut slots);
        std::thread::scope(|scope| {
            for _ in 0..threads.min(n_chunks) {
                scope.spawn(|| loop {
                    let c = counter.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if c >= n_chunks {
                        break;
                    }
                    let v = f(c as u64, len_of(c));
                    slots_ref.lock().unwrap()[c] = Some(v);
                });
            }
        });
        slots.into_iter().map(|s| s.unwrap()).collect()
    }

    /// Streams samples, recording the running estimate at each checkpoint.
    /// The value at n_max equals `estimate(n_max, seed, _)` exactly.
    pub fn convergence_run(
        &self,
        n_max: usize,
        checkpoints: &[usize],
        seed: u64,
    ) -> Result<EstimateTrace> {
        if n_max == 0 {
            return Err(Error::EmptySampleSet);
        }
        let mut marks: Vec<usize> = checkpoints
            .iter()
            .copied()
            .filter(|&c| c >= 1 && c <= n_max)
            .collect();
        if marks.last() != Some(&n_max) {
            marks.push(n_max);
        }
        marks.sort_unstable();
        marks.dedup();

        let mut points = Vec::with_capacity(marks.len());
        let mut completed_sum = 0.0f64; // chunks fully processed
        let mut chunk_sum = 0.0f64;
        let mut counts = SampleCounts::new();
        let mut chunk_counts = SampleCounts::new();
        let mut mark_iter = marks.iter().peekable();

        let n_chunks = n_max.div_ceil(CHUNK);
        let mut seen = 0usize;
        for c in 0..n_chunks {
            let len = if c + 1 == n_chunks && n_max % CHUNK != 0 {
                n_max % CHUNK
            } else {
                CHUNK
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(c as u64));
            let dims = match self.problem.kind() {
                Kind::Haf => self.problem.n(),
                Kind::HafSq => 2 * self.problem.n(),
            };
            let mut point = vec![0.0; dims];
            for _ in 0..len {
                match self.kind {
                    EstimatorKind::Mc => {
                        self.mc_draw(&mut rng, &mut point);
                        chunk_sum += self.problem.eval_f(&point)?;
                    }
                    EstimatorKind::GbsI => {
                        if let Outcome::Pattern(i) =
                            self.dist.as_ref().unwrap().draw_one(&mut rng)
                        {
                            chunk_sum += self.payloads[i];
                        }
                    }
                    EstimatorKind::GbsP => {
                        match self.dist.as_ref().unwrap().draw_one(&mut rng) {
                            Outcome::Pattern(i) => {
                                chunk_counts.record(self.dist.as_ref().unwrap().pattern(i))
                            }
                            Outcome::Residual => chunk_counts.record_residual(),
                        }
                    }
                }
                seen += 1;
                if mark_iter.peek() == Some(&&seen) {
                    mark_iter.next();
                    let est = match self.kind {
                        EstimatorKind::GbsP => {
                            let mut merged = counts.clone();
                            merged.merge(&chunk_counts);
                            gbs_p_estimate(
                                &merged,
                                self.problem,
                                self.dist.as_ref().unwrap().d(),
                            )?
                        }
                        _ => (completed_sum + chunk_sum) / seen as f64,
                    };
                    points.push(TracePoint {
                        n: seen as u64,
                        estimate: est,
                    });
                }
            }
            completed_sum += chunk_sum;
            chunk_sum = 0.0;
            counts.merge(&chunk_counts);
            chunk_counts = SampleCounts::new();
        }

        Ok(EstimateTrace {
            estimator: self.kind,
            seed,
            points,
            final_n: n_max as u64,
            problem_digest: problem_digest(self.problem),
        })
    }
}

fn problem_digest(p: &GEProblem) -> String {
    format!(
        "{:?}/N={}/K={}/support={}",
        p.kind(),
        p.n(),
        p.k_max(),
        p.coeffs().support_len()
    )
}

#[derive(Debug, Clone, Copy)]
pub struct TracePoint {
    pub n: u64,
    pub estimate: f64,
}

/// Checkpointed running estimates for one (estimator, seed) run.
#[derive(Debug, Clone)]
pub struct EstimateTrace {
    pub estimator: EstimatorKind,
    pub seed: u64,
    pub points: Vec<TracePoint>,
    pub final_n: u64,
    pub problem_digest: String,
}

impl EstimateTrace {
    pub fn final_estimate(&self) -> f64 {
        self.points.last().map(|p| p.estimate).unwrap_or(f64::NAN)
    }

    /// Checkpoint counts are strictly increasing and all values finite.
    pub fn well_formed(&self) -> bool {
        self.points.windows(2).all(|w| w[0].n < w[1].n)
            && self.points.iter().all(|p| p.estimate.is_finite())
    }
}

/// Trace CSV: estimator, seed, n, estimate, mu_exact, rel_error.
pub fn write_trace_csv<W: std::io::Write>(
    w: &mut W,
    traces: &[EstimateTrace],
    mu_exact: f64,
) -> Result<()> {
    writeln!(w, "estimator,seed,n,estimate,mu_exact,rel_error")?;
    for t in traces {
        for p in &t.points {
            let rel = if mu_exact != 0.0 {
                (p.estimate - mu_exact).abs() / mu_exact.abs()
            } else {
                f64::NAN
            };
            writeln!(
                w,
                "{},{},{},{:.16e},{:.16e},{:.16e}",
                t.estimator.label(),
                t.seed,
                p.n,
                p.estimate,
                mu_exact,
                rel
            )?;
        }
    }
    Ok(())
}
