//! Monte Carlo regret estimation, an exact enumeration oracle for tiny
//! instances, and (N, k) sweeps with a scaling-monotonicity report.
//!
//! Everything here is deterministic given the master seed: trial `t` of a run
//! reads from its own counter-derived stream (see [`crate::rng`]), per-trial
//! results are collected in trial order, and the final reductions are
//! sequential compensated sums. Worker counts change wall time, not output.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rng;
use crate::strategies::{SampleBatch, StrategySpec};

/// Guard on `n^N`, the number of ordered draw sequences the oracle will visit.
pub const ENUMERATION_STATE_LIMIT: f64 = 2e7;

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum
    }
}

/// Monte Carlo estimate of the Pass@k regret.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegretEstimate {
    /// Sample mean of the per-trial regret, in [0, 1].
    pub mean: f64,
    /// Sample standard deviation divided by sqrt(trials).
    pub stderr: f64,
    pub trials: u64,
    /// Normal 95% interval: mean +/- 1.96 stderr.
    pub ci95: (f64, f64),
}

/// Inclusive-prefix CDF of `pi_ref`.
fn cumulative(pi_ref: &[f64]) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(pi_ref.len());
    let mut acc = 0.0;
    for &p in pi_ref {
        acc += p;
        cdf.push(acc);
    }
    cdf
}

/// Inverse-CDF draw: smallest index whose cumulative mass exceeds `u`.
///
/// Zero-probability responses are never returned because their CDF entry
/// equals the previous one.
fn draw_index(cdf: &[f64], u: f64) -> usize {
    let pos = cdf.partition_point(|&c| c <= u);
    pos.min(cdf.len() - 1)
}

/// Draws `n` responses into a dense count vector, one inverse-CDF draw at a
/// time.
fn sample_counts_direct(cdf: &[f64], n: usize, rng: &mut impl Rng, counts: &mut [usize]) {
    counts.fill(0);
    for _ in 0..n {
        counts[draw_index(cdf, rng.gen::<f64>())] += 1;
    }
}

/// Budget above which the trial loop samples counts by sequential binomial
/// splitting (O(universe) per trial) instead of draw-by-draw inversion.
const SPLIT_SAMPLING_MIN_DRAWS: usize = 128;

/// Multinomial counts via binomial splitting: peel off one response at a
/// time, drawing its count from Binomial(remaining, p / remaining mass).
fn sample_counts_split(pi_ref: &[f64], n: usize, rng: &mut impl Rng, counts: &mut [usize]) {
    let mut remaining = n as u64;
    let mut mass = 1.0f64;
    let last = pi_ref.len() - 1;
    for (y, &p) in pi_ref.iter().enumerate() {
        if remaining == 0 {
            counts[y] = 0;
            continue;
        }
        if y == last || mass <= p {
            counts[y] = remaining as usize;
            remaining = 0;
            continue;
        }
        let ratio = p / mass;
        let drawn = if ratio <= 0.0 {
            0
        } else {
            Binomial::new(remaining, ratio).expect("ratio in [0, 1]").sample(rng)
        };
        counts[y] = drawn as usize;
        remaining -= drawn;
        mass -= p;
    }
}

fn sample_counts(pi_ref: &[f64], cdf: &[f64], n: usize, rng: &mut impl Rng, counts: &mut [usize]) {
    if n >= SPLIT_SAMPLING_MIN_DRAWS {
        sample_counts_split(pi_ref, n, rng, counts);
    } else {
        sample_counts_direct(cdf, n, rng, counts);
    }
}

/// One trial's response counts for `instance` (shared fast path for the
/// Monte Carlo loops in this crate).
pub(crate) fn trial_counts(
    instance: &Instance,
    cdf: &[f64],
    n: usize,
    rng: &mut impl Rng,
    counts: &mut [usize],
) {
    sample_counts(&instance.pi_ref, cdf, n, rng, counts);
}

pub(crate) fn cumulative_of(instance: &Instance) -> Vec<f64> {
    cumulative(&instance.pi_ref)
}

/// Samples one batch of `n` i.i.d. responses from the instance's reference
/// policy, with frequencies and reward labels populated.
///
/// Always draws via inverse CDF over the cumulative vector, so a fixed
/// stream yields a bitwise-identical batch on any thread.
pub fn sample_batch(instance: &Instance, n: usize, rng: &mut impl Rng) -> SampleBatch {
    let cdf = cumulative(&instance.pi_ref);
    let mut counts = vec![0usize; instance.len()];
    sample_counts_direct(&cdf, n, rng, &mut counts);
    SampleBatch::from_counts(&counts, n, |y| instance.r_hat[y])
}

/// Per-trial regret: `1 - max r_star` over the selection. An empty selection
/// (Best-of-Majority can filter everything) counts as the worst case, 1.
fn selection_regret(instance: &Instance, selection: &[usize]) -> f64 {
    let best = selection
        .iter()
        .map(|&y| instance.r_star[y])
        .fold(f64::NEG_INFINITY, f64::max);
    if best.is_finite() {
        1.0 - best
    } else {
        1.0
    }
}

fn summarize(regrets: &[f64]) -> RegretEstimate {
    let trials = regrets.len() as u64;
    let mut sum = KahanSum::default();
    for &r in regrets {
        sum.add(r);
    }
    let mean = sum.total() / trials as f64;
    let mut sq = KahanSum::default();
    for &r in regrets {
        let d = r - mean;
        sq.add(d * d);
    }
    let variance = sq.total() / (trials as f64 - 1.0);
    let stderr = (variance / trials as f64).sqrt();
    RegretEstimate {
        mean,
        stderr,
        trials,
        ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
    }
}

/// Estimates the regret of `strategy` on `instance` over independent batches.
///
/// Trial `t` derives its stream from `(master_seed, t)`, so the estimate is
/// bitwise reproducible regardless of how trials are scheduled.
pub fn estimate_regret(
    instance: &Instance,
    strategy: &StrategySpec,
    n: usize,
    k: usize,
    trials: u64,
    master_seed: u64,
) -> Result<RegretEstimate> {
    if trials < 2 {
        return Err(Error::Precondition(format!(
            "estimate_regret needs trials >= 2, got {trials}"
        )));
    }
    if n == 0 || k == 0 {
        return Err(Error::Precondition("estimate_regret needs n >= 1 and k >= 1".into()));
    }
    let resolved = strategy.resolve(instance)?;
    let cdf = cumulative(&instance.pi_ref);
    let universe = instance.len();

    let regrets: Vec<f64> = (0..trials)
        .into_par_iter()
        .map_init(
            || vec![0usize; universe],
            |counts, trial| {
                let mut stream = rng::stream(master_seed, trial);
                sample_counts(&instance.pi_ref, &cdf, n, &mut stream, counts);
                let batch = SampleBatch::from_counts(counts, n, |y| instance.r_hat[y]);
                let selection = resolved
                    .select(&batch, k)
                    .expect("strategy resolved before the trial loop");
                selection_regret(instance, &selection)
            },
        )
        .collect();

    Ok(summarize(&regrets))
}

/// Exact Pass@k regret by exhaustive enumeration of all ordered draw
/// sequences, each weighted by its product probability.
///
/// Feasible only for tiny instances; fails with
/// [`Error::EnumerationInfeasible`] when `n_responses^N` exceeds
/// [`ENUMERATION_STATE_LIMIT`]. Summation is compensated and sequential.
pub fn exact_regret_enumeration(
    instance: &Instance,
    strategy: &StrategySpec,
    n: usize,
    k: usize,
) -> Result<f64> {
    if n == 0 || k == 0 {
        return Err(Error::Precondition("enumeration needs n >= 1 and k >= 1".into()));
    }
    let universe = instance.len();
    let states = (universe as f64).powi(n as i32);
    if !(states <= ENUMERATION_STATE_LIMIT) {
        return Err(Error::EnumerationInfeasible { states, limit: ENUMERATION_STATE_LIMIT });
    }
    let resolved = strategy.resolve(instance)?;

    let mut sequence = vec![0usize; n];
    let mut counts = vec![0usize; universe];
    let mut total = KahanSum::default();
    loop {
        let mut weight = 1.0;
        for &y in &sequence {
            weight *= instance.pi_ref[y];
        }
        if weight > 0.0 {
            counts.fill(0);
            for &y in &sequence {
                counts[y] += 1;
            }
            let batch = SampleBatch::from_counts(&counts, n, |y| instance.r_hat[y]);
            let selection = resolved
                .select(&batch, k)
                .expect("strategy resolved before enumeration");
            total.add(weight * selection_regret(instance, &selection));
        }

        // odometer increment, least-significant position first
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(total.total());
            }
            sequence[pos] += 1;
            if sequence[pos] < universe {
                break;
            }
            sequence[pos] = 0;
            pos += 1;
        }
    }
}

/// One sweep cell: a strategy evaluated at one (N, k) with the analytic
/// bounds attached when the instance family supplies them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub strategy: StrategySpec,
    pub n: usize,
    pub k: usize,
    pub estimate: RegretEstimate,
    pub bound_upper: Option<f64>,
    pub bound_lower: Option<f64>,
}

/// Table of regret estimates over a (strategy, N, k) grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: SweepRow) {
        self.rows.push(row);
    }

    /// Rows for one (strategy, k) series, sorted by N.
    pub fn series(&self, strategy: &StrategySpec, k: usize) -> Vec<&SweepRow> {
        let mut rows: Vec<&SweepRow> = self
            .rows
            .iter()
            .filter(|row| &row.strategy == strategy && row.k == k)
            .collect();
        rows.sort_by_key(|row| row.n);
        rows
    }

    /// CSV rendering with the fixed header; absent bounds are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("strategy,N,k,trials,regret_mean,regret_stderr,bound_upper,bound_lower\n");
        for row in &self.rows {
            let upper = row.bound_upper.map(|b| b.to_string()).unwrap_or_default();
            let lower = row.bound_lower.map(|b| b.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.strategy, row.n, row.k, row.estimate.trials, row.estimate.mean,
                row.estimate.stderr, upper, lower,
            ));
        }
        out
    }
}

/// Family-average of per-member estimates: means averaged, standard errors
/// combined as independent.
fn combine_members(estimates: &[RegretEstimate]) -> RegretEstimate {
    let m = estimates.len() as f64;
    let mut mean = KahanSum::default();
    let mut var = KahanSum::default();
    for est in estimates {
        mean.add(est.mean);
        var.add(est.stderr * est.stderr);
    }
    let mean = mean.total() / m;
    let stderr = var.total().sqrt() / m;
    RegretEstimate {
        mean,
        stderr,
        trials: estimates[0].trials,
        ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
    }
}

/// Runs every (strategy, N, k) cell on an instance family and attaches bound
/// values where available.
///
/// A singleton slice sweeps one instance; a family (shared coverage and
/// reward errors by construction) is scored by its average regret. Each
/// (cell, member) pair derives its own seed from `master_seed`, so cells are
/// independent and the whole sweep is reproducible.
pub fn sweep(
    family: &[Instance],
    strategies: &[StrategySpec],
    n_grid: &[usize],
    k_grid: &[usize],
    trials: u64,
    master_seed: u64,
) -> Result<SweepResult> {
    if family.is_empty() {
        return Err(Error::Precondition("sweep needs at least one instance".into()));
    }
    if strategies.is_empty() || n_grid.is_empty() || k_grid.is_empty() {
        return Err(Error::Precondition("sweep grids must be nonempty".into()));
    }

    let stats = family[0].derived_stats()?;
    let members = family.len();

    let mut result = SweepResult::new();
    for (si, strategy) in strategies.iter().enumerate() {
        for &n in n_grid {
            for &k in k_grid {
                let estimates: Vec<RegretEstimate> = family
                    .iter()
                    .enumerate()
                    .map(|(j, member)| {
                        let seed = rng::derive_seed(
                            master_seed,
                            &[si as u64, n as u64, k as u64, j as u64],
                        );
                        estimate_regret(member, strategy, n, k, trials, seed)
                    })
                    .collect::<Result<_>>()?;
                let estimate = combine_members(&estimates);
                let bound_upper = Some(crate::bounds::bom_upper_bound(
                    stats.coverage,
                    k,
                    stats.eps_rm,
                    stats.eps_opt,
                    n,
                ));
                let bound_lower = if members >= 2 {
                    crate::bounds::general_lower_bound(stats.coverage, k, members, stats.eps_rm).ok()
                } else {
                    None
                };
                result.push(SweepRow { strategy: strategy.clone(), n, k, estimate, bound_upper, bound_lower });
            }
        }
    }
    Ok(result)
}

/// Picks the family member on which `strategy` does worst, by Monte Carlo.
///
/// The lower-bound constructions argue about family averages, but callers
/// sometimes want the single hardest member; ties go to the lowest index.
pub fn worst_family_member(
    family: &[Instance],
    strategy: &StrategySpec,
    n: usize,
    k: usize,
    trials: u64,
    master_seed: u64,
) -> Result<(usize, RegretEstimate)> {
    if family.is_empty() {
        return Err(Error::Precondition("family must be nonempty".into()));
    }
    let mut worst: Option<(usize, RegretEstimate)> = None;
    for (j, member) in family.iter().enumerate() {
        let seed = rng::derive_seed(master_seed, &[j as u64]);
        let est = estimate_regret(member, strategy, n, k, trials, seed)?;
        if worst.as_ref().is_none_or(|(_, best)| est.mean > best.mean) {
            worst = Some((j, est));
        }
    }
    Ok(worst.expect("nonempty family"))
}

/// Scaling-monotonicity check over one (strategy, k) series of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// Largest mean increase over consecutive N pairs (negative when the
    /// series decreases everywhere).
    pub max_increase_over_n: f64,
    /// (N1, N2) pairs whose increase exceeds 3 * (stderr1 + stderr2).
    pub violating_pairs: Vec<(usize, usize)>,
}

/// Flags consecutive-N regret increases that exceed the combined noise band.
///
/// This can only falsify monotonicity on the tested family; an empty report
/// never certifies the property in general.
pub fn monotonicity_report(
    sweep: &SweepResult,
    strategy: &StrategySpec,
    k: usize,
) -> Result<MonotonicityReport> {
    let series = sweep.series(strategy, k);
    if series.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "monotonicity report needs >= 2 N values for strategy {strategy}, k = {k} (got {})",
            series.len()
        )));
    }
    let mut max_increase = f64::NEG_INFINITY;
    let mut violating = Vec::new();
    for pair in series.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let increase = hi.estimate.mean - lo.estimate.mean;
        max_increase = max_increase.max(increase);
        if increase > 3.0 * (lo.estimate.stderr + hi.estimate.stderr) {
            violating.push((lo.n, hi.n));
        }
    }
    Ok(MonotonicityReport { max_increase_over_n: max_increase, violating_pairs: violating })
}
