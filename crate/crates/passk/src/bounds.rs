//! Closed-form regret and probability bounds, with the explicit constants
//! from the underlying concentration arguments (asymptotic forms are not
//! testable). Natural logarithms throughout.
//!
//! Also Monte Carlo-checks the frequency-sandwich event that the
//! Best-of-Majority guarantee rests on: with threshold `3/(4C*)`, the
//! surviving set should contain every response of reference mass `>= 1/C*`
//! and nothing below `1/(4C*)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rng;
use crate::simulation;

/// Best-of-Majority regret upper bound:
/// `eps_opt + sqrt(4 C* eps_rm^2 / k) + 5 C* exp(-N / (32 C*))`,
/// clamped to [0, 1] (regrets cannot leave the unit interval).
pub fn bom_upper_bound(c_star: f64, k: usize, eps_rm: f64, eps_opt: f64, n: usize) -> f64 {
    let middle = (4.0 * c_star * eps_rm * eps_rm / k as f64).sqrt();
    let tail = 5.0 * c_star * (-(n as f64) / (32.0 * c_star)).exp();
    (eps_opt + middle + tail).clamp(0.0, 1.0)
}

/// Minimal sampling budget for the Best-of-Majority guarantee:
/// `ceil(16 C* ln(k C* / eps_rm^2))`.
///
/// Undefined at `eps_rm = 0` (the log diverges); callers then pick N freely.
pub fn bom_min_budget(c_star: f64, k: usize, eps_rm: f64) -> Result<usize> {
    if eps_rm <= 0.0 {
        return Err(Error::UndefinedBudget);
    }
    let budget = 16.0 * c_star * (k as f64 * c_star / (eps_rm * eps_rm)).ln();
    Ok(budget.ceil() as usize)
}

/// Sampling budget beyond which majority voting's constant-regret behavior
/// kicks in on its hard instance: `ceil(9 C* ln(2k + 2))`.
pub fn mv_budget(c_star: f64, k: usize) -> usize {
    debug_assert!(k >= 1 && c_star >= 1.0);
    (9.0 * c_star * (2.0 * k as f64 + 2.0).ln()).ceil() as usize
}

/// Minimax lower bound from an `m`-member symmetric family:
/// `((m - k) / m) * sqrt(C* eps_rm^2 / (m - 1))`.
///
/// With `m = 2k` this is the `sqrt(C* eps_rm^2 / k)`-order bound any
/// k-output strategy must pay.
pub fn general_lower_bound(c_star: f64, k: usize, m: usize, eps_rm: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::Precondition(format!("m = {m} must be >= 2")));
    }
    if !(k <= m) {
        return Err(Error::Precondition(format!("k = {k} must be <= m = {m}")));
    }
    if !((m as f64) <= c_star) {
        return Err(Error::Precondition(format!("m = {m} must be <= C* = {c_star}")));
    }
    let delta = (c_star * eps_rm * eps_rm / (m as f64 - 1.0)).sqrt();
    Ok((m - k) as f64 / m as f64 * delta)
}

/// Best-of-N regret lower bound on its large-budget hard instance:
/// `min(1, 0.004 sqrt(N eps_rm^2 / k))`.
pub fn bon_lower_bound(n: usize, k: usize, eps_rm: f64) -> f64 {
    (0.004 * (n as f64 * eps_rm * eps_rm / k as f64).sqrt()).min(1.0)
}

/// Analytic lower bound on the probability of the frequency-sandwich event:
/// `max(0, 1 - 5 C* exp(-N / (32 C*)))`.
pub fn event_e_prob_bound(c_star: f64, n: usize) -> f64 {
    (1.0 - 5.0 * c_star * (-(n as f64) / (32.0 * c_star)).exp()).max(0.0)
}

/// Empirical probability of the frequency-sandwich event.
///
/// Per trial, a batch of `n` draws is taken and the surviving set
/// `{y : freq(y) >= 3/(4C*)}` is compared against the exact reference-mass
/// level sets at `1/C*` (must all survive) and `1/(4C*)` (nothing below may
/// survive). Level thresholds derive from `pi_ref[y_star]` directly, so no
/// reciprocal round-trip can misclassify the optimum itself.
pub fn event_e_monte_carlo(
    instance: &Instance,
    n: usize,
    trials: u64,
    master_seed: u64,
) -> Result<f64> {
    if n == 0 || trials == 0 {
        return Err(Error::Precondition("event check needs n >= 1 and trials >= 1".into()));
    }
    instance.coverage()?;
    let p_star = instance.pi_ref[instance.y_star];
    let keep_level = 0.75 * p_star; //  3/(4C*)
    let hi_level = p_star; //            1/C*
    let lo_level = 0.25 * p_star; //     1/(4C*)

    let must_survive: Vec<usize> = (0..instance.len())
        .filter(|&y| instance.pi_ref[y] >= hi_level)
        .collect();

    let cdf = simulation::cumulative_of(instance);
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map_init(
            || vec![0usize; instance.len()],
            |counts, trial| {
                let mut stream = rng::stream(master_seed, trial);
                simulation::trial_counts(instance, &cdf, n, &mut stream, counts);
                let total = n as f64;
                let upper_ok =
                    must_survive.iter().all(|&y| counts[y] as f64 / total >= keep_level);
                let lower_ok = counts.iter().enumerate().all(|(y, &count)| {
                    count == 0
                        || (count as f64 / total) < keep_level
                        || instance.pi_ref[y] >= lo_level
                });
                u64::from(upper_ok && lower_ok)
            },
        )
        .sum();

    Ok(hits as f64 / trials as f64)
}
