//! Adversarial instance constructions.
//!
//! Each generator builds, in closed form, an instance (or symmetric family of
//! instances) on which one of the selection rules provably performs badly:
//!
//! - [`mv_hard_instance`]: majority voting keeps constant regret at any
//!   sampling budget because several wrong answers each outweigh the optimum
//!   under the reference policy.
//! - [`bon_hard_case1`]: with a small budget, Best-of-N simply never sees the
//!   optimum.
//! - [`bon_hard_case2`]: with a large budget, Best-of-N is baited by rare
//!   responses whose estimated reward slightly beats the optimum's.
//! - [`averaging_hammer_family`] / [`eps_opt_family`]: symmetric families on
//!   which no k-output algorithm can be right often enough, driving the
//!   general lower bounds.
//!
//! Every generated instance passes validation, hits the requested coverage
//! exactly, and realizes the stated reward errors in closed form.

use crate::error::{Error, Result};
use crate::instance::Instance;

fn precondition(reason: impl Into<String>) -> Error {
    Error::Precondition(reason.into())
}

/// Snaps tiny negative probabilities (boundary parameter choices) to zero.
fn snap(p: f64) -> Result<f64> {
    if p >= 0.0 {
        Ok(p)
    } else if p > -1e-12 {
        Ok(0.0)
    } else {
        Err(precondition(format!("probability mass {p} is negative")))
    }
}

/// Instance on which (weighted) majority voting with weight `w` suffers
/// constant regret: `k` half-reward responses each carry `eta/C*` reference
/// mass against the optimum's `1/C*`, where `eta = 2 w(1) / w(1/2)`.
///
/// Layout: index 0 is the zero-reward filler, index 1 the optimum, indices
/// `2..k+2` the half-reward decoys. Reward model is exact, so
/// `eps_rm = eps_opt = 0`.
pub fn mv_hard_instance(c_star: f64, k: usize, w: impl Fn(f64) -> f64) -> Result<Instance> {
    if k == 0 {
        return Err(precondition("k must be >= 1"));
    }
    if !(c_star >= 1.0) {
        return Err(precondition(format!("C* = {c_star} must be >= 1")));
    }
    let w1 = w(1.0);
    let wh = w(0.5);
    if !(wh > 0.0) || !(w1 >= wh) {
        return Err(precondition(
            "weight function must satisfy w(1) >= w(1/2) > 0".to_string(),
        ));
    }
    let eta = 2.0 * w1 / wh;
    let filler = snap(1.0 - (1.0 + eta * k as f64) / c_star).map_err(|_| {
        precondition(format!(
            "C* = {c_star} too small: needs C* >= 1 + 2 k w(1)/w(1/2) = {}",
            1.0 + eta * k as f64
        ))
    })?;

    let n = k + 2;
    let mut pi_ref = Vec::with_capacity(n);
    let mut r_star = Vec::with_capacity(n);
    pi_ref.push(filler);
    r_star.push(0.0);
    pi_ref.push(1.0 / c_star);
    r_star.push(1.0);
    for _ in 0..k {
        pi_ref.push(eta / c_star);
        r_star.push(0.5);
    }
    let r_hat = r_star.clone();
    Instance::new(pi_ref, r_star, r_hat, 1)
}

/// Two-response instance where Best-of-N's only failure mode is never
/// sampling the optimum: `pi_ref = (1 - 1/C*, 1/C*)` with an exact reward
/// model.
pub fn bon_hard_case1(c_star: f64) -> Result<Instance> {
    if !(c_star >= 2.0) {
        return Err(precondition(format!("C* = {c_star} must be >= 2")));
    }
    Instance::new(
        vec![1.0 - 1.0 / c_star, 1.0 / c_star],
        vec![0.0, 1.0],
        vec![0.0, 1.0],
        1,
    )
}

/// Recommended bait mass for [`bon_hard_case2`] at sampling budget `n`
/// (the schedule that removes the log factor from the lower bound).
pub fn case2_recommended_p(k: usize, n: usize) -> f64 {
    4.0 * k as f64 / n as f64
}

/// Alternative bait-mass schedule `(k/N) ln(2k)` from the simpler analysis;
/// costs an extra log factor but is useful for comparison.
pub fn case2_simple_p(k: usize, n: usize) -> f64 {
    (k as f64 / n as f64) * (2.0 * k as f64).ln()
}

/// Large-budget Best-of-N trap: `M = 2k` bait responses of total reference
/// mass `p` whose estimated reward (exactly 1) edges out the optimum's
/// `1 - delta`, while their true reward trails by `eps_rm / (2 sqrt(p))`.
///
/// Layout: index 0 is the optimum, index 1 the zero-reward filler, indices
/// `2..2+2k` the baits. The realized squared error is
/// `eps_rm^2/4 + delta^2/C*`, below the `eps_rm` budget for small `delta`;
/// the realized `eps_opt` is exactly `delta`.
pub fn bon_hard_case2(c_star: f64, k: usize, p: f64, eps_rm: f64, delta: f64) -> Result<Instance> {
    if k == 0 {
        return Err(precondition("k must be >= 1"));
    }
    if !(c_star >= 2.0 * k as f64) {
        return Err(precondition(format!("C* = {c_star} must be >= 2k = {}", 2 * k)));
    }
    if !(p > 0.0 && p < 1.0 - 1.0 / c_star) {
        return Err(precondition(format!(
            "p = {p} must lie in (0, 1 - 1/C*) = (0, {})",
            1.0 - 1.0 / c_star
        )));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(precondition(format!("delta = {delta} must lie in (0, 1]")));
    }
    if !(eps_rm > 0.0) {
        return Err(precondition("eps_rm must be positive (zero gap would tie the optimum)"));
    }
    let gap = eps_rm / (2.0 * p.sqrt());
    if gap > 1.0 {
        return Err(precondition(format!(
            "gap overflow: eps_rm / (2 sqrt(p)) = {gap} > 1 pushes rewards below 0"
        )));
    }

    let m = 2 * k;
    let n = m + 2;
    let mut pi_ref = Vec::with_capacity(n);
    let mut r_star = Vec::with_capacity(n);
    let mut r_hat = Vec::with_capacity(n);
    pi_ref.push(1.0 / c_star);
    r_star.push(1.0);
    r_hat.push(1.0 - delta);
    pi_ref.push(snap(1.0 - 1.0 / c_star - p)?);
    r_star.push(0.0);
    r_hat.push(0.0);
    for _ in 0..m {
        pi_ref.push(p / m as f64);
        r_star.push(1.0 - gap);
        r_hat.push(1.0);
    }
    Instance::new(pi_ref, r_star, r_hat, 0)
}

/// [`bon_hard_case2`] with `delta` picked as half the `eps_opt` target.
pub fn bon_hard_case2_with_target(
    c_star: f64,
    k: usize,
    p: f64,
    eps_rm: f64,
    eps_opt_target: f64,
) -> Result<Instance> {
    if !(eps_opt_target > 0.0) {
        return Err(precondition("eps_opt target must be positive"));
    }
    bon_hard_case2(c_star, k, p, eps_rm, eps_opt_target / 2.0)
}

/// Symmetric family of `m` instances sharing one reference policy and one
/// (over-optimistic) reward model; member `j` secretly makes response `j`
/// optimal and every other candidate `delta = sqrt(C* eps_rm^2 / (m-1))`
/// worse. Any k-output algorithm misses the optimum on at least `m - k`
/// members.
///
/// Layout: index 0 is the filler, indices `1..=m` the candidates; member `j`
/// (0-based position in the returned list) has `y_star = j + 1`.
pub fn averaging_hammer_family(c_star: f64, k: usize, m: usize, eps_rm: f64) -> Result<Vec<Instance>> {
    if k == 0 {
        return Err(precondition("k must be >= 1"));
    }
    if m < 2 {
        return Err(precondition("family size m must be >= 2 (delta is undefined at m = 1)"));
    }
    if !(k <= m) {
        return Err(precondition(format!("k = {k} must be <= m = {m}")));
    }
    if !((m as f64) <= c_star) {
        return Err(precondition(format!("m = {m} must be <= C* = {c_star}")));
    }
    if !(eps_rm > 0.0) {
        return Err(precondition("eps_rm must be positive (delta = 0 would tie the optimum)"));
    }
    let delta = (c_star * eps_rm * eps_rm / (m as f64 - 1.0)).sqrt();
    if delta > 1.0 {
        return Err(precondition(format!(
            "delta = sqrt(C* eps_rm^2 / (m-1)) = {delta} exceeds 1; shrink eps_rm or grow m"
        )));
    }

    let mut pi_ref = Vec::with_capacity(m + 1);
    pi_ref.push(snap(1.0 - m as f64 / c_star)?);
    pi_ref.extend(std::iter::repeat_n(1.0 / c_star, m));
    let mut r_hat = vec![1.0; m + 1];
    r_hat[0] = 0.0;

    (1..=m)
        .map(|j| {
            let mut r_star = vec![1.0 - delta; m + 1];
            r_star[0] = 0.0;
            r_star[j] = 1.0;
            Instance::new(pi_ref.clone(), r_star, r_hat.clone(), j)
        })
        .collect()
}

/// Family of `2k` instances showing that the reward error at the optimum is
/// irreducible: the shared reward model scores every candidate `1 - eps_opt`,
/// and member `j` hides the true optimum at response `j`.
///
/// Requires `eps_opt <= sqrt(C* eps_rm^2)` so each member's realized squared
/// error `eps_opt^2 / C*` stays within the `eps_rm` budget.
pub fn eps_opt_family(c_star: f64, k: usize, eps_opt: f64, eps_rm: f64) -> Result<Vec<Instance>> {
    if k == 0 {
        return Err(precondition("k must be >= 1"));
    }
    let m = 2 * k;
    if !((m as f64) <= c_star) {
        return Err(precondition(format!("C* = {c_star} must be >= 2k = {m}")));
    }
    if !(eps_opt > 0.0 && eps_opt <= 1.0) {
        return Err(precondition(format!("eps_opt = {eps_opt} must lie in (0, 1]")));
    }
    if !(eps_opt <= (c_star * eps_rm * eps_rm).sqrt()) {
        return Err(precondition(format!(
            "eps_opt = {eps_opt} exceeds sqrt(C* eps_rm^2) = {}",
            (c_star * eps_rm * eps_rm).sqrt()
        )));
    }

    let mut pi_ref = Vec::with_capacity(m + 1);
    pi_ref.push(snap(1.0 - m as f64 / c_star)?);
    pi_ref.extend(std::iter::repeat_n(1.0 / c_star, m));
    let mut r_hat = vec![1.0 - eps_opt; m + 1];
    r_hat[0] = 0.0;

    (1..=m)
        .map(|j| {
            let mut r_star = vec![1.0 - eps_opt; m + 1];
            r_star[0] = 0.0;
            r_star[j] = 1.0;
            Instance::new(pi_ref.clone(), r_star, r_hat.clone(), j)
        })
        .collect()
}

/// Parses a compact generator spec into an instance family.
///
/// Grammar: `<kind>:key=value,key=value,...` with kinds `mv`, `bon1`, `bon2`,
/// `hammer`, `epsopt` and keys `cstar`, `k`, `m`, `p`, `n`, `eps_rm`,
/// `eps_opt`, `delta`. Examples:
///
/// - `mv:cstar=20,k=2`
/// - `bon1:cstar=4`
/// - `bon2:cstar=8,k=2,eps_rm=0.2,n=64` (p defaults to 4k/N; delta to 0.01)
/// - `hammer:cstar=16,k=4,m=8,eps_rm=0.1`
/// - `epsopt:cstar=16,k=2,eps_opt=0.1,eps_rm=0.1`
///
/// Single-instance kinds return a one-element family.
pub fn from_spec(spec: &str) -> Result<Vec<Instance>> {
    let bad = |reason: String| precondition(format!("hard-instance spec `{spec}`: {reason}"));
    let (kind, rest) = match spec.split_once(':') {
        Some((kind, rest)) => (kind.trim(), rest),
        None => (spec.trim(), ""),
    };

    let mut cstar = None;
    let mut k = None;
    let mut m = None;
    let mut p = None;
    let mut n = None;
    let mut eps_rm = None;
    let mut eps_opt = None;
    let mut delta = None;
    for pair in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got `{pair}`")))?;
        let value = value.trim();
        let float = || -> Result<f64> {
            value.parse().map_err(|_| bad(format!("cannot parse `{value}` for `{key}`")))
        };
        let int = || -> Result<usize> {
            value.parse().map_err(|_| bad(format!("cannot parse `{value}` for `{key}`")))
        };
        match key.trim() {
            "cstar" => cstar = Some(float()?),
            "k" => k = Some(int()?),
            "m" => m = Some(int()?),
            "p" => p = Some(float()?),
            "n" => n = Some(int()?),
            "eps_rm" => eps_rm = Some(float()?),
            "eps_opt" => eps_opt = Some(float()?),
            "delta" => delta = Some(float()?),
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }

    let need = |name: &str, value: Option<f64>| value.ok_or_else(|| bad(format!("missing `{name}`")));
    let need_int = |name: &str, value: Option<usize>| value.ok_or_else(|| bad(format!("missing `{name}`")));

    match kind {
        "mv" => {
            let inst = mv_hard_instance(
                need("cstar", cstar)?,
                need_int("k", k)?,
                |r| crate::strategies::WeightFn::Identity.eval(r),
            )?;
            Ok(vec![inst])
        }
        "bon1" => Ok(vec![bon_hard_case1(need("cstar", cstar)?)?]),
        "bon2" => {
            let k = need_int("k", k)?;
            let p = match (p, n) {
                (Some(p), _) => p,
                (None, Some(n)) => case2_recommended_p(k, n),
                (None, None) => return Err(bad("provide `p` or `n` (p defaults to 4k/N)".into())),
            };
            let inst = match (delta, eps_opt) {
                (Some(d), _) => bon_hard_case2(need("cstar", cstar)?, k, p, need("eps_rm", eps_rm)?, d)?,
                (None, Some(target)) => bon_hard_case2_with_target(
                    need("cstar", cstar)?,
                    k,
                    p,
                    need("eps_rm", eps_rm)?,
                    target,
                )?,
                (None, None) => bon_hard_case2(need("cstar", cstar)?, k, p, need("eps_rm", eps_rm)?, 0.01)?,
            };
            Ok(vec![inst])
        }
        "hammer" => averaging_hammer_family(
            need("cstar", cstar)?,
            need_int("k", k)?,
            need_int("m", m)?,
            need("eps_rm", eps_rm)?,
        ),
        "epsopt" => eps_opt_family(
            need("cstar", cstar)?,
            need_int("k", k)?,
            need("eps_opt", eps_opt)?,
            need("eps_rm", eps_rm)?,
        ),
        other => Err(bad(format!(
            "unknown generator `{other}` (expected mv, bon1, bon2, hammer, epsopt)"
        ))),
    }
}
