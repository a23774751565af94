//! Selection rules mapping one sampled batch to at most `k` distinct responses.
//!
//! All four rules share the same skeleton: rank the distinct responses of the
//! batch under a total order (score descending, then response index ascending)
//! and keep the first `k`. The total order makes every selection reproducible
//! and gives the exhaustive oracle a well-defined target. Best-of-Majority
//! additionally drops low-frequency responses before ranking and never
//! backfills, so it may return fewer than `k` responses (possibly none).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Floor applied by the built-in weight functions so that scores stay positive.
pub const WEIGHT_FLOOR: f64 = 1e-6;

/// One draw of `N` i.i.d. responses with empirical frequencies and queried
/// reward labels for the distinct responses.
///
/// The selection rules only look at the multiset of draws, so the batch
/// stores per-response counts rather than the raw sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    n_draws: usize,
    /// Support of the draws, ascending.
    distinct: Vec<usize>,
    /// Draw count per distinct response.
    counts: Vec<usize>,
    /// Empirical frequency per distinct response (count / N).
    freq: Vec<f64>,
    /// Estimated reward per distinct response.
    rewards: Vec<f64>,
}

impl SampleBatch {
    /// Builds a batch from raw draws, querying `reward_of` once per distinct
    /// response.
    pub fn from_draws(draws: Vec<usize>, reward_of: impl Fn(usize) -> f64) -> Self {
        let n = draws.len();
        let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
        for &y in &draws {
            *tally.entry(y).or_insert(0) += 1;
        }
        let mut batch = Self {
            n_draws: n,
            distinct: Vec::with_capacity(tally.len()),
            counts: Vec::with_capacity(tally.len()),
            freq: Vec::with_capacity(tally.len()),
            rewards: Vec::with_capacity(tally.len()),
        };
        for (y, count) in tally {
            batch.distinct.push(y);
            batch.counts.push(count);
            batch.freq.push(count as f64 / n as f64);
            batch.rewards.push(reward_of(y));
        }
        batch
    }

    /// Builds a batch from per-response counts over a dense index range.
    ///
    /// `counts[y]` is the number of draws of response `y`; `total` must equal
    /// the sum of counts. Equivalent to `from_draws` on any sequence with
    /// these counts.
    pub fn from_counts(counts: &[usize], total: usize, reward_of: impl Fn(usize) -> f64) -> Self {
        debug_assert_eq!(counts.iter().sum::<usize>(), total);
        let mut batch = Self {
            n_draws: total,
            distinct: Vec::new(),
            counts: Vec::new(),
            freq: Vec::new(),
            rewards: Vec::new(),
        };
        for (y, &count) in counts.iter().enumerate() {
            if count == 0 {
                continue;
            }
            batch.distinct.push(y);
            batch.counts.push(count);
            batch.freq.push(count as f64 / total as f64);
            batch.rewards.push(reward_of(y));
        }
        batch
    }

    pub fn n_draws(&self) -> usize {
        self.n_draws
    }

    /// Distinct responses in the batch, ascending.
    pub fn distinct(&self) -> &[usize] {
        &self.distinct
    }

    /// Draw count of `y`.
    pub fn count_of(&self, y: usize) -> usize {
        match self.distinct.binary_search(&y) {
            Ok(pos) => self.counts[pos],
            Err(_) => 0,
        }
    }

    /// Empirical frequency of `y` (zero when absent).
    pub fn freq_of(&self, y: usize) -> f64 {
        match self.distinct.binary_search(&y) {
            Ok(pos) => self.freq[pos],
            Err(_) => 0.0,
        }
    }

    /// Queried reward label of `y`, if present in the batch.
    pub fn reward_of(&self, y: usize) -> Option<f64> {
        self.distinct.binary_search(&y).ok().map(|pos| self.rewards[pos])
    }
}

/// Exact empirical frequencies of a draw sequence: `count(y) / n`.
pub fn frequency_table(draws: &[usize], n: usize) -> BTreeMap<usize, f64> {
    debug_assert_eq!(draws.len(), n);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &y in draws {
        *counts.entry(y).or_insert(0) += 1;
    }
    counts.into_iter().map(|(y, c)| (y, c as f64 / n as f64)).collect()
}

/// Ranks positions by (score desc, response index asc) and returns the first
/// `k` response indices. With `|positions| <= k` this returns everything,
/// still in ranked order.
fn take_top_k(batch: &SampleBatch, positions: Vec<usize>, scores: &[f64], k: usize) -> Vec<usize> {
    let mut order = positions;
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| batch.distinct[a].cmp(&batch.distinct[b]))
    });
    order.truncate(k);
    order.into_iter().map(|pos| batch.distinct[pos]).collect()
}

/// Majority voting: top-k distinct responses by empirical frequency.
pub fn select_majority(batch: &SampleBatch, k: usize) -> Vec<usize> {
    let positions = (0..batch.distinct.len()).collect();
    take_top_k(batch, positions, &batch.freq, k)
}

/// Weighted majority voting: top-k by `w(reward) * frequency`.
///
/// `w` must be monotone nondecreasing and positive on [0, 1].
pub fn select_weighted_majority(
    batch: &SampleBatch,
    k: usize,
    w: impl Fn(f64) -> f64,
) -> Vec<usize> {
    let scores: Vec<f64> = batch
        .rewards
        .iter()
        .zip(&batch.freq)
        .map(|(&r, &f)| w(r) * f)
        .collect();
    let positions = (0..batch.distinct.len()).collect();
    take_top_k(batch, positions, &scores, k)
}

/// Best-of-N: top-k distinct responses by estimated reward.
pub fn select_bon(batch: &SampleBatch, k: usize) -> Vec<usize> {
    let positions = (0..batch.distinct.len()).collect();
    take_top_k(batch, positions, &batch.rewards, k)
}

/// Best-of-Majority: drop responses with frequency below `alpha`, then top-k
/// of the survivors by estimated reward.
///
/// When fewer than `k` responses survive, the survivors are returned as-is;
/// there is no backfill, and the result may be empty.
pub fn select_bom(batch: &SampleBatch, k: usize, alpha: f64) -> Vec<usize> {
    let positions = (0..batch.distinct.len())
        .filter(|&pos| batch.freq[pos] >= alpha)
        .collect();
    take_top_k(batch, positions, &batch.rewards, k)
}

/// Built-in weight functions for weighted majority voting.
///
/// Identity is the simplest monotone choice; its floor keeps weights positive
/// so that zero-reward responses still carry their frequency signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightFn {
    Identity,
}

impl WeightFn {
    pub fn eval(&self, reward: f64) -> f64 {
        match self {
            WeightFn::Identity => reward.max(WEIGHT_FLOOR),
        }
    }
}

impl fmt::Display for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFn::Identity => write!(f, "identity"),
        }
    }
}

/// Frequency threshold for Best-of-Majority.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSpec {
    /// Fixed threshold in (0, 1).
    Fixed(f64),
    /// Resolve against a target instance as `3 / (4 C*)`.
    Auto,
}

/// Which selection rule to run, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    MajorityVote,
    WeightedMajorityVote { weight: WeightFn },
    BestOfN,
    BestOfMajority { alpha: AlphaSpec },
}

impl StrategySpec {
    /// Parses a config string: `mv`, `wmv:w=identity`, `bon`,
    /// `bom:alpha=<float>` or `bom:alpha=auto`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadStrategySpec { spec: spec.into(), reason: reason.into() };
        match spec.trim() {
            "mv" => Ok(Self::MajorityVote),
            "wmv" | "wmv:w=identity" => Ok(Self::WeightedMajorityVote { weight: WeightFn::Identity }),
            "bon" => Ok(Self::BestOfN),
            s if s.starts_with("wmv:") => Err(bad("unknown weight function (supported: w=identity)")),
            s if s.starts_with("bom:alpha=") => {
                let value = &s["bom:alpha=".len()..];
                if value == "auto" {
                    return Ok(Self::BestOfMajority { alpha: AlphaSpec::Auto });
                }
                // `auto-frequency:f` pins alpha to f directly; used on
                // empirical data where the coverage is unknowable.
                let value = value.strip_prefix("auto-frequency:").unwrap_or(value);
                let alpha: f64 = value
                    .parse()
                    .map_err(|_| bad("alpha must be a float in (0, 1) or `auto`"))?;
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(bad("alpha must lie in (0, 1)"));
                }
                Ok(Self::BestOfMajority { alpha: AlphaSpec::Fixed(alpha) })
            }
            "bom" => Err(bad("bom requires alpha (bom:alpha=<float>|auto)")),
            _ => Err(bad("expected one of mv, wmv:w=identity, bon, bom:alpha=<float>|auto")),
        }
    }

    /// Parses a comma-separated list of config strings.
    pub fn parse_list(specs: &str) -> Result<Vec<Self>> {
        specs.split(',').map(|s| Self::parse(s.trim())).collect()
    }

    /// Replaces an `auto` threshold with `3 / (4 C*)` for `instance`.
    pub fn resolve(&self, instance: &Instance) -> Result<Self> {
        match self {
            Self::BestOfMajority { alpha: AlphaSpec::Auto } => {
                let coverage = instance.coverage()?;
                Ok(Self::BestOfMajority { alpha: AlphaSpec::Fixed(3.0 / (4.0 * coverage)) })
            }
            other => Ok(other.clone()),
        }
    }

    /// Runs the selection rule on one batch. `auto` thresholds must have been
    /// resolved against an instance first.
    pub fn select(&self, batch: &SampleBatch, k: usize) -> Result<Vec<usize>> {
        match self {
            Self::MajorityVote => Ok(select_majority(batch, k)),
            Self::WeightedMajorityVote { weight } => {
                Ok(select_weighted_majority(batch, k, |r| weight.eval(r)))
            }
            Self::BestOfN => Ok(select_bon(batch, k)),
            Self::BestOfMajority { alpha: AlphaSpec::Fixed(alpha) } => {
                Ok(select_bom(batch, k, *alpha))
            }
            Self::BestOfMajority { alpha: AlphaSpec::Auto } => Err(Error::Precondition(
                "bom alpha=auto must be resolved against an instance before selection".into(),
            )),
        }
    }

    /// Number of reward-label queries the rule issues on this batch.
    ///
    /// Majority voting never queries; weighted majority voting and Best-of-N
    /// label every distinct response; Best-of-Majority defers queries until
    /// after the frequency filter, which is where its saving comes from.
    pub fn reward_queries(&self, batch: &SampleBatch) -> Result<usize> {
        match self {
            Self::MajorityVote => Ok(0),
            Self::WeightedMajorityVote { .. } | Self::BestOfN => Ok(batch.distinct.len()),
            Self::BestOfMajority { alpha: AlphaSpec::Fixed(alpha) } => {
                Ok(batch.freq.iter().filter(|&&f| f >= *alpha).count())
            }
            Self::BestOfMajority { alpha: AlphaSpec::Auto } => Err(Error::Precondition(
                "bom alpha=auto must be resolved against an instance first".into(),
            )),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MajorityVote => write!(f, "mv"),
            Self::WeightedMajorityVote { weight } => write!(f, "wmv:w={weight}"),
            Self::BestOfN => write!(f, "bon"),
            Self::BestOfMajority { alpha: AlphaSpec::Auto } => write!(f, "bom:alpha=auto"),
            Self::BestOfMajority { alpha: AlphaSpec::Fixed(a) } => write!(f, "bom:alpha={a}"),
        }
    }
}
