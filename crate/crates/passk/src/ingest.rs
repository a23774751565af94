//! Scoring the selection strategies on pre-sampled trajectory logs.
//!
//! The input is line-delimited JSON, one trajectory per line, already
//! clustered into answer-equivalence groups (`group_id`). Per prompt, group
//! frequency stands in for the reference probability and the mean group
//! reward for the reward-model score; the strategies then run unchanged on
//! that synthesized batch, and a prompt scores 1 when any selected group is
//! correct.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategies::{SampleBatch, StrategySpec};

/// One sampled trajectory, pre-verified and pre-clustered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub prompt_id: String,
    /// Answer-equivalence class the trajectory belongs to.
    pub group_id: String,
    /// Reward-model score in [0, 1].
    pub reward: f64,
    /// Ground-truth verifier outcome for the group's answer.
    pub is_correct: bool,
}

/// Aggregated view of one answer group within a prompt.
#[derive(Debug, Clone, PartialEq)]
pub struct AnswerGroup {
    pub group_id: String,
    pub count: usize,
    /// count / total trajectories for the prompt.
    pub freq: f64,
    /// Arithmetic mean of the group's trajectory rewards.
    pub mean_reward: f64,
    pub is_correct: bool,
}

fn field_err(line: usize, reason: String) -> Error {
    Error::Ingest { line, reason }
}

fn parse_line(text: &str, line: usize) -> Result<TrajectoryRecord> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| field_err(line, format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| field_err(line, "expected a JSON object".into()))?;

    let get = |name: &str| {
        obj.get(name)
            .ok_or_else(|| field_err(line, format!("missing field `{name}`")))
    };
    let prompt_id = get("prompt_id")?
        .as_str()
        .ok_or_else(|| field_err(line, "field `prompt_id` must be a string".into()))?
        .to_string();
    let group_id = get("group_id")?
        .as_str()
        .ok_or_else(|| field_err(line, "field `group_id` must be a string".into()))?
        .to_string();
    let reward = get("reward")?
        .as_f64()
        .ok_or_else(|| field_err(line, "field `reward` must be a number".into()))?;
    let is_correct = get("is_correct")?
        .as_bool()
        .ok_or_else(|| field_err(line, "field `is_correct` must be a boolean".into()))?;

    if !(0.0..=1.0).contains(&reward) {
        return Err(field_err(line, format!("reward {reward} outside [0, 1]")));
    }
    Ok(TrajectoryRecord { prompt_id, group_id, reward, is_correct })
}

/// Loads a trajectory log, grouping records by prompt in file order.
///
/// Blank lines are ignored. Any malformed line fails the whole load with its
/// 1-based line number.
pub fn load_records(path: impl AsRef<Path>) -> Result<IndexMap<String, Vec<TrajectoryRecord>>> {
    let text = std::fs::read_to_string(path)?;
    let mut prompts: IndexMap<String, Vec<TrajectoryRecord>> = IndexMap::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let record = parse_line(raw, idx + 1)?;
        prompts.entry(record.prompt_id.clone()).or_default().push(record);
    }
    Ok(prompts)
}

/// Collapses one prompt's records into answer groups, in first-appearance
/// order. Fails if a group mixes correctness labels.
pub fn build_groups(records: &[TrajectoryRecord]) -> Result<Vec<AnswerGroup>> {
    let Some(first) = records.first() else {
        return Err(Error::Precondition("build_groups needs a nonempty record list".into()));
    };
    let total = records.len();

    struct Accumulator {
        count: usize,
        reward_sum: f64,
        is_correct: bool,
    }
    let mut acc: IndexMap<&str, Accumulator> = IndexMap::new();
    for record in records {
        debug_assert_eq!(record.prompt_id, first.prompt_id);
        match acc.entry(record.group_id.as_str()) {
            indexmap::map::Entry::Occupied(mut entry) => {
                let slot = entry.get_mut();
                if slot.is_correct != record.is_correct {
                    return Err(Error::InconsistentCorrectness {
                        prompt: record.prompt_id.clone(),
                        group: record.group_id.clone(),
                    });
                }
                slot.count += 1;
                slot.reward_sum += record.reward;
            }
            indexmap::map::Entry::Vacant(entry) => {
                entry.insert(Accumulator {
                    count: 1,
                    reward_sum: record.reward,
                    is_correct: record.is_correct,
                });
            }
        }
    }

    Ok(acc
        .into_iter()
        .map(|(group_id, a)| AnswerGroup {
            group_id: group_id.to_string(),
            count: a.count,
            freq: a.count as f64 / total as f64,
            mean_reward: a.reward_sum / a.count as f64,
            is_correct: a.is_correct,
        })
        .collect())
}

/// Pass@k scoring output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccuracyReport {
    /// Fraction of scored prompts where some selected group was correct.
    pub accuracy: f64,
    pub prompts_scored: usize,
    /// Prompts skipped for having no records.
    pub prompts_skipped: usize,
}

/// Synthesizes the strategy's batch view from one prompt's groups: group
/// frequency as the empirical distribution, mean group reward as the label.
fn batch_from_groups(groups: &[AnswerGroup]) -> SampleBatch {
    let total: usize = groups.iter().map(|g| g.count).sum();
    let counts: Vec<usize> = groups.iter().map(|g| g.count).collect();
    SampleBatch::from_counts(&counts, total, |idx| groups[idx].mean_reward)
}

/// Runs `strategy` on every prompt and scores 1 when any selected group is
/// correct; returns the mean over scored prompts.
///
/// Prompts with zero groups are skipped and counted. The strategy's threshold
/// must be explicit (a fixed alpha): coverage is unknowable on real data, so
/// `auto` has nothing to resolve against.
pub fn passk_accuracy(
    prompt_groups: &[Vec<AnswerGroup>],
    strategy: &StrategySpec,
    k: usize,
) -> Result<AccuracyReport> {
    if k == 0 {
        return Err(Error::Precondition("passk_accuracy needs k >= 1".into()));
    }
    let mut correct: u64 = 0;
    let mut scored: usize = 0;
    let mut skipped: usize = 0;
    for groups in prompt_groups {
        if groups.is_empty() {
            skipped += 1;
            continue;
        }
        let batch = batch_from_groups(groups);
        let selection = strategy.select(&batch, k)?;
        if selection.iter().any(|&idx| groups[idx].is_correct) {
            correct += 1;
        }
        scored += 1;
    }
    let accuracy = if scored == 0 { 0.0 } else { correct as f64 / scored as f64 };
    Ok(AccuracyReport { accuracy, prompts_scored: scored, prompts_skipped: skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::AlphaSpec;
    use std::io::Write;

    fn record(prompt: &str, group: &str, reward: f64, is_correct: bool) -> TrajectoryRecord {
        TrajectoryRecord {
            prompt_id: prompt.into(),
            group_id: group.into(),
            reward,
            is_correct,
        }
    }

    fn write_log(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        for line in lines {
            writeln!(file, "{line}").unwrap();
        }
        file
    }

    #[test]
    fn empty_file_loads_empty_map() {
        let file = write_log(&[]);
        assert!(load_records(file.path()).unwrap().is_empty());
    }

    #[test]
    fn single_record_loads() {
        let file = write_log(&[r#"{"prompt_id":"p1","group_id":"g1","reward":0.5,"is_correct":true}"#]);
        let prompts = load_records(file.path()).unwrap();
        assert_eq!(prompts.len(), 1);
        assert_eq!(prompts["p1"].len(), 1);
        assert_eq!(prompts["p1"][0], record("p1", "g1", 0.5, true));
    }

    #[test]
    fn out_of_range_reward_reports_line() {
        let file = write_log(&[
            r#"{"prompt_id":"p1","group_id":"g1","reward":0.5,"is_correct":true}"#,
            r#"{"prompt_id":"p1","group_id":"g2","reward":1.3,"is_correct":false}"#,
        ]);
        match load_records(file.path()).unwrap_err() {
            Error::Ingest { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("1.3"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_field_is_named() {
        let file = write_log(&[r#"{"prompt_id":"p1","group_id":"g1","reward":0.5}"#]);
        match load_records(file.path()).unwrap_err() {
            Error::Ingest { line, reason } => {
                assert_eq!(line, 1);
                assert_eq!(reason, "missing field `is_correct`");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_line() {
        let file = write_log(&["{not json"]);
        assert!(matches!(load_records(file.path()).unwrap_err(), Error::Ingest { line: 1, .. }));
    }

    #[test]
    fn groups_aggregate_counts_and_rewards() {
        let records = vec![
            record("p", "g1", 0.8, true),
            record("p", "g2", 0.9, false),
            record("p", "g1", 0.6, true),
        ];
        let groups = build_groups(&records).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].group_id, "g1");
        assert_eq!(groups[0].count, 2);
        assert!((groups[0].freq - 2.0 / 3.0).abs() < 1e-15);
        assert!((groups[0].mean_reward - 0.7).abs() < 1e-15);
        assert_eq!(groups[1].count, 1);
        assert!((groups[1].freq - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(groups[1].mean_reward, 0.9);
    }

    #[test]
    fn single_group_gets_full_frequency() {
        let groups = build_groups(&[record("p", "g", 0.4, true)]).unwrap();
        assert_eq!(groups[0].freq, 1.0);
        assert_eq!(groups[0].mean_reward, 0.4);
    }

    #[test]
    fn conflicting_correctness_is_rejected() {
        let records = vec![record("p", "g", 0.5, true), record("p", "g", 0.5, false)];
        assert!(matches!(
            build_groups(&records).unwrap_err(),
            Error::InconsistentCorrectness { .. }
        ));
    }

    #[test]
    fn small_support_scores_any_correct_group() {
        let groups = build_groups(&[
            record("p", "wrong", 0.9, false),
            record("p", "right", 0.1, true),
        ])
        .unwrap();
        let report = passk_accuracy(&[groups], &StrategySpec::MajorityVote, 5).unwrap();
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn bom_filtering_everything_scores_zero() {
        let groups = build_groups(&[
            record("p", "a", 0.9, true),
            record("p", "b", 0.8, false),
        ])
        .unwrap();
        let all_filtered = StrategySpec::BestOfMajority { alpha: AlphaSpec::Fixed(0.9) };
        let report = passk_accuracy(&[groups], &all_filtered, 1).unwrap();
        assert_eq!(report.accuracy, 0.0);
    }

    #[test]
    fn frequency_filter_beats_raw_frequency_on_constructed_prompt() {
        // Most frequent group is wrong; a frequent-enough high-reward group is
        // right; a rare high-reward group would bait pure reward ranking.
        let mut records = Vec::new();
        for _ in 0..5 {
            records.push(record("p", "popular-wrong", 0.3, false));
        }
        for _ in 0..3 {
            records.push(record("p", "backed-right", 0.8, true));
        }
        records.push(record("p", "rare-bait", 0.9, false));
        let groups = build_groups(&records).unwrap();
        let prompts = vec![groups];

        let mv = passk_accuracy(&prompts, &StrategySpec::MajorityVote, 1).unwrap();
        assert_eq!(mv.accuracy, 0.0);

        let bom = StrategySpec::BestOfMajority { alpha: AlphaSpec::Fixed(0.2) };
        let report = passk_accuracy(&prompts, &bom, 1).unwrap();
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn auto_alpha_is_rejected_on_empirical_data() {
        let groups = build_groups(&[record("p", "g", 0.4, true)]).unwrap();
        let auto = StrategySpec::BestOfMajority { alpha: AlphaSpec::Auto };
        assert!(passk_accuracy(&[groups], &auto, 1).is_err());
    }

    #[test]
    fn empty_prompts_are_skipped_and_counted() {
        let groups = build_groups(&[record("p", "g", 0.4, true)]).unwrap();
        let report = passk_accuracy(&[vec![], groups], &StrategySpec::BestOfN, 1).unwrap();
        assert_eq!(report.prompts_scored, 1);
        assert_eq!(report.prompts_skipped, 1);
        assert_eq!(report.accuracy, 1.0);
    }
}
