//! Cross-validation protocols and the leakage comparison between them.
//!
//! Two evaluations share every component except the split unit:
//!
//! - [`evaluate_grouped_loo`] holds out one truthful and one deceptive
//!   participant per fold, **all** of their segments — the test person is
//!   genuinely unseen.
//! - [`evaluate_leaked`] splits at the segment level, stratified by label
//!   and ignoring the participant grouping, so every test segment has
//!   same-person siblings in training.
//!
//! Both report per-fold accuracy over (participant, question) groups in the
//! test set: a question counts as correct when its aggregated score decides
//! to the participant's role. [`compare_protocols`] then measures how much
//! the segment-level split inflates the mean and deflates the spread — the
//! signature of participant leakage.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

use super::{
    score_question, train_classifier, Hyperparams, Label, ReplicaError, ScoringConfig,
    SegmentVector, SyntheticDataset,
};
use crate::seeding::{derive_seed, rng_for, streams};

/// Which split unit an evaluation used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Protocol {
    /// Participant-grouped: one truthful + one deceptive person held out.
    GroupedLeavePairOut,
    /// Segment-level stratified k-fold, grouping ignored (leaky).
    LeakedSegmentKFold,
}

/// Per-class accuracy of one fold, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldAccuracy {
    /// 1-based fold number.
    pub fold: usize,
    pub truthful_pct: f64,
    pub deceptive_pct: f64,
    /// Decided (participant, question) groups behind each percentage.
    pub truthful_questions: usize,
    pub deceptive_questions: usize,
    /// Groups dropped because every segment score was filtered out.
    pub undecided_questions: usize,
    /// Decisions that hit the threshold exactly (resolved to deception).
    pub ties: usize,
}

/// All folds of one protocol plus their per-class mean and sample std.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolSummary {
    pub protocol: Protocol,
    pub folds: Vec<FoldAccuracy>,
    pub mean_truthful_pct: f64,
    pub mean_deceptive_pct: f64,
    pub std_truthful_pct: f64,
    pub std_deceptive_pct: f64,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n − 1 denominator); 0 for fewer than 2 values.
fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

impl ProtocolSummary {
    /// Aggregate folds; the means/stds are always recomputed from the folds.
    #[must_use]
    pub fn from_folds(protocol: Protocol, folds: Vec<FoldAccuracy>) -> Self {
        let t: Vec<f64> = folds.iter().map(|f| f.truthful_pct).collect();
        let d: Vec<f64> = folds.iter().map(|f| f.deceptive_pct).collect();
        Self {
            protocol,
            mean_truthful_pct: mean(&t),
            mean_deceptive_pct: mean(&d),
            std_truthful_pct: sample_std(&t),
            std_deceptive_pct: sample_std(&d),
            folds,
        }
    }
}

/// Score a fold's test groups and tally per-class question accuracy.
fn fold_accuracy(
    fold: usize,
    model: &super::ClassifierModel,
    test_groups: &[(Label, Vec<&SegmentVector>)],
    scoring: &ScoringConfig,
) -> Result<FoldAccuracy, ReplicaError> {
    let (mut t_correct, mut t_total) = (0usize, 0usize);
    let (mut d_correct, mut d_total) = (0usize, 0usize);
    let mut undecided = 0usize;
    let mut ties = 0usize;
    for (label, segments) in test_groups {
        let q = score_question(model, segments, scoring)?;
        let Some(value) = q.value else {
            undecided += 1;
            continue;
        };
        if scoring.is_tie(value) {
            ties += 1;
        }
        let correct = scoring.decide(value) == *label;
        match label {
            Label::Truth => {
                t_total += 1;
                t_correct += usize::from(correct);
            }
            Label::Deception => {
                d_total += 1;
                d_correct += usize::from(correct);
            }
        }
    }
    // A class with no decided groups scores 0 for the fold; the undecided
    // count preserves the evidence of why.
    let pct = |c: usize, n: usize| if n == 0 { 0.0 } else { 100.0 * c as f64 / n as f64 };
    Ok(FoldAccuracy {
        fold,
        truthful_pct: pct(t_correct, t_total),
        deceptive_pct: pct(d_correct, d_total),
        truthful_questions: t_total,
        deceptive_questions: d_total,
        undecided_questions: undecided,
        ties,
    })
}

/// Group `segments` by (participant, question), labelling each group.
fn group_by_answer<'a>(
    segments: impl IntoIterator<Item = &'a SegmentVector>,
) -> Vec<(Label, Vec<&'a SegmentVector>)> {
    let mut groups: BTreeMap<(usize, usize), (Label, Vec<&SegmentVector>)> = BTreeMap::new();
    for s in segments {
        groups
            .entry((s.participant_id, s.question))
            .or_insert_with(|| (s.label, Vec::new()))
            .1
            .push(s);
    }
    groups.into_values().collect()
}

fn validate_inputs(
    hyperparams: &Hyperparams,
    scoring: &ScoringConfig,
    folds: usize,
    max_folds: usize,
    what: &str,
) -> Result<(), ReplicaError> {
    hyperparams.validate()?;
    scoring.validate()?;
    if folds == 0 || folds > max_folds {
        return Err(ReplicaError::InvalidSpec(format!(
            "{what}: fold count {folds} not in 1..={max_folds}"
        )));
    }
    Ok(())
}

/// Grouped leave-one-pair-out evaluation.
///
/// Fold `i` holds out the i-th truthful and i-th deceptive participant (by
/// ascending id) and trains on everyone else. Folds train in parallel; each
/// fold's network seed derives from `(seed, fold)`, so the result does not
/// depend on scheduling.
pub fn evaluate_grouped_loo(
    dataset: &SyntheticDataset,
    hyperparams: &Hyperparams,
    scoring: &ScoringConfig,
    folds: usize,
    seed: u64,
) -> Result<ProtocolSummary, ReplicaError> {
    let truthful = dataset.ids_with_role(Label::Truth);
    let deceptive = dataset.ids_with_role(Label::Deception);
    let found = truthful.len().min(deceptive.len());
    if found < 2 {
        // One held out + at least one left to train on, per role.
        return Err(ReplicaError::InsufficientParticipants { required: 2, found });
    }
    validate_inputs(hyperparams, scoring, folds, found, "grouped evaluation")?;

    let fold_results: Vec<Result<FoldAccuracy, ReplicaError>> = (0..folds)
        .into_par_iter()
        .map(|f| {
            let held_t = truthful[f];
            let held_d = deceptive[f];
            let train: Vec<&SegmentVector> = dataset
                .segments
                .iter()
                .filter(|s| s.participant_id != held_t && s.participant_id != held_d)
                .collect();
            let model = train_classifier(
                &train,
                hyperparams,
                derive_seed(seed, streams::GROUPED_FOLD + f as u64),
            )?;
            let test_groups = group_by_answer(
                dataset
                    .segments
                    .iter()
                    .filter(|s| s.participant_id == held_t || s.participant_id == held_d),
            );
            fold_accuracy(f + 1, &model, &test_groups, scoring)
        })
        .collect();
    let folds_done = fold_results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ProtocolSummary::from_folds(
        Protocol::GroupedLeavePairOut,
        folds_done,
    ))
}

/// Segment-level stratified k-fold evaluation (deliberately leaky).
///
/// Segments are shuffled per label and cut into `folds` contiguous chunks;
/// fold `k` tests on its chunk pair and trains on everything else — including
/// the held-out participants' *other* segments. Reporting mirrors
/// [`evaluate_grouped_loo`]: per-fold accuracy over (participant, question)
/// groups present in the test chunk.
pub fn evaluate_leaked(
    dataset: &SyntheticDataset,
    hyperparams: &Hyperparams,
    scoring: &ScoringConfig,
    folds: usize,
    seed: u64,
) -> Result<ProtocolSummary, ReplicaError> {
    let mut truth_idx: Vec<usize> = Vec::new();
    let mut deception_idx: Vec<usize> = Vec::new();
    for (i, s) in dataset.segments.iter().enumerate() {
        match s.label {
            Label::Truth => truth_idx.push(i),
            Label::Deception => deception_idx.push(i),
        }
    }
    let max_folds = truth_idx.len().min(deception_idx.len());
    if folds < 2 {
        return Err(ReplicaError::InvalidSpec(
            "segment-level evaluation needs at least 2 folds".into(),
        ));
    }
    validate_inputs(hyperparams, scoring, folds, max_folds, "segment-level evaluation")?;

    let mut rng = rng_for(seed, streams::SHUFFLE);
    truth_idx.shuffle(&mut rng);
    deception_idx.shuffle(&mut rng);

    let chunk = |idx: &[usize], k: usize| -> Vec<usize> {
        let (n, f) = (idx.len(), folds);
        idx[k * n / f..(k + 1) * n / f].to_vec()
    };

    let fold_results: Vec<Result<FoldAccuracy, ReplicaError>> = (0..folds)
        .into_par_iter()
        .map(|k| {
            let mut in_test = vec![false; dataset.segments.len()];
            for &i in chunk(&truth_idx, k).iter().chain(&chunk(&deception_idx, k)) {
                in_test[i] = true;
            }
            let train: Vec<&SegmentVector> = dataset
                .segments
                .iter()
                .enumerate()
                .filter(|(i, _)| !in_test[*i])
                .map(|(_, s)| s)
                .collect();
            let model = train_classifier(
                &train,
                hyperparams,
                derive_seed(seed, streams::LEAKED_FOLD + k as u64),
            )?;
            let test_groups = group_by_answer(
                dataset
                    .segments
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| in_test[*i])
                    .map(|(_, s)| s),
            );
            fold_accuracy(k + 1, &model, &test_groups, scoring)
        })
        .collect();
    let folds_done = fold_results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ProtocolSummary::from_folds(
        Protocol::LeakedSegmentKFold,
        folds_done,
    ))
}

/// How far the segment-level numbers drift from the grouped ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolGap {
    /// Leaked mean minus grouped mean, percentage points.
    pub mean_inflation_truthful_pp: f64,
    pub mean_inflation_deceptive_pp: f64,
    /// Leaked std minus grouped std (negative = tighter spread).
    pub std_deflation_truthful_pp: f64,
    pub std_deflation_deceptive_pp: f64,
    /// Inflation above this flags leakage.
    pub threshold_pp: f64,
    pub leakage_flagged: bool,
}

/// Default flagging threshold for [`compare_protocols`], percentage points.
pub const DEFAULT_LEAKAGE_THRESHOLD_PP: f64 = 5.0;

/// Compare summaries produced on the same dataset and hyperparameters.
///
/// Leakage is flagged when the mean inflation of *either* class exceeds
/// `threshold_pp`.
#[must_use]
pub fn compare_protocols(
    grouped: &ProtocolSummary,
    leaked: &ProtocolSummary,
    threshold_pp: f64,
) -> ProtocolGap {
    let mean_inflation_truthful_pp = leaked.mean_truthful_pct - grouped.mean_truthful_pct;
    let mean_inflation_deceptive_pp = leaked.mean_deceptive_pct - grouped.mean_deceptive_pct;
    ProtocolGap {
        mean_inflation_truthful_pp,
        mean_inflation_deceptive_pp,
        std_deflation_truthful_pp: leaked.std_truthful_pct - grouped.std_truthful_pct,
        std_deflation_deceptive_pp: leaked.std_deceptive_pct - grouped.std_deceptive_pct,
        threshold_pp,
        leakage_flagged: mean_inflation_truthful_pp > threshold_pp
            || mean_inflation_deceptive_pp > threshold_pp,
    }
}
