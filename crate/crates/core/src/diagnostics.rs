//! Construct checks for grouped classification data.
//!
//! Three quantities summarize how much independent evidence a
//! segment-level dataset really carries:
//!
//! - a dimensionality check comparing feature count against the number of
//!   training participants (more tunable directions than people means the
//!   network can separate the classes by memorizing who is who);
//! - the average within-participant intraclass correlation of the feature
//!   columns, estimated with a one-way random-effects ANOVA;
//! - the effective sample size that correlation leaves behind — clustered
//!   segments count for far less than their raw number.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::replica::SyntheticDataset;

/// Participants removed from training by the grouped evaluation protocol
/// (one truthful, one deceptive).
pub const GROUPED_HOLDOUT: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error("intraclass correlation needs at least 2 groups, found {0}")]
    TooFewGroups(usize),
    #[error("group {0} has fewer than 2 segments")]
    UndersizedGroup(usize),
    #[error("every feature is constant, so intraclass correlation is undefined")]
    ConstantFeatures,
    #[error("holding out {held_out} of {total} participants leaves nothing to train on")]
    NoTrainingGroups { held_out: usize, total: usize },
}

/// Feature count versus training-group count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodCheck {
    /// True when there are at least as many features as training groups.
    pub flagged: bool,
    /// Features per training group.
    pub ratio: f64,
}

/// Flag model capacities that can separate training people outright.
///
/// # Panics
/// Panics if `n_training_groups` is zero.
#[must_use]
pub fn curse_of_dimensionality_check(n_features: usize, n_training_groups: usize) -> CodCheck {
    assert!(n_training_groups > 0, "need at least one training group");
    CodCheck {
        flagged: n_features >= n_training_groups,
        ratio: n_features as f64 / n_training_groups as f64,
    }
}

/// Average one-way ANOVA intraclass correlation across feature columns.
///
/// `rows` holds `(group_id, features)` pairs; groups may differ in size
/// (the balanced-design formula uses the mean group size). Each feature's
/// coefficient is `(MSB - MSW) / (MSB + (m - 1) MSW)` clamped to `[-1, 1]`;
/// a feature that is exactly constant within every group scores 1, and a
/// feature that is constant everywhere is skipped as uninformative. Group
/// means are computed in a first pass so that identical segments yield an
/// exact zero within-group sum of squares.
pub fn intraclass_correlation(rows: &[(usize, &[f64])]) -> Result<f64, DiagnosticsError> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for (group, _) in rows {
        *counts.entry(*group).or_default() += 1;
    }
    let k = counts.len();
    if k < 2 {
        return Err(DiagnosticsError::TooFewGroups(k));
    }
    if let Some((&group, _)) = counts.iter().find(|(_, &c)| c < 2) {
        return Err(DiagnosticsError::UndersizedGroup(group));
    }
    let n = rows.len();
    let n_features = rows[0].1.len();
    debug_assert!(rows.iter().all(|(_, f)| f.len() == n_features));
    let mean_group_size = n as f64 / k as f64;

    let mut total = 0.0;
    let mut informative = 0usize;
    for j in 0..n_features {
        let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
        let mut grand_sum = 0.0;
        for (group, features) in rows {
            *sums.entry(*group).or_default() += features[j];
            grand_sum += features[j];
        }
        let grand_mean = grand_sum / n as f64;
        let means: BTreeMap<usize, f64> =
            sums.iter().map(|(g, s)| (*g, s / counts[g] as f64)).collect();

        let between: f64 = means
            .iter()
            .map(|(g, m)| counts[g] as f64 * (m - grand_mean) * (m - grand_mean))
            .sum();
        let within: f64 = rows
            .iter()
            .map(|(group, features)| {
                let d = features[j] - means[group];
                d * d
            })
            .sum();
        let ms_between = between / (k - 1) as f64;
        let ms_within = within / (n - k) as f64;

        if ms_between == 0.0 && ms_within == 0.0 {
            continue; // constant feature carries no grouping information
        }
        let icc = if ms_within == 0.0 {
            1.0
        } else {
            ((ms_between - ms_within) / (ms_between + (mean_group_size - 1.0) * ms_within))
                .clamp(-1.0, 1.0)
        };
        total += icc;
        informative += 1;
    }
    if informative == 0 {
        return Err(DiagnosticsError::ConstantFeatures);
    }
    Ok(total / informative as f64)
}

/// Effective number of independent observations among `n_segments` clustered
/// into `n_groups` with average within-group correlation `icc`.
///
/// Uses the design-effect formula `n / (1 + (m - 1) icc)` with `m` the mean
/// group size. Non-positive correlation returns `n_segments` exactly; full
/// correlation returns `n_groups` exactly.
///
/// # Panics
/// Panics if `n_groups` is zero or exceeds `n_segments`.
#[must_use]
pub fn effective_sample_size(n_segments: usize, n_groups: usize, icc: f64) -> f64 {
    assert!(
        n_groups > 0 && n_groups <= n_segments,
        "need 1..=n_segments groups"
    );
    let n = n_segments as f64;
    if icc <= 0.0 {
        return n;
    }
    if icc >= 1.0 {
        return n_groups as f64;
    }
    let mean_group_size = n / n_groups as f64;
    n / (1.0 + (mean_group_size - 1.0) * icc)
}

/// Everything [`diagnose`] measures, ready for serialization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub n_segments: usize,
    pub n_participants: usize,
    pub n_features: usize,
    pub held_out_participants: usize,
    pub training_participants: usize,
    pub dimensionality: CodCheck,
    pub intraclass_correlation: f64,
    pub effective_sample_size: f64,
    pub notes: Vec<String>,
}

/// Run every construct check against a dataset.
///
/// `held_out` is the number of participants the evaluation protocol removes
/// from training (use [`GROUPED_HOLDOUT`] for the paired protocol); both the
/// dimensionality ratio and the effective sample size are reported against
/// the remaining training participants.
pub fn diagnose(
    dataset: &SyntheticDataset,
    held_out: usize,
) -> Result<DiagnosticReport, DiagnosticsError> {
    let n_participants = dataset.participants.len();
    if held_out >= n_participants {
        return Err(DiagnosticsError::NoTrainingGroups {
            held_out,
            total: n_participants,
        });
    }
    let training_participants = n_participants - held_out;
    let rows = dataset.grouped_rows();
    let icc = intraclass_correlation(&rows)?;
    let n_features = dataset.n_features();
    let dimensionality = curse_of_dimensionality_check(n_features, training_participants);
    let ess = effective_sample_size(rows.len(), training_participants, icc);

    let mut notes = vec![format!(
        "{} features against {} training participants (ratio {:.2})",
        n_features, training_participants, dimensionality.ratio
    )];
    if dimensionality.flagged {
        notes.push(
            "at least as many feature dimensions as training participants: \
             the classes can be separated by memorizing individuals"
                .to_string(),
        );
    }
    notes.push(format!(
        "within-participant correlation {:.3} shrinks {} segments to an \
         effective sample of about {:.0}",
        icc,
        rows.len(),
        ess
    ));

    Ok(DiagnosticReport {
        n_segments: rows.len(),
        n_participants,
        n_features,
        held_out_participants: held_out,
        training_participants,
        dimensionality,
        intraclass_correlation: icc,
        effective_sample_size: ess,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replica::{generate_synthetic_dataset, DatasetSpec};
    use approx::assert_abs_diff_eq;

    fn rows_of(groups: &[(usize, [f64; 1])]) -> Vec<(usize, &[f64])> {
        groups.iter().map(|(g, f)| (*g, &f[..])).collect()
    }

    #[test]
    fn matches_hand_computed_anova() {
        // Groups {1,2,3} and {5,6,7}: MSB = 24, MSW = 1, mean size 3,
        // so the coefficient is 23/26 and six segments act like 2.17.
        let data = [
            (0, [1.0]),
            (0, [2.0]),
            (0, [3.0]),
            (1, [5.0]),
            (1, [6.0]),
            (1, [7.0]),
        ];
        let icc = intraclass_correlation(&rows_of(&data)).unwrap();
        assert_abs_diff_eq!(icc, 23.0 / 26.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            effective_sample_size(6, 2, icc),
            2.1666666666666665,
            epsilon = 1e-12
        );
    }

    #[test]
    fn identical_segments_within_groups_give_exactly_one() {
        let data = [(0, [4.0]), (0, [4.0]), (1, [9.0]), (1, [9.0])];
        assert_eq!(intraclass_correlation(&rows_of(&data)).unwrap(), 1.0);
        assert_eq!(effective_sample_size(4, 2, 1.0), 2.0);
    }

    #[test]
    fn effective_sample_size_endpoints_are_exact() {
        assert_eq!(effective_sample_size(1000, 10, 0.0), 1000.0);
        assert_eq!(effective_sample_size(1000, 10, -0.3), 1000.0);
        assert_eq!(effective_sample_size(1000, 10, 1.0), 10.0);
        assert_eq!(effective_sample_size(1000, 10, 1.5), 10.0);
        // Reference scenario: half-correlated segments from 30 people.
        assert_abs_diff_eq!(
            effective_sample_size(86_586, 30, 0.5),
            59.97921862011638,
            epsilon = 1e-9
        );
    }

    #[test]
    fn recovers_the_generative_correlation() {
        // person² / (person² + noise²) = 0.5; the constant-per-person tag
        // column contributes a coefficient of 1, so the feature average
        // lands at (37 rho + 1) / 38 for 38 columns.
        let spec = DatasetSpec {
            n_participants: 32,
            n_deceptive: 16,
            n_features: 38,
            n_questions: 2,
            target_total_vectors: 32 * 2 * 100,
            person_effect_scale: 1.0,
            class_effect_scale: 0.0,
            noise_scale: 1.0,
            seed: 5,
        };
        let ds = generate_synthetic_dataset(&spec).unwrap();
        let icc = intraclass_correlation(&ds.grouped_rows()).unwrap();
        let expected = (37.0 * 0.5 + 1.0) / 38.0;
        assert_abs_diff_eq!(icc, expected, epsilon = 0.05);
    }

    #[test]
    fn pure_noise_has_near_zero_correlation() {
        let spec = DatasetSpec {
            n_participants: 32,
            n_deceptive: 16,
            n_features: 38,
            n_questions: 2,
            target_total_vectors: 32 * 2 * 100,
            person_effect_scale: 0.0,
            class_effect_scale: 0.0,
            noise_scale: 1.0,
            seed: 6,
        };
        let ds = generate_synthetic_dataset(&spec).unwrap();
        let icc = intraclass_correlation(&ds.grouped_rows()).unwrap();
        // Only the tag column (coefficient 1 over 38 features) should remain.
        assert_abs_diff_eq!(icc, 0.0, epsilon = 0.05);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let one_group = [(0, [1.0]), (0, [2.0])];
        assert_eq!(
            intraclass_correlation(&rows_of(&one_group)),
            Err(DiagnosticsError::TooFewGroups(1))
        );
        let lonely = [(0, [1.0]), (0, [2.0]), (7, [3.0])];
        assert_eq!(
            intraclass_correlation(&rows_of(&lonely)),
            Err(DiagnosticsError::UndersizedGroup(7))
        );
        let constant = [(0, [3.0]), (0, [3.0]), (1, [3.0]), (1, [3.0])];
        assert_eq!(
            intraclass_correlation(&rows_of(&constant)),
            Err(DiagnosticsError::ConstantFeatures)
        );
    }

    #[test]
    fn dimensionality_check_uses_a_weak_inequality() {
        let wide = curse_of_dimensionality_check(38, 30);
        assert!(wide.flagged);
        assert_abs_diff_eq!(wide.ratio, 38.0 / 30.0, epsilon = 1e-15);
        assert!(!curse_of_dimensionality_check(10, 30).flagged);
        assert!(curse_of_dimensionality_check(30, 30).flagged);
    }

    #[test]
    fn diagnose_assembles_a_full_report() {
        let spec = DatasetSpec {
            n_participants: 8,
            n_deceptive: 4,
            n_features: 10,
            n_questions: 2,
            target_total_vectors: 8 * 2 * 20,
            person_effect_scale: 1.0,
            class_effect_scale: 0.5,
            noise_scale: 0.5,
            seed: 9,
        };
        let ds = generate_synthetic_dataset(&spec).unwrap();
        let report = diagnose(&ds, GROUPED_HOLDOUT).unwrap();
        assert_eq!(report.n_participants, 8);
        assert_eq!(report.training_participants, 6);
        assert_eq!(report.n_features, 10);
        assert_eq!(report.n_segments, ds.segments.len());
        assert!(report.dimensionality.flagged);
        assert!(report.intraclass_correlation > 0.5);
        assert!(report.effective_sample_size < report.n_segments as f64 / 10.0);
        assert!(report.notes.len() >= 2);

        assert_eq!(
            diagnose(&ds, 8),
            Err(DiagnosticsError::NoTrainingGroups { held_out: 8, total: 8 })
        );
    }
}
