//! Segment-score filtering, per-question aggregation, and participant-level
//! classification.
//!
//! Segment scores in the ambiguity band (`theta_lo`, `theta_hi`) — strictly
//! inside, endpoints survive — are discarded; the rest average into one score
//! per question. A question whose segments are all discarded is *undecided*
//! and drops out of later aggregation. Scores at or above
//! `decision_threshold` classify as deception; an exact hit is a tie, which
//! resolves to deception and is surfaced so callers can count how often the
//! rule fired.

use serde::{Deserialize, Serialize};

use super::{ClassifierModel, Label, ReplicaError, SegmentVector};

/// Filtering and decision thresholds.
///
/// Defaults leave the ambiguity band empty (`0.5, 0.5`) so every segment
/// score is retained, and decide at `0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub decision_threshold: f64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            theta_lo: 0.5,
            theta_hi: 0.5,
            decision_threshold: 0.5,
        }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<(), ReplicaError> {
        let ordered = 0.0 <= self.theta_lo && self.theta_lo <= self.theta_hi && self.theta_hi <= 1.0;
        let threshold_ok = (0.0..=1.0).contains(&self.decision_threshold);
        if ordered && threshold_ok {
            Ok(())
        } else {
            Err(ReplicaError::InvalidSpec(format!(
                "scoring thresholds must satisfy 0 <= theta_lo <= theta_hi <= 1 and \
                 0 <= decision_threshold <= 1 (got lo {}, hi {}, threshold {})",
                self.theta_lo, self.theta_hi, self.decision_threshold
            )))
        }
    }

    /// `true` when `score` falls strictly inside the ambiguity band.
    #[must_use]
    pub fn discards(&self, score: f64) -> bool {
        score > self.theta_lo && score < self.theta_hi
    }

    /// Threshold rule: at or above the decision threshold is deception.
    #[must_use]
    pub fn decide(&self, score: f64) -> Label {
        if score >= self.decision_threshold {
            Label::Deception
        } else {
            Label::Truth
        }
    }

    /// An exact threshold hit — resolved to deception by [`decide`](Self::decide).
    #[must_use]
    pub fn is_tie(&self, score: f64) -> bool {
        score == self.decision_threshold
    }
}

/// Aggregated score of one question.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuestionScore {
    /// Mean of retained segment scores; `None` when everything was filtered
    /// out (the question is undecided).
    pub value: Option<f64>,
    pub retained: usize,
    pub discarded: usize,
}

impl QuestionScore {
    #[must_use]
    pub fn is_undecided(&self) -> bool {
        self.value.is_none()
    }
}

/// Core aggregation rule on raw segment scores.
pub fn filter_and_average(
    scores: &[f64],
    config: &ScoringConfig,
) -> Result<QuestionScore, ReplicaError> {
    config.validate()?;
    if scores.is_empty() {
        return Err(ReplicaError::EmptyAnswer);
    }
    let retained: Vec<f64> = scores.iter().copied().filter(|s| !config.discards(*s)).collect();
    let discarded = scores.len() - retained.len();
    if retained.is_empty() {
        return Ok(QuestionScore {
            value: None,
            retained: 0,
            discarded,
        });
    }
    let mean = retained.iter().sum::<f64>() / retained.len() as f64;
    Ok(QuestionScore {
        value: Some(mean),
        retained: retained.len(),
        discarded,
    })
}

/// Score one answer: run the model over its segments, then filter-and-average.
///
/// The segments must belong to a single (participant, question) pair.
pub fn score_question(
    model: &ClassifierModel,
    segments: &[&SegmentVector],
    config: &ScoringConfig,
) -> Result<QuestionScore, ReplicaError> {
    if segments.is_empty() {
        return Err(ReplicaError::EmptyAnswer);
    }
    debug_assert!(
        segments
            .windows(2)
            .all(|w| w[0].participant_id == w[1].participant_id
                && w[0].question == w[1].question),
        "segments of one answer must share participant and question"
    );
    let scores: Vec<f64> = segments.iter().map(|s| model.predict(&s.features)).collect();
    filter_and_average(&scores, config)
}

/// Participant-level verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticipantClassification {
    pub label: Label,
    /// Mean of the decided question scores.
    pub mean_score: f64,
    pub decided_questions: usize,
    pub undecided_questions: usize,
    /// The mean hit the decision threshold exactly (resolved to deception).
    pub tie: bool,
}

/// Average the decided question scores and apply the threshold rule.
///
/// Undecided questions are excluded from the mean; if every question is
/// undecided the participant cannot be classified.
pub fn classify_participant(
    question_scores: &[QuestionScore],
    config: &ScoringConfig,
) -> Result<ParticipantClassification, ReplicaError> {
    config.validate()?;
    let decided: Vec<f64> = question_scores.iter().filter_map(|q| q.value).collect();
    if decided.is_empty() {
        return Err(ReplicaError::AllUndecided);
    }
    let mean = decided.iter().sum::<f64>() / decided.len() as f64;
    Ok(ParticipantClassification {
        label: config.decide(mean),
        mean_score: mean,
        decided_questions: decided.len(),
        undecided_questions: question_scores.len() - decided.len(),
        tie: config.is_tie(mean),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn band(lo: f64, hi: f64) -> ScoringConfig {
        ScoringConfig {
            theta_lo: lo,
            theta_hi: hi,
            decision_threshold: 0.5,
        }
    }

    #[test]
    fn averages_retained_scores() {
        let q = filter_and_average(&[0.9, 0.8, 0.95], &band(0.4, 0.6)).unwrap();
        assert_abs_diff_eq!(q.value.unwrap(), 0.8833333333333334, epsilon = 1e-12);
        assert_eq!((q.retained, q.discarded), (3, 0));
    }

    #[test]
    fn band_is_open_endpoints_survive() {
        let q = filter_and_average(&[0.4, 0.5, 0.6], &band(0.4, 0.6)).unwrap();
        // 0.5 is strictly inside and discarded; the endpoints are kept.
        assert_eq!((q.retained, q.discarded), (2, 1));
        assert_abs_diff_eq!(q.value.unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_band_filters_nothing() {
        let q = filter_and_average(&[0.1, 0.5, 0.9], &band(0.5, 0.5)).unwrap();
        assert_eq!((q.retained, q.discarded), (3, 0));
    }

    #[test]
    fn all_discarded_is_undecided_not_an_error() {
        let q = filter_and_average(&[0.5, 0.45, 0.55], &band(0.4, 0.6)).unwrap();
        assert!(q.is_undecided());
        assert_eq!((q.retained, q.discarded), (0, 3));
    }

    #[test]
    fn empty_answer_is_an_error() {
        assert_eq!(
            filter_and_average(&[], &band(0.4, 0.6)),
            Err(ReplicaError::EmptyAnswer)
        );
    }

    #[test]
    fn invalid_bands_are_rejected() {
        assert!(filter_and_average(&[0.5], &band(0.7, 0.3)).is_err());
        assert!(filter_and_average(&[0.5], &band(-0.1, 0.5)).is_err());
        let bad_threshold = ScoringConfig {
            decision_threshold: 1.5,
            ..ScoringConfig::default()
        };
        assert!(bad_threshold.validate().is_err());
    }

    #[test]
    fn participant_means_decided_questions_and_breaks_ties_toward_deception() {
        let qs = [
            QuestionScore { value: Some(0.6), retained: 3, discarded: 0 },
            QuestionScore { value: Some(0.4), retained: 2, discarded: 1 },
            QuestionScore { value: None, retained: 0, discarded: 3 },
        ];
        let c = classify_participant(&qs, &band(0.4, 0.6)).unwrap();
        // Mean of {0.6, 0.4} lands exactly on the threshold.
        assert_eq!(c.mean_score, 0.5);
        assert_eq!(c.label, Label::Deception);
        assert!(c.tie);
        assert_eq!((c.decided_questions, c.undecided_questions), (2, 1));
    }

    #[test]
    fn clear_majorities_classify_without_ties() {
        let truthful = [
            QuestionScore { value: Some(0.2), retained: 5, discarded: 0 },
            QuestionScore { value: Some(0.3), retained: 5, discarded: 0 },
        ];
        let c = classify_participant(&truthful, &band(0.4, 0.6)).unwrap();
        assert_eq!(c.label, Label::Truth);
        assert!(!c.tie);
    }

    #[test]
    fn all_undecided_participant_is_an_error() {
        let qs = [
            QuestionScore { value: None, retained: 0, discarded: 4 },
            QuestionScore { value: None, retained: 0, discarded: 2 },
        ];
        assert_eq!(
            classify_participant(&qs, &band(0.4, 0.6)),
            Err(ReplicaError::AllUndecided)
        );
    }
}
