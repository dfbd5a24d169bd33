//! Synthetic replication of a grouped-data classifier experiment.
//!
//! The pipeline mirrors a study design in which many short feature vectors
//! ("segments") are extracted per participant per interview question, a small
//! neural network scores each segment, scores are aggregated per question,
//! and cross-validation is run either respecting or ignoring the grouping of
//! segments by participant:
//!
//! - [`dataset`]: random-effects generator for the synthetic corpus.
//! - [`mlp`]: single-hidden-layer sigmoid classifier, full-batch gradient
//!   descent on cross-entropy.
//! - [`scoring`]: segment-score filtering, per-question aggregation, and
//!   participant-level classification.
//! - [`protocol`]: grouped leave-one-pair-out vs. segment-level k-fold
//!   evaluation, and the leakage comparison between them.

pub mod dataset;
pub mod mlp;
pub mod protocol;
pub mod scoring;

pub use dataset::{
    generate_synthetic_dataset, DatasetSpec, EthnicGroup, Gender, Label, Participant,
    SegmentVector, SyntheticDataset,
};
pub use mlp::{train_classifier, ClassifierModel, Hyperparams};
pub use protocol::{
    compare_protocols, evaluate_grouped_loo, evaluate_leaked, FoldAccuracy, Protocol,
    ProtocolGap, ProtocolSummary, DEFAULT_LEAKAGE_THRESHOLD_PP,
};
pub use scoring::{
    classify_participant, filter_and_average, score_question, ParticipantClassification,
    QuestionScore, ScoringConfig,
};

use thiserror::Error;

/// Errors from dataset generation, training, scoring, and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplicaError {
    /// A structurally impossible dataset or protocol request.
    #[error("invalid dataset spec: {0}")]
    InvalidSpec(String),
    /// A dataset CSV that does not match the expected layout.
    #[error("malformed dataset: {0}")]
    MalformedDataset(String),
    /// Training requires at least one segment of each class.
    #[error("degenerate training set: both classes must be present")]
    DegenerateTraining,
    /// An answer must contain at least one segment to be scored.
    #[error("cannot score an answer with no segments")]
    EmptyAnswer,
    /// Participant classification requires at least one decided question.
    #[error("all question scores were undecided")]
    AllUndecided,
    /// Grouped evaluation needs held-out and training members of each role.
    #[error("protocol requires at least {required} participants per role, found {found}")]
    InsufficientParticipants { required: usize, found: usize },
}
