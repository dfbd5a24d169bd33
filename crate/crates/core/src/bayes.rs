//! Posterior analysis of a binary screening test.
//!
//! A test is characterized by its sensitivity P(+|condition) and specificity
//! P(−|no condition). Everything else here — joint outcome probabilities,
//! predictive values, break-even prevalence, sweeps, event trees — is exact
//! arithmetic on those two numbers and a prior. Probabilities are plain
//! fractions throughout; conversion to percent happens only in rendering.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from posterior arithmetic and input validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BayesError {
    /// A quantity that must be a probability fell outside `[0, 1]`.
    #[error("{name} must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    /// The posterior conditions on an event of probability zero.
    #[error("posterior is undefined: P({event}) = 0")]
    UndefinedPosterior { event: &'static str },
    /// Target predictive value for the break-even search must be in (0, 1).
    #[error("target PPV must lie strictly between 0 and 1, got {0}")]
    TargetOutOfRange(f64),
    /// No prior in (0, 1) attains the requested predictive value.
    #[error("no prior attains the target PPV: {0}")]
    UnreachableTarget(&'static str),
    /// A prevalence grid must be non-empty, strictly increasing, within [0, 1].
    #[error("prior grid must be non-empty, strictly increasing, and within [0, 1]")]
    InvalidGrid,
}

// ───────────────────────── test characteristics ─────────────────────────

fn check_probability(name: &'static str, value: f64) -> Result<f64, BayesError> {
    // NaN fails the containment check and is rejected with the same message.
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(BayesError::ProbabilityOutOfRange { name, value })
    }
}

/// Sensitivity/specificity pair plus display labels for the two conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestCharacteristics {
    /// P(test positive | condition present).
    pub sensitivity: f64,
    /// P(test negative | condition absent).
    pub specificity: f64,
    /// Label for the condition-present class (default "Lie").
    pub label_positive: String,
    /// Label for the condition-absent class (default "No-lie").
    pub label_negative: String,
}

impl TestCharacteristics {
    /// Validated constructor with the default class labels.
    pub fn new(sensitivity: f64, specificity: f64) -> Result<Self, BayesError> {
        Ok(Self {
            sensitivity: check_probability("sensitivity", sensitivity)?,
            specificity: check_probability("specificity", specificity)?,
            label_positive: "Lie".to_owned(),
            label_negative: "No-lie".to_owned(),
        })
    }

    /// Same, with caller-supplied class labels.
    pub fn with_labels(
        sensitivity: f64,
        specificity: f64,
        label_positive: impl Into<String>,
        label_negative: impl Into<String>,
    ) -> Result<Self, BayesError> {
        let mut t = Self::new(sensitivity, specificity)?;
        t.label_positive = label_positive.into();
        t.label_negative = label_negative.into();
        Ok(t)
    }

    /// P(test positive | condition absent) = 1 − specificity.
    #[must_use]
    pub fn false_positive_rate(&self) -> f64 {
        1.0 - self.specificity
    }

    /// P(test negative | condition present) = 1 − sensitivity.
    #[must_use]
    pub fn false_negative_rate(&self) -> f64 {
        1.0 - self.sensitivity
    }
}

/// Prevalence (prior probability of the condition), guaranteed in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Prevalence(f64);

impl Prevalence {
    pub fn new(p: f64) -> Result<Self, BayesError> {
        Ok(Self(check_probability("prior", p)?))
    }

    #[must_use]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Prevalence {
    type Error = BayesError;
    fn try_from(p: f64) -> Result<Self, BayesError> {
        Self::new(p)
    }
}

// ─────────────────────────── joint outcomes ───────────────────────────

/// The four joint probabilities P(outcome ∧ condition); they sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointOutcomeMatrix {
    /// P(test + ∧ condition present) = sensitivity · prior.
    pub true_positive: f64,
    /// P(test + ∧ condition absent) = (1 − specificity) · (1 − prior).
    pub false_positive: f64,
    /// P(test − ∧ condition present) = (1 − sensitivity) · prior.
    pub false_negative: f64,
    /// P(test − ∧ condition absent) = specificity · (1 − prior).
    pub true_negative: f64,
}

impl JointOutcomeMatrix {
    /// Marginal probability of a positive test.
    #[must_use]
    pub fn p_positive(&self) -> f64 {
        self.true_positive + self.false_positive
    }

    /// Marginal probability of a negative test.
    #[must_use]
    pub fn p_negative(&self) -> f64 {
        self.false_negative + self.true_negative
    }
}

/// Joint outcome probabilities of `test` at prior `prior`.
#[must_use]
pub fn joint_matrix(test: &TestCharacteristics, prior: Prevalence) -> JointOutcomeMatrix {
    let p = prior.value();
    let q = 1.0 - p;
    JointOutcomeMatrix {
        true_positive: test.sensitivity * p,
        false_positive: test.false_positive_rate() * q,
        false_negative: test.false_negative_rate() * p,
        true_negative: test.specificity * q,
    }
}

/// P(condition present | test positive). Undefined when P(+) = 0.
pub fn positive_predictive_value(
    test: &TestCharacteristics,
    prior: Prevalence,
) -> Result<f64, BayesError> {
    let m = joint_matrix(test, prior);
    let p_pos = m.p_positive();
    if p_pos == 0.0 {
        return Err(BayesError::UndefinedPosterior {
            event: "positive test result",
        });
    }
    Ok(m.true_positive / p_pos)
}

/// P(condition absent | test negative). Undefined when P(−) = 0.
pub fn negative_predictive_value(
    test: &TestCharacteristics,
    prior: Prevalence,
) -> Result<f64, BayesError> {
    let m = joint_matrix(test, prior);
    let p_neg = m.p_negative();
    if p_neg == 0.0 {
        return Err(BayesError::UndefinedPosterior {
            event: "negative test result",
        });
    }
    Ok(m.true_negative / p_neg)
}

// ───────────────────────── break-even prevalence ─────────────────────────

/// Smallest prior at which the test's PPV reaches `target_ppv`.
///
/// Closed form: solving PPV(p) = t gives
/// `p = t·fpr / (sensitivity·(1 − t) + t·fpr)`.
///
/// With a zero false-positive rate the PPV is 1 for every positive prior, so
/// no interior prior *attains* a target below 1; that case (and a test that
/// can never fire) is reported as [`BayesError::UnreachableTarget`].
pub fn breakeven_prior(
    test: &TestCharacteristics,
    target_ppv: f64,
) -> Result<Prevalence, BayesError> {
    if !(target_ppv > 0.0 && target_ppv < 1.0) {
        return Err(BayesError::TargetOutOfRange(target_ppv));
    }
    if test.sensitivity == 0.0 {
        return Err(BayesError::UnreachableTarget(
            "the test has zero sensitivity, so PPV is 0 at every prior",
        ));
    }
    let fpr = test.false_positive_rate();
    if fpr == 0.0 {
        return Err(BayesError::UnreachableTarget(
            "the test has zero false-positive rate, so PPV is 1 at every positive prior \
             and only approaches the target in the limit prior → 0",
        ));
    }
    let p = target_ppv * fpr / (test.sensitivity * (1.0 - target_ppv) + target_ppv * fpr);
    Prevalence::new(p)
}

// ───────────────────────────── sweeps ─────────────────────────────

/// One point of a prevalence sweep. `None` marks an undefined posterior
/// (conditioning event had probability zero at that prior).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub prior: f64,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
}

/// PPV/NPV evaluated over an increasing grid of priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub points: Vec<SweepPoint>,
}

/// Evaluate PPV and NPV of `test` over `grid`.
///
/// The grid must be non-empty, strictly increasing, and lie within `[0, 1]`.
/// Undefined posteriors at individual points are carried as `None` rather
/// than aborting the sweep.
pub fn prevalence_sweep(
    test: &TestCharacteristics,
    grid: &[f64],
) -> Result<SweepCurve, BayesError> {
    if grid.is_empty()
        || grid.iter().any(|p| !(*p >= 0.0 && *p <= 1.0))
        || grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(BayesError::InvalidGrid);
    }
    let points = grid
        .iter()
        .map(|&p| {
            let prior = Prevalence::new(p).expect("grid already validated");
            SweepPoint {
                prior: p,
                ppv: positive_predictive_value(test, prior).ok(),
                npv: negative_predictive_value(test, prior).ok(),
            }
        })
        .collect();
    Ok(SweepCurve { points })
}

// ──────────────────────── population projections ────────────────────────

/// Real-valued expected outcome counts for a finite population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCounts {
    pub population_size: u64,
    pub true_positive: f64,
    pub false_positive: f64,
    pub false_negative: f64,
    pub true_negative: f64,
}

impl ExpectedCounts {
    /// Expected number of positive results (secondary-screening referrals).
    #[must_use]
    pub fn referrals(&self) -> f64 {
        self.true_positive + self.false_positive
    }
}

/// Expected outcome counts: each joint probability times the population.
/// Counts are deliberately left fractional — rounding is a rendering choice.
#[must_use]
pub fn expected_counts(
    test: &TestCharacteristics,
    prior: Prevalence,
    population_size: u64,
) -> ExpectedCounts {
    let m = joint_matrix(test, prior);
    let n = population_size as f64;
    ExpectedCounts {
        population_size,
        true_positive: m.true_positive * n,
        false_positive: m.false_positive * n,
        false_negative: m.false_negative * n,
        true_negative: m.true_negative * n,
    }
}

// ───────────────────────────── event tree ─────────────────────────────

/// Which cell of the outcome matrix a leaf belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeKind {
    TruePositive,
    FalsePositive,
    FalseNegative,
    TrueNegative,
}

/// Terminal node: a (condition, test result) pair with its probabilities,
/// expected count, and the posterior of the condition given that result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeLeaf {
    pub outcome: OutcomeKind,
    pub test_positive: bool,
    /// P(this test result | the branch's condition).
    pub conditional: f64,
    /// P(this test result ∧ the branch's condition).
    pub joint: f64,
    /// Expected number of people in this leaf.
    pub expected: f64,
    /// PPV at positive leaves, NPV at negative leaves; `None` if undefined.
    pub posterior: Option<f64>,
}

/// First split of the tree: condition present/absent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionBranch {
    pub label: String,
    /// P(condition) — the prior or its complement.
    pub probability: f64,
    /// Expected number of people under this branch.
    pub expected: f64,
    /// Positive-test leaf first, then negative-test leaf.
    pub leaves: [OutcomeLeaf; 2],
}

/// Natural-frequency event tree: population → condition → test result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventTree {
    pub population_size: u64,
    /// Condition-present branch first, then condition-absent.
    pub branches: [ConditionBranch; 2],
}

/// Build the two-level event tree of `test` over a population.
#[must_use]
pub fn build_event_tree(
    test: &TestCharacteristics,
    prior: Prevalence,
    population_size: u64,
) -> EventTree {
    let m = joint_matrix(test, prior);
    let n = population_size as f64;
    let p = prior.value();
    let ppv = positive_predictive_value(test, prior).ok();
    let npv = negative_predictive_value(test, prior).ok();

    let present = ConditionBranch {
        label: test.label_positive.clone(),
        probability: p,
        expected: p * n,
        leaves: [
            OutcomeLeaf {
                outcome: OutcomeKind::TruePositive,
                test_positive: true,
                conditional: test.sensitivity,
                joint: m.true_positive,
                expected: m.true_positive * n,
                posterior: ppv,
            },
            OutcomeLeaf {
                outcome: OutcomeKind::FalseNegative,
                test_positive: false,
                conditional: test.false_negative_rate(),
                joint: m.false_negative,
                expected: m.false_negative * n,
                posterior: npv,
            },
        ],
    };
    let absent = ConditionBranch {
        label: test.label_negative.clone(),
        probability: 1.0 - p,
        expected: (1.0 - p) * n,
        leaves: [
            OutcomeLeaf {
                outcome: OutcomeKind::FalsePositive,
                test_positive: true,
                conditional: test.false_positive_rate(),
                joint: m.false_positive,
                expected: m.false_positive * n,
                posterior: ppv,
            },
            OutcomeLeaf {
                outcome: OutcomeKind::TrueNegative,
                test_positive: false,
                conditional: test.specificity,
                joint: m.true_negative,
                expected: m.true_negative * n,
                posterior: npv,
            },
        ],
    };
    EventTree {
        population_size,
        branches: [present, absent],
    }
}

// ───────────────────────────── full report ─────────────────────────────

/// Everything `posterior`-style consumers need, in fraction units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorReport {
    pub test: TestCharacteristics,
    pub prior: f64,
    /// `None` when the posterior conditions on a zero-probability result.
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
    pub p_positive: f64,
    pub joint: JointOutcomeMatrix,
    pub expected_counts: ExpectedCounts,
    pub population_size: u64,
}

/// Assemble the posterior report for one (test, prior, population) scenario.
#[must_use]
pub fn posterior_report(
    test: &TestCharacteristics,
    prior: Prevalence,
    population_size: u64,
) -> PosteriorReport {
    let joint = joint_matrix(test, prior);
    PosteriorReport {
        test: test.clone(),
        prior: prior.value(),
        ppv: positive_predictive_value(test, prior).ok(),
        npv: negative_predictive_value(test, prior).ok(),
        p_positive: joint.p_positive(),
        joint,
        expected_counts: expected_counts(test, prior, population_size),
        population_size,
    }
}
