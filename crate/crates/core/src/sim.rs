//! Monte Carlo screening of a finite population.
//!
//! Each replicate draws the number of condition-positive people from
//! Binomial(N, prior), then draws correct detections among them from
//! Binomial(·, sensitivity) and correct rejections among the rest from
//! Binomial(·, specificity). That two-stage scheme is exact for independent
//! screenings and costs O(1) per replicate, so million-person populations
//! are cheap.
//!
//! Replicate `i` draws from its own ChaCha8 stream derived from the master
//! seed (see [`crate::seeding`]), so results are identical no matter how the
//! replicates are scheduled across threads.

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bayes::{expected_counts, Prevalence, TestCharacteristics};
use crate::seeding::{rng_for, streams};

/// Errors from simulation configuration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("replicates must be at least 1")]
    NoReplicates,
    #[error("population must be at least 1")]
    EmptyPopulation,
}

/// One Monte Carlo screening experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub test: TestCharacteristics,
    pub prior: Prevalence,
    pub population_size: u64,
    pub replicates: u32,
    pub master_seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.replicates == 0 {
            return Err(SimError::NoReplicates);
        }
        if self.population_size == 0 {
            return Err(SimError::EmptyPopulation);
        }
        Ok(())
    }
}

/// Integer outcome counts of one simulated screening pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub true_positive: u64,
    pub false_positive: u64,
    pub false_negative: u64,
    pub true_negative: u64,
}

impl OutcomeCounts {
    #[must_use]
    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.false_negative + self.true_negative
    }

    /// Number of people referred to secondary screening.
    #[must_use]
    pub fn positives(&self) -> u64 {
        self.true_positive + self.false_positive
    }

    #[must_use]
    pub fn negatives(&self) -> u64 {
        self.false_negative + self.true_negative
    }
}

/// Point estimate with a 95% normal-approximation interval.
///
/// The interval is the Wald interval p̂ ± 1.96·√(p̂(1−p̂)/n), clamped to
/// [0, 1]. Note that it degenerates to zero width when p̂ hits 0 or 1, so it
/// understates uncertainty at the extremes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub ci95_lower: f64,
    pub ci95_upper: f64,
    /// Denominator the estimate was pooled over.
    pub n: u64,
}

impl Estimate {
    fn wald(successes: u64, n: u64) -> Option<Self> {
        if n == 0 {
            return None;
        }
        let value = successes as f64 / n as f64;
        let half = 1.96 * (value * (1.0 - value) / n as f64).sqrt();
        Some(Self {
            value,
            ci95_lower: (value - half).max(0.0),
            ci95_upper: (value + half).min(1.0),
            n,
        })
    }
}

/// Aggregated output of [`simulate_screening`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub config: SimulationConfig,
    /// One entry per replicate, in replicate order.
    pub per_replicate: Vec<OutcomeCounts>,
    /// Mean counts across replicates.
    pub mean_true_positive: f64,
    pub mean_false_positive: f64,
    pub mean_false_negative: f64,
    pub mean_true_negative: f64,
    /// Mean number of secondary-screening referrals per replicate.
    pub mean_referrals: f64,
    /// Pooled empirical PPV/NPV across all replicates; `None` when the
    /// pooled denominator (positives resp. negatives) is zero.
    pub empirical_ppv: Option<Estimate>,
    pub empirical_npv: Option<Estimate>,
}

/// Binomial draw that tolerates the p = 0 / p = 1 / n = 0 edges.
fn binomial(rng: &mut rand_chacha::ChaCha8Rng, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p)
        .expect("p validated by TestCharacteristics/Prevalence")
        .sample(rng)
}

fn run_replicate(config: &SimulationConfig, index: u32) -> OutcomeCounts {
    let mut rng = rng_for(config.master_seed, streams::REPLICATE + u64::from(index));
    let n = config.population_size;
    let positives = binomial(&mut rng, n, config.prior.value());
    let true_positive = binomial(&mut rng, positives, config.test.sensitivity);
    let true_negative = binomial(&mut rng, n - positives, config.test.specificity);
    OutcomeCounts {
        true_positive,
        false_positive: (n - positives) - true_negative,
        false_negative: positives - true_positive,
        true_negative,
    }
}

/// Run the configured number of independent screening replicates.
///
/// Replicates execute in parallel; the per-replicate stream seeding keeps the
/// output identical to a sequential run, and results are merged in replicate
/// order.
pub fn simulate_screening(config: &SimulationConfig) -> Result<SimulationResult, SimError> {
    config.validate()?;
    let per_replicate: Vec<OutcomeCounts> = (0..config.replicates)
        .into_par_iter()
        .map(|i| run_replicate(config, i))
        .collect();

    let r = per_replicate.len() as f64;
    let sum = |f: fn(&OutcomeCounts) -> u64| per_replicate.iter().map(f).sum::<u64>();
    let (tp, fp) = (sum(|c| c.true_positive), sum(|c| c.false_positive));
    let (fn_, tn) = (sum(|c| c.false_negative), sum(|c| c.true_negative));

    Ok(SimulationResult {
        config: config.clone(),
        mean_true_positive: tp as f64 / r,
        mean_false_positive: fp as f64 / r,
        mean_false_negative: fn_ as f64 / r,
        mean_true_negative: tn as f64 / r,
        mean_referrals: (tp + fp) as f64 / r,
        empirical_ppv: Estimate::wald(tp, tp + fp),
        empirical_npv: Estimate::wald(tn, tn + fn_),
        per_replicate,
    })
}

/// Expected number of secondary-screening referrals, N · P(test positive).
///
/// The closed-form companion to [`simulate_screening`]'s `mean_referrals`.
#[must_use]
pub fn secondary_screening_load(
    test: &TestCharacteristics,
    prior: Prevalence,
    population_size: u64,
) -> f64 {
    expected_counts(test, prior, population_size).referrals()
}
