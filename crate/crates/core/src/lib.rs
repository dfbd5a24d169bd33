//! Base-rate audit toolkit for binary screening tests.
//!
//! The library answers one recurring question — *what does a "positive"
//! actually mean once the base rate is low?* — and packages the machinery
//! needed to audit a screening pipeline end to end:
//!
//! - [`bayes`]: joint outcome probabilities, predictive values, break-even
//!   prevalence, prevalence sweeps, and population event trees.
//! - [`sim`]: Monte Carlo screening of a finite population, for checking the
//!   closed-form numbers and sizing secondary-screening load.
//! - [`replica`]: a synthetic reconstruction of a grouped-data classifier
//!   experiment — dataset generator, small neural classifier, per-question
//!   scoring, and grouped vs. segment-level cross-validation protocols.
//! - [`diagnostics`]: sample-size honesty checks (dimensionality flag,
//!   intraclass correlation, effective sample size).
//! - [`report`]: text/CSV/SVG renderings of the above.
//! - [`cli`]: the `screenaudit` command-line front end.
//!
//! Everything is deterministic given the seeds recorded in the configs; see
//! [`seeding`] for the scheme.

pub mod bayes;
pub mod cli;
pub mod diagnostics;
pub mod replica;
pub mod report;
pub mod seeding;
pub mod sim;
