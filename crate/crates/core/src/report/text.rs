//! Plain-text renderings for terminal output.

use std::fmt::Write as _;

use super::{fixed4, opt_percent, percent};
use crate::bayes::{EventTree, PosteriorReport};
use crate::diagnostics::DiagnosticReport;
use crate::replica::{ProtocolGap, ProtocolSummary};
use crate::sim::SimulationResult;

/// One-scenario posterior summary: posteriors up front, then the expected
/// outcome mix for the configured population.
#[must_use]
pub fn posterior_summary(report: &PosteriorReport) -> String {
    let t = &report.test;
    let c = &report.expected_counts;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "screening test: sensitivity {}, specificity {}",
        percent(t.sensitivity),
        percent(t.specificity)
    );
    let _ = writeln!(
        s,
        "prior P({}) = {}, population {}",
        t.label_positive,
        percent(report.prior),
        report.population_size
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "  P(flagged)                 {}", percent(report.p_positive));
    let _ = writeln!(
        s,
        "  PPV = P({} | flagged)     {}",
        t.label_positive,
        opt_percent(report.ppv)
    );
    let _ = writeln!(
        s,
        "  NPV = P({} | cleared)  {}",
        t.label_negative,
        opt_percent(report.npv)
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "expected outcomes per {} screened:", report.population_size);
    let _ = writeln!(s, "  true positives   {:>12}", fixed4(c.true_positive));
    let _ = writeln!(s, "  false positives  {:>12}", fixed4(c.false_positive));
    let _ = writeln!(s, "  false negatives  {:>12}", fixed4(c.false_negative));
    let _ = writeln!(s, "  true negatives   {:>12}", fixed4(c.true_negative));
    let _ = writeln!(s, "  flagged for secondary screening: {}", fixed4(c.referrals()));
    s
}

/// Indented natural-frequency tree. Branches with zero probability are
/// omitted from the rendering (the data structure always carries both).
#[must_use]
pub fn tree_text(tree: &EventTree) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "population: {} screened", tree.population_size);
    for branch in &tree.branches {
        if branch.probability == 0.0 {
            continue;
        }
        let _ = writeln!(
            s,
            "  {}: prior {}, expected {}",
            branch.label,
            percent(branch.probability),
            fixed4(branch.expected)
        );
        for leaf in &branch.leaves {
            let result = if leaf.test_positive { "flagged" } else { "cleared" };
            let _ = writeln!(
                s,
                "    {result:<7}  conditional {:>7}  joint {:>7}  expected {:>12}  posterior {}",
                percent(leaf.conditional),
                percent(leaf.joint),
                fixed4(leaf.expected),
                opt_percent(leaf.posterior)
            );
        }
    }
    s
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| format!("{:>9}", "-"), |x| format!("{x:>9.2}"))
}

/// Side-by-side per-fold accuracy table for the two evaluation protocols,
/// with the mean/spread gap underneath.
#[must_use]
pub fn protocol_table(
    grouped: &ProtocolSummary,
    leaked: &ProtocolSummary,
    gap: &ProtocolGap,
) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "accuracy (%) per fold          grouped split        segment-level split"
    );
    let _ = writeln!(
        s,
        "fold                       truthful deceptive     truthful deceptive"
    );
    let rows = grouped.folds.len().max(leaked.folds.len());
    for i in 0..rows {
        let g = grouped.folds.get(i);
        let l = leaked.folds.get(i);
        let _ = writeln!(
            s,
            "{:>4}                      {} {}    {} {}",
            i + 1,
            cell(g.map(|f| f.truthful_pct)),
            cell(g.map(|f| f.deceptive_pct)),
            cell(l.map(|f| f.truthful_pct)),
            cell(l.map(|f| f.deceptive_pct)),
        );
    }
    let _ = writeln!(
        s,
        "mean                      {} {}    {} {}",
        cell(Some(grouped.mean_truthful_pct)),
        cell(Some(grouped.mean_deceptive_pct)),
        cell(Some(leaked.mean_truthful_pct)),
        cell(Some(leaked.mean_deceptive_pct)),
    );
    let _ = writeln!(
        s,
        "std                       {} {}    {} {}",
        cell(Some(grouped.std_truthful_pct)),
        cell(Some(grouped.std_deceptive_pct)),
        cell(Some(leaked.std_truthful_pct)),
        cell(Some(leaked.std_deceptive_pct)),
    );
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "mean inflation from segment-level split: truthful {:+.2}pp, deceptive {:+.2}pp",
        gap.mean_inflation_truthful_pp, gap.mean_inflation_deceptive_pp
    );
    let _ = writeln!(
        s,
        "std change from segment-level split:      truthful {:+.2}pp, deceptive {:+.2}pp",
        gap.std_deflation_truthful_pp, gap.std_deflation_deceptive_pp
    );
    let _ = writeln!(
        s,
        "verdict: {} (threshold {:.2}pp)",
        if gap.leakage_flagged {
            "participant leakage inflates the segment-level scores"
        } else {
            "no leakage advantage detected"
        },
        gap.threshold_pp
    );
    s
}

/// Monte-Carlo summary with pooled empirical posteriors.
#[must_use]
pub fn simulation_summary(result: &SimulationResult) -> String {
    let cfg = &result.config;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "simulated {} replicates of {} screened, prior {}, seed {}",
        cfg.replicates,
        cfg.population_size,
        percent(cfg.prior.value()),
        cfg.master_seed
    );
    let _ = writeln!(
        s,
        "mean counts: tp {}, fp {}, fn {}, tn {}",
        fixed4(result.mean_true_positive),
        fixed4(result.mean_false_positive),
        fixed4(result.mean_false_negative),
        fixed4(result.mean_true_negative),
    );
    let _ = writeln!(
        s,
        "mean flagged for secondary screening: {}",
        fixed4(result.mean_referrals)
    );
    for (name, estimate) in [("PPV", &result.empirical_ppv), ("NPV", &result.empirical_npv)] {
        match estimate {
            Some(e) => {
                let _ = writeln!(
                    s,
                    "empirical {name} {} (95% CI {} to {}, n = {})",
                    percent(e.value),
                    percent(e.ci95_lower),
                    percent(e.ci95_upper),
                    e.n
                );
            }
            None => {
                let _ = writeln!(s, "empirical {name} undefined (no qualifying results)");
            }
        }
    }
    s
}

/// Headline diagnostics plus the explanatory notes.
#[must_use]
pub fn diagnostics_summary(report: &DiagnosticReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "dataset: {} segments from {} participants, {} features",
        report.n_segments, report.n_participants, report.n_features
    );
    let _ = writeln!(
        s,
        "dimensionality: {:.2} features per training participant{}",
        report.dimensionality.ratio,
        if report.dimensionality.flagged { " [flagged]" } else { "" }
    );
    let _ = writeln!(
        s,
        "within-participant correlation: {:.4}",
        report.intraclass_correlation
    );
    let _ = writeln!(
        s,
        "effective sample size: {:.1} of {} segments",
        report.effective_sample_size, report.n_segments
    );
    for note in &report.notes {
        let _ = writeln!(s, "  - {note}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{build_event_tree, posterior_report, Prevalence, TestCharacteristics};
    use crate::replica::{compare_protocols, FoldAccuracy, Protocol, ProtocolSummary};
    use crate::sim::{simulate_screening, SimulationConfig};

    fn adds() -> TestCharacteristics {
        TestCharacteristics::new(0.7366, 0.7555).unwrap()
    }

    #[test]
    fn posterior_text_carries_the_reference_posteriors() {
        let report = posterior_report(&adds(), Prevalence::new(0.05).unwrap(), 1000);
        let text = posterior_summary(&report);
        assert!(text.contains("13.69%"), "{text}");
        assert!(text.contains("98.20%"), "{text}");
        assert!(text.contains("269.1050"), "{text}");
        assert!(text.contains("P(Lie | flagged)"), "{text}");
    }

    #[test]
    fn undefined_posterior_is_spelled_out() {
        let perfect_spec = TestCharacteristics::new(0.7366, 1.0).unwrap();
        let report = posterior_report(&perfect_spec, Prevalence::new(0.0).unwrap(), 100);
        let text = posterior_summary(&report);
        assert!(text.contains("undefined"), "{text}");
    }

    #[test]
    fn tree_text_shows_four_decimal_counts_and_skips_empty_branches() {
        // 10,000 screened at 1% prior: 100 with the condition, of whom
        // 73.66 are flagged; 2420.55 condition-free people are flagged too.
        let tree = build_event_tree(&adds(), Prevalence::new(0.01).unwrap(), 10_000);
        let text = tree_text(&tree);
        assert!(text.contains("73.6600"), "{text}");
        assert!(text.contains("2420.5500"), "{text}");
        assert!(text.contains("73.66%"), "{text}");
        assert!(text.contains("Lie: prior"), "{text}");

        let empty = build_event_tree(&adds(), Prevalence::new(0.0).unwrap(), 10_000);
        let text = tree_text(&empty);
        assert!(!text.contains("Lie: prior"), "{text}");
        assert!(text.contains("No-lie: prior"), "{text}");
    }

    #[test]
    fn protocol_table_reports_gap_and_verdict() {
        let fold = |fold, truthful_pct, deceptive_pct| FoldAccuracy {
            fold,
            truthful_pct,
            deceptive_pct,
            truthful_questions: 13,
            deceptive_questions: 13,
            undecided_questions: 0,
            ties: 0,
        };
        let grouped = ProtocolSummary::from_folds(
            Protocol::GroupedLeavePairOut,
            vec![fold(1, 100.0, 57.0), fold(2, 50.0, 36.0)],
        );
        let leaked = ProtocolSummary::from_folds(
            Protocol::LeakedSegmentKFold,
            vec![fold(1, 94.3, 93.7), fold(2, 93.6, 95.0), fold(3, 94.3, 95.2)],
        );
        let gap = compare_protocols(&grouped, &leaked, 5.0);
        let text = protocol_table(&grouped, &leaked, &gap);
        assert!(text.contains("mean"), "{text}");
        assert!(text.contains("leakage"), "{text}");
        // Row 3 exists only for the segment-level split.
        assert!(text.contains('-'), "{text}");
    }

    #[test]
    fn simulation_text_includes_interval_estimates() {
        let config = SimulationConfig {
            test: adds(),
            prior: Prevalence::new(0.05).unwrap(),
            population_size: 500,
            replicates: 20,
            master_seed: 7,
        };
        let result = simulate_screening(&config).unwrap();
        let text = simulation_summary(&result);
        assert!(text.contains("20 replicates"), "{text}");
        assert!(text.contains("95% CI"), "{text}");
    }
}
