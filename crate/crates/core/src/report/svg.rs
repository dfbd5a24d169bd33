//! Standalone SVG figures, assembled by hand so output is deterministic.
//!
//! Both figures are plain `<svg>` documents with inline attributes — no
//! stylesheets, scripts, or external references — and all coordinates are
//! formatted at fixed precision.

use std::fmt::Write as _;

use super::{fixed4, opt_percent, percent};
use crate::bayes::{EventTree, SweepCurve};

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn text_el(s: &mut String, x: f64, y: f64, size: u32, anchor: &str, body: &str) {
    let _ = writeln!(
        s,
        r#"<text x="{x:.2}" y="{y:.2}" font-family="monospace" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
        escape(body)
    );
}

fn line_el(s: &mut String, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, dash: Option<&str>) {
    let dash_attr = dash.map_or(String::new(), |d| format!(r#" stroke-dasharray="{d}""#));
    let _ = writeln!(
        s,
        r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="1"{dash_attr}/>"#
    );
}

// ─────────────────────────── prevalence sweep ───────────────────────────

const SWEEP_W: f64 = 800.0;
const SWEEP_H: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 55.0;

enum XScale {
    Log { lo: f64, hi: f64 },
    Linear { lo: f64, hi: f64 },
}

impl XScale {
    fn for_priors(priors: &[f64]) -> Self {
        let lo = priors.first().copied().unwrap_or(0.0);
        let hi = priors.last().copied().unwrap_or(1.0);
        if lo > 0.0 && hi > lo {
            XScale::Log { lo: lo.log10(), hi: hi.log10() }
        } else {
            XScale::Linear { lo, hi: if hi > lo { hi } else { lo + 1.0 } }
        }
    }

    fn x(&self, prior: f64) -> Option<f64> {
        let unit = match self {
            XScale::Log { lo, hi } => {
                if prior <= 0.0 {
                    return None;
                }
                (prior.log10() - lo) / (hi - lo)
            }
            XScale::Linear { lo, hi } => (prior - lo) / (hi - lo),
        };
        if !(0.0..=1.0).contains(&unit) {
            return None;
        }
        Some(MARGIN_L + unit * (SWEEP_W - MARGIN_L - MARGIN_R))
    }

    fn ticks(&self) -> Vec<f64> {
        match self {
            XScale::Log { lo, hi } => {
                let mut t = Vec::new();
                let mut d = lo.ceil() as i32;
                while f64::from(d) <= *hi {
                    t.push(10f64.powi(d));
                    d += 1;
                }
                t
            }
            XScale::Linear { lo, hi } => (0..=4).map(|i| lo + (hi - lo) * f64::from(i) / 4.0).collect(),
        }
    }
}

fn y_of(value: f64) -> f64 {
    MARGIN_T + (1.0 - value) * (SWEEP_H - MARGIN_T - MARGIN_B)
}

/// Build a polyline path, breaking the stroke at undefined points.
fn curve_path(points: &[(Option<f64>, Option<f64>)]) -> String {
    let mut path = String::new();
    let mut pen_down = false;
    for (x, v) in points {
        match (x, v) {
            (Some(x), Some(v)) => {
                let cmd = if pen_down { 'L' } else { 'M' };
                let _ = write!(path, "{cmd}{x:.2},{:.2} ", y_of(*v));
                pen_down = true;
            }
            _ => pen_down = false,
        }
    }
    path.trim_end().to_string()
}

/// Sweep figure: PPV and NPV against prior prevalence, log-scaled x axis
/// when every prior is positive. `highlight` draws a dashed marker at that
/// prior if it falls inside the plotted range.
#[must_use]
pub fn sweep_svg(curve: &SweepCurve, highlight: Option<f64>) -> String {
    let priors: Vec<f64> = curve.points.iter().map(|p| p.prior).collect();
    let scale = XScale::for_priors(&priors);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SWEEP_W}" height="{SWEEP_H}" viewBox="0 0 {SWEEP_W} {SWEEP_H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SWEEP_W}" height="{SWEEP_H}" fill="white"/>"#);

    // Horizontal grid at quarter intervals.
    for i in 0..=4 {
        let v = f64::from(i) / 4.0;
        let y = y_of(v);
        line_el(&mut s, MARGIN_L, y, SWEEP_W - MARGIN_R, y, "#dddddd", None);
        text_el(&mut s, MARGIN_L - 8.0, y + 4.0, 12, "end", &percent(v));
    }
    // X ticks.
    for tick in scale.ticks() {
        if let Some(x) = scale.x(tick) {
            line_el(&mut s, x, y_of(0.0), x, y_of(0.0) + 5.0, "#555555", None);
            text_el(&mut s, x, y_of(0.0) + 20.0, 12, "middle", &format!("{tick:e}"));
        }
    }
    text_el(
        &mut s,
        MARGIN_L + (SWEEP_W - MARGIN_L - MARGIN_R) / 2.0,
        SWEEP_H - 12.0,
        13,
        "middle",
        "prior prevalence",
    );

    let ppv: Vec<(Option<f64>, Option<f64>)> =
        curve.points.iter().map(|p| (scale.x(p.prior), p.ppv)).collect();
    let npv: Vec<(Option<f64>, Option<f64>)> =
        curve.points.iter().map(|p| (scale.x(p.prior), p.npv)).collect();
    let _ = writeln!(
        s,
        r##"<path d="{}" fill="none" stroke="#1b6ca8" stroke-width="2"/>"##,
        curve_path(&ppv)
    );
    let _ = writeln!(
        s,
        r##"<path d="{}" fill="none" stroke="#b0413e" stroke-width="2"/>"##,
        curve_path(&npv)
    );

    if let Some(x) = highlight.and_then(|h| scale.x(h)) {
        line_el(&mut s, x, y_of(1.0), x, y_of(0.0), "#333333", Some("5,4"));
        text_el(
            &mut s,
            x + 4.0,
            y_of(1.0) + 12.0,
            12,
            "start",
            &format!("prior {}", percent(highlight.unwrap_or_default())),
        );
    }

    // Legend.
    line_el(&mut s, MARGIN_L + 10.0, MARGIN_T + 10.0, MARGIN_L + 40.0, MARGIN_T + 10.0, "#1b6ca8", None);
    text_el(&mut s, MARGIN_L + 46.0, MARGIN_T + 14.0, 12, "start", "PPV");
    line_el(&mut s, MARGIN_L + 10.0, MARGIN_T + 28.0, MARGIN_L + 40.0, MARGIN_T + 28.0, "#b0413e", None);
    text_el(&mut s, MARGIN_L + 46.0, MARGIN_T + 32.0, 12, "start", "NPV");

    let _ = writeln!(s, "</svg>");
    s
}

// ───────────────────────────── event tree ─────────────────────────────

const TREE_W: f64 = 900.0;
const TREE_H: f64 = 440.0;
const BOX_H: f64 = 52.0;

fn node_box(s: &mut String, x: f64, y: f64, w: f64, lines: &[String]) {
    let _ = writeln!(
        s,
        r##"<rect x="{x:.2}" y="{:.2}" width="{w:.2}" height="{BOX_H}" fill="#f7f7f7" stroke="#555555"/>"##,
        y - BOX_H / 2.0
    );
    for (i, line) in lines.iter().enumerate() {
        text_el(
            s,
            x + 8.0,
            y - BOX_H / 2.0 + 18.0 + 15.0 * i as f64,
            12,
            "start",
            line,
        );
    }
}

/// Natural-frequency tree: population, condition branches, test-result
/// leaves. Branches with zero probability are omitted from the drawing.
#[must_use]
pub fn tree_svg(tree: &EventTree) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{TREE_W}" height="{TREE_H}" viewBox="0 0 {TREE_W} {TREE_H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{TREE_W}" height="{TREE_H}" fill="white"/>"#);

    let drawn: Vec<_> = tree.branches.iter().filter(|b| b.probability > 0.0).collect();
    let root_y = TREE_H / 2.0;
    node_box(
        &mut s,
        16.0,
        root_y,
        180.0,
        &["screened".to_string(), format!("n = {}", tree.population_size)],
    );

    let branch_x = 260.0;
    let leaf_x = 540.0;
    for (bi, branch) in drawn.iter().enumerate() {
        let branch_y = if drawn.len() == 1 {
            root_y
        } else {
            TREE_H / 4.0 + TREE_H / 2.0 * bi as f64
        };
        line_el(&mut s, 196.0, root_y, branch_x, branch_y, "#888888", None);
        node_box(
            &mut s,
            branch_x,
            branch_y,
            200.0,
            &[
                branch.label.clone(),
                format!("{} of screened", percent(branch.probability)),
                format!("expected {}", fixed4(branch.expected)),
            ],
        );
        for (li, leaf) in branch.leaves.iter().enumerate() {
            let leaf_y = branch_y - 55.0 + 110.0 * li as f64;
            line_el(&mut s, branch_x + 200.0, branch_y, leaf_x, leaf_y, "#888888", None);
            let result = if leaf.test_positive { "flagged" } else { "cleared" };
            node_box(
                &mut s,
                leaf_x,
                leaf_y,
                330.0,
                &[
                    format!("{result} ({} of {})", percent(leaf.conditional), branch.label),
                    format!("expected {}", fixed4(leaf.expected)),
                    format!("posterior {}", opt_percent(leaf.posterior)),
                ],
            );
        }
    }

    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{build_event_tree, prevalence_sweep, Prevalence, TestCharacteristics};

    fn adds() -> TestCharacteristics {
        TestCharacteristics::new(0.7366, 0.7555).unwrap()
    }

    fn log_grid() -> Vec<f64> {
        (0..=100)
            .map(|i| 10f64.powf(-5.0 + 4.3 * f64::from(i) / 100.0))
            .collect()
    }

    #[test]
    fn sweep_figure_is_wellformed_and_marks_the_highlight() {
        let curve = prevalence_sweep(&adds(), &log_grid()).unwrap();
        let svg = sweep_svg(&curve, Some(0.05));
        assert!(svg.starts_with("<svg"), "{}", &svg[..60]);
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("stroke-dasharray"), "missing highlight marker");
        assert!(svg.contains("prior 5.00%"));
        assert!(!svg.contains("NaN"));
        assert_eq!(svg, sweep_svg(&curve, Some(0.05)), "must be deterministic");
    }

    #[test]
    fn sweep_figure_survives_grids_with_zero_prior() {
        let curve = prevalence_sweep(&adds(), &[0.0, 0.25, 0.5]).unwrap();
        let svg = sweep_svg(&curve, None);
        assert!(svg.contains("<path"));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn tree_figure_prunes_zero_probability_branches() {
        let tree = build_event_tree(&adds(), Prevalence::new(0.01).unwrap(), 10_000);
        let svg = tree_svg(&tree);
        assert!(svg.contains("2420.5500"), "expected count missing");
        assert!(svg.contains("Lie"));

        let empty = build_event_tree(&adds(), Prevalence::new(0.0).unwrap(), 10_000);
        let svg = tree_svg(&empty);
        assert!(!svg.contains("Lie: "));
        assert!(svg.contains("No-lie"));
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(escape("a<b & \"c\">"), "a&lt;b &amp; &quot;c&quot;&gt;");
    }
}
