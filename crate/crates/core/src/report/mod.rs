//! Rendering for every artifact the command-line tool writes: plain-text
//! summaries, CSV tables, and standalone SVG figures.
//!
//! All renderers are pure functions from data to `String` (or to a writer),
//! with fixed precision everywhere — rerunning a command on the same inputs
//! must reproduce its artifacts byte for byte.

pub mod csv;
pub mod svg;
pub mod text;

/// A probability as a fixed two-decimal percentage, e.g. `13.69%`.
#[must_use]
pub fn percent(p: f64) -> String {
    format!("{:.2}%", 100.0 * p)
}

/// [`percent`], with `None` rendered as `undefined`.
#[must_use]
pub fn opt_percent(p: Option<f64>) -> String {
    p.map_or_else(|| "undefined".to_string(), percent)
}

/// An expected (fractional) count at fixed four-decimal precision.
#[must_use]
pub fn fixed4(x: f64) -> String {
    format!("{x:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percent_uses_two_decimals() {
        assert_eq!(percent(0.1368610765314654), "13.69%");
        assert_eq!(percent(0.9819809959022842), "98.20%");
        assert_eq!(percent(0.125), "12.50%");
        assert_eq!(percent(1.0), "100.00%");
        assert_eq!(percent(0.0), "0.00%");
    }

    #[test]
    fn undefined_posteriors_say_so() {
        assert_eq!(opt_percent(None), "undefined");
        assert_eq!(opt_percent(Some(0.25)), "25.00%");
    }

    #[test]
    fn counts_keep_four_decimals() {
        assert_eq!(fixed4(2420.55), "2420.5500");
        assert_eq!(fixed4(36.83), "36.8300");
        assert_eq!(fixed4(0.0), "0.0000");
    }
}
