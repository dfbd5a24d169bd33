//! CSV writers (and one reader) for the tabular artifacts.
//!
//! Floating-point columns use Rust's shortest round-trip representation so
//! nothing is lost on re-import; undefined posteriors become empty cells.

use std::io;

use serde::{Deserialize, Serialize};

use crate::bayes::SweepCurve;
use crate::replica::{Protocol, ProtocolSummary};
use crate::sim::OutcomeCounts;

/// `prior,ppv,npv` — one row per grid point, empty cell when undefined.
pub fn write_sweep<W: io::Write>(writer: W, curve: &SweepCurve) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for point in &curve.points {
        w.serialize(point)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct ReplicateRow {
    replicate: u32,
    tp: u64,
    fp: u64,
    #[serde(rename = "fn")]
    r#fn: u64,
    tn: u64,
}

/// `replicate,tp,fp,fn,tn` — one row per Monte-Carlo replicate, 1-based.
pub fn write_replicates<W: io::Write>(writer: W, counts: &[OutcomeCounts]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (i, c) in counts.iter().enumerate() {
        w.serialize(ReplicateRow {
            replicate: i as u32 + 1,
            tp: c.true_positive,
            fp: c.false_positive,
            r#fn: c.false_negative,
            tn: c.true_negative,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Read back a table written by [`write_replicates`] (replicate order).
pub fn read_replicates<R: io::Read>(reader: R) -> csv::Result<Vec<OutcomeCounts>> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize()
        .map(|row| {
            row.map(|rec: ReplicateRow| OutcomeCounts {
                true_positive: rec.tp,
                false_positive: rec.fp,
                false_negative: rec.r#fn,
                true_negative: rec.tn,
            })
        })
        .collect()
}

/// Stable lowercase tag for a protocol in CSV output.
#[must_use]
pub fn protocol_tag(protocol: Protocol) -> &'static str {
    match protocol {
        Protocol::GroupedLeavePairOut => "grouped",
        Protocol::LeakedSegmentKFold => "segment_level",
    }
}

#[derive(Debug, Serialize)]
struct FoldRow<'a> {
    #[serde(skip_serializing_if = "str_is_empty")]
    protocol: &'a str,
    fold: usize,
    truthful: f64,
    deceptive: f64,
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn str_is_empty(s: &str) -> bool {
    s.is_empty()
}

/// `fold,truthful,deceptive` — per-fold accuracy of one protocol.
pub fn write_fold_table<W: io::Write>(writer: W, summary: &ProtocolSummary) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for f in &summary.folds {
        w.serialize(FoldRow {
            protocol: "",
            fold: f.fold,
            truthful: f.truthful_pct,
            deceptive: f.deceptive_pct,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// `protocol,fold,truthful,deceptive` — both protocols in one long table.
pub fn write_combined_folds<W: io::Write>(
    writer: W,
    grouped: &ProtocolSummary,
    leaked: &ProtocolSummary,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for summary in [grouped, leaked] {
        for f in &summary.folds {
            w.serialize(FoldRow {
                protocol: protocol_tag(summary.protocol),
                fold: f.fold,
                truthful: f.truthful_pct,
                deceptive: f.deceptive_pct,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}
