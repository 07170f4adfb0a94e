use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::hierarchy::Hierarchy;

use super::matching::{match_blocks, MatchReport};
use super::metrics::metrics;
use super::tokens::block_sequences;

/// One row of the score table: a GUI (or the aggregate) at one threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub stem: String,
    pub threshold: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ScoreRow {
    fn from_report(stem: &str, r: &MatchReport) -> Self {
        ScoreRow {
            stem: stem.to_owned(),
            threshold: r.threshold,
            tp: r.tp,
            fp: r.fp,
            fn_: r.fn_,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
        }
    }
}

pub const AGGREGATE_STEM: &str = "ALL";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_gui: Vec<ScoreRow>,
    /// Micro-averaged over GUIs: counts are summed before the ratios.
    pub aggregate: Vec<ScoreRow>,
    pub skipped: Vec<String>,
}

/// Block matching of one GUI at each threshold.
pub fn evaluate_gui(gt: &Hierarchy, pred: &Hierarchy, thresholds: &[usize]) -> Vec<MatchReport> {
    let (g, p) = (block_sequences(gt), block_sequences(pred));
    thresholds.iter().map(|&t| match_blocks(&g, &p, t)).collect()
}

impl EvalReport {
    pub fn add(&mut self, stem: &str, reports: &[MatchReport]) {
        self.per_gui.extend(reports.iter().map(|r| ScoreRow::from_report(stem, r)));
    }

    /// Recomputes the aggregate rows from the per-GUI rows.
    pub fn finish(&mut self, thresholds: &[usize]) {
        self.aggregate = thresholds
            .iter()
            .map(|&t| {
                let rows = self.per_gui.iter().filter(|r| r.threshold == t);
                let (tp, fp, fn_) = rows.fold((0, 0, 0), |acc, r| (acc.0 + r.tp, acc.1 + r.fp, acc.2 + r.fn_));
                let m = metrics(tp, fp, fn_);
                ScoreRow {
                    stem: AGGREGATE_STEM.into(),
                    threshold: t,
                    tp,
                    fp,
                    fn_,
                    precision: m.precision,
                    recall: m.recall,
                    f1: m.f1,
                }
            })
            .collect();
    }

    pub fn aggregate_at(&self, threshold: usize) -> Option<&ScoreRow> {
        self.aggregate.iter().find(|r| r.threshold == threshold)
    }

    /// Per-GUI rows followed by the aggregate rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.per_gui.iter().chain(&self.aggregate) {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
