use serde::{Deserialize, Serialize};

use crate::eval::metrics::{metrics, Metrics};
use crate::geometry::{iou, Widget};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    #[serde(flatten)]
    pub metrics: Metrics,
}

/// Greedy one-to-one matching in descending IoU over same-class pairs with
/// IoU strictly above `iou_threshold`.
pub fn evaluate_detection(predicted: &[Widget], ground_truth: &[Widget], iou_threshold: f64) -> DetectionReport {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in predicted.iter().enumerate() {
        for (j, g) in ground_truth.iter().enumerate() {
            if p.class() != g.class() {
                continue;
            }
            let o = iou(&p.bbox, &g.bbox);
            if o > iou_threshold {
                pairs.push((o, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_p = vec![false; predicted.len()];
    let mut used_g = vec![false; ground_truth.len()];
    let mut tp = 0;
    for (_, i, j) in pairs {
        if !used_p[i] && !used_g[j] {
            used_p[i] = true;
            used_g[j] = true;
            tp += 1;
        }
    }
    let (fp, fn_) = (predicted.len() - tp, ground_truth.len() - tp);
    DetectionReport {
        tp,
        fp,
        fn_,
        metrics: metrics(tp, fp, fn_),
    }
}
