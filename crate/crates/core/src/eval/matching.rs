use serde::{Deserialize, Serialize};

use super::assign::min_cost_assignment;
use super::distance::edit_distance;
use super::metrics::metrics;
use super::tokens::Token;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMatch {
    pub gt: usize,
    pub pred: usize,
    pub distance: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub threshold: usize,
    pub matches: Vec<BlockMatch>,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MatchReport {
    pub fn total_distance(&self) -> usize {
        self.matches.iter().map(|m| m.distance).sum()
    }
}

/// Pairs ground-truth and predicted blocks one-to-one. A pair is a
/// candidate when its edit distance is at most `threshold`. Among
/// assignments of candidates, the one with the most pairs is chosen and,
/// among those, the one with the least total distance.
pub fn match_blocks(gt: &[Vec<Token>], pred: &[Vec<Token>], threshold: usize) -> MatchReport {
    let dist: Vec<Vec<usize>> = gt.iter().map(|g| pred.iter().map(|p| edit_distance(g, p)).collect()).collect();
    let matches = optimal_matches(&dist, threshold);
    let tp = matches.len();
    let (fp, fn_) = (pred.len() - tp, gt.len() - tp);
    let m = metrics(tp, fp, fn_);
    MatchReport {
        threshold,
        matches,
        tp,
        fp,
        fn_,
        precision: m.precision,
        recall: m.recall,
        f1: m.f1,
    }
}

/// Maximum-cardinality, then minimum-distance matching over the candidate
/// pairs of a distance matrix.
pub fn optimal_matches(dist: &[Vec<usize>], threshold: usize) -> Vec<BlockMatch> {
    let rows = dist.len();
    let cols = dist.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    let candidate_sum: i64 = dist.iter().flatten().filter(|&&d| d <= threshold).map(|&d| d as i64).sum();
    // any candidate pair beats every non-candidate
    let big = candidate_sum + 1;
    let n = rows.max(cols);
    let cost: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match dist.get(i).and_then(|r| r.get(j)) {
                    Some(&d) if d <= threshold => d as i64,
                    _ => big,
                })
                .collect()
        })
        .collect();
    let assignment = min_cost_assignment(&cost);
    let mut out: Vec<BlockMatch> = assignment
        .into_iter()
        .enumerate()
        .filter(|&(i, j)| i < rows && j < cols && dist[i][j] <= threshold)
        .map(|(i, j)| BlockMatch {
            gt: i,
            pred: j,
            distance: dist[i][j],
        })
        .collect();
    out.sort_by_key(|m| (m.gt, m.pred));
    out
}
