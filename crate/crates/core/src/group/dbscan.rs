/// Result of a one-dimensional DBSCAN run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dbscan<T> {
    /// Clusters ordered by smallest value; members ordered by value.
    pub clusters: Vec<Vec<T>>,
    pub outliers: Vec<T>,
}

/// Density-based clustering on the real line.
///
/// A point is core when at least `min_pts` points (itself included) lie
/// within `eps`. Cores within `eps` of each other share a cluster. A
/// non-core point within `eps` of a core joins the cluster of its nearest
/// core, the lower one on ties. Everything else is an outlier.
pub fn dbscan_1d<T: Copy>(values: &[(T, f64)], eps: f64, min_pts: usize) -> Dbscan<T> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].1.total_cmp(&values[b].1).then(a.cmp(&b)));
    let v: Vec<f64> = order.iter().map(|&i| values[i].1).collect();

    // neighbor counts by a sliding window over the sorted values
    let mut core = vec![false; n];
    let (mut lo, mut hi) = (0, 0);
    for i in 0..n {
        while v[i] - v[lo] > eps {
            lo += 1;
        }
        while hi < n && v[hi] - v[i] <= eps {
            hi += 1;
        }
        core[i] = hi - lo >= min_pts;
    }

    let cores: Vec<usize> = (0..n).filter(|&i| core[i]).collect();
    let mut cluster_of = vec![usize::MAX; n];
    let mut clusters = 0;
    for (k, &c) in cores.iter().enumerate() {
        if k == 0 || v[c] - v[cores[k - 1]] > eps {
            clusters += 1;
        }
        cluster_of[c] = clusters - 1;
    }
    for i in 0..n {
        if core[i] {
            continue;
        }
        let right = cores.partition_point(|&c| v[c] < v[i]);
        let below = right.checked_sub(1).map(|k| cores[k]);
        let above = cores.get(right).copied();
        let pick = match (below, above) {
            (Some(b), Some(a)) => {
                if v[i] - v[b] <= v[a] - v[i] {
                    Some(b)
                } else {
                    Some(a)
                }
            }
            (b, a) => b.or(a),
        };
        if let Some(c) = pick.filter(|&c| (v[c] - v[i]).abs() <= eps) {
            cluster_of[i] = cluster_of[c];
        }
    }

    let mut out = vec![Vec::new(); clusters];
    let mut outliers = Vec::new();
    for i in 0..n {
        let id = values[order[i]].0;
        match cluster_of[i] {
            usize::MAX => outliers.push(id),
            c => out[c].push(id),
        }
    }
    Dbscan {
        clusters: out,
        outliers,
    }
}
