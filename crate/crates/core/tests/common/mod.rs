//! Brute-force reference implementations used to cross-check the library.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use gestalt_core::group::Dbscan;

/// Density-reachability by explicit graph search over all pairs.
pub fn dbscan_oracle(values: &[(usize, f64)], eps: f64, min_pts: usize) -> Dbscan<usize> {
    let n = values.len();
    let near = |i: usize, j: usize| (values[i].1 - values[j].1).abs() <= eps;
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_pts).collect();

    let mut label = vec![usize::MAX; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if !core[s] || label[s] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        clusters.push(Vec::new());
        label[s] = id;
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            clusters[id].push(i);
            for j in 0..n {
                if core[j] && label[j] == usize::MAX && near(i, j) {
                    label[j] = id;
                    queue.push_back(j);
                }
            }
        }
    }
    let mut outliers = Vec::new();
    for i in (0..n).filter(|&i| !core[i]) {
        // nearest core, the lower-valued one on ties
        let best = (0..n)
            .filter(|&c| core[c] && near(i, c))
            .min_by(|&a, &b| {
                let (da, db) = ((values[a].1 - values[i].1).abs(), (values[b].1 - values[i].1).abs());
                da.total_cmp(&db).then(values[a].1.total_cmp(&values[b].1))
            });
        match best {
            Some(c) => clusters[label[c]].push(i),
            None => outliers.push(i),
        }
    }
    let ids = |v: &Vec<usize>| v.iter().map(|&i| values[i].0).collect::<Vec<_>>();
    Dbscan {
        clusters: clusters.iter().map(ids).collect(),
        outliers: ids(&outliers),
    }
}

/// Order-insensitive form of a clustering for comparison.
pub fn canonical(d: &Dbscan<usize>) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut clusters: Vec<Vec<usize>> = d
        .clusters
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        })
        .collect();
    clusters.sort();
    let mut outliers = d.outliers.clone();
    outliers.sort_unstable();
    (clusters, outliers)
}

/// Levenshtein distance from the recursive definition, memoized.
pub fn edit_distance_oracle<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    fn go<T: PartialEq>(a: &[T], b: &[T], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == 0 {
            return j;
        }
        if j == 0 {
            return i;
        }
        if let Some(&d) = memo.get(&(i, j)) {
            return d;
        }
        let sub = go(a, b, i - 1, j - 1, memo) + usize::from(a[i - 1] != b[j - 1]);
        let del = go(a, b, i - 1, j, memo) + 1;
        let ins = go(a, b, i, j - 1, memo) + 1;
        let d = sub.min(del).min(ins);
        memo.insert((i, j), d);
        d
    }
    go(a, b, a.len(), b.len(), &mut HashMap::new())
}

/// Best (pairs, total distance) over every partial one-to-one matching of
/// candidate pairs: most pairs first, then least distance.
pub fn matching_oracle(dist: &[Vec<usize>], threshold: usize) -> (usize, usize) {
    fn go(dist: &[Vec<usize>], threshold: usize, row: usize, used: &mut [bool]) -> (usize, usize) {
        if row == dist.len() {
            return (0, 0);
        }
        let better = |x: (usize, usize), y: (usize, usize)| x.0 > y.0 || (x.0 == y.0 && x.1 < y.1);
        let mut best = go(dist, threshold, row + 1, used);
        for j in 0..used.len() {
            if used[j] || dist[row][j] > threshold {
                continue;
            }
            used[j] = true;
            let (n, d) = go(dist, threshold, row + 1, used);
            used[j] = false;
            let cand = (n + 1, d + dist[row][j]);
            if better(cand, best) {
                best = cand;
            }
        }
        best
    }
    let cols = dist.first().map_or(0, Vec::len);
    go(dist, threshold, 0, &mut vec![false; cols])
}

/// 8-connected labels by breadth-first flood fill; 0 is background.
pub fn flood_fill_labels(width: usize, height: usize, bits: &[bool]) -> Vec<u32> {
    let mut labels = vec![0u32; width * height];
    let mut next = 0;
    for start in 0..bits.len() {
        if !bits[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % width) as i64, (i / width) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                        continue;
                    }
                    let k = ny as usize * width + nx as usize;
                    if bits[k] && labels[k] == 0 {
                        labels[k] = next;
                        queue.push_back(k);
                    }
                }
            }
        }
    }
    labels
}

/// True when two label grids describe the same partition.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    let (mut fwd, mut back) = (HashMap::new(), HashMap::new());
    a.len() == b.len()
        && a.iter().zip(b).all(|(&x, &y)| {
            if (x == 0) != (y == 0) {
                return false;
            }
            *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x
        })
}
