//! Outer-boundary tracing and the rectangle test used for container
//! recognition.

use super::components::{Components, Region};

/// Clockwise (image coordinates, y down) neighbor ring starting at west.
const RING: [(i64, i64); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

fn ring_index(dx: i64, dy: i64) -> usize {
    RING.iter()
        .position(|&d| d == (dx, dy))
        .expect("offset is an 8-neighbor")
}

/// Moore-neighbor trace of a region's outer boundary.
///
/// Starts at the region's first pixel in raster order and walks clockwise.
/// Consecutive entries are 8-adjacent and the closing step back to the first
/// pixel is implied. Thin parts are walked on both sides, so a pixel may
/// appear more than once.
pub fn trace_boundary(components: &Components, region: &Region) -> Vec<(u32, u32)> {
    let start = components
        .pixels(region)
        .next()
        .map(|(x, y)| (i64::from(x), i64::from(y)))
        .expect("region is non-empty");
    let member = |x: i64, y: i64| components.is_member(region, x, y);

    let mut trace = vec![(start.0 as u32, start.1 as u32)];
    let mut p = start;
    // west of the first raster pixel is always outside the region
    let mut back = 0usize;
    let mut second: Option<(i64, i64)> = None;
    let limit = 4 * region.area as usize + 16;

    for _ in 0..limit {
        let mut next = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let q = (p.0 + RING[d].0, p.1 + RING[d].1);
            if member(q.0, q.1) {
                next = Some((q, d));
                break;
            }
        }
        let Some((q, d)) = next else {
            // isolated pixel
            return trace;
        };
        let prev = RING[(d + 7) % 8];
        let c = (p.0 + prev.0, p.1 + prev.1);
        match second {
            None => second = Some(q),
            Some(s) if p == start && q == s => {
                // drop the closing repeat of the start pixel
                trace.pop();
                return trace;
            }
            Some(_) => {}
        }
        back = ring_index(c.0 - q.0, c.1 - q.1);
        p = q;
        trace.push((p.0 as u32, p.1 as u32));
    }
    trace
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RunAxis {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug)]
struct Run {
    axis: RunAxis,
    len: usize,
}

/// Length of the longest run from `start` whose coordinate across the run
/// axis stays within `tol` of the run's mean.
fn extend(trace: &[(u32, u32)], start: usize, axis: RunAxis, tol: f64) -> usize {
    let coord = |i: usize| match axis {
        RunAxis::Horizontal => f64::from(trace[i].1),
        RunAxis::Vertical => f64::from(trace[i].0),
    };
    let (mut sum, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    let mut len = 0;
    for i in start..trace.len() {
        let v = coord(i);
        let (s, l, h) = (sum + v, lo.min(v), hi.max(v));
        let mean = s / (len + 1) as f64;
        if (h - mean).max(mean - l) > tol {
            break;
        }
        sum = s;
        lo = l;
        hi = h;
        len += 1;
    }
    len
}

fn decompose(trace: &[(u32, u32)], tol: f64) -> Vec<Run> {
    let mut runs: Vec<Run> = Vec::new();
    let mut i = 0;
    while i < trace.len() {
        let h = extend(trace, i, RunAxis::Horizontal, tol);
        let v = extend(trace, i, RunAxis::Vertical, tol);
        let run = if h >= v {
            Run {
                axis: RunAxis::Horizontal,
                len: h,
            }
        } else {
            Run {
                axis: RunAxis::Vertical,
                len: v,
            }
        };
        i += run.len.max(1);
        match runs.last_mut() {
            Some(last) if last.axis == run.axis && run.len <= 1 => last.len += run.len,
            _ => runs.push(run),
        }
    }
    // the trace is closed: a run split across the start joins up
    if runs.len() > 1 && runs[0].axis == runs[runs.len() - 1].axis {
        let tail = runs.pop().expect("len > 1");
        runs[0].len += tail.len;
    }
    runs
}

/// Four-straight-sides test on a closed boundary trace.
///
/// The trace is split into maximal runs whose cross-axis coordinate stays
/// within `straightness_tol` pixels of the fitted axis-parallel line. A run is
/// dominant when it is longer than `2 * straightness_tol + 1` points. The
/// shape is a rectangle iff there are exactly four dominant runs, they
/// alternate between horizontal and vertical, and together they cover at
/// least `coverage_tol` of the trace.
pub fn is_rectangle(trace: &[(u32, u32)], straightness_tol: f64, coverage_tol: f64) -> bool {
    if trace.len() < 8 {
        return false;
    }
    let runs = decompose(trace, straightness_tol);
    let min_len = (2.0 * straightness_tol + 1.0).floor() as usize + 1;
    let dominant: Vec<&Run> = runs.iter().filter(|r| r.len >= min_len).collect();
    if dominant.len() != 4 {
        return false;
    }
    let alternating = (0..4).all(|i| dominant[i].axis != dominant[(i + 1) % 4].axis);
    let covered: usize = dominant.iter().map(|r| r.len).sum();
    alternating && covered as f64 >= coverage_tol * trace.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{binarize::BinaryMap, components::connected_components};
    use std::collections::HashSet;

    fn first_region(map: &BinaryMap) -> (Components, Region) {
        let c = connected_components(map);
        let r = c.regions[0].clone();
        (c, r)
    }

    fn trace_of(map: &BinaryMap) -> Vec<(u32, u32)> {
        let (c, r) = first_region(map);
        trace_boundary(&c, &r)
    }

    fn rect_map(w: u32, h: u32, margin: u32) -> BinaryMap {
        BinaryMap::from_fn(w + 2 * margin, h + 2 * margin, |x, y| {
            x >= margin && x < w + margin && y >= margin && y < h + margin
        })
    }

    fn assert_adjacent_and_closed(trace: &[(u32, u32)]) {
        for i in 0..trace.len() {
            let a = trace[i];
            let b = trace[(i + 1) % trace.len()];
            let dx = (i64::from(a.0) - i64::from(b.0)).abs();
            let dy = (i64::from(a.1) - i64::from(b.1)).abs();
            assert!(dx <= 1 && dy <= 1 && (dx + dy) > 0 || trace.len() == 1, "{a:?} -> {b:?}");
        }
    }

    /// Boundary pixels by definition: members with a 4-neighbor outside.
    fn boundary_oracle(map: &BinaryMap) -> HashSet<(u32, u32)> {
        let mut out = HashSet::new();
        for y in 0..map.height() {
            for x in 0..map.width() {
                if !map.get(x, y) {
                    continue;
                }
                let outside = |dx: i64, dy: i64| {
                    let (nx, ny) = (i64::from(x) + dx, i64::from(y) + dy);
                    nx < 0
                        || ny < 0
                        || nx >= i64::from(map.width())
                        || ny >= i64::from(map.height())
                        || !map.get(nx as u32, ny as u32)
                };
                if outside(1, 0) || outside(-1, 0) || outside(0, 1) || outside(0, -1) {
                    out.insert((x, y));
                }
            }
        }
        out
    }

    #[test]
    fn single_pixel_trace() {
        let m = BinaryMap::from_fn(3, 3, |x, y| x == 1 && y == 1);
        assert_eq!(trace_of(&m), vec![(1, 1)]);
    }

    #[test]
    fn square_3x3_has_eight_boundary_pixels() {
        let m = rect_map(3, 3, 1);
        let t = trace_of(&m);
        assert_eq!(t.len(), 8);
        let set: HashSet<_> = t.iter().copied().collect();
        assert_eq!(set, boundary_oracle(&m));
        assert_adjacent_and_closed(&t);
    }

    #[test]
    fn thin_bar_walks_every_pixel() {
        let m = rect_map(5, 1, 2);
        let t = trace_of(&m);
        let set: HashSet<_> = t.iter().copied().collect();
        assert_eq!(set.len(), 5);
        assert_adjacent_and_closed(&t);
    }

    #[test]
    fn trace_matches_boundary_set_on_blobs() {
        let m = BinaryMap::from_fn(20, 20, |x, y| {
            let (dx, dy) = (f64::from(x) - 9.5, f64::from(y) - 9.5);
            dx * dx + dy * dy <= 64.0 || (x > 12 && y > 14)
        });
        let t = trace_of(&m);
        let set: HashSet<_> = t.iter().copied().collect();
        assert_eq!(set, boundary_oracle(&m));
        assert_adjacent_and_closed(&t);
    }

    #[test]
    fn exact_rectangle_is_rectangle() {
        let t = trace_of(&rect_map(40, 25, 3));
        assert!(is_rectangle(&t, 3.0, 0.8));
    }

    #[test]
    fn rectangle_sweep_sizes() {
        for w in 10..60 {
            for h in (10..60).step_by(7) {
                let t = trace_of(&rect_map(w, h, 2));
                assert!(is_rectangle(&t, 2.0, 0.8), "{w}x{h}");
            }
        }
    }

    #[test]
    fn circle_is_not_rectangle() {
        let m = BinaryMap::from_fn(50, 50, |x, y| {
            let (dx, dy) = (f64::from(x) - 24.5, f64::from(y) - 24.5);
            dx * dx + dy * dy <= 400.0
        });
        let t = trace_of(&m);
        assert!(!is_rectangle(&t, 3.0, 0.8));
    }

    #[test]
    fn jittered_rectangle_is_rectangle() {
        // each column/row edge offset by a deterministic value in [-2, 2]
        let jitter = |i: u32| (i.wrapping_mul(2_654_435_761) >> 7) % 5;
        let m = BinaryMap::from_fn(80, 60, |x, y| {
            let top = 8 + jitter(x);
            let bottom = 50 + jitter(x + 101);
            let left = 8 + jitter(y + 203);
            let right = 70 + jitter(y + 307);
            y >= top && y < bottom && x >= left && x < right
        });
        let t = trace_of(&m);
        assert!(is_rectangle(&t, 3.0, 0.8));
    }

    #[test]
    fn rounded_rectangle_is_rectangle() {
        let r = 6.0;
        let m = BinaryMap::from_fn(100, 70, |x, y| {
            let (x, y) = (f64::from(x), f64::from(y));
            let (l, t, rt, b) = (5.0, 5.0, 94.0, 64.0);
            if x < l || x > rt || y < t || y > b {
                return false;
            }
            let cx = x.clamp(l + r, rt - r);
            let cy = y.clamp(t + r, b - r);
            (x - cx).powi(2) + (y - cy).powi(2) <= r * r
        });
        let t = trace_of(&m);
        assert!(is_rectangle(&t, 3.0, 0.8));
    }

    #[test]
    fn l_shape_is_not_rectangle() {
        let m = BinaryMap::from_fn(60, 60, |x, y| (x >= 5 && x < 55 && y >= 5 && y < 20) || (x >= 5 && x < 20 && y >= 5 && y < 55));
        let t = trace_of(&m);
        assert!(!is_rectangle(&t, 2.0, 0.8));
    }
}
