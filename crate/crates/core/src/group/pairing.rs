use serde::{Deserialize, Serialize};

use crate::geometry::{axis_gap, Axis, BBox, WidgetClass, WidgetId};
use crate::hierarchy::{BlockSource, Orientation};

use super::cluster::{median, WidgetMap};
use super::config::GroupingConfig;
use super::conflict::PositionalGroup;

/// A perceptual group of repeated items.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub id: usize,
    pub orientation: Orientation,
    pub subgroups: Vec<Vec<WidgetId>>,
    pub source: BlockSource,
}

impl Block {
    pub fn members(&self) -> impl Iterator<Item = WidgetId> + '_ {
        self.subgroups.iter().flatten().copied()
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    orientation: Orientation,
    subgroups: Vec<Vec<WidgetId>>,
    /// Items per lane: concatenating equal blocks side by side adds lanes
    /// rather than lengthening them.
    lane: usize,
    hull: BBox,
}

fn hull_of(ids: impl IntoIterator<Item = WidgetId>, map: &WidgetMap) -> BBox {
    let boxes: Vec<BBox> = ids.into_iter().map(|id| map[&id].bbox).collect();
    BBox::hull(&boxes).expect("non-empty")
}

impl Candidate {
    fn from_group(g: &PositionalGroup, map: &WidgetMap) -> Self {
        Candidate {
            orientation: g.orientation,
            subgroups: g.members.iter().map(|&m| vec![m]).collect(),
            lane: g.members.len(),
            hull: hull_of(g.members.iter().copied(), map),
        }
    }

    fn classes(&self, map: &WidgetMap) -> Vec<WidgetClass> {
        let mut c: Vec<WidgetClass> = self.subgroups.iter().flatten().map(|id| map[id].class()).collect();
        c.sort();
        c.dedup();
        c
    }

    /// Class multiset shared by every subgroup, if they all agree.
    fn signature(&self, map: &WidgetMap) -> Option<Vec<WidgetClass>> {
        let sig = |s: &Vec<WidgetId>| {
            let mut c: Vec<WidgetClass> = s.iter().map(|id| map[id].class()).collect();
            c.sort();
            c
        };
        let first = sig(&self.subgroups[0]);
        self.subgroups.iter().all(|s| sig(s) == first).then_some(first)
    }

    fn heights(&self, map: &WidgetMap) -> Vec<f64> {
        self.subgroups.iter().flatten().map(|id| f64::from(map[id].bbox.height())).collect()
    }
}

/// Pairs the subgroups of two groups: repeatedly takes the closest
/// remaining pair of subgroup centers. Unpaired subgroups stay on their own.
pub fn pair_subgroups(a: &[Vec<WidgetId>], b: &[Vec<WidgetId>], map: &WidgetMap) -> Vec<Vec<WidgetId>> {
    let center = |s: &Vec<WidgetId>| {
        let h = hull_of(s.iter().copied(), map);
        (h.center_x(), h.center_y())
    };
    let (ca, cb): (Vec<_>, Vec<_>) = (a.iter().map(center).collect(), b.iter().map(center).collect());
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in ca.iter().enumerate() {
        for (j, q) in cb.iter().enumerate() {
            pairs.push(((p.0 - q.0).hypot(p.1 - q.1), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; b.len()]);
    let mut out = Vec::new();
    for (_, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push(a[i].iter().chain(&b[j]).copied().collect());
        }
    }
    out.extend((0..a.len()).filter(|&i| !used_a[i]).map(|i| a[i].clone()));
    out.extend((0..b.len()).filter(|&j| !used_b[j]).map(|j| b[j].clone()));
    out
}

/// Whether two hulls sit side by side across the arrangement direction:
/// columns must overlap vertically, rows horizontally. Returns the gap
/// between them.
fn side_gap(a: &BBox, b: &BBox, o: Orientation) -> Option<u32> {
    let (along, across) = match o {
        Orientation::Vertical => (Axis::Vertical, Axis::Horizontal),
        Orientation::Horizontal => (Axis::Horizontal, Axis::Vertical),
    };
    (axis_gap(a, b, along) == 0).then(|| axis_gap(a, b, across))
}

/// Iteratively merges proximate groups into blocks.
///
/// Two candidates merge when they share an orientation, their item counts
/// per lane differ by less than `max_count_diff`, they sit side by side within the
/// proximity limit, and no other group or loose widget overlaps the hull
/// of the pair. Same-class pairs go first, then the closest. Items of
/// candidates with matching composition are concatenated; otherwise they
/// are paired by [`pair_subgroups`]. Every group ends up in a block.
pub fn pair_groups(
    groups: &[PositionalGroup],
    loose: &[WidgetId],
    map: &WidgetMap,
    cfg: &GroupingConfig,
    scale: f64,
) -> Vec<Block> {
    let mut cands: Vec<Candidate> = groups.iter().map(|g| Candidate::from_group(g, map)).collect();
    let loose_boxes: Vec<BBox> = loose.iter().map(|id| map[id].bbox).collect();

    loop {
        let mut best: Option<(bool, u32, usize, usize)> = None;
        for i in 0..cands.len() {
            for j in i + 1..cands.len() {
                let (a, b) = (&cands[i], &cands[j]);
                if a.orientation != b.orientation
                    || a.lane.abs_diff(b.lane) >= cfg.max_count_diff
                {
                    continue;
                }
                let Some(gap) = side_gap(&a.hull, &b.hull, a.orientation) else {
                    continue;
                };
                let limit = match cfg.proximity_gap_max {
                    Some(px) => px * scale,
                    None => {
                        let h: Vec<f64> = [a.heights(map), b.heights(map)].concat();
                        cfg.proximity_height_factor * median(&h)
                    }
                };
                if f64::from(gap) > limit {
                    continue;
                }
                let union = a.hull.union(&b.hull);
                let blocked = cands
                    .iter()
                    .enumerate()
                    .any(|(k, c)| k != i && k != j && c.hull.intersects(&union))
                    || loose_boxes.iter().any(|l| l.intersects(&union));
                if blocked {
                    continue;
                }
                let (ca, cb) = (a.classes(map), b.classes(map));
                let mixed = !(ca.len() == 1 && ca == cb);
                let key = (mixed, gap, i, j);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let Some((_, _, i, j)) = best else { break };
        let b = cands.remove(j);
        let a = cands.remove(i);
        let same = matches!((a.signature(map), b.signature(map)), (Some(x), Some(y)) if x == y);
        let (subgroups, lane) = if same {
            (a.subgroups.iter().chain(&b.subgroups).cloned().collect(), a.lane.max(b.lane))
        } else {
            let s = pair_subgroups(&a.subgroups, &b.subgroups, map);
            let n = s.len();
            (s, n)
        };
        cands.insert(
            i,
            Candidate {
                orientation: a.orientation,
                subgroups,
                lane,
                hull: a.hull.union(&b.hull),
            },
        );
    }

    cands
        .into_iter()
        .enumerate()
        .map(|(id, c)| Block {
            id,
            orientation: c.orientation,
            subgroups: c.subgroups,
            source: BlockSource::PairedClusters,
        })
        .collect()
}
