use serde::{Deserialize, Serialize};

use crate::geometry::{axis_gap, WidgetClass, WidgetId};
use crate::hierarchy::Orientation;

use super::cluster::{consecutive_gaps, layout_axis, sorted_along, ClusterSet, WidgetMap};

/// A row or column of same-class widgets after conflicts are resolved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionalGroup {
    pub orientation: Orientation,
    pub class: WidgetClass,
    pub members: Vec<WidgetId>,
}

/// Area and spacing dissimilarity of `w` to a candidate group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConflictScore {
    pub area: f64,
    pub spacing: f64,
}

impl ConflictScore {
    pub fn total(&self) -> f64 {
        self.area + self.spacing
    }
}

/// Scores `w` against `group` (which contains it). `None` when the group
/// would be empty without `w`.
pub fn conflict_score(w: WidgetId, group: &PositionalGroup, map: &WidgetMap) -> Option<ConflictScore> {
    let others: Vec<WidgetId> = group.members.iter().copied().filter(|&m| m != w).collect();
    if others.is_empty() {
        return None;
    }
    let me = map[&w];
    let mean_area = others.iter().map(|m| map[m].area() as f64).sum::<f64>() / others.len() as f64;
    let area = (me.area() as f64 - mean_area).abs() / mean_area;

    let spacing = if others.len() < 2 {
        0.0
    } else {
        let axis = layout_axis(group.orientation);
        let nearest = others
            .iter()
            .map(|m| f64::from(axis_gap(&me.bbox, &map[m].bbox, axis)))
            .fold(f64::INFINITY, f64::min);
        // gaps of the whole group: leaving w out would double a gap in a regular run
        let gaps = consecutive_gaps(&sorted_along(&group.members, group.orientation, map), group.orientation, map);
        let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
        (nearest - mean_gap).abs() / (mean_gap + 1.0)
    };
    Some(ConflictScore { area, spacing })
}

const SCORE_EPS: f64 = 1e-9;

/// Turns overlapping row and column clusters into disjoint groups.
///
/// Widgets in several groups are handled in id order. Each goes to the
/// group with the lowest area-plus-spacing score; ties prefer the lower
/// spacing score, then the vertical group, then the group sharing more
/// members with the widget's area cluster. Groups left with fewer than two
/// members dissolve.
pub fn resolve_conflicts(sets: &[ClusterSet], map: &WidgetMap) -> Vec<PositionalGroup> {
    let mut groups: Vec<PositionalGroup> = Vec::new();
    let mut area_of: std::collections::BTreeMap<WidgetId, &[WidgetId]> = Default::default();
    for set in sets {
        for c in set.columns.iter().chain(&set.rows) {
            groups.push(PositionalGroup {
                orientation: c.attribute.orientation().expect("positional attribute"),
                class: c.class,
                members: c.members.clone(),
            });
        }
        for a in &set.areas {
            for m in &a.members {
                area_of.insert(*m, &a.members);
            }
        }
    }

    let mut ids: Vec<WidgetId> = groups.iter().flat_map(|g| g.members.iter().copied()).collect();
    ids.sort();
    ids.dedup();
    for w in ids {
        let owners: Vec<usize> = (0..groups.len()).filter(|&g| groups[g].members.contains(&w)).collect();
        if owners.len() < 2 {
            continue;
        }
        let same_area = |g: usize| {
            area_of
                .get(&w)
                .map_or(0, |a| groups[g].members.iter().filter(|m| **m != w && a.contains(m)).count())
        };
        let scored: Vec<(usize, Option<ConflictScore>)> =
            owners.iter().map(|&g| (g, conflict_score(w, &groups[g], map))).collect();
        let best = scored
            .iter()
            .min_by(|(ga, sa), (gb, sb)| {
                let (Some(a), Some(b)) = (sa, sb) else {
                    // a group that would be left with w alone is never preferred
                    return sa.is_none().cmp(&sb.is_none()).then(ga.cmp(gb));
                };
                let cmp_eps = |x: f64, y: f64| {
                    if (x - y).abs() <= SCORE_EPS {
                        std::cmp::Ordering::Equal
                    } else {
                        x.total_cmp(&y)
                    }
                };
                let vertical = |g: usize| groups[g].orientation != Orientation::Vertical;
                cmp_eps(a.total(), b.total())
                    .then(cmp_eps(a.spacing, b.spacing))
                    .then(vertical(*ga).cmp(&vertical(*gb)))
                    .then(same_area(*gb).cmp(&same_area(*ga)))
                    .then(ga.cmp(gb))
            })
            .map(|(g, _)| *g)
            .expect("at least two owners");
        for g in owners {
            if g != best {
                groups[g].members.retain(|m| *m != w);
            }
        }
    }
    groups.retain(|g| g.members.len() >= 2);
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BBox, Widget};
    use crate::group::cluster::{cluster_nontext, widget_map};
    use crate::group::GroupingConfig;

    fn nt(id: u32, l: u32, t: u32, w: u32, h: u32) -> Widget {
        Widget::non_text(WidgetId(id), BBox::from_origin(l, t, w, h).unwrap())
    }

    fn resolve(ws: &[Widget]) -> Vec<PositionalGroup> {
        let map = widget_map(ws);
        let refs: Vec<&Widget> = ws.iter().collect();
        let set = cluster_nontext(&refs, &GroupingConfig::default(), 1.0);
        resolve_conflicts(&[set], &map)
    }

    fn group_of(groups: &[PositionalGroup], id: u32) -> &PositionalGroup {
        groups.iter().find(|g| g.members.contains(&WidgetId(id))).unwrap()
    }

    #[test]
    fn area_similarity_decides() {
        // widget 0 shares a row with small icons and a column with big images
        let ws = [
            nt(0, 80, 80, 40, 40),
            nt(1, 180, 80, 40, 40),
            nt(2, 280, 80, 40, 40),
            nt(3, 36, 200, 128, 128),
            nt(4, 36, 400, 128, 128),
        ];
        let g = resolve(&ws);
        assert_eq!(group_of(&g, 0).orientation, Orientation::Horizontal);
        let col = group_of(&g, 3);
        assert_eq!(col.members, vec![WidgetId(3), WidgetId(4)]);
    }

    #[test]
    fn single_membership_unchanged() {
        let ws = [nt(0, 0, 0, 40, 40), nt(1, 0, 100, 40, 40), nt(2, 0, 200, 40, 40)];
        let g = resolve(&ws);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].members.len(), 3);
    }

    #[test]
    fn regular_column_beats_irregular_row() {
        // equal areas; column spacing regular, row spacing irregular
        let ws = [
            nt(0, 0, 0, 50, 50),
            nt(1, 0, 100, 50, 50),
            nt(2, 0, 200, 50, 50),
            nt(3, 60, 200, 50, 50),
            nt(4, 400, 200, 50, 50),
        ];
        let g = resolve(&ws);
        assert_eq!(group_of(&g, 2).orientation, Orientation::Vertical);
        for a in &g {
            for b in &g {
                if a != b {
                    assert!(a.members.iter().all(|m| !b.members.contains(m)));
                }
            }
        }
    }

    #[test]
    fn uniform_grid_prefers_columns() {
        let ws: Vec<Widget> = (0..6).map(|i| nt(i, (i % 3) * 200, (i / 3) * 200, 100, 100)).collect();
        let g = resolve(&ws);
        assert_eq!(g.len(), 3, "{g:?}");
        assert!(g.iter().all(|x| x.orientation == Orientation::Vertical && x.members.len() == 2));
    }
}
