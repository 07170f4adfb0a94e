use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{axis_gap, Axis, Widget, WidgetClass, WidgetId};
use crate::hierarchy::Orientation;

use super::config::GroupingConfig;
use super::dbscan::dbscan_1d;

pub type WidgetMap<'a> = BTreeMap<WidgetId, &'a Widget>;

pub fn widget_map(widgets: &[Widget]) -> WidgetMap<'_> {
    widgets.iter().map(|w| (w.id, w)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    CenterX,
    CenterY,
    Top,
    Left,
    Area,
}

impl Attribute {
    /// Shared x-position makes a column, shared y-position a row.
    pub fn orientation(self) -> Option<Orientation> {
        match self {
            Attribute::CenterX | Attribute::Left => Some(Orientation::Vertical),
            Attribute::CenterY | Attribute::Top => Some(Orientation::Horizontal),
            Attribute::Area => None,
        }
    }

    pub fn value(self, w: &Widget) -> f64 {
        match self {
            Attribute::CenterX => w.center_x(),
            Attribute::CenterY => w.center_y(),
            Attribute::Top => f64::from(w.top()),
            Attribute::Left => f64::from(w.left()),
            Attribute::Area => (w.area() as f64).sqrt(),
        }
    }
}

/// Widgets of one class sharing one attribute value. Always has at least two
/// members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub attribute: Attribute,
    pub members: Vec<WidgetId>,
    pub class: WidgetClass,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClusterSet {
    /// Vertical arrangements (shared x).
    pub columns: Vec<Cluster>,
    /// Horizontal arrangements (shared y).
    pub rows: Vec<Cluster>,
    /// Similar sizes; empty for text.
    pub areas: Vec<Cluster>,
}

fn run(widgets: &[&Widget], attribute: Attribute, eps: f64, min_pts: usize, class: WidgetClass) -> Vec<Cluster> {
    let values: Vec<(WidgetId, f64)> = widgets.iter().map(|w| (w.id, attribute.value(w))).collect();
    dbscan_1d(&values, eps, min_pts)
        .clusters
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|members| Cluster {
            attribute,
            members,
            class,
        })
        .collect()
}

/// Non-text widgets clustered by center x (columns), center y (rows) and
/// square-rooted area.
pub fn cluster_nontext(widgets: &[&Widget], cfg: &GroupingConfig, scale: f64) -> ClusterSet {
    let (eps, min_pts, class) = (cfg.eps_position * scale, cfg.min_pts, WidgetClass::NonText);
    ClusterSet {
        columns: run(widgets, Attribute::CenterX, eps, min_pts, class),
        rows: run(widgets, Attribute::CenterY, eps, min_pts, class),
        areas: run(widgets, Attribute::Area, cfg.eps_area_sqrt * scale, min_pts, class),
    }
}

/// Text widgets clustered by left edge (columns) and top edge (rows).
pub fn cluster_text(widgets: &[&Widget], cfg: &GroupingConfig, scale: f64) -> ClusterSet {
    let (eps, min_pts, class) = (cfg.eps_position * scale, cfg.min_pts, WidgetClass::Text);
    ClusterSet {
        columns: run(widgets, Attribute::Left, eps, min_pts, class),
        rows: run(widgets, Attribute::Top, eps, min_pts, class),
        areas: Vec::new(),
    }
}

pub fn layout_axis(o: Orientation) -> Axis {
    match o {
        Orientation::Vertical => Axis::Vertical,
        Orientation::Horizontal => Axis::Horizontal,
    }
}

/// Members sorted along the arrangement direction.
pub fn sorted_along(members: &[WidgetId], o: Orientation, map: &WidgetMap) -> Vec<WidgetId> {
    let mut m = members.to_vec();
    m.sort_by(|a, b| {
        let (wa, wb) = (map[a], map[b]);
        let key = |w: &Widget| match o {
            Orientation::Vertical => (w.center_y(), w.center_x()),
            Orientation::Horizontal => (w.center_x(), w.center_y()),
        };
        let (ka, kb) = (key(wa), key(wb));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(a.cmp(b))
    });
    m
}

/// Gaps between consecutive members along the arrangement direction.
pub fn consecutive_gaps(sorted: &[WidgetId], o: Orientation, map: &WidgetMap) -> Vec<f64> {
    sorted
        .windows(2)
        .map(|p| f64::from(axis_gap(&map[&p[0]].bbox, &map[&p[1]].bbox, layout_axis(o))))
        .collect()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => 0.0,
        n if n % 2 == 1 => v[n / 2],
        n => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}

/// Cuts a positional cluster where consecutive members are much further
/// apart than usual. Pieces with fewer than two members are dropped.
pub fn split_sparse(cluster: &Cluster, map: &WidgetMap, cfg: &GroupingConfig, scale: f64) -> Vec<Cluster> {
    let Some(o) = cluster.attribute.orientation() else {
        return vec![cluster.clone()];
    };
    let sorted = sorted_along(&cluster.members, o, map);
    let gaps = consecutive_gaps(&sorted, o, map);
    let limit = cfg.split_gap_factor * median(&gaps) + cfg.eps_position * scale;
    let mut pieces: Vec<Vec<WidgetId>> = vec![vec![sorted[0]]];
    for (i, g) in gaps.iter().enumerate() {
        if *g > limit {
            pieces.push(Vec::new());
        }
        pieces.last_mut().expect("non-empty").push(sorted[i + 1]);
    }
    pieces
        .into_iter()
        .filter(|p| p.len() >= 2)
        .map(|mut members| {
            members.sort();
            Cluster {
                attribute: cluster.attribute,
                members,
                class: cluster.class,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BBox;

    fn nt(id: u32, l: u32, t: u32, w: u32, h: u32) -> Widget {
        Widget::non_text(WidgetId(id), BBox::from_origin(l, t, w, h).unwrap())
    }

    fn tx(id: u32, l: u32, t: u32, w: u32) -> Widget {
        Widget::text(WidgetId(id), BBox::from_origin(l, t, w, 20).unwrap(), "x")
    }

    fn refs(ws: &[Widget]) -> Vec<&Widget> {
        ws.iter().collect()
    }

    #[test]
    fn shared_center_x_forms_column_only() {
        let ws = [nt(0, 100, 0, 40, 40), nt(1, 105, 300, 30, 30), nt(2, 98, 700, 44, 44)];
        let c = cluster_nontext(&refs(&ws), &GroupingConfig::default(), 1.0);
        assert_eq!(c.columns.len(), 1);
        assert_eq!(c.columns[0].members.len(), 3);
        assert!(c.rows.is_empty());
    }

    #[test]
    fn single_widget_no_clusters() {
        let ws = [nt(0, 0, 0, 40, 40)];
        let c = cluster_nontext(&refs(&ws), &GroupingConfig::default(), 1.0);
        assert!(c.columns.is_empty() && c.rows.is_empty() && c.areas.is_empty());
    }

    #[test]
    fn grid_two_by_two() {
        let ws = [
            nt(0, 0, 0, 100, 100),
            nt(1, 200, 0, 100, 100),
            nt(2, 0, 200, 100, 100),
            nt(3, 200, 200, 100, 100),
        ];
        let c = cluster_nontext(&refs(&ws), &GroupingConfig::default(), 1.0);
        assert_eq!(c.columns.len(), 2);
        assert_eq!(c.rows.len(), 2);
        assert_eq!(c.areas.len(), 1);
        assert_eq!(c.areas[0].members.len(), 4);
    }

    #[test]
    fn left_justified_lines() {
        let ws = [tx(0, 50, 0, 300), tx(1, 50, 40, 120), tx(2, 52, 80, 200), tx(3, 49, 120, 90)];
        let c = cluster_text(&refs(&ws), &GroupingConfig::default(), 1.0);
        assert_eq!(c.columns.len(), 1);
        assert_eq!(c.columns[0].members.len(), 4);
        assert!(c.rows.is_empty());
    }

    #[test]
    fn texts_sharing_top() {
        let ws = [tx(0, 0, 10, 50), tx(1, 300, 12, 50)];
        let c = cluster_text(&refs(&ws), &GroupingConfig::default(), 1.0);
        assert_eq!(c.rows.len(), 1);
        assert!(c.columns.is_empty());
        let one = [tx(0, 0, 10, 50)];
        assert_eq!(cluster_text(&refs(&one), &GroupingConfig::default(), 1.0), ClusterSet::default());
    }

    #[test]
    fn sparse_column_is_split() {
        let ws: Vec<Widget> = [0, 60, 120, 180, 900, 960].iter().enumerate().map(|(i, &t)| nt(i as u32, 0, t, 40, 40)).collect();
        let map = widget_map(&ws);
        let cl = Cluster {
            attribute: Attribute::CenterX,
            members: ws.iter().map(|w| w.id).collect(),
            class: WidgetClass::NonText,
        };
        let parts = split_sparse(&cl, &map, &GroupingConfig::default(), 1.0);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].members.len(), 4);
        assert_eq!(parts[1].members.len(), 2);
    }
}
