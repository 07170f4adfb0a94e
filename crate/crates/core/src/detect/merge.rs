use std::collections::{HashMap, HashSet};

use crate::geometry::{contains, iou, Widget, WidgetClass, WidgetId};

use super::config::DetectorConfig;
use super::containers::assign_children;

/// Unifies OCR text with detected non-text widgets.
///
/// A non-text widget overlapping a text box with IoU above
/// `text_overlap_iou`, or lying inside one, is text misread as graphics
/// and is dropped. Containers and their children are kept unless a text box
/// covers them almost exactly (IoU at or above `duplicate_iou`), in which
/// case the text reading wins.
///
/// Ids across both inputs must be unique. The output is ordered
/// top-to-bottom, left-to-right and renumbered from 0; container child lists
/// are rebuilt against the surviving widgets.
pub fn merge_widgets(texts: Vec<Widget>, nontexts: Vec<Widget>, cfg: &DetectorConfig, tolerance: u32) -> Vec<Widget> {
    let protected: HashSet<WidgetId> = nontexts
        .iter()
        .filter(|w| w.is_container)
        .flat_map(|w| w.children.iter().copied().chain([w.id]))
        .collect();

    let survives = |n: &Widget| {
        texts.iter().all(|t| {
            let o = iou(&n.bbox, &t.bbox);
            if protected.contains(&n.id) {
                o < cfg.duplicate_iou
            } else {
                o <= cfg.text_overlap_iou && !contains(&t.bbox, &n.bbox, tolerance)
            }
        })
    };
    let mut all: Vec<Widget> = nontexts.iter().filter(|n| survives(n)).cloned().collect();
    all.extend(texts);
    renumber(&mut all);

    let candidate: Vec<bool> = all.iter().map(|w| w.is_container).collect();
    assign_children(&mut all, &candidate, tolerance);
    all
}

/// Sorts by (top, left, class, id) and assigns ids 0..n, remapping child
/// references and dropping references to missing widgets.
pub fn renumber(widgets: &mut Vec<Widget>) {
    let rank = |c: WidgetClass| match c {
        WidgetClass::NonText => 0,
        WidgetClass::Text => 1,
    };
    widgets.sort_by_key(|w| (w.top(), w.left(), rank(w.class()), w.id));
    let map: HashMap<WidgetId, WidgetId> = widgets
        .iter()
        .enumerate()
        .map(|(i, w)| (w.id, WidgetId(i as u32)))
        .collect();
    for w in widgets.iter_mut() {
        w.id = map[&w.id];
        w.children = w.children.iter().filter_map(|c| map.get(c).copied()).collect();
    }
}
