use crate::geometry::{contains, Widget, WidgetId};
use crate::raster::{is_rectangle, is_wireframe, trace_boundary, Components};

use super::config::DetectorConfig;

/// Flags hollow rectangular frames that enclose other widgets as
/// containers and fills in their immediate children.
///
/// `region_of[i]` is the labeling region behind `widgets[i]`, if any; only
/// widgets with a region can be frames. Every widget, text included, may
/// be a child.
pub fn recognize_containers(
    widgets: &mut [Widget],
    region_of: &[Option<usize>],
    components: &Components,
    cfg: &DetectorConfig,
) {
    let width = components.width();
    let straightness = cfg.straightness_px(width);
    let candidate: Vec<bool> = region_of
        .iter()
        .map(|r| {
            r.is_some_and(|i| {
                let region = &components.regions[i];
                is_wireframe(components, region, cfg.hollow_tol)
                    && is_rectangle(&trace_boundary(components, region), straightness, cfg.coverage_tol)
            })
        })
        .collect();
    assign_children(widgets, &candidate, cfg.containment_px(width));
}

/// Gives each widget to its smallest strictly larger enclosing candidate.
/// Candidates that end up without children are not containers.
pub fn assign_children(widgets: &mut [Widget], candidate: &[bool], tolerance: u32) {
    let n = widgets.len();
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        let parent = (0..n)
            .filter(|&i| {
                i != j
                    && candidate[i]
                    && widgets[i].area() > widgets[j].area()
                    && contains(&widgets[i].bbox, &widgets[j].bbox, tolerance)
            })
            .min_by_key(|&i| (widgets[i].area(), i));
        if let Some(p) = parent {
            kids[p].push(j);
        }
    }
    for (i, mut ks) in kids.into_iter().enumerate() {
        ks.sort_by_key(|&k| (widgets[k].top(), widgets[k].left(), widgets[k].id));
        let ids: Vec<WidgetId> = ks.iter().map(|&k| widgets[k].id).collect();
        widgets[i].is_container = !ids.is_empty();
        widgets[i].children = ids;
    }
}
