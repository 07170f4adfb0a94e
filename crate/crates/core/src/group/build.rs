use std::collections::{BTreeMap, BTreeSet};

use crate::geometry::{Widget, WidgetId};
use crate::hierarchy::{Hierarchy, Node};

use super::cluster::{cluster_nontext, cluster_text, split_sparse, widget_map, ClusterSet, WidgetMap};
use super::config::GroupingConfig;
use super::conflict::resolve_conflicts;
use super::pairing::{pair_groups, Block};

/// Nearest enclosing container of each widget, from container child lists.
pub fn parent_map(widgets: &[Widget]) -> BTreeMap<WidgetId, WidgetId> {
    let known: BTreeSet<WidgetId> = widgets.iter().map(|w| w.id).collect();
    let mut parent = BTreeMap::new();
    for w in widgets.iter().filter(|w| w.is_container) {
        for c in &w.children {
            if known.contains(c) && *c != w.id {
                parent.entry(*c).or_insert(w.id);
            }
        }
    }
    // a cycle would hide widgets from every level; cut it at its first edge
    let ids: Vec<WidgetId> = parent.keys().copied().collect();
    for start in ids {
        let mut seen = BTreeSet::from([start]);
        let mut cur = start;
        while let Some(&p) = parent.get(&cur) {
            if !seen.insert(p) {
                parent.remove(&start);
                break;
            }
            cur = p;
        }
    }
    parent
}

fn split_set(set: ClusterSet, map: &WidgetMap, cfg: &GroupingConfig, scale: f64) -> ClusterSet {
    let split = |cs: Vec<_>| cs.iter().flat_map(|c| split_sparse(c, map, cfg, scale)).collect();
    ClusterSet {
        columns: split(set.columns),
        rows: split(set.rows),
        areas: set.areas,
    }
}

/// Blocks for one set of sibling widgets.
pub fn group_level(units: &[&Widget], map: &WidgetMap, cfg: &GroupingConfig, scale: f64) -> Vec<Block> {
    let nontext: Vec<&Widget> = units.iter().copied().filter(|w| !w.is_text()).collect();
    let text: Vec<&Widget> = units.iter().copied().filter(|w| w.is_text()).collect();
    let sets = [
        split_set(cluster_nontext(&nontext, cfg, scale), map, cfg, scale),
        split_set(cluster_text(&text, cfg, scale), map, cfg, scale),
    ];
    let groups = resolve_conflicts(&sets, map);
    let grouped: BTreeSet<WidgetId> = groups.iter().flat_map(|g| g.members.iter().copied()).collect();
    let loose: Vec<WidgetId> = units.iter().map(|w| w.id).filter(|id| !grouped.contains(id)).collect();
    pair_groups(&groups, &loose, map, cfg, scale)
}

/// Groups the top level and the inside of every container. Block ids are
/// sequential over the whole result.
pub fn group_blocks(widgets: &[Widget], cfg: &GroupingConfig, image_width: u32) -> Vec<Block> {
    let scale = cfg.scale(image_width);
    let map = widget_map(widgets);
    let parent = parent_map(widgets);
    let mut levels: Vec<Option<WidgetId>> = vec![None];
    levels.extend(widgets.iter().filter(|w| w.is_container).map(|w| Some(w.id)));

    let mut out = Vec::new();
    for level in levels {
        let units: Vec<&Widget> = widgets.iter().filter(|w| parent.get(&w.id).copied() == level).collect();
        for mut b in group_level(&units, &map, cfg, scale) {
            b.id = out.len();
            out.push(b);
        }
    }
    out
}

/// Assembles the hierarchy. Blocks live at the level of their first
/// member; members from another level are dropped from the block, since
/// container membership takes precedence. A widget claimed by several
/// blocks stays in the first.
pub fn build_hierarchy(blocks: &[Block], widgets: &[Widget], width: Option<u32>, height: Option<u32>) -> Hierarchy {
    let map = widget_map(widgets);
    let parent = parent_map(widgets);
    let mut claimed: BTreeSet<WidgetId> = BTreeSet::new();
    let mut by_level: BTreeMap<Option<WidgetId>, Vec<(&Block, Vec<Vec<WidgetId>>)>> = BTreeMap::new();
    for b in blocks {
        let Some(first) = b.members().find(|id| map.contains_key(id)) else {
            continue;
        };
        let level = parent.get(&first).copied();
        let subgroups: Vec<Vec<WidgetId>> = b
            .subgroups
            .iter()
            .map(|s| {
                s.iter()
                    .copied()
                    .filter(|id| map.contains_key(id) && parent.get(id).copied() == level && claimed.insert(*id))
                    .collect::<Vec<_>>()
            })
            .filter(|s| !s.is_empty())
            .collect();
        if !subgroups.is_empty() {
            by_level.entry(level).or_default().push((b, subgroups));
        }
    }

    fn unit(w: &Widget, ctx: &Ctx) -> Node {
        if w.is_container {
            Node::container(w.clone(), level_nodes(Some(w.id), ctx))
        } else {
            Node::Leaf(w.clone())
        }
    }
    fn level_nodes(level: Option<WidgetId>, ctx: &Ctx) -> Vec<Node> {
        let mut nodes = Vec::new();
        let mut in_block = BTreeSet::new();
        for (b, subgroups) in ctx.by_level.get(&level).map(Vec::as_slice).unwrap_or(&[]) {
            let children = subgroups
                .iter()
                .map(|s| {
                    in_block.extend(s.iter().copied());
                    Node::Group(s.iter().map(|id| unit(ctx.map[id], ctx)).collect())
                })
                .collect();
            nodes.push(Node::block(Some(b.orientation), children));
        }
        for w in ctx.widgets {
            if ctx.parent.get(&w.id).copied() == level && !in_block.contains(&w.id) {
                nodes.push(unit(w, ctx));
            }
        }
        nodes
    }
    struct Ctx<'a> {
        widgets: &'a [Widget],
        map: WidgetMap<'a>,
        parent: BTreeMap<WidgetId, WidgetId>,
        by_level: BTreeMap<Option<WidgetId>, Vec<(&'a Block, Vec<Vec<WidgetId>>)>>,
    }
    let ctx = Ctx {
        widgets,
        map,
        parent,
        by_level,
    };
    Hierarchy::new(width, height, level_nodes(None, &ctx))
}
