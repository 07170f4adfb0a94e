//! Continuity-based repair of detection errors inside blocks.

use std::collections::BTreeMap;

use image::RgbaImage;

use crate::detect::{detect_in_crop, AreaLimits, DetectorConfig};
use crate::eval::min_cost_assignment;
use crate::geometry::{contains, iou, BBox, Widget, WidgetClass, WidgetId};
use crate::hierarchy::reading_order;
use crate::raster::crop;

use super::cluster::widget_map;
use super::config::GroupingConfig;
use super::pairing::Block;

/// Widgets of a subgroup in slot order: each member in reading order,
/// followed by a container's own children in reading order.
fn slots(subgroup: &[WidgetId], map: &BTreeMap<WidgetId, &Widget>) -> Vec<WidgetId> {
    let ordered = |ids: &[WidgetId]| {
        let boxes: Vec<BBox> = ids.iter().map(|id| map[id].bbox).collect();
        reading_order(&boxes).into_iter().map(|i| ids[i]).collect::<Vec<_>>()
    };
    let mut out = Vec::new();
    for id in ordered(subgroup) {
        out.push(id);
        let w = map[&id];
        if w.is_container {
            let kids: Vec<WidgetId> = w.children.iter().copied().filter(|c| map.contains_key(c)).collect();
            out.extend(ordered(&kids));
        }
    }
    out
}

/// Mean geometry of each slot relative to slot 0 over complete subgroups.
#[derive(Clone, Debug)]
struct Template {
    /// (dx, dy, width, height) of each slot.
    slots: Vec<(f64, f64, f64, f64)>,
    classes: Vec<Vec<WidgetClass>>,
}

impl Template {
    fn build(complete: &[Vec<WidgetId>], map: &BTreeMap<WidgetId, &Widget>) -> Template {
        let n = complete[0].len();
        let mut slots = vec![(0.0, 0.0, 0.0, 0.0); n];
        let mut classes = vec![Vec::new(); n];
        for s in complete {
            let origin = map[&s[0]].bbox;
            for (k, id) in s.iter().enumerate() {
                let b = map[id].bbox;
                slots[k].0 += f64::from(b.left()) - f64::from(origin.left());
                slots[k].1 += f64::from(b.top()) - f64::from(origin.top());
                slots[k].2 += f64::from(b.width());
                slots[k].3 += f64::from(b.height());
                classes[k].push(map[id].class());
            }
        }
        let c = complete.len() as f64;
        for s in &mut slots {
            *s = (s.0 / c, s.1 / c, s.2 / c, s.3 / c);
        }
        Template { slots, classes }
    }

    fn majority(&self, k: usize) -> Option<WidgetClass> {
        majority(&self.classes[k])
    }

    /// Slot assignment of an incomplete subgroup: every member is tried as
    /// every slot to fix the origin; the remaining members go to the slots
    /// minimizing total center distance. Alignments with fewer members
    /// disagreeing with their slot's majority class win first, then the
    /// smaller distance. Returns the origin and the member index per slot.
    fn align(&self, members: &[&Widget]) -> ((f64, f64), Vec<Option<usize>>) {
        let mut best: Option<((usize, i64), (f64, f64), Vec<usize>)> = None;
        for a in members {
            for anchor in &self.slots {
                let origin = (f64::from(a.left()) - anchor.0, f64::from(a.top()) - anchor.1);
                let cost: Vec<Vec<i64>> = members
                    .iter()
                    .map(|m| {
                        self.slots
                            .iter()
                            .map(|s| {
                                let (cx, cy) = (origin.0 + s.0 + s.2 / 2.0, origin.1 + s.1 + s.3 / 2.0);
                                ((m.center_x() - cx).hypot(m.center_y() - cy) * 16.0).round() as i64
                            })
                            .collect()
                    })
                    .collect();
                let assignment = min_cost_assignment(&cost);
                let total: i64 = assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
                let mismatches = assignment
                    .iter()
                    .enumerate()
                    .filter(|&(i, &j)| self.majority(j).is_some_and(|c| c != members[i].class()))
                    .count();
                let key = (mismatches, total);
                if best.as_ref().is_none_or(|b| key < b.0) {
                    best = Some((key, origin, assignment));
                }
            }
        }
        let (_, origin, assignment) = best.expect("non-empty members");
        let mut per_slot = vec![None; self.slots.len()];
        for (i, j) in assignment.into_iter().enumerate() {
            per_slot[j] = Some(i);
        }
        (origin, per_slot)
    }
}

fn majority(classes: &[WidgetClass]) -> Option<WidgetClass> {
    [WidgetClass::NonText, WidgetClass::Text]
        .into_iter()
        .find(|c| 2 * classes.iter().filter(|x| *x == c).count() > classes.len())
}

/// Most common slot count; ties go to the larger count.
fn modal_size(sizes: &[usize]) -> usize {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for s in sizes {
        *counts.entry(*s).or_default() += 1;
    }
    counts.into_iter().max_by_key(|&(s, c)| (c, s)).map_or(0, |(s, _)| s)
}

struct BlockSlots {
    template: Template,
    /// Per subgroup: widget id per template slot, or the expected bbox of a
    /// slot with no widget.
    subgroups: Vec<Vec<Result<WidgetId, Option<BBox>>>>,
}

fn analyse(block: &Block, map: &BTreeMap<WidgetId, &Widget>) -> Option<BlockSlots> {
    let per: Vec<Vec<WidgetId>> = block.subgroups.iter().map(|s| slots(s, map)).collect();
    let sizes: Vec<usize> = per.iter().map(Vec::len).collect();
    let modal = modal_size(&sizes);
    let complete: Vec<Vec<WidgetId>> = per.iter().filter(|s| s.len() == modal).cloned().collect();
    if modal < 2 || complete.len() < 2 {
        return None;
    }
    let template = Template::build(&complete, map);
    let subgroups = per
        .iter()
        .map(|s| {
            if s.len() == modal {
                return s.iter().map(|id| Ok(*id)).collect();
            }
            if s.len() > modal || s.is_empty() {
                return Vec::new();
            }
            let members: Vec<&Widget> = s.iter().map(|id| map[id]).collect();
            let (origin, per_slot) = template.align(&members);
            per_slot
                .iter()
                .zip(&template.slots)
                .map(|(m, t)| match m {
                    Some(i) => Ok(s[*i]),
                    None => {
                        let l = (origin.0 + t.0).round();
                        let top = (origin.1 + t.1).round();
                        let fits = l >= 0.0 && top >= 0.0 && t.2 >= 1.0 && t.3 >= 1.0;
                        Err(fits
                            .then(|| BBox::from_origin(l as u32, top as u32, t.2.round() as u32, t.3.round() as u32).ok())
                            .flatten())
                    }
                })
                .collect()
        })
        .collect();
    Some(BlockSlots { template, subgroups })
}

/// Re-detects widgets missing from subgroups that are smaller than the
/// usual subgroup of their block, with the minimum area scaled by
/// `relax_factor`. A recovered widget joins the container of its
/// subgroup that encloses it, or else the subgroup itself. Returns the ids
/// of recovered widgets; existing widgets are never removed.
pub fn correct_missed(
    blocks: &mut [Block],
    widgets: &mut Vec<Widget>,
    image: &RgbaImage,
    det_cfg: &DetectorConfig,
    grp_cfg: &GroupingConfig,
) -> Vec<WidgetId> {
    let width = image.width();
    let limits = AreaLimits {
        min_area: det_cfg.min_area_px(width) * grp_cfg.relax_factor,
        max_area_ratio: 1.0,
    };
    let tol = det_cfg.containment_px(width);
    let mut recovered = Vec::new();
    for bi in 0..blocks.len() {
        let plan: Vec<(usize, BBox)> = {
            let map = widget_map(widgets);
            let Some(analysis) = analyse(&blocks[bi], &map) else {
                continue;
            };
            let mut plan = Vec::new();
            for (si, sub) in analysis.subgroups.iter().enumerate() {
                for (k, slot) in sub.iter().enumerate() {
                    match slot {
                        Err(Some(expected)) if analysis.template.majority(k) == Some(WidgetClass::NonText) => {
                            plan.push((si, *expected));
                        }
                        Err(Some(_)) => log::debug!("block {bi}: missing text slot {k} is not re-detected"),
                        Err(None) => log::debug!("block {bi}: expected slot {k} lies outside the image"),
                        Ok(_) => {}
                    }
                }
            }
            plan
        };
        for (si, expected) in plan {
            let margin = (grp_cfg.correction_margin * f64::from(expected.width().max(expected.height()))).ceil() as u32;
            let region = expected.expand(margin.max(2));
            let Ok(region) = BBox::new(
                region.left(),
                region.top(),
                region.right().min(image.width()),
                region.bottom().min(image.height()),
            ) else {
                log::warn!("correction region {expected} is outside the image; skipped");
                continue;
            };
            let patch = match crop(image, &region) {
                Ok(p) => p,
                Err(e) => {
                    log::warn!("{e}; skipped");
                    continue;
                }
            };
            let found = match detect_in_crop(&patch, det_cfg, limits) {
                Ok(f) => f,
                Err(e) => {
                    log::warn!("re-detection in {region} failed: {e}");
                    continue;
                }
            };
            let best = found
                .into_iter()
                .filter_map(|b| b.translate(i64::from(region.left()), i64::from(region.top())).ok())
                .filter(|b| expected.contains_point(b.center_x(), b.center_y()))
                .filter(|b| widgets.iter().all(|w| iou(&w.bbox, b) <= 0.5))
                .max_by(|a, b| iou(a, &expected).total_cmp(&iou(b, &expected)));
            let Some(bbox) = best else { continue };
            let id = WidgetId(widgets.iter().map(|w| w.id.0 + 1).max().unwrap_or(0));
            let host = blocks[bi].subgroups[si]
                .iter()
                .filter_map(|m| widgets.iter().position(|w| w.id == *m))
                .filter(|&p| widgets[p].is_container && contains(&widgets[p].bbox, &bbox, tol))
                .min_by_key(|&p| widgets[p].area());
            match host {
                Some(p) => widgets[p].children.push(id),
                None => blocks[bi].subgroups[si].push(id),
            }
            widgets.push(Widget::non_text(id, bbox));
            recovered.push(id);
        }
    }
    recovered
}

/// Majority-win class repair per slot: when more than half of the widgets
/// filling a slot across a block's subgroups share a class, the others are
/// reassigned to it. Bounding boxes are untouched. Returns changed ids.
pub fn correct_misclassified(blocks: &[Block], widgets: &mut [Widget]) -> Vec<WidgetId> {
    let mut flips: Vec<(WidgetId, WidgetClass)> = Vec::new();
    {
        let map = widget_map(widgets);
        for block in blocks {
            let Some(analysis) = analyse(block, &map) else {
                continue;
            };
            for k in 0..analysis.template.slots.len() {
                let ids: Vec<WidgetId> = analysis
                    .subgroups
                    .iter()
                    .filter_map(|s| s.get(k).and_then(|r| r.as_ref().ok().copied()))
                    .collect();
                let classes: Vec<WidgetClass> = ids.iter().map(|id| map[id].class()).collect();
                if let Some(winner) = majority(&classes) {
                    flips.extend(ids.iter().filter(|id| map[*id].class() != winner).map(|id| (*id, winner)));
                }
            }
        }
    }
    let mut changed = Vec::new();
    for (id, class) in flips {
        if let Some(w) = widgets.iter_mut().find(|w| w.id == id) {
            if w.class() != class {
                w.reclassify(class);
                changed.push(id);
            }
        }
    }
    changed.sort();
    changed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{BlockSource, Orientation};
    use image::Rgba;

    fn nt(id: u32, l: u32, t: u32, w: u32, h: u32) -> Widget {
        Widget::non_text(WidgetId(id), BBox::from_origin(l, t, w, h).unwrap())
    }

    fn tx(id: u32, l: u32, t: u32) -> Widget {
        Widget::text(WidgetId(id), BBox::from_origin(l, t, 120, 20).unwrap(), "x")
    }

    fn block(subgroups: Vec<Vec<u32>>) -> Block {
        Block {
            id: 0,
            orientation: Orientation::Vertical,
            subgroups: subgroups.into_iter().map(|s| s.into_iter().map(WidgetId).collect()).collect(),
            source: BlockSource::PairedClusters,
        }
    }

    /// Eight list rows of icon + label; row 5 lost its icon.
    fn list_with_gap() -> (Vec<Widget>, Block, RgbaImage) {
        let mut img = RgbaImage::from_pixel(1440, 800, Rgba([255, 255, 255, 255]));
        let mut ws = Vec::new();
        let mut subs = Vec::new();
        for i in 0..8u32 {
            let top = 20 + i * 90;
            for y in top..top + 48 {
                for x in 20..68 {
                    img.put_pixel(x, y, Rgba([20, 120, 200, 255]));
                }
            }
            if i == 5 {
                ws.push(tx(100 + i, 90, top + 14));
                subs.push(vec![100 + i]);
            } else {
                ws.push(nt(i, 20, top, 48, 48));
                ws.push(tx(100 + i, 90, top + 14));
                subs.push(vec![i, 100 + i]);
            }
        }
        (ws, block(subs), img)
    }

    #[test]
    fn missing_icon_recovered() {
        let (mut ws, b, img) = list_with_gap();
        let before = ws.len();
        let mut blocks = vec![b];
        let got = correct_missed(&mut blocks, &mut ws, &img, &DetectorConfig::default(), &GroupingConfig::default());
        assert_eq!(got.len(), 1);
        assert_eq!(ws.len(), before + 1);
        let new = ws.iter().find(|w| w.id == got[0]).unwrap();
        assert_eq!(new.bbox, BBox::from_origin(20, 470, 48, 48).unwrap());
        assert!(blocks[0].subgroups[5].contains(&got[0]));
    }

    #[test]
    fn consistent_block_unchanged() {
        let (mut ws, _, img) = list_with_gap();
        ws.retain(|w| w.id != WidgetId(105));
        let subs: Vec<Vec<u32>> = (0..8).filter(|&i| i != 5).map(|i| vec![i, 100 + i]).collect();
        let mut blocks = vec![block(subs)];
        let snapshot = (ws.clone(), blocks.clone());
        let got = correct_missed(&mut blocks, &mut ws, &img, &DetectorConfig::default(), &GroupingConfig::default());
        assert!(got.is_empty());
        assert_eq!((ws, blocks), snapshot);
    }

    #[test]
    fn blank_expected_region_adds_nothing() {
        let (mut ws, b, _) = list_with_gap();
        let img = RgbaImage::from_pixel(1440, 800, Rgba([255, 255, 255, 255]));
        let mut blocks = vec![b];
        let got = correct_missed(&mut blocks, &mut ws, &img, &DetectorConfig::default(), &GroupingConfig::default());
        assert!(got.is_empty());
    }

    fn slot_block(classes: &[WidgetClass]) -> (Vec<Widget>, Vec<Block>) {
        let mut ws = Vec::new();
        let mut subs = Vec::new();
        for (i, c) in classes.iter().enumerate() {
            let i = i as u32;
            ws.push(nt(i, 20, 20 + i * 100, 60, 60));
            let mut w = nt(50 + i, 100, 30 + i * 100, 40, 40);
            w.reclassify(*c);
            ws.push(w);
            subs.push(vec![i, 50 + i]);
        }
        (ws, vec![block(subs)])
    }

    #[test]
    fn majority_fixes_minority() {
        use WidgetClass::*;
        let (mut ws, blocks) = slot_block(&[NonText, NonText, Text]);
        let before: Vec<BBox> = ws.iter().map(|w| w.bbox).collect();
        let changed = correct_misclassified(&blocks, &mut ws);
        assert_eq!(changed, vec![WidgetId(52)]);
        assert!(ws.iter().all(|w| !w.is_text()));
        assert_eq!(ws.iter().map(|w| w.bbox).collect::<Vec<_>>(), before);
    }

    #[test]
    fn no_majority_no_change() {
        use WidgetClass::*;
        let (mut ws, blocks) = slot_block(&[Text, NonText]);
        assert!(correct_misclassified(&blocks, &mut ws).is_empty());
        let (mut ws, blocks) = slot_block(&[Text, Text, Text]);
        assert!(correct_misclassified(&blocks, &mut ws).is_empty());
    }

    #[test]
    fn lone_text_aligns_with_text_slot() {
        // rows of icon + label of varying width; the last row lost its icon
        let mut ws = Vec::new();
        let mut subs = Vec::new();
        for r in 0..4u32 {
            ws.push(nt(2 * r, 48, 100 + 80 * r, 40, 40));
            let mut t = tx(2 * r + 1, 112, 110 + 80 * r);
            t.bbox = BBox::from_origin(112, 110 + 80 * r, 60 + 50 * r, 20).unwrap();
            ws.push(t);
            subs.push(vec![2 * r, 2 * r + 1]);
        }
        ws.push(Widget::text(WidgetId(8), BBox::from_origin(112, 430, 80, 20).unwrap(), "x"));
        subs.push(vec![8]);
        let changed = correct_misclassified(&[block(subs)], &mut ws);
        assert!(changed.is_empty(), "{changed:?}");
        assert!(ws[8].is_text());
    }
}
