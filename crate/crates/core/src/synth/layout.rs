use image::Rgba;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::canvas::{fill_color, frame_color, text_color, text_layout, words, Canvas, CHAR_CELL, TEXT_HEIGHT};
use super::{LayoutKind, Planted, SynthGui, SynthSpec};
use crate::detect::TextBox;
use crate::error::Error;
use crate::geometry::{BBox, Widget, WidgetClass, WidgetId};
use crate::hierarchy::{Hierarchy, Node, Orientation};

const REF_WIDTH: u32 = 1440;
const MARGIN: u32 = 48;
const TITLE_LEFT: u32 = 20;
const BADGE: u32 = 40;
/// Widgets of different sections in a mixed layout stay this far apart on
/// every clustering attribute, reference px.
const ALIGN_GUARD: f64 = 16.0;

enum Op {
    Fill(BBox, Rgba<u8>),
    Frame(BBox, u32, u32, Rgba<u8>),
    Text(u32, u32, Vec<String>, Rgba<u8>),
}

#[derive(Clone, Copy)]
struct Mark {
    ops: usize,
    widgets: usize,
    ocr: usize,
}

struct Builder<'a> {
    spec: &'a SynthSpec,
    scale: f64,
    rng: ChaCha8Rng,
    ops: Vec<Op>,
    widgets: Vec<Widget>,
    ocr: Vec<TextBox>,
    planted: Planted,
    text_color: Rgba<u8>,
}

impl<'a> Builder<'a> {
    fn new(spec: &'a SynthSpec) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let text_color = text_color(&mut rng);
        Builder {
            spec,
            scale: f64::from(spec.width) / f64::from(REF_WIDTH),
            rng,
            ops: Vec::new(),
            widgets: Vec::new(),
            ocr: Vec::new(),
            planted: Planted::default(),
            text_color,
        }
    }

    fn p(&self, v: u32) -> u32 {
        (f64::from(v) * self.scale).round() as u32
    }

    /// Canvas height in reference px.
    fn ref_height(&self) -> u32 {
        (f64::from(self.spec.height) / self.scale).floor() as u32
    }

    fn rect(&self, left: u32, top: u32, width: u32, height: u32) -> BBox {
        let (l, t) = (self.p(left), self.p(top));
        BBox::new(l, t, self.p(left + width).max(l + 1), self.p(top + height).max(t + 1)).expect("non-empty rect")
    }

    fn range(&mut self, [lo, hi]: [u32; 2]) -> u32 {
        self.rng.gen_range(lo..=hi)
    }

    fn push(&mut self, bbox: BBox, class: WidgetClass) -> Widget {
        let id = WidgetId(self.widgets.len() as u32);
        let w = Widget::new(id, bbox, class);
        self.widgets.push(w.clone());
        w
    }

    fn solid(&mut self, bbox: BBox, color: Rgba<u8>) -> Widget {
        self.ops.push(Op::Fill(bbox, color));
        self.push(bbox, WidgetClass::NonText)
    }

    fn outlined(&mut self, bbox: BBox, color: Rgba<u8>) -> Widget {
        let stroke = self.p(3).max(1);
        self.ops.push(Op::Frame(bbox, stroke, 0, color));
        self.push(bbox, WidgetClass::NonText)
    }

    fn icon(&mut self, bbox: BBox, outlined: bool, color: Rgba<u8>) -> Widget {
        if outlined {
            self.outlined(bbox, color)
        } else {
            self.solid(bbox, color)
        }
    }

    fn frame(&mut self, bbox: BBox, radius: u32, color: Rgba<u8>) -> Widget {
        let stroke = self.p(2).max(1);
        let radius = self.p(radius);
        self.ops.push(Op::Frame(bbox, stroke, radius, color));
        self.push(bbox, WidgetClass::NonText)
    }

    fn text_words(&mut self, left: u32, top: u32, ws: Vec<String>) -> Widget {
        let (l, t) = (self.p(left), self.p(top));
        let (line, boxes) = text_layout(self.scale, l, t, &ws);
        self.ocr.extend(boxes);
        self.ops.push(Op::Text(l, t, ws.clone(), self.text_color));
        let id = WidgetId(self.widgets.len() as u32);
        let w = Widget::text(id, line, ws.join(" "));
        self.widgets.push(w.clone());
        w
    }

    fn text(&mut self, left: u32, top: u32, chars: usize) -> Widget {
        let ws = words(&mut self.rng, chars);
        self.text_words(left, top, ws)
    }

    /// A single-word text, so equal `chars` give equal widths.
    fn word(&mut self, left: u32, top: u32, chars: usize) -> Widget {
        let w: String = (0..chars).map(|_| char::from(b'a' + self.rng.gen_range(0..26u8))).collect();
        self.text_words(left, top, vec![w])
    }

    fn mark(&self) -> Mark {
        Mark {
            ops: self.ops.len(),
            widgets: self.widgets.len(),
            ocr: self.ocr.len(),
        }
    }

    fn restore(&mut self, m: Mark) {
        self.ops.truncate(m.ops);
        self.widgets.truncate(m.widgets);
        self.ocr.truncate(m.ocr);
    }

    fn render(&self) -> Canvas {
        let mut c = Canvas::new(self.spec.width, self.spec.height, REF_WIDTH);
        for op in &self.ops {
            match op {
                Op::Fill(b, color) => c.fill(b, *color),
                Op::Frame(b, stroke, radius, color) => c.frame(b, *stroke, *radius, *color),
                Op::Text(l, t, ws, color) => {
                    c.text_line(*l, *t, ws, *color);
                }
            }
        }
        c
    }
}

fn leaf_group(ws: Vec<Widget>) -> Node {
    Node::Group(ws.into_iter().map(Node::Leaf).collect())
}

struct Section {
    nodes: Vec<Node>,
    bottom: u32,
}

fn list(b: &mut Builder, x0: u32, y0: u32, n: usize, occlude: bool) -> Section {
    let icon = b.range(b.spec.icon_size);
    let gap = b.rng.gen_range(20..=32);
    let pitch = icon.max(TEXT_HEIGHT as u32) + b.range(b.spec.spacing);
    let outlined = b.rng.gen_bool(0.25);
    let color = fill_color(&mut b.rng);
    let text_dy = icon.saturating_sub(TEXT_HEIGHT as u32) / 2;
    let mut groups = Vec::new();
    for i in 0..n {
        let top = y0 + i as u32 * pitch;
        let mut g = Vec::new();
        if !(occlude && i + 1 == n) {
            let r = b.rect(x0, top, icon, icon);
            g.push(b.icon(r, outlined, color));
        }
        let chars = b.rng.gen_range(6..=30);
        g.push(b.text(x0 + icon + gap, top + text_dy, chars));
        groups.push(leaf_group(g));
    }
    Section {
        nodes: vec![Node::block(Some(Orientation::Vertical), groups)],
        bottom: y0 + (n as u32 - 1) * pitch + icon.max(TEXT_HEIGHT as u32),
    }
}

fn grid(b: &mut Builder, x0: u32, y0: u32, avail: u32, cols: usize, items: usize, occlude: bool) -> Section {
    let gx = b.range(b.spec.spacing);
    let gy = b.range(b.spec.spacing);
    let cols_u = cols as u32;
    let tile_w = (avail.saturating_sub((cols_u - 1) * gx) / cols_u).max(16);
    let img_h = b.rng.gen_range(120..=240);
    let max_chars = ((tile_w as f64 / CHAR_CELL) as usize).max(1);
    let chars = b.rng.gen_range(4..=8).min(max_chars);
    let color = fill_color(&mut b.rng);
    let pitch = img_h + 12 + TEXT_HEIGHT as u32 + gy;
    let mut groups = Vec::new();
    for k in 0..items {
        let (r, c) = ((k / cols) as u32, (k % cols) as u32);
        let left = x0 + c * (tile_w + gx);
        let top = y0 + r * pitch;
        let mut g = Vec::new();
        if !(occlude && k + 1 == items) {
            let rect = b.rect(left, top, tile_w, img_h);
            g.push(b.solid(rect, color));
        }
        g.push(b.word(left, top + img_h + 12, chars));
        groups.push(leaf_group(g));
    }
    let rows = items.div_ceil(cols) as u32;
    Section {
        nodes: vec![Node::block(Some(Orientation::Vertical), groups)],
        bottom: y0 + rows * pitch - gy,
    }
}

fn cards(b: &mut Builder, x0: u32, y0: u32, avail: u32, k: usize, occlude: bool, plant: bool) -> Section {
    let h = b.rng.gen_range(220..=300);
    let pad = b.rng.gen_range(20..=32);
    let gap = b.range(b.spec.spacing) + 8;
    let img = h - 2 * pad;
    let radius = if b.rng.gen_bool(0.5) { 8 } else { 0 };
    let stroke_color = frame_color(&mut b.rng);
    let image_color = fill_color(&mut b.rng);
    let badge_color = fill_color(&mut b.rng);
    let outlined_badge = b.rng.gen_bool(0.3);
    let (miss, flip) = if plant && k >= 2 {
        let mut idx: Vec<usize> = (0..k).collect();
        idx.shuffle(&mut b.rng);
        (Some(idx[0]), Some(idx[1]))
    } else {
        (None, None)
    };
    let mut groups = Vec::new();
    for i in 0..k {
        let top = y0 + i as u32 * (h + gap);
        let r = b.rect(x0, top, avail, h);
        let frame = b.frame(r, radius, stroke_color);
        let r = b.rect(x0 + pad, top + pad, img, img);
        let mut children = vec![b.solid(r, image_color)];
        let chars = b.rng.gen_range(8..=30);
        children.push(b.text(x0 + pad + img + 24, top + pad, chars));
        let (bx, by) = (x0 + avail - pad - BADGE, top + h - pad - BADGE);
        if occlude && i + 1 == k {
            // badge hidden
        } else if miss == Some(i) {
            let r = b.rect(bx + (BADGE - 8) / 2, by + (BADGE - 8) / 2, 8, 8);
            let small = b.solid(r, badge_color);
            b.planted.missing.push(small.bbox);
            children.push(small);
        } else {
            let r = b.rect(bx, by, BADGE, BADGE);
            let badge = b.icon(r, outlined_badge, badge_color);
            if flip == Some(i) {
                b.ocr.push(TextBox {
                    bbox: badge.bbox,
                    content: "@".into(),
                    confidence: Some(0.4),
                });
                b.planted.flipped.push(badge.bbox);
            }
            children.push(badge);
        }
        let card = Node::container(frame, children.into_iter().map(Node::Leaf).collect());
        groups.push(Node::Group(vec![card]));
    }
    Section {
        nodes: vec![Node::block(Some(Orientation::Vertical), groups)],
        bottom: y0 + k as u32 * (h + gap) - gap,
    }
}

fn tabs(b: &mut Builder, x0: u32, y0: u32, avail: u32, n: usize, occlude: bool) -> Section {
    let slot = avail / n as u32;
    let icon = b.range(b.spec.icon_size).min(slot.saturating_sub(8)).max(12);
    let color = fill_color(&mut b.rng);
    let outlined = b.rng.gen_bool(0.25);
    let max_chars = ((f64::from(slot) / CHAR_CELL) as usize).saturating_sub(1).max(1);
    let mut groups = Vec::new();
    for i in 0..n {
        let cx = x0 + slot * i as u32 + slot / 2;
        let mut g = Vec::new();
        if !(occlude && i + 1 == n) {
            let r = b.rect(cx - icon / 2, y0, icon, icon);
            g.push(b.icon(r, outlined, color));
        }
        let chars = b.rng.gen_range(4..=10).min(max_chars);
        let w = (chars as f64 * CHAR_CELL) as u32;
        g.push(b.word(cx - w / 2, y0 + icon + 8, chars));
        groups.push(leaf_group(g));
    }
    Section {
        nodes: vec![Node::block(Some(Orientation::Horizontal), groups)],
        bottom: y0 + icon + 8 + TEXT_HEIGHT as u32,
    }
}

/// True when a widget of `a` lines up with a same-class widget of `b` on
/// any attribute the clustering looks at.
fn aligned(a: &[Widget], b: &[Widget], guard: f64) -> bool {
    let attrs = |w: &Widget| -> [f64; 2] {
        if w.is_text() {
            [f64::from(w.left()), f64::from(w.top())]
        } else {
            [w.center_x(), w.center_y()]
        }
    };
    a.iter().any(|x| {
        b.iter().any(|y| {
            x.is_text() == y.is_text() && {
                let (ax, ay) = (attrs(x), attrs(y));
                (ax[0] - ay[0]).abs() <= guard || (ax[1] - ay[1]).abs() <= guard
            }
        })
    })
}

fn mixed(b: &mut Builder, occlude: bool) -> Vec<Node> {
    const TRIES: usize = 40;
    let guard = ALIGN_GUARD * b.scale;
    let mut kinds = [LayoutKind::List, LayoutKind::Grid, LayoutKind::Cards];
    kinds.shuffle(&mut b.rng);
    let count = b.rng.gen_range(2..=3);
    let with_tabs = b.rng.gen_bool(0.5);
    let h_ref = b.ref_height();
    let limit = if with_tabs { h_ref.saturating_sub(220) } else { h_ref.saturating_sub(40) };

    // every part is a widget id range; parts must not align with each other
    let mut parts: Vec<(usize, usize)> = vec![(0, b.widgets.len())];
    let mut nodes = Vec::new();
    let mut y = 120;
    let clashes = |b: &Builder, parts: &[(usize, usize)], new: &[(usize, usize)]| {
        new.iter().enumerate().any(|(i, &(s, e))| {
            parts
                .iter()
                .chain(&new[..i])
                .any(|&(ps, pe)| aligned(&b.widgets[s..e], &b.widgets[ps..pe], guard))
        })
    };
    for &kind in &kinds[..count] {
        for _ in 0..TRIES {
            let m = b.mark();
            let header_left = TITLE_LEFT + 4 * b.rng.gen_range(0..=30);
            let x0 = MARGIN + 8 * b.rng.gen_range(0..=20);
            let avail = REF_WIDTH - x0 - MARGIN;
            let chars = b.rng.gen_range(6..=20);
            let header = b.text(header_left, y, chars);
            let content_start = b.widgets.len();
            let top = y + 56;
            let s = match kind {
                LayoutKind::List => {
                    let n = b.rng.gen_range(3..=5);
                    list(b, x0, top, n, occlude)
                }
                LayoutKind::Grid => {
                    let cols = b.rng.gen_range(2..=3);
                    grid(b, x0, top, avail, cols, cols * 2, occlude)
                }
                _ => cards(b, x0, top, avail, 2, occlude, false),
            };
            let new = [(m.widgets, content_start), (content_start, b.widgets.len())];
            if s.bottom > limit {
                b.restore(m);
                break;
            }
            if clashes(b, &parts, &new) {
                b.restore(m);
                continue;
            }
            parts.extend(new);
            nodes.push(Node::Leaf(header));
            nodes.extend(s.nodes);
            y = s.bottom + 64;
            break;
        }
    }
    if with_tabs {
        for _ in 0..TRIES {
            let m = b.mark();
            let x0 = 8 * b.rng.gen_range(0..=10);
            let n = b.rng.gen_range(3..=5);
            let s = tabs(b, x0, h_ref - 180, REF_WIDTH - 2 * x0, n, occlude);
            if clashes(b, &parts, &[(m.widgets, b.widgets.len())]) {
                b.restore(m);
                continue;
            }
            nodes.extend(s.nodes);
            break;
        }
    }
    nodes
}

/// Renders one synthetic GUI. Identical specs give identical output.
pub fn generate(spec: &SynthSpec) -> Result<SynthGui, Error> {
    spec.validate()?;
    let mut b = Builder::new(spec);
    let title_chars = b.rng.gen_range(8..=24);
    let mut nodes = vec![Node::Leaf(b.text(TITLE_LEFT, 40, title_chars))];
    let avail = REF_WIDTH - 2 * MARGIN;
    let h_ref = b.ref_height();
    let occlude = spec.occlusion;
    let section = match spec.kind {
        LayoutKind::List => {
            let n = spec.items.unwrap_or_else(|| b.rng.gen_range(5..=10));
            Some(list(&mut b, MARGIN, 140, n, occlude))
        }
        LayoutKind::Grid => {
            let cols = spec.columns.unwrap_or_else(|| b.rng.gen_range(2..=4));
            let items = spec.items.unwrap_or_else(|| cols * b.rng.gen_range(2..=4));
            Some(grid(&mut b, MARGIN, 140, avail, cols, items, occlude))
        }
        LayoutKind::Cards => {
            // planted errors need a strict majority among the intact cards
            let fewest = if spec.plant_errors { 4 } else { 3 };
            let k = spec.items.unwrap_or_else(|| b.rng.gen_range(fewest..=6));
            Some(cards(&mut b, MARGIN, 120, avail, k, occlude, spec.plant_errors))
        }
        LayoutKind::Tabs => {
            let n = spec.items.unwrap_or_else(|| b.rng.gen_range(3..=5));
            Some(tabs(&mut b, 0, h_ref.saturating_sub(180), REF_WIDTH, n, occlude))
        }
        LayoutKind::Mixed => {
            nodes.extend(mixed(&mut b, occlude));
            None
        }
    };
    if let Some(s) = section {
        if s.bottom + 20 > h_ref {
            return Err(Error::Config(format!(
                "synth: {} items do not fit a {}x{} canvas",
                spec.kind, spec.width, spec.height
            )));
        }
        nodes.extend(s.nodes);
    }

    let image = b.render().image;
    let ground_truth = Hierarchy::new(Some(spec.width), Some(spec.height), nodes);
    let mut widgets: Vec<Widget> = ground_truth.widgets().into_iter().cloned().collect();
    widgets.sort_by_key(|w| w.id);
    Ok(SynthGui {
        image,
        ocr: b.ocr,
        ground_truth,
        widgets,
        planted: b.planted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::serialize;
    use crate::eval::tokens::to_string;

    fn gen(kind: LayoutKind, seed: u64, f: impl FnOnce(&mut SynthSpec)) -> SynthGui {
        let mut spec = SynthSpec::new(kind, seed);
        f(&mut spec);
        generate(&spec).unwrap()
    }

    #[test]
    fn grid_two_by_four_is_one_block_of_eight() {
        let g = gen(LayoutKind::Grid, 3, |s| {
            s.columns = Some(4);
            s.items = Some(8);
        });
        let blocks: Vec<_> = g
            .ground_truth
            .blocks()
            .into_iter()
            .filter(|n| n.source() == Some(crate::hierarchy::BlockSource::PairedClusters))
            .collect();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].children().len(), 8);
    }

    #[test]
    fn list_tokens() {
        let g = gen(LayoutKind::List, 1, |s| s.items = Some(3));
        assert_eq!(to_string(&serialize(&g.ground_truth)), "t ( [ n t ] [ n t ] [ n t ] )");
    }

    #[test]
    fn occlusion_drops_last_icon() {
        let g = gen(LayoutKind::List, 1, |s| {
            s.items = Some(8);
            s.occlusion = true;
        });
        let s = to_string(&serialize(&g.ground_truth));
        assert!(s.ends_with("[ n t ] [ t ] )"), "{s}");
        assert_eq!(g.widgets.len(), 1 + 8 + 7);
    }

    #[test]
    fn same_seed_same_output() {
        for kind in LayoutKind::ALL {
            let a = gen(kind, 11, |_| {});
            let b = gen(kind, 11, |_| {});
            assert_eq!(a.image.as_raw(), b.image.as_raw());
            assert_eq!(a.ground_truth.to_json(), b.ground_truth.to_json());
            assert_eq!(a.ocr, b.ocr);
        }
    }

    #[test]
    fn widgets_inside_canvas_and_ids_dense() {
        for kind in LayoutKind::ALL {
            for seed in 0..5 {
                let g = gen(kind, seed, |_| {});
                for (i, w) in g.widgets.iter().enumerate() {
                    assert_eq!(w.id, WidgetId(i as u32));
                    assert!(w.bbox.right() <= 1440 && w.bbox.bottom() <= 2560, "{kind} {seed}");
                }
            }
        }
    }

    #[test]
    fn cards_are_containers() {
        let g = gen(LayoutKind::Cards, 2, |s| s.items = Some(3));
        let frames: Vec<_> = g.widgets.iter().filter(|w| w.is_container).collect();
        assert_eq!(frames.len(), 3);
        assert!(frames.iter().all(|f| f.children.len() == 3));
    }

    #[test]
    fn planted_errors_on_distinct_cards() {
        let g = gen(LayoutKind::Cards, 5, |s| s.plant_errors = true);
        assert_eq!(g.planted.missing.len(), 1);
        assert_eq!(g.planted.flipped.len(), 1);
        assert_eq!(g.planted.missing[0].area(), 64);
        assert!(g.ocr.iter().any(|t| t.content == "@" && t.bbox == g.planted.flipped[0]));
    }

    #[test]
    fn text_renders_no_detectable_regions_alone() {
        let g = gen(LayoutKind::Tabs, 4, |_| {});
        let dark = g.image.pixels().filter(|p| p.0[0] < 200).count();
        assert!(dark > 0);
    }

    #[test]
    fn oversized_request_rejected() {
        let mut spec = SynthSpec::new(LayoutKind::List, 0);
        spec.items = Some(200);
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn smaller_canvas_scales() {
        let g = gen(LayoutKind::Grid, 9, |s| {
            s.width = 720;
            s.height = 1280;
        });
        assert_eq!(g.image.dimensions(), (720, 1280));
        assert!(g.widgets.iter().all(|w| w.bbox.right() <= 720));
    }
}
