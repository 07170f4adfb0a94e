//! Hierarchy overlays: text boxes red, non-text green, block hulls pink and
//! an inset outline per subgroup in a fixed palette.

use image::{Rgba, RgbaImage};

use crate::error::RasterError;
use crate::geometry::BBox;
use crate::hierarchy::{Hierarchy, Node};

pub const TEXT_COLOR: Rgba<u8> = Rgba([255, 0, 0, 255]);
pub const NON_TEXT_COLOR: Rgba<u8> = Rgba([0, 200, 0, 255]);
pub const BLOCK_COLOR: Rgba<u8> = Rgba([255, 105, 180, 255]);

/// Subgroup colors, cycled in traversal order.
pub const SUBGROUP_PALETTE: [Rgba<u8>; 8] = [
    Rgba([31, 119, 180, 255]),
    Rgba([255, 127, 14, 255]),
    Rgba([148, 103, 189, 255]),
    Rgba([140, 86, 75, 255]),
    Rgba([23, 190, 207, 255]),
    Rgba([188, 189, 34, 255]),
    Rgba([127, 127, 127, 255]),
    Rgba([44, 62, 80, 255]),
];

const STROKE: u32 = 2;

fn outline(img: &mut RgbaImage, b: &BBox, inset: u32, color: Rgba<u8>) {
    let (l, t) = (b.left() + inset, b.top() + inset);
    let (Some(r), Some(bt)) = (b.right().checked_sub(inset), b.bottom().checked_sub(inset)) else {
        return;
    };
    if l >= r || t >= bt {
        return;
    }
    for y in t..bt {
        for x in l..r {
            let edge = x < l + STROKE || x + STROKE >= r || y < t + STROKE || y + STROKE >= bt;
            if edge {
                img.put_pixel(x, y, color);
            }
        }
    }
}

/// Draws `hierarchy` over a copy of `image`. Fails if any widget leaves
/// the image.
pub fn render_overlay(image: &RgbaImage, hierarchy: &Hierarchy) -> Result<RgbaImage, RasterError> {
    let (width, height) = image.dimensions();
    for w in hierarchy.widgets() {
        if w.bbox.right() > width || w.bbox.bottom() > height {
            return Err(RasterError::OutOfBounds {
                bbox: w.bbox,
                width,
                height,
            });
        }
    }
    let mut out = image.clone();
    let blocks = hierarchy.blocks();
    for b in &blocks {
        if let Some(hull) = b.bbox() {
            outline(&mut out, &hull, 0, BLOCK_COLOR);
        }
    }
    for w in hierarchy.widgets() {
        let color = if w.is_text() { TEXT_COLOR } else { NON_TEXT_COLOR };
        outline(&mut out, &w.bbox, STROKE, color);
    }
    let mut next = 0usize;
    for b in &blocks {
        for sub in b.children().iter().filter(|c| matches!(c, Node::Group(_))) {
            let color = SUBGROUP_PALETTE[next % SUBGROUP_PALETTE.len()];
            next += 1;
            for c in sub.children() {
                if let Some(bb) = c.bbox() {
                    outline(&mut out, &bb, 2 * STROKE, color);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Widget, WidgetId};
    use crate::hierarchy::Orientation;

    fn canvas() -> RgbaImage {
        RgbaImage::from_pixel(200, 200, Rgba([255, 255, 255, 255]))
    }

    fn count(img: &RgbaImage, c: Rgba<u8>) -> usize {
        img.pixels().filter(|p| **p == c).count()
    }

    #[test]
    fn empty_hierarchy_is_a_copy() {
        let img = canvas();
        let out = render_overlay(&img, &Hierarchy::default()).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn one_block_one_pink_hull() {
        let leaf = |id, l| Node::Leaf(Widget::non_text(WidgetId(id), BBox::from_origin(l, 20, 30, 30).unwrap()));
        let block = Node::block(
            Some(Orientation::Horizontal),
            vec![Node::Group(vec![leaf(0, 10)]), Node::Group(vec![leaf(1, 60)])],
        );
        let h = Hierarchy::new(None, None, vec![block]);
        let out = render_overlay(&canvas(), &h).unwrap();
        // hull 10..90 x 20..50 with a 2 px stroke
        let hull = BBox::new(10, 20, 90, 50).unwrap();
        let ring = 2 * (hull.width() + hull.height()) as usize * 2 - 16;
        assert_eq!(count(&out, BLOCK_COLOR), ring);
        assert!(count(&out, NON_TEXT_COLOR) > 0);
        assert!(count(&out, SUBGROUP_PALETTE[0]) > 0 && count(&out, SUBGROUP_PALETTE[1]) > 0);
    }

    #[test]
    fn text_is_red() {
        let w = Widget::text(WidgetId(0), BBox::from_origin(10, 10, 50, 20).unwrap(), "hi");
        let out = render_overlay(&canvas(), &Hierarchy::new(None, None, vec![Node::Leaf(w)])).unwrap();
        assert!(count(&out, TEXT_COLOR) > 0);
        assert_eq!(count(&out, NON_TEXT_COLOR), 0);
    }

    #[test]
    fn out_of_bounds_rejected() {
        let w = Widget::non_text(WidgetId(0), BBox::from_origin(190, 10, 50, 20).unwrap());
        let h = Hierarchy::new(None, None, vec![Node::Leaf(w)]);
        assert!(matches!(render_overlay(&canvas(), &h), Err(RasterError::OutOfBounds { .. })));
    }
}
