//! Pixel-space primitives shared by every stage of the pipeline.
//!
//! Boxes use right/bottom-exclusive integer coordinates, so a box
//! `(0, 0, 10, 10)` covers exactly 100 pixels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Axis-aligned pixel box with exclusive right/bottom edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u32; 4]", into = "[u32; 4]")]
pub struct BBox {
    left: u32,
    top: u32,
    right: u32,
    bottom: u32,
}

impl BBox {
    pub fn new(left: u32, top: u32, right: u32, bottom: u32) -> Result<Self, GeometryError> {
        if left >= right || top >= bottom {
            return Err(GeometryError::Degenerate {
                left,
                top,
                right,
                bottom,
            });
        }
        Ok(BBox {
            left,
            top,
            right,
            bottom,
        })
    }

    /// Box from origin and size. Width and height must be non-zero.
    pub fn from_origin(left: u32, top: u32, width: u32, height: u32) -> Result<Self, GeometryError> {
        BBox::new(left, top, left.saturating_add(width), top.saturating_add(height))
    }

    pub fn left(&self) -> u32 {
        self.left
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn right(&self) -> u32 {
        self.right
    }

    pub fn bottom(&self) -> u32 {
        self.bottom
    }

    pub fn width(&self) -> u32 {
        self.right - self.left
    }

    pub fn height(&self) -> u32 {
        self.bottom - self.top
    }

    pub fn area(&self) -> u64 {
        u64::from(self.width()) * u64::from(self.height())
    }

    pub fn center_x(&self) -> f64 {
        (f64::from(self.left) + f64::from(self.right)) / 2.0
    }

    pub fn center_y(&self) -> f64 {
        (f64::from(self.top) + f64::from(self.bottom)) / 2.0
    }

    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        let left = self.left.max(other.left);
        let top = self.top.max(other.top);
        let right = self.right.min(other.right);
        let bottom = self.bottom.min(other.bottom);
        BBox::new(left, top, right, bottom).ok()
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.intersection(other).is_some()
    }

    /// Smallest box covering both.
    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            left: self.left.min(other.left),
            top: self.top.min(other.top),
            right: self.right.max(other.right),
            bottom: self.bottom.max(other.bottom),
        }
    }

    /// Hull of a non-empty set of boxes.
    pub fn hull<'a, I: IntoIterator<Item = &'a BBox>>(boxes: I) -> Option<BBox> {
        boxes.into_iter().fold(None, |acc: Option<BBox>, b| match acc {
            None => Some(*b),
            Some(h) => Some(h.union(b)),
        })
    }

    /// Shifts the box; fails if any coordinate would become negative.
    pub fn translate(&self, dx: i64, dy: i64) -> Result<BBox, GeometryError> {
        let shift = |v: u32, d: i64| -> Result<u32, GeometryError> {
            u32::try_from(i64::from(v) + d).map_err(|_| GeometryError::OutOfRange)
        };
        BBox::new(
            shift(self.left, dx)?,
            shift(self.top, dy)?,
            shift(self.right, dx)?,
            shift(self.bottom, dy)?,
        )
    }

    /// Grows the box by `margin` on every side, clamped at zero.
    pub fn expand(&self, margin: u32) -> BBox {
        BBox {
            left: self.left.saturating_sub(margin),
            top: self.top.saturating_sub(margin),
            right: self.right.saturating_add(margin),
            bottom: self.bottom.saturating_add(margin),
        }
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= f64::from(self.left)
            && x <= f64::from(self.right)
            && y >= f64::from(self.top)
            && y <= f64::from(self.bottom)
    }

    pub fn to_array(&self) -> [u32; 4] {
        [self.left, self.top, self.right, self.bottom]
    }
}

impl TryFrom<[u32; 4]> for BBox {
    type Error = GeometryError;

    fn try_from(v: [u32; 4]) -> Result<Self, Self::Error> {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [u32; 4] {
    fn from(b: BBox) -> Self {
        b.to_array()
    }
}

impl fmt::Display for BBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.left, self.top, self.right, self.bottom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// Intersection over union of pixel areas.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection(b).map_or(0, |i| i.area());
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

/// True iff each edge of `inner` lies inside `outer`, allowing `tolerance`
/// pixels of outward slack.
pub fn contains(outer: &BBox, inner: &BBox, tolerance: u32) -> bool {
    let tol = u64::from(tolerance);
    u64::from(inner.left) + tol >= u64::from(outer.left)
        && u64::from(inner.top) + tol >= u64::from(outer.top)
        && u64::from(inner.right) <= u64::from(outer.right) + tol
        && u64::from(inner.bottom) <= u64::from(outer.bottom) + tol
}

/// Edge-to-edge distance along one axis; zero when the projections overlap
/// or touch.
pub fn axis_gap(a: &BBox, b: &BBox, axis: Axis) -> u32 {
    let (a0, a1, b0, b1) = match axis {
        Axis::Horizontal => (a.left, a.right, b.left, b.right),
        Axis::Vertical => (a.top, a.bottom, b.top, b.bottom),
    };
    a0.max(b0).saturating_sub(a1.min(b1))
}

/// Largest of the two axis gaps (zero for overlapping boxes).
pub fn box_gap(a: &BBox, b: &BBox) -> u32 {
    axis_gap(a, b, Axis::Horizontal).max(axis_gap(a, b, Axis::Vertical))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WidgetClass {
    Text,
    #[serde(rename = "nontext")]
    NonText,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WidgetId(pub u32);

impl fmt::Display for WidgetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

/// An atomic GUI element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Widget {
    pub id: WidgetId,
    pub bbox: BBox,
    class: WidgetClass,
    text: Option<String>,
    pub is_container: bool,
    pub children: Vec<WidgetId>,
}

impl Widget {
    pub fn text(id: WidgetId, bbox: BBox, content: impl Into<String>) -> Self {
        Widget {
            id,
            bbox,
            class: WidgetClass::Text,
            text: Some(content.into()),
            is_container: false,
            children: Vec::new(),
        }
    }

    pub fn non_text(id: WidgetId, bbox: BBox) -> Self {
        Widget {
            id,
            bbox,
            class: WidgetClass::NonText,
            text: None,
            is_container: false,
            children: Vec::new(),
        }
    }

    pub fn new(id: WidgetId, bbox: BBox, class: WidgetClass) -> Self {
        match class {
            WidgetClass::Text => Widget::text(id, bbox, String::new()),
            WidgetClass::NonText => Widget::non_text(id, bbox),
        }
    }

    pub fn class(&self) -> WidgetClass {
        self.class
    }

    pub fn text_content(&self) -> Option<&str> {
        self.text.as_deref()
    }

    /// Changes the class, keeping `text_content` present iff the widget is text.
    pub fn reclassify(&mut self, class: WidgetClass) {
        if self.class == class {
            return;
        }
        self.class = class;
        self.text = match class {
            WidgetClass::Text => Some(String::new()),
            WidgetClass::NonText => None,
        };
    }

    pub fn is_text(&self) -> bool {
        self.class == WidgetClass::Text
    }

    pub fn center_x(&self) -> f64 {
        self.bbox.center_x()
    }

    pub fn center_y(&self) -> f64 {
        self.bbox.center_y()
    }

    pub fn area(&self) -> u64 {
        self.bbox.area()
    }

    pub fn top(&self) -> u32 {
        self.bbox.top()
    }

    pub fn left(&self) -> u32 {
        self.bbox.left()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(l: u32, t: u32, r: u32, bt: u32) -> BBox {
        BBox::new(l, t, r, bt).unwrap()
    }

    /// Counts pixels by enumeration, independent of the area arithmetic.
    fn iou_by_pixels(a: &BBox, c: &BBox) -> f64 {
        let inside = |bx: &BBox, x: u32, y: u32| x >= bx.left && x < bx.right && y >= bx.top && y < bx.bottom;
        let (mut inter, mut union) = (0u64, 0u64);
        for y in 0..a.bottom.max(c.bottom) {
            for x in 0..a.right.max(c.right) {
                let (ia, ic) = (inside(a, x, y), inside(c, x, y));
                inter += u64::from(ia && ic);
                union += u64::from(ia || ic);
            }
        }
        inter as f64 / union as f64
    }

    #[test]
    fn degenerate_boxes_rejected() {
        assert!(BBox::new(5, 0, 5, 10).is_err());
        assert!(BBox::new(0, 7, 10, 3).is_err());
    }

    #[test]
    fn iou_examples() {
        assert_eq!(iou(&b(0, 0, 10, 10), &b(0, 0, 10, 10)), 1.0);
        assert_eq!(iou(&b(0, 0, 10, 10), &b(20, 20, 30, 30)), 0.0);
        let oracle = iou_by_pixels(&b(0, 0, 10, 10), &b(0, 5, 10, 15));
        assert!((oracle - 1.0 / 3.0).abs() < 1e-12);
        assert!((iou(&b(0, 0, 10, 10), &b(0, 5, 10, 15)) - oracle).abs() < 1e-12);
    }

    #[test]
    fn contains_examples() {
        let outer = b(0, 0, 100, 100);
        assert!(contains(&outer, &outer, 0));
        assert!(contains(&outer, &b(10, 10, 20, 20), 0));
        let poking = b(95, 95, 105, 105);
        assert!(!contains(&outer, &poking, 0));
        assert!(contains(&outer, &poking, 5));
        assert!(!contains(&outer, &poking, 4));
    }

    #[test]
    fn axis_gap_examples() {
        assert_eq!(axis_gap(&b(0, 0, 10, 10), &b(10, 0, 20, 10), Axis::Horizontal), 0);
        assert_eq!(axis_gap(&b(0, 0, 10, 10), &b(0, 20, 10, 30), Axis::Vertical), 10);
        assert_eq!(axis_gap(&b(0, 0, 10, 10), &b(5, 5, 15, 15), Axis::Vertical), 0);
    }

    #[test]
    fn centers_are_not_quantized() {
        let w = Widget::non_text(WidgetId(0), b(0, 0, 5, 3));
        assert_eq!(w.center_x(), 2.5);
        assert_eq!(w.center_y(), 1.5);
        assert_eq!(w.area(), 15);
    }

    #[test]
    fn reclassify_keeps_text_invariant() {
        let mut w = Widget::text(WidgetId(1), b(0, 0, 4, 4), "@");
        w.reclassify(WidgetClass::NonText);
        assert_eq!(w.text_content(), None);
        w.reclassify(WidgetClass::Text);
        assert_eq!(w.text_content(), Some(""));
    }

    #[test]
    fn bbox_json_is_a_four_array() {
        let s = serde_json::to_string(&b(1, 2, 3, 4)).unwrap();
        assert_eq!(s, "[1,2,3,4]");
        assert!(serde_json::from_str::<BBox>("[3,2,1,4]").is_err());
    }

    fn arb_box() -> impl Strategy<Value = BBox> {
        (0u32..60, 0u32..60, 1u32..40, 1u32..40).prop_map(|(l, t, w, h)| b(l, t, l + w, t + h))
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded(a in arb_box(), c in arb_box()) {
            let x = iou(&a, &c);
            prop_assert_eq!(x, iou(&c, &a));
            prop_assert!((0.0..=1.0).contains(&x));
            prop_assert_eq!(iou(&a, &a), 1.0);
        }

        #[test]
        fn iou_matches_pixel_count(a in arb_box(), c in arb_box()) {
            prop_assert!((iou(&a, &c) - iou_by_pixels(&a, &c)).abs() < 1e-12);
        }

        #[test]
        fn mutual_containment_means_equal(a in arb_box(), c in arb_box()) {
            if contains(&a, &c, 0) && contains(&c, &a, 0) {
                prop_assert_eq!(a, c);
            }
        }

        #[test]
        fn axis_gap_symmetric_and_zero_iff_projections_meet(a in arb_box(), c in arb_box()) {
            for axis in [Axis::Horizontal, Axis::Vertical] {
                let g = axis_gap(&a, &c, axis);
                prop_assert_eq!(g, axis_gap(&c, &a, axis));
                let (a0, a1, c0, c1) = match axis {
                    Axis::Horizontal => (a.left(), a.right(), c.left(), c.right()),
                    Axis::Vertical => (a.top(), a.bottom(), c.top(), c.bottom()),
                };
                let meet = a0.max(c0) <= a1.min(c1);
                prop_assert_eq!(g == 0, meet);
            }
        }
    }
}
