use image::{Rgba, RgbaImage};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::detect::TextBox;
use crate::geometry::BBox;

pub const WHITE: Rgba<u8> = Rgba([255, 255, 255, 255]);

/// Character cell of the striped text glyphs at reference scale, px.
pub const CHAR_CELL: f64 = 8.0;
pub const TEXT_HEIGHT: f64 = 20.0;

pub struct Canvas {
    pub image: RgbaImage,
    pub scale: f64,
}

impl Canvas {
    pub fn new(width: u32, height: u32, reference_width: u32) -> Self {
        Canvas {
            image: RgbaImage::from_pixel(width, height, WHITE),
            scale: f64::from(width) / f64::from(reference_width),
        }
    }

    /// Reference-scale length to pixels, at least 1.
    pub fn px(&self, v: f64) -> u32 {
        ((v * self.scale).round() as u32).max(1)
    }

    pub fn fill(&mut self, b: &BBox, color: Rgba<u8>) {
        for y in b.top()..b.bottom().min(self.image.height()) {
            for x in b.left()..b.right().min(self.image.width()) {
                self.image.put_pixel(x, y, color);
            }
        }
    }

    /// Hollow frame of the given stroke, optionally with rounded corners.
    pub fn frame(&mut self, b: &BBox, stroke: u32, radius: u32, color: Rgba<u8>) {
        let (l, t, r, bt) = (
            f64::from(b.left()),
            f64::from(b.top()),
            f64::from(b.right()) - 1.0,
            f64::from(b.bottom()) - 1.0,
        );
        let rad = f64::from(radius);
        let s = f64::from(stroke);
        for y in b.top()..b.bottom() {
            for x in b.left()..b.right() {
                let (fx, fy) = (f64::from(x), f64::from(y));
                // distance from the rounded outline's inside
                let cx = fx.clamp(l + rad, r - rad);
                let cy = fy.clamp(t + rad, bt - rad);
                let d = (fx - cx).hypot(fy - cy);
                if d > rad + 0.5 {
                    continue;
                }
                let inner = (fx - l).min(r - fx).min(fy - t).min(bt - fy);
                let ring = if d > 0.0 { rad - d } else { inner };
                if ring.min(inner) < s {
                    self.image.put_pixel(x, y, color);
                }
            }
        }
    }

    /// Draws the striped glyphs of a line laid out by [`text_layout`].
    pub fn text_line(&mut self, left: u32, top: u32, words: &[String], color: Rgba<u8>) -> (BBox, Vec<TextBox>) {
        let cell = CHAR_CELL * self.scale;
        let stripe = self.px(2.0);
        let h = self.px(TEXT_HEIGHT);
        let mut cursor = 0usize;
        for word in words {
            for k in 0..word.chars().count() {
                let x = left + ((cursor + k) as f64 * cell + (cell - f64::from(stripe)) / 2.0).round() as u32;
                self.fill(&BBox::from_origin(x, top, stripe, h).expect("non-empty"), color);
            }
            cursor += word.chars().count() + 1;
        }
        text_layout(self.scale, left, top, words)
    }
}

/// Line box and one OCR box per word for a line starting at (left, top).
/// Words are separated by one empty cell.
pub fn text_layout(scale: f64, left: u32, top: u32, words: &[String]) -> (BBox, Vec<TextBox>) {
    let cell = CHAR_CELL * scale;
    let h = ((TEXT_HEIGHT * scale).round() as u32).max(1);
    let mut boxes = Vec::new();
    let mut cursor = 0usize;
    for word in words {
        let start = left + (cursor as f64 * cell).round() as u32;
        cursor += word.chars().count();
        let end = left + (cursor as f64 * cell).round() as u32;
        boxes.push(TextBox {
            bbox: BBox::new(start, top, end, top + h).expect("non-empty word"),
            content: word.clone(),
            confidence: Some(0.99),
        });
        cursor += 1;
    }
    let line = BBox::hull(boxes.iter().map(|b| &b.bbox)).expect("at least one word");
    (line, boxes)
}

/// A random word sequence with `chars` letters in total (spaces excluded).
pub fn words(rng: &mut ChaCha8Rng, chars: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut left = chars.max(1);
    while left > 0 {
        let n = rng.gen_range(2..=8).min(left);
        let w: String = (0..n).map(|_| char::from(b'a' + rng.gen_range(0..26u8))).collect();
        out.push(w);
        left -= n;
    }
    out
}

/// Saturated fill colors, all far from the white background.
pub fn fill_color(rng: &mut ChaCha8Rng) -> Rgba<u8> {
    const PALETTE: [[u8; 3]; 8] = [
        [33, 150, 243],
        [244, 67, 54],
        [76, 175, 80],
        [255, 152, 0],
        [156, 39, 176],
        [0, 150, 136],
        [96, 125, 139],
        [121, 85, 72],
    ];
    let c = PALETTE[rng.gen_range(0..PALETTE.len())];
    Rgba([c[0], c[1], c[2], 255])
}

pub fn frame_color(rng: &mut ChaCha8Rng) -> Rgba<u8> {
    let g = rng.gen_range(150..=200);
    Rgba([g, g, g, 255])
}

pub fn text_color(rng: &mut ChaCha8Rng) -> Rgba<u8> {
    let g = rng.gen_range(20..=80);
    Rgba([g, g, g, 255])
}
