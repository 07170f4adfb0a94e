use super::gray::GrayImage;

/// Row-major foreground mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMap {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMap {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width as usize * height as usize, "mask size mismatch");
        BinaryMap {
            width,
            height,
            bits,
        }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        BinaryMap::new(width, height, bits)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn as_raw(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Gradient-based foreground extraction.
///
/// Every pair of 4-adjacent pixels whose intensities differ by more than
/// `threshold` is an edge; the edge is attributed to the pixel of the pair
/// that lies further from the dominant (background) intensity, so a widget's
/// edge pixels are its own outermost pixels. Pixels outside the image count
/// as background. Afterwards, enclosed background pockets whose mean
/// intensity differs from the background are promoted to foreground, turning
/// solid widgets into solid regions while hollow frames stay hollow.
pub fn gradient_binarize(gray: &GrayImage, threshold: u8) -> BinaryMap {
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let px = gray.as_raw();
    let bg = i16::from(gray.dominant_intensity());
    let t = i16::from(threshold);
    let dist = |v: u8| (i16::from(v) - bg).abs();
    let mut bits = vec![false; w * h];

    let mark_pair = |bits: &mut [bool], i: usize, j: usize| {
        let (a, b) = (px[i], px[j]);
        if (i16::from(a) - i16::from(b)).abs() <= t {
            return;
        }
        let (da, db) = (dist(a), dist(b));
        if da >= db {
            bits[i] = true;
        }
        if db >= da {
            bits[j] = true;
        }
    };

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                mark_pair(&mut bits, i, i + 1);
            }
            if y + 1 < h {
                mark_pair(&mut bits, i, i + w);
            }
            let on_border = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
            if on_border && dist(px[i]) > t {
                bits[i] = true;
            }
        }
    }

    fill_enclosed(&mut bits, px, w, h, bg, t);
    BinaryMap::new(gray.width(), gray.height(), bits)
}

/// Background pockets (4-connected, not reaching the image border) are
/// filled when their mean intensity is not background-like.
fn fill_enclosed(bits: &mut [bool], px: &[u8], w: usize, h: usize, bg: i16, t: i16) {
    const OUTSIDE: u32 = u32::MAX;
    let mut comp = vec![0u32; w * h];
    let mut stack = Vec::new();

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let on_border = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
            if on_border && !bits[i] && comp[i] == 0 {
                comp[i] = OUTSIDE;
                stack.push(i);
            }
        }
    }
    flood4(&mut comp, bits, &mut stack, w, h, OUTSIDE, |_| {});

    let mut next = 1u32;
    let mut to_fill = Vec::new();
    for start in 0..w * h {
        if bits[start] || comp[start] != 0 {
            continue;
        }
        let id = next;
        next += 1;
        comp[start] = id;
        stack.push(start);
        let (mut sum, mut n) = (u64::from(px[start]), 1u64);
        flood4(&mut comp, bits, &mut stack, w, h, id, |j| {
            sum += u64::from(px[j]);
            n += 1;
        });
        let mean = sum as f64 / n as f64;
        if (mean - f64::from(bg)).abs() > f64::from(t) {
            to_fill.push(id);
        }
    }
    if to_fill.is_empty() {
        return;
    }
    for i in 0..w * h {
        if !bits[i] && comp[i] != OUTSIDE && to_fill.binary_search(&comp[i]).is_ok() {
            bits[i] = true;
        }
    }
}

fn flood4(
    comp: &mut [u32],
    bits: &[bool],
    stack: &mut Vec<usize>,
    w: usize,
    h: usize,
    id: u32,
    mut visit: impl FnMut(usize),
) {
    while let Some(i) = stack.pop() {
        let (x, y) = (i % w, i / w);
        let mut push = |j: usize, comp: &mut [u32]| {
            if !bits[j] && comp[j] == 0 {
                comp[j] = id;
                visit(j);
                stack.push(j);
            }
        };
        if x > 0 {
            push(i - 1, comp);
        }
        if x + 1 < w {
            push(i + 1, comp);
        }
        if y > 0 {
            push(i - w, comp);
        }
        if y + 1 < h {
            push(i + w, comp);
        }
    }
}
