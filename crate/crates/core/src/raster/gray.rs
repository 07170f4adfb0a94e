use image::RgbaImage;

use crate::error::RasterError;

/// Row-major 8-bit intensity grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 || data.len() != width as usize * height as usize {
            return Err(RasterError::Empty);
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> u8) -> Result<Self, RasterError> {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        GrayImage::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    /// Most frequent intensity; ties go to the brighter value.
    pub fn dominant_intensity(&self) -> u8 {
        let mut hist = [0u64; 256];
        for &v in &self.data {
            hist[v as usize] += 1;
        }
        let mut best = 0usize;
        for (v, &count) in hist.iter().enumerate() {
            if count >= hist[best] {
                best = v;
            }
        }
        best as u8
    }
}

/// ITU-R 601 luma, rounded to nearest.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b) + 500) / 1000) as u8
}

fn over_white(c: u8, alpha: u8) -> u8 {
    let a = u32::from(alpha);
    ((u32::from(c) * a + 255 * (255 - a) + 127) / 255) as u8
}

/// Luma conversion with alpha composited over white.
pub fn to_grayscale(image: &RgbaImage) -> Result<GrayImage, RasterError> {
    let data = image
        .pixels()
        .map(|p| {
            let [r, g, b, a] = p.0;
            luma(over_white(r, a), over_white(g, a), over_white(b, a))
        })
        .collect();
    GrayImage::new(image.width(), image.height(), data)
}
