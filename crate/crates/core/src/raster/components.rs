use crate::geometry::BBox;

use super::binarize::BinaryMap;

/// A connected foreground region. Membership lives in the owning
/// [`Components`] label grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub label: u32,
    pub bbox: BBox,
    pub area: u64,
}

/// 8-connected labeling of a [`BinaryMap`]. Label 0 is background; region
/// `i` carries label `i + 1`.
#[derive(Clone, Debug)]
pub struct Components {
    width: u32,
    height: u32,
    labels: Vec<u32>,
    pub regions: Vec<Region>,
}

impl Components {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn label_at(&self, x: i64, y: i64) -> u32 {
        if x < 0 || y < 0 || x >= i64::from(self.width) || y >= i64::from(self.height) {
            return 0;
        }
        self.labels[y as usize * self.width as usize + x as usize]
    }

    pub fn is_member(&self, region: &Region, x: i64, y: i64) -> bool {
        self.label_at(x, y) == region.label
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Member pixels of a region in raster order.
    pub fn pixels<'a>(&'a self, region: &'a Region) -> impl Iterator<Item = (u32, u32)> + 'a {
        let b = region.bbox;
        (b.top()..b.bottom())
            .flat_map(move |y| (b.left()..b.right()).map(move |x| (x, y)))
            .filter(move |&(x, y)| self.label_at(i64::from(x), i64::from(y)) == region.label)
    }
}

/// Labels 8-connected foreground regions, ordered top-to-bottom then
/// left-to-right by bbox origin.
pub fn connected_components(map: &BinaryMap) -> Components {
    let (w, h) = (map.width() as usize, map.height() as usize);
    let bits = map.as_raw();
    let mut labels = vec![0u32; w * h];
    let mut raw: Vec<(u32, u32, u32, u32, u64)> = Vec::new();
    let mut stack = Vec::new();

    for start in 0..w * h {
        if !bits[start] || labels[start] != 0 {
            continue;
        }
        let id = raw.len() as u32 + 1;
        labels[start] = id;
        stack.push(start);
        let (mut l, mut t, mut r, mut b, mut n) = (u32::MAX, u32::MAX, 0u32, 0u32, 0u64);
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            l = l.min(x as u32);
            t = t.min(y as u32);
            r = r.max(x as u32 + 1);
            b = b.max(y as u32 + 1);
            n += 1;
            let (x0, x1) = (x.saturating_sub(1), (x + 1).min(w - 1));
            let (y0, y1) = (y.saturating_sub(1), (y + 1).min(h - 1));
            for ny in y0..=y1 {
                for nx in x0..=x1 {
                    let j = ny * w + nx;
                    if bits[j] && labels[j] == 0 {
                        labels[j] = id;
                        stack.push(j);
                    }
                }
            }
        }
        raw.push((l, t, r, b, n));
    }

    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by_key(|&i| (raw[i].1, raw[i].0, i));
    let mut remap = vec![0u32; raw.len() + 1];
    let regions = order
        .iter()
        .enumerate()
        .map(|(new, &old)| {
            let (l, t, r, b, n) = raw[old];
            remap[old + 1] = new as u32 + 1;
            Region {
                label: new as u32 + 1,
                bbox: BBox::new(l, t, r, b).expect("non-empty region"),
                area: n,
            }
        })
        .collect();
    for v in labels.iter_mut() {
        *v = remap[*v as usize];
    }

    Components {
        width: map.width(),
        height: map.height(),
        labels,
        regions,
    }
}
