//! Grid primitives shared by the whole pipeline.
//!
//! Coordinates are `(row, col)` with the origin at the top-left corner; all
//! orderings and tie-breaks in this crate are row-major (row first, then
//! column). Two pixel-distance notions are used: Chebyshev distance for
//! square windows (patches, dilation, suppression neighborhoods) and
//! Euclidean distance for path lengths and separation thresholds.

mod heatmap;
mod line;
pub(crate) mod thin;

pub use heatmap::{extract_peaks, render_heatmap};
pub use line::rasterize_segment;
pub use thin::skeletonize;

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A pixel location: `row` (y, downward) then `col` (x, rightward).
///
/// The derived `Ord` is row-major, which is what every deterministic
/// tie-break in this crate relies on. Serializes as a two-element array
/// `[row, col]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PixelCoord {
    pub row: usize,
    pub col: usize,
}

impl PixelCoord {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Chebyshev (chessboard) distance: `max(|dr|, |dc|)`.
    pub fn chebyshev(&self, other: &PixelCoord) -> usize {
        let dr = self.row.abs_diff(other.row);
        let dc = self.col.abs_diff(other.col);
        dr.max(dc)
    }

    /// Squared Euclidean distance as an exact integer.
    pub fn dist2(&self, other: &PixelCoord) -> u64 {
        let dr = self.row.abs_diff(other.row) as u64;
        let dc = self.col.abs_diff(other.col) as u64;
        dr * dr + dc * dc
    }

    /// Euclidean distance.
    pub fn euclid(&self, other: &PixelCoord) -> f64 {
        (self.dist2(other) as f64).sqrt()
    }
}

impl Serialize for PixelCoord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.row)?;
        t.serialize_element(&self.col)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for PixelCoord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = PixelCoord;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a [row, col] pair")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<PixelCoord, A::Error> {
                let row = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let col = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<serde::de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(PixelCoord { row, col })
            }
        }
        deserializer.deserialize_tuple(2, V)
    }
}

/// A detected structure point with a confidence in `[0, 1]`.
///
/// Produced both by heatmap peak extraction and by connectivity oracles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorderDetection {
    pub location: PixelCoord,
    pub confidence: f64,
}

/// An inclusive, already-clipped rectangular window of pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub row0: usize,
    pub row1: usize,
    pub col0: usize,
    pub col1: usize,
}

impl Window {
    /// The square window of `radius` around `center`, clipped to a
    /// `width x height` grid.
    pub fn centered(center: PixelCoord, radius: usize, width: usize, height: usize) -> Self {
        debug_assert!(width > 0 && height > 0);
        Self {
            row0: center.row.saturating_sub(radius),
            row1: (center.row + radius).min(height - 1),
            col0: center.col.saturating_sub(radius),
            col1: (center.col + radius).min(width - 1),
        }
    }

    /// The whole `width x height` grid as a window.
    pub fn full(width: usize, height: usize) -> Self {
        debug_assert!(width > 0 && height > 0);
        Self {
            row0: 0,
            row1: height - 1,
            col0: 0,
            col1: width - 1,
        }
    }

    /// The bounding box of two points dilated by `radius`, clipped to the grid.
    pub fn bounding(a: PixelCoord, b: PixelCoord, radius: usize, width: usize, height: usize) -> Self {
        debug_assert!(width > 0 && height > 0);
        Self {
            row0: a.row.min(b.row).saturating_sub(radius),
            row1: (a.row.max(b.row) + radius).min(height - 1),
            col0: a.col.min(b.col).saturating_sub(radius),
            col1: (a.col.max(b.col) + radius).min(width - 1),
        }
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        p.row >= self.row0 && p.row <= self.row1 && p.col >= self.col0 && p.col <= self.col1
    }

    pub fn width(&self) -> usize {
        self.col1 - self.col0 + 1
    }

    pub fn height(&self) -> usize {
        self.row1 - self.row0 + 1
    }

    /// All pixels of the window in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        let (c0, c1) = (self.col0, self.col1);
        (self.row0..=self.row1)
            .flat_map(move |row| (c0..=c1).map(move |col| PixelCoord { row, col }))
    }
}

/// A dense grid of probabilities in `[0, 1]`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ProbabilityMap {
    /// An all-zero map. Panics if either dimension is zero.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "map dimensions must be positive");
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    /// Wraps a row-major value buffer. Panics if the length is not
    /// `width * height`; values must already be in `[0, 1]`.
    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert!(width > 0 && height > 0, "map dimensions must be positive");
        assert_eq!(data.len(), width * height, "buffer length mismatch");
        debug_assert!(data.iter().all(|v| (0.0..=1.0).contains(v)));
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, p: PixelCoord) -> f64 {
        self.data[p.row * self.width + p.col]
    }

    pub fn set(&mut self, p: PixelCoord, value: f64) {
        debug_assert!((0.0..=1.0).contains(&value));
        self.data[p.row * self.width + p.col] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// All pixels in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        let w = self.width;
        (0..self.height).flat_map(move |row| (0..w).map(move |col| PixelCoord { row, col }))
    }

    /// The binary mask of pixels with value `>= tau`.
    pub fn threshold(&self, tau: f64) -> BinaryMask {
        let mut mask = BinaryMask::new(self.width, self.height);
        for (i, &v) in self.data.iter().enumerate() {
            mask.data[i] = v >= tau;
        }
        mask
    }

    fn in_bounds(&self, p: PixelCoord) -> bool {
        p.row < self.height && p.col < self.width
    }

    /// Bounds-checked accessor for callers handling untrusted coordinates.
    pub fn checked(&self, p: PixelCoord, what: &'static str) -> Result<f64> {
        if self.in_bounds(p) {
            Ok(self.get(p))
        } else {
            Err(Error::OutOfBounds {
                what,
                row: p.row,
                col: p.col,
                width: self.width,
                height: self.height,
            })
        }
    }
}

/// A dense boolean grid, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    /// An all-false mask. Panics if either dimension is zero.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, p: PixelCoord) -> bool {
        self.data[p.row * self.width + p.col]
    }

    pub fn set(&mut self, p: PixelCoord, value: bool) {
        self.data[p.row * self.width + p.col] = value;
    }

    pub fn in_bounds(&self, p: PixelCoord) -> bool {
        p.row < self.height && p.col < self.width
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// All true pixels in row-major order.
    pub fn iter_true(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        let w = self.width;
        self.data.iter().enumerate().filter_map(move |(i, &b)| {
            b.then_some(PixelCoord {
                row: i / w,
                col: i % w,
            })
        })
    }

    /// The probability map with 1.0 on true pixels and 0.0 elsewhere.
    pub fn to_probability_map(&self) -> ProbabilityMap {
        let data = self.data.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        ProbabilityMap::from_vec(self.width, self.height, data)
    }

    /// Chebyshev dilation: every pixel within distance `radius` of a true
    /// pixel becomes true.
    pub fn dilate(&self, radius: usize) -> BinaryMask {
        if radius == 0 {
            return self.clone();
        }
        let mut out = BinaryMask::new(self.width, self.height);
        for p in self.iter_true() {
            let win = Window::centered(p, radius, self.width, self.height);
            for row in win.row0..=win.row1 {
                let base = row * self.width;
                out.data[base + win.col0..=base + win.col1].fill(true);
            }
        }
        out
    }

    /// Number of 8-connected components of true pixels.
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.data.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.data.len() {
            if !self.data[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (row, col) = (i / self.width, i % self.width);
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        if dr == 0 && dc == 0 {
                            continue;
                        }
                        let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                        if nr < 0 || nc < 0 || nr >= self.height as i64 || nc >= self.width as i64 {
                            continue;
                        }
                        let j = nr as usize * self.width + nc as usize;
                        if self.data[j] && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_coord_orders_row_major() {
        let mut pts = vec![
            PixelCoord::new(1, 0),
            PixelCoord::new(0, 5),
            PixelCoord::new(0, 2),
            PixelCoord::new(1, 3),
        ];
        pts.sort();
        assert_eq!(
            pts,
            vec![
                PixelCoord::new(0, 2),
                PixelCoord::new(0, 5),
                PixelCoord::new(1, 0),
                PixelCoord::new(1, 3),
            ]
        );
    }

    #[test]
    fn pixel_coord_distances() {
        let a = PixelCoord::new(2, 3);
        let b = PixelCoord::new(5, 7);
        assert_eq!(a.chebyshev(&b), 4);
        assert_eq!(a.dist2(&b), 25);
        assert!((a.euclid(&b) - 5.0).abs() < 1e-12);
        assert_eq!(a.chebyshev(&a), 0);
    }

    #[test]
    fn pixel_coord_serializes_as_pair() {
        let p = PixelCoord::new(4, 9);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "[4,9]");
        let back: PixelCoord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<PixelCoord>("[1,2,3]").is_err());
        assert!(serde_json::from_str::<PixelCoord>("[1]").is_err());
    }

    #[test]
    fn window_clips_to_grid() {
        let w = Window::centered(PixelCoord::new(1, 1), 3, 10, 8);
        assert_eq!((w.row0, w.row1, w.col0, w.col1), (0, 4, 0, 4));
        let w = Window::centered(PixelCoord::new(7, 9), 2, 10, 8);
        assert_eq!((w.row0, w.row1, w.col0, w.col1), (5, 7, 7, 9));
        assert_eq!(w.width(), 3);
        assert_eq!(w.height(), 3);
    }

    #[test]
    fn window_iterates_row_major() {
        let w = Window {
            row0: 1,
            row1: 2,
            col0: 3,
            col1: 4,
        };
        let pts: Vec<_> = w.iter().collect();
        assert_eq!(
            pts,
            vec![
                PixelCoord::new(1, 3),
                PixelCoord::new(1, 4),
                PixelCoord::new(2, 3),
                PixelCoord::new(2, 4),
            ]
        );
    }

    #[test]
    fn threshold_is_inclusive() {
        let map = ProbabilityMap::from_vec(3, 1, vec![0.49, 0.5, 0.51]);
        let mask = map.threshold(0.5);
        assert!(!mask.get(PixelCoord::new(0, 0)));
        assert!(mask.get(PixelCoord::new(0, 1)));
        assert!(mask.get(PixelCoord::new(0, 2)));
    }

    #[test]
    fn dilate_is_chebyshev() {
        let mut m = BinaryMask::new(7, 7);
        m.set(PixelCoord::new(3, 3), true);
        let d = m.dilate(2);
        assert_eq!(d.count_ones(), 25);
        assert!(d.get(PixelCoord::new(1, 1)));
        assert!(!d.get(PixelCoord::new(0, 3)));
    }

    #[test]
    fn component_count_uses_8_connectivity() {
        let mut m = BinaryMask::new(5, 5);
        m.set(PixelCoord::new(0, 0), true);
        m.set(PixelCoord::new(1, 1), true); // diagonal: same component
        m.set(PixelCoord::new(3, 4), true); // far away: second component
        assert_eq!(m.component_count(), 2);
        assert_eq!(BinaryMask::new(4, 4).component_count(), 0);
    }
}
