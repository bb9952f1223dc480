//! Gaussian peak heatmaps: rendering point sets to soft targets and decoding
//! them back to discrete detections.

use super::{BorderDetection, PixelCoord, ProbabilityMap, Window};
use crate::{Error, Result};

/// Renders an isotropic Gaussian peak of unit height at every location and
/// combines them with a pointwise maximum, clamped to 1.
///
/// `sigma` must be positive and every peak in bounds. An empty peak list
/// yields an all-zero map.
pub fn render_heatmap(
    peaks: &[PixelCoord],
    sigma: f64,
    width: usize,
    height: usize,
) -> Result<ProbabilityMap> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
    }
    let mut map = ProbabilityMap::new(width, height);
    let inv = 1.0 / (2.0 * sigma * sigma);
    for &peak in peaks {
        if peak.row >= height || peak.col >= width {
            return Err(Error::OutOfBounds {
                what: "heatmap peak",
                row: peak.row,
                col: peak.col,
                width,
                height,
            });
        }
    }
    for p in map.pixels().collect::<Vec<_>>() {
        let mut best = 0.0f64;
        for peak in peaks {
            let v = (-(p.dist2(peak) as f64) * inv).exp();
            if v > best {
                best = v;
            }
        }
        map.set(p, best.min(1.0));
    }
    Ok(map)
}

/// Decodes peaks from a heatmap: local maxima (value `>=` all 8 neighbors)
/// with value `>= threshold`, greedily selected in descending value order
/// while suppressing any candidate within Chebyshev distance
/// `min_separation` of an already-selected peak.
///
/// Ties are broken row-major, so the result is deterministic. The confidence
/// of each detection is the raw heatmap value at its location.
pub fn extract_peaks(
    map: &ProbabilityMap,
    threshold: f64,
    min_separation: usize,
) -> Vec<BorderDetection> {
    let mut candidates: Vec<(f64, PixelCoord)> = Vec::new();
    for p in map.pixels() {
        let v = map.get(p);
        if v < threshold {
            continue;
        }
        let win = Window::centered(p, 1, map.width(), map.height());
        if win.iter().all(|q| q == p || map.get(q) <= v) {
            candidates.push((v, p));
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut selected: Vec<BorderDetection> = Vec::new();
    for (v, p) in candidates {
        if selected
            .iter()
            .all(|d| d.location.chebyshev(&p) > min_separation)
        {
            selected.push(BorderDetection {
                location: p,
                confidence: v,
            });
        }
    }
    selected
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_peak_has_unit_center_and_gaussian_falloff() {
        let peak = PixelCoord::new(4, 4);
        let map = render_heatmap(&[peak], 2.0, 9, 9).unwrap();
        assert_eq!(map.get(peak), 1.0);
        // One pixel away: exp(-1/(2*4)) = exp(-0.125).
        let expect = (-0.125f64).exp();
        assert!((map.get(PixelCoord::new(4, 5)) - expect).abs() < 1e-12);
        // Diagonal pixel: exp(-2/(2*4)) = exp(-0.25).
        let expect = (-0.25f64).exp();
        assert!((map.get(PixelCoord::new(3, 3)) - expect).abs() < 1e-12);
    }

    #[test]
    fn peaks_combine_by_maximum() {
        let a = PixelCoord::new(2, 2);
        let b = PixelCoord::new(2, 6);
        let map = render_heatmap(&[a, b], 2.0, 9, 5).unwrap();
        let mid = PixelCoord::new(2, 4);
        // Midpoint is distance 2 from each peak: max of two equal Gaussians.
        let expect = (-(4.0) / 8.0f64).exp();
        assert!((map.get(mid) - expect).abs() < 1e-12);
        assert_eq!(map.get(a), 1.0);
        assert_eq!(map.get(b), 1.0);
    }

    #[test]
    fn empty_peaks_render_zero_map() {
        let map = render_heatmap(&[], 2.0, 4, 3).unwrap();
        assert!(map.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn render_rejects_bad_inputs() {
        assert!(matches!(
            render_heatmap(&[], 0.0, 4, 4),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            render_heatmap(&[PixelCoord::new(4, 0)], 1.0, 4, 4),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn close_peaks_suppress_to_the_higher_one() {
        // Peaks of height 0.9 at (2,2) and 0.8 at (2,4): Chebyshev distance 2,
        // so with min_separation=3 only the higher peak survives.
        let mut map = ProbabilityMap::new(7, 5);
        map.set(PixelCoord::new(2, 2), 0.9);
        map.set(PixelCoord::new(2, 4), 0.8);
        let peaks = extract_peaks(&map, 0.5, 3);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].location, PixelCoord::new(2, 2));
        assert_eq!(peaks[0].confidence, 0.9);
    }

    #[test]
    fn distant_peaks_both_survive() {
        let mut map = ProbabilityMap::new(9, 5);
        map.set(PixelCoord::new(2, 1), 0.8);
        map.set(PixelCoord::new(2, 7), 0.9);
        let peaks = extract_peaks(&map, 0.5, 3);
        let locs: Vec<_> = peaks.iter().map(|d| d.location).collect();
        // Selection order is by descending confidence.
        assert_eq!(locs, vec![PixelCoord::new(2, 7), PixelCoord::new(2, 1)]);
    }

    #[test]
    fn threshold_excludes_weak_maxima() {
        let mut map = ProbabilityMap::new(9, 5);
        map.set(PixelCoord::new(2, 1), 0.4);
        assert!(extract_peaks(&map, 0.5, 3).is_empty());
    }

    #[test]
    fn render_extract_round_trip() {
        let mut peaks = vec![
            PixelCoord::new(4, 4),
            PixelCoord::new(4, 12),
            PixelCoord::new(12, 8),
        ];
        let map = render_heatmap(&peaks, 2.0, 17, 17).unwrap();
        let found = extract_peaks(&map, 0.5, 3);
        let mut locs: Vec<_> = found.iter().map(|d| d.location).collect();
        locs.sort();
        peaks.sort();
        assert_eq!(locs, peaks);
        assert!(found.iter().all(|d| (d.confidence - 1.0).abs() < 1e-12));
    }
}
