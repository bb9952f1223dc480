//! Integer line rasterization.

use super::PixelCoord;

/// Rasterizes the straight segment from `a` to `b` with Bresenham's
/// algorithm, inclusive of both endpoints, starting at `a`.
///
/// Consecutive output pixels are 8-adjacent, each pixel appears once, and the
/// result is deterministic. `a == b` yields a single pixel. The pixel set is
/// direction-independent: ties in the error term would otherwise round
/// differently per direction, so the trace always runs from the row-major
/// smaller endpoint and is reversed on output when that endpoint is `b`.
pub fn rasterize_segment(a: PixelCoord, b: PixelCoord) -> Vec<PixelCoord> {
    if b < a {
        let mut out = rasterize_segment(b, a);
        out.reverse();
        return out;
    }
    let (mut r0, mut c0) = (a.row as i64, a.col as i64);
    let (r1, c1) = (b.row as i64, b.col as i64);
    let dc = (c1 - c0).abs();
    let dr = -(r1 - r0).abs();
    let sc = if c0 < c1 { 1 } else { -1 };
    let sr = if r0 < r1 { 1 } else { -1 };
    let mut err = dc + dr;
    let mut out = Vec::with_capacity((dc - dr) as usize + 1);
    loop {
        out.push(PixelCoord::new(r0 as usize, c0 as usize));
        if r0 == r1 && c0 == c1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dr {
            err += dr;
            c0 += sc;
        }
        if e2 <= dc {
            err += dc;
            r0 += sr;
        }
    }
    out
}
